# Induced matrix norms between weighted r-norm spaces, and the per-atom
# direction optimization behind the operator norm.
#
# Exact branches cover one input dimension, l1 sources (vertex
# enumeration), sup-norm targets (row duals), and l2 -> l2 (SVD).
# Everything else falls back to multistart fixed-point ascent with an
# honest lower_bound certificate, cross-checkable against a dense
# unit-sphere grid in dimensions 2 and 3.

import numpy as np

import mixedop as mo

A = np.array([[1.0, 2.0], [3.0, 4.0]])
l2 = mo.NormSpec(2, [1.0, 1.0])
l1 = mo.NormSpec(1, [1.0, 1.0])

print("l2 -> l2:", mo.matrix_operator_norm(A, l2, l2))        # sigma_max
print("l1 -> l1:", mo.matrix_operator_norm(A, l1, l1))        # max column sum
print("l2 -> sup:", mo.matrix_operator_norm(A, l2, mo.NormSpec(mo.INF, [1.0, 1.0])))

# A non-classical pair: l3 -> l1.5.  The ascent reports a lower bound;
# the grid oracle confirms it is the supremum to grid resolution.
l3 = mo.NormSpec(3, [1.0, 1.0])
l15 = mo.NormSpec(1.5, [1.0, 1.0])
res = mo.matrix_operator_norm(A, l3, l15)
grid = mo.direction_grid_oracle(mo.matrix_norm_objective(A, l3, l15), l3)
print("\nl3 -> l1.5 ascent:", res)
print("l3 -> l1.5 grid oracle:", grid)

# Fiber effectiveness: the best single direction fed to ALL kernels of a
# fiber at once.  On the projection-gap instance no direction is good
# for both projections, so c(t) = 1 while the naive aggregate of kernel
# norms is sqrt(2).
ker = mo.OperatorKernel(
    mo.WeightedRelation(
        mo.FiniteMeasureSpace({"s1": 1.0, "s2": 1.0}),
        mo.FiniteMeasureSpace({"t1": 1.0}),
        [("s1", "t1", 1.0), ("s2", "t1", 1.0)],
    ),
    mo.FiberFamily(mo.FiniteMeasureSpace({"t1": 1.0}), {"t1": mo.NormSpec(2, [1.0, 1.0])}),
    mo.FiberFamily(
        mo.FiniteMeasureSpace({"s1": 1.0, "s2": 1.0}),
        {s: mo.NormSpec(2, [1.0, 1.0]) for s in ("s1", "s2")},
    ),
    {("s1", "t1"): [[1.0, 0.0], [0.0, 0.0]], ("s2", "t1"): [[0.0, 0.0], [0.0, 1.0]]},
)
print("\nfiber effectiveness c(t):", mo.fiber_effectiveness(ker, "t1", 2))
print("pointwise-norm aggregate:", mo.pointwise_norm_aggregate(ker, "t1", 2))
print("grid oracle over the circle:",
      mo.direction_grid_oracle(mo.effectiveness_objective(ker, "t1", 2),
                               ker.domain_family.norm("t1")))
