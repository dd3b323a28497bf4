# The boundedness story on one small instance, end to end.
#
# Upper bound: the criterion norm (mixed aggregate of kernel norms times
# the density J^(1/q)).  Lower bound: the exact operator norm from the
# decoupling reduction (per-atom direction problems + closed-form
# magnitude profile).  A seeded sampling oracle corroborates from below.

from mixedop import (
    criterion_general,
    exact_norm_decoupled,
    kappa,
    oracle_norm_sampling,
    sandwich_report,
    section_ratios,
)
from mixedop.generators import projection_gap_instance, scalar17_instance

ker = scalar17_instance()

# Scalar fibers: the equality regime.  With p=4, q=2 (kappa=4) both
# sides equal 17^(1/4).
for p, q in [(4, 2), (2, 2), (3, 1.5)]:
    rep = sandwich_report(ker, p, q, oracle_samples=1000, seed=7)
    print(f"p={p}, q={q}, kappa={kappa(p, q)}: "
          f"oracle={rep.oracle:.12f} <= lower={rep.lower:.12f} <= upper={rep.upper:.12f} "
          f"equality={rep.equality}")

print("\n17^(1/4) =", 17 ** 0.25)

# Sufficiency in action: no random section beats the criterion.
ratios = section_ratios(ker, 4, 2, n_sections=200, seed=1)
print("max ||Mf||/||f|| over 200 random sections:", ratios.max(),
      "criterion:", criterion_general(ker, 4, 2))

# The necessity gap: on multi-dimensional fibers the criterion can
# exceed the true norm, because it lets every kernel pick its own best
# direction.  Two orthogonal projections make this extreme.
gap = projection_gap_instance()
rep = sandwich_report(gap, 2, 2, oracle_samples=2000, seed=2)
print("\nprojection gap: lower =", rep.lower, " upper =", rep.upper,
      " equality =", rep.equality)
print("true norm:", exact_norm_decoupled(gap, 2, 2).value,
      "  sampled:", oracle_norm_sampling(gap, 2, 2, 2000, seed=3))
