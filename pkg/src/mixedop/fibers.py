"""Finite-dimensional weighted r-norm fibers, sections over atomic bases,
L^p direct-integral norms, and mixed (q, alpha) norms together with
their direct-integral representation.

Exponents live in [1, inf]; ``math.inf`` is the distinguished infinite
value and every formula takes its max-limit there.  Scalar (dim-1)
fibers are first class: they realize classical weighted Lebesgue spaces.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatchError, InvalidExponentError, UnknownAtomError
from .measure import FiniteMeasureSpace

INF = math.inf


def check_exponent(r) -> float:
    """Validate a norm exponent; returns it as float (inf allowed)."""
    r = float(r)
    if math.isnan(r) or r < 1.0:
        raise InvalidExponentError(f"exponent must lie in [1, inf], got {r}")
    return r


def weighted_power_sum(values: np.ndarray, weights: np.ndarray, r: float) -> float:
    """(sum_i w_i |v_i|^r)^(1/r); for r = inf, max_i w_i |v_i|.

    The finite-r branch factors out the max term so large exponents
    cannot overflow.
    """
    v = np.abs(np.asarray(values, dtype=float))
    w = np.asarray(weights, dtype=float)
    if v.size == 0:
        return 0.0
    if math.isinf(r):
        return float(np.max(w * v))
    m = float(np.max(v))
    if m == 0.0:
        return 0.0
    return m * float(np.sum(w * (v / m) ** r)) ** (1.0 / r)


def lp_measure_norm(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    """L^p norm over an atomic measure: (sum w |v|^p)^(1/p).

    For p = inf this is the essential supremum, i.e. max |v| (every atom
    has positive weight, so the weights drop out).
    """
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(v))
    return weighted_power_sum(v, np.asarray(weights, dtype=float), p)


def ell_power_sum(values: np.ndarray, r: float) -> float:
    """Unweighted (sum |v|^r)^(1/r), max for r = inf; stable for large r."""
    return weighted_power_sum(values, np.ones(np.size(values)), r)


class NormSpec:
    """A weighted r-norm on R^d:  (sum_i w_i |v_i|^r)^(1/r).

    For r = inf the norm is max_i w_i |v_i|.  Weights are strictly
    positive and their count fixes the fiber dimension.
    """

    def __init__(self, r, weights: Iterable[float]):
        self.r = check_exponent(r)
        w = np.array(list(weights), dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d sequence")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be strictly positive and finite")
        w.flags.writeable = False
        self.weights = w

    @property
    def dim(self) -> int:
        return int(self.weights.size)

    def __call__(self, v) -> float:
        return fiber_norm(v, self)

    def row_norms(self, M: np.ndarray) -> np.ndarray:
        """Norm of every row of an (n, dim) array, vectorized."""
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"expected (n, {self.dim}) array, got shape {M.shape}"
            )
        if math.isinf(self.r):
            return np.max(self.weights * np.abs(M), axis=1)
        return (np.abs(M) ** self.r @ self.weights) ** (1.0 / self.r)

    def scale(self) -> np.ndarray:
        """Diagonal taking this norm to the unweighted r-norm.

        ||v||  =  || diag(scale) v ||_r  with scale = w^(1/r) for finite
        r and scale = w when r = inf.
        """
        if math.isinf(self.r):
            return np.asarray(self.weights, dtype=float)
        return self.weights ** (1.0 / self.r)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, NormSpec)
            and self.r == other.r
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"NormSpec(r={self.r}, dim={self.dim})"


def euclidean(dim: int) -> NormSpec:
    """Unit-weight l2 norm in the given dimension."""
    return NormSpec(2, np.ones(dim))


def fiber_norm(v, spec: NormSpec) -> float:
    """Evaluate a weighted r-norm on one vector."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size != spec.dim:
        raise DimensionMismatchError(
            f"vector of length {v.size if v.ndim == 1 else v.shape} "
            f"against norm of dimension {spec.dim}"
        )
    return weighted_power_sum(v, spec.weights, spec.r)


class Section:
    """One fiber element per atom: ``values[atom_id]`` is a real vector."""

    def __init__(self, values: Mapping[str, Iterable[float]]):
        store = {}
        for k, v in values.items():
            a = np.atleast_1d(np.asarray(v, dtype=float))
            if a.ndim != 1:
                raise DimensionMismatchError(f"value at {k!r} is not a vector")
            a.flags.writeable = False
            store[str(k)] = a
        self._values = store

    def __getitem__(self, atom_id: str) -> np.ndarray:
        try:
            return self._values[atom_id]
        except KeyError:
            raise UnknownAtomError(f"section not defined at {atom_id!r}") from None

    def __contains__(self, atom_id: str) -> bool:
        return atom_id in self._values

    def keys(self) -> list[str]:
        return sorted(self._values)

    def items(self) -> list[tuple[str, np.ndarray]]:
        return [(k, self._values[k]) for k in self.keys()]

    def __repr__(self) -> str:
        return f"Section({len(self._values)} atoms)"


class FiberFamily:
    """A normed finite-dimensional fiber over every atom of a base space."""

    def __init__(self, base: FiniteMeasureSpace, fibers: Mapping[str, NormSpec]):
        if set(fibers) != set(base.ids):
            raise UnknownAtomError("fiber map must be total on the base atoms")
        self.base = base
        self._fibers = {i: fibers[i] for i in base.ids}

    def norm(self, atom_id: str) -> NormSpec:
        try:
            return self._fibers[atom_id]
        except KeyError:
            raise UnknownAtomError(f"unknown atom {atom_id!r}") from None

    def dim(self, atom_id: str) -> int:
        return self.norm(atom_id).dim

    def items(self) -> list[tuple[str, NormSpec]]:
        return [(i, self._fibers[i]) for i in self.base.ids]

    def validate_section(self, f: Section) -> None:
        for i in self.base.ids:
            if i not in f:
                raise UnknownAtomError(f"section missing atom {i!r}")
            if f[i].size != self.dim(i):
                raise DimensionMismatchError(
                    f"section has length {f[i].size} at {i!r}, fiber dim is {self.dim(i)}"
                )

    def __repr__(self) -> str:
        dims = [self.dim(i) for i in self.base.ids]
        return f"FiberFamily({len(dims)} fibers, dims {min(dims, default=0)}..{max(dims, default=0)})"


def scalar_family(base: FiniteMeasureSpace, r: float = 2.0) -> FiberFamily:
    """All-scalar fibers with unit weight; the classical Lebesgue case."""
    return FiberFamily(base, {i: NormSpec(r, [1.0]) for i in base.ids})


def direct_integral_norm(f: Section, fam: FiberFamily, p) -> float:
    """|| f || = (sum_t mu_t ||f(t)||_t^p)^(1/p);  max over atoms for p = inf."""
    p = check_exponent(p)
    fam.validate_section(f)
    vals = np.array([fiber_norm(f[i], fam.norm(i)) for i in fam.base.ids])
    return lp_measure_norm(vals, fam.base.weights, p)


def _slices(cells: Iterable[tuple[str, str]]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for s, x in cells:
        out.setdefault(s, []).append(x)
    for s in out:
        out[s].sort()
    return out


def mixed_norm(
    g: Mapping[tuple[str, str], float],
    nu: FiniteMeasureSpace,
    eta: FiniteMeasureSpace,
    q,
    alpha,
) -> float:
    """Mixed Lebesgue norm on a grid Omega inside S x X.

    Inner alpha-aggregation over each slice Omega_s with eta weights,
    outer q-aggregation over S with nu weights.  Empty slices contribute
    zero; inf exponents become maxima (ess-sup).
    """
    q = check_exponent(q)
    alpha = check_exponent(alpha)
    slices = _slices(g.keys())
    for s in slices:
        if s not in nu:
            raise UnknownAtomError(f"grid names unknown outer atom {s!r}")
        for x in slices[s]:
            if x not in eta:
                raise UnknownAtomError(f"grid names unknown inner atom {x!r}")
    inner = np.zeros(len(nu.ids))
    for k, s in enumerate(nu.ids):
        xs = slices.get(s, [])
        if not xs:
            continue
        vals = np.array([g[(s, x)] for x in xs], dtype=float)
        wts = np.array([eta.weight(x) for x in xs])
        inner[k] = lp_measure_norm(vals, wts, alpha)
    return lp_measure_norm(inner, nu.weights, q)


def mixed_as_direct_integral(
    cells: Iterable[tuple[str, str]],
    nu: FiniteMeasureSpace,
    eta: FiniteMeasureSpace,
    alpha,
) -> FiberFamily:
    """Fiber family realizing L^{q,alpha}(Omega) as an L^q direct integral.

    The fiber over s is the slice space L^alpha(Omega_s, eta): dimension
    |Omega_s|, weighted alpha-norm with eta weights (unit weights when
    alpha = inf, where the ess-sup ignores atom mass).  Outer atoms with
    empty slices are dropped from the base; they contribute nothing to
    either norm route.
    """
    alpha = check_exponent(alpha)
    slices = _slices(cells)
    for s, xs in slices.items():
        if s not in nu:
            raise UnknownAtomError(f"grid names unknown outer atom {s!r}")
        if len(set(xs)) != len(xs):
            raise ValueError(f"duplicate cells in slice of {s!r}")
        for x in xs:
            if x not in eta:
                raise UnknownAtomError(f"grid names unknown inner atom {x!r}")
    base = nu.restrict(slices.keys())
    fibers = {}
    for s, xs in slices.items():
        if math.isinf(alpha):
            w = np.ones(len(xs))
        else:
            w = np.array([eta.weight(x) for x in xs])
        fibers[s] = NormSpec(alpha, w)
    return FiberFamily(base, fibers)


def grid_section(
    g: Mapping[tuple[str, str], float], cells: Iterable[tuple[str, str]]
) -> Section:
    """Reshape grid values into the section matching mixed_as_direct_integral.

    Slice cells are read in canonical (sorted) inner order, the same
    order the fiber weights were laid out in.
    """
    slices = _slices(cells)
    return Section({s: [g[(s, x)] for x in xs] for s, xs in slices.items()})
