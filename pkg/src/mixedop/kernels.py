"""Operator-valued kernels on weighted relations.

Covers application of the mixed operator and of the weighted
composition operator, induced matrix norms between weighted r-norm
spaces, and the per-atom direction optimization ("fiber effectiveness")
that the decoupled operator norm is assembled from.

Induced r -> r' norms are NP-hard in general; outside the closed-form
branches the optimizer returns an honest ``lower_bound`` certificate,
and a dense unit-sphere grid oracle is provided for desk-scale
cross-checks in dimensions 2 and 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import (
    DimensionMismatchError,
    MissingPairError,
    UnknownAtomError,
    UnsupportedExponentsError,
)
from .fibers import (
    FiberFamily,
    NormSpec,
    Section,
    check_exponent,
    ell_power_sum,
    fiber_norm,
    lp_measure_norm,
    weighted_power_sum,
)
from .measure import AtomMap, WeightedRelation
from .rng import START_TAG, substream

INF = math.inf

EXACT = "exact"
LOWER_BOUND = "lower_bound"

# multistart projected ascent configuration
ASCENT_STARTS = 16
ASCENT_ITERATIONS = 200
ASCENT_TOL = 1e-12
_START_SEED = 0x9E3779B9

# grid oracle resolution: full circle / sphere, then one refinement pass
CIRCLE_POINTS = 10_000
SPHERE_POINTS = 100_000


def kappa(p, q) -> float:
    """The conjugate-type exponent p q / (p - q); inf when p = q.

    Requires 1 <= q <= p, with p finite unless p = q.
    """
    p = check_exponent(p)
    q = check_exponent(q)
    if p < q:
        raise UnsupportedExponentsError(f"q <= p required, got p={p}, q={q}")
    if p == q:
        return INF
    if math.isinf(p):
        raise UnsupportedExponentsError("p = inf is supported only when p = q")
    return p * q / (p - q)


@dataclass(frozen=True)
class Exponents:
    """A validated source/target exponent pair with its derived kappa."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_exponent(self.p))
        object.__setattr__(self, "q", check_exponent(self.q))
        kappa(self.p, self.q)

    @property
    def kappa(self) -> float:
        return kappa(self.p, self.q)


@dataclass(frozen=True)
class NormResult:
    """A norm value together with how it was obtained.

    ``exact`` comes only from a closed-form branch; iterative ascent
    yields ``lower_bound``.
    """

    value: float
    certificate: str

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("norm value must be nonnegative")
        if self.certificate not in (EXACT, LOWER_BOUND):
            raise ValueError(f"unknown certificate {self.certificate!r}")


class OperatorKernel:
    """P(s, t): a dense real matrix from the domain fiber W_t into the
    codomain fiber V_s, for every pair of a weighted relation.

    The kernel bundles the relation (F, lambda) and both fiber families,
    which together form a complete mixed-operator instance.
    """

    def __init__(
        self,
        relation: WeightedRelation,
        domain_family: FiberFamily,
        codomain_family: FiberFamily,
        matrices: Mapping[tuple[str, str], np.ndarray],
    ):
        if domain_family.base != relation.target:
            raise UnknownAtomError("domain family must live over the relation's target space")
        if codomain_family.base != relation.source:
            raise UnknownAtomError("codomain family must live over the relation's source space")
        given = set(matrices)
        wanted = set(relation.pairs)
        if given != wanted:
            missing = sorted(wanted - given)
            if missing:
                raise MissingPairError(f"matrices missing for pairs {missing[:5]}")
            raise ValueError(f"matrices given for pairs outside the relation: {sorted(given - wanted)[:5]}")
        mats = {}
        for (s, t) in relation.pairs:
            a = np.atleast_2d(np.asarray(matrices[(s, t)], dtype=float))
            want = (codomain_family.dim(s), domain_family.dim(t))
            if a.shape != want:
                raise DimensionMismatchError(
                    f"matrix at ({s!r}, {t!r}) has shape {a.shape}, expected {want}"
                )
            a.flags.writeable = False
            mats[(s, t)] = a
        self.relation = relation
        self.domain_family = domain_family
        self.codomain_family = codomain_family
        self._matrices = mats
        self._norm_cache: dict[tuple[str, str], NormResult] = {}
        self._eff_cache: dict[tuple[str, float], NormResult] = {}

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return self.relation.pairs

    def matrix(self, s_id: str, t_id: str) -> np.ndarray:
        try:
            return self._matrices[(s_id, t_id)]
        except KeyError:
            raise MissingPairError(f"pair ({s_id!r}, {t_id!r}) not in relation") from None

    def matrix_norm(self, s_id: str, t_id: str) -> NormResult:
        """Induced norm of P(s, t) from W_t to V_s (cached)."""
        key = (s_id, t_id)
        if key not in self._norm_cache:
            self._norm_cache[key] = matrix_operator_norm(
                self.matrix(s_id, t_id),
                self.domain_family.norm(t_id),
                self.codomain_family.norm(s_id),
            )
        return self._norm_cache[key]

    def scaled(self, factor: float) -> "OperatorKernel":
        """A new kernel with every matrix multiplied by ``factor``."""
        return OperatorKernel(
            self.relation,
            self.domain_family,
            self.codomain_family,
            {k: factor * m for k, m in self._matrices.items()},
        )

    def restrict_targets(self, keep) -> "OperatorKernel":
        """Sub-instance keeping only pairs whose target atom is in ``keep``."""
        rel = self.relation.restrict_targets(keep)
        return OperatorKernel(
            rel,
            self.domain_family,
            self.codomain_family,
            {k: self._matrices[k] for k in rel.pairs},
        )

    def __repr__(self) -> str:
        return f"OperatorKernel({len(self.pairs)} pairs)"


def apply_mixed(kernel: OperatorKernel, f: Section) -> dict[tuple[str, str], np.ndarray]:
    """The mixed operator: value at (s, t) is P(s, t) applied to f(t)."""
    kernel.domain_family.validate_section(f)
    return {(s, t): kernel.matrix(s, t) @ f[t] for (s, t) in kernel.pairs}


def output_norm(kernel: OperatorKernel, g: Mapping[tuple[str, str], np.ndarray], q) -> float:
    """L^q(F, lambda) norm of a section over the relation, with V_s fiber norms."""
    q = check_exponent(q)
    vals = np.array(
        [fiber_norm(np.asarray(g[(s, t)], dtype=float), kernel.codomain_family.norm(s))
         for (s, t) in kernel.pairs]
    )
    return lp_measure_norm(vals, kernel.relation.weights, q)


def apply_weighted_composition(kernel: OperatorKernel, psi: AtomMap, f: Section) -> Section:
    """The weighted composition operator: s -> P(s, psi(s)) f(psi(s)).

    Coincides with the mixed operator on the graph relation composed
    with the isomorphism g(s) = g(s, psi(s)).
    """
    kernel.domain_family.validate_section(f)
    out = {}
    for s in kernel.relation.source.ids:
        t = psi(s)
        if (s, t) not in kernel.relation:
            raise MissingPairError(f"pair ({s!r}, {t!r}) not in the kernel's relation")
        out[s] = kernel.matrix(s, t) @ f[t]
    return Section(out)


# ---------------------------------------------------------------------------
# induced matrix norms
# ---------------------------------------------------------------------------

def _dual(r: float) -> float:
    if r == 1.0:
        return INF
    if math.isinf(r):
        return 1.0
    return r / (r - 1.0)


def _col_norms(X: np.ndarray, r: float) -> np.ndarray:
    if math.isinf(r):
        return np.max(np.abs(X), axis=0)
    return np.sum(np.abs(X) ** r, axis=0) ** (1.0 / r)


def _dual_power(Y: np.ndarray, r: float) -> np.ndarray:
    """Column-wise duality map sign(y) |y|^(r-1); subgradient picks for r in {1, inf}."""
    if r == 1.0:
        return np.sign(Y)
    if math.isinf(r):
        Z = np.zeros_like(Y)
        rows = np.argmax(np.abs(Y), axis=0)
        cols = np.arange(Y.shape[1])
        Z[rows, cols] = np.sign(Y[rows, cols])
        return Z
    return np.sign(Y) * np.abs(Y) ** (r - 1.0)


def _ascent_starts(d: int, m: int) -> np.ndarray:
    """Basis vectors, their normalized sum, and seeded random fill-ins."""
    cols = []
    for i in range(min(d, m // 2)):
        e = np.zeros(d)
        e[i] = 1.0
        cols.append(e)
    cols.append(np.ones(d))
    g = substream(_START_SEED, START_TAG, d)
    while len(cols) < m:
        cols.append(g.standard_normal(d))
    return np.column_stack(cols[:m])


def _normalize_columns(X: np.ndarray, a: float) -> np.ndarray:
    n = _col_norms(X, a)
    dead = n == 0
    if np.any(dead):
        X = X.copy()
        X[:, dead] = 0.0
        X[0, dead] = 1.0
        n = _col_norms(X, a)
    return X / n


def _induced_norm_ascent(
    B: np.ndarray,
    a: float,
    b: float,
    starts: int = ASCENT_STARTS,
    iterations: int = ASCENT_ITERATIONS,
    tol: float = ASCENT_TOL,
) -> float:
    """Multistart fixed-point ascent for the unweighted a -> b induced norm.

    Each step maps x to Psi_{a'}(B^T Psi_b(Bx)) and renormalizes; the
    attained value is nondecreasing, so the best iterate is a valid
    lower bound.
    """
    X = _normalize_columns(_ascent_starts(B.shape[1], starts), a)
    best = 0.0
    prev = np.full(X.shape[1], -1.0)
    for _ in range(iterations):
        Y = B @ X
        vals = _col_norms(Y, b)
        best = max(best, float(np.max(vals)))
        if np.all(np.abs(vals - prev) <= tol * np.maximum(vals, 1.0)):
            break
        prev = vals
        safe = np.where(vals > 0, vals, 1.0)
        U = _dual_power(Y / safe, b)
        X = _normalize_columns(_dual_power(B.T @ U, _dual(a)), a)
    return best


def matrix_operator_norm(A: np.ndarray, in_norm: NormSpec, out_norm: NormSpec) -> NormResult:
    """sup of ||A e||_out over the unit ball of the in norm.

    Exact branches: one input dimension; in-exponent 1 (signed basis
    vertices); out-exponent inf (independent rows, dual norms); the
    l2 -> l2 case (largest singular value of the weight-conjugated
    matrix).  Everything else falls back to multistart ascent with a
    ``lower_bound`` certificate.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape != (out_norm.dim, in_norm.dim):
        raise DimensionMismatchError(
            f"matrix shape {A.shape} does not map dim {in_norm.dim} to dim {out_norm.dim}"
        )
    B = (out_norm.scale()[:, None] * A) / in_norm.scale()[None, :]
    a, b = in_norm.r, out_norm.r
    if not np.any(B):
        return NormResult(0.0, EXACT)
    if B.shape[1] == 1:
        return NormResult(ell_power_sum(B[:, 0], b), EXACT)
    if a == 1.0:
        return NormResult(max(ell_power_sum(B[:, j], b) for j in range(B.shape[1])), EXACT)
    if math.isinf(b):
        return NormResult(max(ell_power_sum(B[i, :], _dual(a)) for i in range(B.shape[0])), EXACT)
    if a == 2.0 and b == 2.0:
        return NormResult(float(np.linalg.svd(B, compute_uv=False)[0]), EXACT)
    return NormResult(_induced_norm_ascent(B, a, b), LOWER_BOUND)


def matrix_norm_objective(
    A: np.ndarray, in_norm: NormSpec, out_norm: NormSpec
) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ||A e||_out over rows of unit directions; for grid oracles."""
    A = np.atleast_2d(np.asarray(A, dtype=float))

    def objective(E: np.ndarray) -> np.ndarray:
        return out_norm.row_norms(E @ A.T)

    return objective


# ---------------------------------------------------------------------------
# fiber effectiveness
# ---------------------------------------------------------------------------

def _effectiveness_ascent(
    Bs: list[np.ndarray],
    bs: list[float],
    lams: np.ndarray,
    a: float,
    q: float,
    starts: int = ASCENT_STARTS,
    iterations: int = ASCENT_ITERATIONS,
    tol: float = ASCENT_TOL,
) -> float:
    """Multistart ascent for sup (sum_s lam_s ||B_s e||_{b_s}^q)^(1/q) on
    the unit sphere of the unweighted a-norm.

    Generalizes the single-matrix fixed point: the update direction is
    the weighted sum of per-matrix subgradients.
    """
    d = Bs[0].shape[1]
    X = _normalize_columns(_ascent_starts(d, starts), a)
    best = 0.0
    prev = np.full(X.shape[1], -1.0)
    for _ in range(iterations):
        Ys = [B @ X for B in Bs]
        V = np.stack([_col_norms(Y, b) for Y, b in zip(Ys, bs)])
        vals = (lams[:, None] * V ** q).sum(axis=0) ** (1.0 / q)
        best = max(best, float(np.max(vals)))
        if np.all(np.abs(vals - prev) <= tol * np.maximum(vals, 1.0)):
            break
        prev = vals
        Z = np.zeros_like(X)
        for B, b, lam, Y, v in zip(Bs, bs, lams, Ys, V):
            safe = np.where(v > 0, v, 1.0)
            Z += (lam * v ** (q - 1.0)) * (B.T @ _dual_power(Y / safe, b))
        X = _normalize_columns(_dual_power(Z, _dual(a)), a)
    return best


def effectiveness_objective(
    kernel: OperatorKernel, t_id: str, q
) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized c_t evaluator over rows of unit W_t directions.

    Feeds both the sampling oracle and the grid cross-checks, so every
    route optimizes literally the same function.
    """
    q = check_exponent(q)
    pairs = kernel.relation.pairs_for_target(t_id)
    mats = [kernel.matrix(s, t_id) for s, _ in pairs]
    outs = [kernel.codomain_family.norm(s) for s, _ in pairs]
    lams = [lam for _, lam in pairs]

    def objective(E: np.ndarray) -> np.ndarray:
        E = np.atleast_2d(np.asarray(E, dtype=float))
        acc = np.zeros(E.shape[0])
        for A, out, lam in zip(mats, outs, lams):
            acc += lam * out.row_norms(E @ A.T) ** q
        return acc ** (1.0 / q)

    return objective


def fiber_effectiveness(kernel: OperatorKernel, t_id: str, q) -> NormResult:
    """c(t) = sup over unit e in W_t of (sum_{s in F_t} lam_st ||P(s,t) e||_{V_s}^q)^(1/q).

    The per-atom ingredient of the decoupled operator norm.  Exact
    branches: empty fiber (0); singleton fiber (lam^(1/q) times the
    matrix norm); scalar W_t; W_t with exponent 1 (signed basis
    vertices, the objective being convex); q = 2 with all-l2 fibers
    (largest eigenvalue of the weight-conjugated quadratic form).
    """
    q = check_exponent(q)
    if math.isinf(q):
        raise UnsupportedExponentsError("fiber effectiveness needs finite q")
    key = (t_id, q)
    cached = kernel._eff_cache.get(key)
    if cached is not None:
        return cached
    result = _fiber_effectiveness(kernel, t_id, q)
    kernel._eff_cache[key] = result
    return result


def _fiber_effectiveness(kernel: OperatorKernel, t_id: str, q: float) -> NormResult:
    pairs = kernel.relation.pairs_for_target(t_id)
    if not pairs:
        return NormResult(0.0, EXACT)
    if len(pairs) == 1:
        s, lam = pairs[0]
        r = kernel.matrix_norm(s, t_id)
        return NormResult(lam ** (1.0 / q) * r.value, r.certificate)
    W = kernel.domain_family.norm(t_id)
    lams = np.array([lam for _, lam in pairs])
    if W.dim == 1:
        vals = np.array([kernel.matrix_norm(s, t_id).value for s, _ in pairs])
        return NormResult(weighted_power_sum(vals, lams, q), EXACT)
    mats = [kernel.matrix(s, t_id) for s, _ in pairs]
    outs = [kernel.codomain_family.norm(s) for s, _ in pairs]
    in_scale = W.scale()
    Bs = [(o.scale()[:, None] * m) / in_scale[None, :] for m, o in zip(mats, outs)]
    bs = [o.r for o in outs]
    if W.r == 1.0:
        best = max(
            weighted_power_sum(np.array([ell_power_sum(B[:, j], b) for B, b in zip(Bs, bs)]), lams, q)
            for j in range(W.dim)
        )
        return NormResult(best, EXACT)
    if q == 2.0 and W.r == 2.0 and all(b == 2.0 for b in bs):
        M = np.zeros((W.dim, W.dim))
        for lam, B in zip(lams, Bs):
            M += lam * (B.T @ B)
        top = float(np.linalg.eigvalsh((M + M.T) / 2.0)[-1])
        return NormResult(math.sqrt(max(top, 0.0)), EXACT)
    return NormResult(_effectiveness_ascent(Bs, bs, lams, W.r, q), LOWER_BOUND)


def pointwise_norm_aggregate(kernel: OperatorKernel, t_id: str, q) -> NormResult:
    """(sum_{s in F_t} lam_st ||P(s,t)||^q)^(1/q): sup moved inside the sum.

    Always >= fiber_effectiveness; the gap is what separates the
    criterion from the operator norm on multi-dimensional fibers.
    """
    q = check_exponent(q)
    pairs = kernel.relation.pairs_for_target(t_id)
    if not pairs:
        return NormResult(0.0, EXACT)
    results = [kernel.matrix_norm(s, t_id) for s, _ in pairs]
    vals = np.array([r.value for r in results])
    lams = np.array([lam for _, lam in pairs])
    cert = EXACT if all(r.certificate == EXACT for r in results) else LOWER_BOUND
    return NormResult(weighted_power_sum(vals, lams, q), cert)


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------

def _refine_circle(objective, norm: NormSpec, theta: float, span: float, n: int) -> float:
    angles = np.linspace(theta - span, theta + span, n)
    raw = np.column_stack([np.cos(angles), np.sin(angles)])
    E = raw / norm.row_norms(raw)[:, None]
    return float(np.max(objective(E)))


def direction_grid_oracle(objective, norm: NormSpec, points: int | None = None) -> float:
    """Dense unit-sphere grid oracle for 2- and 3-dimensional fibers.

    Enumerates directions on the circle (default 10^4 points) or the
    sphere (default 10^5, golden spiral), takes the best one, and runs
    one local refinement pass around it.  Independent of the ascent
    path, so it serves as the exactness check for lower_bound branches.
    """
    d = norm.dim
    if d == 2:
        n = points or CIRCLE_POINTS
        angles = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        raw = np.column_stack([np.cos(angles), np.sin(angles)])
        E = raw / norm.row_norms(raw)[:, None]
        vals = objective(E)
        k = int(np.argmax(vals))
        coarse = float(vals[k])
        refined = _refine_circle(objective, norm, angles[k], 2.0 * math.pi / n, 2001)
        return max(coarse, refined)
    if d == 3:
        n = points or SPHERE_POINTS
        i = np.arange(n)
        z = 1.0 - 2.0 * (i + 0.5) / n
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = i * math.pi * (3.0 - math.sqrt(5.0))
        raw = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        E = raw / norm.row_norms(raw)[:, None]
        vals = objective(E)
        k = int(np.argmax(vals))
        coarse = float(vals[k])
        w = raw[k]
        # one refinement pass: tangent-plane grid around the best direction
        seed = np.zeros(3)
        seed[int(np.argmin(np.abs(w)))] = 1.0
        u = np.cross(w, seed)
        u /= np.linalg.norm(u)
        v = np.cross(w, u)
        spacing = 4.0 * math.sqrt(4.0 * math.pi / n)
        offs = np.linspace(-spacing, spacing, 41)
        A, Bm = np.meshgrid(offs, offs)
        cand = w[None, :] + A.reshape(-1, 1) * u[None, :] + Bm.reshape(-1, 1) * v[None, :]
        E2 = cand / norm.row_norms(cand)[:, None]
        refined = float(np.max(objective(E2)))
        return max(coarse, refined)
    raise ValueError(f"grid oracle supports dimensions 2 and 3, got {d}")
