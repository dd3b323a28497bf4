"""Boundedness criteria, the exact decoupled operator norm, the additive
set function with its per-atom derivative, sampling oracles, and the
sandwich report that confronts criterion against truth.

The decoupling reduction is the workhorse: the ratio ||M_F f|| / ||f||
depends on f only through one direction per atom (optimized inside the
fiber effectiveness c(t)) and the per-atom magnitude profile, which is
eliminated in closed form by the equality case of Holder's inequality.
For p > q that gives

    ||M_F|| = ( sum_t c(t)^kappa mu_t^(-kappa/p) )^(1/kappa),

and max_t c(t) mu_t^(-1/p) when p = q.  The criterion value is the same
aggregate with c(t) replaced by the pointwise-norm aggregate
(sum_s lam ||P||^q)^(1/q) >= c(t); the two coincide on scalar fibers,
singleton fibers, and whenever one direction maximizes all P(s, t) at
once, and the reported gap is meaningful otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    HypothesisViolationError,
    NotInjectiveError,
    SandwichViolationError,
    UnknownAtomError,
    UnsupportedExponentsError,
)
from .fibers import check_exponent, ell_power_sum, lp_measure_norm
from .kernels import (
    EXACT,
    LOWER_BOUND,
    NormResult,
    OperatorKernel,
    effectiveness_objective,
    fiber_effectiveness,
    kappa,
    pointwise_norm_aggregate,
)
from .measure import AtomMap, DensityFn, pushforward_volume_derivative
from .rng import ORACLE_TAG, SECTION_TAG, substream

EQUALITY_TOL = 1e-9
EXACT_SLACK = 1e-9
LOWER_BOUND_SLACK = 1e-6


def _finite_pair(p, q) -> tuple[float, float, float]:
    """Validate a source/target exponent pair for norm computations.

    Returns (p, q, kappa).  Both exponents must be finite here: q = inf
    never arises below p, and p = inf is outside the supported regime
    for source exponents.
    """
    p = check_exponent(p)
    q = check_exponent(q)
    k = kappa(p, q)
    if math.isinf(p) or math.isinf(q):
        raise UnsupportedExponentsError("infinite source/target exponents are not supported")
    return p, q, k


@dataclass(frozen=True)
class PhiValue:
    """Value of the best-constant set function on a subset of T."""

    subset: frozenset
    value: float


@dataclass(frozen=True)
class BoundednessReport:
    """Lower (decoupled norm), upper (criterion), and sampled oracle values."""

    p: float
    q: float
    kappa: float
    lower: float
    upper: float
    oracle: float
    equality: bool
    lower_certificate: str
    upper_certificate: str

    def to_record(self, instance_id: str = "") -> dict:
        """Flat record for CSV/JSON serialization."""
        return {
            "instance": instance_id,
            "p": self.p,
            "q": self.q,
            "kappa": self.kappa,
            "lower": self.lower,
            "upper": self.upper,
            "oracle": self.oracle,
            "equality": self.equality,
            "lower_certificate": self.lower_certificate,
            "upper_certificate": self.upper_certificate,
        }


@dataclass(frozen=True)
class UniformBoundsCriterion:
    """Criterion value with the uniform kernel-norm multipliers c, C."""

    value: float
    lower_mult: float
    upper_mult: float

    @property
    def lower(self) -> float:
        return self.lower_mult * self.value

    @property
    def upper(self) -> float:
        return self.upper_mult * self.value


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_general_result(kernel: OperatorKernel, p, q) -> NormResult:
    """Criterion norm with certificate: the mixed aggregate of
    ||P(s,t)|| J^(1/q) — outer L^kappa over T, inner q-sum over F_t."""
    p, q, k = _finite_pair(p, q)
    T = kernel.relation.target
    aggs = [pointwise_norm_aggregate(kernel, t, q) for t in T.ids]
    inner = np.array([a.value for a in aggs]) * T.weights ** (-1.0 / q)
    value = lp_measure_norm(inner, T.weights, k)
    cert = EXACT if all(a.certificate == EXACT for a in aggs) else LOWER_BOUND
    return NormResult(value, cert)


def criterion_general(kernel: OperatorKernel, p, q) -> float:
    """Boundedness criterion for a general absolutely continuous relation.

    ( sum_t mu_t ( sum_{s in F_t} nu_s ||P(s,t)||^q J(s,t) )^(kappa/q) )^(1/kappa),
    which on atoms reduces the inner sum to (1/mu_t) sum_s lam_st ||P||^q;
    for p = q the outer aggregate is the max over atoms.
    """
    return criterion_general_result(kernel, p, q).value


def criterion_uniform_t(kernel: OperatorKernel, rho: DensityFn, p, q, tol: float = 1e-9) -> float:
    """Criterion when the kernel norm depends on t alone: ||rho J^(1/q)||_{L^kappa(T)}.

    The hypothesis ||P(s, t)|| = rho(t) is verified across every fiber
    F_t within ``tol``; J = d(lambda_T)/d(mu) is the marginal density.
    """
    p, q, k = _finite_pair(p, q)
    rel = kernel.relation
    T = rel.target
    for t in T.ids:
        if t not in rho:
            raise UnknownAtomError(f"rho not defined on atom {t!r}")
    for (s, t) in rel.pairs:
        got = kernel.matrix_norm(s, t).value
        if abs(got - rho[t]) > tol * max(1.0, rho[t]):
            raise HypothesisViolationError(
                f"||P({s!r}, {t!r})|| = {got:.12g} differs from rho({t!r}) = {rho[t]:.12g}"
            )
    lam_t = np.zeros(len(T.ids))
    for i, t in enumerate(T.ids):
        lam_t[i] = sum(w for _, w in rel.pairs_for_target(t))
    J = lam_t / T.weights
    vals = np.array([rho[t] for t in T.ids]) * J ** (1.0 / q)
    return lp_measure_norm(vals, T.weights, k)


def _require_graph(kernel: OperatorKernel, psi: AtomMap) -> None:
    rel = kernel.relation
    if set(psi.source.ids) != set(rel.source.ids) or set(psi.target.ids) != set(rel.target.ids):
        raise UnknownAtomError("psi must map the relation's source atoms into its target atoms")
    graph = {(s, psi(s)) for s in rel.source.ids}
    if set(rel.pairs) != graph:
        raise HypothesisViolationError("the kernel's relation is not the graph of psi")


def criterion_graph_result(kernel: OperatorKernel, psi: AtomMap, p, q) -> NormResult:
    p, q, k = _finite_pair(p, q)
    if not psi.is_injective:
        raise NotInjectiveError("graph criterion requires an injective mapping")
    _require_graph(kernel, psi)
    rel = kernel.relation
    T = rel.target
    inv = {psi(s): s for s in rel.source.ids}
    vals = np.zeros(len(T.ids))
    certs = []
    for i, t in enumerate(T.ids):
        s = inv.get(t)
        if s is None:
            continue
        r = kernel.matrix_norm(s, t)
        certs.append(r.certificate)
        J = rel.weight(s, t) / T.weight(t)
        vals[i] = r.value * J ** (1.0 / q)
    value = lp_measure_norm(vals, T.weights, k)
    cert = EXACT if all(c == EXACT for c in certs) else LOWER_BOUND
    return NormResult(value, cert)


def criterion_graph(kernel: OperatorKernel, psi: AtomMap, p, q) -> float:
    """Criterion on the graph of an injective mapping.

    ||  ||P(psi^-1(t), t)|| J^(1/q)(t)  ||_{L^kappa(T)} with J the
    marginal density of the graph measure; atoms outside the image
    contribute zero.  With identity data and p = q this recovers the
    classical decomposable-operator condition (the ess-sup of the
    fiber norms).
    """
    return criterion_graph_result(kernel, psi, p, q).value


def criterion_uniform_bounds(
    kernel: OperatorKernel, psi: AtomMap, c: float, C: float, p, q, tol: float = 1e-9
) -> UniformBoundsCriterion:
    """Criterion under two-sided kernel-norm bounds c <= ||P|| <= C.

    Works for non-injective psi.  The relation must be the graph of psi
    carrying the measure nu of the source; the returned value is
    || J_{psi^-1}^(1/q) ||_{L^kappa(T)} and the exported contract is
    c * value <= ||M_psi|| <= C * value.
    """
    p, q, k = _finite_pair(p, q)
    if not (0 < c <= C):
        raise ValueError(f"need 0 < c <= C, got c={c}, C={C}")
    rel = kernel.relation
    if set(psi.source.ids) != set(rel.source.ids) or set(psi.target.ids) != set(rel.target.ids):
        raise UnknownAtomError("psi must map the relation's source atoms into its target atoms")
    if set(rel.pairs) != {(s, psi(s)) for s in rel.source.ids}:
        raise HypothesisViolationError("the kernel's relation is not the graph of psi")
    for s in rel.source.ids:
        lam = rel.weight(s, psi(s))
        nu_s = rel.source.weight(s)
        if abs(lam - nu_s) > 1e-12 * max(1.0, nu_s):
            raise HypothesisViolationError(
                "the graph must carry the source measure: lambda(s, psi(s)) = nu_s"
            )
    for (s, t) in rel.pairs:
        got = kernel.matrix_norm(s, t).value
        if got < c - tol * max(1.0, c) or got > C + tol * max(1.0, C):
            raise HypothesisViolationError(
                f"||P({s!r}, {t!r})|| = {got:.12g} outside [{c:.12g}, {C:.12g}]"
            )
    J = pushforward_volume_derivative(psi, rel.source, rel.target)
    T = rel.target
    vals = np.array([J[t] for t in T.ids]) ** (1.0 / q)
    return UniformBoundsCriterion(lp_measure_norm(vals, T.weights, k), c, C)


# ---------------------------------------------------------------------------
# exact norm via decoupling, set function, derivative
# ---------------------------------------------------------------------------

def exact_norm_decoupled(kernel: OperatorKernel, p, q) -> NormResult:
    """The operator norm of M_F on the finite instance.

    With c(t) the fiber effectiveness: the ell^kappa aggregate of
    c(t) mu_t^(-1/p) for p > q, and its max for p = q.  Exact whenever
    every per-atom direction problem hit a closed-form branch.
    """
    p, q, k = _finite_pair(p, q)
    T = kernel.relation.target
    effs = [fiber_effectiveness(kernel, t, q) for t in T.ids]
    x = np.array([e.value for e in effs]) * T.weights ** (-1.0 / p)
    value = ell_power_sum(x, k)
    cert = EXACT if all(e.certificate == EXACT for e in effs) else LOWER_BOUND
    return NormResult(value, cert)


def phi_value(kernel: OperatorKernel, subset, p, q) -> PhiValue:
    """The set function Phi(A) = ||M_F restricted to A||^kappa.

    Additive over disjoint subsets by construction (the decoupled norm
    is an atom-wise power sum); undefined for p = q, where kappa is
    infinite.
    """
    p, q, k = _finite_pair(p, q)
    if math.isinf(k):
        raise UnsupportedExponentsError("the set function needs p > q (finite kappa)")
    T = kernel.relation.target
    subset = frozenset(subset)
    unknown = subset - set(T.ids)
    if unknown:
        raise UnknownAtomError(f"unknown atoms {sorted(unknown)}")
    total = 0.0
    for t in sorted(subset):
        c = fiber_effectiveness(kernel, t, q).value
        total += (c * T.weight(t) ** (-1.0 / p)) ** k
    return PhiValue(subset, total)


def phi_derivative(kernel: OperatorKernel, t_id: str, p, q) -> float:
    """Per-atom derivative Phi'(t) = Phi({t}) / mu_t (atomic balls are atoms)."""
    return phi_value(kernel, [t_id], p, q).value / kernel.relation.target.weight(t_id)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def _unit_rows(raw: np.ndarray, norm) -> np.ndarray:
    norms = norm.row_norms(raw)
    dead = norms == 0
    if np.any(dead):
        raw = raw.copy()
        raw[dead] = 0.0
        raw[dead, 0] = 1.0
        norms = norm.row_norms(raw)
    return raw / norms[:, None]


def _profile_ratios(X: np.ndarray, k: float) -> np.ndarray:
    """Closed-form magnitude optimization per sample column.

    X holds c~(t) mu_t^(-1/p) per atom (rows) and sample (columns); the
    optimal ratio is the column ell^kappa aggregate (max when kappa is
    infinite), by the Holder equality choice of the magnitude profile.
    """
    if math.isinf(k):
        return X.max(axis=0) if X.size else np.zeros(X.shape[1])
    M = X.max(axis=0)
    safe = np.where(M > 0, M, 1.0)
    return M * np.sum((X / safe) ** k, axis=0) ** (1.0 / k)


def oracle_norm_sampling(
    kernel: OperatorKernel, p, q, n_samples: int = 1000, seed: int = 0
) -> float:
    """Sampled lower bound on the operator norm.

    Draws seeded random unit directions per atom (one counter-based
    stream per atom, so parallel evaluation order cannot change the
    result), optimizes the magnitude profile in closed form, and takes
    the best sample.  On scalar fibers directions are just signs, so a
    single sample is already exact.
    """
    p, q, k = _finite_pair(p, q)
    n = int(n_samples)
    if n < 1:
        raise ValueError("n_samples must be >= 1")
    T = kernel.relation.target
    if not len(T.ids):
        return 0.0
    X = np.zeros((len(T.ids), n))
    for i, t in enumerate(T.ids):
        if not kernel.relation.pairs_for_target(t):
            continue
        W = kernel.domain_family.norm(t)
        raw = substream(seed, ORACLE_TAG, i).standard_normal((n, W.dim))
        E = _unit_rows(raw, W)
        X[i] = effectiveness_objective(kernel, t, q)(E) * T.weight(t) ** (-1.0 / p)
    return float(np.max(_profile_ratios(X, k)))


def section_ratios(
    kernel: OperatorKernel, p, q, n_sections: int = 200, seed: int = 0
) -> np.ndarray:
    """||M_F f|| / ||f|| for seeded random sections f (no optimization).

    Feeds the sufficiency checks: every ratio must stay below the
    criterion value.
    """
    p, q, _ = _finite_pair(p, q)
    n = int(n_sections)
    if n < 1:
        raise ValueError("n_sections must be >= 1")
    T = kernel.relation.target
    num = np.zeros(n)
    den = np.zeros(n)
    raws = {}
    for i, t in enumerate(T.ids):
        W = kernel.domain_family.norm(t)
        raw = substream(seed, SECTION_TAG, i).standard_normal((n, W.dim))
        raws[t] = raw
        den += T.weight(t) * W.row_norms(raw) ** p
    for (s, t) in kernel.pairs:
        out = kernel.codomain_family.norm(s)
        lam = kernel.relation.weight(s, t)
        num += lam * out.row_norms(raws[t] @ kernel.matrix(s, t).T) ** q
    den = np.where(den > 0, den, 1.0)
    return num ** (1.0 / q) / den ** (1.0 / p)


# ---------------------------------------------------------------------------
# sandwich report
# ---------------------------------------------------------------------------

def _slack(certificate: str) -> float:
    return EXACT_SLACK if certificate == EXACT else LOWER_BOUND_SLACK


def sandwich_report(
    kernel: OperatorKernel, p, q, oracle_samples: int = 1000, seed: int = 0
) -> BoundednessReport:
    """Confront the criterion (upper) with the decoupled norm (lower)
    and the sampling oracle, asserting oracle <= lower <= upper.

    The equality flag records whether the criterion is attained; on
    multi-dimensional fibers with incompatible maximizing directions it
    is legitimately false.
    """
    p, q, k = _finite_pair(p, q)
    lower = exact_norm_decoupled(kernel, p, q)
    upper = criterion_general_result(kernel, p, q)
    oracle = oracle_norm_sampling(kernel, p, q, oracle_samples, seed)
    scale = max(1.0, upper.value)
    if oracle > lower.value + _slack(lower.certificate) * scale:
        raise SandwichViolationError(
            f"oracle {oracle:.15g} exceeds decoupled norm {lower.value:.15g}"
        )
    worst = LOWER_BOUND if LOWER_BOUND in (lower.certificate, upper.certificate) else EXACT
    if lower.value > upper.value + _slack(worst) * scale:
        raise SandwichViolationError(
            f"decoupled norm {lower.value:.15g} exceeds criterion {upper.value:.15g}"
        )
    equality = abs(upper.value - lower.value) <= EQUALITY_TOL * max(upper.value, 1.0)
    return BoundednessReport(
        p=p,
        q=q,
        kappa=k,
        lower=lower.value,
        upper=upper.value,
        oracle=oracle,
        equality=equality,
        lower_certificate=lower.certificate,
        upper_certificate=upper.certificate,
    )
