"""Certification on top of fitted polynomials: sampled safety levels, linear
counterexample search, global closeness-to-a-reference bounds, and reward
expectation lower bounds, with the supporting exact-polynomial machinery
(box integrals, L_p norms, super-level-set measure, rigorous maxima).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadNorm, CenterSingular, QuadratureFailure
from .intervals import Interval
from .poly import MPoly, RatFun
from .rng import uniform_block
from .scenario import (DEFAULT_SEED, PacPolynomial, SampleSet, draw_samples,
                       evaluate_samples, fit_pac, sample_count)
from .space import ParamSpace, box_volume

SAFE = "SafeWithGuarantee"
UNSAFE_WITNESS = "UnsafeWitness"
UNKNOWN = "Unknown"

CERTIFIED_SAFE = "CertifiedSafe"
POTENTIAL_UNSAFE = "PotentialUnsafe"
INCONCLUSIVE = "Inconclusive"

Z_99 = 2.5758293035489004  # two-sided 99% normal quantile


# -- polynomial plumbing -------------------------------------------------------

def _as_terms(poly) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """(exponent tuples, float coefficients) from any polynomial-ish value."""
    if isinstance(poly, PacPolynomial):
        return list(poly.template.monomials), np.asarray(poly.coeffs, dtype=float)
    if isinstance(poly, MPoly):
        items = poly.sorted_terms()
        return [a for a, _ in items], np.array([float(c) for _, c in items])
    template_or_monomials, coeffs = poly
    if hasattr(template_or_monomials, "monomials"):
        return list(template_or_monomials.monomials), np.asarray(coeffs, dtype=float)
    return [tuple(a) for a in template_or_monomials], np.asarray(coeffs, dtype=float)


def _eval_many(monomials, coeffs, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    A = np.asarray(monomials, dtype=float)
    if A.size == 0:
        return np.zeros(len(X))
    return np.prod(X[:, None, :] ** A[None, :, :], axis=2) @ coeffs


def _ratfun_eval_many(f: RatFun, X: np.ndarray) -> np.ndarray:
    num_m, num_c = _as_terms(f.num)
    den_m, den_c = _as_terms(f.den)
    return _eval_many(num_m, num_c, X) / _eval_many(den_m, den_c, X)


def poly_integral_box(poly, space: ParamSpace, normalize: bool = False) -> float:
    """Exact integral over the box: per dimension, x^a integrates to
    (U^(a+1) - L^(a+1)) / (a + 1).  normalize=True divides by the volume,
    giving the mean under the uniform measure."""
    monomials, coeffs = _as_terms(poly)
    lows, highs = space.lows, space.highs
    total = 0.0
    for alpha, coeff in zip(monomials, coeffs):
        factor = float(coeff)
        for i, a in enumerate(alpha):
            factor *= (highs[i] ** (a + 1) - lows[i] ** (a + 1)) / (a + 1)
        total += factor
    return total / box_volume(space) if normalize else total


def _squared_terms(monomials, coeffs) -> tuple[list[tuple[int, ...]], np.ndarray]:
    out: dict[tuple[int, ...], float] = {}
    for a1, c1 in zip(monomials, coeffs):
        for a2, c2 in zip(monomials, coeffs):
            key = tuple(x + y for x, y in zip(a1, a2))
            out[key] = out.get(key, 0.0) + float(c1) * float(c2)
    keys = sorted(out, key=lambda a: (sum(a), a))
    return keys, np.array([out[k] for k in keys])


def poly_lp_norm(poly, space: ParamSpace, beta: float = 0.0, p: float = 2) -> float:
    """L_p norm of (poly - beta) over the box.  p=2 integrates the expanded
    square exactly; other p >= 1 use adaptive quadrature (tolerance 1e-8)."""
    if p < 1:
        raise BadNorm(f"p={p} must be >= 1")
    monomials, coeffs = _as_terms(poly)
    monomials = list(monomials)
    coeffs = np.asarray(coeffs, dtype=float).copy()
    zero = (0,) * space.dim
    if zero in monomials:
        coeffs[monomials.index(zero)] -= beta
    else:
        monomials.append(zero)
        coeffs = np.append(coeffs, -beta)
    if p == 2:
        sq_m, sq_c = _squared_terms(monomials, coeffs)
        return math.sqrt(max(poly_integral_box((sq_m, sq_c), space), 0.0))
    from scipy import integrate

    def integrand(*xs):
        return abs(_eval_many(monomials, coeffs, np.array([xs]))[0]) ** p

    ranges = [(lo, hi) for _, lo, hi in space.params]
    value, abserr = integrate.nquad(integrand, ranges,
                                    opts={"epsabs": 1e-8, "epsrel": 1e-8})
    if abserr > 1e-6 * max(1.0, abs(value)):
        raise QuadratureFailure(f"estimated error {abserr} too large for {value}")
    return value ** (1.0 / p)


# -- rigorous polynomial maxima ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class MaxBound:
    """Rigorous upper bound for the maximum over the box, with the best
    point actually found; `loose` marks an early stop at the node cap."""

    upper: float
    best_point: tuple[float, ...]
    best_value: float
    loose: bool = False


def _poly_interval(monomials, coeffs, cells: list[Interval]) -> Interval:
    total = Interval(0.0, 0.0)
    for alpha, coeff in zip(monomials, coeffs):
        term = Interval(1.0, 1.0)
        for cell, a in zip(cells, alpha):
            if a:
                term = term * cell.pow(a)
        total = total + term.scale(float(coeff))
    return total


def _linear_max(monomials, coeffs, space: ParamSpace) -> tuple[float, np.ndarray]:
    """Exact corner maximum of an (at most) degree-one polynomial."""
    point = space.lows.copy()
    value = 0.0
    for alpha, coeff in zip(monomials, coeffs):
        deg = sum(alpha)
        if deg == 0:
            value += float(coeff)
        else:
            i = next(j for j, a in enumerate(alpha) if a)
            point[i] = space.highs[i] if coeff > 0 else space.lows[i]
    value += sum(float(c) * point[next(j for j, a in enumerate(al) if a)]
                 for al, c in zip(monomials, coeffs) if sum(al) == 1)
    return value, point


def poly_max_upper_bound(poly, space: ParamSpace, tol: float = 1e-6,
                         max_nodes: int = 200_000) -> MaxBound:
    """Interval branch-and-bound upper bound on max over the box.

    Splits the widest dimension, prunes boxes whose enclosure cannot beat
    the incumbent, and stops once the gap is below `tol` (or returns the
    current rigorous bound flagged loose at the node cap).  Degree <= 1 is
    resolved exactly at a corner.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    monomials, coeffs = _as_terms(poly)
    degree = max((sum(a) for a in monomials), default=0)
    if degree <= 1:
        value, point = _linear_max(monomials, coeffs, space)
        return MaxBound(value, tuple(point), value, loose=False)

    def midpoint(cells):
        return np.array([(c.lo + c.hi) / 2 for c in cells])

    root = [Interval(lo, hi) for _, lo, hi in space.params]
    best_point = midpoint(root)
    incumbent = float(_eval_many(monomials, coeffs, best_point[None, :])[0])
    ids = itertools.count()
    heap = [(-_poly_interval(monomials, coeffs, root).hi, next(ids), root)]
    pops = 0
    while heap:
        neg_ub, _, cells = heapq.heappop(heap)
        ub = -neg_ub
        if ub <= incumbent + tol:
            return MaxBound(max(ub, incumbent), tuple(best_point), incumbent, loose=False)
        pops += 1
        if pops > max_nodes:
            return MaxBound(ub, tuple(best_point), incumbent, loose=True)
        widths = [c.width for c in cells]
        split = int(np.argmax(widths))
        mid = (cells[split].lo + cells[split].hi) / 2
        for half in (Interval(cells[split].lo, mid), Interval(mid, cells[split].hi)):
            child = list(cells)
            child[split] = half
            center = midpoint(child)
            value = float(_eval_many(monomials, coeffs, center[None, :])[0])
            if value > incumbent:
                incumbent = value
                best_point = center
            child_ub = _poly_interval(monomials, coeffs, child).hi
            if child_ub > incumbent:
                heapq.heappush(heap, (-child_ub, next(ids), child))
    return MaxBound(incumbent, tuple(best_point), incumbent, loose=False)


# -- super-level-set probability ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbabilityEstimate:
    value: float
    half_width: float
    exact: bool

    def __float__(self):
        return self.value


def _clip_halfplane(points: list[tuple[float, float]], g) -> list[tuple[float, float]]:
    """Sutherland-Hodgman step keeping g(x, y) >= 0."""
    out = []
    for i, cur in enumerate(points):
        prev = points[i - 1]
        g_cur, g_prev = g(*cur), g(*prev)
        if g_cur >= 0:
            if g_prev < 0:
                t = g_prev / (g_prev - g_cur)
                out.append((prev[0] + t * (cur[0] - prev[0]),
                            prev[1] + t * (cur[1] - prev[1])))
            out.append(cur)
        elif g_prev >= 0:
            t = g_prev / (g_prev - g_cur)
            out.append((prev[0] + t * (cur[0] - prev[0]),
                        prev[1] + t * (cur[1] - prev[1])))
    return out


def _polygon_area(points: list[tuple[float, float]]) -> float:
    area = 0.0
    for i, (x1, y1) in enumerate(points):
        x2, y2 = points[(i + 1) % len(points)]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


def superlevel_probability(poly, space: ParamSpace, threshold: float,
                           seed: int = DEFAULT_SEED, n_mc: int = 1_000_000) -> ProbabilityEstimate:
    """Uniform measure of { x : poly(x) > threshold }.

    Exact for degree <= 1 in one or two dimensions (interval fraction /
    polygon clipping); otherwise seeded Monte Carlo with a reported 99%
    confidence half-width.
    """
    monomials, coeffs = _as_terms(poly)
    degree = max((sum(a) for a in monomials), default=0)
    if degree == 0:
        value = float(coeffs.sum()) if len(coeffs) else 0.0
        return ProbabilityEstimate(1.0 if value > threshold else 0.0, 0.0, exact=True)
    if degree == 1 and space.dim == 1:
        c0 = sum(float(c) for a, c in zip(monomials, coeffs) if sum(a) == 0)
        c1 = sum(float(c) for a, c in zip(monomials, coeffs) if sum(a) == 1)
        lo, hi = float(space.lows[0]), float(space.highs[0])
        if c1 == 0.0:
            return ProbabilityEstimate(1.0 if c0 > threshold else 0.0, 0.0, exact=True)
        boundary = (threshold - c0) / c1
        if c1 > 0:
            covered = max(0.0, hi - max(lo, boundary))
        else:
            covered = max(0.0, min(hi, boundary) - lo)
        return ProbabilityEstimate(min(covered / (hi - lo), 1.0), 0.0, exact=True)
    if degree == 1 and space.dim == 2:
        c0 = c1 = c2 = 0.0
        for alpha, coeff in zip(monomials, coeffs):
            if alpha == (0, 0):
                c0 += float(coeff)
            elif alpha == (1, 0):
                c1 += float(coeff)
            elif alpha == (0, 1):
                c2 += float(coeff)
        rect = [(space.lows[0], space.lows[1]), (space.highs[0], space.lows[1]),
                (space.highs[0], space.highs[1]), (space.lows[0], space.highs[1])]
        clipped = _clip_halfplane(rect, lambda x, y: c0 + c1 * x + c2 * y - threshold)
        area = _polygon_area(clipped) if len(clipped) >= 3 else 0.0
        return ProbabilityEstimate(area / box_volume(space), 0.0, exact=True)
    u = uniform_block(seed, n_mc, space.dim)
    points = space.lows + u * (space.highs - space.lows)
    hits = float(np.mean(_eval_many(monomials, coeffs, points) > threshold))
    half_width = Z_99 * math.sqrt(max(hits * (1.0 - hits), 1e-12) / n_mc)
    return ProbabilityEstimate(hits, half_width, exact=False)


# -- the four checks ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SafetyVerdict:
    verdict: str
    lambda_star: float
    zeta: float
    eps: float
    eta: float
    seed: int
    samples: int
    witness_point: tuple[float, ...] | None = None
    witness_value: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "lambda_star": float(self.lambda_star),
            "zeta": self.zeta,
            "eps": self.eps,
            "eta": self.eta,
            "seed": self.seed,
            "samples": self.samples,
            "witness_point": [float(v) for v in self.witness_point] if self.witness_point else None,
            "witness_value": None if self.witness_value is None else float(self.witness_value),
        }


def safe_region_check(oracle, space: ParamSpace, zeta: float, eps: float, eta: float,
                      seed: int = DEFAULT_SEED) -> SafetyVerdict:
    """Degree-zero scenario check: the sampled maximum either certifies the
    whole box (below zeta) or exhibits an unsafe witness point."""
    if zeta < 0:
        raise ValueError("safety level must be nonnegative")
    l = sample_count(eps, eta, 1)
    points = draw_samples(space, l, seed)
    samples = evaluate_samples(oracle, points, space, seed=seed)
    best = int(np.argmax(samples.values))
    lam_star = float(samples.values[best])
    if lam_star < zeta:
        return SafetyVerdict(SAFE, lam_star, zeta, eps, eta, seed, l)
    return SafetyVerdict(UNSAFE_WITNESS, lam_star, zeta, eps, eta, seed, l,
                         witness_point=tuple(points[best]), witness_value=lam_star)


@dataclass(frozen=True, eq=False)
class LinearSafetyResult:
    kind: str
    fit_max_plus_margin: float
    zeta: float
    probability: float | None = None
    half_width: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "fit_max_plus_margin": float(self.fit_max_plus_margin),
            "zeta": self.zeta,
            "probability": None if self.probability is None else float(self.probability),
            "half_width": float(self.half_width),
        }


def linear_safety_check(fit: PacPolynomial, space: ParamSpace, zeta: float,
                        seed: int = DEFAULT_SEED) -> LinearSafetyResult:
    """Degree-one certificate: safe when max(fit) + margin stays below zeta;
    potentially unsafe when the super-level measure of fit - margin above
    zeta provably exceeds the error rate; inconclusive otherwise."""
    if fit.template.degree != 1:
        raise ValueError("linear safety check needs a degree-1 fit")
    value, _ = _linear_max(fit.template.monomials, fit.coeffs, space)
    upper = value + fit.lam
    if upper < zeta:
        return LinearSafetyResult(CERTIFIED_SAFE, upper, zeta)
    sp = superlevel_probability(fit, space, zeta + fit.lam, seed=seed)
    if sp.value - sp.half_width > fit.eps:
        return LinearSafetyResult(POTENTIAL_UNSAFE, upper, zeta,
                                  probability=sp.value, half_width=sp.half_width)
    return LinearSafetyResult(INCONCLUSIVE, upper, zeta,
                              probability=sp.value, half_width=sp.half_width)


@dataclass(frozen=True, eq=False)
class CexResult:
    found: bool
    point: tuple[float, ...] | None
    value: float | None
    iterations: int
    refined: PacPolynomial | None = None

    def to_json_dict(self) -> dict:
        return {
            "found": self.found,
            "point": [float(v) for v in self.point] if self.point else None,
            "value": None if self.value is None else float(self.value),
            "iterations": self.iterations,
            "refined": self.refined.to_json_dict() if self.refined else None,
        }


def counterexample_search(oracle, fit: PacPolynomial, space: ParamSpace, zeta: float,
                          max_iters: int = 10, seed: int | None = None) -> CexResult:
    """Probe the corner maximizing the linear fit; a spurious candidate is
    appended to the sample set and the fit re-solved from scratch."""
    if fit.template.degree != 1:
        raise ValueError("counterexample search needs a degree-1 fit")
    current = fit
    samples: SampleSet | None = None
    for iteration in range(1, max_iters + 1):
        _, candidate = _linear_max(current.template.monomials, current.coeffs, space)
        value = float(oracle(candidate))
        if value > zeta:
            return CexResult(True, tuple(candidate), value, iteration)
        if samples is None:
            base_seed = fit.seed if fit.seed is not None else (seed if seed is not None else DEFAULT_SEED)
            points = draw_samples(space, fit.sample_count, base_seed)
            samples = evaluate_samples(oracle, points, space, seed=base_seed)
        samples = samples.extended(candidate, value)
        current = fit_pac(samples, fit.template, fit.eps, fit.eta)
    return CexResult(False, None, None, max_iters, refined=current)


@dataclass(frozen=True, eq=False)
class NearBetaVerdict:
    holds: bool
    ub: float
    beta: float
    zeta: float
    p_norm: float
    M: float
    eps: float
    eta: float

    def to_json_dict(self) -> dict:
        return {
            "holds": self.holds,
            "ub": float(self.ub),
            "beta": self.beta,
            "zeta": self.zeta,
            "p_norm": self.p_norm,
            "M": self.M,
            "eps": self.eps,
            "eta": self.eta,
        }


def near_beta_check(fit: PacPolynomial, space: ParamSpace, beta: float, zeta: float,
                    p_norm: float = 2, M: float = 1.0) -> NearBetaVerdict:
    """Certificate that the approximated function stays near beta in L_p:
    combines the margin, the fit's own distance from beta, and the mass the
    guarantee leaves uncovered (bounded through M)."""
    if p_norm < 1:
        raise BadNorm(f"p={p_norm} must be >= 1")
    vol = box_volume(space)
    norm = poly_lp_norm(fit, space, beta=beta, p=p_norm)
    inner = fit.lam * ((1.0 - fit.eps) * vol) ** (1.0 / p_norm) + norm
    tail = fit.eps * vol * max(abs(M - beta) ** p_norm, abs(beta) ** p_norm)
    ub = (inner ** p_norm + tail) ** (1.0 / p_norm)
    return NearBetaVerdict(bool(ub < zeta), ub, beta, zeta, p_norm, M, fit.eps, fit.eta)


@dataclass(frozen=True, eq=False)
class RewardBoundVerdict:
    holds: bool
    lower_bound: float
    rho: float
    max_ub: float
    max_loose: bool

    def to_json_dict(self) -> dict:
        return {
            "holds": self.holds,
            "lower_bound": float(self.lower_bound),
            "rho": self.rho,
            "max_ub": float(self.max_ub),
            "max_loose": self.max_loose,
        }


def reward_expectation_bound(fit: PacPolynomial, space: ParamSpace, rho: float,
                             tol: float = 1e-6) -> RewardBoundVerdict:
    """Lower bound on the expectation of the approximated reward function:
    mean of (fit - margin) under the uniform measure, minus the error mass
    bounded through a rigorous over-approximation of the maximum (an
    over-approximation only shrinks the bound, so it stays sound)."""
    if rho < 0:
        raise ValueError("reward level must be nonnegative")
    shifted = fit.shifted(-fit.lam)
    mean = poly_integral_box(shifted, space, normalize=True)
    mb = poly_max_upper_bound(shifted, space, tol=tol)
    lower = mean - fit.eps * box_volume(space) * mb.upper
    return RewardBoundVerdict(bool(lower > rho), lower, rho, mb.upper, mb.loose)


# -- Taylor comparison -------------------------------------------------------------------

def _center_point(space: ParamSpace, center: str) -> list[Fraction]:
    if center == "origin":
        return [Fraction(lo) for _, lo, _ in space.params]
    if center == "barycenter":
        return [(Fraction(lo) + Fraction(hi)) / 2 for _, lo, hi in space.params]
    raise ValueError(f"center must be 'origin' or 'barycenter', not {center!r}")


def taylor_polynomial(f: RatFun, space: ParamSpace, degree: int, center: str = "origin") -> MPoly:
    """Multivariate Taylor polynomial of the given total degree, expanded
    back into ordinary monomials with exact coefficients.

    `origin` expands at the box's lower corner (the origin of box-local
    coordinates); `barycenter` at the box midpoint.
    """
    point = _center_point(space, center)
    n = space.dim
    if f.den.eval_exact(point) == 0:
        raise CenterSingular(f"denominator vanishes at the {center} {point}")
    eps_cells = [Interval(float(p) - 1e-6 * (hi - lo), float(p) + 1e-6 * (hi - lo))
                 for p, (_, lo, hi) in zip(point, space.params)]
    den_m, den_c = _as_terms(MPoly(n, f.den.terms))
    if _poly_interval(den_m, den_c, eps_cells).contains_zero():
        raise CenterSingular(f"denominator not bounded away from zero near the {center}")
    derivs: dict[tuple[int, ...], RatFun] = {(0,) * n: f}
    alphas = []
    for total in range(degree + 1):
        level = [a for a in _alphas_of_degree(n, total)]
        alphas.extend(sorted(level))
    result = MPoly.zero(n)
    for alpha in alphas:
        if alpha not in derivs:
            i = next(j for j, a in enumerate(alpha) if a)
            parent = list(alpha)
            parent[i] -= 1
            derivs[alpha] = derivs[tuple(parent)].diff(i)
        coeff = derivs[alpha].eval_exact(point)
        for a in alpha:
            coeff /= math.factorial(a)
        if coeff == 0:
            continue
        term = MPoly.constant(n, coeff)
        for i, a in enumerate(alpha):
            if a:
                shifted = MPoly.variable(n, i) - MPoly.constant(n, point[i])
                term = term * shifted.pow(a)
        result = result + term
    return result


def _alphas_of_degree(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _alphas_of_degree(n - 1, total - head):
            yield (head,) + rest


@dataclass(frozen=True, eq=False)
class TaylorReport:
    poly: MPoly
    center: tuple[float, ...]
    dist_taylor: float
    dist_fit: float | None
    seed: int
    n_points: int


def taylor_compare(f: RatFun, space: ParamSpace, degree: int, center: str = "origin",
                   fit: PacPolynomial | None = None, seed: int = DEFAULT_SEED,
                   n_points: int = 100_000) -> TaylorReport:
    """Taylor polynomial plus Monte Carlo L2 distances over the box (the
    reference function is rational, so exact integration does not apply)."""
    taylor = taylor_polynomial(f, space, degree, center)
    point = [float(p) for p in _center_point(space, center)]
    u = uniform_block(seed, n_points, space.dim)
    X = space.lows + u * (space.highs - space.lows)
    f_vals = _ratfun_eval_many(f, X)
    t_m, t_c = _as_terms(taylor)
    vol = box_volume(space)
    dist_taylor = math.sqrt(max(float(np.mean((f_vals - _eval_many(t_m, t_c, X)) ** 2)), 0.0) * vol)
    dist_fit = None
    if fit is not None:
        dist_fit = math.sqrt(max(float(np.mean((f_vals - fit.evaluate(X)) ** 2)), 0.0) * vol)
    return TaylorReport(taylor, tuple(point), dist_taylor, dist_fit, seed, n_points)
