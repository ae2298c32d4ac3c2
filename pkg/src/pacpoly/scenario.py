"""Scenario-approach machinery: sample bounds, seeded sampling, minimax fits.

The fitted artifact is a polynomial with a margin: the optimal L-infinity
residual over the sampled points of the linear program

    min lambda  s.t.  -lambda <= f(x_i) - c . mono(x_i) <= lambda,  lambda >= 0.

With the sample count prescribed by ``sample_count`` the margin holds off
the training set with probability at least 1 - eps, at confidence 1 - eta.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BadStatParam, LpFailure, OracleFailure, TooFewSamples
from .rng import Xoshiro256StarStar
from .simplex import OPTIMAL, solve_lp
from .space import ParamSpace

DEFAULT_SEED = 0xC0FFEE
RESIDUAL_SLACK = 1e-7


def sample_count(eps: float, eta: float, m: int) -> int:
    """Samples required for m decision variables at error rate eps and
    significance eta: ceil((2/eps) * (ln(1/eta) + m))."""
    if not 0.0 < eps <= 1.0:
        raise BadStatParam(f"error rate eps={eps} outside (0, 1]")
    if not 0.0 < eta <= 1.0:
        raise BadStatParam(f"significance eta={eta} outside (0, 1]")
    if m < 1:
        raise BadStatParam(f"decision dimension m={m} must be >= 1")
    return math.ceil((2.0 / eps) * (math.log(1.0 / eta) + m))


def draw_samples(space: ParamSpace, l: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """l i.i.d. uniform in-box points from one sequential stream.

    Point i consumes stream positions i*n .. i*n + n - 1, so shorter draws
    with the same seed are prefixes of longer ones.
    """
    if l < 1:
        raise ValueError("sample count must be at least 1")
    gen = Xoshiro256StarStar(seed)
    u = gen.doubles(l * space.dim).reshape(l, space.dim)
    return space.lows + u * (space.highs - space.lows)


@dataclass(frozen=True, eq=False)
class PolyTemplate:
    """All monomials of total degree <= d in n variables, in graded order."""

    n: int
    degree: int
    monomials: tuple[tuple[int, ...], ...]

    @staticmethod
    def for_dimension(n: int, degree: int) -> "PolyTemplate":
        if n < 1 or degree < 0:
            raise ValueError(f"bad template shape n={n}, degree={degree}")
        alphas = []

        def fill(prefix, remaining, slots):
            if slots == 1:
                alphas.append(tuple(prefix) + (remaining,))
                return
            for a in range(remaining + 1):
                fill(prefix + [a], remaining - a, slots - 1)

        collected = []
        for total in range(degree + 1):
            alphas.clear()
            fill([], total, n)
            collected.extend(sorted(alphas))
        template = PolyTemplate(n, degree, tuple(collected))
        assert len(template.monomials) == math.comb(n + degree, n)
        return template

    @property
    def size(self) -> int:
        return len(self.monomials)

    def design_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        A = np.asarray(self.monomials, dtype=float)
        return np.prod(X[:, None, :] ** A[None, :, :], axis=2)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Seeded in-box points with their oracle values."""

    space: ParamSpace
    points: np.ndarray
    values: np.ndarray
    seed: int | None
    oracle_id: str = ""

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values differ in length")
        for x in self.points:
            if not self.space.contains(x):
                raise ValueError(f"sample {x.tolist()} outside the box")

    def __len__(self):
        return len(self.values)

    def extended(self, point, value) -> "SampleSet":
        return SampleSet(self.space,
                         np.vstack([self.points, np.asarray(point, dtype=float)]),
                         np.append(self.values, float(value)),
                         self.seed, self.oracle_id)


def evaluate_samples(oracle, points, space: ParamSpace, seed: int | None = None,
                     oracle_id: str = "", threads: int | None = None) -> SampleSet:
    """Apply the oracle to every point; results keep input order regardless
    of evaluation concurrency."""
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def call(item):
        i, x = item
        try:
            return float(oracle(x))
        except Exception as exc:
            raise OracleFailure(i, exc) from exc

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.array(list(pool.map(call, enumerate(points))))
    else:
        values = np.array([call(item) for item in enumerate(points)])
    return SampleSet(space, points, values, seed, oracle_id)


@dataclass(frozen=True, eq=False)
class PacPolynomial:
    """A fitted polynomial with its margin and statistical tags."""

    template: PolyTemplate
    params: tuple[str, ...]
    coeffs: np.ndarray
    lam: float
    eps: float
    eta: float
    sample_count: int
    seed: int | None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"negative margin {self.lam}")
        if len(self.coeffs) != self.template.size:
            raise ValueError("coefficient count does not match the template")

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        return self.template.design_matrix(X) @ self.coeffs

    def __call__(self, point) -> float:
        return float(self.evaluate(np.atleast_2d(point))[0])

    def shifted(self, delta: float) -> "PacPolynomial":
        """Same polynomial with `delta` added to the constant coefficient."""
        coeffs = self.coeffs.copy()
        coeffs[0] += delta
        return PacPolynomial(self.template, self.params, coeffs, self.lam,
                             self.eps, self.eta, self.sample_count, self.seed)

    def to_json_dict(self) -> dict:
        return {
            "degree": self.template.degree,
            "params": list(self.params),
            "monomials": [list(a) for a in self.template.monomials],
            "coeffs": [float(c) for c in self.coeffs],
            "lambda": float(self.lam),
            "eps": self.eps,
            "eta": self.eta,
            "samples": self.sample_count,
            "seed": self.seed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    @staticmethod
    def from_json_dict(data: dict) -> "PacPolynomial":
        params = tuple(data["params"])
        template = PolyTemplate(len(params), int(data["degree"]),
                                tuple(tuple(a) for a in data["monomials"]))
        return PacPolynomial(template, params, np.asarray(data["coeffs"], dtype=float),
                             float(data["lambda"]), float(data["eps"]), float(data["eta"]),
                             int(data["samples"]), data.get("seed"))

    @staticmethod
    def from_json(text: str) -> "PacPolynomial":
        return PacPolynomial.from_json_dict(json.loads(text))


def poly_eval(p, point) -> float:
    """Monomial-basis evaluation; accepts a PacPolynomial or (template, coeffs)."""
    if isinstance(p, PacPolynomial):
        return p(point)
    template, coeffs = p
    return float(template.design_matrix(np.atleast_2d(point)) @ np.asarray(coeffs, dtype=float))


def solve_minimax(points: np.ndarray, values: np.ndarray,
                  template: PolyTemplate) -> tuple[np.ndarray, float]:
    """Chebyshev fit of the samples: coefficients and the optimal margin.

    The margin variable is shifted by max|f| so the initial slack basis is
    feasible and phase one of the simplex is a no-op.
    """
    phi = template.design_matrix(points)
    l, m = phi.shape
    shift = float(np.max(np.abs(values))) if l else 0.0
    # Columns: c (m free), t with lambda = t + shift.
    A_ub = np.zeros((2 * l + 1, m + 1))
    b_ub = np.zeros(2 * l + 1)
    A_ub[:l, :m] = phi
    A_ub[:l, m] = -1.0
    b_ub[:l] = values + shift
    A_ub[l:2 * l, :m] = -phi
    A_ub[l:2 * l, m] = -1.0
    b_ub[l:2 * l] = shift - values
    A_ub[2 * l, m] = -1.0
    b_ub[2 * l] = shift
    c_obj = np.zeros(m + 1)
    c_obj[m] = 1.0
    sol = solve_lp(c_obj, A_ub, b_ub, bounds=[(None, None)] * (m + 1))
    if sol.status != OPTIMAL:
        raise LpFailure(f"minimax fit LP ended with status {sol.status}")
    coeffs = sol.x[:m]
    lam = max(sol.x[m] + shift, 0.0)
    residual = float(np.max(np.abs(values - phi @ coeffs))) if l else 0.0
    if residual > lam + RESIDUAL_SLACK:
        raise LpFailure(f"margin {lam} violated by training residual {residual}")
    return coeffs, lam


def fit_pac(samples: SampleSet, template: PolyTemplate, eps: float, eta: float,
            allow_undersampled: bool = False) -> PacPolynomial:
    """Fit the template to a sample set and attach the statistical tags.

    Requires at least sample_count(eps, eta, template.size + 1) samples; the
    override exists for experiments and drops the statistical guarantee.
    """
    needed = sample_count(eps, eta, template.size + 1)
    if len(samples) < needed and not allow_undersampled:
        raise TooFewSamples(
            f"{len(samples)} samples, but eps={eps}, eta={eta}, "
            f"{template.size} coefficients need at least {needed}")
    coeffs, lam = solve_minimax(samples.points, samples.values, template)
    return PacPolynomial(template, samples.space.names, coeffs, lam, eps, eta,
                         len(samples), samples.seed)


def approximate(oracle, space: ParamSpace, degree: int, eps: float, eta: float,
                seed: int = DEFAULT_SEED, oracle_id: str = "",
                threads: int | None = None, n_samples: int | None = None) -> PacPolynomial:
    """Draw the prescribed samples, evaluate the oracle, fit the template."""
    template = PolyTemplate.for_dimension(space.dim, degree)
    l = n_samples if n_samples is not None else sample_count(eps, eta, template.size + 1)
    points = draw_samples(space, l, seed)
    samples = evaluate_samples(oracle, points, space, seed=seed,
                               oracle_id=oracle_id, threads=threads)
    return fit_pac(samples, template, eps, eta,
                   allow_undersampled=n_samples is not None)
