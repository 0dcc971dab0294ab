"""Polynomial surrogates for activation functions on an interval.

Two routes produce a univariate polynomial standing in for an activation:

  1. trigonometric route: fit a finite sine/cosine series on [-l, l] by
     quadrature, then substitute truncated Maclaurin series for sin and
     cos, leaving an ordinary polynomial;
  2. least-squares route: fit one polynomial of fixed degree on a uniform
     grid, solved through a Legendre basis for conditioning.

The trigonometric route dies of cancellation once the series arguments get
large (the sin/cos power series pass through huge intermediate terms), so
fourier_to_poly refuses term budgets whose intermediates exceed 1e15; use
lsq_poly_fit on wide intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigurationError, NumericError, ParseError, UsageError

# fourier_to_poly refuses substitutions whose intermediate series terms
# exceed this; beyond it double precision has no correct digits left.
COEFF_MAGNITUDE_LIMIT = 1e15


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial; coeffs[i] multiplies x**i.

    Trailing zero coefficients are stripped on construction; the zero
    polynomial is stored as (0.0,).
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        cs = [float(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0.0:
            cs.pop()
        if not cs:
            cs = [0.0]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        # Horner; x may be a scalar or an ndarray
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scaled_argument(self, s: float) -> "UniPoly":
        """p(s*x) as a polynomial in x."""
        return UniPoly(tuple(c * s**k for k, c in enumerate(self.coeffs)))


@dataclass(frozen=True)
class FourierSeries:
    """Finite series a0/2 + sum_n a_n cos(n pi x/l) + b_n sin(n pi x/l) on [-l, l]."""

    half_period: float
    a0: float
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        if not self.half_period > 0:
            raise ConfigurationError("half_period must be positive")
        if len(self.a) != len(self.b):
            raise ConfigurationError("cosine and sine coefficient tuples must have equal length")
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))

    @property
    def n_terms(self) -> int:
        return len(self.a)

    @property
    def constant_term(self) -> float:
        return 0.5 * self.a0


@dataclass(frozen=True)
class SampledFunction:
    """A real scalar function together with the closed interval it lives on."""

    evaluator: Callable[[float], float]
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigurationError("domain must satisfy lo < hi")


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


BUILTIN_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sigmoid": _sigmoid,
    "tanh": math.tanh,
    "relu": lambda x: x if x > 0 else 0.0,
    "square": lambda x: x * x,
}


def builtin(name: str, lo: float, hi: float) -> SampledFunction:
    """One of the built-in activations restricted to [lo, hi]."""
    try:
        fn = BUILTIN_FUNCTIONS[name]
    except KeyError:
        raise UsageError(
            f"unknown function {name!r}; choices: {', '.join(sorted(BUILTIN_FUNCTIONS))}"
        ) from None
    return SampledFunction(fn, lo, hi)


def _samples(f: SampledFunction, xs: np.ndarray) -> np.ndarray:
    ys = np.array([f.evaluator(float(x)) for x in xs], dtype=float)
    bad = np.flatnonzero(~np.isfinite(ys))
    if bad.size:
        raise NumericError(f"function value at x={xs[bad[0]]} is not finite")
    return ys


def fourier_fit(f: SampledFunction, l: float, n_terms: int, panels: int = 2048) -> FourierSeries:
    """Fit a trigonometric series to f on [-l, l] by composite-Simpson quadrature.

    a_n = (1/l) integral_{-l}^{l} f(x) cos(n pi x/l) dx,  n = 0..n_terms
    b_n = (1/l) integral_{-l}^{l} f(x) sin(n pi x/l) dx,  n = 1..n_terms
    """
    if l <= 0:
        raise ConfigurationError("half-period l must be positive")
    if n_terms < 1:
        raise ConfigurationError("n_terms must be at least 1")
    if panels < 2 or panels % 2:
        raise ConfigurationError(f"panel count must be even and positive, got {panels}")
    if f.lo > -l or f.hi < l:
        raise ConfigurationError(f"domain [{f.lo}, {f.hi}] does not contain [-{l}, {l}]")
    xs = np.linspace(-l, l, panels + 1)
    ys = _samples(f, xs)
    a0 = float(simpson(ys, x=xs)) / l
    a, b = [], []
    for n in range(1, n_terms + 1):
        theta = n * np.pi * xs / l
        a.append(float(simpson(ys * np.cos(theta), x=xs)) / l)
        b.append(float(simpson(ys * np.sin(theta), x=xs)) / l)
    return FourierSeries(l, a0, tuple(a), tuple(b))


def fourier_eval(fs: FourierSeries, x: float) -> float:
    """Evaluate the series at one point."""
    theta = math.pi * x / fs.half_period
    total = 0.5 * fs.a0
    for n in range(1, fs.n_terms + 1):
        total += fs.a[n - 1] * math.cos(n * theta) + fs.b[n - 1] * math.sin(n * theta)
    return total


def maclaurin_trig(kind: str, terms: int) -> UniPoly:
    """First `terms` nonzero Maclaurin terms of sin or cos.

    sin: sum_m (-1)^m x^(2m+1)/(2m+1)!, degree 2*terms - 1
    cos: sum_m (-1)^m x^(2m)/(2m)!,     degree 2*terms - 2
    """
    if terms < 1:
        raise ConfigurationError("terms must be at least 1")
    if kind == "sin":
        coeffs = [0.0] * (2 * terms)
        for m in range(terms):
            coeffs[2 * m + 1] = (-1.0) ** m / math.factorial(2 * m + 1)
    elif kind == "cos":
        coeffs = [0.0] * (2 * terms - 1)
        for m in range(terms):
            coeffs[2 * m] = (-1.0) ** m / math.factorial(2 * m)
    else:
        raise UsageError(f"kind must be 'sin' or 'cos', got {kind!r}")
    return UniPoly(tuple(coeffs))


def trig_term_budget(n_harmonics: int, tol: float = 1e-9) -> int:
    """Smallest term count whose Maclaurin remainder bound beats tol.

    The substituted series see arguments up to u = n_harmonics * pi, and
    with K terms the first omitted term is bounded by u^(2K+1)/(2K+1)!.
    """
    if n_harmonics < 1:
        raise ConfigurationError("n_harmonics must be at least 1")
    if not 0 < tol < 1:
        raise ConfigurationError("tol must be in (0, 1)")
    u = math.pi * n_harmonics
    log_tol = math.log(tol)
    k = 1
    while True:
        m = 2 * k + 1
        if m * math.log(u) - math.lgamma(m + 1) < log_tol:
            return k
        k += 1


def _log_max_series_term(u: float, max_power: int) -> float:
    # log of max_k u^k / k! over 0 <= k <= max_power; the max sits near k = u
    if u <= 0:
        return 0.0
    log_u = math.log(u)
    return max(k * log_u - math.lgamma(k + 1) for k in range(max_power + 1))


def fourier_to_poly(fs: FourierSeries, terms: int) -> UniPoly:
    """Substitute Maclaurin series for every sin/cos term of the series.

    Each harmonic n becomes a polynomial in x through u = (n pi / l) x.
    Raises ConfigurationError when the substitution would pass through
    intermediate terms above 1e15 (all significance would cancel away);
    fit with lsq_poly_fit instead in that regime.
    """
    if terms < 1:
        raise ConfigurationError("terms must be at least 1")
    u_max = math.pi * fs.n_terms
    if fs.n_terms and _log_max_series_term(u_max, 2 * terms - 1) > math.log(COEFF_MAGNITUDE_LIMIT):
        raise ConfigurationError(
            f"substituting {terms} series terms at {fs.n_terms} harmonics needs intermediate "
            f"terms above {COEFF_MAGNITUDE_LIMIT:g}; use the least-squares fit for wide intervals"
        )
    sin_p = maclaurin_trig("sin", terms)
    cos_p = maclaurin_trig("cos", terms)
    acc = np.zeros(2 * terms, dtype=float)
    acc[0] = 0.5 * fs.a0
    for n in range(1, fs.n_terms + 1):
        s = n * math.pi / fs.half_period
        ca, cb = fs.a[n - 1], fs.b[n - 1]
        if ca:
            cs = cos_p.scaled_argument(s).coeffs
            acc[: len(cs)] += ca * np.array(cs)
        if cb:
            cs = sin_p.scaled_argument(s).coeffs
            acc[: len(cs)] += cb * np.array(cs)
    return UniPoly(tuple(acc))


def lsq_poly_fit(
    f: SampledFunction,
    interval: tuple[float, float],
    degree: int,
    gridpoints: int = 1001,
) -> UniPoly:
    """Least-squares polynomial fit to f on a uniform grid over `interval`.

    Normal equations are formed in a Legendre basis on the grid mapped to
    [-1, 1], then the solution is expanded back to monomial coefficients
    in the original variable.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ConfigurationError("interval must satisfy lo < hi")
    if degree < 0:
        raise ConfigurationError("degree must be non-negative")
    if gridpoints <= degree:
        raise ConfigurationError(f"need more than {degree} gridpoints for a degree-{degree} fit")
    xs = np.linspace(lo, hi, gridpoints)
    ys = _samples(f, xs)
    ts = (2.0 * xs - (lo + hi)) / (hi - lo)
    V = np.polynomial.legendre.legvander(ts, degree)
    try:
        leg_coeffs = np.linalg.solve(V.T @ V, V.T @ ys)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"normal equations are singular: {exc}") from None
    t_coeffs = np.polynomial.legendre.leg2poly(leg_coeffs)
    # compose with t = alpha*x + beta to get coefficients in x
    alpha = 2.0 / (hi - lo)
    beta = -(lo + hi) / (hi - lo)
    comp = np.array([t_coeffs[-1]])
    for c in t_coeffs[-2::-1]:
        comp = np.polynomial.polynomial.polymul(comp, np.array([beta, alpha]))
        comp[0] += c
    return UniPoly(tuple(comp))


@dataclass(frozen=True)
class ApproxError:
    max_abs: float
    rmse: float


def approx_error(
    f: SampledFunction,
    p: UniPoly,
    interval: tuple[float, float],
    gridpoints: int = 1001,
) -> ApproxError:
    """Max-absolute and root-mean-square deviation of p from f on a uniform grid."""
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ConfigurationError("interval must satisfy lo < hi")
    if gridpoints < 2:
        raise ConfigurationError("need at least 2 gridpoints")
    xs = np.linspace(lo, hi, gridpoints)
    d = p(xs) - _samples(f, xs)
    return ApproxError(float(np.max(np.abs(d))), float(math.sqrt(np.mean(d * d))))


def unipoly_to_text(p: UniPoly) -> str:
    """Serialize as a single 'unipoly: c0 c1 ... cN' line."""
    return "unipoly: " + " ".join(format(c, ".17g") for c in p.coeffs) + "\n"


def unipoly_from_text(text: str) -> UniPoly:
    """Inverse of unipoly_to_text."""
    head, sep, rest = text.strip().partition(":")
    if head.strip() != "unipoly" or not sep:
        raise ParseError("expected a line starting with 'unipoly:'")
    toks = rest.split()
    if not toks:
        raise ParseError("unipoly line carries no coefficients")
    try:
        coeffs = tuple(float(t) for t in toks)
    except ValueError as exc:
        raise ParseError(f"bad coefficient in unipoly line: {exc}") from None
    return UniPoly(coeffs)
