"""Weight synthesis by equation solving.

Instead of gradient training, pick an architecture, write down what its
expanded output polynomials must equal, and solve the resulting nonlinear
system for the weights:

  * coefficient matching: one residual per output monomial, expanded
    coefficient minus target coefficient;
  * data matching: one residual per example, forward output minus target.

Systems are solved by a damped Gauss-Newton (Levenberg-Marquardt)
iteration with forward-difference Jacobians.  Underdetermined systems are
fine; the damped normal matrix stays positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConfigurationError, DimensionError, NumericError, UsageError
from .funcapprox import UniPoly
from .multipoly import (
    Exponents,
    MultiPoly,
    coefficient,
    grlex_key,
    monomial_label,
    poly_mul,
    truncate_degree,
)
from .network import (
    Dataset,
    LayerSpec,
    NetworkSpec,
    PolyActivation,
    expand_network,
    expansion_degree,
    forward,
)

LAMBDA_MIN = 1e-12  # keep the damped normal matrix numerically PD
LAMBDA_MAX = 1e12   # past this the step is effectively zero; give up
STEP_EPS = 1e-14    # step-norm termination


@dataclass(frozen=True)
class Ones:
    """Start from the all-ones weight vector."""


@dataclass(frozen=True)
class GivenVector:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class RandomRestarts:
    """Seeded uniform(-scale, scale) starting points, tried in draw order."""

    count: int = 16
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ConfigurationError("restart count must be at least 1")
        if self.scale <= 0:
            raise ConfigurationError("restart scale must be positive")


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 500
    tol_residual: float = 1e-10  # on the residual infinity norm
    initial: Ones | GivenVector | RandomRestarts = Ones()
    damping: float = 1e-3        # initial Levenberg-Marquardt lambda
    fd_step: float = 1e-7        # relative forward-difference step
    fallback: RandomRestarts = RandomRestarts()  # tried after `initial` fails

    def __post_init__(self):
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be at least 1")
        if self.tol_residual <= 0 or self.damping <= 0 or self.fd_step <= 0:
            raise ConfigurationError("tolerances, damping and fd_step must be positive")


@dataclass(frozen=True)
class SolveReport:
    converged: bool
    iterations: int
    final_residual_norm: float
    restarts_used: int


@dataclass(frozen=True)
class UnknownLayout:
    """Flat order of the weight slots: layer-major, then row-major, then column."""

    entries: tuple[tuple[int, int, int], ...]  # (layer, row, col)
    shapes: tuple[tuple[int, int], ...]

    @classmethod
    def for_network(cls, net: NetworkSpec) -> "UnknownLayout":
        entries = []
        shapes = []
        for li, layer in enumerate(net.layers):
            r, c = layer.weights.shape
            shapes.append((r, c))
            entries.extend((li, i, j) for i in range(r) for j in range(c))
        return cls(tuple(entries), tuple(shapes))

    @property
    def total_unknowns(self) -> int:
        return len(self.entries)

    def instantiate(self, template: NetworkSpec, w) -> NetworkSpec:
        """Rebuild the template with weights taken from the flat vector."""
        w = np.asarray(w, dtype=float)
        if w.shape != (self.total_unknowns,):
            raise DimensionError(f"weight vector has shape {w.shape}, expected ({self.total_unknowns},)")
        if len(template.layers) != len(self.shapes):
            raise UsageError("template does not match this layout")
        layers = []
        offset = 0
        for layer, (r, c) in zip(template.layers, self.shapes):
            if layer.weights.shape != (r, c):
                raise UsageError("template does not match this layout")
            block = w[offset : offset + r * c].reshape(r, c)
            offset += r * c
            layers.append(LayerSpec(block, layer.activation))
        return NetworkSpec(template.input_dim, tuple(layers))

    def flatten(self, net: NetworkSpec) -> np.ndarray:
        return np.concatenate([layer.weights.ravel() for layer in net.layers])


@dataclass(frozen=True)
class ResidualSystem:
    """Vector residual function of the flat weight vector."""

    layout: UnknownLayout
    residual_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    descriptions: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.descriptions)

    def residuals(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.layout.total_unknowns,):
            raise DimensionError(f"weight vector has shape {w.shape}, expected ({self.layout.total_unknowns},)")
        return np.asarray(self.residual_fn(w), dtype=float)


def class_target_poly(ds: Dataset, label: float) -> MultiPoly:
    """Score polynomial of one class: minus the product, over the class's
    examples, of the squared distance to that example.

    It is 0 exactly at the class's own points and negative elsewhere, so
    the class whose polynomial is largest wins.  The constant input
    feature contributes (1 - 1)^2 = 0 to every distance and is omitted.
    """
    d = ds.X.shape[1]
    matched = [i for i in range(len(ds)) if ds.y[i] == label]
    if not matched:
        raise UsageError(f"no examples with label {label!r}")
    prod = MultiPoly.constant(d, 1.0)
    for i in matched:
        terms: dict[Exponents, float] = {(0,) * d: float(np.dot(ds.X[i], ds.X[i]))}
        for j, c in enumerate(ds.X[i]):
            e1 = tuple(1 if t == j else 0 for t in range(d))
            e2 = tuple(2 if t == j else 0 for t in range(d))
            terms[e1] = -2.0 * float(c)
            terms[e2] = 1.0
        prod = poly_mul(prod, MultiPoly(d, terms))
    return -prod


def _attainable_support(arch: NetworkSpec) -> list[set[Exponents]]:
    # Expansion support with all-ones weights and absolute-valued activation
    # coefficients: every product is then non-negative, so a monomial shows
    # up here iff some weight assignment can produce it.
    layers = []
    for layer in arch.layers:
        act = layer.activation
        if isinstance(act, PolyActivation):
            act = PolyActivation(UniPoly(tuple(abs(c) for c in act.poly.coeffs)))
        layers.append(LayerSpec(np.ones_like(layer.weights), act))
    probe = NetworkSpec(arch.input_dim, tuple(layers))
    return [set(p.terms) for p in expand_network(probe)]


def build_coefficient_system(arch: NetworkSpec, targets: Sequence[MultiPoly]) -> ResidualSystem:
    """One residual per output monomial over the union of the expansion's
    attainable support and the target's support, output-major then
    graded-lex: expanded coefficient minus target coefficient."""
    targets = list(targets)
    if len(targets) != arch.output_dim:
        raise UsageError(f"{len(targets)} targets for {arch.output_dim} outputs")
    for k, t in enumerate(targets):
        if t.nvars != arch.input_dim:
            raise DimensionError(f"target {k} has {t.nvars} variables, architecture has {arch.input_dim}")
    attainable = expansion_degree(arch)
    for k, t in enumerate(targets):
        if t.degree() > attainable:
            raise UsageError(
                f"target {k} has degree {t.degree()} but the architecture expands to degree {attainable}"
            )
    supports = _attainable_support(arch)
    index: list[tuple[int, Exponents]] = []
    descriptions: list[str] = []
    for k, t in enumerate(targets):
        for e in sorted(supports[k] | set(t.terms), key=grlex_key):
            index.append((k, e))
            descriptions.append(f"output {k}: {monomial_label(e)}")
    layout = UnknownLayout.for_network(arch)

    def residual_fn(w: np.ndarray) -> np.ndarray:
        polys = expand_network(layout.instantiate(arch, w))
        return np.array([coefficient(polys[k], e) - coefficient(targets[k], e) for k, e in index])

    return ResidualSystem(layout, residual_fn, tuple(descriptions))


def build_data_system(arch: NetworkSpec, ds: Dataset) -> ResidualSystem:
    """One residual per example row: network output minus observed value."""
    if arch.output_dim != 1:
        raise UsageError(f"data matching needs a single-output architecture, got {arch.output_dim} outputs")
    if ds.X.shape[1] != arch.input_dim:
        raise DimensionError(f"dataset has {ds.X.shape[1]} features, architecture expects {arch.input_dim}")
    layout = UnknownLayout.for_network(arch)
    points = [np.array(row) for row in ds.X]
    observed = np.array(ds.y)

    def residual_fn(w: np.ndarray) -> np.ndarray:
        net = layout.instantiate(arch, w)
        return np.array([forward(net, x)[0] for x in points]) - observed

    return ResidualSystem(layout, residual_fn, tuple(f"row {i}" for i in range(1, len(points) + 1)))


def residual_jacobian(system: ResidualSystem, w, fd_step: float = 1e-7) -> np.ndarray:
    """Forward-difference Jacobian, the same scheme solve_system iterates with.

    Column j uses step fd_step * (1 + |w_j|).
    """
    w = np.asarray(w, dtype=float).copy()
    r0 = system.residuals(w)
    J = np.empty((r0.size, w.size))
    for j in range(w.size):
        old = w[j]
        h = fd_step * (1.0 + abs(old))
        w[j] = old + h
        J[:, j] = (system.residuals(w) - r0) / h
        w[j] = old
    return J


def _random_starts(rr: RandomRestarts, p: int) -> Iterator[np.ndarray]:
    rng = np.random.default_rng(rr.seed)
    for _ in range(rr.count):
        yield rng.uniform(-rr.scale, rr.scale, p)


def _starts(cfg: SolverConfig, p: int) -> Iterator[np.ndarray]:
    init = cfg.initial
    if isinstance(init, RandomRestarts):
        yield from _random_starts(init, p)
        return
    if isinstance(init, GivenVector):
        v = np.asarray(init.values, dtype=float)
        if v.shape != (p,):
            raise DimensionError(f"initial vector has shape {v.shape}, expected ({p},)")
        yield v
    else:
        yield np.ones(p)
    yield from _random_starts(cfg.fallback, p)


def _lm(system: ResidualSystem, w0: np.ndarray, cfg: SolverConfig, trace) -> tuple[np.ndarray, bool, int, float]:
    w = np.asarray(w0, dtype=float).copy()
    r = system.residuals(w)
    if not np.all(np.isfinite(r)):
        raise NumericError("residuals are not finite at the initial point")
    lam = cfg.damping
    norm = float(np.max(np.abs(r)))
    cost = 0.5 * float(r @ r)
    eye = np.eye(w.size)
    iterations = 0
    while iterations < cfg.max_iters and norm > cfg.tol_residual:
        J = residual_jacobian(system, w, cfg.fd_step)
        A = J.T @ J
        g = J.T @ r
        step = None
        while lam <= LAMBDA_MAX:
            try:
                # Cholesky: the damped normal matrix is SPD for lam > 0.
                delta = cho_solve(cho_factor(A + lam * eye), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            r_try = system.residuals(w + delta)
            cost_try = 0.5 * float(r_try @ r_try)
            if np.all(np.isfinite(r_try)) and cost_try < cost:
                step = delta
                w = w + delta
                r = r_try
                cost = cost_try
                lam = max(lam / 10.0, LAMBDA_MIN)
                break
            lam *= 10.0
        if step is None:
            break  # no damping gives a downhill step
        iterations += 1
        norm = float(np.max(np.abs(r)))
        step_norm = float(np.linalg.norm(step))
        if trace is not None:
            print(f"{iterations}, {norm:.9e}, {lam:.3e}, {step_norm:.9e}", file=trace)
        if step_norm < STEP_EPS:
            break
    return w, norm <= cfg.tol_residual, iterations, norm


def solve_system(
    system: ResidualSystem,
    config: SolverConfig | None = None,
    trace=None,
) -> tuple[np.ndarray, SolveReport]:
    """Levenberg-Marquardt on half the squared residual norm.

    Each outer iteration builds a forward-difference Jacobian and solves
    the damped normal equations (J'J + lambda I) delta = -J'r; lambda is
    multiplied by 10 whenever a step is rejected and divided by 10 when
    one is accepted.  Iteration stops on residual infinity-norm at or
    below tol_residual, a step shorter than 1e-14, or max_iters.  Starting
    points come from config.initial, then config.fallback; the first
    converged attempt wins, deterministically for a fixed seed.  When no
    attempt converges the best attempt (lowest residual norm) is returned
    with converged=False.

    Returns (weights, SolveReport).
    """
    cfg = config if config is not None else SolverConfig()
    p = system.layout.total_unknowns
    best: tuple[np.ndarray, bool, int, float] | None = None
    attempts = 0
    for w0 in _starts(cfg, p):
        attempts += 1
        w, converged, iters, norm = _lm(system, w0, cfg, trace)
        if converged:
            return w, SolveReport(True, iters, norm, attempts - 1)
        if best is None or norm < best[3]:
            best = (w, converged, iters, norm)
    w, converged, iters, norm = best
    return w, SolveReport(converged, iters, norm, attempts - 1)


def compress_network(
    teacher: NetworkSpec,
    student_arch: NetworkSpec,
    degree: int,
    config: SolverConfig | None = None,
    trace=None,
) -> tuple[NetworkSpec, SolveReport]:
    """Fit a smaller architecture to the degree-truncated expansion of a
    trained network, by coefficient matching."""
    if teacher.input_dim != student_arch.input_dim:
        raise DimensionError(
            f"teacher has {teacher.input_dim} inputs, student has {student_arch.input_dim}"
        )
    if teacher.output_dim != student_arch.output_dim:
        raise UsageError(
            f"teacher has {teacher.output_dim} outputs, student has {student_arch.output_dim}"
        )
    if degree < 0:
        raise UsageError("degree must be non-negative")
    if expansion_degree(student_arch) < degree:
        raise UsageError(
            f"student expands to degree {expansion_degree(student_arch)}, below the requested {degree}"
        )
    targets = [truncate_degree(p, degree) for p in expand_network(teacher)]
    system = build_coefficient_system(student_arch, targets)
    w, report = solve_system(system, config, trace)
    return system.layout.instantiate(student_arch, w), report
