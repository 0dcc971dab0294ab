"""Sparse multivariate polynomial arithmetic.

A polynomial in d variables maps exponent vectors (length-d tuples of
non-negative ints) to float coefficients; zero coefficients are never
stored.  Term order everywhere is graded lexicographic (total degree
ascending, then tuple order on the exponents), which pins down
serialization and the ordering of downstream equation systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import DimensionError, ParseError, UsageError
from .funcapprox import UniPoly

Exponents = tuple[int, ...]

# Coefficients this small after add/mul are cancellation dust; dropping
# them keeps results canonical.
DROP_TOLERANCE = 1e-15


def grlex_key(e: Exponents) -> tuple[int, Exponents]:
    return (sum(e), e)


def monomial_label(e: Exponents) -> str:
    """Human-readable monomial, '1' for the constant."""
    parts = []
    for j, k in enumerate(e):
        if k == 1:
            parts.append(f"x{j + 1}")
        elif k > 1:
            parts.append(f"x{j + 1}^{k}")
    return "*".join(parts) if parts else "1"


class MultiPoly:
    """Sparse polynomial over a fixed number of variables.

    Instances are treated as immutable; operations return new objects.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponents, float] | None = None):
        if nvars < 1:
            raise DimensionError("nvars must be at least 1")
        clean: dict[Exponents, float] = {}
        for exps, coeff in (terms or {}).items():
            key = tuple(int(e) for e in exps)
            if len(key) != nvars:
                raise DimensionError(f"exponent vector {key} has length {len(key)}, expected {nvars}")
            if any(e < 0 for e in key):
                raise UsageError(f"negative exponent in {key}")
            c = float(coeff)
            if c != 0.0:
                clean[key] = c
        self.nvars = nvars
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: float) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise DimensionError(f"variable index {index} out of range for {nvars} variables")
        e = tuple(1 if j == index else 0 for j in range(nvars))
        return cls(nvars, {e: 1.0})

    def degree(self) -> int:
        """Total degree; the zero polynomial reports 0."""
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def items_grlex(self) -> Iterator[tuple[Exponents, float]]:
        for e in sorted(self.terms, key=grlex_key):
            yield e, self.terms[e]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        return poly_add(self, other)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return poly_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            return poly_mul(self, other)
        s = float(other)
        scaled = {e: c * s for e, c in self.terms.items()}
        return MultiPoly(self.nvars, {e: c for e, c in scaled.items() if abs(c) >= DROP_TOLERANCE})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {dict(self.items_grlex())})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.items_grlex():
            mono = monomial_label(e)
            bits.append(f"{c:g}" if mono == "1" else f"{c:g}*{mono}")
        return " + ".join(bits)


def _check_same_vars(p: MultiPoly, q: MultiPoly) -> None:
    if p.nvars != q.nvars:
        raise DimensionError(f"variable counts differ: {p.nvars} vs {q.nvars}")


def poly_add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Coefficient-wise sum."""
    _check_same_vars(p, q)
    out = dict(p.terms)
    for e, c in q.terms.items():
        s = out.get(e, 0.0) + c
        if abs(s) < DROP_TOLERANCE:
            out.pop(e, None)
        else:
            out[e] = s
    return MultiPoly(p.nvars, out)


def poly_mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Distributive product."""
    _check_same_vars(p, q)
    out: dict[Exponents, float] = {}
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0.0) + c1 * c2
    return MultiPoly(p.nvars, {e: c for e, c in out.items() if abs(c) >= DROP_TOLERANCE})


def poly_pow(p: MultiPoly, k: int) -> MultiPoly:
    """p**k for integer k >= 0, by square and multiply."""
    if k < 0:
        raise UsageError("exponent must be non-negative")
    result = MultiPoly.constant(p.nvars, 1.0)
    base = p
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


@dataclass(frozen=True)
class AffineForm:
    """constant + sum_j linear[j] * x_j."""

    constant: float
    linear: tuple[float, ...]

    def __post_init__(self):
        if len(self.linear) < 1:
            raise DimensionError("an affine form needs at least one variable")
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "linear", tuple(float(v) for v in self.linear))

    @property
    def nvars(self) -> int:
        return len(self.linear)

    def as_poly(self) -> MultiPoly:
        d = self.nvars
        terms: dict[Exponents, float] = {(0,) * d: self.constant}
        for j, w in enumerate(self.linear):
            terms[tuple(1 if i == j else 0 for i in range(d))] = w
        return MultiPoly(d, terms)

    def value(self, x: Iterable[float]) -> float:
        xs = [float(v) for v in x]
        if len(xs) != self.nvars:
            raise DimensionError(f"point has length {len(xs)}, expected {self.nvars}")
        return self.constant + sum(w * v for w, v in zip(self.linear, xs))


def affine_power(a: AffineForm, k: int) -> MultiPoly:
    """(constant + sum w_j x_j)**k expanded into monomials."""
    return poly_pow(a.as_poly(), k)


def apply_univariate_to_affine(phi: UniPoly, a: AffineForm) -> MultiPoly:
    """sum_i phi.coeffs[i] * affine_power(a, i)."""
    base = a.as_poly()
    power = MultiPoly.constant(a.nvars, 1.0)
    total = MultiPoly.zero(a.nvars)
    for i, c in enumerate(phi.coeffs):
        if i:
            power = poly_mul(power, base)
        if c:
            total = poly_add(total, power * c)
    return total


def apply_univariate(phi: UniPoly, p: MultiPoly) -> MultiPoly:
    """phi composed with an arbitrary polynomial argument (Horner)."""
    acc = MultiPoly.constant(p.nvars, phi.coeffs[-1])
    for c in reversed(phi.coeffs[:-1]):
        acc = poly_mul(acc, p)
        if c:
            acc = poly_add(acc, MultiPoly.constant(p.nvars, c))
    return acc


def poly_eval(p: MultiPoly, x: Iterable[float]) -> float:
    """Evaluate at a point; integer powers by repeated multiplication."""
    xs = [float(v) for v in x]
    if len(xs) != p.nvars:
        raise DimensionError(f"point has length {len(xs)}, expected {p.nvars}")
    total = 0.0
    for e, c in p.terms.items():
        term = c
        for v, k in zip(xs, e):
            for _ in range(k):
                term *= v
        total += term
    return total


def truncate_degree(p: MultiPoly, max_degree: int) -> MultiPoly:
    """Drop every monomial of total degree above max_degree."""
    if max_degree < 0:
        raise UsageError("max_degree must be non-negative")
    return MultiPoly(p.nvars, {e: c for e, c in p.terms.items() if sum(e) <= max_degree})


def coefficient(p: MultiPoly, e: Iterable[int]) -> float:
    """Coefficient of one monomial, 0.0 when absent."""
    key = tuple(int(k) for k in e)
    if len(key) != p.nvars:
        raise DimensionError(f"exponent vector has length {len(key)}, expected {p.nvars}")
    return p.terms.get(key, 0.0)


def poly_to_text(p: MultiPoly) -> str:
    """Text form: header 'poly nvars=<d>', then one '<coeff> <e1> ... <ed>'
    line per term in graded-lex order, coefficients at 17 significant digits."""
    lines = [f"poly nvars={p.nvars}"]
    for e, c in p.items_grlex():
        lines.append(" ".join([format(c, ".17g")] + [str(k) for k in e]))
    return "\n".join(lines) + "\n"


def poly_from_text(text: str) -> MultiPoly:
    """Inverse of poly_to_text."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ParseError("empty polynomial text")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "poly" or not head[1].startswith("nvars="):
        raise ParseError(f"line 1: expected 'poly nvars=<d>', got {lines[0]!r}")
    try:
        nvars = int(head[1][len("nvars="):])
    except ValueError:
        raise ParseError(f"line 1: bad variable count in {lines[0]!r}") from None
    terms: dict[Exponents, float] = {}
    for ln_no, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != nvars + 1:
            raise ParseError(f"line {ln_no}: expected {nvars + 1} fields, got {len(fields)}")
        try:
            c = float(fields[0])
            e = tuple(int(v) for v in fields[1:])
        except ValueError:
            raise ParseError(f"line {ln_no}: non-numeric field") from None
        if any(k < 0 for k in e):
            raise ParseError(f"line {ln_no}: negative exponent")
        if e in terms:
            raise ParseError(f"line {ln_no}: duplicate monomial {e}")
        terms[e] = c
    return MultiPoly(nvars, terms)
