"""Feedforward networks whose activations are polynomials.

A layer stores its bias as the first weight column, mapping h to
act(W @ [1, h]).  Because every activation is a polynomial, the whole
network is one: expand_network composes the layers in multivariate
polynomial arithmetic and returns an explicit polynomial per output node,
which agrees with forward evaluation up to rounding.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError, StructuralError, UsageError
from .funcapprox import UniPoly
from .multipoly import MultiPoly, apply_univariate, poly_add, poly_pow


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class MonomialPower:
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise StructuralError(f"power activation needs a positive integer exponent, got {self.k!r}")


@dataclass(frozen=True)
class PolyActivation:
    poly: UniPoly


Activation = Identity | MonomialPower | PolyActivation


def activation_unipoly(act: Activation) -> UniPoly:
    """The activation as an explicit univariate polynomial."""
    if isinstance(act, Identity):
        return UniPoly((0.0, 1.0))
    if isinstance(act, MonomialPower):
        return UniPoly((0.0,) * act.k + (1.0,))
    if isinstance(act, PolyActivation):
        return act.poly
    raise UsageError(f"not an activation: {act!r}")


def activation_degree(act: Activation) -> int:
    if isinstance(act, Identity):
        return 1
    if isinstance(act, MonomialPower):
        return act.k
    if isinstance(act, PolyActivation):
        return act.poly.degree
    raise UsageError(f"not an activation: {act!r}")


def apply_activation(act: Activation, values: np.ndarray) -> np.ndarray:
    if isinstance(act, Identity):
        return values
    if isinstance(act, MonomialPower):
        return values**act.k
    if isinstance(act, PolyActivation):
        return act.poly(values)
    raise UsageError(f"not an activation: {act!r}")


@dataclass(frozen=True)
class LayerSpec:
    """Weights of shape (out_nodes, 1 + in_nodes); column 0 is the bias."""

    weights: np.ndarray
    activation: Activation = Identity()

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 2:
            raise StructuralError(f"weights must be 2-D with a bias column, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise StructuralError("weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def out_nodes(self) -> int:
        return self.weights.shape[0]

    @property
    def in_nodes(self) -> int:
        return self.weights.shape[1] - 1


@dataclass(frozen=True)
class NetworkSpec:
    input_dim: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if self.input_dim < 1:
            raise StructuralError("input_dim must be at least 1")
        layers = tuple(self.layers)
        if not layers:
            raise StructuralError("a network needs at least one layer")
        width = self.input_dim
        for i, layer in enumerate(layers):
            if layer.in_nodes != width:
                raise StructuralError(f"layer {i} expects {layer.in_nodes} inputs but receives {width}")
            width = layer.out_nodes
        object.__setattr__(self, "layers", layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_nodes


def forward(net: NetworkSpec, x) -> np.ndarray:
    """Numeric evaluation; returns the final layer's outputs."""
    h = np.asarray(x, dtype=float)
    if h.shape != (net.input_dim,):
        raise DimensionError(f"input has shape {h.shape}, expected ({net.input_dim},)")
    for layer in net.layers:
        h = apply_activation(layer.activation, layer.weights @ np.concatenate(([1.0], h)))
    return h


def expand_network(net: NetworkSpec) -> list[MultiPoly]:
    """Symbolic evaluation: one polynomial in the inputs per output node."""
    d = net.input_dim
    polys = [MultiPoly.variable(d, j) for j in range(d)]
    for layer in net.layers:
        nxt = []
        for row in layer.weights:
            pre = MultiPoly.constant(d, row[0])
            for w, pj in zip(row[1:], polys):
                pre = poly_add(pre, pj * float(w))
            act = layer.activation
            if isinstance(act, Identity):
                nxt.append(pre)
            elif isinstance(act, MonomialPower):
                nxt.append(poly_pow(pre, act.k))
            else:
                nxt.append(apply_univariate(act.poly, pre))
        polys = nxt
    return polys


def expansion_degree(net: NetworkSpec) -> int:
    """Total degree the expansion attains: product of activation degrees."""
    deg = 1
    for layer in net.layers:
        deg *= activation_degree(layer.activation)
    return deg


def classify(net: NetworkSpec, x) -> int:
    """Index of the largest output; ties go to the lowest index."""
    if net.output_dim < 2:
        raise UsageError("classification needs at least 2 outputs")
    return int(np.argmax(forward(net, x)))


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _activation_to_json(act: Activation) -> str:
    if isinstance(act, Identity):
        return '{"kind": "identity"}'
    if isinstance(act, MonomialPower):
        return f'{{"kind": "power", "k": {act.k}}}'
    if isinstance(act, PolyActivation):
        coeffs = ", ".join(_f17(c) for c in act.poly.coeffs)
        return f'{{"kind": "poly", "coeffs": [{coeffs}]}}'
    raise UsageError(f"not an activation: {act!r}")


def network_to_json(net: NetworkSpec) -> str:
    """JSON text with reals at 17 significant digits."""
    lines = ["{", f'  "input_dim": {net.input_dim},', '  "layers": [']
    for i, layer in enumerate(net.layers):
        rows = ", ".join("[" + ", ".join(_f17(v) for v in row) + "]" for row in layer.weights)
        sep = "," if i + 1 < len(net.layers) else ""
        lines.append(
            '    {"weights": [' + rows + '], "activation": ' + _activation_to_json(layer.activation) + "}" + sep
        )
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _activation_from_json(doc, layer_index: int) -> Activation:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError(f"layer {layer_index}: activation must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "identity":
        return Identity()
    if kind == "power":
        k = doc.get("k")
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ParseError(f"layer {layer_index}: power activation needs a positive integer 'k'")
        return MonomialPower(k)
    if kind == "poly":
        coeffs = doc.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs
        ):
            raise ParseError(f"layer {layer_index}: poly activation needs a non-empty numeric 'coeffs' list")
        return PolyActivation(UniPoly(tuple(float(c) for c in coeffs)))
    raise ParseError(f"layer {layer_index}: unknown activation kind {kind!r}")


def network_from_json(text: str) -> NetworkSpec:
    """Inverse of network_to_json, with validation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    input_dim = doc.get("input_dim")
    if not isinstance(input_dim, int) or isinstance(input_dim, bool) or input_dim < 1:
        raise ParseError("'input_dim' must be a positive integer")
    layer_docs = doc.get("layers")
    if not isinstance(layer_docs, list) or not layer_docs:
        raise ParseError("'layers' must be a non-empty list")
    layers = []
    for i, item in enumerate(layer_docs):
        if not isinstance(item, dict):
            raise ParseError(f"layer {i}: must be an object")
        rows = item.get("weights")
        if (
            not isinstance(rows, list)
            or not rows
            or not all(isinstance(r, list) and r for r in rows)
            or len({len(r) for r in rows}) != 1
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for r in rows for v in r)
        ):
            raise ParseError(f"layer {i}: 'weights' must be a rectangular numeric matrix")
        layers.append(LayerSpec(np.array(rows, dtype=float), _activation_from_json(item.get("activation"), i)))
    return NetworkSpec(input_dim, tuple(layers))


def save_network(net: NetworkSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(network_to_json(net))


def load_network(path) -> NetworkSpec:
    with open(path) as fh:
        return network_from_json(fh.read())


@dataclass(frozen=True)
class Dataset:
    """Feature matrix X of shape (n, d) and per-row targets y of shape (n,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DimensionError(f"X must be a non-empty 2-D array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DimensionError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]


def dataset_to_csv(ds: Dataset) -> str:
    d = ds.X.shape[1]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"f{j + 1}" for j in range(d)] + ["y"])
    for row, target in zip(ds.X, ds.y):
        writer.writerow([_f17(v) for v in row] + [_f17(target)])
    return out.getvalue()


def dataset_from_csv(text: str) -> Dataset:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ParseError("empty CSV")
    header = rows[0]
    d = len(header) - 1
    if d < 1 or header != [f"f{j + 1}" for j in range(d)] + ["y"]:
        raise ParseError(f"expected header f1,...,fd,y, got {','.join(header)!r}")
    X, y = [], []
    for ln_no, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise ParseError(f"line {ln_no}: expected {d + 1} fields, got {len(row)}")
        try:
            vals = [float(v) for v in row]
        except ValueError:
            raise ParseError(f"line {ln_no}: non-numeric field") from None
        X.append(vals[:-1])
        y.append(vals[-1])
    if not X:
        raise ParseError("dataset has no example rows")
    return Dataset(np.array(X), np.array(y))


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w") as fh:
        fh.write(dataset_to_csv(ds))


def load_dataset(path) -> Dataset:
    with open(path) as fh:
        return dataset_from_csv(fh.read())
