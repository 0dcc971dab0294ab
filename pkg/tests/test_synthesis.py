"""Weight synthesis: target construction, residual systems, the damped solver."""

import io
import re

import numpy as np
import pytest

from polynet import (
    Dataset,
    DimensionError,
    GivenVector,
    LayerSpec,
    MonomialPower,
    MultiPoly,
    NetworkSpec,
    RandomRestarts,
    SolverConfig,
    UnknownLayout,
    UsageError,
    build_coefficient_system,
    build_data_system,
    class_target_poly,
    coefficient,
    compress_network,
    expand_network,
    forward,
    poly_eval,
    residual_jacobian,
    solve_system,
)
from polynet.experiments import (
    load_reference_network,
    load_table1,
    regression_target,
    two_class_points,
    two_class_targets,
)

# Class polynomials for the 4-example table, derived independently with pencil
# and paper from the product-of-negated-squared-distances construction.
CLASS3_TARGET = {
    (4, 0): -1.0, (3, 0): 0.6, (2, 2): -2.0, (2, 1): 2.6, (2, 0): -0.98,
    (1, 2): 0.6, (1, 1): -0.76, (1, 0): 0.254, (0, 4): -1.0, (0, 3): 2.6,
    (0, 2): -2.58, (0, 1): 1.154, (0, 0): -0.1961,
}
CLASS8_TARGET = {
    (4, 0): -1.0, (3, 0): 1.4, (2, 2): -2.0, (2, 1): 3.4, (2, 0): -2.18,
    (1, 2): 1.4, (1, 1): -2.36, (1, 0): 1.166, (0, 4): -1.0, (0, 3): 3.4,
    (0, 2): -4.58, (0, 1): 2.866, (0, 0): -0.7081,
}

TRACE_LINE = re.compile(
    r"^\d+, \d\.\d{9}e[+-]\d{2,3}, \d\.\d{3}e[+-]\d{2,3}, \d\.\d{9}e[+-]\d{2,3}$"
)


def square_arch(hidden, outputs):
    first = LayerSpec(np.zeros((hidden, 3)), MonomialPower(2))
    second = LayerSpec(np.zeros((outputs, hidden + 1)))
    return NetworkSpec(2, (first, second))


def degree4_monomials():
    return [(i, j) for i in range(5) for j in range(5) if i + j <= 4]


def reference_vector(exp_id):
    net = load_reference_network(exp_id)
    return UnknownLayout.for_network(net).flatten(net)


def test_class_target_polys_match_hand_derivation():
    table = load_table1()
    class3 = class_target_poly(table, 3.0)
    class8 = class_target_poly(table, 8.0)
    for e in degree4_monomials():
        assert coefficient(class3, e) == pytest.approx(CLASS3_TARGET.get(e, 0.0), abs=1e-12)
        assert coefficient(class8, e) == pytest.approx(CLASS8_TARGET.get(e, 0.0), abs=1e-12)
    # cross terms x1^3 x2 and x1 x2^3 cancel structurally
    assert coefficient(class3, (3, 1)) == 0.0
    assert coefficient(class3, (1, 3)) == 0.0


def test_class_target_value_is_a_product_of_negated_squares():
    table = load_table1()
    class8 = class_target_poly(table, 8.0)
    # squared distances from (0.1, 0.6) to the two label-8 rows
    d1 = 0.2 ** 2 + 0.2 ** 2
    d2 = 0.3 ** 2 + 0.3 ** 2
    assert poly_eval(class8, (0.1, 0.6)) == pytest.approx(-d1 * d2, abs=1e-12)
    assert poly_eval(class8, (0.1, 0.6)) == pytest.approx(-0.0144, abs=1e-12)


def test_class_target_trivial_cases():
    ds = Dataset(np.array([[0.0]]), np.array([5.0]))
    p = class_target_poly(ds, 5.0)
    assert dict(p.terms) == {(2,): -1.0}
    with pytest.raises(UsageError, match="no examples with label"):
        class_target_poly(ds, 7.0)


def test_unknown_layout_round_trip():
    rng = np.random.default_rng(31)
    for hidden, outputs, expected in ((4, 2, 22), (4, 1, 17)):
        arch = square_arch(hidden, outputs)
        layout = UnknownLayout.for_network(arch)
        assert layout.total_unknowns == expected
        assert len(layout.entries) == expected
        w = rng.uniform(-1.0, 1.0, expected)
        net = layout.instantiate(arch, w)
        assert np.array_equal(layout.flatten(net), w)
        for a, b in zip(net.layers, arch.layers):
            assert type(a.activation) is type(b.activation)


def test_coefficient_system_shapes_and_order():
    two_out = build_coefficient_system(square_arch(4, 2), list(two_class_targets()))
    assert two_out.arity == 12
    assert two_out.layout.total_unknowns == 22

    one_out = build_coefficient_system(square_arch(4, 1), [regression_target()])
    assert one_out.arity == 6
    assert one_out.descriptions == (
        "output 0: 1", "output 0: x2", "output 0: x1",
        "output 0: x2^2", "output 0: x1*x2", "output 0: x1^2",
    )
    # second output block follows the first
    assert two_out.descriptions[6].startswith("output 1:")


def test_coefficient_system_validation():
    arch = square_arch(4, 1)
    with pytest.raises(UsageError, match="degree 4.*degree 2"):
        build_coefficient_system(arch, [MultiPoly(2, {(4, 0): 1.0})])
    with pytest.raises(UsageError, match="2 targets for 1 outputs"):
        build_coefficient_system(arch, list(two_class_targets()))


def test_published_weights_nearly_solve_the_coefficient_systems():
    two_out = build_coefficient_system(square_arch(4, 2), list(two_class_targets()))
    assert np.max(np.abs(two_out.residuals(reference_vector(1)))) <= 5e-3

    one_out = build_coefficient_system(square_arch(4, 1), [regression_target()])
    assert np.max(np.abs(one_out.residuals(reference_vector(2)))) <= 5e-3


def test_data_system_shapes_and_reference_fit():
    target = regression_target()
    pts = np.array([[0, 0], [0.5, 0], [1, 0], [0, 1], [0.5, 0.5], [1, 1]], dtype=float)
    ys = np.array([poly_eval(target, p) for p in pts])
    system = build_data_system(square_arch(4, 1), Dataset(pts, ys))
    assert system.arity == 6
    assert system.descriptions == tuple(f"row {i}" for i in range(1, 7))
    assert np.max(np.abs(system.residuals(reference_vector(2)))) <= 5e-3


def test_data_system_requires_single_output():
    ds = Dataset(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.0, 5.0]))
    with pytest.raises(UsageError, match="single-output"):
        build_data_system(square_arch(4, 2), ds)


def test_data_system_bias_only_fit():
    arch = NetworkSpec(1, (LayerSpec(np.zeros((1, 2))),))
    system = build_data_system(arch, Dataset(np.array([[0.0]]), np.array([3.0])))
    w, report = solve_system(system, SolverConfig(initial=GivenVector((0.0, 0.0))))
    assert report.converged
    net = system.layout.instantiate(arch, w)
    assert forward(net, [0.0])[0] == pytest.approx(3.0, abs=1e-8)


def test_forward_difference_jacobian_matches_central():
    system = build_coefficient_system(square_arch(4, 1), [regression_target()])
    w = np.ones(17)
    fwd = residual_jacobian(system, w)
    assert fwd.shape == (6, 17)
    h = 1e-7
    central = np.zeros_like(fwd)
    for j in range(17):
        step = h * (1.0 + abs(w[j]))
        wp, wm = w.copy(), w.copy()
        wp[j] += step
        wm[j] -= step
        central[:, j] = (system.residuals(wp) - system.residuals(wm)) / (2.0 * step)
    assert np.max(np.abs(fwd - central)) <= 1e-4


def test_solver_stops_immediately_at_a_root():
    arch = square_arch(4, 1)
    layout = UnknownLayout.for_network(arch)
    w_star = np.arange(1, 18, dtype=float) / 10.0
    target = expand_network(layout.instantiate(arch, w_star))[0]
    system = build_coefficient_system(arch, [target])
    w, report = solve_system(system, SolverConfig(initial=GivenVector(tuple(w_star))))
    assert report.converged
    assert report.iterations == 0
    assert report.restarts_used == 0
    assert np.array_equal(w, w_star)


def test_solver_converges_on_the_regression_system():
    system = build_coefficient_system(square_arch(4, 1), [regression_target()])
    w, report = solve_system(system)
    assert report.converged
    assert report.restarts_used == 0
    assert report.iterations <= 500
    assert report.final_residual_norm <= 1e-10
    # certificate: the returned vector really satisfies the system
    assert np.max(np.abs(system.residuals(w))) <= 1e-9
    # and the synthesized network reproduces the target function
    arch = square_arch(4, 1)
    net = system.layout.instantiate(arch, w)
    target = regression_target()
    for x in np.array([[1, 1], [2, 1], [-0.5, 0.7], [0, 0]], dtype=float):
        want = poly_eval(target, x)
        assert forward(net, x)[0] == pytest.approx(want, abs=1e-6 * (1 + abs(want)))


def test_solver_converges_on_the_two_class_system():
    system = build_coefficient_system(square_arch(4, 2), list(two_class_targets()))
    w, report = solve_system(system)
    assert report.converged
    assert report.iterations <= 500
    assert report.restarts_used <= 16
    assert report.final_residual_norm <= 1e-10
    assert np.max(np.abs(system.residuals(w))) <= 1e-9


def test_solver_is_deterministic():
    system = build_coefficient_system(square_arch(4, 2), list(two_class_targets()))
    w1, r1 = solve_system(system)
    w2, r2 = solve_system(system)
    assert w1.tobytes() == w2.tobytes()
    assert r1 == r2


def test_solver_reports_failure_honestly():
    system = build_coefficient_system(square_arch(4, 1), [regression_target()])
    cfg = SolverConfig(max_iters=1, fallback=RandomRestarts(count=2, seed=0))
    w, report = solve_system(system, cfg)
    assert not report.converged
    assert report.restarts_used == 2
    assert w.shape == (17,)
    assert np.isfinite(report.final_residual_norm)


def test_random_initial_schedule():
    system = build_coefficient_system(square_arch(4, 1), [regression_target()])
    cfg = SolverConfig(initial=RandomRestarts(count=4, scale=0.5, seed=7))
    w, report = solve_system(system, cfg)
    assert report.converged
    assert 0 <= report.restarts_used < 4


def test_initial_vector_length_is_checked():
    system = build_coefficient_system(square_arch(4, 1), [regression_target()])
    with pytest.raises(DimensionError, match="expected"):
        solve_system(system, SolverConfig(initial=GivenVector((1.0, 2.0))))


def test_trace_stream_format():
    system = build_coefficient_system(square_arch(4, 1), [regression_target()])
    buf = io.StringIO()
    w, report = solve_system(system, trace=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == report.iterations
    for line in lines:
        assert TRACE_LINE.match(line), line
    assert lines[0].startswith("1, ")


def duplicated_teacher():
    """8-node network built by duplicating the 4-node regression solution."""
    base = load_reference_network(2)
    a, b = base.layers[0].weights, base.layers[1].weights
    a8 = np.vstack([a, a])
    b8 = np.concatenate([[b[0, 0]], 0.5 * b[0, 1:], 0.5 * b[0, 1:]])[None, :]
    return NetworkSpec(2, (LayerSpec(a8, MonomialPower(2)), LayerSpec(b8)))


def test_duplicated_teacher_matches_its_base():
    teacher = duplicated_teacher()
    base = load_reference_network(2)
    for x in np.array([[0.3, -0.7], [1, 1], [-1, 0.5]]):
        assert forward(teacher, x)[0] == pytest.approx(forward(base, x)[0], abs=1e-12)


def test_compress_identity_is_a_fixed_point():
    teacher = load_reference_network(2)
    w = UnknownLayout.for_network(teacher).flatten(teacher)
    student, report = compress_network(
        teacher, teacher, 2, SolverConfig(initial=GivenVector(tuple(w)))
    )
    assert report.converged
    assert report.iterations == 0
    assert np.array_equal(UnknownLayout.for_network(student).flatten(student), w)


def test_compress_eight_nodes_to_four():
    teacher = duplicated_teacher()
    student, report = compress_network(teacher, square_arch(4, 1), 2)
    assert report.converged
    assert report.final_residual_norm <= 1e-6
    axis = np.linspace(-1.0, 1.0, 21)
    gap = max(
        abs(forward(student, (x1, x2))[0] - forward(teacher, (x1, x2))[0])
        for x1 in axis for x2 in axis
    )
    assert gap <= 1e-4


def test_compress_rejects_too_shallow_students():
    teacher = load_reference_network(2)
    student = NetworkSpec(2, (LayerSpec(np.zeros((1, 3))),))
    with pytest.raises(UsageError, match="degree 1, below the requested 2"):
        compress_network(teacher, student, 2)


def test_two_class_points_layout():
    points, labels = two_class_points()
    assert points.shape == (40, 2)
    assert labels.shape == (40,)
    assert set(labels.tolist()) == {0, 1}
    # generator 1 lies on x2 = x1, generator 2 on x2 = 1 - x1
    for (x1, x2), lab in zip(points, labels):
        assert x2 == pytest.approx(x1 if lab == 0 else 1.0 - x1)
