import json

import numpy as np
import pytest

from spherebranch.core import continuation
from spherebranch.core.continuation import (
    CLOSED_LOOP,
    INCONCLUSIVE,
    ISOLATED_COMPACT,
    TRIVIAL_RETURN,
    UNBOUNDED,
    Branch,
    ExtendedSystem,
    SolutionPoint,
    Termination,
    classify_component,
    dedup_antipodal,
    descend_to_trivial,
    detect_bifurcation_points,
    eigensphere_grid,
    find_trivial_solutions,
    initial_tangent,
    reduced_bifurcation_candidates,
    richardson_limit,
    trace_branch,
)
from spherebranch.core.eigenpairs import eigenpair_det
from spherebranch.core.errors import ConstraintViolationError
from spherebranch.core.operators import example_problem
from spherebranch.models import ContinuationSettings
from spherebranch.services.scenarios import branch_record, verdict_record
from tests.conftest import unit


@pytest.fixture(scope="module")
def k3_branch():
    problem = example_problem(3, 16)
    return trace_branch(problem, SolutionPoint(0.0, 0.0, unit(16, 3)), 1)


# =============================================================================
# Trivial solutions
# =============================================================================

def test_trivial_solutions_simple(k1):
    anchors = find_trivial_solutions(k1, (-1.0, 1.0))
    assert len(anchors) == 2
    np.testing.assert_allclose(anchors[0].x, -anchors[1].x)
    assert abs(abs(anchors[0].x[0]) - 1.0) <= 1e-10
    assert all(a.s == 0.0 and abs(a.lam) <= 1e-10 for a in anchors)


def test_trivial_solutions_multiple(k3):
    anchors = find_trivial_solutions(k3, (-1.0, 6.0))
    by_lambda = {}
    for a in anchors:
        by_lambda.setdefault(round(a.lam, 6), []).append(a)
    assert sorted(by_lambda) == [0.0, 4.0, 5.0, 6.0]
    assert len(by_lambda[0.0]) > 2
    for lam in (4.0, 5.0, 6.0):
        assert len(by_lambda[lam]) == 2
    for a in by_lambda[0.0]:
        assert np.linalg.norm(a.x[3:]) <= 1e-10
        assert abs(np.linalg.norm(a.x) - 1.0) <= 1e-12


def test_trivial_solutions_empty_window(k3):
    assert find_trivial_solutions(k3, (1.0, 1.0)) == []
    assert find_trivial_solutions(k3, (1.5, 3.5)) == []


def test_eigensphere_grid_is_deterministic():
    basis = np.eye(3)
    first, second = eigensphere_grid(basis, 4), eigensphere_grid(basis, 4)
    assert len(first) == len(second)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
    for v in first:
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-12


# =============================================================================
# Extended system
# =============================================================================

def test_jacobian_matches_finite_differences(k3):
    system = ExtendedSystem(k3)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(16)
    u = system.pack(0.3, 1.2, x / np.linalg.norm(x))
    J = system.jacobian(u)
    step = 1e-7
    for column in range(u.size):
        e = np.zeros(u.size)
        e[column] = step
        central = (system.residual(u + e) - system.residual(u - e)) / (2 * step)
        np.testing.assert_allclose(J[:, column], central, atol=1e-6)


def test_initial_tangent_prefers_s_direction(k3):
    system = ExtendedSystem(k3)
    t = initial_tangent(system, system.pack(0.0, 0.0, unit(16, 3)))
    assert abs(t[0]) == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-10)
    assert abs(t[1]) <= 1e-10


# =============================================================================
# Branch tracing
# =============================================================================

def test_branch_from_triple_eigenvalue_returns_at_four(k3_branch):
    term = k3_branch.termination
    assert term.kind == TRIVIAL_RETURN
    assert term.lambda_second == pytest.approx(4.0, abs=1e-6)
    assert abs(abs(term.x_second[3]) - 1.0) <= 1e-6


def test_branch_follows_the_ellipse(k3_branch):
    for p in k3_branch.points:
        assert abs(3.0 * p.s ** 2 + (p.lam - 2.0) ** 2 / 4.0 - 1.0) <= 1e-7
        assert abs(np.linalg.norm(p.x) - 1.0) <= 1e-10
        assert p.residual <= 1e-8
    assert max(p.s for p in k3_branch.points) > 0.55


def test_branch_points_lie_on_eigenpair_set(k3, k3_branch):
    det = eigenpair_det(k3)
    for p in k3_branch.points:
        assert abs(det(p.s, p.lam)) <= 1e-8


def test_branch_steps_are_bounded(k3_branch):
    settings = ContinuationSettings()
    for a, b in zip(k3_branch.points, k3_branch.points[1:]):
        assert np.linalg.norm(b.packed() - a.packed()) <= 2.0 * settings.max_step + 1e-12


def test_twin_branch_is_mirrored(k3):
    twin = trace_branch(k3, SolutionPoint(0.0, 0.0, -unit(16, 3)), 1)
    assert twin.termination.kind == TRIVIAL_RETURN
    assert twin.termination.lambda_second == pytest.approx(4.0, abs=1e-6)
    for p in twin.points[:20]:
        assert abs(3.0 * p.s ** 2 + (p.lam - 2.0) ** 2 / 4.0 - 1.0) <= 1e-7


@pytest.mark.parametrize("lam, index", [(5.0, 5), (6.0, 6)])
def test_lines_are_unbounded(k3, lam, index):
    branch = trace_branch(k3, SolutionPoint(0.0, lam, unit(16, index)), 1, bound=10.0)
    assert branch.termination.kind == UNBOUNDED
    assert branch.termination.radius == 10.0
    for p in branch.points:
        assert abs(p.lam - lam) <= 1e-8
        assert abs(abs(p.x[index - 1]) - 1.0) <= 1e-8


def test_circle_closes_on_itself(k2):
    branch = trace_branch(k2, SolutionPoint(0.0, 0.0, unit(16, 1)), 1)
    assert branch.termination.kind == CLOSED_LOOP
    assert branch.termination.on_trivial_set
    assert branch.arclength == pytest.approx(2.0 * np.pi, rel=1e-2)


def test_trace_rejects_bad_anchors(k3):
    with pytest.raises(ConstraintViolationError):
        trace_branch(k3, SolutionPoint(0.0, 1.0, unit(16, 1)), 1)
    with pytest.raises(ConstraintViolationError):
        trace_branch(k3, SolutionPoint(0.0, 0.0, 2.0 * unit(16, 1)), 1)
    with pytest.raises(ConstraintViolationError):
        trace_branch(k3, SolutionPoint(0.0, 5.0, unit(16, 5)), 1, bound=4.0)
    with pytest.raises(ConstraintViolationError):
        trace_branch(k3, SolutionPoint(0.0, 0.0, unit(16, 1)), 0)


# =============================================================================
# Components
# =============================================================================

def test_classify_triple_eigenvalue(k3):
    verdict = classify_component(k3, SolutionPoint(0.0, 0.0, unit(16, 3)), 10.0)
    assert verdict.verdict == TRIVIAL_RETURN
    assert verdict.lambda_second == pytest.approx(4.0, abs=1e-6)
    assert abs(abs(verdict.x_second[3]) - 1.0) <= 1e-6


@pytest.mark.parametrize("lam", [5.0, 6.0])
def test_classify_lines(k3, lam):
    verdict = classify_component(k3, SolutionPoint(0.0, lam, unit(16, int(lam))), 10.0)
    assert verdict.verdict == UNBOUNDED


def test_classify_isolated_circle(k2):
    verdict = classify_component(k2, SolutionPoint(0.0, 0.0, unit(16, 1)), 10.0)
    assert verdict.verdict == ISOLATED_COMPACT
    assert all(b.termination.kind == CLOSED_LOOP for b in verdict.branches)


def test_classify_simple_ellipse(k1):
    verdict = classify_component(k1, SolutionPoint(0.0, 0.0, unit(16, 1)), 10.0)
    assert verdict.verdict == TRIVIAL_RETURN
    assert verdict.lambda_second == pytest.approx(2.0, abs=1e-6)


def test_classify_upper_ellipse(k2):
    verdict = classify_component(k2, SolutionPoint(0.0, 3.0, unit(16, 3)), 10.0)
    assert verdict.verdict == TRIVIAL_RETURN
    assert verdict.lambda_second == pytest.approx(4.0, abs=1e-6)


# =============================================================================
# Bifurcation points
# =============================================================================

def test_reduced_candidates(k3, k2):
    (candidate,) = reduced_bifurcation_candidates(k3, 0.0)
    assert abs(abs(candidate.x[2]) - 1.0) <= 1e-10
    assert reduced_bifurcation_candidates(k2, 0.0) == []


def test_bifurcation_points_triple(k3):
    points = detect_bifurcation_points(k3, 0.0)
    assert len(points) == 2
    np.testing.assert_allclose(points[0], -points[1])
    np.testing.assert_allclose(np.abs(points[0]), unit(16, 3), atol=1e-4)


def test_bifurcation_points_even(k2):
    assert detect_bifurcation_points(k2, 0.0) == []


def test_dedup_antipodal():
    x = unit(5, 3)
    noise = 1e-9 * np.ones(5)
    pairs = dedup_antipodal([x, -x + noise, x - noise])
    assert len(pairs) == 2
    np.testing.assert_allclose(pairs[0], x, atol=1e-8)
    np.testing.assert_allclose(pairs[1], -x, atol=1e-8)


def test_richardson_limit_on_linear_ladder():
    limit = np.array([0.0, 1.0, 0.0])
    drift = np.array([1.0, 0.0, 0.0])
    points = []
    for s in (0.04, 0.02, 0.01):
        x = limit + s * drift
        points.append(SolutionPoint(s, 0.0, x / np.linalg.norm(x)))
    np.testing.assert_allclose(richardson_limit(points), limit, atol=1e-5)


def test_descent_follows_the_ellipse(k3):
    s = 0.02
    lam = 2.0 - 2.0 * np.sqrt(1.0 - 3.0 * s ** 2)
    x = np.zeros(16)
    x[2], x[3] = 1.0, -lam / (3.0 * s)
    start = SolutionPoint(s, lam, x / np.linalg.norm(x))
    ladder = [0.01, 0.005, 0.0025]
    descent = descend_to_trivial(k3, start, ladder)
    assert [p.s for p in descent] == pytest.approx(ladder, abs=1e-12)
    for point in descent:
        assert abs(3.0 * point.s ** 2 + (point.lam - 2.0) ** 2 / 4.0 - 1.0) <= 1e-9
    assert abs(descent[-1].x[2]) > 0.999
    np.testing.assert_allclose(np.abs(richardson_limit([start] + descent)), unit(16, 3), atol=1e-4)


@pytest.mark.parametrize("radius", [6.0, 9.0])
def test_unbounded_branch_stops_at_the_bound(k3, radius):
    settings = ContinuationSettings()
    branch = trace_branch(k3, SolutionPoint(0.0, 5.0, unit(16, 5)), 1, bound=radius)
    assert branch.termination.kind == UNBOUNDED
    assert len(branch.points) <= settings.max_steps + 1
    for p in branch.points[:-1]:
        assert max(abs(p.s), abs(p.lam)) < radius
    last = branch.points[-1]
    assert radius <= max(abs(last.s), abs(last.lam)) <= radius + 2.0 * settings.max_step
    assert radius - 5.0 <= branch.arclength <= radius + 2.0 * settings.max_step


# =============================================================================
# Reports
# =============================================================================

def test_closed_loop_report_is_json_ready(k2):
    branch = trace_branch(k2, SolutionPoint(0.0, 0.0, unit(16, 1)), 1)
    detail = branch.termination.detail()
    assert type(detail["on_trivial_set"]) is bool
    dumped = branch_record(branch).model_dump(mode="json")
    assert json.loads(json.dumps(dumped))["termination"]["detail"]["on_trivial_set"] is True

    verdict = classify_component(k2, SolutionPoint(0.0, 0.0, unit(16, 1)), 10.0)
    dumped = verdict_record(verdict).model_dump(mode="json")
    assert json.loads(json.dumps(dumped))["verdict"] == ISOLATED_COMPACT


def test_loops_off_the_trivial_set_are_not_isolated(k2, monkeypatch):
    def loop_through_s(problem, anchor, direction, settings, tol, bound=None):
        termination = Termination(CLOSED_LOOP, on_trivial_set=False, reason="returned to the anchor eigenset")
        return Branch(anchor, direction, [anchor], termination, 1.0)

    monkeypatch.setattr(continuation, "trace_branch", loop_through_s)
    verdict = classify_component(k2, SolutionPoint(0.0, 0.0, unit(16, 1)), 10.0)
    assert verdict.verdict == INCONCLUSIVE
    assert any("closed loops" in d for d in verdict.diagnostics)
