"""
End-to-end runs of the three diagonal examples at n = 16.
"""

import json

import numpy as np
import pytest

from spherebranch.services import read_csv, run_example


def _run(tmp_path_factory, name):
    out = tmp_path_factory.mktemp(name)
    run_example(name, 16, out)
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    return out, report["results"]


@pytest.fixture(scope="module")
def k1_run(tmp_path_factory):
    return _run(tmp_path_factory, "k1")


@pytest.fixture(scope="module")
def k2_run(tmp_path_factory):
    return _run(tmp_path_factory, "k2")


@pytest.fixture(scope="module")
def k3_run(tmp_path_factory):
    return _run(tmp_path_factory, "k3")


def _kinds(results):
    return [c["kind"] for c in results["map"]]


# =============================================================================
# Triple eigenvalue at zero
# =============================================================================

def test_k3_spectrum_and_certificate(k3_run):
    _, results = k3_run
    first = results["spectrum"][0]
    assert abs(first["value"]) <= 1e-9
    assert first["geometric_mult"] == 3
    assert first["eigensphere_dim"] == 2
    (cert,) = results["certificates"]
    assert cert["h2_odd"] and cert["h3_holds"] and cert["h1_compact"]


def test_k3_degree(k3_run):
    _, results = k3_run
    degree = results["degree"]
    assert degree["value"] in (-2, 2)
    assert degree["method"] == "epsilon-perturbation"
    assert results["conjecture"]["disagreements"] == 0


def test_k3_map(k3_run):
    out, results = k3_run
    assert _kinds(results) == ["closed_curve", "line", "line", "line"]
    fit = results["map"][0]["conic_fit"]
    np.testing.assert_allclose(fit["center"], [0.0, 2.0], atol=1e-4)
    np.testing.assert_allclose(fit["half_axes"], [1.0 / np.sqrt(3.0), 2.0], atol=1e-4)
    assert fit["residual"] <= 1e-8
    np.testing.assert_allclose([c["level"] for c in results["map"][1:]], [5.0, 6.0, 7.0], atol=1e-8)
    rows = read_csv(out / "component_0.csv")
    assert len(rows) == results["map"][0]["samples"]


def test_k3_branches(k3_run):
    out, results = k3_run
    ellipse, line = results["verdicts"]
    assert ellipse["verdict"] == "TrivialReturn"
    assert ellipse["lambda_second"] == pytest.approx(4.0, abs=1e-6)
    assert abs(abs(ellipse["x_second"][3]) - 1.0) <= 1e-6
    assert line["verdict"] == "Unbounded"
    rows = read_csv(out / "branch_0_0.csv")
    for row in rows:
        s, lam = float(row["s"]), float(row["lambda"])
        assert abs(3.0 * s ** 2 + (lam - 2.0) ** 2 / 4.0 - 1.0) <= 1e-7


def test_k3_bifurcation_points(k3_run):
    _, results = k3_run
    points = np.array(results["bifurcations"]["points"])
    assert points.shape == (2, 16)
    np.testing.assert_allclose(np.abs(points[0]), np.eye(16)[2], atol=1e-4)
    np.testing.assert_allclose(points[0], -points[1])


# =============================================================================
# Double eigenvalue at zero
# =============================================================================

def test_k2_certificate_and_degree(k2_run):
    _, results = k2_run
    (cert,) = results["certificates"]
    assert cert["geometric_mult"] == 2
    assert not cert["h2_odd"]
    assert cert["h3_holds"]
    assert results["degree"]["value"] == 0
    assert results["degree"]["eigensets_found"][0]["contribution"] == 0
    assert results["conjecture"]["disagreements"] == 0
    assert "bifurcations" not in results


def test_k2_map(k2_run):
    _, results = k2_run
    assert _kinds(results) == ["isolated_point", "closed_curve"]
    np.testing.assert_allclose(results["map"][0]["point"], [0.0, 0.0], atol=1e-8)
    fit = results["map"][1]["conic_fit"]
    np.testing.assert_allclose(fit["center"], [0.0, 3.5], atol=1e-4)
    np.testing.assert_allclose(fit["half_axes"], [1.0 / np.sqrt(48.0), 0.5], atol=1e-4)
    assert fit["residual"] <= 1e-8


def test_k2_branches(k2_run):
    _, results = k2_run
    circle, upper = results["verdicts"]
    assert circle["verdict"] == "IsolatedCompact"
    assert all(b["termination"]["kind"] == "ClosedLoop" for b in circle["branches"])
    assert upper["verdict"] == "TrivialReturn"
    assert upper["lambda_second"] == pytest.approx(4.0, abs=1e-6)


# =============================================================================
# Simple eigenvalues
# =============================================================================

def test_k1_degree(k1_run):
    _, results = k1_run
    (cert,) = results["certificates"]
    assert cert["simple"]
    assert results["degree"]["value"] in (-2, 2)
    assert results["degree"]["method"] == "computation-formula"
    assert results["conjecture"]["disagreements"] == 0


def test_k1_map_and_branches(k1_run):
    _, results = k1_run
    assert _kinds(results) == ["closed_curve", "closed_curve"]
    fit = results["map"][0]["conic_fit"]
    np.testing.assert_allclose(fit["center"], [0.0, 1.0], atol=1e-4)
    np.testing.assert_allclose(fit["half_axes"], [1.0 / np.sqrt(2.0), 1.0], atol=1e-4)
    assert fit["residual"] <= 1e-8
    lower, upper = results["verdicts"]
    assert lower["verdict"] == "TrivialReturn"
    assert lower["lambda_second"] == pytest.approx(2.0, abs=1e-6)
    assert upper["lambda_second"] == pytest.approx(4.0, abs=1e-6)


def test_checks_and_artifacts(k1_run):
    out, results = k1_run
    assert results["checks"]["linear_consistency"] <= 1e-14
    assert results["checks"]["derivative_error"] < 1e-5
    timings = json.loads((out / "timings.json").read_text(encoding="utf-8"))
    assert {"load", "spectrum", "degree", "map", "trace"} <= set(timings)
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert "timings" not in report
