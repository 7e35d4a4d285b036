"""
Eigenpair set ℰ = {(s, λ): det(L + sN − λC) = 0} for linear N.

The determinant is sampled on an (s, λ) grid, its zero set is extracted by
marching squares, crossings are refined with brentq along grid edges, and
polylines are classified as lines, closed curves, open curves, or isolated
points.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize

from .errors import FitError, ResolutionError, UnsupportedMapError
from .operators import PerturbedProblem
from ..models import EigenpairSettings

logger = logging.getLogger("EigenpairMap")

LINE = "line"
CLOSED_CURVE = "closed_curve"
OPEN_CURVE = "open_curve"
ISOLATED_POINT = "isolated_point"

MIN_FIT_SAMPLES = 20
# Fraction of a λ-spacing by which rows lying on a line are shifted inward
ROW_NUDGE = 1e-3

EdgeKey = Tuple[str, int, int]


@dataclass(frozen=True)
class ConicFit:
    center: Tuple[float, float]
    half_axes: Tuple[float, float]
    residual: float


@dataclass(frozen=True, eq=False)
class EigenpairComponent:
    kind: str
    samples: np.ndarray
    conic_fit: Optional[ConicFit] = None
    level: Optional[float] = None
    point: Optional[Tuple[float, float]] = None


# =============================================================================
# Determinant
# =============================================================================

def _require_linear(problem: PerturbedProblem) -> np.ndarray:
    if not problem.perturbation.is_linear:
        raise UnsupportedMapError("the eigenpair map needs a linear N; trace nonlinear problems by continuation")
    return problem.perturbation.linear_matrix


def reference_log_scale(problem: PerturbedProblem) -> float:
    """Sum of log row norms of [L | N | C]."""
    N = _require_linear(problem)
    rows = np.linalg.norm(np.hstack([problem.pencil.L, N, problem.pencil.C]), axis=1)
    rows[rows == 0.0] = 1.0
    return float(np.sum(np.log(rows)))


def eigenpair_det(problem: PerturbedProblem) -> Callable[[float, float], float]:
    """(s, λ) ↦ det(L + sN − λC), divided by the product of the row norms of [L | N | C]."""
    N = _require_linear(problem)
    L, C = problem.pencil.L, problem.pencil.C
    log_scale = reference_log_scale(problem)

    def _det(s: float, lam: float) -> float:
        sign, logdet = np.linalg.slogdet(L + s * N - lam * C)
        if sign == 0:
            return 0.0
        return float(sign * np.exp(logdet - log_scale))

    return _det


def det_row(problem: PerturbedProblem, s_values: np.ndarray, lam: float) -> np.ndarray:
    """Scaled determinant along one λ-row, batched through slogdet."""
    N = _require_linear(problem)
    base = problem.pencil.L - lam * problem.pencil.C
    stack = base[None, :, :] + np.asarray(s_values, dtype=float)[:, None, None] * N[None, :, :]
    sign, logdet = np.linalg.slogdet(stack)
    return sign * np.exp(logdet - reference_log_scale(problem))


def det_grid(
    problem: PerturbedProblem, s_values: np.ndarray, lam_values: np.ndarray, threads: int = 1
) -> np.ndarray:
    """D[i, j] = scaled det at (s_values[j], lam_values[i])."""
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        rows = list(pool.map(lambda lam: det_row(problem, s_values, lam), lam_values))
    return np.vstack(rows)


# =============================================================================
# Marching squares
# =============================================================================

def _line_rows(D: np.ndarray, settings: EigenpairSettings) -> np.ndarray:
    return np.mean(np.abs(D) <= settings.zero_tol, axis=1) >= settings.line_fraction


def _nudged_rows(
    problem: PerturbedProblem, s_values: np.ndarray, lam_values: np.ndarray, settings: EigenpairSettings, threads: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Grid values with rows on a line shifted inward, and the row λ actually used."""
    D = det_grid(problem, s_values, lam_values, threads)
    lam_rows = lam_values.astype(float).copy()
    spacing = lam_values[1] - lam_values[0]
    last = len(lam_values) - 1
    for i in np.flatnonzero(_line_rows(D, settings)):
        shift = -ROW_NUDGE * spacing if i == last else ROW_NUDGE * spacing
        lam_rows[i] = lam_values[i] + shift
        D[i] = det_row(problem, s_values, lam_rows[i])
        logger.debug("Row λ=%.10g lies on a line, sampled at %.10g", lam_values[i], lam_rows[i])
    return D, lam_rows


def _cell_edges(i: int, j: int) -> List[EdgeKey]:
    """Bottom, right, top, left edges of cell (i, j)."""
    return [("h", i, j), ("v", i, j + 1), ("h", i + 1, j), ("v", i, j)]


def _edge_corners(edge: EdgeKey) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    kind, i, j = edge
    return ((i, j), (i, j + 1)) if kind == "h" else ((i, j), (i + 1, j))


def _contour_graph(positive: np.ndarray) -> Tuple[Dict[EdgeKey, List[EdgeKey]], int]:
    """Adjacency between crossing edges, and the number of saddle cells."""
    rows, cols = positive.shape
    graph: Dict[EdgeKey, List[EdgeKey]] = {}
    saddles = 0
    for i in range(rows - 1):
        for j in range(cols - 1):
            crossing = [
                e for e in _cell_edges(i, j)
                if positive[_edge_corners(e)[0]] != positive[_edge_corners(e)[1]]
            ]
            if len(crossing) == 4:
                saddles += 1
                continue
            if len(crossing) == 2:
                a, b = crossing
                graph.setdefault(a, []).append(b)
                graph.setdefault(b, []).append(a)
    return graph, saddles


def _walk(graph: Dict[EdgeKey, List[EdgeKey]], start: EdgeKey, visited: set) -> Tuple[List[EdgeKey], bool]:
    path = [start]
    visited.add(start)
    previous, current = None, start
    while True:
        following = [e for e in graph[current] if e != previous]
        if not following:
            return path, False
        nxt = following[0]
        if nxt == start:
            return path, True
        if nxt in visited:
            return path, False
        path.append(nxt)
        visited.add(nxt)
        previous, current = current, nxt


def _polylines(graph: Dict[EdgeKey, List[EdgeKey]]) -> List[Tuple[List[EdgeKey], bool]]:
    visited: set = set()
    lines = []
    for node in sorted(graph):
        if node not in visited and len(graph[node]) == 1:
            lines.append(_walk(graph, node, visited))
    for node in sorted(graph):
        if node not in visited:
            lines.append(_walk(graph, node, visited))
    return lines


def _refine_crossing(
    det: Callable[[float, float], float], edge: EdgeKey, s_values: np.ndarray, lam_rows: np.ndarray
) -> Tuple[float, float]:
    kind, i, j = edge
    if kind == "h":
        lam = lam_rows[i]
        f = lambda s: det(s, lam)
        a, b = s_values[j], s_values[j + 1]
    else:
        s = s_values[j]
        f = lambda lam: det(s, lam)
        a, b = lam_rows[i], lam_rows[i + 1]
    fa, fb = f(a), f(b)
    if fa == 0.0:
        root = a
    elif fb == 0.0:
        root = b
    elif np.sign(fa) != np.sign(fb):
        root = brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    else:
        root = a + (b - a) * fa / (fa - fb)
    return (float(root), float(lam)) if kind == "h" else (float(s), float(root))


# =============================================================================
# Isolated points
# =============================================================================

def _isolated_candidates(D: np.ndarray) -> List[Tuple[int, int]]:
    rows, cols = D.shape
    found = []
    magnitude = np.abs(D)
    for i in range(1, rows - 1):
        for j in range(1, cols - 1):
            block = D[i - 1:i + 2, j - 1:j + 2]
            if not (np.all(block >= 0) or np.all(block <= 0)):
                continue
            if magnitude[i, j] <= magnitude[i - 1:i + 2, j - 1:j + 2].min():
                found.append((i, j))
    return found


def _refine_minimum(
    det: Callable[[float, float], float], s0: float, lam0: float, hs: float, hl: float
) -> Tuple[float, float, float]:
    """Nelder-Mead on |D| in grid-cell units around (s0, λ0)."""
    objective = lambda z: abs(det(s0 + z[0] * hs, lam0 + z[1] * hl))
    result = minimize(
        objective,
        np.zeros(2),
        method="Nelder-Mead",
        options={
            "initial_simplex": np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]),
            "xatol": 1e-11,
            "fatol": 1e-30,
            "maxiter": 4000,
        },
    )
    return float(s0 + result.x[0] * hs), float(lam0 + result.x[1] * hl), float(result.fun)


def _confirm_isolated(
    problem: PerturbedProblem, s: float, lam: float, hs: float, hl: float, settings: EigenpairSettings
) -> None:
    for level in range(1, settings.refinements + 1):
        count = 2 * settings.refine_factor ** level + 1
        s_local = np.linspace(s - hs, s + hs, count)
        lam_local = np.linspace(lam - hl, lam + hl, count)
        local = det_grid(problem, s_local, lam_local)
        significant = local[np.abs(local) > settings.zero_tol]
        if significant.size and significant.min() < 0 < significant.max():
            raise ResolutionError(
                f"zero near (s={s:.6g}, λ={lam:.6g}) is not isolated at refinement ×{settings.refine_factor ** level}; "
                "increase the grid density"
            )


# =============================================================================
# Components
# =============================================================================

def _classify(samples: np.ndarray, closed: bool, window, settings: EigenpairSettings) -> EigenpairComponent:
    s_lo, s_hi, l_lo, l_hi = window
    if closed:
        return EigenpairComponent(CLOSED_CURVE, samples)
    lam_spread = np.ptp(samples[:, 1])
    s_extent = np.ptp(samples[:, 0])
    if lam_spread <= 1e-6 * (l_hi - l_lo) and s_extent >= settings.line_fraction * (s_hi - s_lo):
        return EigenpairComponent(LINE, samples, level=float(np.mean(samples[:, 1])))
    return EigenpairComponent(OPEN_CURVE, samples)


def _sort_key(component: EigenpairComponent) -> Tuple[float, float]:
    return float(component.samples[:, 1].min()), float(component.samples[:, 0].min())


def trace_components(
    problem: PerturbedProblem,
    window: Tuple[float, float, float, float],
    grid: Optional[Tuple[int, int]] = None,
    settings: EigenpairSettings = EigenpairSettings(),
    threads: int = 1,
) -> List[EigenpairComponent]:
    """Components of ℰ inside (s_min, s_max, λ_min, λ_max)."""
    det = eigenpair_det(problem)
    s_lo, s_hi, l_lo, l_hi = window
    grid_s, grid_l = grid if grid is not None else (settings.grid_s, settings.grid_lambda)

    for attempt in range(3):
        s_values = np.linspace(s_lo, s_hi, (grid_s - 1) * 2 ** attempt + 1)
        lam_values = np.linspace(l_lo, l_hi, (grid_l - 1) * 2 ** attempt + 1)
        D, lam_rows = _nudged_rows(problem, s_values, lam_values, settings, threads)
        graph, saddles = _contour_graph(D >= 0)
        if saddles == 0:
            break
        logger.info("%d saddle cells on a %dx%d grid, refining", saddles, len(s_values), len(lam_values))
    else:
        raise ResolutionError(
            f"{saddles} grid cells still hold two zero-set branches after two refinements"
        )

    components: List[EigenpairComponent] = []
    for path, closed in _polylines(graph):
        samples = np.array([_refine_crossing(det, e, s_values, lam_rows) for e in path])
        components.append(_classify(samples, closed, window, settings))

    hs = s_values[1] - s_values[0]
    hl = lam_values[1] - lam_values[0]
    for i, j in _isolated_candidates(D):
        s, lam, value = _refine_minimum(det, s_values[j], lam_rows[i], hs, hl)
        if value > settings.zero_tol:
            continue
        # The minimizer must stay in the sign-definite neighbourhood
        if abs(s - s_values[j]) > hs or abs(lam - lam_rows[i]) > hl:
            continue
        if any(c.kind == ISOLATED_POINT and np.hypot(c.point[0] - s, c.point[1] - lam) < 1e-6 for c in components):
            continue
        _confirm_isolated(problem, s, lam, hs, hl, settings)
        components.append(EigenpairComponent(ISOLATED_POINT, np.array([[s, lam]]), point=(s, lam)))

    components.sort(key=_sort_key)
    logger.info(
        "Window %s: %s",
        window,
        ", ".join(
            c.kind + (f"@{c.level:.6g}" if c.level is not None else "") for c in components
        ) or "no eigenpairs",
    )
    return components


def fit_conic(component: EigenpairComponent) -> ConicFit:
    """Axis-aligned ellipse (s−s₀)²/a_s² + (λ−λ₀)²/a_λ² = 1 through the samples."""
    if component.kind != CLOSED_CURVE:
        raise FitError(f"conic fits need a closed curve, got {component.kind}")
    samples = np.asarray(component.samples, dtype=float)
    if len(samples) < MIN_FIT_SAMPLES:
        raise FitError(f"conic fits need at least {MIN_FIT_SAMPLES} samples, got {len(samples)}")

    # Work in centred, unit-spread coordinates
    shift = samples.mean(axis=0)
    spread = samples.std(axis=0)
    if np.any(spread == 0):
        raise FitError("samples are collinear")
    u, v = ((samples - shift) / spread).T

    design = np.column_stack([u ** 2, v ** 2, u, v, np.ones_like(u)])
    _, sigma, Vh = np.linalg.svd(design, full_matrices=False)
    if sigma[-2] <= 1e-10 * sigma[0]:
        raise FitError("conic fit is rank deficient")
    A, B, D, E, F = Vh[-1]
    if A < 0:
        A, B, D, E, F = -A, -B, -D, -E, -F
    if B <= 0:
        raise FitError("samples do not lie on an ellipse")

    u0, v0 = -D / (2 * A), -E / (2 * B)
    G = A * u0 ** 2 + B * v0 ** 2 - F
    if G <= 0:
        raise FitError("fitted conic is not a real ellipse")
    a_u, a_v = np.sqrt(G / A), np.sqrt(G / B)

    center = (float(shift[0] + spread[0] * u0), float(shift[1] + spread[1] * v0))
    half_axes = (float(spread[0] * a_u), float(spread[1] * a_v))
    normalized = ((samples[:, 0] - center[0]) / half_axes[0]) ** 2 + ((samples[:, 1] - center[1]) / half_axes[1]) ** 2
    residual = float(np.abs(normalized - 1.0).max())
    logger.info("Ellipse centre (%.6g, %.6g), half-axes (%.6g, %.6g), residual %.2e", *center, *half_axes, residual)
    return ConicFit(center=center, half_axes=half_axes, residual=residual)
