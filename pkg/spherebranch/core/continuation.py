"""
Branches of ψ⁺(s, λ, x) = Lx + sN(x) − λCx = 0 on ℝ × ℝ × Sⁿ⁻¹.

Unknowns are packed as u = (s, λ, x) ∈ ℝⁿ⁺². The extended system is

    F(u) = ( Lx + sN̄(x) − λCx , (xᵀx − 1)/2 )

with N̄ the positively homogeneous extension of N, so F: ℝⁿ⁺² → ℝⁿ⁺¹ and
solution curves are followed by pseudo-arclength continuation. A branch
ends when it leaves the box max(|s|, |λ|) < R, crosses s = 0 at another
eigenvalue, closes on its anchor, or the step size collapses.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import ConstraintViolationError, ConvergenceError, TransversalityError
from .linalg import canonical_sign
from .operators import (
    PerturbedProblem,
    homogeneous_extension,
    homogeneous_extension_derivative,
    require_unit,
)
from .spectral import certify, kernel_basis, pencil_eigenvalues
from ..models import ContinuationSettings, Tolerances

logger = logging.getLogger("Continuation")

UNBOUNDED = "Unbounded"
TRIVIAL_RETURN = "TrivialReturn"
CLOSED_LOOP = "ClosedLoop"
STEP_FAILURE = "StepFailure"
ISOLATED_COMPACT = "IsolatedCompact"
INCONCLUSIVE = "Inconclusive"

# Projections below this are treated as zero when picking directions
DIRECTION_FLOOR = 1e-8


# =============================================================================
# Types
# =============================================================================

@dataclass(frozen=True, eq=False)
class SolutionPoint:
    s: float
    lam: float
    x: np.ndarray
    residual: float = 0.0

    def packed(self) -> np.ndarray:
        return np.concatenate([[self.s, self.lam], self.x])


@dataclass(frozen=True, eq=False)
class Termination:
    kind: str
    radius: Optional[float] = None
    lambda_second: Optional[float] = None
    x_second: Optional[np.ndarray] = None
    on_trivial_set: bool = False
    reason: str = ""

    def detail(self) -> dict:
        if self.kind == UNBOUNDED:
            return {"radius": float(self.radius)}
        if self.kind == TRIVIAL_RETURN:
            return {"lambda_second": float(self.lambda_second), "x_second": [float(v) for v in self.x_second]}
        if self.kind == CLOSED_LOOP:
            return {"on_trivial_set": bool(self.on_trivial_set), "reason": self.reason}
        return {"reason": self.reason}


@dataclass(eq=False)
class Branch:
    anchor: SolutionPoint
    direction: int
    points: List[SolutionPoint]
    termination: Termination
    arclength: float = 0.0


@dataclass(eq=False)
class ComponentVerdict:
    verdict: str
    lambda_second: Optional[float] = None
    x_second: Optional[np.ndarray] = None
    branches: List[Branch] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class BifurcationCandidate:
    """Kernel direction x whose reduced perturbation is parallel to it; slope = dλ/ds."""

    x: np.ndarray
    slope: float


# =============================================================================
# Extended system
# =============================================================================

class ExtendedSystem:
    """F(u) and DF(u) for u = (s, λ, x)."""

    def __init__(self, problem: PerturbedProblem):
        self.problem = problem
        self.L = problem.pencil.L
        self.C = problem.pencil.C
        self.n = problem.dim
        self._extension = homogeneous_extension(problem.perturbation)
        linear = problem.perturbation.linear_matrix
        self._norm_L = float(np.linalg.norm(self.L, 2))
        self._norm_C = float(np.linalg.norm(self.C, 2))
        self._norm_N = float(np.linalg.norm(linear, 2)) if linear is not None else 1.0

    @staticmethod
    def pack(s: float, lam: float, x: np.ndarray) -> np.ndarray:
        return np.concatenate([[s, lam], x])

    def psi_plus(self, u: np.ndarray) -> np.ndarray:
        s, lam, x = u[0], u[1], u[2:]
        value = self.L @ x - lam * (self.C @ x)
        if s != 0.0:
            value = value + s * self._extension(x)
        return value

    def residual(self, u: np.ndarray) -> np.ndarray:
        x = u[2:]
        return np.concatenate([self.psi_plus(u), [(x @ x - 1.0) / 2.0]])

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        s, lam, x = u[0], u[1], u[2:]
        n = self.n
        J = np.zeros((n + 1, n + 2))
        J[:n, 0] = self._extension(x)
        J[:n, 1] = -(self.C @ x)
        J[:n, 2:] = self.L - lam * self.C
        if s != 0.0:
            J[:n, 2:] += s * homogeneous_extension_derivative(self.problem.perturbation, x)
        J[n, 2:] = x
        return J

    def scale(self, u: np.ndarray) -> float:
        return max(1.0, self._norm_L + abs(u[1]) * self._norm_C + abs(u[0]) * self._norm_N)

    def point(self, u: np.ndarray) -> SolutionPoint:
        x = u[2:] / np.linalg.norm(u[2:])
        normalized = self.pack(u[0], u[1], x)
        return SolutionPoint(
            s=float(u[0]),
            lam=float(u[1]),
            x=x,
            residual=float(np.linalg.norm(self.psi_plus(normalized))),
        )


def _newton(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    u0: np.ndarray,
    scale: float,
    settings: ContinuationSettings,
) -> Tuple[np.ndarray, bool]:
    """Least-squares Newton; tolerates rank-deficient Jacobians on solution manifolds."""
    u = u0.copy()
    for _ in range(settings.newton_max_iter):
        r = fun(u)
        if np.linalg.norm(r) <= settings.newton_tol * scale:
            return u, True
        du = np.linalg.lstsq(jac(u), -r, rcond=None)[0]
        u = u + du
        if not np.all(np.isfinite(u)):
            return u0, False
        if np.linalg.norm(du) <= settings.newton_tol * max(1.0, np.linalg.norm(u)):
            break
    return u, bool(np.linalg.norm(fun(u)) <= settings.accept_tol * scale)


def _null_space(J: np.ndarray, rel_tol: float) -> np.ndarray:
    _, sigma, Vh = np.linalg.svd(J)
    rank = int(np.count_nonzero(sigma > rel_tol * sigma[0])) if sigma[0] > 0 else 0
    return Vh[rank:].T


def initial_tangent(system: ExtendedSystem, u: np.ndarray, tol: Tolerances = Tolerances()) -> np.ndarray:
    """
    Null direction of DF(u) closest to the ds-axis.

    When the ds-axis is orthogonal to the null space, the axes λ, x1, x2, …
    are tried in that order.
    """
    null = _null_space(system.jacobian(u), tol.rank_rel)
    projector = null @ null.T
    for axis in range(u.size):
        direction = projector[:, axis]
        norm = np.linalg.norm(direction)
        if norm > DIRECTION_FLOOR:
            return direction / norm
    raise ConvergenceError("extended Jacobian has no null direction")


def ds_projection(system: ExtendedSystem, u: np.ndarray, tol: Tolerances = Tolerances()) -> float:
    """Length of the ds-axis projected on the null space of DF(u)."""
    null = _null_space(system.jacobian(u), tol.rank_rel)
    return float(np.linalg.norm(null[0, :]))


def _follow_tangent(system: ExtendedSystem, u: np.ndarray, previous: np.ndarray, tol: Tolerances) -> Optional[np.ndarray]:
    null = _null_space(system.jacobian(u), tol.rank_rel)
    t = null @ (null.T @ previous)
    norm = np.linalg.norm(t)
    if norm <= DIRECTION_FLOOR:
        return None
    return t / norm


# =============================================================================
# Trivial solutions
# =============================================================================

def eigensphere_grid(basis: np.ndarray, density: int) -> List[np.ndarray]:
    """Points on the great circles through pairs of basis vectors, 2·density per circle."""
    m = basis.shape[1]
    if m == 1:
        return [basis[:, 0].copy(), -basis[:, 0]]
    angles = np.pi * np.arange(2 * density) / density
    points: List[np.ndarray] = []
    for i in range(m):
        for j in range(i + 1, m):
            for theta in angles:
                v = np.cos(theta) * basis[:, i] + np.sin(theta) * basis[:, j]
                v = v / np.linalg.norm(v)
                if not any(np.linalg.norm(v - p) < 1e-12 for p in points):
                    points.append(v)
    return points


def find_trivial_solutions(
    problem: PerturbedProblem,
    window: Tuple[float, float],
    tol: Tolerances = Tolerances(),
    settings: ContinuationSettings = ContinuationSettings(),
) -> List[SolutionPoint]:
    """(0, λ, x) for every eigenvalue λ in the window; grids on multiple eigenspheres."""
    lo, hi = window
    if not lo < hi:
        return []
    pencil = problem.pencil
    anchors = []
    for info in pencil_eigenvalues(pencil, window, tol):
        T = pencil.at(info.value)
        for x in eigensphere_grid(info.kernel_basis, settings.grid_density):
            anchors.append(SolutionPoint(0.0, info.value, x, float(np.linalg.norm(T @ x))))
    logger.info("%d trivial anchors in [%g, %g]", len(anchors), lo, hi)
    return anchors


# =============================================================================
# Branch tracing
# =============================================================================

def _solve_crossing(
    system: ExtendedSystem, guess: np.ndarray, settings: ContinuationSettings
) -> Tuple[np.ndarray, bool]:
    """Solve F(u) = 0 together with s = 0."""
    e_s = np.zeros(guess.size)
    e_s[0] = 1.0
    start = guess.copy()
    start[0] = 0.0
    return _newton(
        lambda u: np.concatenate([system.residual(u), [u[0]]]),
        lambda u: np.vstack([system.jacobian(u), e_s]),
        start,
        system.scale(guess),
        settings,
    )


def _corrector(
    system: ExtendedSystem, u_pred: np.ndarray, t: np.ndarray, settings: ContinuationSettings
) -> Tuple[np.ndarray, bool]:
    """Newton on F = 0 within the hyperplane through u_pred normal to t."""
    return _newton(
        lambda u: np.concatenate([system.residual(u), [t @ (u - u_pred)]]),
        lambda u: np.vstack([system.jacobian(u), t]),
        u_pred,
        system.scale(u_pred),
        settings,
    )


def trace_branch(
    problem: PerturbedProblem,
    anchor: SolutionPoint,
    direction: int = 1,
    settings: ContinuationSettings = ContinuationSettings(),
    tol: Tolerances = Tolerances(),
    bound: Optional[float] = None,
    step: Optional[float] = None,
) -> Branch:
    """Pseudo-arclength predictor-corrector from `anchor`."""
    if direction not in (-1, 1):
        raise ConstraintViolationError(f"direction must be +1 or -1, got {direction}")
    radius = bound if bound is not None else settings.bound
    system = ExtendedSystem(problem)
    x0 = require_unit(anchor.x, tol.unit_norm)
    u_anchor = system.pack(anchor.s, anchor.lam, x0)
    if max(abs(anchor.s), abs(anchor.lam)) >= radius:
        raise ConstraintViolationError(f"anchor lies outside the bound R={radius}")
    if np.linalg.norm(system.psi_plus(u_anchor)) > settings.accept_tol * system.scale(u_anchor):
        raise ConstraintViolationError("anchor is not a solution of the perturbed problem")

    trivial_set_tol = 10.0 * settings.trivial_s_tol
    u = u_anchor
    t = direction * initial_tangent(system, u_anchor, tol)
    h = step if step is not None else settings.initial_step
    points = [system.point(u_anchor)]
    arclength = 0.0
    successes = 0
    left_trivial = abs(anchor.s) > trivial_set_tol
    max_abs_s = abs(anchor.s)

    def finish(termination: Termination) -> Branch:
        logger.info(
            "Branch from (s=%g, λ=%.10g) dir %+d: %s after %d points",
            anchor.s,
            anchor.lam,
            direction,
            termination.kind,
            len(points),
        )
        return Branch(anchor, direction, points, termination, arclength)

    for _ in range(settings.max_steps):
        # Loop closing: the anchor lies within the next step ahead
        offset = u_anchor - u
        distance = np.linalg.norm(offset)
        ahead = t @ offset
        if arclength > 3.0 * distance and distance <= 1.5 * h and ahead > 0:
            closed, ok = _corrector(system, u + ahead * t, t, settings)
            if ok and np.linalg.norm(closed - u_anchor) <= settings.loop_tol:
                points.append(system.point(closed))
                arclength += distance
                return finish(Termination(CLOSED_LOOP, on_trivial_set=bool(max_abs_s <= trivial_set_tol)))

        candidate, ok = _corrector(system, u + h * t, t, settings)
        if ok:
            candidate[2:] /= np.linalg.norm(candidate[2:])
            moved = np.linalg.norm(candidate - u)
            ok = (
                moved <= 2.0 * h
                and np.linalg.norm(system.psi_plus(candidate)) <= settings.accept_tol * system.scale(candidate)
            )
        t_next = _follow_tangent(system, candidate, t, tol) if ok else None
        if t_next is None:
            h *= settings.shrink
            successes = 0
            logger.debug("Corrector failed, step reduced to %.3e", h)
            if h < settings.min_step:
                return finish(Termination(STEP_FAILURE, reason=f"step size fell below {settings.min_step:g}"))
            continue

        previous = u
        u, t = candidate, t_next
        arclength += moved
        points.append(system.point(u))
        max_abs_s = max(max_abs_s, abs(u[0]))

        if max(abs(u[0]), abs(u[1])) >= radius:
            return finish(Termination(UNBOUNDED, radius=radius))

        if left_trivial and (np.sign(u[0]) != np.sign(previous[0]) or abs(u[0]) <= settings.trivial_s_tol):
            termination = _trivial_crossing(system, previous, u, anchor, settings, tol)
            if termination is not None:
                return finish(termination)
        left_trivial = left_trivial or abs(u[0]) > trivial_set_tol

        successes += 1
        if successes >= settings.grow_after:
            h = min(h * settings.grow, settings.max_step)
            successes = 0

    return finish(Termination(STEP_FAILURE, reason=f"no termination within {settings.max_steps} steps"))


def _trivial_crossing(
    system: ExtendedSystem,
    previous: np.ndarray,
    current: np.ndarray,
    anchor: SolutionPoint,
    settings: ContinuationSettings,
    tol: Tolerances,
) -> Optional[Termination]:
    s0, s1 = previous[0], current[0]
    guess = current if s0 == s1 else previous + (s0 / (s0 - s1)) * (current - previous)
    crossing, ok = _solve_crossing(system, guess, settings)
    if not ok:
        logger.debug("Could not resolve the s=0 crossing near λ=%.10g", current[1])
        return None
    lam, x = float(crossing[1]), crossing[2:] / np.linalg.norm(crossing[2:])
    on_sphere = np.linalg.norm(system.L @ x - lam * (system.C @ x)) <= settings.eigensphere_tol * system.scale(crossing)
    if not on_sphere:
        return None
    if abs(lam - anchor.lam) > tol.cluster_radius:
        return Termination(TRIVIAL_RETURN, lambda_second=lam, x_second=x)
    return Termination(CLOSED_LOOP, on_trivial_set=False, reason="returned to the anchor eigenset")


# =============================================================================
# Components
# =============================================================================

def _anchor_set(
    problem: PerturbedProblem,
    anchor: SolutionPoint,
    settings: ContinuationSettings,
    tol: Tolerances,
    diagnostics: List[str],
) -> List[SolutionPoint]:
    anchors = [anchor]
    basis = kernel_basis(problem.pencil, anchor.lam, tol)
    if basis.shape[1] <= 1:
        return anchors

    directions: List[np.ndarray] = []
    try:
        for candidate in reduced_bifurcation_candidates(problem, anchor.lam, tol):
            directions.extend([candidate.x, -candidate.x])
    except TransversalityError as e:
        diagnostics.append(str(e))

    system = ExtendedSystem(problem)
    for x in eigensphere_grid(basis, settings.grid_density):
        if ds_projection(system, system.pack(0.0, anchor.lam, x), tol) > DIRECTION_FLOOR:
            directions.append(x)

    for x in directions:
        if all(np.linalg.norm(x - a.x) > 1e-8 for a in anchors):
            anchors.append(SolutionPoint(0.0, anchor.lam, x, float(np.linalg.norm(problem.pencil.at(anchor.lam) @ x))))
    return anchors


def classify_component(
    problem: PerturbedProblem,
    anchor: SolutionPoint,
    bound: Optional[float] = None,
    settings: ContinuationSettings = ContinuationSettings(),
    tol: Tolerances = Tolerances(),
    threads: int = 1,
) -> ComponentVerdict:
    """Trace both directions from the anchor (and its eigensphere) and aggregate the endings."""
    diagnostics: List[str] = []
    anchors = _anchor_set(problem, anchor, settings, tol, diagnostics)
    jobs = [(a, d) for a in anchors for d in (1, -1)]

    def run(job: Tuple[SolutionPoint, int]) -> Branch:
        a, d = job
        return trace_branch(problem, a, d, settings, tol, bound=bound)

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        branches = list(pool.map(run, jobs))

    kinds = [b.termination.kind for b in branches]
    verdict = ComponentVerdict(INCONCLUSIVE, branches=branches, diagnostics=diagnostics)
    if UNBOUNDED in kinds:
        verdict.verdict = UNBOUNDED
    elif TRIVIAL_RETURN in kinds:
        first = branches[kinds.index(TRIVIAL_RETURN)].termination
        verdict.verdict = TRIVIAL_RETURN
        verdict.lambda_second = first.lambda_second
        verdict.x_second = first.x_second
    elif all(b.termination.kind == CLOSED_LOOP and b.termination.on_trivial_set for b in branches):
        verdict.verdict = ISOLATED_COMPACT
    elif all(kind == CLOSED_LOOP for kind in kinds):
        diagnostics.append("closed loops leave s = 0 before returning to the anchor eigenset")
    else:
        for b in branches:
            if b.termination.kind == STEP_FAILURE:
                last = b.points[-1]
                diagnostics.append(
                    f"direction {b.direction:+d} from λ={b.anchor.lam:.10g}: {b.termination.reason} "
                    f"(last point s={last.s:.6g}, λ={last.lam:.6g})"
                )
    logger.info("Component of (0, %.10g): %s over %d branches", anchor.lam, verdict.verdict, len(branches))
    return verdict


# =============================================================================
# Bifurcation points on multiple eigenspheres
# =============================================================================

def reduced_bifurcation_candidates(
    problem: PerturbedProblem,
    lambda_star: float,
    tol: Tolerances = Tolerances(),
    density: int = 8,
) -> List[BifurcationCandidate]:
    """
    Kernel directions a with b(a) = μa, where b(a) is the C(Ker T)-coordinate
    of N(G2·a) in the splitting H = Im T ⊕ C(Ker T).
    """
    pencil = problem.pencil
    cert = certify(pencil, lambda_star, tol)
    if not cert.h3_holds:
        raise TransversalityError(f"no splitting at λ*={lambda_star}: Im T meets C(Ker T)")
    G2 = cert.splitting.G2
    r = cert.splitting.H1.shape[1]
    m = G2.shape[1]
    B_H = np.column_stack([cert.splitting.H1, pencil.C @ G2])
    perturbation = problem.perturbation

    found: List[Tuple[np.ndarray, float]] = []
    if perturbation.is_linear:
        reduced = np.linalg.solve(B_H, perturbation.linear_matrix @ G2)[r:]
        mu, vectors = scipy.linalg.eig(reduced)
        for value, vector in zip(mu, vectors.T):
            if abs(value.imag) <= 1e-10 * max(1.0, abs(value)):
                a = np.real(vector)
                found.append((a / np.linalg.norm(a), float(value.real)))
    else:
        found = _reduced_newton(problem, B_H, G2, r, m, density)

    candidates: List[BifurcationCandidate] = []
    for a, slope in found:
        x = canonical_sign(G2 @ a)
        x = x / np.linalg.norm(x)
        if all(np.linalg.norm(x - c.x) > 1e-8 for c in candidates):
            candidates.append(BifurcationCandidate(x=x, slope=slope))
    logger.info("λ*=%.10g: %d reduced bifurcation candidates", lambda_star, len(candidates))
    return candidates


def _reduced_newton(
    problem: PerturbedProblem, B_H: np.ndarray, G2: np.ndarray, r: int, m: int, density: int
) -> List[Tuple[np.ndarray, float]]:
    extension = homogeneous_extension(problem.perturbation, strict=True)

    def reduced(a: np.ndarray) -> np.ndarray:
        return np.linalg.solve(B_H, extension(G2 @ a))[r:]

    def fun(z: np.ndarray) -> np.ndarray:
        a, mu = z[:m], z[m]
        return np.concatenate([reduced(a) - mu * a, [(a @ a - 1.0) / 2.0]])

    def jac(z: np.ndarray) -> np.ndarray:
        a, mu = z[:m], z[m]
        Db = np.linalg.solve(B_H, homogeneous_extension_derivative(problem.perturbation, G2 @ a) @ G2)[r:]
        J = np.zeros((m + 1, m + 1))
        J[:m, :m] = Db - mu * np.eye(m)
        J[:m, m] = -a
        J[m, :m] = a
        return J

    settings = ContinuationSettings(newton_max_iter=30)
    found = []
    for seed in eigensphere_grid(np.eye(m), density):
        z0 = np.concatenate([seed, [seed @ reduced(seed)]])
        z, ok = _newton(fun, jac, z0, 1.0, settings)
        if ok and np.linalg.norm(fun(z)) <= 1e-10:
            found.append((z[:m] / np.linalg.norm(z[:m]), float(z[m])))
    return found


def descend_to_trivial(
    problem: PerturbedProblem,
    point: SolutionPoint,
    ladder: Sequence[float],
    settings: ContinuationSettings = ContinuationSettings(),
) -> List[SolutionPoint]:
    """Natural-parameter continuation in s through the ladder values."""
    system = ExtendedSystem(problem)
    e_s = np.zeros(problem.dim + 2)
    e_s[0] = 1.0
    history = [point.packed()]
    solved: List[SolutionPoint] = []
    for target in ladder:
        if len(history) >= 2:
            a, b = history[-2], history[-1]
            guess = b + (target - b[0]) / (b[0] - a[0]) * (b - a) if b[0] != a[0] else b.copy()
        else:
            guess = history[-1].copy()
        guess[0] = target
        u, ok = _newton(
            lambda v: np.concatenate([system.residual(v), [v[0] - target]]),
            lambda v: np.vstack([system.jacobian(v), e_s]),
            guess,
            system.scale(guess),
            settings,
        )
        if not ok:
            raise ConvergenceError(f"descent toward s=0 failed at s={target:g}")
        history.append(u)
        solved.append(system.point(u))
    return solved


def richardson_limit(points: Sequence[SolutionPoint]) -> np.ndarray:
    """Limit of x(s) as s → 0 from the last three points of a halving ladder."""
    if len(points) < 3:
        raise ConvergenceError("Richardson extrapolation needs three ladder points")
    x0, x1, x2 = (p.x for p in points[-3:])
    first = 2.0 * x1 - x0
    second = 2.0 * x2 - x1
    limit = (4.0 * second - first) / 3.0
    return limit / np.linalg.norm(limit)


def dedup_antipodal(vectors: Sequence[np.ndarray], tol: float = 1e-6) -> List[np.ndarray]:
    """Collapse duplicates and antipodes; each direction is reported as (v, −v)."""
    unique: List[np.ndarray] = []
    for v in vectors:
        v = canonical_sign(np.asarray(v, dtype=float) / np.linalg.norm(v))
        if all(min(np.linalg.norm(v - u), np.linalg.norm(v + u)) > tol for u in unique):
            unique.append(v)
    pairs: List[np.ndarray] = []
    for v in unique:
        pairs.extend([v, -v])
    return pairs


def _branch_seed(
    system: ExtendedSystem,
    lam: float,
    x: np.ndarray,
    s0: float,
    settings: ContinuationSettings,
    tol: Tolerances,
) -> Optional[SolutionPoint]:
    """A point with s = s0 on the branch leaving (0, λ, x), if one leaves there."""
    u = system.pack(0.0, lam, x)
    t = initial_tangent(system, u, tol)
    if abs(t[0]) <= DIRECTION_FLOOR:
        return None
    guess = u + (s0 / t[0]) * t
    e_s = np.zeros(u.size)
    e_s[0] = 1.0
    seeded, ok = _newton(
        lambda v: np.concatenate([system.residual(v), [v[0] - s0]]),
        lambda v: np.vstack([system.jacobian(v), e_s]),
        guess,
        system.scale(guess),
        settings,
    )
    return system.point(seeded) if ok else None


def detect_bifurcation_points(
    problem: PerturbedProblem,
    lambda_star: float,
    settings: ContinuationSettings = ContinuationSettings(),
    tol: Tolerances = Tolerances(),
) -> List[np.ndarray]:
    """Limits on the eigensphere of the branches with s ≠ 0, as antipodal pairs."""
    cert = certify(problem.pencil, lambda_star, tol)
    if cert.geometric_mult <= 1:
        logger.warning("λ*=%.10g is simple; its eigensphere is a twin pair", lambda_star)

    system = ExtendedSystem(problem)
    s0 = settings.ladder_start
    ladder = [s0 * 0.5 ** i for i in range(1, settings.ladder_levels)]
    limits = []
    for candidate in reduced_bifurcation_candidates(problem, cert.lambda_star, tol, settings.grid_density):
        for x in (candidate.x, -candidate.x):
            seed = _branch_seed(system, cert.lambda_star, x, s0, settings, tol)
            if seed is None:
                continue
            descent = [seed] + descend_to_trivial(problem, seed, ladder, settings)
            limit = richardson_limit(descent)
            logger.debug("Branch through x=%s tends to %s", np.round(x, 6), np.round(limit, 6))
            limits.append(limit)
    points = dedup_antipodal(limits)
    logger.info("λ*=%.10g: %d bifurcation points", lambda_star, len(points))
    return points
