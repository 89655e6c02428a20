"""Entropic region boundary F(t), its Lagrangian dual v(μ) and the concavity audit.

F(t) = sup { I(X;B|U)_ω : I(U;C)_ω ≥ t } and v(μ) = sup { I(X;B|U)_ω + μ I(U;C)_ω }.

Every witness found while evaluating either quantity goes into one pool.
Reading both F and v off that pool makes F non-increasing in t and v
convex and non-decreasing in μ, whatever order the searches ran in. All
values are lower bounds on the suprema; ``certified_lower`` records whether
the exhaustive classical-U grid contributed at a step of 1/64 or finer.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import RegionSettings
from ..core.errors import InfeasibleRateError, PreconditionError
from ..core.workers import WorkerPool, spawn_generators
from ..quantum.operators import CLIP_THRESHOLD, DensityMatrix
from .capacity import CapacityResult, holevo_capacity
from .channel import CqBroadcastChannel, JointState, aux_dim_bound, classical_joint_state

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-6
GRID_MAX_ALPHABET = 3
CERTIFIED_GRID_RESOLUTION = 64
FD_STEP = 1e-7
PARETO_TOL = 1e-13
LINE_SEARCH_SCALES = 2.0 ** -np.arange(12)


# ---------------------------------------------------------------------------
# Classical-U evaluation
# ---------------------------------------------------------------------------

def _stack_entropy(mixtures: np.ndarray) -> np.ndarray:
    vals = np.linalg.eigvalsh(mixtures)
    vals = np.where(vals > CLIP_THRESHOLD, vals, 1.0)
    return -np.sum(vals * np.log(vals), axis=-1)


class ClassicalEvaluator:
    """Vectorized (I(X;B|U), I(U;C)) for auxiliaries given as joint pmfs P(u, x).

    With classical U, I(X;B|U) = Σ_u P(u) χ_B(p(·|u)) and
    I(U;C) = χ_C(p_X) − Σ_u P(u) χ_C(p(·|u)), where χ is the Holevo quantity.
    """

    def __init__(self, channel: CqBroadcastChannel):
        self.channel = channel
        self._states = {
            "B": (np.array([s.entries for s in channel.b_states]), channel.b_entropies),
            "C": (np.array([s.entries for s in channel.c_states]), channel.c_entropies),
        }

    def chi(self, q: np.ndarray, receiver: str) -> np.ndarray:
        states, entropies = self._states[receiver]
        q = np.asarray(q, dtype=float)
        mixtures = np.tensordot(q, states, axes=([-1], [0]))
        return _stack_entropy(mixtures) - q @ entropies

    def evaluate(self, pmfs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pmfs = np.asarray(pmfs, dtype=float)
        single = pmfs.ndim == 2
        if single:
            pmfs = pmfs[None]
        p_u = pmfs.sum(axis=-1)
        atoms = pmfs / np.where(p_u > 0, p_u, 1.0)[..., None]
        i_xb = np.sum(p_u * self.chi(atoms, "B"), axis=-1)
        i_uc = self.chi(pmfs.sum(axis=1), "C") - np.sum(p_u * self.chi(atoms, "C"), axis=-1)
        if single:
            return float(i_xb[0]), float(i_uc[0])
        return i_xb, i_uc


@dataclass(frozen=True, eq=False)
class Candidate:
    """One witness with its objective pair; classical witnesses keep their pmf."""
    i_xb_u: float
    i_uc: float
    joint_pmf: Optional[np.ndarray] = None
    state: Optional[JointState] = None
    source: str = "grid"

    def witness(self, channel: CqBroadcastChannel) -> JointState:
        if self.state is not None:
            return self.state
        return classical_joint_state(self.joint_pmf, channel)


def simplex_grid(k: int, resolution: int) -> np.ndarray:
    """All points of the (k−1)-simplex with coordinates in (1/resolution)·ℤ."""
    points = []
    for bars in itertools.combinations(range(resolution + k - 1), k - 1):
        parts = np.diff((-1,) + bars + (resolution + k - 1,)) - 1
        points.append(parts)
    return np.array(points, dtype=float) / resolution


def _pareto_indices(i_xb: np.ndarray, i_uc: np.ndarray) -> np.ndarray:
    """Indices of points not dominated in (I(U;C), I(X;B|U)), ordered by decreasing I(U;C)."""
    order = np.lexsort((-i_xb, -i_uc))
    xb = i_xb[order]
    previous = np.concatenate(([-np.inf], np.maximum.accumulate(xb)[:-1]))
    return order[xb > previous + PARETO_TOL]


def _grid_candidates(evaluator: ClassicalEvaluator, resolution: int) -> List[Candidate]:
    """Exhaustive classical-U grid with |U| = |X|.

    Atoms p(·|u) and the input law p_X both range over the simplex grid;
    P(u) is the barycentric weight vector of p_X in the atom set.
    """
    size = evaluator.channel.size
    grid = simplex_grid(size, resolution)
    chi_b = evaluator.chi(grid, "B")
    chi_c = evaluator.chi(grid, "C")

    sets = np.array(list(itertools.combinations(range(len(grid)), size)))
    atoms = grid[sets]
    matrices = np.transpose(atoms, (0, 2, 1))
    keep = np.abs(np.linalg.det(matrices)) > 1e-12
    sets, atoms, matrices = sets[keep], atoms[keep], matrices[keep]
    weights = np.einsum("mij,tj->mti", np.linalg.inv(matrices), grid)
    feasible = np.all(weights >= -1e-12, axis=-1)
    weights = np.clip(weights, 0.0, None)

    i_xb = np.einsum("mtk,mk->mt", weights, chi_b[sets])
    i_uc = chi_c[None, :] - np.einsum("mtk,mk->mt", weights, chi_c[sets])
    set_idx, target_idx = np.nonzero(feasible)
    xb, uc = i_xb[set_idx, target_idx], i_uc[set_idx, target_idx]
    front = _pareto_indices(xb, uc)
    logger.debug(f"Grid at resolution 1/{resolution}: {len(xb)} feasible pairs, {len(front)} on the front")
    return [
        Candidate(
            i_xb_u=float(xb[j]),
            i_uc=float(uc[j]),
            joint_pmf=weights[set_idx[j], target_idx[j]][:, None] * atoms[set_idx[j]],
            source="grid",
        )
        for j in front
    ]


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(v - theta, 0.0)


def _ascend(objective: Callable[[np.ndarray], np.ndarray], start: np.ndarray, steps: int) -> Tuple[np.ndarray, float]:
    """Projected gradient ascent on the simplex with forward differences and batched line search."""
    shape = start.shape
    x = start.reshape(-1).astype(float)
    dim = x.size
    value = float(objective(x[None])[0])
    step = 0.05
    stalled = 0
    for _ in range(steps):
        probes = x[None, :] + FD_STEP * np.eye(dim)
        grad = (objective(probes) - value) / FD_STEP
        norm = float(np.linalg.norm(grad))
        if not np.isfinite(norm) or norm == 0.0:
            break
        trials = np.array([_project_simplex(x + step * s * grad / norm) for s in LINE_SEARCH_SCALES])
        values = objective(trials)
        best = int(np.argmax(values))
        gain = float(values[best]) - value
        if gain > 0:
            x, value = trials[best], float(values[best])
            step = step * 2.0 if best == 0 else step * LINE_SEARCH_SCALES[best]
        else:
            step *= LINE_SEARCH_SCALES[-1]
        stalled = stalled + 1 if gain < 1e-13 else 0
        if stalled >= 5 or step < 1e-14:
            break
    return x.reshape(shape), value


# ---------------------------------------------------------------------------
# Witness pool
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionPoint:
    """Best witness found at constraint level t."""
    t: float
    f_value: float
    witness: JointState
    certified_lower: bool
    i_xb_u: float
    i_uc: float


@dataclass(frozen=True)
class LagrangianPoint:
    mu: float
    value: float
    witness: JointState
    i_xb_u: float
    i_uc: float


class RegionPool:
    """Pareto front of all witnesses found for one channel."""

    def __init__(
        self,
        channel: CqBroadcastChannel,
        opts: Optional[RegionSettings] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.logger = logging.getLogger(__name__)
        self.channel = channel
        self.opts = opts or RegionSettings()
        self.evaluator = ClassicalEvaluator(channel)
        self.capacity_b: CapacityResult = holevo_capacity(channel.b_states)
        self.capacity_c: CapacityResult = holevo_capacity(channel.c_states)
        self.gridded = channel.size <= GRID_MAX_ALPHABET
        self.resolution = self.opts.grid_resolution if channel.size <= 2 else self.opts.ternary_grid_resolution
        # Only a grid of step at most 1/64 per simplex coordinate counts as certified.
        self.certified = self.gridded and (channel.size == 1 or self.resolution >= CERTIFIED_GRID_RESOLUTION)
        self.candidates: List[Candidate] = []
        rng = rng if rng is not None else np.random.default_rng(0)
        self.add(self._initial_candidates(rng))
        self.logger.info(
            f"Region pool for |X|={channel.size}: C_B={self.capacity_b.value:.6f}, "
            f"C_C={self.capacity_c.value:.6f}, {len(self.candidates)} front witnesses"
        )

    def _initial_candidates(self, rng: np.random.Generator) -> List[Candidate]:
        size = self.channel.size
        seeds = []
        trivial = np.zeros((size, size))
        trivial[0] = self.capacity_b.weights
        seeds.append(trivial)
        seeds.append(np.diag(self.capacity_c.weights))
        if size == 1:
            return [self._classical(seeds[0], "seed")]
        if self.gridded:
            candidates = _grid_candidates(self.evaluator, self.resolution)
        else:
            candidates = []
            for _ in range(max(1, self.opts.quantum_starts) * 4):
                seeds.append(rng.dirichlet(np.ones(size * size)).reshape(size, size))
        candidates.extend(self._classical(pmf, "seed") for pmf in seeds)
        return candidates

    def _classical(self, pmf: np.ndarray, source: str) -> Candidate:
        i_xb, i_uc = self.evaluator.evaluate(pmf)
        return Candidate(i_xb_u=i_xb, i_uc=i_uc, joint_pmf=np.asarray(pmf, dtype=float), source=source)

    def add(self, candidates: Sequence[Candidate]):
        merged = self.candidates + [c for c in candidates if c is not None]
        xb = np.array([c.i_xb_u for c in merged])
        uc = np.array([c.i_uc for c in merged])
        self.candidates = [merged[i] for i in _pareto_indices(xb, uc)]

    def best_for(self, t: float) -> Optional[Candidate]:
        feasible = [c for c in self.candidates if c.i_uc >= t - FEASIBILITY_TOL]
        if not feasible:
            return None
        return max(feasible, key=lambda c: c.i_xb_u)

    def best_for_mu(self, mu: float) -> Candidate:
        return max(self.candidates, key=lambda c: c.i_xb_u + mu * c.i_uc)

    def value_at(self, mu: float) -> float:
        c = self.best_for_mu(mu)
        return c.i_xb_u + mu * c.i_uc

    def f_value(self, t: float) -> float:
        c = self.best_for(t)
        return float("-inf") if c is None else c.i_xb_u

    @property
    def sup_i_xb_u(self) -> float:
        return max(c.i_xb_u for c in self.candidates)

    @property
    def sup_i_uc(self) -> float:
        return max(c.i_uc for c in self.candidates)

    def point_at(self, t: float) -> RegionPoint:
        best = self.best_for(t)
        if best is None:
            raise InfeasibleRateError(f"No witness reaches I(U;C) ≥ {t:.6g}")
        witness = best.witness(self.channel)
        i_xb, i_uc = witness.objectives()
        return RegionPoint(
            t=float(t),
            f_value=i_xb,
            witness=witness,
            certified_lower=self.certified,
            i_xb_u=i_xb,
            i_uc=i_uc,
        )

    def lagrangian_point(self, mu: float) -> LagrangianPoint:
        best = self.best_for_mu(mu)
        witness = best.witness(self.channel)
        i_xb, i_uc = witness.objectives()
        return LagrangianPoint(mu=float(mu), value=i_xb + mu * i_uc, witness=witness, i_xb_u=i_xb, i_uc=i_uc)

    def check_level(self, t: float):
        if t < 0:
            raise PreconditionError(f"Constraint level must be non-negative, got {t}")
        if t > self.capacity_c.upper + FEASIBILITY_TOL:
            raise InfeasibleRateError(
                f"t = {t:.6g} exceeds max I(U;C) = {self.capacity_c.value:.6g}"
            )


# ---------------------------------------------------------------------------
# Local searches
# ---------------------------------------------------------------------------

def _penalty_weights(opts: RegionSettings) -> np.ndarray:
    return np.logspace(1, 5, max(1, opts.penalty_weights))


def refine_for_t(pool: RegionPool, t: float, rng: Optional[np.random.Generator] = None) -> List[Candidate]:
    """Penalty sweep of projected-gradient ascent from the best pooled witness at level t."""
    opts = pool.opts
    start = pool.best_for(t)
    found: List[Candidate] = []
    if start is None:
        return found
    evaluator = pool.evaluator
    shape = (pool.channel.size, pool.channel.size)
    origin = start.joint_pmf if start.joint_pmf is not None else np.diag(pool.capacity_c.weights)

    x = origin
    for lam in _penalty_weights(opts):
        def objective(batch, lam=lam):
            i_xb, i_uc = evaluator.evaluate(batch.reshape((-1,) + shape))
            return i_xb - lam * np.maximum(0.0, t - i_uc) ** 2
        x, _ = _ascend(objective, x, opts.ascent_steps)

    i_xb, i_uc = evaluator.evaluate(x)
    if i_uc < t - FEASIBILITY_TOL:
        x = _feasibility_polish(evaluator, origin, x, t)
        i_xb, i_uc = evaluator.evaluate(x)
    if i_uc >= t - FEASIBILITY_TOL:
        found.append(Candidate(i_xb_u=i_xb, i_uc=i_uc, joint_pmf=x, source="ascent"))

    if opts.quantum_u:
        rng = rng if rng is not None else np.random.default_rng(0)
        found.extend(quantum_ascent(pool, rng, t=t))
    return found


def _feasibility_polish(evaluator: ClassicalEvaluator, feasible: np.ndarray, target: np.ndarray, t: float) -> np.ndarray:
    """Largest step from a feasible pmf toward ``target`` that keeps I(U;C) ≥ t."""
    lo, hi = 0.0, 1.0
    for _ in range(50):
        mid = (lo + hi) / 2
        _, i_uc = evaluator.evaluate((1 - mid) * feasible + mid * target)
        if i_uc >= t:
            lo = mid
        else:
            hi = mid
    return (1 - lo) * feasible + lo * target


def refine_for_mu(pool: RegionPool, mu: float, rng: Optional[np.random.Generator] = None) -> List[Candidate]:
    """Ascent on I(X;B|U) + μ I(U;C) from the best pooled witness for μ."""
    opts = pool.opts
    start = pool.best_for_mu(mu)
    evaluator = pool.evaluator
    shape = (pool.channel.size, pool.channel.size)
    origin = start.joint_pmf if start.joint_pmf is not None else np.diag(pool.capacity_c.weights)

    def objective(batch):
        i_xb, i_uc = evaluator.evaluate(batch.reshape((-1,) + shape))
        return i_xb + mu * i_uc

    x, _ = _ascend(objective, origin, opts.ascent_steps)
    i_xb, i_uc = evaluator.evaluate(x)
    found = [Candidate(i_xb_u=i_xb, i_uc=i_uc, joint_pmf=x, source="dual")]
    if opts.quantum_u:
        rng = rng if rng is not None else np.random.default_rng(0)
        found.extend(quantum_ascent(pool, rng, mu=mu))
    return found


def _u_state(params: np.ndarray, d_u: int) -> DensityMatrix:
    a = params[: d_u * d_u].reshape(d_u, d_u) + 1j * params[d_u * d_u:].reshape(d_u, d_u)
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.real(np.trace(rho)))


def quantum_ascent(
    pool: RegionPool,
    rng: np.random.Generator,
    t: Optional[float] = None,
    mu: Optional[float] = None,
) -> List[Candidate]:
    """Multi-start alternating ascent over quantum auxiliaries.

    Rounds alternate between the input law p_X and the auxiliary states
    ρ_U^x = A_x A_x† / Tr[A_x A_x†]. With ``t`` set, the constraint enters
    through the same penalty sweep as the classical search; with ``mu`` set,
    the Lagrangian objective is maximized directly.
    """
    channel = pool.channel
    opts = pool.opts
    size = channel.size
    d_u = aux_dim_bound(channel)
    block = 2 * d_u * d_u
    rounds = max(2, opts.ascent_steps // 5)
    weights_list = _penalty_weights(opts) if t is not None else [0.0]
    found: List[Candidate] = []

    def unpack(v):
        p = _project_simplex(v[:size])
        states = tuple(_u_state(v[size + x * block: size + (x + 1) * block], d_u) for x in range(size))
        return JointState(p, states, channel)

    for _ in range(max(1, opts.quantum_starts)):
        start = pool.best_for(t) if t is not None else pool.best_for_mu(mu)
        p0 = start.witness(channel).weights if start is not None else pool.capacity_c.weights
        v = np.concatenate([np.asarray(p0, dtype=float), rng.standard_normal(size * block)])
        for lam in weights_list:
            def objective(vec, lam=lam):
                i_xb, i_uc = unpack(vec).objectives()
                if t is not None:
                    return i_xb - lam * max(0.0, t - i_uc) ** 2
                return i_xb + mu * i_uc

            value = objective(v)
            step = 0.1
            for r in range(rounds):
                part = range(size) if r % 2 == 0 else range(size, v.size)
                grad = np.zeros_like(v)
                for j in part:
                    probe = v.copy()
                    probe[j] += FD_STEP
                    grad[j] = (objective(probe) - value) / FD_STEP
                norm = np.linalg.norm(grad)
                if norm == 0:
                    continue
                for s in LINE_SEARCH_SCALES:
                    trial = v + step * s * grad / norm
                    trial[:size] = _project_simplex(trial[:size])
                    trial_value = objective(trial)
                    if trial_value > value:
                        v, value = trial, trial_value
                        break
        omega = unpack(v)
        i_xb, i_uc = omega.objectives()
        if t is None or i_uc >= t - FEASIBILITY_TOL:
            found.append(Candidate(i_xb_u=i_xb, i_uc=i_uc, state=omega, source="quantum"))
    logger.debug(f"Quantum-U ascent produced {len(found)} witnesses")
    return found


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def f_of_t(
    ch: CqBroadcastChannel,
    t: float,
    opts: Optional[RegionSettings] = None,
    rng: Optional[np.random.Generator] = None,
    pool: Optional[RegionPool] = None,
) -> RegionPoint:
    """Lower bound on F(t) with the witness that attains it."""
    pool = pool or RegionPool(ch, opts, rng)
    pool.check_level(t)
    pool.add(refine_for_t(pool, t, rng))
    return pool.point_at(t)


def default_mu_grid(mu_min: float = 1e-3, mu_max: float = 1e3, points: int = 61) -> np.ndarray:
    """{0} ∪ logspace(mu_min, mu_max, points)."""
    return np.concatenate(([0.0], np.logspace(np.log10(mu_min), np.log10(mu_max), points)))


def lagrangian_boundary(
    ch: CqBroadcastChannel,
    mu_grid: Sequence[float],
    opts: Optional[RegionSettings] = None,
    rng: Optional[np.random.Generator] = None,
    pool: Optional[RegionPool] = None,
) -> List[LagrangianPoint]:
    """v(μ) = sup_ω {I(X;B|U) + μ I(U;C)} on a grid of μ ≥ 0, with witnesses."""
    mu_grid = [float(mu) for mu in mu_grid]
    if any(mu < 0 for mu in mu_grid):
        raise PreconditionError("Lagrange multipliers must be non-negative")
    pool = pool or RegionPool(ch, opts, rng)
    for mu in mu_grid:
        pool.add(refine_for_mu(pool, mu, rng))
    return [pool.lagrangian_point(mu) for mu in mu_grid]


@dataclass(frozen=True)
class ConcavityReport:
    concave: bool
    checked: int
    violations: Tuple[Tuple[float, float, float], ...]
    worst_deficit: float


def concavity_audit(points: Sequence[Tuple[float, float]], tol: float = 2e-3) -> ConcavityReport:
    """Chord test F(t₁) ≥ λF(t₀) + (1−λ)F(t₂) − tol on consecutive triples.

    ``violations`` lists (t₁, F(t₁), chord value) for every failing triple.
    """
    pts = [(float(t), float(f)) for t, f in points]
    ts = [t for t, _ in pts]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise PreconditionError("Concavity audit needs strictly increasing t values")
    violations = []
    worst = 0.0
    for (t0, f0), (t1, f1), (t2, f2) in zip(pts, pts[1:], pts[2:]):
        lam = (t2 - t1) / (t2 - t0)
        chord = lam * f0 + (1.0 - lam) * f2
        deficit = chord - f1
        worst = max(worst, deficit)
        if f1 < chord - tol:
            violations.append((t1, f1, chord))
    return ConcavityReport(
        concave=not violations,
        checked=max(0, len(pts) - 2),
        violations=tuple(violations),
        worst_deficit=worst,
    )


def upper_concave_envelope(points: Sequence[Tuple[float, float]]) -> np.ndarray:
    """Vertices of the upper concave hull of (x, y) points, sorted by x."""
    pts = sorted({(float(x), float(y)) for x, y in points})
    best = {}
    for x, y in pts:
        best[x] = max(best.get(x, -np.inf), y)
    pts = sorted(best.items())
    hull: List[Tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return np.array(hull)


def envelope_value(hull: np.ndarray, x: float) -> float:
    """Piecewise-linear hull value, extended flat to the left; −inf to the right."""
    if x > hull[-1, 0]:
        return float("-inf")
    if x <= hull[0, 0]:
        return float(hull[0, 1])
    return float(np.interp(x, hull[:, 0], hull[:, 1]))


@dataclass
class RegionEnvelope:
    """Boundary points, Lagrangian values and the pooled witnesses behind them."""
    channel: CqBroadcastChannel
    points: List[RegionPoint]
    lagrangian: List[LagrangianPoint]
    pool: RegionPool
    skipped_t: List[float] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.pool.certified

    @property
    def capacity_b(self) -> float:
        return self.pool.capacity_b.value

    @property
    def capacity_c(self) -> float:
        return self.pool.capacity_c.value

    @property
    def sup_i_xb_u(self) -> float:
        """F(0), the largest I(X;B|U) over all witnesses."""
        return self.pool.sup_i_xb_u

    @property
    def sup_i_uc(self) -> float:
        return self.pool.sup_i_uc

    def f_at(self, t: float) -> float:
        return self.pool.f_value(t)

    def value_at(self, mu: float) -> float:
        return self.pool.value_at(mu)

    def dual_bound(self, t: float) -> float:
        """min_μ {v(μ) − μt} over the computed grid; an upper estimate of F(t)."""
        return min(p.value - p.mu * t for p in self.lagrangian)

    def boundary(self) -> np.ndarray:
        """Non-increasing part of the concave hull of (I(U;C), I(X;B|U)) witnesses."""
        hull = upper_concave_envelope([(c.i_uc, c.i_xb_u) for c in self.pool.candidates])
        peak = int(np.argmax(hull[:, 1]))
        return hull[peak:]

    def contains(self, rb: float, rc: float, tol: float = 0.0) -> bool:
        return in_entropic_region(rb, rc, self, tol)

    def concavity(self, tol: Optional[float] = None) -> ConcavityReport:
        tol = self.pool.opts.optimizer_tol if tol is None else tol
        return concavity_audit([(p.t, p.f_value) for p in self.points], tol)


def in_entropic_region(rb: float, rc: float, envelope: RegionEnvelope, tol: float = 0.0) -> bool:
    """Whether (R_B, R_C) lies under the concave hull of the witnessed boundary."""
    if rb < 0 or rc < 0:
        raise PreconditionError(f"Rates must be non-negative, got ({rb}, {rc})")
    hull = envelope.boundary()
    if rc > hull[-1, 0] + tol:
        return False
    return rb <= envelope_value(hull, min(rc, hull[-1, 0])) + tol


def compute_envelope(
    ch: CqBroadcastChannel,
    t_grid: Optional[Sequence[float]] = None,
    mu_grid: Optional[Sequence[float]] = None,
    opts: Optional[RegionSettings] = None,
    seed: int = 0,
    threads: int = 1,
) -> RegionEnvelope:
    """Boundary F(t) on ``t_grid`` and v(μ) on ``mu_grid`` from one witness pool.

    Args:
        ch: Degraded broadcast channel
        t_grid: Constraint levels; 17 evenly spaced levels up to max I(U;C) by default
        mu_grid: Multipliers; {0} ∪ logspace(1e-3, 1e3, 61) by default
        opts: Region search settings
        seed: Seed for all randomized starts
        threads: Worker count for the per-level searches

    Returns:
        RegionEnvelope; levels above max I(U;C) are listed in ``skipped_t``
    """
    opts = opts or RegionSettings()
    pool = RegionPool(ch, opts, np.random.default_rng(seed))
    if t_grid is None:
        t_grid = np.linspace(0.0, pool.capacity_c.value, 17)
    mu_grid = default_mu_grid() if mu_grid is None else [float(mu) for mu in mu_grid]
    if any(mu < 0 for mu in mu_grid):
        raise PreconditionError("Lagrange multipliers must be non-negative")

    levels, skipped = [], []
    for t in t_grid:
        try:
            pool.check_level(float(t))
            levels.append(float(t))
        except InfeasibleRateError:
            logger.warning(f"Skipping infeasible level t={float(t):.6g}")
            skipped.append(float(t))

    generators = spawn_generators(seed, len(levels) + len(mu_grid))
    workers = WorkerPool(threads)
    by_level = workers.map_ordered(
        lambda job: refine_for_t(pool, job[0], job[1]), zip(levels, generators[:len(levels)])
    )
    for found in by_level:
        pool.add(found)
    by_mu = workers.map_ordered(
        lambda job: refine_for_mu(pool, job[0], job[1]), zip(mu_grid, generators[len(levels):])
    )
    for found in by_mu:
        pool.add(found)

    points = [pool.point_at(t) for t in levels]
    lagrangian = [pool.lagrangian_point(mu) for mu in mu_grid]
    logger.info(
        f"Envelope computed: {len(points)} levels, {len(lagrangian)} multipliers, "
        f"F(0)={pool.sup_i_xb_u:.6f}, max I(U;C)={pool.sup_i_uc:.6f}"
    )
    return RegionEnvelope(channel=ch, points=points, lagrangian=lagrangian, pool=pool, skipped_t=skipped)
