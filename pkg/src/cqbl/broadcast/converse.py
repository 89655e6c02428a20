"""Converse bounds for c-q degraded broadcast channels.

Everything here is closed-form arithmetic on nats, apart from the μ search
of the strong converse exponent, which reads v(μ) off a computed envelope.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..config.settings import ConverseSettings
from ..core.errors import PreconditionError
from ..quantum.entropic import binary_entropy
from .channel import CqBroadcastChannel
from .region import RegionEnvelope

logger = logging.getLogger(__name__)

INSIDE_REGION = "inside region"


def _check_eps(eps: float) -> float:
    """Validate ε ∈ (0, 1) and return ln(1/(1−ε))."""
    if not 0.0 < eps < 1.0:
        raise PreconditionError(f"Error level must lie in (0, 1), got {eps}")
    return float(-np.log1p(-eps))


def _check_blocklength(n: int, d: int):
    if n < 1:
        raise PreconditionError(f"Blocklength must be at least 1, got {n}")
    if d < 1:
        raise PreconditionError(f"Dimension must be at least 1, got {d}")


def fano_bound(n: int, eps: float, d: int, mutual_info: float) -> float:
    """I + 2√(n·d·ln(1/(1−ε))) + ln(1/(1−ε)), an upper bound on ln|M|.

    Valid for codes whose per-message success probabilities have weighted
    geometric mean at least 1 − ε.
    """
    log_term = _check_eps(eps)
    _check_blocklength(n, d)
    return float(mutual_info + 2.0 * np.sqrt(n * d * log_term) + log_term)


def optimal_t(eps: float, d: int, n: int) -> float:
    """Smoothing time √(ln(1/(1−ε)) / (d·n)) that minimizes the pre-optimized bound."""
    log_term = _check_eps(eps)
    _check_blocklength(n, d)
    return float(np.sqrt(log_term / (d * n)))


def fano_pre_optimized(t: float, n: int, d: int, eps: float, mutual_info: float) -> float:
    """I + d·n·t + (1 + 1/t)·ln(1/(1−ε)) for a smoothing time t > 0."""
    log_term = _check_eps(eps)
    _check_blocklength(n, d)
    if t <= 0:
        raise PreconditionError(f"Smoothing time must be positive, got {t}")
    return float(mutual_info + d * n * t + (1.0 + 1.0 / t) * log_term)


def classical_fano(eps: float, m_size: int, mutual_info: float, tight: bool = False) -> float:
    """Fano route to ln|M|.

    By default returns (I + h(ε)) / (1 − ε). With ``tight`` the unrelaxed
    form I + h(ε) + ε·ln(|M| − 1) is returned instead; it is only an upper
    bound on ln|M| after rearranging, and is reported for comparison.
    """
    if not 0.0 <= eps < 1.0:
        raise PreconditionError(f"Error level must lie in [0, 1), got {eps}")
    if m_size < 1:
        raise PreconditionError(f"Message set must be non-empty, got {m_size}")
    if tight:
        return float(mutual_info + binary_entropy(eps) + (eps * np.log(m_size - 1) if m_size > 1 else 0.0))
    return float((mutual_info + binary_entropy(eps)) / (1.0 - eps))


@dataclass(frozen=True)
class FanoComparison:
    n: int
    second_order_rate: float
    classical_rate: float

    @property
    def second_order_wins(self) -> bool:
        return self.second_order_rate < self.classical_rate


def compare_fano_bounds(
    n_values: Sequence[int],
    eps: float,
    d: int,
    per_letter_info: float,
) -> List[FanoComparison]:
    """Per-letter rate bounds from both Fano routes with I(M;B^n) = n·per_letter_info."""
    rows = []
    for n in n_values:
        info = n * per_letter_info
        rows.append(
            FanoComparison(
                n=int(n),
                second_order_rate=fano_bound(n, eps, d, info) / n,
                classical_rate=classical_fano(eps, 1, info) / n,
            )
        )
    return rows


@dataclass(frozen=True)
class ExponentParams:
    """Strong converse data: γ = rb + μ*·rc − v(μ*), η = γ/(1+μ*), exponent f."""
    mu_star: float
    gamma: float
    eta: float
    f: float


@dataclass(frozen=True)
class BoundReport:
    n: int
    eps: float
    d_b: int
    d_c: int
    single_letter: Tuple[float, float]
    rb_bound: float
    rc_bound: float
    certified_lower: bool
    exponent: Optional[ExponentParams] = None
    rate_pair: Optional[Tuple[float, float]] = None
    error_lower_bound: Optional[float] = None

    @property
    def inside_region(self) -> bool:
        return self.rate_pair is not None and self.exponent is None

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["single_letter"] = list(self.single_letter)
        if self.rate_pair is not None:
            data["rate_pair"] = list(self.rate_pair)
            if self.exponent is None:
                data["exponent"] = INSIDE_REGION
        return data


def _corrections(n: int, eps: float, d: int) -> float:
    log_term = _check_eps(eps)
    return float(2.0 * np.sqrt(d / n * log_term) + log_term / n)


def second_order_bounds(n: int, eps: float, ch: CqBroadcastChannel, envelope: RegionEnvelope) -> BoundReport:
    """Finite-n outer bounds on (R_B, R_C) at maximal error ε.

    A common-message rate R enters as R + R_C; see :func:`common_rate_remap`.
    """
    _check_eps(eps)
    _check_blocklength(n, min(ch.d_b, ch.d_c))
    i_xb, i_uc = envelope.sup_i_xb_u, envelope.sup_i_uc
    return BoundReport(
        n=int(n),
        eps=float(eps),
        d_b=ch.d_b,
        d_c=ch.d_c,
        single_letter=(i_xb, i_uc),
        rb_bound=fano_bound(n, eps, ch.d_b, n * i_xb) / n,
        rc_bound=fano_bound(n, eps, ch.d_c, n * i_uc) / n,
        certified_lower=envelope.certified,
    )


def second_order_region(n: int, eps: float, ch: CqBroadcastChannel, envelope: RegionEnvelope) -> np.ndarray:
    """Boundary points (R_C, R_B) shifted outward by the finite-n corrections."""
    shift_b = _corrections(n, eps, ch.d_b)
    shift_c = _corrections(n, eps, ch.d_c)
    return np.array([(p.i_uc + shift_c, p.f_value + shift_b) for p in envelope.points])


def common_rate_remap(r: float, rb: float, rc: float) -> Tuple[float, float]:
    """A common rate r is decoded by both receivers; the bounds see (R_B, R + R_C)."""
    return rb, r + rc


def exponent_f(eta: float, d_b: int, d_c: int) -> float:
    """(√((√d_B + √d_C)² + η) − √d_B − √d_C)², evaluated without cancellation."""
    if eta < 0:
        raise PreconditionError(f"η must be non-negative, got {eta}")
    s = np.sqrt(d_b) + np.sqrt(d_c)
    root_gap = eta / (np.sqrt(s * s + eta) + s)
    return float(root_gap ** 2)


def error_lower_bound(n: int, f: float) -> float:
    """1 − e^{−n f}."""
    return float(-np.expm1(-n * f))


def quadratic_residual(n: int, eps: float, mu_star: float, gamma: float, d_b: int, d_c: int) -> float:
    """(1+μ*)x² + 2(1+μ*)(√(n d_B) + √(n d_C))x − nγ with x² = ln(1/(1−ε))."""
    x = np.sqrt(_check_eps(eps))
    scale = 1.0 + mu_star
    return float(scale * x * x + 2.0 * scale * (np.sqrt(n * d_b) + np.sqrt(n * d_c)) * x - n * gamma)


def strong_converse_exponent(
    rb: float,
    rc: float,
    d_b: int,
    d_c: int,
    envelope: RegionEnvelope,
    opts: Optional[ConverseSettings] = None,
) -> Optional[ExponentParams]:
    """Exponent f with p_max ≥ 1 − e^{−nf} for rate pairs outside the region.

    γ(μ) = rb + μ·rc − v(μ) is maximized over the envelope's μ grid and,
    when ``opts.refine_mu`` is set, refined by a bounded scalar search
    between the neighbouring grid points. Returns None when max γ ≤ 0.
    Because v(μ) is a witnessed lower bound, γ and f err on the high side.
    """
    if rb < 0 or rc < 0:
        raise PreconditionError(f"Rates must be non-negative, got ({rb}, {rc})")
    opts = opts or ConverseSettings()
    mus = np.array(sorted({p.mu for p in envelope.lagrangian}))

    def gamma(mu: float) -> float:
        return rb + mu * rc - envelope.value_at(mu)

    values = np.array([gamma(mu) for mu in mus])
    best = int(np.argmax(values))
    mu_star, gamma_star = float(mus[best]), float(values[best])

    if opts.refine_mu and len(mus) > 1:
        lo = mus[max(best - 1, 0)]
        hi = mus[min(best + 1, len(mus) - 1)]
        if hi > lo:
            res = optimize.minimize_scalar(lambda mu: -gamma(mu), bounds=(lo, hi), method="bounded")
            if res.success and -res.fun > gamma_star:
                mu_star, gamma_star = float(res.x), float(-res.fun)

    if gamma_star <= 0:
        logger.info(f"Rate pair ({rb:.6g}, {rc:.6g}) lies inside the witnessed region")
        return None
    eta = gamma_star / (1.0 + mu_star)
    f = exponent_f(eta, d_b, d_c)
    logger.info(f"Strong converse exponent: μ*={mu_star:.4g}, γ={gamma_star:.6g}, η={eta:.6g}, f={f:.6g}")
    return ExponentParams(mu_star=mu_star, gamma=gamma_star, eta=eta, f=f)


def bound_report(
    n: int,
    eps: float,
    ch: CqBroadcastChannel,
    envelope: RegionEnvelope,
    rate_pair: Optional[Tuple[float, float]] = None,
    opts: Optional[ConverseSettings] = None,
) -> BoundReport:
    """Second-order bounds, plus the exponent and 1 − e^{−nf} for a rate pair outside the region."""
    report = second_order_bounds(n, eps, ch, envelope)
    if rate_pair is None:
        return report
    rb, rc = (float(r) for r in rate_pair)
    exponent = strong_converse_exponent(rb, rc, ch.d_b, ch.d_c, envelope, opts)
    return BoundReport(
        n=report.n,
        eps=report.eps,
        d_b=report.d_b,
        d_c=report.d_c,
        single_letter=report.single_letter,
        rb_bound=report.rb_bound,
        rc_bound=report.rc_bound,
        certified_lower=report.certified_lower,
        exponent=exponent,
        rate_pair=(rb, rc),
        error_lower_bound=None if exponent is None else error_lower_bound(n, exponent.f),
    )
