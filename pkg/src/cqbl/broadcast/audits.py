"""Desk-scale numerical audits of the converse bounds on explicit codes."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import AuditSettings
from ..core.errors import PreconditionError, SizeLimitError
from ..core.workers import WorkerPool, spawn_generators
from ..quantum.entropic import operator_entropy, shannon_entropy
from ..quantum.operators import DensityMatrix, HermitianOperator, InequalityCheck, tensor_all
from .channel import CqBroadcastChannel
from .codes import (
    BroadcastCode,
    DecoderPair,
    code_ensemble,
    code_mutual_info,
    code_mutual_info_c,
    error_stats,
    geometric_error,
    local_search_decoder,
    local_search_decoders,
    pgm_decoder,
    pgm_decoders,
    success_tables,
)
from .converse import fano_bound, strong_converse_exponent
from .region import RegionEnvelope

logger = logging.getLogger(__name__)

FANO_DECODERS = ("pgm", "local")


def _point_to_point(states: Sequence[DensityMatrix]) -> CqBroadcastChannel:
    """x ↦ ρ_B^x viewed as a broadcast channel with a trivial second receiver."""
    return CqBroadcastChannel(
        alphabet=tuple(str(x) for x in range(len(states))),
        states=tuple(DensityMatrix(s.entries) for s in states),
        d_b=states[0].dim,
        d_c=1,
    )


@dataclass(frozen=True)
class FanoRecord:
    codewords: List
    decoder: str
    epsilon: float
    lhs: float
    rhs: float
    slack: float


@dataclass
class FanoAuditReport:
    n: int
    m_size: int
    k_size: int
    exhaustive: bool
    checked: int = 0
    skipped: int = 0
    min_slack: float = float("inf")
    violations: List[FanoRecord] = field(default_factory=list)
    records: List[FanoRecord] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self, include_records: bool = False) -> Dict:
        data = {
            "n": self.n,
            "m_size": self.m_size,
            "k_size": self.k_size,
            "exhaustive": self.exhaustive,
            "checked": self.checked,
            "skipped": self.skipped,
            "min_slack": self.min_slack,
            "violations": [asdict(v) for v in self.violations],
        }
        if include_records:
            data["records"] = [asdict(r) for r in self.records]
        return data


def _fano_records(
    channel: CqBroadcastChannel,
    code: BroadcastCode,
    decoders: Sequence[str],
    opts: AuditSettings,
    rng: np.random.Generator,
) -> List[Optional[FanoRecord]]:
    ens = code_ensemble(channel, code, "B", opts)
    info = code_mutual_info(ens, "M", opts)
    probs, states = ens.grouped("M")
    lhs = float(np.log(code.m_size))
    records = []
    for name in decoders:
        if name == "pgm":
            pi = pgm_decoder(states, probs)
        else:
            pi = local_search_decoder(states, probs, "geometric", opts.decoder_steps, rng)
        eps = geometric_error(ens, pi)
        if eps is None:
            records.append(None)
            continue
        rhs = info if eps <= 0 else fano_bound(code.n, eps, channel.d_b, info)
        records.append(
            FanoRecord(
                codewords=code.codewords.tolist(),
                decoder=name,
                epsilon=eps,
                lhs=lhs,
                rhs=rhs,
                slack=rhs - lhs,
            )
        )
    return records


def fano_audit(
    states: Sequence[DensityMatrix],
    n: int,
    m_size: int,
    k_size: int,
    decoders: Sequence[str] = FANO_DECODERS,
    q: Optional[Sequence[float]] = None,
    opts: Optional[AuditSettings] = None,
    seed: int = 0,
    threads: int = 1,
) -> FanoAuditReport:
    """ln|M| ≤ fano_bound(n, ε, d_B, I(M;B^n)) over codeword tables.

    ε is one minus the geometric mean of the per-codeword successes
    Tr[ρ^{x(m,k)} Π^m], weighted by q(k)/|M|. Tables are
    enumerated exhaustively when |X|^{n·|M|·|K|} ≤ ``opts.table_limit`` and
    sampled with a fixed seed otherwise. Decoders with a zero success
    probability (ε = 1) are counted as skipped.
    """
    opts = opts or AuditSettings()
    unknown = set(decoders) - set(FANO_DECODERS)
    if unknown:
        raise PreconditionError(f"Unknown decoders {sorted(unknown)}; expected {FANO_DECODERS}")
    channel = _point_to_point(states)
    if channel.d_b ** n > opts.dense_limit or n > opts.max_blocklength:
        raise SizeLimitError(f"Blocklength {n} is too large for dense audits at d_B = {channel.d_b}")

    total = channel.size ** (n * m_size * k_size)
    exhaustive = total <= opts.table_limit
    seeds = spawn_generators(seed, 2)
    if exhaustive:
        indices = range(total)
    else:
        indices = seeds[0].choice(total, size=opts.table_limit, replace=False) if total < 2 ** 62 else None
    if indices is None:
        codes = [BroadcastCode.random(channel.size, n, m_size, k_size, seeds[0]) for _ in range(opts.table_limit)]
        codes = [BroadcastCode(c.codewords, q) for c in codes]
    else:
        codes = [BroadcastCode.from_index(int(i), channel.size, n, m_size, k_size, q) for i in indices]

    generators = spawn_generators(seed + 1, len(codes))
    results = WorkerPool(threads).map_ordered(
        lambda job: _fano_records(channel, job[0], decoders, opts, job[1]), zip(codes, generators)
    )

    report = FanoAuditReport(n=n, m_size=m_size, k_size=k_size, exhaustive=exhaustive)
    for records in results:
        for record in records:
            if record is None:
                report.skipped += 1
                continue
            report.checked += 1
            report.records.append(record)
            report.min_slack = min(report.min_slack, record.slack)
            if record.slack < -opts.slack_tol:
                report.violations.append(record)
    logger.info(
        f"Fano audit n={n}, |M|={m_size}, |K|={k_size}: {report.checked} checks, "
        f"{len(report.violations)} violations, min slack {report.min_slack:.3e}"
    )
    return report


@dataclass(frozen=True)
class SingleLetterReport:
    """I(M;B^n) ≤ n·sup I(X;B|U) and I(K;C^n) ≤ n·sup I(U;C)."""
    b_check: InequalityCheck
    c_check: InequalityCheck
    tol: float
    decoder_success: Optional[float] = None

    @property
    def holds(self) -> bool:
        return self.b_check.holds(self.tol) and self.c_check.holds(self.tol)

    def to_dict(self) -> Dict:
        return {
            "i_m_bn": self.b_check.lhs,
            "n_sup_i_xb_u": self.b_check.rhs,
            "i_k_cn": self.c_check.lhs,
            "n_sup_i_uc": self.c_check.rhs,
            "tol": self.tol,
            "holds": self.holds,
            "decoder_success": self.decoder_success,
        }


def single_letter_audit(
    ch: CqBroadcastChannel,
    code: BroadcastCode,
    envelope: RegionEnvelope,
    dec: Optional[DecoderPair] = None,
    opts: Optional[AuditSettings] = None,
) -> SingleLetterReport:
    """Compare the code's mutual informations with n times the envelope suprema.

    The tolerance is the region optimizer tolerance, since the suprema are
    witnessed lower bounds. A decoder, when given, only adds its joint
    success 1 − p_max to the report.
    """
    opts = opts or AuditSettings()
    n = code.n
    i_mb = code_mutual_info(code_ensemble(ch, code, "B", opts), "M", opts)
    i_kc = code_mutual_info_c(ch, code, opts)
    success = None if dec is None else 1.0 - error_stats(ch, code, dec).p_max
    return SingleLetterReport(
        b_check=InequalityCheck(i_mb, n * envelope.sup_i_xb_u, "<="),
        c_check=InequalityCheck(i_kc, n * envelope.sup_i_uc, "<="),
        tol=envelope.pool.opts.optimizer_tol,
        decoder_success=success,
    )


def _cq_entropy(groups: Dict) -> float:
    """S of a state block-diagonal in a classical label: H(p) + Σ p S(ρ_label)."""
    probs, entropy = [], 0.0
    for weight, mixture in groups.values():
        if weight <= 0:
            continue
        probs.append(weight)
        entropy += weight * operator_entropy(HermitianOperator(mixture / weight))
    return shannon_entropy(probs) + entropy


def _grouped_entropy(blocks, key_fn, state_fn) -> float:
    groups: Dict = {}
    for block in blocks:
        key = key_fn(block)
        state = state_fn(block)
        weight, mixture = groups.get(key, (0.0, np.zeros_like(state)))
        groups[key] = (weight + block["w"], mixture + block["w"] * state)
    return _cq_entropy(groups)


@dataclass(frozen=True)
class ChainRuleReport:
    """Term-by-term single-letterization with U_i = (K, B^{i−1})."""
    checks: Tuple[Tuple[str, InequalityCheck], ...]
    b_terms: Tuple[float, ...]
    c_terms: Tuple[float, ...]
    tol: float

    @property
    def holds(self) -> bool:
        return all(check.holds(self.tol) for _, check in self.checks)

    def to_dict(self) -> Dict:
        return {
            "holds": self.holds,
            "b_terms": list(self.b_terms),
            "c_terms": list(self.c_terms),
            "checks": [
                {"name": name, "lhs": c.lhs, "rhs": c.rhs, "direction": c.direction, "margin": c.margin}
                for name, c in self.checks
            ],
        }


def chain_rule_audit(
    ch: CqBroadcastChannel,
    code: BroadcastCode,
    envelope: RegionEnvelope,
    opts: Optional[AuditSettings] = None,
) -> ChainRuleReport:
    """Check the chain-rule steps of the single-letter upper bound for n ≤ 3.

    With U_i = (K, B^{i−1}):
    I(M;B^n) ≤ Σ_i I(X_i;B_i|U_i), I(K;C^n) ≤ Σ_i I(U_i;C_i), and each
    term is at most the corresponding envelope supremum.
    """
    opts = opts or AuditSettings()
    code.check(ch)
    n = code.n
    if n > 3:
        raise SizeLimitError(f"Chain-rule audit supports n ≤ 3, got {n}")
    weights = code.weights
    blocks = [
        {"m": m, "k": k, "w": float(weights[m, k]), "x": tuple(int(x) for x in code.codewords[m, k])}
        for m in range(code.m_size)
        for k in range(code.k_size)
    ]

    def prefix(block, i):
        if i == 0:
            return np.ones((1, 1), dtype=complex)
        return tensor_all(*(ch.b_states[x] for x in block["x"][:i])).entries

    def with_b(block, i):
        return np.kron(prefix(block, i), ch.b_states[block["x"][i]].entries)

    def with_c(block, i):
        return np.kron(prefix(block, i), ch.c_states[block["x"][i]].entries)

    b_terms, c_terms = [], []
    for i in range(n):
        by_k = lambda b: b["k"]
        by_kx = lambda b, i=i: (b["k"], b["x"][i])
        s_kx_prefix = _grouped_entropy(blocks, by_kx, lambda b, i=i: prefix(b, i))
        s_k_prefix_b = _grouped_entropy(blocks, by_k, lambda b, i=i: with_b(b, i))
        s_k_prefix = _grouped_entropy(blocks, by_k, lambda b, i=i: prefix(b, i))
        s_kx_prefix_b = _grouped_entropy(blocks, by_kx, lambda b, i=i: with_b(b, i))
        b_terms.append(s_kx_prefix + s_k_prefix_b - s_k_prefix - s_kx_prefix_b)

        s_c = _grouped_entropy(blocks, lambda b: 0, lambda b, i=i: ch.c_states[b["x"][i]].entries)
        s_k_prefix_c = _grouped_entropy(blocks, by_k, lambda b, i=i: with_c(b, i))
        c_terms.append(s_k_prefix + s_c - s_k_prefix_c)

    i_mb = code_mutual_info(code_ensemble(ch, code, "B", opts), "M", opts)
    i_kc = code_mutual_info_c(ch, code, opts)
    checks = [
        ("I(M;B^n) <= sum I(X_i;B_i|U_i)", InequalityCheck(i_mb, float(sum(b_terms)), "<=")),
        ("I(K;C^n) <= sum I(U_i;C_i)", InequalityCheck(i_kc, float(sum(c_terms)), "<=")),
    ]
    for i, (b_term, c_term) in enumerate(zip(b_terms, c_terms), start=1):
        checks.append((f"I(X_{i};B_{i}|U_{i}) <= sup I(X;B|U)", InequalityCheck(b_term, envelope.sup_i_xb_u, "<=")))
        checks.append((f"I(U_{i};C_{i}) <= sup I(U;C)", InequalityCheck(c_term, envelope.sup_i_uc, "<=")))
    return ChainRuleReport(
        checks=tuple(checks),
        b_terms=tuple(b_terms),
        c_terms=tuple(c_terms),
        tol=envelope.pool.opts.optimizer_tol,
    )


@dataclass(frozen=True)
class StrongConverseRow:
    n: int
    m_size: int
    k_size: int
    best_success: float
    exact: bool
    decoder: str
    bound: float
    holds: bool


@dataclass
class StrongConverseReport:
    rate_pair: Tuple[float, float]
    inside_region: bool
    exponent_f: Optional[float]
    rows: List[StrongConverseRow] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(row.holds for row in self.rows)

    def to_dict(self) -> Dict:
        return {
            "rate_pair": list(self.rate_pair),
            "inside_region": self.inside_region,
            "exponent_f": self.exponent_f,
            "holds": self.holds,
            "rows": [asdict(row) for row in self.rows],
        }


def _code_success(
    ch: CqBroadcastChannel,
    code: BroadcastCode,
    opts: AuditSettings,
    exact: bool,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[float, str]:
    """1 − p_max of the code and the decoder achieving it.

    Without ``exact`` the value is min over (m, k) of the receiver-wise
    minimum. PGM decoders are always tried; given an ``rng``, locally
    improved decoders (max-min objective) are tried as well and the better
    pair wins.
    """
    candidates = [("pgm", pgm_decoders(ch, code, opts))]
    if rng is not None:
        candidates.append(("local", local_search_decoders(ch, code, "min", opts.decoder_steps, rng, opts)))
    best, best_name = -1.0, "pgm"
    for name, dec in candidates:
        joint, b_side, c_side = success_tables(ch, code, dec, joint=exact, opts=opts)
        value = float(joint.min()) if exact else float(np.minimum(b_side, c_side).min())
        if value > best:
            best, best_name = value, name
    return best, best_name


def _search_codes(
    ch: CqBroadcastChannel,
    n: int,
    m_size: int,
    k_size: int,
    budget: int,
    opts: AuditSettings,
    rng: np.random.Generator,
) -> Tuple[float, bool, str]:
    exact = (ch.d_b * ch.d_c) ** n <= opts.dense_limit
    random_budget = max(1, budget // 2)
    best_code, best = None, -1.0
    for _ in range(random_budget):
        code = BroadcastCode.random(ch.size, n, m_size, k_size, rng)
        value, _ = _code_success(ch, code, opts, exact=False)
        if value > best:
            best_code, best = code, value
    for _ in range(budget - random_budget):
        m, k, i = rng.integers(m_size), rng.integers(k_size), rng.integers(n)
        word = best_code.codewords[m, k].copy()
        word[i] = rng.integers(ch.size)
        trial = best_code.with_codeword(m, k, word)
        value, _ = _code_success(ch, trial, opts, exact=False)
        if value > best:
            best_code, best = trial, value
    best, decoder = _code_success(ch, best_code, opts, exact=exact, rng=rng)
    return best, exact, decoder


def strong_converse_audit(
    ch: CqBroadcastChannel,
    rb: float,
    rc: float,
    n_list: Sequence[int],
    envelope: RegionEnvelope,
    search_budget: Optional[int] = None,
    opts: Optional[AuditSettings] = None,
    seed: int = 0,
    threads: int = 1,
) -> StrongConverseReport:
    """Best-found success 1 − p_max against e^{−nf} for a rate pair outside the region.

    For each n the code has |M| = ⌈e^{n·rb}⌉ and |K| = ⌈e^{n·rc}⌉. Codes
    are searched by random sampling followed by single-symbol local moves,
    decoded with PGMs. The best code is then re-decoded with both PGMs and
    locally improved decoders, and the better pair is kept. When the joint
    output is too large to contract, the reported success is min over
    (m, k) of the receiver-wise successes, which upper-bounds the joint
    success.
    """
    opts = opts or AuditSettings()
    budget = opts.search_budget if search_budget is None else search_budget
    exponent = strong_converse_exponent(rb, rc, ch.d_b, ch.d_c, envelope)
    report = StrongConverseReport(
        rate_pair=(float(rb), float(rc)),
        inside_region=exponent is None,
        exponent_f=None if exponent is None else exponent.f,
    )
    if exponent is None:
        logger.warning(f"Rate pair ({rb:.6g}, {rc:.6g}) is inside the region; nothing to audit")
        return report

    jobs = []
    for n in n_list:
        if n > opts.max_blocklength or max(ch.d_b, ch.d_c) ** n > opts.dense_limit:
            logger.warning(f"Skipping n={n}: beyond dense limits")
            continue
        m_size = max(1, int(np.ceil(np.exp(n * rb) - 1e-9)))
        k_size = max(1, int(np.ceil(np.exp(n * rc) - 1e-9)))
        jobs.append((int(n), m_size, k_size))

    generators = spawn_generators(seed, len(jobs))
    results = WorkerPool(threads).map_ordered(
        lambda job: _search_codes(ch, job[0][0], job[0][1], job[0][2], budget, opts, job[1]),
        zip(jobs, generators),
    )
    for (n, m_size, k_size), (best, exact, decoder) in zip(jobs, results):
        bound = float(np.exp(-n * exponent.f))
        report.rows.append(
            StrongConverseRow(
                n=n,
                m_size=m_size,
                k_size=k_size,
                best_success=best,
                exact=exact,
                decoder=decoder,
                bound=bound,
                holds=best <= bound + opts.slack_tol,
            )
        )
        logger.info(f"n={n}: best success {best:.6g} vs bound {bound:.6g}")
    return report
