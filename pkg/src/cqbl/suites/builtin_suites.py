"""Built-in verification suites."""

from typing import Dict, List, Optional, Tuple, Type

import numpy as np

from ..broadcast.audits import chain_rule_audit, fano_audit, single_letter_audit, strong_converse_audit
from ..broadcast.catalog import bsc_broadcast, bsc_region_oracle, noiseless_bit, qubit_pure_dbc, useless_channel
from ..broadcast.codes import BroadcastCode, DecoderPair, error_stats, pgm_decoders, random_projective_decoder
from ..broadcast.converse import (
    compare_fano_bounds,
    error_lower_bound,
    exponent_f,
    fano_bound,
    fano_pre_optimized,
    optimal_t,
    quadratic_residual,
)
from ..broadcast.region import compute_envelope, default_mu_grid
from ..core.errors import PreconditionError
from ..core.workers import WorkerPool, spawn_generators
from ..quantum.entropic import (
    classical_relative_entropy,
    classical_renyi_divergence,
    classical_renyi_q,
    measured_renyi,
    rel_entropy,
    renyi_rel_entropy,
    variational_Q,
)
from ..quantum.operators import HermitianOperator, alt_check, apply_channel
from ..quantum.random_ensembles import random_channel, random_commuting_pair, random_density_matrix, random_psd
from ..quantum.semigroup import ProductGqds, identity_growth_check, positivity_gap_check, rhc_check, rhc_threshold
from .base_suite import SuiteInfo, SuiteResult, VerificationSuite, replay_operator

ALT_DIMS = (2, 3, 4, 6)
ALT_ORDERS = tuple(round(0.1 * i, 1) for i in range(1, 10))
RHC_ORDERS = ((-0.9, -0.5), (-0.5, 0.5), (0.2, 0.8), (-2.0, -1.0), (0.5, 0.9), (-1.0, 0.3))
FANO_CONFIGS = ((1, 1, 2), (1, 2, 1), (1, 2, 2), (2, 2, 1), (2, 2, 2))


class AltSuite(VerificationSuite):
    """Araki-Lieb-Thirring trace inequality on random positive pairs."""

    def get_suite_info(self) -> SuiteInfo:
        return SuiteInfo(
            name="alt",
            description="Tr[B^{r/2} A^r B^{r/2}] ≤ Tr[(B^{1/2} A B^{1/2})^r], equality for commuting pairs",
            category="Operator inequalities",
            keywords=["araki", "lieb", "thirring", "trace"],
            claim="Araki-Lieb-Thirring for r ∈ [0, 1]",
        )

    def _trial(self, job):
        index, rng, commuting = job
        d = int(rng.choice(ALT_DIMS))
        r = float(ALT_ORDERS[rng.integers(len(ALT_ORDERS))])
        if commuting:
            a, b, _, _ = random_commuting_pair(d, rng)
        else:
            a, b = random_density_matrix(d, rng), random_density_matrix(d, rng)
        check = alt_check(a, b, r)
        failed = abs(check.lhs - check.rhs) > 1e-9 if commuting else not check.holds(1e-9)
        if not failed:
            return None
        return {
            "kind": "equality" if commuting else "inequality",
            "index": index,
            "r": r,
            "lhs": check.lhs,
            "rhs": check.rhs,
            "a": replay_operator(a),
            "b": replay_operator(b),
        }

    def run(self, trials: int, seed: int) -> SuiteResult:
        commuting = max(1, trials // 10)
        generators = spawn_generators(seed, trials + commuting)
        jobs = [(i, generators[i], i >= trials) for i in range(trials + commuting)]
        results = WorkerPool(self.settings.runtime.threads).map_ordered(self._trial, jobs)
        violations = [v for v in results if v is not None]
        return self.finish(len(jobs), violations, {"random": trials, "commuting": commuting})


class RhcSuite(VerificationSuite):
    """Reverse hypercontractivity of tensorized depolarizing semigroups."""

    def get_suite_info(self) -> SuiteInfo:
        return SuiteInfo(
            name="rhc",
            description="‖Φ_t(G)‖_{p,σ} ≥ ‖G‖_{q,σ} for p ≤ q < 1 and t ≥ ln((p−1)/(q−1))",
            category="Semigroups",
            keywords=["hypercontractivity", "semigroup", "depolarizing", "norm"],
            claim="Tensorized reverse hypercontractivity",
        )

    def _trial(self, job):
        index, rng = job
        n = int(rng.integers(1, 4))
        dims = [int(rng.choice((2, 3))) for _ in range(n)]
        states = [random_density_matrix(d, rng, mix=0.1) for d in dims]
        pg = ProductGqds.from_states(states)
        total = int(np.prod(dims))
        g = random_psd(total, rng, shift=0.05)
        g = HermitianOperator(g.entries / g.trace())
        p, q = RHC_ORDERS[rng.integers(len(RHC_ORDERS))]
        threshold = rhc_threshold(p, q)
        found, checked, rejected = [], 0, 0
        for t in (threshold, threshold + 0.5):
            check = rhc_check(pg, g, p, q, t)
            checked += 1
            if not check.holds(1e-8):
                found.append({"kind": "rhc", "index": index, "p": p, "q": q, "t": t, "dims": dims,
                              "lhs": check.lhs, "rhs": check.rhs, "g": replay_operator(g),
                              "states": [replay_operator(s) for s in states]})
            gap = positivity_gap_check(pg, t, g)
            checked += 1
            if gap < -1e-10:
                found.append({"kind": "positivity", "index": index, "t": t, "gap": gap, "dims": dims})
            growth = identity_growth_check(t, max(dims), n)
            checked += 1
            if not growth.holds(1e-12):
                found.append({"kind": "identity-growth", "index": index, "t": t, "d": max(dims), "n": n})
        try:
            rhc_check(pg, g, p, q, threshold - 0.1)
            found.append({"kind": "precondition", "index": index, "p": p, "q": q, "t": threshold - 0.1})
        except PreconditionError:
            rejected += 1
        return checked, rejected, found

    def run(self, trials: int, seed: int) -> SuiteResult:
        jobs = list(enumerate(spawn_generators(seed, trials)))
        results = WorkerPool(self.settings.runtime.threads).map_ordered(self._trial, jobs)
        checked = sum(r[0] for r in results)
        rejected = sum(r[1] for r in results)
        violations = [v for r in results for v in r[2]]
        return self.finish(checked, violations, {"below_threshold_rejected": rejected})


class DpiSuite(VerificationSuite):
    """Divergence oracles on commuting pairs, measured ≤ Petz and data processing."""

    def get_suite_info(self) -> SuiteInfo:
        return SuiteInfo(
            name="dpi",
            description="Classical oracles for D, D_α, D^P_α and variational Q; D^P_α ≤ D_α; DPI under CPTP maps",
            category="Divergences",
            keywords=["relative entropy", "renyi", "measured", "data processing"],
            claim="Divergence definitions and monotonicity",
        )

    def _commuting(self, job):
        index, rng = job
        opts = self.settings.optimizer
        d = int(rng.integers(2, 5))
        rho, sigma, p, q = random_commuting_pair(d, rng, floor=0.02)
        alpha = float(rng.uniform(0.1, 0.9))
        order = float(rng.uniform(0.05, 0.45))
        values = {
            "relative_entropy": (rel_entropy(rho, sigma), classical_relative_entropy(p, q), 1e-6),
            "petz": (renyi_rel_entropy(rho, sigma, alpha), classical_renyi_divergence(p, q, alpha), 1e-6),
            "measured": (measured_renyi(rho, sigma, alpha, opts, rng).value, classical_renyi_divergence(p, q, alpha), 1e-4),
            "variational": (variational_Q(rho, sigma, order, opts, rng), classical_renyi_q(p, q, order), 1e-4),
        }
        found = []
        for name, (value, oracle, tol) in values.items():
            if abs(value - oracle) > tol:
                found.append({"kind": f"oracle-{name}", "index": index, "value": value, "oracle": oracle,
                              "alpha": alpha, "order": order, "rho": replay_operator(rho), "sigma": replay_operator(sigma)})
        return len(values), found

    def _general(self, job):
        index, rng = job
        d = int(rng.integers(2, 5))
        rho = random_density_matrix(d, rng, mix=0.05)
        sigma = random_density_matrix(d, rng, mix=0.05)
        alpha = float(rng.uniform(0.1, 0.9))
        found = []
        measured = measured_renyi(rho, sigma, alpha, self.settings.optimizer, rng).value
        petz = renyi_rel_entropy(rho, sigma, alpha)
        if measured > petz + 1e-8:
            found.append({"kind": "measured-above-petz", "index": index, "alpha": alpha, "measured": measured,
                          "petz": petz, "rho": replay_operator(rho), "sigma": replay_operator(sigma)})
        channel = random_channel(d, int(rng.integers(2, 5)), rng)
        out_rho, out_sigma = apply_channel(channel, rho), apply_channel(channel, sigma)
        for name, before, after in (
            ("relative-entropy", rel_entropy(rho, sigma), rel_entropy(out_rho, out_sigma)),
            ("petz", petz, renyi_rel_entropy(out_rho, out_sigma, alpha)),
        ):
            if after > before + 1e-8:
                found.append({"kind": f"dpi-{name}", "index": index, "before": before, "after": after,
                              "rho": replay_operator(rho), "sigma": replay_operator(sigma)})
        return 3, found

    def run(self, trials: int, seed: int) -> SuiteResult:
        oracle_count = max(1, trials // 5)
        generators = spawn_generators(seed, oracle_count + trials)
        pool = WorkerPool(self.settings.runtime.threads)
        commuting = pool.map_ordered(self._commuting, list(enumerate(generators[:oracle_count])))
        general = pool.map_ordered(self._general, list(enumerate(generators[oracle_count:])))
        checked = sum(r[0] for r in commuting + general)
        violations = [v for r in commuting + general for v in r[1]]
        return self.finish(checked, violations, {"oracle_pairs": oracle_count, "general_pairs": trials})


class FanoSuite(VerificationSuite):
    """Exhaustive Fano-type audit on the binary pure-state channel."""

    def get_suite_info(self) -> SuiteInfo:
        return SuiteInfo(
            name="fano",
            description="ln|M| ≤ I(M;B^n) + 2√(n d ln(1/(1−ε))) + ln(1/(1−ε)) on every codeword table",
            category="Converse audits",
            keywords=["fano", "second order", "codes", "pgm"],
            claim="Second-order Fano-type inequality",
        )

    def run(self, trials: int, seed: int) -> SuiteResult:
        states = qubit_pure_dbc().channel.b_states
        checked, violations, data = 0, [], {"audits": []}
        for n, m_size, k_size in FANO_CONFIGS:
            report = fano_audit(states, n, m_size, k_size, opts=self.settings.audit, seed=seed,
                                threads=self.settings.runtime.threads)
            checked += report.checked
            violations.extend({"kind": "fano", **v} for v in report.to_dict()["violations"])
            data["audits"].append({
                "n": n, "m_size": m_size, "k_size": k_size, "checked": report.checked,
                "skipped": report.skipped, "exhaustive": report.exhaustive,
                "min_slack": self.rounded(report.min_slack),
            })

        # t* substituted into the pre-optimized bound reproduces the closed form
        for n in (1, 4, 25):
            for eps in (0.01, 0.3, 0.9):
                for d in (2, 3):
                    t = optimal_t(eps, d, n)
                    gap = abs(fano_pre_optimized(t, n, d, eps, 0.0) - fano_bound(n, eps, d, 0.0))
                    checked += 1
                    if gap > 1e-10:
                        violations.append({"kind": "optimal-t", "n": n, "eps": eps, "d": d, "gap": gap})
        data["comparison"] = [
            {"n": row.n, "second_order": self.rounded(row.second_order_rate), "classical": self.rounded(row.classical_rate)}
            for row in compare_fano_bounds((1, 10, 100, 1000, 10000), 0.5, 2, 0.3)
        ]
        return self.finish(checked, violations, data)


class RegionSuite(VerificationSuite):
    """Boundary oracles, dual monotonicity and concavity on catalog channels."""

    def get_suite_info(self) -> SuiteInfo:
        return SuiteInfo(
            name="region",
            description="F(t) against classical oracles; v(μ) monotone and convex; concavity audit",
            category="Regions",
            keywords=["region", "boundary", "lagrangian", "concavity"],
            claim="Entropic region boundary and its concavity",
        )

    def _envelope(self, entry, seed, t_grid=None):
        return compute_envelope(
            entry.channel,
            t_grid=t_grid,
            mu_grid=default_mu_grid(self.settings.converse.mu_min, self.settings.converse.mu_max,
                                    self.settings.converse.mu_points),
            opts=self.settings.region,
            seed=seed,
            threads=self.settings.runtime.threads,
        )

    def _structural(self, name, env) -> Tuple[int, List[Dict]]:
        checked, found = 0, []
        report = env.concavity()
        checked += 1
        if not report.concave:
            found.append({"kind": "concavity", "channel": name, "violations": [list(v) for v in report.violations]})
        values = [p.f_value for p in env.points]
        checked += 1
        if any(b > a + 1e-12 for a, b in zip(values, values[1:])):
            found.append({"kind": "f-monotone", "channel": name})
        mus = [p.mu for p in env.lagrangian]
        duals = [p.value for p in env.lagrangian]
        checked += 1
        if any(b < a - 1e-12 for a, b in zip(duals, duals[1:])):
            found.append({"kind": "dual-monotone", "channel": name})
        checked += 1
        for (m0, v0), (m1, v1), (m2, v2) in zip(zip(mus, duals), zip(mus[1:], duals[1:]), zip(mus[2:], duals[2:])):
            lam = (m2 - m1) / (m2 - m0)
            if v1 > lam * v0 + (1 - lam) * v2 + 1e-9:
                found.append({"kind": "dual-convex", "channel": name, "mu": m1})
                break
        for point in env.points:
            checked += 1
            i_ub = point.witness.i_ub()
            if point.i_uc > i_ub + 1e-9:
                found.append({"kind": "degraded-order", "channel": name, "t": point.t, "i_uc": point.i_uc, "i_ub": i_ub})
        for candidate in env.pool.candidates[:20]:
            checked += 1
            i_xb, i_uc = candidate.witness(env.channel).objectives()
            if abs(i_xb - candidate.i_xb_u) > 1e-9 or abs(i_uc - candidate.i_uc) > 1e-9:
                found.append({"kind": "witness-values", "channel": name, "claimed": [candidate.i_xb_u, candidate.i_uc],
                              "recomputed": [i_xb, i_uc]})
        return checked, found

    def run(self, trials: int, seed: int) -> SuiteResult:
        checked, violations, data = 0, [], {}

        bit = noiseless_bit()
        t_grid = np.linspace(0.0, np.log(2.0), 17)
        env = self._envelope(bit, seed, t_grid)
        worst = max(abs(p.f_value - (np.log(2.0) - p.t)) for p in env.points)
        checked += len(env.points)
        if worst > 2e-3:
            violations.append({"kind": "noiseless-oracle", "worst": worst})
        extra = self._structural(bit.name, env)
        checked += extra[0]
        violations.extend(extra[1])
        data["noiseless_bit_worst"] = self.rounded(worst)

        bsc = bsc_broadcast(0.1, 0.1)
        env = self._envelope(bsc, seed)
        rb, rc = bsc_region_oracle(0.1, 0.1, np.linspace(0.0, 0.5, 2001))
        worst = 0.0
        for p in env.points:
            oracle = float(np.interp(p.t, rc[::-1], rb[::-1]))
            worst = max(worst, abs(p.f_value - oracle))
            checked += 1
        if worst > 5e-3:
            violations.append({"kind": "bsc-oracle", "worst": worst})
        extra = self._structural(bsc.name, env)
        checked += extra[0]
        violations.extend(extra[1])
        data["bsc_worst"] = self.rounded(worst)

        env = self._envelope(useless_channel(), seed)
        checked += 1
        if abs(env.sup_i_xb_u) > 1e-9 or abs(env.sup_i_uc) > 1e-9:
            violations.append({"kind": "useless", "sup_i_xb_u": env.sup_i_xb_u, "sup_i_uc": env.sup_i_uc})
        return self.finish(checked, violations, data)


class ConverseSuite(VerificationSuite):
    """Exponent arithmetic, code-level converse audits and error-criterion ordering."""

    def get_suite_info(self) -> SuiteInfo:
        return SuiteInfo(
            name="converse",
            description="Strong converse exponent, single-letterization and criterion ordering on explicit codes",
            category="Converse audits",
            keywords=["strong converse", "exponent", "single letter", "codes"],
            claim="Exponential strong converse and single-letter upper bound",
        )

    def run(self, trials: int, seed: int) -> SuiteResult:
        checked, violations, data = 0, [], {}
        audit = self.settings.audit

        reference = (3.0 - 2.0 * np.sqrt(2.0)) ** 2
        checked += 1
        if abs(exponent_f(1.0, 2, 2) - reference) > 1e-12:
            violations.append({"kind": "exponent-reference", "value": exponent_f(1.0, 2, 2)})
        etas = np.linspace(0.0, 5.0, 50)
        fs = [exponent_f(eta, 2, 2) for eta in etas]
        checked += 1
        if any(b <= a for a, b in zip(fs, fs[1:])):
            violations.append({"kind": "exponent-monotone"})
        for n in (1, 5, 50):
            for mu, gamma in ((0.0, 0.2), (1.5, 0.7)):
                f = exponent_f(gamma / (1.0 + mu), 2, 2)
                eps = error_lower_bound(n, f)
                residual = quadratic_residual(n, eps, mu, gamma, 2, 2)
                checked += 1
                if abs(residual) > 1e-8 * n:
                    violations.append({"kind": "quadratic-residual", "n": n, "mu": mu, "gamma": gamma, "residual": residual})

        entry = qubit_pure_dbc()
        ch = entry.channel
        env = compute_envelope(
            ch,
            mu_grid=default_mu_grid(self.settings.converse.mu_min, self.settings.converse.mu_max,
                                    self.settings.converse.mu_points),
            opts=self.settings.region,
            seed=seed,
            threads=self.settings.runtime.threads,
        )

        generators = spawn_generators(seed, trials + 1)
        for index, rng in enumerate(generators[:trials]):
            code = BroadcastCode.random(ch.size, 2, 2, 2, rng)
            report = single_letter_audit(ch, code, env, opts=audit)
            checked += 1
            if not report.holds:
                violations.append({"kind": "single-letter", "index": index, "codewords": code.codewords.tolist(),
                                   **report.to_dict()})
            if index < 10:
                chain = chain_rule_audit(ch, code, env, audit)
                checked += 1
                if not chain.holds:
                    violations.append({"kind": "chain-rule", "index": index, "codewords": code.codewords.tolist(),
                                       **chain.to_dict()})
            for dec in (pgm_decoders(ch, code, audit), DecoderPair(
                pi_b=random_projective_decoder(ch.d_b ** 2, 2, rng),
                pi_c=random_projective_decoder(ch.d_c ** 2, 2, rng),
            )):
                stats = error_stats(ch, code, dec)
                checked += 1
                if not stats.ordering_holds(1e-12):
                    violations.append({"kind": "criterion-ordering", "index": index,
                                       "codewords": code.codewords.tolist()})

        rb = float(np.log(ch.d_b)) + 0.3
        strong = strong_converse_audit(ch, rb, 0.0, range(1, 6), env, opts=audit, seed=seed,
                                       threads=self.settings.runtime.threads)
        for row in strong.rows:
            checked += 1
            if not row.holds:
                violations.append({"kind": "strong-converse", "n": row.n, "success": row.best_success, "bound": row.bound})
        data["strong_converse"] = [
            {"n": r.n, "best_success": self.rounded(r.best_success), "bound": self.rounded(r.bound)} for r in strong.rows
        ]
        data["exponent_f"] = None if strong.exponent_f is None else self.rounded(strong.exponent_f)
        return self.finish(checked, violations, data)


class BuiltinSuites:
    """Container for built-in suites."""

    def __init__(self):
        self.suites = {
            "alt": AltSuite,
            "rhc": RhcSuite,
            "dpi": DpiSuite,
            "fano": FanoSuite,
            "region": RegionSuite,
            "converse": ConverseSuite,
        }

    def get_suite_classes(self) -> Dict[str, Type[VerificationSuite]]:
        """Get all built-in suite classes."""
        return self.suites.copy()

    def get_suite_names(self) -> list:
        return list(self.suites.keys())

    def get_suite_class(self, name: str) -> Optional[Type[VerificationSuite]]:
        return self.suites.get(name)
