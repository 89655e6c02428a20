"""Command implementations; each returns a process exit code."""

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, Optional, TextIO

import numpy as np

from ..broadcast.audits import chain_rule_audit, fano_audit, single_letter_audit, strong_converse_audit
from ..broadcast.capacity import holevo_capacity
from ..broadcast.codes import BroadcastCode
from ..broadcast.converse import bound_report, common_rate_remap, second_order_region
from ..broadcast.degrading import check_degraded
from ..broadcast.region import RegionEnvelope, compute_envelope, default_mu_grid
from ..config.config_manager import ConfigManager
from ..config.settings import Settings
from ..core.errors import CqblError, PreconditionError, SpecParseError
from ..core.workers import spawn_generators
from ..suites import SuiteManager
from .channel_spec import ChannelSpec, load_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CSV_HEADER = ["t", "F_t", "certified", "i_xb_u", "i_uc"]


@dataclass
class CommandContext:
    settings: Settings
    bits: bool = False
    stdout: TextIO = field(default_factory=lambda: sys.stdout)
    config_manager: Optional[ConfigManager] = None

    @property
    def scale(self) -> float:
        """Displayed value per nat."""
        return 1.0 / np.log(2.0) if self.bits else 1.0

    @property
    def units(self) -> str:
        return "bits" if self.bits else "nats"

    def to_nats(self, value: Optional[float]) -> Optional[float]:
        return None if value is None else float(value) / self.scale

    def show(self, value: Optional[float]) -> Optional[float]:
        return None if value is None else float(value) * self.scale

    def seed(self, args: argparse.Namespace) -> int:
        return self.settings.runtime.seed if getattr(args, "seed", None) is None else args.seed

    @property
    def threads(self) -> int:
        return self.settings.runtime.threads


def fmt(value: float) -> str:
    """12 significant digits, locale independent."""
    return f"{value:.12g}"


@contextmanager
def output_stream(ctx: CommandContext, path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield ctx.stdout
        return
    with open(path, "w", newline="") as f:
        yield f
    logger.info(f"Output written to {path}")


def write_json(ctx: CommandContext, path: Optional[str], data: Any):
    with output_stream(ctx, path) as out:
        json.dump(data, out, indent=2, sort_keys=True)
        out.write("\n")


def _envelope(ctx: CommandContext, spec: ChannelSpec, seed: int, t_grid=None) -> RegionEnvelope:
    converse = ctx.settings.converse
    return compute_envelope(
        spec.channel,
        t_grid=t_grid,
        mu_grid=default_mu_grid(converse.mu_min, converse.mu_max, converse.mu_points),
        opts=ctx.settings.region,
        seed=seed,
        threads=ctx.threads,
    )


def _require_degraded(ctx: CommandContext, spec: ChannelSpec) -> bool:
    """A declared map was validated at parse time; otherwise search for one."""
    if spec.degrading_map is not None:
        return True
    result = check_degraded(spec.channel, opts=ctx.settings.region)
    if not result.degraded:
        logger.error(
            f"Channel is not degraded within {ctx.settings.region.degraded_tol:g} "
            f"(best residual {result.residual:.3e}); the single-letter region does not apply"
        )
    return result.degraded


def cmd_check_degraded(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = load_spec(args.spec)
    tol = ctx.settings.region.degraded_tol if args.tol is None else args.tol
    result = check_degraded(spec.channel, tol=tol, opts=ctx.settings.region)
    write_json(ctx, None, {
        "degraded": result.degraded,
        "residual": result.residual,
        "kraus_rank": result.kraus_rank,
        "iterations": result.iterations,
        "tol": tol,
    })
    return EXIT_OK if result.degraded else EXIT_FAILED


def cmd_region(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = load_spec(args.spec)
    if not _require_degraded(ctx, spec):
        return EXIT_FAILED
    if args.quantum_u:
        ctx.settings.region.quantum_u = True
    if args.t_grid is not None:
        t_grid = [ctx.to_nats(t) for t in args.t_grid]
    else:
        if args.t_points < 2:
            raise PreconditionError(f"--t-points must be at least 2, got {args.t_points}")
        t_grid = np.linspace(0.0, holevo_capacity(spec.channel.c_states).value, args.t_points)
    env = _envelope(ctx, spec, ctx.seed(args), t_grid)
    report = env.concavity()

    with output_stream(ctx, args.out) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in env.points:
            writer.writerow([
                fmt(ctx.show(p.t)),
                fmt(ctx.show(p.f_value)),
                "true" if p.certified_lower else "false",
                fmt(ctx.show(p.i_xb_u)),
                fmt(ctx.show(p.i_uc)),
            ])
        verdict = "concave" if report.concave else "NOT concave"
        out.write(
            f"# concavity: {verdict} ({report.checked} triples, {len(report.violations)} violations, "
            f"worst deficit {fmt(ctx.show(report.worst_deficit))} {ctx.units})\n"
        )
        for t in env.skipped_t:
            out.write(f"# skipped infeasible t={fmt(ctx.show(t))}\n")
    return EXIT_OK


def cmd_bound(args: argparse.Namespace, ctx: CommandContext) -> int:
    if not 0.0 < args.eps < 1.0:
        logger.error(f"--eps must lie in (0, 1), got {args.eps}")
        return EXIT_USAGE
    if args.n < 1:
        logger.error(f"--n must be positive, got {args.n}")
        return EXIT_USAGE
    spec = load_spec(args.spec)
    if not _require_degraded(ctx, spec):
        return EXIT_FAILED
    env = _envelope(ctx, spec, ctx.seed(args))

    rate_pair = None
    if args.rate_rb is not None or args.rate_rc is not None:
        rb = ctx.to_nats(args.rate_rb or 0.0)
        rc = ctx.to_nats(args.rate_rc or 0.0)
        rate_pair = common_rate_remap(ctx.to_nats(args.common_rate), rb, rc)
    report = bound_report(args.n, args.eps, spec.channel, env, rate_pair, ctx.settings.converse)

    data = report.to_dict()
    data["single_letter"] = [ctx.show(v) for v in report.single_letter]
    data["rb_bound"] = ctx.show(report.rb_bound)
    data["rc_bound"] = ctx.show(report.rc_bound)
    if report.rate_pair is not None:
        data["rate_pair"] = [ctx.show(v) for v in report.rate_pair]
    if report.exponent is not None:
        for key in ("gamma", "eta", "f"):
            data["exponent"][key] = ctx.show(getattr(report.exponent, key))
    data["units"] = ctx.units
    write_json(ctx, args.out, data)

    if args.region_out:
        shifted = second_order_region(args.n, args.eps, spec.channel, env)
        with open(args.region_out, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["rc", "rb"])
            for rc, rb in shifted:
                writer.writerow([fmt(ctx.show(rc)), fmt(ctx.show(rb))])
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, ctx: CommandContext) -> int:
    manager = SuiteManager(ctx.settings)
    names = None if args.suite == "all" else [args.suite]
    summary = manager.run_all(names, trials=args.trials, seed=ctx.seed(args))
    write_json(ctx, args.out, summary)
    return EXIT_OK if summary["success"] else EXIT_FAILED


def cmd_audit_fano(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = load_spec(args.spec)
    states = spec.channel.b_states if args.receiver == "B" else spec.channel.c_states
    report = fano_audit(
        states, args.n, args.m_size, args.k_size,
        q=args.q, opts=ctx.settings.audit, seed=ctx.seed(args), threads=ctx.threads,
    )
    data = report.to_dict(include_records=args.records)
    data["receiver"] = args.receiver
    write_json(ctx, args.out, data)
    return EXIT_OK if report.holds else EXIT_FAILED


def cmd_audit_single_letter(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = load_spec(args.spec)
    if not _require_degraded(ctx, spec):
        return EXIT_FAILED
    seed = ctx.seed(args)
    env = _envelope(ctx, spec, seed)
    ch = spec.channel
    rows, holds = [], True
    for rng in spawn_generators(seed, args.codes):
        code = BroadcastCode.random(ch.size, args.n, args.m_size, args.k_size, rng)
        row = {"codewords": code.codewords.tolist(), **single_letter_audit(ch, code, env, opts=ctx.settings.audit).to_dict()}
        holds = holds and row["holds"]
        if code.n <= 3:
            chain = chain_rule_audit(ch, code, env, ctx.settings.audit).to_dict()
            row["chain_rule"] = chain
            holds = holds and chain["holds"]
        rows.append(row)
    write_json(ctx, args.out, {
        "n": args.n,
        "m_size": args.m_size,
        "k_size": args.k_size,
        "sup_i_xb_u": env.sup_i_xb_u,
        "sup_i_uc": env.sup_i_uc,
        "holds": holds,
        "codes": rows,
    })
    return EXIT_OK if holds else EXIT_FAILED


def cmd_audit_strong_converse(args: argparse.Namespace, ctx: CommandContext) -> int:
    spec = load_spec(args.spec)
    if not _require_degraded(ctx, spec):
        return EXIT_FAILED
    seed = ctx.seed(args)
    env = _envelope(ctx, spec, seed)
    report = strong_converse_audit(
        spec.channel,
        ctx.to_nats(args.rate_rb),
        ctx.to_nats(args.rate_rc),
        args.n_list,
        env,
        search_budget=args.budget,
        opts=ctx.settings.audit,
        seed=seed,
        threads=ctx.threads,
    )
    write_json(ctx, args.out, report.to_dict())
    return EXIT_OK if report.holds else EXIT_FAILED


def cmd_config(args: argparse.Namespace, ctx: CommandContext) -> int:
    """Persisted-settings maintenance; environment and flag overrides are never written."""
    manager = ctx.config_manager
    if manager is None:
        raise PreconditionError("No configuration directory for this run")
    if args.action == "path":
        print(manager.get_config_path(), file=ctx.stdout)
        return EXIT_OK
    if args.action == "show":
        write_json(ctx, None, manager.persisted.to_dict())
        return EXIT_OK
    if args.action == "backup":
        backup = manager.backup_config()
        if backup is None:
            return EXIT_FAILED
        print(backup, file=ctx.stdout)
        return EXIT_OK
    if args.action == "reset":
        return EXIT_OK if manager.reset_to_defaults() else EXIT_FAILED

    name, sep, raw = args.assignment.partition("=")
    if not sep:
        raise PreconditionError(f"Expected SECTION.KEY=VALUE, got {args.assignment!r}")
    return EXIT_OK if manager.set_value(name.strip(), raw.strip()) else EXIT_FAILED


COMMANDS: Dict[str, Callable[[argparse.Namespace, CommandContext], int]] = {
    "check-degraded": cmd_check_degraded,
    "region": cmd_region,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "audit fano": cmd_audit_fano,
    "audit single-letter": cmd_audit_single_letter,
    "audit strong-converse": cmd_audit_strong_converse,
    "config": cmd_config,
}


def dispatch(args: argparse.Namespace, ctx: CommandContext) -> int:
    """Run the selected command. Parse and domain errors exit 2; other cqbl errors exit 1."""
    key = args.command if args.command != "audit" else f"audit {args.audit}"
    handler = COMMANDS[key]
    try:
        return handler(args, ctx)
    except SpecParseError as e:
        logger.error(f"Cannot parse channel spec: {e}")
        return EXIT_USAGE
    except PreconditionError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except CqblError as e:
        logger.error(str(e))
        return EXIT_FAILED

