"""Argument parser for the cqbl command line."""

import argparse
from typing import List

from .. import __description__, __version__

SUITE_CHOICES = ["alt", "rhc", "dpi", "fano", "region", "converse", "all"]
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def float_list(text: str) -> List[float]:
    """Comma-separated floats, e.g. ``0,0.1,0.2``."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _add_spec(p: argparse.ArgumentParser):
    p.add_argument("spec", help="Channel-spec JSON file")


def _add_seed(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="Seed for randomized searches (default: runtime.seed).")


def _add_out(p: argparse.ArgumentParser):
    p.add_argument("--out", default=None, help="Write the output to this file instead of stdout.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqbl", description=__description__)
    parser.add_argument("--version", action="version", version=f"cqbl {__version__}")
    parser.add_argument("--config-dir", default=None, help="Configuration directory (default: $XDG_CONFIG_HOME/cqbl).")
    parser.add_argument("--bits", action="store_true", default=None,
                        help="Read and print rates in bits instead of nats.")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default=None, help="Override runtime.log_level.")

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    p = commands.add_parser("check-degraded", help="Search for a degrading map N^{B→C}.")
    _add_spec(p)
    p.add_argument("--tol", type=float, default=None, help="Trace-norm residual tolerance (default: region.degraded_tol).")

    p = commands.add_parser("region", help="Boundary F(t) of the entropic region as CSV.")
    _add_spec(p)
    p.add_argument("--t-grid", type=float_list, default=None,
                   help="Comma-separated constraint levels (default: evenly spaced up to max I(X;C)).")
    p.add_argument("--t-points", type=int, default=17, help="Number of default levels (default: 17).")
    p.add_argument("--quantum-u", action="store_true", help="Also search quantum auxiliary states.")
    _add_seed(p)
    _add_out(p)

    p = commands.add_parser("bound", help="Second-order bounds and the strong converse exponent as JSON.")
    _add_spec(p)
    p.add_argument("--n", type=int, required=True, help="Blocklength.")
    p.add_argument("--eps", type=float, required=True, help="Maximal error probability in (0, 1).")
    p.add_argument("--rate-rb", type=float, default=None, help="Rate R_B of a pair to test against the region.")
    p.add_argument("--rate-rc", type=float, default=None, help="Rate R_C of a pair to test against the region.")
    p.add_argument("--common-rate", type=float, default=0.0,
                   help="Common-message rate R; the pair becomes (R_B, R + R_C).")
    p.add_argument("--region-out", default=None, help="Also write the finite-n outer boundary as CSV.")
    _add_seed(p)
    _add_out(p)

    p = commands.add_parser("verify", help="Run property verification suites.")
    p.add_argument("--suite", choices=SUITE_CHOICES, default="all", help="Suite to run (default: all).")
    p.add_argument("--trials", type=int, default=100, help="Random instances per suite (default: 100).")
    _add_seed(p)
    _add_out(p)

    p = commands.add_parser("audit", help="Finite-blocklength code audits.")
    audits = p.add_subparsers(dest="audit", metavar="AUDIT")
    audits.required = True

    a = audits.add_parser("fano", help="Fano-type inequality on every codeword table.")
    _add_spec(a)
    a.add_argument("--receiver", choices=["B", "C"], default="B", help="Receiver whose states are audited.")
    a.add_argument("--n", type=int, default=1)
    a.add_argument("--m-size", type=int, default=2)
    a.add_argument("--k-size", type=int, default=2)
    a.add_argument("--q", type=float_list, default=None, help="Law of K (default: uniform).")
    a.add_argument("--records", action="store_true", help="Include every per-table record.")
    _add_seed(a)
    _add_out(a)

    a = audits.add_parser("single-letter", help="Code mutual informations against n times the region suprema.")
    _add_spec(a)
    a.add_argument("--n", type=int, default=2)
    a.add_argument("--m-size", type=int, default=2)
    a.add_argument("--k-size", type=int, default=2)
    a.add_argument("--codes", type=int, default=10, help="Random codes to audit (default: 10).")
    _add_seed(a)
    _add_out(a)

    a = audits.add_parser("strong-converse", help="Best-found code success against e^{−nf}.")
    _add_spec(a)
    a.add_argument("--rate-rb", type=float, required=True)
    a.add_argument("--rate-rc", type=float, required=True)
    a.add_argument("--n-list", type=int_list, default=[1, 2, 3, 4, 5], help="Blocklengths (default: 1,2,3,4,5).")
    a.add_argument("--budget", type=int, default=None, help="Codes searched per blocklength (default: audit.search_budget).")
    _add_seed(a)
    _add_out(a)

    p = commands.add_parser("config", help="Inspect or change the persisted settings.")
    actions = p.add_subparsers(dest="action", metavar="ACTION")
    actions.required = True
    actions.add_parser("show", help="Print the persisted settings as JSON.")
    actions.add_parser("path", help="Print the configuration directory.")
    actions.add_parser("backup", help="Copy settings.json to a timestamped backup.")
    actions.add_parser("reset", help="Back up, then restore the default settings.")
    a = actions.add_parser("set", help="Persist one setting.")
    a.add_argument("assignment", metavar="SECTION.KEY=VALUE", help="e.g. converse.mu_points=21")

    return parser
