"""Batch experiment runner.

    shiftlab run CONFIG [--out-dir DIR] [--seed-override N] [--threads N]
    shiftlab list-panel
    shiftlab selfcheck [--only 1,2,...]

Exit codes for `run`: 0 success, 1 config error, 2 infeasible or degenerate
experiment, 3 caps/horizons exhausted with inconclusive verdicts present.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import load_config, serialize_system
from .errors import CapExceededError, ConfigError
from .harness import InfeasibleExperiment, run_config
from .panel import panel_pairs, panel_systems
from .reports import fmt_rational, render_csv, render_json


@click.group()
def main():
    """Exact-arithmetic experiments on subshifts of finite type."""


@main.command("run")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--seed-override", type=int, default=None, help="Replace configured seeds.")
@click.option("--threads", type=int, default=1, show_default=True, help="Concurrent experiments.")
def run(config_path: str, out_dir: str, seed_override, threads: int):
    """Execute a config and write the CSV report plus its JSON mirror."""
    try:
        config = load_config(config_path)
        rows, code = run_config(config, seed_override=seed_override, threads=threads)
    except ConfigError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(1)
    except InfeasibleExperiment as err:
        click.echo(f"infeasible experiment: {err}", err=True)
        sys.exit(2)
    except CapExceededError as err:
        click.echo(f"cap exhausted: {err}", err=True)
        sys.exit(3)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / config.csv_name
    json_path = out / config.json_name
    csv_path.write_bytes(render_csv(rows).encode("utf-8"))
    echo_cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
    json_path.write_bytes(render_json(rows, echo_cfg).encode("utf-8"))
    click.echo(f"wrote {csv_path} ({len(rows)} rows) and {json_path}")
    sys.exit(code)


@main.command("list-panel")
def list_panel():
    """Print the bundled systems and their canonical pair panels."""
    for system in panel_systems():
        spec = serialize_system(system)
        pi = ", ".join(fmt_rational(v) for v in system.measure.stationary)
        click.echo(f"{system.id}: {system.description}")
        click.echo(f"  alphabet_size: {spec['alphabet_size']}")
        click.echo(f"  allowed: {spec['allowed']}")
        click.echo(f"  transition: {spec['transition']}")
        click.echo(f"  stationary: ({pi})")
        labels = [label for label, _x, _y in panel_pairs(10)[system.id]]
        click.echo(f"  pairs: {', '.join(labels)}")


@main.command("selfcheck")
@click.option("--only", default="", help="Comma-separated criterion numbers to run.")
def selfcheck(only: str):
    """Run the acceptance suite and print one pass/fail line per criterion."""
    from .acceptance import run_criteria

    numbers = None
    if only.strip():
        numbers = [int(v) for v in only.split(",") if v.strip()]
    results = run_criteria(numbers)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        click.echo(f"[{status}] criterion {res.number}: {res.title} ({res.seconds:.1f}s) {res.detail}")
        failed += 0 if res.passed else 1
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
