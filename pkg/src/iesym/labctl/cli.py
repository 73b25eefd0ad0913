"""Command line interface: ``sweep``, ``analyze``, ``verify``, ``tables``.

Exit codes: 0 success, 1 validation failure, 2 invariant violation.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from iesym.circuit import SpecError
from iesym.labctl.config import OUTPUT_ROOT_ENV, ConfigError, parse_config

EXIT_OK, EXIT_VALIDATION, EXIT_INVARIANT = 0, 1, 2


def _invariant_errors() -> tuple:
    from iesym.pottsrbc import InvariantViolation
    from iesym.stabcore import InvariantError

    return InvariantError, InvariantViolation


@click.group()
def main():
    """Sweeps and checks for probed random circuits and their cluster models."""


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--output-root", envvar=OUTPUT_ROOT_ENV, default=None,
              help=f"Base for relative output paths (env {OUTPUT_ROOT_ENV}).")
@click.option("--workers", default=1, show_default=True, help="Worker processes.")
def sweep(config, output_root, workers):
    """Run (or resume) the sweep described by CONFIG."""
    from iesym.labctl.sweep import run_sweep

    try:
        cfg = parse_config(config)
        out = run_sweep(cfg, output_root=output_root, workers=workers)
    except (ConfigError, SpecError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except _invariant_errors() as exc:
        click.echo(f"invariant violation: {exc}", err=True)
        sys.exit(EXIT_INVARIANT)
    click.echo(str(out))


@main.command()
@click.argument("dataset", type=click.Path(exists=True))
@click.option("--observable", required=True)
@click.option("--layer", default="final", show_default=True, help="'final' or a layer number.")
@click.option("--collapse/--no-collapse", default=False, help="Also fit a data collapse.")
@click.option("--bootstrap", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
def analyze(dataset, observable, layer, collapse, bootstrap, seed):
    """Crossing analysis of OBSERVABLE in DATASET (a sweep directory or CSV)."""
    from iesym.labctl.analysis import crossing_analysis, load_dataset

    try:
        df = load_dataset(dataset)
        rep = crossing_analysis(df, observable, layer=layer if layer == "final" else int(layer),
                                n_boot=bootstrap, seed=seed, collapse=collapse, source=str(dataset))
    except ValueError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(json.dumps(rep.to_dict(), indent=1, default=float))
    if not rep.in_range:
        click.echo("out of range: no crossing inside the swept interval", err=True)


@main.command()
def verify():
    """Run the built-in invariant and oracle checks."""
    from iesym.labctl.verify import run_checks

    try:
        ok = run_checks(click.echo)
    except _invariant_errors() as exc:
        click.echo(f"invariant violation: {exc}", err=True)
        sys.exit(EXIT_INVARIANT)
    sys.exit(EXIT_OK if ok else EXIT_INVARIANT)


@main.command()
@click.option("--max-n", default=3, show_default=True, help="Largest replica count for W_+ tables.")
@click.option("--d", "dims", multiple=True, type=int, default=(2, 3, 4), show_default=True,
              help="Dimensions for Weingarten tables.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Write JSON files here instead of stdout.")
def tables(max_n, dims, out):
    """Export Weingarten and W_+ tables as JSON."""
    from iesym.permrep import CapacityError, DegeneracyError, w_plus_json, weingarten_json

    docs = {}
    try:
        for n in range(1, max_n + 1):
            docs[f"w_plus_n{n}.json"] = w_plus_json(n)
            for d in dims:
                if d >= n:
                    docs[f"weingarten_d{d}_n{n}.json"] = weingarten_json(d, n)
    except (CapacityError, DegeneracyError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    if out is None:
        for name, text in docs.items():
            click.echo(f"# {name}\n{text}")
        return
    Path(out).mkdir(parents=True, exist_ok=True)
    for name, text in docs.items():
        (Path(out) / name).write_text(text + "\n")
    click.echo(f"wrote {len(docs)} files to {out}")
