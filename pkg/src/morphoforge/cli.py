"""forge: build morphological filament networks from tagged phonetized lexicons."""

from __future__ import annotations

import functools
import json

import click

from .pipeline import (
    PipelineConfig,
    PipelineError,
    PipelineRun,
    run_pipeline,
)

KNOB_KEYS = (
    "min_ngram", "neighbors", "w_threshold", "cc_threshold",
    "min_subseries", "max_iterations", "max_candidates",
)


def common_options(command):
    @click.option("--config", "config_path", type=click.Path(exists=True),
                  help="TOML configuration file.")
    @click.option("--lexicon", type=click.Path(exists=True),
                  help="Tab-separated word/phonemes/tag file.")
    @click.option("--out", "output_dir", type=click.Path(),
                  help="Output directory for checkpoints and exports.")
    @click.option("--min-ngram", type=int, default=None,
                  help="Minimum feature window length [default 3].")
    @click.option("--neighbors", type=int, default=None,
                  help="Neighborhood size searched for analogies [default 100].")
    @click.option("--w-threshold", type=int, default=None,
                  help="Minimum edge weight for reliable families [default 10].")
    @click.option("--cc-threshold", type=float, default=None,
                  help="Clustering coefficient threshold [default 0.66].")
    @click.option("--min-subseries", type=int, default=None,
                  help="Minimum sub-series size kept by late bootstrap steps [default 5].")
    @click.option("--max-iterations", type=int, default=None,
                  help="Bootstrap iteration cap [default 50].")
    @click.option("--max-candidates", type=int, default=None,
                  help="Abort if the candidate count exceeds this bound.")
    @click.option("--force", is_flag=True,
                  help="Reuse an output directory produced with another configuration.")
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        return command(*args, **kwargs)

    return wrapper


def build_config(config_path, lexicon, output_dir, **knobs) -> PipelineConfig:
    overrides = {key: knobs.get(key) for key in KNOB_KEYS}
    if lexicon is not None:
        overrides["lexicon"] = lexicon
    if output_dir is not None:
        overrides["output_dir"] = output_dir
    try:
        if config_path is not None:
            return PipelineConfig.from_file(config_path, **overrides)
        if overrides.get("lexicon") is None or overrides.get("output_dir") is None:
            raise PipelineError(
                "config: pass --config or both --lexicon and --out"
            )
        values = {k: v for k, v in overrides.items() if v is not None}
        return PipelineConfig(**values)
    except (PipelineError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc


def run_stage(stage: str, config: PipelineConfig, force: bool, **stage_args):
    try:
        runner = PipelineRun(config, force)
        return getattr(runner, f"stage_{stage}")(**stage_args)
    except click.ClickException:
        raise
    except PipelineError as exc:
        raise click.ClickException(str(exc)) from exc
    except Exception as exc:
        raise click.ClickException(f"{stage}: {exc}") from exc


@click.group()
@click.version_option(package_name="morphoforge")
def main():
    """Build a lexeme-based morphological network from a phonetized lexicon.

    Stages run in order: neighbors, analogies, seed, bootstrap, export,
    stats.  Each stage reads the previous stage's checkpoint from the
    output directory, so they can be run separately or all at once with
    `forge run`.
    """


@main.command()
@common_options
def run(config_path, lexicon, output_dir, force, **knobs):
    """Run the whole pipeline and print the final statistics."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    try:
        stats = run_pipeline(config, force)
    except PipelineError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(stats.as_dict(), indent=2, sort_keys=True))


@main.command()
@common_options
def neighbors(config_path, lexicon, output_dir, force, **knobs):
    """Compute and dump ranked similarity neighborhoods."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    neighborhoods = run_stage("neighbors", config, force)
    click.echo(f"neighbors: {len(neighborhoods)} words")


@main.command()
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Also write the stage counters to this path.")
@common_options
def analogies(config_path, lexicon, output_dir, force, report_path, **knobs):
    """Mine analogies inside the neighborhoods."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    found = run_stage("analogies", config, force, report_path=report_path)
    click.echo(f"analogies: {len(found)} canonical representatives")


@main.command()
@common_options
def seed(config_path, lexicon, output_dir, force, **knobs):
    """Build the relation graph and extract the reliable seed network."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    network = run_stage("seed", config, force)
    click.echo(
        f"seed: {len(network.family_edges)} family edges, "
        f"{len(network.serial_edges)} serial edges"
    )


@main.command()
@common_options
def bootstrap(config_path, lexicon, output_dir, force, **knobs):
    """Grow the seed to its fixed point and merge the final network."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    network = run_stage("bootstrap", config, force)
    click.echo(
        f"bootstrap: fixed point after {network.iteration} growth steps, "
        f"{len(network.family_edges)} family edges"
    )


@main.command()
@common_options
def export(config_path, lexicon, output_dir, force, **knobs):
    """Export the filament resource file."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    filaments = run_stage("export", config, force)
    click.echo(f"export: {len(filaments)} filaments")


@main.command()
@common_options
def stats(config_path, lexicon, output_dir, force, **knobs):
    """Recount and print statistics for the exported resource."""
    config = build_config(config_path, lexicon, output_dir, **knobs)
    result = run_stage("stats", config, force)
    click.echo(json.dumps(result.as_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
