"""Command-line interface: mine a database, synthesize one from a model, and
evaluate mined output.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (unreadable or
malformed inputs, empty databases, infeasible models).
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import click

from .core import DataError
from .evaluation import generate_db, inter_itemset_distance, precision_recall
from .formats import (
    load_fimi,
    load_model,
    read_ranked_itemsets,
    save_model,
    write_fimi,
    write_ranked_tsv,
)
from .learning import MiningConfig, MiningResult, mine
from .ranking import rank


@dataclass(frozen=True)
class RunReport:
    """Summary of one mining run, printed to stderr after mining."""

    iterations: int
    proposed: int
    accepted: int
    rejected: int
    itemsets_total: int
    itemsets_non_singleton: int
    exhausted: bool
    index_seconds: float
    structural_seconds: float
    em_seconds: float
    total_seconds: float
    seed: int
    config: MiningConfig

    @classmethod
    def from_result(cls, result: MiningResult, config: MiningConfig) -> "RunReport":
        stats = result.stats
        total = len(result.model)
        non_singleton = sum(1 for s in result.model.itemsets if not s.is_singleton)
        return cls(
            iterations=stats.iterations,
            proposed=stats.proposed,
            accepted=stats.accepted,
            rejected=stats.rejected,
            itemsets_total=total,
            itemsets_non_singleton=non_singleton,
            exhausted=stats.exhausted,
            index_seconds=stats.index_seconds,
            structural_seconds=stats.structural_seconds,
            em_seconds=stats.em_seconds,
            total_seconds=stats.total_seconds,
            seed=config.seed,
            config=config,
        )

    def lines(self) -> list[str]:
        cfg = self.config
        return [
            f"iterations: {self.iterations}" + (" (candidate queue exhausted)" if self.exhausted else ""),
            f"candidates: proposed {self.proposed}, accepted {self.accepted}, rejected {self.rejected}",
            f"itemsets: {self.itemsets_total} total, {self.itemsets_non_singleton} non-singleton",
            "phase seconds: index {:.3f}, structural {:.3f}, em {:.3f}, total {:.3f}".format(
                self.index_seconds, self.structural_seconds, self.em_seconds, self.total_seconds
            ),
            f"seed: {self.seed}",
            "config: iterations={} queue-size={} em-tolerance={} em-every={} threads={}".format(
                cfg.max_iterations,
                cfg.queue_capacity,
                cfg.em_tolerance,
                cfg.em_every,
                cfg.resolved_threads(),
            ),
        ]


@click.group()
def cli():
    """Mine, synthesize and evaluate explanatory itemsets."""


@cli.command("mine")
@click.option("--input", "input_path", required=True, help="FIMI transaction file to mine.")
@click.option("--iterations", default=1000, show_default=True, type=click.IntRange(min=0))
@click.option("--queue-size", default=100_000, show_default=True, type=click.IntRange(min=1))
@click.option("--em-tolerance", default=1e-5, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--em-every", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--threads", default=None, type=click.IntRange(min=1), help="Defaults to all cores.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--output", "output_path", required=True, help="Ranked itemset TSV to write.")
@click.option("--model-out", "model_path", default=None, help="Optional JSON model file to write.")
@click.option("--no-singletons", is_flag=True, help="Drop singletons from the ranked output.")
def cmd_mine(input_path, iterations, queue_size, em_tolerance, em_every, threads, seed,
             output_path, model_path, no_singletons):
    """Mine a transaction database and write the ranked itemsets."""
    db = load_fimi(input_path)
    config = MiningConfig(
        max_iterations=iterations,
        queue_capacity=queue_size,
        em_tolerance=em_tolerance,
        em_every=em_every,
        threads=threads,
        seed=seed,
    )
    result = mine(db, config)
    ranked = rank(result.model, result.coverings, include_singletons=not no_singletons)
    write_ranked_tsv(ranked, output_path)
    if model_path:
        save_model(result.model, model_path)
    for line in RunReport.from_result(result, config).lines():
        click.echo(line, err=True)


@cli.command("synth")
@click.option("--model", "model_path", required=True, help="JSON model file to sample from.")
@click.option("--transactions", required=True, type=click.IntRange(min=1))
@click.option("--seed", required=True, type=int)
@click.option("--output", "output_path", required=True, help="FIMI file to write.")
def cmd_synth(model_path, transactions, seed, output_path):
    """Sample a synthetic transaction database from a model."""
    model = load_model(model_path)
    db = generate_db(model, transactions, seed)
    write_fimi(db, output_path)
    click.echo(f"wrote {db.m} transactions over {db.universe_size} items", err=True)


@cli.group("eval")
def cmd_eval():
    """Evaluate mined output."""


def _filter_singletons(itemsets, drop):
    return [s for s in itemsets if not (drop and s.is_singleton)]


@cmd_eval.command("pr")
@click.option("--mined", "mined_path", required=True, help="Ranked TSV from the mine command.")
@click.option("--truth", "truth_path", required=True, help="JSON model of generating itemsets.")
@click.option("--no-singletons", is_flag=True, help="Score non-singleton itemsets only.")
def cmd_eval_pr(mined_path, truth_path, no_singletons):
    """Precision/recall of a ranked list against the generating model."""
    mined = _filter_singletons(read_ranked_itemsets(mined_path), no_singletons)
    truth = _filter_singletons(load_model(truth_path).itemsets, no_singletons)
    if not truth:
        raise DataError(f"{truth_path}: no truth itemsets to score against")
    curve = precision_recall(mined, truth)
    click.echo("k\tprecision\trecall")
    for k, (recall, precision) in enumerate(curve.points, start=1):
        click.echo(f"{k}\t{precision:.10g}\t{recall:.10g}")
    click.echo("")
    click.echo("recall\tinterpolated_precision")
    for level, precision in zip(range(11), curve.interpolated):
        click.echo(f"{level / 10:.1f}\t{precision:.10g}")


@cmd_eval.command("iid")
@click.option("--mined", "mined_path", required=True, help="Ranked TSV from the mine command.")
@click.option("--top", default=50, show_default=True, type=click.IntRange(min=2))
@click.option("--no-singletons", is_flag=True, help="Consider non-singleton itemsets only.")
def cmd_eval_iid(mined_path, top, no_singletons):
    """Average inter-itemset distance of the top ranked itemsets."""
    itemsets = _filter_singletons(read_ranked_itemsets(mined_path), no_singletons)
    used = min(top, len(itemsets))
    if used < 2:
        raise DataError(f"{mined_path}: need at least 2 itemsets, found {len(itemsets)}")
    value = inter_itemset_distance(itemsets, used)
    click.echo("requested\tused\tiid")
    click.echo(f"{top}\t{used}\t{value:.10g}")
    if used < top:
        click.echo(f"note: list has only {used} itemsets", err=True)


@cmd_eval.command("scaling")
@click.option("--model", "model_path", required=True, help="JSON model to sample databases from.")
@click.option("--sizes", default="10000,20000,40000", show_default=True,
              help="Comma-separated database sizes.")
@click.option("--iterations", default=100, show_default=True, type=click.IntRange(min=0))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--threads", default=None, type=click.IntRange(min=1))
@click.option("--queue-size", default=100_000, show_default=True, type=click.IntRange(min=1))
def cmd_eval_scaling(model_path, sizes, iterations, seed, threads, queue_size):
    """Mine synthetic databases of growing size and report wall-clock time."""
    model = load_model(model_path)
    try:
        size_list = [int(tok) for tok in sizes.split(",") if tok.strip()]
    except ValueError:
        raise click.BadParameter(f"invalid sizes {sizes!r}") from None
    if not size_list or any(n < 1 for n in size_list):
        raise click.BadParameter(f"invalid sizes {sizes!r}")
    config_kwargs = dict(
        max_iterations=iterations, queue_capacity=queue_size, threads=threads, seed=seed
    )
    click.echo("size\tseconds\titemsets\taccepted")
    for size in size_list:
        db = generate_db(model, size, seed)
        started = time.perf_counter()
        result = mine(db, MiningConfig(**config_kwargs))
        elapsed = time.perf_counter() - started
        click.echo(f"{size}\t{elapsed:.3f}\t{len(result.model)}\t{result.stats.accepted}")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, prog_name="itemset-miner", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
