"""Command-line front door: serve the API and run every evaluation headless.

Resource options live on the group so each subcommand sees the same
corpus/embedding/parameter context. Paths fall back to environment
variables and then to the bundled fixture data, so a bare
`teachable baseline` works out of the box.
"""

from __future__ import annotations

import json
import sys
from functools import cached_property
from importlib.resources import as_file, files
from pathlib import Path

import click

from . import bayes
from .bayes import DEFAULT_ALPHA, NBVariant
from .corpus import CorpusSplit, load_ag_news, preprocess_corpus
from .embeddings import DEFAULT_TAU, EmbeddingStore, load_binary_embeddings, load_text_embeddings
from .evaluation import (
    TeacherKind,
    TeacherStrategy,
    curve_to_csv,
    curve_to_svg,
    epoch_curve,
    evaluate,
    run_benchmark,
    select_teaching_articles,
    simulate_teacher,
)
from .events import read_log, replay_store, write_log
from .learner import PredictionMode, load_store
from .pipeline import default_config

_MODE_CHOICES = [m.value for m in PredictionMode]
_TEACHER_CHOICES = [t.value for t in TeacherKind]


def _bundled(relative: str) -> Path:
    with as_file(files("teachable.data") / relative) as p:
        return Path(p)


class ResourceContext:
    """Lazily loads and caches the corpus, embeddings, and base models."""

    def __init__(
        self,
        train: str | None,
        test: str | None,
        embeddings: str | None,
        tau: float,
        alpha: float,
        seed: int,
        data_dir: str | None,
    ) -> None:
        self.train_path = Path(train) if train else _bundled("corpus/train.csv")
        self.test_path = Path(test) if test else _bundled("corpus/test.csv")
        self.embeddings_path = Path(embeddings) if embeddings else _bundled("embeddings_50d.txt")
        self.tau = tau
        self.alpha = alpha
        self.seed = seed
        self.data_dir = data_dir
        self._models: dict[NBVariant, bayes.NBModel] = {}

    @cached_property
    def split(self) -> CorpusSplit:
        raw = load_ag_news(self.train_path, self.test_path)
        return preprocess_corpus(raw, default_config())

    @cached_property
    def embeddings(self) -> EmbeddingStore:
        if self.embeddings_path.suffix == ".bin":
            return load_binary_embeddings(self.embeddings_path)
        return load_text_embeddings(self.embeddings_path)

    def model(self, variant: NBVariant) -> bayes.NBModel:
        if variant not in self._models:
            self._models[variant] = bayes.fit(self.split.train, variant=variant, alpha=self.alpha)
        return self._models[variant]


@click.group()
@click.option("--train", envvar="AG_NEWS_TRAIN", default=None, help="Training CSV (class,title,body per row). Defaults to the bundled corpus.")
@click.option("--test", envvar="AG_NEWS_TEST", default=None, help="Test CSV. Defaults to the bundled corpus.")
@click.option("--embeddings", envvar="TEACHABLE_EMBEDDINGS", default=None, help="Word embedding file (.txt or .bin). Defaults to the bundled vectors.")
@click.option("--tau", envvar="TEACHABLE_TAU", type=float, default=DEFAULT_TAU, show_default=True, help="Cosine similarity threshold for keyword matching.")
@click.option("--alpha", envvar="TEACHABLE_ALPHA", type=float, default=DEFAULT_ALPHA, show_default=True, help="Laplace smoothing for the corpus model.")
@click.option("--seed", envvar="TEACHABLE_SEED", type=int, default=0, show_default=True, help="Seed for article selection and sampling.")
@click.option("--data-dir", envvar="TEACHABLE_DATA_DIR", default=None, help="Directory for session event logs (serve).")
@click.pass_context
def main(ctx, train, test, embeddings, tau, alpha, seed, data_dir):
    """Teachable news classifier: serve the teaching API or run evaluations."""
    ctx.obj = ResourceContext(train, test, embeddings, tau, alpha, seed, data_dir)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--mode", "mode_name", envvar="TEACHABLE_MODE", type=click.Choice(_MODE_CHOICES), default=PredictionMode.COMBINED.value, show_default=True, help="Default prediction mode for new sessions.")
@click.option("--variant", type=click.Choice([v.value for v in NBVariant]), default=NBVariant.MULTINOMIAL.value, show_default=True, help="Corpus model variant.")
@click.option("--ui", "ui_dir", default=None, help="Optional directory of built frontend assets to serve at /.")
@click.pass_obj
def serve(res: ResourceContext, host, port, mode_name, variant, ui_dir):
    """Run the HTTP teaching service."""
    import uvicorn

    from .service import build_state, create_app, restore_sessions

    state = build_state(
        res.split,
        res.embeddings,
        tau=res.tau,
        alpha=res.alpha,
        variant=NBVariant(variant),
        default_mode=PredictionMode(mode_name),
        seed=res.seed,
        data_dir=res.data_dir,
    )
    restored = restore_sessions(state)
    if restored:
        click.echo(f"restored {len(restored)} session(s) from {res.data_dir}")
    app = create_app(state)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    click.echo(f"train={len(res.split.train)} test={len(res.split.test)} "
               f"vocab={len(state.base_model.stats.vocabulary)} tau={res.tau}")
    uvicorn.run(app, host=host, port=port, log_level="info")


def _metrics_row(name: str, metrics) -> str:
    return (f"{name:<28}{metrics.macro_precision:>10.4f}{metrics.macro_recall:>10.4f}"
            f"{metrics.macro_f1:>10.4f}")


_METRICS_HEADER = f"{'model':<28}{'precision':>10}{'recall':>10}{'f1':>10}"


@main.command()
@click.option("--variant", type=click.Choice(["both", *[v.value for v in NBVariant]]), default="both", show_default=True)
@click.option("--json", "json_path", default=None, help="Also write the metrics as JSON.")
@click.pass_obj
def baseline(res: ResourceContext, variant, json_path):
    """Fit the corpus model(s) and report test-set macro metrics."""
    variants = list(NBVariant) if variant == "both" else [NBVariant(variant)]
    click.echo(_METRICS_HEADER)
    click.echo("-" * len(_METRICS_HEADER))
    payload = {}
    for v in variants:
        metrics = evaluate(res.split.test, PredictionMode.BASELINE, base_model=res.model(v))
        name = f"{v.value} NB"
        click.echo(_metrics_row(name, metrics))
        payload[v.value] = metrics.to_dict()
    if json_path:
        Path(json_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        click.echo(f"wrote {json_path}")


def _teacher_logs(res: ResourceContext, k: int, articles_per_class: int):
    teaching = select_teaching_articles(res.split.train, res.seed, per_class=articles_per_class)
    stats = res.model(NBVariant.MULTINOMIAL).stats
    oracle = simulate_teacher(TeacherStrategy(TeacherKind.ORACLE_MI, k=k, seed=res.seed), res.split.train, teaching, stats)
    rand = simulate_teacher(TeacherStrategy(TeacherKind.RANDOM, k=k, seed=res.seed + 1), res.split.train, teaching, stats)
    adversarial = [
        simulate_teacher(TeacherStrategy(TeacherKind.ADVERSARIAL, k=k, seed=res.seed + 2 + i), res.split.train, teaching, stats)
        for i in range(3)
    ]
    return oracle, rand, adversarial


@main.command()
@click.option("--k", type=int, default=3, show_default=True, help="Keywords taught per article.")
@click.option("--articles-per-class", type=int, default=5, show_default=True)
@click.option("--out", "out_path", default=None, help="Write the report as JSON.")
@click.pass_obj
def benchmark(res: ResourceContext, k, articles_per_class, out_path):
    """Baselines plus best/worst/merged simulated-teacher conditions."""
    oracle, rand, adversarial = _teacher_logs(res, k, articles_per_class)
    # fit both variants up front so the report's models come from one context
    res.model(NBVariant.MULTINOMIAL)
    res.model(NBVariant.BERNOULLI)
    report = run_benchmark(
        res.split,
        {"best": oracle, "worst": adversarial[0], "all": [oracle, rand, *adversarial]},
        res.embeddings,
        tau=res.tau,
        alpha=res.alpha,
    )
    click.echo(report.format_table())
    if out_path:
        Path(out_path).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--teacher", type=click.Choice(_TEACHER_CHOICES), required=True)
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--articles-per-class", type=int, default=5, show_default=True)
@click.option("--teacher-seed", type=int, default=None, help="Seed for the teacher's own choices (defaults to --seed).")
@click.option("--out", "out_path", required=True, help="Write the teacher's event log here (JSONL).")
@click.pass_obj
def simulate(res: ResourceContext, teacher, k, articles_per_class, teacher_seed, out_path):
    """Emit the event log of one simulated teacher."""
    teaching = select_teaching_articles(res.split.train, res.seed, per_class=articles_per_class)
    strategy = TeacherStrategy(
        TeacherKind(teacher), k=k, seed=teacher_seed if teacher_seed is not None else res.seed
    )
    events = simulate_teacher(strategy, res.split.train, teaching)
    write_log(events, out_path)
    keywords = sum(1 for e in events if e.kind.value == "keyword")
    click.echo(f"wrote {out_path}: {len(events)} events, {keywords} keywords, "
               f"{len(teaching)} articles")


@main.command()
@click.option("--log", "log_path", required=True, help="Session or teacher event log (JSONL).")
@click.option("--mode", "mode_name", type=click.Choice(_MODE_CHOICES), default=PredictionMode.KEYWORDS_ONLY.value, show_default=True)
@click.option("--out", "out_path", default=None, help="Curve CSV path (default: stdout).")
@click.option("--svg", "svg_path", default=None, help="Also render the curve as an SVG chart.")
@click.pass_obj
def replay(res: ResourceContext, log_path, mode_name, out_path, svg_path):
    """Replay an event log into a per-article learning curve."""
    events = read_log(log_path)
    mode = PredictionMode(mode_name)
    base = res.model(NBVariant.MULTINOMIAL) if mode is not PredictionMode.KEYWORDS_ONLY else None
    points = epoch_curve(events, res.split.test, mode, res.embeddings, res.tau, base)
    csv_text = curve_to_csv(points)
    if out_path:
        Path(out_path).write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out_path} ({len(points)} points)")
    else:
        sys.stdout.write(csv_text)
    if svg_path:
        Path(svg_path).write_text(curve_to_svg(points), encoding="utf-8")
        click.echo(f"wrote {svg_path}")


@main.command("eval")
@click.option("--mode", "mode_name", type=click.Choice(_MODE_CHOICES), default=PredictionMode.COMBINED.value, show_default=True)
@click.option("--store", "store_path", default=None, help="Keyword store JSON to evaluate with.")
@click.option("--log", "log_path", default=None, help="Event log to replay into a store first.")
@click.option("--json", "json_path", default=None, help="Also write the metrics as JSON.")
@click.pass_obj
def eval_cmd(res: ResourceContext, mode_name, store_path, log_path, json_path):
    """One-shot macro metrics for a mode, optionally with taught keywords."""
    if store_path and log_path:
        raise click.UsageError("pass either --store or --log, not both")
    mode = PredictionMode(mode_name)
    if store_path:
        store = load_store(store_path)
    elif log_path:
        store = replay_store(read_log(log_path))
    else:
        from .learner import KeywordStore

        store = KeywordStore()
    base = res.model(NBVariant.MULTINOMIAL) if mode is not PredictionMode.KEYWORDS_ONLY else None
    metrics = evaluate(res.split.test, mode, store, res.embeddings, res.tau, base)
    click.echo(_METRICS_HEADER)
    click.echo("-" * len(_METRICS_HEADER))
    click.echo(_metrics_row(mode.value, metrics))
    if json_path:
        Path(json_path).write_text(json.dumps(metrics.to_dict(), indent=2) + "\n", encoding="utf-8")
        click.echo(f"wrote {json_path}")


if __name__ == "__main__":
    main()
