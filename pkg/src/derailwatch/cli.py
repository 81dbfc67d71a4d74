"""Command-line front end: ingest, analyze, score, evaluate, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analytics import compute_stats, render_text_report
from .errors import DerailwatchError
from .evaluation import (
    labels_from_corpus,
    render_report,
    sweep,
)
from .gateway import HttpConfig, HttpGateway, ScriptedMock
from .ingest import EligibilityRule, GitHubClient, IngestConfig, ReplayTransport
from .model import load_corpus, save_corpus
from .predictor import load_predictions, predict, save_predictions
from .prompts import ScdStrategy
from .store import ModerationStore


@click.group()
def main():
    """Derailment forecasting and proactive moderation for GitHub threads."""


@main.command()
@click.option("--repo", required=True, help="owner/name repository")
@click.option("--number", required=True, type=int, help="issue/PR number")
@click.option("--out", required=True, type=click.Path(), help="output corpus JSONL")
@click.option("--neighbors", is_flag=True, help="also sample non-toxic neighbors")
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--replay-dir", type=click.Path(exists=True), default=None,
              help="serve responses from a replay fixture directory instead of the live API")
def ingest(repo, number, out, neighbors, seed, replay_dir):
    """Fetch a thread (and optionally neighbor samples) into a corpus file."""
    if replay_dir:
        client = GitHubClient(ReplayTransport(replay_dir))
    else:
        client = GitHubClient.from_config(IngestConfig.from_env())
    threads = [client.fetch_thread(repo, number)]
    if neighbors:
        threads += client.sample_neighbors(
            repo, number, rule=EligibilityRule(), seed=seed
        )
    save_corpus(threads, out)
    click.echo(f"wrote {len(threads)} threads to {out}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def analyze(corpus, out):
    """Compute corpus statistics; writes JSON and prints the text tables."""
    stats = compute_stats(load_corpus(corpus))
    Path(out).write_text(stats.to_json() + "\n", encoding="utf-8")
    click.echo(render_text_report(stats), nl=False)
    click.echo(f"report written to {out}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--strategy", type=click.Choice(["ltm", "fewshot", "generic"]),
              default="ltm", show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--gateway", "gateway_kind", type=click.Choice(["mock", "http"]),
              default="http", show_default=True)
@click.option("--mock-script", type=click.Path(exists=True), default=None,
              help="JSONL mock script (required with --gateway mock)")
@click.option("--model", default="llama-3.1-70b", show_default=True)
@click.option("--drop-bot-comments", is_flag=True)
def score(corpus, strategy, out, gateway_kind, mock_script, model, drop_bot_comments):
    """Score every scorable thread in a corpus; writes predictions JSONL."""
    if gateway_kind == "mock":
        if not mock_script:
            raise click.UsageError("--gateway mock requires --mock-script")
        gw = ScriptedMock.from_jsonl(mock_script)
    else:
        gw = HttpGateway(HttpConfig.from_env())
    threads = load_corpus(corpus)
    predictions = []
    skipped = 0
    for thread in threads:
        if not thread.valid_for_derailment_analysis:
            skipped += 1
            continue
        predictions.append(
            predict(
                thread,
                ScdStrategy(strategy),
                gw,
                model_name=model,
                drop_bot_comments=drop_bot_comments,
            )
        )
    save_predictions(predictions, out)
    click.echo(f"scored {len(predictions)} threads ({skipped} skipped) -> {out}")


@main.command()
@click.option("--predictions", required=True, type=click.Path(exists=True))
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--thresholds", default="0.4,0.5,0.6", show_default=True)
@click.option("--out", required=True, type=click.Path())
def evaluate(predictions, corpus, thresholds, out):
    """Threshold sweep over a predictions file against corpus labels."""
    labels = labels_from_corpus(load_corpus(corpus))
    report = sweep(
        load_predictions(predictions),
        labels,
        thresholds=[float(t) for t in thresholds.split(",") if t],
    )
    Path(out).write_text(report.to_json() + "\n", encoding="utf-8")
    click.echo(render_report(report), nl=False)
    click.echo(f"report written to {out}")


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path())
@click.option("--listen", default="127.0.0.1:8080", show_default=True)
@click.option("--gateway", "gateway_kind", type=click.Choice(["mock", "http"]),
              default="mock", show_default=True)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--ui-dir", type=click.Path(), default=None,
              help="static dashboard build to serve under /ui")
def serve(store_dir, listen, gateway_kind, mock_script, ui_dir):
    """Run the moderation HTTP service."""
    import uvicorn

    from .service import create_app

    if gateway_kind == "mock":
        if not mock_script:
            raise click.UsageError("--gateway mock requires --mock-script")
        gw = ScriptedMock.from_jsonl(mock_script)
    else:
        gw = HttpGateway(HttpConfig.from_env())
    app = create_app(ModerationStore(store_dir), gw, ui_dir=ui_dir)
    host, _, port = listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))


def _entrypoint():
    try:
        main()
    except DerailwatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    _entrypoint()
