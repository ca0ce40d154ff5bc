"""Command line entry points: build-corpus, serve, chat, replay."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .bundle import build_bundle, save_bundle
from .config import BackendConfig, EngineConfig
from .engine import DialogEngine
from .errors import EngineError
from .transcript import parse_transcript, persist_transcript, render_dialog
from .types import Phase, SightAssignment


def _engine_config(config_path, corpus, backend, seed) -> EngineConfig:
    if config_path:
        config = EngineConfig.from_file(config_path)
        if corpus:
            config = EngineConfig.from_dict(
                {**_config_as_dict(config), "corpus_path": corpus}
            )
        return config
    if not corpus:
        raise click.UsageError("either --config or --corpus is required")
    return EngineConfig(
        corpus_path=Path(corpus),
        backend=BackendConfig(kind=backend, seed=seed),
    )


def _config_as_dict(config: EngineConfig) -> dict:
    return {
        "corpus_path": str(config.corpus_path),
        "template_pack_path": str(config.template_pack_path),
        "lexicon_path": str(config.lexicon_path),
        "question_graph_path": str(config.question_graph_path),
        "backend": {
            "kind": config.backend.kind,
            "seed": config.backend.seed,
            "endpoint": config.backend.endpoint,
            "credential_env": config.backend.credential_env,
        },
        "time_budget_s": config.time_budget_s,
        "max_retries": config.max_retries,
        "search_k": config.search_k,
        "qa_k": config.qa_k,
        "loc_question_k": config.loc_question_k,
    }


@click.group()
def main() -> None:
    """Travel-consultation dialog engine."""


@main.command("build-corpus")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", type=click.Path(exists=True), default=None, help="Raw corpus JSONL.")
@click.option("--backend", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True, help="Bundle output directory.")
def build_corpus(config_path, corpus, backend, seed, out) -> None:
    """Ingest the corpus and precompute summaries, questions, points, appeals."""
    config = _engine_config(config_path, corpus, backend, seed)
    try:
        engine = DialogEngine.from_config(config)
        bundle_dir = save_bundle(engine.bundle, out)
    except EngineError as exc:
        raise click.ClickException(str(exc))
    total_questions = sum(len(qs.questions) for qs in engine.bundle.question_sets.values())
    click.echo(f"bundle written to {bundle_dir}: {len(engine.catalog)} sights, "
               f"{total_questions} interest questions")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("--seed", type=int, default=0)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(config_path, corpus, backend, seed, host, port) -> None:
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    config = _engine_config(config_path, corpus, backend, seed)
    try:
        engine = DialogEngine.from_config(config)
    except EngineError as exc:
        raise click.ClickException(str(exc))
    uvicorn.run(create_app(engine), host=host, port=port, log_level="warning")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["mock", "remote"]), default="mock")
@click.option("--seed", type=int, default=0)
@click.option("--candidate-a", required=True)
@click.option("--candidate-b", required=True)
@click.option("--recommended", required=True)
@click.option("--transcript", "transcript_path", type=click.Path(), default=None,
              help="Also write the transcript file on exit.")
def chat(config_path, corpus, backend, seed, candidate_a, candidate_b,
         recommended, transcript_path) -> None:
    """Terminal consultation over a local session; reads customer lines from stdin."""
    config = _engine_config(config_path, corpus, backend, seed)
    try:
        engine = DialogEngine.from_config(config)
        assignment = SightAssignment(candidate_a, candidate_b, recommended)
        session = engine.create_session(assignment)
    except EngineError as exc:
        raise click.ClickException(str(exc))

    def show(turns) -> None:
        for turn in turns:
            cues = [turn.annotations.expression]
            if turn.annotations.nod_cue:
                cues.append("nod")
            if turn.annotations.look_at_monitor:
                cues.append("monitor")
            click.echo(f"guide [{','.join(cues)}]: {turn.text}")

    show(engine.advance(session, None))
    for line in sys.stdin:
        if session.phase is Phase.DONE:
            break
        utterance = line.rstrip("\n")
        click.echo(f"customer: {utterance}")
        show(engine.advance(session, utterance))
    if session.phase is not Phase.DONE:
        # Scripted input ran dry; close the consultation cleanly.
        while session.phase is not Phase.DONE:
            show(engine.advance(session, None))
    if transcript_path:
        persist_transcript(session, transcript_path)
        click.echo(f"transcript written to {transcript_path}")


@main.command()
@click.argument("transcript_file", type=click.Path(exists=True))
def replay(transcript_file) -> None:
    """Render a saved transcript as a readable dialog."""
    try:
        records = parse_transcript(Path(transcript_file).read_text(encoding="utf-8"))
    except EngineError as exc:
        raise click.ClickException(str(exc))
    click.echo(render_dialog(records), nl=False)


if __name__ == "__main__":
    main()
