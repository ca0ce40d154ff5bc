"""Transcript persistence: line-delimited records, replay, reconstruction.

One JSON object per line, UTF-8, LF-terminated:
    {ts, speaker, phase, text, annotations?}
Agent lines carry annotations {expression, nod_cue, look_at_monitor,
provenance}; customer lines never do. Writing the same session twice
produces byte-identical output.
"""

from __future__ import annotations

import io
import json
from datetime import datetime
from pathlib import Path

from .errors import EngineError
from .types import AgentAnnotations, Phase, TurnRecord


def record_to_obj(record: TurnRecord) -> dict:
    obj = {
        "ts": record.ts.isoformat(timespec="microseconds"),
        "speaker": record.speaker,
        "phase": record.phase.value,
        "text": record.text,
    }
    if record.annotations is not None:
        obj["annotations"] = {
            "expression": record.annotations.expression,
            "nod_cue": record.annotations.nod_cue,
            "look_at_monitor": record.annotations.look_at_monitor,
            "provenance": record.annotations.provenance,
        }
    return obj


def obj_to_record(obj: dict) -> TurnRecord:
    annotations = None
    if "annotations" in obj:
        a = obj["annotations"]
        annotations = AgentAnnotations(
            expression=a["expression"],
            nod_cue=bool(a["nod_cue"]),
            look_at_monitor=bool(a["look_at_monitor"]),
            provenance=a["provenance"],
        )
    return TurnRecord(
        speaker=obj["speaker"],
        text=obj["text"],
        phase=Phase(obj["phase"]),
        ts=datetime.fromisoformat(obj["ts"]),
        annotations=annotations,
    )


def serialize_records(records: list[TurnRecord]) -> str:
    return "".join(
        json.dumps(record_to_obj(r), ensure_ascii=False, separators=(",", ":")) + "\n"
        for r in records
    )


def parse_transcript(text: str) -> list[TurnRecord]:
    records = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            records.append(obj_to_record(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise EngineError(f"transcript line {line_no}: {exc}") from exc
    return records


def persist_transcript(session, sink) -> None:
    """Write the whole transcript to a path or text file object.

    Idempotent for an unchanged session; an I/O failure leaves the
    in-memory session untouched.
    """
    payload = serialize_records(session.transcript)
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(payload, encoding="utf-8")
    elif isinstance(sink, io.TextIOBase) or hasattr(sink, "write"):
        sink.write(payload)
    else:
        raise TypeError(f"unsupported transcript sink: {type(sink)!r}")


def render_dialog(records: list[TurnRecord]) -> str:
    """Human-readable rendering used by the replay command."""
    lines = []
    last_phase = None
    for record in records:
        if record.phase is not last_phase:
            lines.append(f"--- {record.phase.value} ---")
            last_phase = record.phase
        marks = ""
        if record.annotations is not None:
            cues = [record.annotations.expression]
            if record.annotations.nod_cue:
                cues.append("nod")
            if record.annotations.look_at_monitor:
                cues.append("monitor")
            marks = f" [{','.join(cues)}]"
        speaker = "guide" if record.speaker == "agent" else "customer"
        lines.append(f"{speaker}{marks}: {record.text}")
    return "\n".join(lines) + ("\n" if lines else "")


def rebuild_session(engine, assignment, records: list[TurnRecord]):
    """Reconstruct session state by replaying the customer's utterances.

    With a deterministic backend and the same engine configuration, driving
    a fresh session with the recorded customer turns reproduces the phase
    and profile of the original session.
    """
    session = engine.create_session(assignment)
    engine.advance(session, None)
    for record in records:
        if record.speaker != "customer":
            continue
        if session.phase is Phase.DONE:
            break
        engine.advance(session, record.text)
    return session
