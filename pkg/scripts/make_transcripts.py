"""Regenerate the golden conversation transcripts under tests/data/.

Each transcript drives a fresh service session through a scripted list of
utterances and freezes every reply and effect row the API returned. The
replay tests then assert byte-identical behavior, so regenerate these
fixtures only on an intentional dialog change and eyeball the diff:

    python scripts/make_transcripts.py
"""

from __future__ import annotations

import json
from importlib.resources import as_file, files
from pathlib import Path

from fastapi.testclient import TestClient

from teachable.corpus import load_ag_news, preprocess_corpus
from teachable.embeddings import load_text_embeddings
from teachable.pipeline import default_config
from teachable.service import build_state, create_app

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"

SESSION_SEED = 0

# opening fields stable across runs (session_id and created_at are not)
OPENING_KEYS = ("mode", "prediction_mode", "replies", "article")

SCRIPTS = {
    # all three guidance contexts in order, an article advance, then a
    # capture on the next article
    "transcript_teaching.json": [
        "blockade exports",
        "yesterday morning",
        "diplomacy treaty",
        "next",
        "referee standings",
    ],
    # the repeat intent walks originals newest to oldest and parks at the
    # oldest; a recognized turn resets the walk; rephrase uses the node's
    # alternate wording
    "transcript_repeat.json": [
        "payroll profits",
        "repeat",
        "say that again",
        "once more",
        "again",
        "again",
        "can you rephrase that?",
        "repeat",
    ],
    # the three-step fallback ladder: paraphrase request, question repeat,
    # then skip to the next article; a recognized turn restarts the ladder
    "transcript_fallback.json": [
        "???",
        "hmm well maybe",
        "...",
        "okay",
        "???",
    ],
}


def fresh_client() -> TestClient:
    data = files("teachable.data")
    with as_file(data / "corpus/train.csv") as train, as_file(data / "corpus/test.csv") as test:
        split = preprocess_corpus(load_ag_news(train, test), default_config())
    with as_file(data / "embeddings_50d.txt") as emb:
        embeddings = load_text_embeddings(emb)
    return TestClient(create_app(build_state(split, embeddings)))


def record(client: TestClient, utterances: list[str]) -> dict:
    created = client.post("/v1/sessions", json={"seed": SESSION_SEED})
    created.raise_for_status()
    body = created.json()
    session_id = body["session_id"]
    transcript = {
        "session": {"seed": SESSION_SEED},
        "opening": {key: body[key] for key in OPENING_KEYS},
        "turns": [],
    }
    for text in utterances:
        response = client.post(f"/v1/sessions/{session_id}/utterance", json={"text": text})
        response.raise_for_status()
        transcript["turns"].append({"send": text, "response": response.json()})
    return transcript


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    client = fresh_client()
    for name, utterances in SCRIPTS.items():
        transcript = record(client, utterances)
        path = OUT_DIR / name
        path.write_text(
            json.dumps(transcript, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        print(f"wrote {path} ({len(transcript['turns'])} turns)")


if __name__ == "__main__":
    main()
