import json
from importlib.resources import as_file, files
from pathlib import Path

import pytest

from teachable.bayes import NBVariant, fit
from teachable.corpus import load_ag_news, preprocess_corpus
from teachable.embeddings import load_text_embeddings
from teachable.pipeline import default_config

TRANSCRIPT_DIR = Path(__file__).parent / "data"

# opening fields compared on transcript replay (session_id and created_at
# are fresh every run)
TRANSCRIPT_OPENING_KEYS = ("mode", "prediction_mode", "replies", "article")


def bundled(relative: str):
    with as_file(files("teachable.data") / relative) as p:
        return p


@pytest.fixture(scope="session")
def pipeline_config():
    return default_config()


@pytest.fixture(scope="session")
def split(pipeline_config):
    raw = load_ag_news(bundled("corpus/train.csv"), bundled("corpus/test.csv"))
    return preprocess_corpus(raw, pipeline_config)


@pytest.fixture(scope="session")
def embeddings():
    return load_text_embeddings(bundled("embeddings_50d.txt"))


@pytest.fixture(scope="session")
def multinomial(split):
    return fit(split.train, variant=NBVariant.MULTINOMIAL)


@pytest.fixture(scope="session")
def bernoulli(split):
    return fit(split.train, variant=NBVariant.BERNOULLI)


def oracle_train(docs):
    """Package documents -> the plain structures tests/oracles.py expects."""
    return [(int(d.label), dict(d.lemmas)) for d in docs]


def oracle_records(store):
    """KeywordStore -> ordered (lemma, label, polarity) triples."""
    return [(r.lemma, int(r.label), r.polarity.value) for r in store.records]


@pytest.fixture(scope="session")
def service_client(split, embeddings):
    """One shared API client over the bundled corpus (combined mode)."""
    from fastapi.testclient import TestClient

    from teachable.service import build_state, create_app

    return TestClient(create_app(build_state(split, embeddings)))


def load_transcript(name):
    return json.loads((TRANSCRIPT_DIR / name).read_text(encoding="utf-8"))


def replay_transcript(client, transcript):
    """Drive a fresh session through a recorded script, asserting that every
    reply and effect comes back exactly as frozen."""
    created = client.post("/v1/sessions", json={"seed": transcript["session"]["seed"]})
    assert created.status_code == 200
    body = created.json()
    opening = {key: body[key] for key in TRANSCRIPT_OPENING_KEYS}
    assert opening == transcript["opening"]
    session_id = body["session_id"]
    for i, turn in enumerate(transcript["turns"]):
        response = client.post(f"/v1/sessions/{session_id}/utterance", json={"text": turn["send"]})
        assert response.status_code == 200, f"turn {i}: {response.text}"
        assert response.json() == turn["response"], f"turn {i} ({turn['send']!r}) diverged"
    return session_id
