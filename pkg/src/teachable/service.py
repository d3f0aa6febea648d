"""Session-oriented HTTP API tying the dialog engine to the learner.

Sessions live in memory with an append-only JSONL event log written
through to disk (when a data directory is configured). Every mutating
request appends one contiguous group of events, so a session's keyword
store and learning curve are always reconstructible from its log alone.
Mutations are serialized per session; the corpus, embeddings, and base
model are shared read-only.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import bayes, dialog as dialog_mod
from .bayes import DEFAULT_ALPHA, NBModel, NBVariant
from .corpus import ClassLabel, CorpusSplit, LabeledDocument
from .embeddings import DEFAULT_TAU, EmbeddingStore, validate_tau
from .events import EventKind, EventLog, keyword_payload, now_ts, replay_store
from .evaluation import evaluate, select_teaching_articles
from .learner import (
    KeywordOrigin,
    KeywordPolarity,
    KeywordRecord,
    KeywordRejected,
    KeywordStore,
    PredictionMode,
    StoreSnapshot,
    predict_mode,
    record_keyword,
)
from .pipeline import PipelineConfig, default_config

TEACHING_ARTICLES_PER_CLASS = 5
TEACHING_QUEUE_LENGTH = TEACHING_ARTICLES_PER_CLASS * len(ClassLabel)


class ServiceError(Exception):
    """Server-side setup problem (bad corpus, missing resources)."""


@dataclass
class Session:
    session_id: str
    seed: int
    dialog_state: dialog_mod.DialogState
    store: KeywordStore
    prediction_mode: PredictionMode
    teaching_queue: list[int]
    test_queue: list[int]
    created_at: str
    log: EventLog
    teach_position: int = 0
    test_position: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    _snapshot: StoreSnapshot | None = None

    def invalidate(self) -> None:
        self._snapshot = None

    def snapshot(self, embeddings: EmbeddingStore, tau: float) -> StoreSnapshot:
        if self._snapshot is None:
            self._snapshot = StoreSnapshot(self.store, embeddings, tau)
        return self._snapshot


@dataclass
class AppState:
    split: CorpusSplit
    embeddings: EmbeddingStore
    tau: float
    alpha: float
    base_model: NBModel | None
    default_mode: PredictionMode
    seed: int
    data_dir: Path | None
    tree: dialog_mod.ConversationTree
    rules: list[dialog_mod.IntentRule]
    pipeline_config: PipelineConfig
    sessions: dict[str, Session] = field(default_factory=dict)
    registry_lock: threading.Lock = field(default_factory=threading.Lock)
    train_by_class: dict[ClassLabel, list[LabeledDocument]] = field(default_factory=dict)
    train_by_id: dict[int, LabeledDocument] = field(default_factory=dict)
    test_by_id: dict[int, LabeledDocument] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label in ClassLabel:
            self.train_by_class[label] = [d for d in self.split.train if d.label == label]
        self.train_by_id = {d.id: d for d in self.split.train}
        self.test_by_id = {d.id: d for d in self.split.test}


def build_state(
    split: CorpusSplit,
    embeddings: EmbeddingStore,
    *,
    tau: float = DEFAULT_TAU,
    alpha: float = DEFAULT_ALPHA,
    variant: NBVariant = NBVariant.MULTINOMIAL,
    default_mode: PredictionMode = PredictionMode.COMBINED,
    seed: int = 0,
    data_dir: str | Path | None = None,
    fit_base_model: bool = True,
) -> AppState:
    """Assemble shared server state from already-preprocessed resources."""
    validate_tau(tau)
    if not split.train or not split.test:
        raise ServiceError("server needs non-empty train and test splits")
    for label in ClassLabel:
        if sum(1 for d in split.train if d.label == label) < TEACHING_ARTICLES_PER_CLASS:
            raise ServiceError(
                f"need at least {TEACHING_ARTICLES_PER_CLASS} training articles for "
                f"{label.display_name}"
            )
    base_model = bayes.fit(split.train, variant=variant, alpha=alpha) if fit_base_model else None
    if base_model is None and default_mode is not PredictionMode.KEYWORDS_ONLY:
        raise ServiceError(f"default mode {default_mode.value} needs a fitted base model")
    path = Path(data_dir) if data_dir is not None else None
    if path is not None:
        path.mkdir(parents=True, exist_ok=True)
    return AppState(
        split=split,
        embeddings=embeddings,
        tau=tau,
        alpha=alpha,
        base_model=base_model,
        default_mode=default_mode,
        seed=seed,
        data_dir=path,
        tree=dialog_mod.default_tree(),
        rules=dialog_mod.default_rules(),
        pipeline_config=default_config(),
    )


def build_queues(state: AppState, seed: int) -> tuple[list[int], list[int]]:
    """Deterministic article queues for one session seed.

    Teaching queue: 5 articles per class from a seeded shuffle of each
    class's training docs, interleaved round-robin so consecutive
    articles rotate through the classes. Test queue: seeded shuffle of
    the whole test split.
    """
    teaching = [
        d.id
        for d in select_teaching_articles(
            state.split.train, seed, per_class=TEACHING_ARTICLES_PER_CLASS
        )
    ]
    rng = random.Random(f"test-queue:{seed}")
    test_ids = [d.id for d in state.split.test]
    rng.shuffle(test_ids)
    return teaching, test_ids


def _session_meta_path(state: AppState, session_id: str) -> Path | None:
    if state.data_dir is None:
        return None
    return state.data_dir / f"session-{session_id}.meta.json"


def _session_log_path(state: AppState, session_id: str) -> Path | None:
    if state.data_dir is None:
        return None
    return state.data_dir / f"session-{session_id}.jsonl"


def create_session(
    state: AppState,
    seed: int | None = None,
    prediction_mode: PredictionMode | None = None,
) -> Session:
    mode = prediction_mode if prediction_mode is not None else state.default_mode
    if mode is not PredictionMode.KEYWORDS_ONLY and state.base_model is None:
        raise ServiceError(f"prediction mode {mode.value} needs a fitted base model")
    session_seed = seed if seed is not None else state.seed
    teaching, test_ids = build_queues(state, session_seed)
    session_id = uuid.uuid4().hex
    session = Session(
        session_id=session_id,
        seed=session_seed,
        dialog_state=dialog_mod.DialogState(),
        store=KeywordStore(),
        prediction_mode=mode,
        teaching_queue=teaching,
        test_queue=test_ids,
        created_at=now_ts(),
        log=EventLog(_session_log_path(state, session_id)),
    )
    meta_path = _session_meta_path(state, session_id)
    if meta_path is not None:
        meta_path.write_text(
            json.dumps(
                {
                    "session_id": session_id,
                    "seed": session_seed,
                    "created_at": session.created_at,
                    "prediction_mode": mode.value,
                    "teaching_queue": teaching,
                    "test_queue": test_ids,
                },
                ensure_ascii=False,
            )
            + "\n",
            encoding="utf-8",
        )
    greeting = dialog_mod.opening(session.dialog_state, state.tree)
    intro = _begin_current_article(state, session)
    session.log.append(EventKind.AGENT_REPLY, {"text": greeting})
    session.log.append(EventKind.AGENT_REPLY, {"text": intro})
    with state.registry_lock:
        state.sessions[session_id] = session
    return session


def restore_sessions(state: AppState) -> list[str]:
    """Rebuild sessions from meta + log files after a server restart.

    The keyword store, mode, prediction mode, queue positions, and the
    visible conversation history are event-sourced back exactly; the
    repeat cursor and fallback counter restart at zero.
    """
    if state.data_dir is None:
        return []
    restored: list[str] = []
    for meta_path in sorted(state.data_dir.glob("session-*.meta.json")):
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        session_id = meta["session_id"]
        log = EventLog(_session_log_path(state, session_id))
        ds = dialog_mod.DialogState()
        teach_position = 0
        mode = dialog_mod.Mode.TEACHING
        for event in log.events:
            if event.kind is EventKind.UTTERANCE_IN:
                ds.history.append(("user", event.payload.get("text", "")))
            elif event.kind is EventKind.AGENT_REPLY:
                text = event.payload.get("text", "")
                ds.history.append(("agent", text))
                ds.agent_originals.append(text)
            elif event.kind is EventKind.MODE_SWITCH:
                mode = dialog_mod.Mode(event.payload["mode"])
            elif event.kind is EventKind.ARTICLE_ADVANCED:
                teach_position += 1
        session = Session(
            session_id=session_id,
            seed=meta["seed"],
            dialog_state=ds,
            store=replay_store(log.events),
            prediction_mode=PredictionMode(meta["prediction_mode"]),
            teaching_queue=list(meta["teaching_queue"]),
            test_queue=list(meta["test_queue"]),
            created_at=meta["created_at"],
            log=log,
            teach_position=teach_position % len(meta["teaching_queue"]),
        )
        ds.mode = mode
        teaching_doc = state.train_by_id[
            session.teaching_queue[session.teach_position % len(session.teaching_queue)]
        ]
        ds.current_article_id = teaching_doc.id
        ds.current_category = ClassLabel(teaching_doc.label)
        if mode is dialog_mod.Mode.TESTING:
            ds.context = dialog_mod.HeuristicContext.NEUTRAL
            ds.tree_position = "test_hub"
        else:
            ds.tree_position = "teach_hub"
        with state.registry_lock:
            state.sessions[session_id] = session
        restored.append(session_id)
    return restored


def _get_session(state: AppState, session_id: str) -> Session:
    session = state.sessions.get(session_id)
    if session is None:
        raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
    return session


def _current_article(state: AppState, session: Session) -> LabeledDocument:
    if session.dialog_state.mode is dialog_mod.Mode.TEACHING:
        doc_id = session.teaching_queue[session.teach_position % len(session.teaching_queue)]
        return state.train_by_id[doc_id]
    doc_id = session.test_queue[session.test_position % len(session.test_queue)]
    return state.test_by_id[doc_id]


def _article_payload(state: AppState, session: Session) -> dict:
    doc = _current_article(state, session)
    teaching = session.dialog_state.mode is dialog_mod.Mode.TEACHING
    position = session.teach_position if teaching else session.test_position
    total = len(session.teaching_queue) if teaching else len(session.test_queue)
    return {
        "article_id": doc.id,
        "title": doc.title,
        "body": doc.body,
        "category": ClassLabel(doc.label).display_name if teaching else None,
        "mode": session.dialog_state.mode.value,
        "position": position % total,
        "total": total,
    }


def _begin_current_article(state: AppState, session: Session) -> str:
    # the dialog state tracks the current TEACHING article; test-mode
    # navigation lives in session.test_position and never touches it,
    # so category templates stay correct across mode switches
    doc = _current_article(state, session)
    return dialog_mod.begin_article(session.dialog_state, doc.id, ClassLabel(doc.label))


def _classify_article(state: AppState, session: Session, doc: LabeledDocument) -> dict:
    base = state.base_model if session.prediction_mode is not PredictionMode.KEYWORDS_ONLY else None
    if session.prediction_mode is PredictionMode.BASELINE:
        predicted, scores = predict_mode(
            session.prediction_mode, session.store, state.embeddings, state.tau, doc, state.base_model
        )
    else:
        predicted, scores = predict_mode(
            session.prediction_mode,
            session.snapshot(state.embeddings, state.tau),
            state.embeddings,
            state.tau,
            doc,
            base,
        )
    correct = ClassLabel(predicted) == ClassLabel(doc.label)
    return {
        "article_id": doc.id,
        "predicted": int(predicted),
        "predicted_label": ClassLabel(predicted).display_name,
        "correct": correct,
        "mode": session.prediction_mode.value,
        "scores": {ClassLabel(lab).display_name: score for lab, score in scores.items()},
    }


class CreateSessionBody(BaseModel):
    seed: int | None = None
    prediction_mode: Literal["baseline", "keywords_only", "combined"] | None = None


class UtteranceBody(BaseModel):
    text: str = Field(max_length=4000)


class HighlightBody(BaseModel):
    word: str = Field(min_length=1, max_length=200)
    article_id: int


class ModeBody(BaseModel):
    mode: Literal["teaching", "testing"]


class ClassifyBody(BaseModel):
    article_id: int


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="teachable", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.teachable = state

    @app.post("/v1/sessions")
    def post_sessions(body: CreateSessionBody) -> dict:
        mode = PredictionMode(body.prediction_mode) if body.prediction_mode else None
        try:
            session = create_session(state, seed=body.seed, prediction_mode=mode)
        except ServiceError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        greeting, intro = session.dialog_state.agent_originals[:2]
        return {
            "session_id": session.session_id,
            "created_at": session.created_at,
            "mode": session.dialog_state.mode.value,
            "prediction_mode": session.prediction_mode.value,
            "replies": [greeting, intro],
            "article": _article_payload(state, session),
        }

    @app.get("/v1/sessions/{session_id}/article")
    def get_article(session_id: str) -> dict:
        session = _get_session(state, session_id)
        with session.lock:
            return _article_payload(state, session)

    @app.post("/v1/sessions/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody) -> dict:
        session = _get_session(state, session_id)
        with session.lock:
            session.log.append(EventKind.UTTERANCE_IN, {"text": body.text})
            _, reply, effects = dialog_mod.advance(
                session.dialog_state, body.text, state.tree, state.rules, state.pipeline_config
            )
            effect_rows: list[dict] = []
            # state-change events land before the reply that reports them
            for effect in effects:
                if isinstance(effect, dialog_mod.KeywordCaptured):
                    record = KeywordRecord(
                        lemma=effect.lemma,
                        label=session.dialog_state.current_category,
                        polarity=effect.polarity,
                        origin=effect.origin,
                        sequence_number=session.store.next_sequence_number(),
                    )
                    session.store.append(record)
                    session.invalidate()
                    session.log.append(EventKind.KEYWORD, keyword_payload(record))
                    effect_rows.append(
                        {
                            "kind": "keyword",
                            "lemma": record.lemma,
                            "class": int(record.label),
                            "polarity": record.polarity.value,
                            "origin": record.origin.value,
                        }
                    )
                elif isinstance(effect, dialog_mod.ModeSwitched):
                    session.log.append(EventKind.MODE_SWITCH, {"mode": effect.mode.value})
                    effect_rows.append({"kind": "mode_switch", "mode": effect.mode.value})
            replies = [reply]
            session.log.append(EventKind.AGENT_REPLY, {"text": reply})
            classification: dict | None = None
            article_changed = any(r["kind"] == "mode_switch" for r in effect_rows)
            # composed follow-ups (next article intro, classification
            # verdict) come after the dialog reply, in both the log and
            # the visible conversation
            for effect in effects:
                if isinstance(effect, dialog_mod.ArticleAdvanced):
                    if session.dialog_state.mode is dialog_mod.Mode.TEACHING:
                        completed = session.teaching_queue[
                            session.teach_position % len(session.teaching_queue)
                        ]
                        session.log.append(EventKind.ARTICLE_ADVANCED, {"article_id": completed})
                        session.teach_position += 1
                        intro = _begin_current_article(state, session)
                        replies.append(intro)
                        session.log.append(EventKind.AGENT_REPLY, {"text": intro})
                    else:
                        session.test_position += 1
                    effect_rows.append({"kind": "article_advanced"})
                    article_changed = True
                elif isinstance(effect, dialog_mod.ClassifyRequested):
                    doc = _current_article(state, session)
                    classification = _classify_article(state, session, doc)
                    session.log.append(
                        EventKind.CLASSIFY,
                        {
                            "article_id": classification["article_id"],
                            "predicted": classification["predicted"],
                            "correct": classification["correct"],
                            "mode": classification["mode"],
                        },
                    )
                    verdict = f"I think this one is {classification['predicted_label']}."
                    replies.append(dialog_mod.say(session.dialog_state, verdict))
                    session.log.append(EventKind.AGENT_REPLY, {"text": verdict})
                    effect_rows.append({"kind": "classify", **classification})
            out = {
                "replies": replies,
                "effects": effect_rows,
                "mode": session.dialog_state.mode.value,
            }
            if classification is not None:
                out["classification"] = classification
            if article_changed:
                out["article"] = _article_payload(state, session)
            return out

    @app.post("/v1/sessions/{session_id}/highlight")
    def post_highlight(session_id: str, body: HighlightBody) -> dict:
        session = _get_session(state, session_id)
        with session.lock:
            if session.dialog_state.mode is not dialog_mod.Mode.TEACHING:
                raise HTTPException(
                    status_code=409, detail="highlighting teaches; switch to teaching mode first"
                )
            current = _current_article(state, session)
            if body.article_id != current.id:
                raise HTTPException(
                    status_code=409,
                    detail=f"article {body.article_id} is not the session's current article",
                )
            try:
                record = record_keyword(
                    session.store,
                    body.word,
                    ClassLabel(current.label),
                    KeywordPolarity.RELEVANT,
                    KeywordOrigin.HIGHLIGHT,
                    state.pipeline_config,
                )
            except KeywordRejected as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            session.invalidate()
            session.log.append(EventKind.KEYWORD, keyword_payload(record))
            return {
                "ok": True,
                "lemma": record.lemma,
                "class": int(record.label),
                "category": record.label.display_name,
                "polarity": record.polarity.value,
                "origin": record.origin.value,
            }

    @app.post("/v1/sessions/{session_id}/mode")
    def post_mode(session_id: str, body: ModeBody) -> dict:
        session = _get_session(state, session_id)
        with session.lock:
            target = dialog_mod.Mode(body.mode)
            changed = target is not session.dialog_state.mode
            if changed:
                session.dialog_state.mode = target
                if target is dialog_mod.Mode.TESTING:
                    session.dialog_state.context = dialog_mod.HeuristicContext.NEUTRAL
                    session.dialog_state.tree_position = "test_hub"
                else:
                    session.dialog_state.context = dialog_mod.CONTEXT_ROTATION[0]
                    session.dialog_state.tree_position = "teach_hub"
            session.log.append(EventKind.MODE_SWITCH, {"mode": target.value})
            return {"mode": target.value, "changed": changed}

    @app.post("/v1/sessions/{session_id}/classify")
    def post_classify(session_id: str, body: ClassifyBody) -> dict:
        session = _get_session(state, session_id)
        with session.lock:
            if session.dialog_state.mode is not dialog_mod.Mode.TESTING:
                raise HTTPException(
                    status_code=409, detail="classification runs in testing mode; switch modes first"
                )
            doc = state.test_by_id.get(body.article_id)
            if doc is None:
                raise HTTPException(
                    status_code=404, detail=f"article {body.article_id} is not in the test split"
                )
            classification = _classify_article(state, session, doc)
            session.log.append(
                EventKind.CLASSIFY,
                {
                    "article_id": classification["article_id"],
                    "predicted": classification["predicted"],
                    "correct": classification["correct"],
                    "mode": classification["mode"],
                },
            )
            return classification

    @app.get("/v1/sessions/{session_id}/metrics")
    def get_metrics(session_id: str, sample_n: int = Query(default=40, ge=4)) -> dict:
        session = _get_session(state, session_id)
        with session.lock:
            rng = random.Random(f"metrics:{state.seed}:{sample_n}")
            docs = state.split.test
            sample = rng.sample(docs, min(sample_n, len(docs)))
            base = (
                state.base_model
                if session.prediction_mode is not PredictionMode.KEYWORDS_ONLY
                else None
            )
            metrics = evaluate(
                sample,
                session.prediction_mode,
                session.snapshot(state.embeddings, state.tau),
                state.embeddings,
                state.tau,
                base,
            )
            return {
                "sample_n": len(sample),
                "prediction_mode": session.prediction_mode.value,
                "keywords_taught": len(session.store.records),
                **metrics.to_dict(),
            }

    @app.get("/v1/sessions/{session_id}/log")
    def get_log(session_id: str) -> PlainTextResponse:
        session = _get_session(state, session_id)
        with session.lock:
            lines = "".join(event.to_json() + "\n" for event in session.log.events)
        return PlainTextResponse(lines, media_type="application/x-ndjson")

    return app
