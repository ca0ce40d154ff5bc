"""Session state machine: phase routing, clocked budget, turn emission.

One advance() call consumes at most one customer utterance and returns one
or more agent turns, appending everything to the session transcript. Phases
follow the fixed consultation scenario; once the time budget runs out, the
next decision point drops straight into the closing sequence.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

from . import qa as qa_ops
from .backends import GenBackend, MockBackend, RemoteBackend
from .bundle import ContentBundle, build_bundle, is_bundle_dir, load_bundle
from .closing import ClosingContext, MAX_CLOSING_REVIEWS, closing_turn_texts
from .config import EngineConfig
from .errors import ConfigurationError, TerminalSessionError
from .gateway import Gateway, record_metrics
from .interview import CustomerProfile, InterviewController, InterviewPlan, QuestionGraph
from .lexicon import UNKNOWN, AnswerLexicon
from .recommendation import (
    RecommendationBundle,
    counter_utterance,
    gather_search_context,
    recommend_utterance,
    select_points,
)
from .sightdb import ingest
from .types import (
    AgentTurn,
    Phase,
    SightAssignment,
    TurnRecord,
    make_agent_turn,
    normalize_utterance,
)

Clock = Callable[[], datetime]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


# Fixed utterances. None of them carries an exclamation mark, so every
# scripted greeting keeps the smiling expression.
GREETING_TURNS = (
    "Hello, and welcome to our travel counter. I am your guide today, and "
    "together we will find the tourist sight that suits you best.",
    "Before we begin, one small favor: please speak loudly and clearly, so "
    "that I do not miss a word.",
)
ICEBREAK_OPENER = "Now, to break the ice: what do you do for a living?"
BRIEF_OPENER = (
    "Thank you. I hear you are choosing between two tourist sights today: "
    "{name_a} and {name_b}."
)
BEEN_THERE_QUESTION = "Have you already visited either of them?"
BRIEF_YES_RESPONSE = (
    "Oh, then some of this may sound familiar. Let me still walk you through both."
)
BRIEF_NO_RESPONSE = "Then let me briefly walk you through both of them."
SUMMARY_FIRST = "First, {name}: {summary}"
SUMMARY_SECOND = "And second, {name}: {summary}"
INTERVIEW_OPENER = (
    "Now I would like to ask you a few quick questions, so that my "
    "recommendation really fits you."
)
INTERVIEW_REASK = "I am sorry, I did not quite catch that. {question}"
INTERVIEW_MOVE_ON = "Understood, let us move on."
QA_ASK = "That is everything from my side. Do you have any questions about either sight?"
QA_INVITE = "Of course. What would you like to know?"
QA_MORE = "Do you have any other questions?"
QA_REASK = "I may have missed that. Do you have any questions for me?"


@dataclass
class Session:
    session_id: str
    assignment: SightAssignment
    started_at: datetime
    time_budget: float
    phase: Phase = Phase.GREETING
    profile: CustomerProfile = field(default_factory=CustomerProfile)
    transcript: list[TurnRecord] = field(default_factory=list)
    icebreak_turn: int = 0  # 0..3
    interview: InterviewController | None = None
    recommendation: RecommendationBundle | None = None
    qa_state: str = "ask"  # "ask" | "await_question"
    qa_reasked: bool = False
    qa_answers: int = 0
    metrics: dict = field(default_factory=lambda: {"backend_calls": 0, "rejections": 0, "fallbacks": 0})

    @property
    def interview_nodes_asked(self) -> list[int]:
        return list(self.interview.asked_nodes) if self.interview else []


class DialogEngine:
    """Owns the catalog, bundle, gateway, and the scenario state machine."""

    def __init__(
        self,
        bundle: ContentBundle,
        gateway: Gateway,
        lexicon: AnswerLexicon,
        graph: QuestionGraph,
        config: EngineConfig,
        clock: Clock | None = None,
    ):
        self.bundle = bundle
        self.catalog = bundle.catalog
        self.gateway = gateway
        self.lexicon = lexicon
        self.graph = graph
        self.config = config
        self.clock: Clock = clock or utc_now

    @classmethod
    def from_config(cls, config: EngineConfig, clock: Clock | None = None) -> "DialogEngine":
        config.validate()
        backend = make_backend(config)
        from .templates import TemplatePack

        pack = TemplatePack.load(config.template_pack_path)
        gateway = Gateway(
            pack=pack,
            backend=backend,
            seed=config.backend.seed or 0,
            max_retries=config.max_retries,
        )
        lexicon = AnswerLexicon.load(config.lexicon_path)
        graph = QuestionGraph.load(config.question_graph_path)
        if is_bundle_dir(config.corpus_path):
            bundle = load_bundle(config.corpus_path, thresholds=config.thresholds,
                                 bigram_tokens=config.bigram_tokens)
        else:
            catalog = ingest(config.corpus_path, thresholds=config.thresholds,
                             bigram_tokens=config.bigram_tokens)
            bundle = build_bundle(catalog, gateway, loc_question_k=config.loc_question_k)
        return cls(bundle, gateway, lexicon, graph, config, clock=clock)

    # -- session lifecycle ---------------------------------------------------

    def create_session(self, assignment: SightAssignment) -> Session:
        for sight_id in (assignment.candidate_a, assignment.candidate_b):
            if sight_id not in self.catalog:
                raise ConfigurationError(f"unknown sight id {sight_id!r}")
            if sight_id not in self.bundle.question_sets:
                raise ConfigurationError(f"sight {sight_id!r} has no generated question set")
        return Session(
            session_id=uuid.uuid4().hex,
            assignment=assignment,
            started_at=self.clock(),
            time_budget=self.config.time_budget_s,
        )

    def elapsed(self, session: Session) -> float:
        return (self.clock() - session.started_at).total_seconds()

    def _over_budget(self, session: Session) -> bool:
        return self.elapsed(session) >= session.time_budget

    def advance(self, session: Session, utterance: str | None = None) -> list[AgentTurn]:
        """Feed one customer utterance (or silence) and get the agent's turns."""
        if session.phase is Phase.DONE:
            raise TerminalSessionError(f"session {session.session_id} is finished")
        text = normalize_utterance(utterance)
        if text is not None:
            session.transcript.append(
                TurnRecord(speaker="customer", text=text, phase=session.phase, ts=self.clock())
            )
        turns: list[AgentTurn] = []
        with record_metrics(session.metrics):
            if session.phase not in (Phase.CLOSING, Phase.DONE) and self._over_budget(session):
                session.phase = Phase.CLOSING
                self._emit_closing(session, turns)
            else:
                handler = {
                    Phase.GREETING: self._handle_greeting,
                    Phase.ICEBREAKER: self._handle_icebreaker,
                    Phase.BRIEF_EXPLANATION: self._handle_brief,
                    Phase.INTERVIEW: self._handle_interview,
                    Phase.QA: self._handle_qa,
                }[session.phase]
                handler(session, text, turns)
        if turns and session.phase is not Phase.DONE:
            # Nod while listening: cue rides on the turn that awaits the customer.
            turns[-1].annotations.nod_cue = True
        ts = self.clock()
        for turn in turns:
            session.transcript.append(
                TurnRecord(speaker="agent", text=turn.text, phase=turn.phase, ts=ts,
                           annotations=turn.annotations)
            )
        return turns

    # -- phase transitions -----------------------------------------------------

    def _enter(self, session: Session, phase: Phase, turns: list[AgentTurn]) -> None:
        if phase not in (Phase.CLOSING, Phase.DONE) and self._over_budget(session):
            phase = Phase.CLOSING
        session.phase = phase
        if phase is Phase.ICEBREAKER:
            session.icebreak_turn = 1
            turns.append(make_agent_turn(ICEBREAK_OPENER, phase))
        elif phase is Phase.BRIEF_EXPLANATION:
            name_a = self.catalog.get(session.assignment.candidate_a).name
            name_b = self.catalog.get(session.assignment.candidate_b).name
            turns.append(make_agent_turn(BRIEF_OPENER.format(name_a=name_a, name_b=name_b), phase))
            turns.append(make_agent_turn(BEEN_THERE_QUESTION, phase))
        elif phase is Phase.INTERVIEW:
            loc_set = self.bundle.question_sets[session.assignment.recommended]
            plan = InterviewPlan.build(self.graph, loc_set)
            session.interview = InterviewController(plan, session.profile, self.lexicon)
            turns.append(make_agent_turn(INTERVIEW_OPENER, phase))
            turns.append(self._question_turn(session.interview.current, phase))
        elif phase is Phase.RECOMMENDATION:
            self._emit_recommendation(session, turns)
            self._enter(session, Phase.QA, turns)
        elif phase is Phase.QA:
            session.qa_state = "ask"
            session.qa_reasked = False
            turns.append(make_agent_turn(QA_ASK, phase))
        elif phase is Phase.CLOSING:
            self._emit_closing(session, turns)

    def _question_turn(self, node, phase: Phase) -> AgentTurn:
        provenance = "generated" if node.kind == "loc_wise" else "fixed"
        return make_agent_turn(node.text, phase, provenance)

    # -- handlers ---------------------------------------------------------------

    def _handle_greeting(self, session: Session, text: str | None, turns: list[AgentTurn]) -> None:
        for line in GREETING_TURNS:
            turns.append(make_agent_turn(line, Phase.GREETING))
        self._enter(session, Phase.ICEBREAKER, turns)

    def _handle_icebreaker(self, session: Session, text: str | None, turns: list[AgentTurn]) -> None:
        if session.icebreak_turn == 1:
            result = self.gateway.icebreak_question("A customer sits down at the travel counter.", text or "")
            turns.append(make_agent_turn(result.text, Phase.ICEBREAKER, result.provenance))
            session.icebreak_turn = 2
        else:
            result = self.gateway.icebreak_comment(text or "")
            turns.append(make_agent_turn(result.text, Phase.ICEBREAKER, result.provenance))
            session.icebreak_turn = 3
            self._enter(session, Phase.BRIEF_EXPLANATION, turns)

    def _handle_brief(self, session: Session, text: str | None, turns: list[AgentTurn]) -> None:
        decision = self.lexicon.classify_yes_no(text)
        response = BRIEF_YES_RESPONSE if decision == "yes" else BRIEF_NO_RESPONSE
        turns.append(make_agent_turn(response, Phase.BRIEF_EXPLANATION))
        record_a = self.catalog.get(session.assignment.candidate_a)
        record_b = self.catalog.get(session.assignment.candidate_b)
        turns.append(make_agent_turn(
            SUMMARY_FIRST.format(name=record_a.name, summary=record_a.summary_one_line),
            Phase.BRIEF_EXPLANATION,
        ))
        turns.append(make_agent_turn(
            SUMMARY_SECOND.format(name=record_b.name, summary=record_b.summary_one_line),
            Phase.BRIEF_EXPLANATION,
        ))
        self._enter(session, Phase.INTERVIEW, turns)

    def _handle_interview(self, session: Session, text: str | None, turns: list[AgentTurn]) -> None:
        controller = session.interview
        node = controller.current
        step = controller.observe(text)
        if step.reask:
            turns.append(make_agent_turn(
                INTERVIEW_REASK.format(question=node.text), Phase.INTERVIEW,
            ))
            return
        if step.answer_class == UNKNOWN or not text:
            turns.append(make_agent_turn(INTERVIEW_MOVE_ON, Phase.INTERVIEW))
        else:
            result = self.gateway.comment(node.text, text)
            turns.append(make_agent_turn(result.text, Phase.INTERVIEW, result.provenance))
        if step.finished:
            self._enter(session, Phase.RECOMMENDATION, turns)
        else:
            turns.append(self._question_turn(step.next_node, Phase.INTERVIEW))

    def _emit_recommendation(self, session: Session, turns: list[AgentTurn]) -> None:
        assignment = session.assignment
        record = self.catalog.get(assignment.recommended)
        loc_set = self.bundle.question_sets[assignment.recommended]
        features = self.catalog.features(assignment.recommended)
        points = select_points(session.profile, loc_set, features, record.name)
        hits = gather_search_context(self.catalog, assignment.recommended, points,
                                     k=self.config.search_k)
        appeal = self.bundle.appeals[assignment.recommended]
        text, provenance = recommend_utterance(
            self.gateway, record.name, record.summary_one_line, appeal, hits, points,
        )
        turns.append(make_agent_turn(text, Phase.RECOMMENDATION, provenance))
        other = self.catalog.get(assignment.other)
        counter_text, counter_prov = counter_utterance(
            self.gateway, other.name, self.catalog.features(assignment.other), record.name,
        )
        turns.append(make_agent_turn(counter_text, Phase.RECOMMENDATION, counter_prov))
        session.recommendation = RecommendationBundle(
            sight_id=assignment.recommended, points=points, search_context=hits, appeal=appeal,
        )

    def _handle_qa(self, session: Session, text: str | None, turns: list[AgentTurn]) -> None:
        if session.qa_state == "await_question":
            if text is None:
                self._qa_reask_or_close(session, turns)
                return
            session.qa_reasked = False
            self._answer_question(session, text, turns)
            session.qa_state = "ask"
            turns.append(make_agent_turn(QA_MORE, Phase.QA))
            return
        decision = qa_ops.wants_question(text, self.lexicon)
        if decision == "no":
            self._enter(session, Phase.CLOSING, turns)
        elif decision == "yes":
            session.qa_reasked = False
            if self.lexicon.is_direct_question(text):
                self._answer_question(session, text, turns)
                turns.append(make_agent_turn(QA_MORE, Phase.QA))
            else:
                session.qa_state = "await_question"
                turns.append(make_agent_turn(QA_INVITE, Phase.QA))
        else:
            self._qa_reask_or_close(session, turns)

    def _qa_reask_or_close(self, session: Session, turns: list[AgentTurn]) -> None:
        if not session.qa_reasked:
            session.qa_reasked = True
            turns.append(make_agent_turn(QA_REASK, Phase.QA))
        else:
            self._enter(session, Phase.CLOSING, turns)

    def _answer_question(self, session: Session, question: str, turns: list[AgentTurn]) -> None:
        ctx = qa_ops.build_context(
            self.catalog,
            session.assignment.candidate_a,
            session.assignment.candidate_b,
            session.assignment.recommended,
            question,
            k=self.config.qa_k,
        )
        text, provenance = qa_ops.answer(self.gateway, ctx)
        turns.append(make_agent_turn(text, Phase.QA, provenance))
        session.qa_answers += 1

    def _emit_closing(self, session: Session, turns: list[AgentTurn]) -> None:
        record = self.catalog.get(session.assignment.recommended)
        ctx = ClosingContext(
            recommended_id=record.sight_id,
            recommended_name=record.name,
            summary_one_line=record.summary_one_line,
            positive_reviews=self.catalog.positive_reviews(record.sight_id, MAX_CLOSING_REVIEWS),
        )
        for text, provenance in closing_turn_texts(self.gateway, ctx):
            turns.append(make_agent_turn(text, Phase.CLOSING, provenance))
        session.phase = Phase.DONE

    # -- auxiliary hooks ---------------------------------------------------------

    def normalize_for_speech(self, text: str) -> str:
        """Speech-synthesis hook: spell out configured ambiguous characters."""
        return self.gateway.kana_normalize(text, self.config.kana_readings)


def make_backend(config: EngineConfig) -> GenBackend:
    if config.backend.kind == "mock":
        return MockBackend(seed=config.backend.seed or 0)
    return RemoteBackend(config.backend.endpoint, config.backend.credential_env)
