"""Interview question graph, customer profile slots, and answer routing.

The graph ships as a data file (nodes with transitions per parsed answer
class). Location-specific nodes get their question text resolved per sight
when a session starts, from that sight's pre-generated question set.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .lexicon import UNKNOWN, AnswerLexicon

EXIT = "exit"

TRI_STATE = ("yes", "no", "unknown")


@dataclass
class CustomerProfile:
    """Slot store filled by the interview. Slots are write-once."""

    participants: str = "unknown"  # alone | friend | family | unknown
    brings_children: str = "unknown"  # yes | no | unknown
    children_ages: list[int] = field(default_factory=list)
    uses_car: str = "unknown"  # yes | no | unknown
    points_of_interest: str = ""
    loc_answers: dict[tuple[str, int], str] = field(default_factory=dict)

    def set_once(self, slot: str, value) -> None:
        """Set a slot only if it still holds its zero value (slot monotonicity)."""
        current = getattr(self, slot)
        if current in ("unknown", "", []) or current is None:
            setattr(self, slot, value)


@dataclass(frozen=True)
class QuestionNode:
    id: int
    kind: str  # "mandatory" | "loc_wise"
    item: str
    text: str  # loc_wise nodes: filled at plan build time
    answer_schema: str  # yes_no | companion | ages | open
    transitions: dict[str, int | str]
    default: int | str
    loc_slot: int | None = None  # index into the sight's question set


@dataclass(frozen=True)
class QuestionGraph:
    entry: int
    nodes: dict[int, QuestionNode]

    @classmethod
    def load(cls, path: str | Path) -> "QuestionGraph":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"question graph file not found: {path}")
        raw = json.loads(path.read_text(encoding="utf-8"))
        nodes: dict[int, QuestionNode] = {}
        for entry in raw["nodes"]:
            node = QuestionNode(
                id=int(entry["id"]),
                kind=entry["kind"],
                item=entry["item"],
                text=entry.get("text", ""),
                answer_schema=entry["answer_schema"],
                transitions={
                    k: (v if v == EXIT else int(v))
                    for k, v in entry["transitions"].items()
                },
                default=entry["default"] if entry["default"] == EXIT else int(entry["default"]),
                loc_slot=entry.get("loc_slot"),
            )
            nodes[node.id] = node
        graph = cls(entry=int(raw["entry"]), nodes=nodes)
        graph.validate()
        return graph

    def validate(self) -> None:
        """Reachability from the entry node, exit on every path, no cycles."""
        if self.entry not in self.nodes:
            raise ConfigurationError(f"entry node {self.entry} missing from graph")
        seen: set[int] = set()
        on_path: set[int] = set()

        def visit(node_id: int) -> None:
            if node_id in on_path:
                raise ConfigurationError(f"question graph has a cycle through node {node_id}")
            if node_id in seen:
                return
            seen.add(node_id)
            on_path.add(node_id)
            node = self.nodes.get(node_id)
            if node is None:
                raise ConfigurationError(f"transition points at missing node {node_id}")
            targets = list(node.transitions.values()) + [node.default]
            if not targets:
                raise ConfigurationError(f"node {node_id} has no transitions")
            for target in targets:
                if target != EXIT:
                    visit(int(target))
            on_path.discard(node_id)

        visit(self.entry)
        unreachable = set(self.nodes) - seen
        if unreachable:
            raise ConfigurationError(f"unreachable question nodes: {sorted(unreachable)}")


# --- location-specific question sets -------------------------------------

QUESTION_FORMAT = re.compile(r"^Do you like .+\?$")

_NORM_PUNCT = re.compile(r"[^\w\s]")


def _normalize_question(text: str) -> str:
    return _NORM_PUNCT.sub("", text.lower()).strip().replace("  ", " ")


@dataclass(frozen=True)
class LocWiseQuestionSet:
    """Up to three pre-generated interest questions for one sight, each paired
    with the recommendation point it translates into."""

    sight_id: str
    questions: tuple[str, ...]
    source_points: tuple[str, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.questions) <= 3:
            raise ConfigurationError(
                f"{self.sight_id}: need 1-3 location questions, got {len(self.questions)}"
            )
        if len(self.questions) != len(self.source_points):
            raise ConfigurationError(f"{self.sight_id}: questions and points must be parallel")
        normalized = [_normalize_question(q) for q in self.questions]
        if len(set(normalized)) != len(normalized):
            raise ConfigurationError(f"{self.sight_id}: duplicate location questions")


def select_loc_questions(
    candidates: list[str],
    k: int = 3,
    question_format: re.Pattern = QUESTION_FORMAT,
) -> list[str]:
    """Keep the first k well-formed, distinct questions in generation order.

    Duplicates are folded on a case/whitespace/punctuation-insensitive key, so
    later re-generations of the same question never displace an earlier one.
    """
    selected: list[str] = []
    seen: set[str] = set()
    for candidate in candidates:
        text = candidate.strip()
        if not question_format.match(text):
            continue
        key = _normalize_question(text)
        if key in seen:
            continue
        seen.add(key)
        selected.append(text)
        if len(selected) >= k:
            break
    return selected


# --- per-assignment plan and answer routing -------------------------------


@dataclass(frozen=True)
class InterviewPlan:
    """The question graph instantiated for one sight's question set.

    Location nodes beyond the available questions are dropped and the last
    remaining location node is rewired to continue with the mandatory tail.
    """

    nodes: dict[int, QuestionNode]
    entry: int
    sight_id: str

    @classmethod
    def build(cls, graph: QuestionGraph, loc_set: LocWiseQuestionSet) -> "InterviewPlan":
        loc_ids = sorted(n.id for n in graph.nodes.values() if n.kind == "loc_wise")
        keep = loc_ids[: len(loc_set.questions)]
        dropped = set(loc_ids) - set(keep)

        def reroute(target):
            # Skip over dropped location nodes to the next surviving target.
            while target != EXIT and target in dropped:
                target = graph.nodes[target].default
            return target

        nodes: dict[int, QuestionNode] = {}
        for node in graph.nodes.values():
            if node.id in dropped:
                continue
            text = node.text
            if node.kind == "loc_wise":
                text = loc_set.questions[node.loc_slot]
            nodes[node.id] = QuestionNode(
                id=node.id,
                kind=node.kind,
                item=node.item,
                text=text,
                answer_schema=node.answer_schema,
                transitions={k: reroute(v) for k, v in node.transitions.items()},
                default=reroute(node.default),
                loc_slot=node.loc_slot,
            )
        return cls(nodes=nodes, entry=graph.entry, sight_id=loc_set.sight_id)

    def node(self, node_id: int) -> QuestionNode:
        return self.nodes[node_id]

    def transition(self, node_id: int, answer_class: str) -> int | str:
        node = self.nodes[node_id]
        if answer_class in node.transitions:
            return node.transitions[answer_class]
        raise KeyError(answer_class)


@dataclass
class InterviewStep:
    """Outcome of feeding one customer answer to the controller."""

    answer_class: str
    reask: bool  # re-ask the current question once more
    next_node: QuestionNode | None  # None when reask or finished
    finished: bool


class InterviewController:
    """Walks the plan, fills profile slots, and applies the re-ask policy.

    An unparseable answer re-asks the same question once; a second failure
    takes the node's default transition with the slot left unknown.
    """

    def __init__(self, plan: InterviewPlan, profile: CustomerProfile, lexicon: AnswerLexicon):
        self.plan = plan
        self.profile = profile
        self.lexicon = lexicon
        self.current_id: int = plan.entry
        self.reasked = False
        self.finished = False
        self.asked_nodes: list[int] = [plan.entry]

    @property
    def current(self) -> QuestionNode:
        return self.plan.node(self.current_id)

    def classify(self, utterance: str | None) -> str:
        node = self.current
        if node.answer_schema == "yes_no":
            return self.lexicon.classify_yes_no(utterance)
        if node.answer_schema == "companion":
            return self.lexicon.classify_companion(utterance)
        if node.answer_schema == "ages":
            return "ages" if self.lexicon.extract_ages(utterance) else UNKNOWN
        if node.answer_schema == "open":
            return "open" if utterance else UNKNOWN
        raise ConfigurationError(f"unknown answer schema {node.answer_schema!r}")

    def _record_slot(self, node: QuestionNode, answer_class: str, utterance: str | None) -> None:
        if node.item == "participants" and node.answer_schema == "companion":
            self.profile.set_once("participants", answer_class)
        elif node.item == "participants" and node.answer_schema == "yes_no":
            self.profile.set_once("brings_children", answer_class)
        elif node.answer_schema == "ages":
            self.profile.set_once("children_ages", self.lexicon.extract_ages(utterance))
        elif node.item == "transportation":
            self.profile.set_once("uses_car", answer_class)
        elif node.item == "points_of_interest":
            self.profile.set_once("points_of_interest", utterance or "")
        elif node.kind == "loc_wise":
            key = (self.plan.sight_id, node.loc_slot)
            if key not in self.profile.loc_answers:
                self.profile.loc_answers[key] = answer_class
        else:
            raise ConfigurationError(f"node {node.id} has no slot mapping")

    def observe(self, utterance: str | None) -> InterviewStep:
        if self.finished:
            raise ConfigurationError("interview already finished")
        node = self.current
        answer_class = self.classify(utterance)

        if answer_class == UNKNOWN:
            if not self.reasked:
                self.reasked = True
                return InterviewStep(UNKNOWN, reask=True, next_node=None, finished=False)
            target = node.default
        else:
            self._record_slot(node, answer_class, utterance)
            target = node.transitions[answer_class]

        self.reasked = False
        if target == EXIT:
            self.finished = True
            return InterviewStep(answer_class, reask=False, next_node=None, finished=True)
        self.current_id = int(target)
        self.asked_nodes.append(self.current_id)
        return InterviewStep(answer_class, reask=False, next_node=self.current, finished=False)
