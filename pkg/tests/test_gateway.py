"""Generation ops: filters, retries, fallbacks, grounding, kana hook."""

import random
import re

import pytest

from conftest import FailingBackend, ScriptedBackend

from tourbot.backends import MockBackend
from tourbot.errors import CorpusError
from tourbot.gateway import FilterPolicy, Gateway, complete_with_policy
from tourbot.sightdb import SearchHit, digit_runs


def scripted_gateway(pack, outputs, max_retries=2):
    backend = ScriptedBackend(outputs)
    return Gateway(pack=pack, backend=backend, seed=0, max_retries=max_retries), backend


class TestCompleteWithPolicy:
    def test_fallback_after_exactly_max_retries_rejections(self, pack):
        gateway, backend = scripted_gateway(pack, ["is this ok?"], max_retries=2)
        result = gateway.icebreak_comment("I fix bicycles")  # question marks rejected
        assert result.text == gateway.policies["icebreak_comment"].fallback
        assert result.provenance == "fixed"
        assert result.rejections == 2
        assert backend.calls == 2

    def test_accepts_on_second_attempt(self, pack):
        gateway, backend = scripted_gateway(pack, ["rejected?", "A fine craft."])
        result = gateway.icebreak_comment("I fix bicycles")
        assert result.text == "A fine craft."
        assert result.provenance == "generated"
        assert result.rejections == 1 and backend.calls == 2

    def test_retry_increments_seed(self, pack):
        gateway, backend = scripted_gateway(pack, ["no good?", "still bad?", "x"], max_retries=3)
        gateway.icebreak_comment("anything")
        assert backend.seeds == [0, 1, 2]

    def test_transport_failure_counts_as_rejection(self, pack):
        backend = FailingBackend()
        gateway = Gateway(pack=pack, backend=backend, seed=0, max_retries=2)
        result = gateway.icebreak_comment("anything")
        assert result.provenance == "fixed"
        assert backend.calls == 2

    def test_never_more_than_max_retries_calls(self, pack):
        for retries in (1, 2, 4):
            gateway, backend = scripted_gateway(pack, ["always bad?"], max_retries=retries)
            gateway.icebreak_comment("anything")
            assert backend.calls == retries


class TestIcebreakOps:
    def test_follow_up_mentions_the_work(self, gateway):
        result = gateway.icebreak_question("ctx", "I am a manager in an IT company.")
        assert result.text.rstrip().endswith("?")
        assert "manager" in result.text or "IT company" in result.text

    def test_empty_answer_falls_back_to_fixed_question(self, gateway):
        result = gateway.icebreak_question("ctx", "")
        assert result.provenance == "fixed"
        assert result.text.rstrip().endswith("?")

    def test_mock_is_deterministic(self, pack):
        a = Gateway(pack=pack, backend=MockBackend(seed=7), seed=7)
        b = Gateway(pack=pack, backend=MockBackend(seed=7), seed=7)
        assert a.icebreak_question("c", "I teach middle school.").text == \
            b.icebreak_question("c", "I teach middle school.").text

    def test_comment_has_no_question_mark(self, gateway):
        result = gateway.icebreak_comment("I teach middle school.")
        assert "?" not in result.text and "？" not in result.text
        assert result.text


class TestCommentOp:
    def test_comment_echoes_answer_fragment(self, gateway):
        result = gateway.comment("How old are your children?", "They are 5 and 2 years old.")
        assert "5 and 2" in result.text
        assert "?" not in result.text

    def test_question_mark_output_rejected_then_retried(self, pack):
        gateway, backend = scripted_gateway(pack, ["did you say five?", "Five, got it."])
        result = gateway.comment("q", "five")
        assert result.text == "Five, got it."
        assert backend.calls == 2

    def test_exhausted_retries_fall_back_to_neutral_ack(self, pack):
        gateway, _ = scripted_gateway(pack, ["why though?"])
        result = gateway.comment("q", "five")
        assert result.provenance == "fixed"
        assert result.text == gateway.policies["comment"].fallback

    def test_comment_class_never_questions_under_fuzz(self, gateway):
        rng = random.Random(1234)
        words = "five two museum park kids train beach robots history rain".split()
        for _ in range(300):
            answer = " ".join(rng.choices(words, k=rng.randint(1, 6)))
            for result in (gateway.comment("q", answer), gateway.icebreak_comment(answer)):
                assert "?" not in result.text and "？" not in result.text


class TestSummarize:
    def test_first_sentence_oracle(self, gateway, catalog):
        record = catalog.get("daiba_park")
        expected = re.split(r"(?<=[.!?])\s+", record.summary_long)[0]
        budget = gateway.pack.get("summarize").max_length
        assert gateway.summarize(record.summary_long) == expected[:budget].rstrip()

    def test_single_line_within_budget(self, gateway, catalog):
        for sight_id in catalog.order:
            line = gateway.summarize(catalog.get(sight_id).summary_long)
            assert "\n" not in line
            assert len(line) <= gateway.pack.get("summarize").max_length

    def test_empty_input_is_a_build_error(self, gateway):
        with pytest.raises(CorpusError):
            gateway.summarize("   ")


class TestGenerateQuestions:
    def test_daiba_summary_yields_history_flavored_question(self, gateway, engine):
        summary = engine.catalog.get("daiba_park").summary_one_line
        questions = gateway.generate_questions(summary)
        assert questions
        assert any("edo" in q.lower() or "history" in q.lower() for q in questions)

    def test_all_candidates_match_required_format(self, gateway, engine):
        for sight_id in engine.catalog.order:
            summary = engine.catalog.get(sight_id).summary_one_line
            for q in gateway.generate_questions(summary):
                assert re.match(r"^Do you like .+\?$", q)

    def test_non_conforming_lines_dropped(self, pack):
        gateway, _ = scripted_gateway(pack, ["- Do you like boats?\n- Boats are great\n- Do you like piers?"])
        assert gateway.generate_questions("anything") == ["Do you like boats?", "Do you like piers?"]

    def test_mock_determinism(self, gateway, engine):
        summary = engine.catalog.get("seaside_park").summary_one_line
        assert gateway.generate_questions(summary) == gateway.generate_questions(summary)


class TestExtractInfo:
    def _decks_hits(self, catalog):
        record = catalog.get("trick_art_museum")
        return [
            SearchHit("trick_art_museum", "business_hours", record.business_hours, 1.0),
            SearchHit("trick_art_museum", "location", record.location, 1.0),
            SearchHit("trick_art_museum", "access", record.access, 1.0),
            SearchHit("trick_art_museum", "charge", record.charge, 1.0),
        ]

    def test_price_question_returns_charge_line_exactly(self, gateway, catalog):
        hits = self._decks_hits(catalog)
        result = gateway.extract_info(hits, "How much is it?")
        assert result.text == catalog.get("trick_art_museum").charge

    def test_location_question_returns_location_line_exactly(self, gateway, catalog):
        hits = self._decks_hits(catalog)
        result = gateway.extract_info(hits, "Where is it?")
        assert result.text == catalog.get("trick_art_museum").location

    def test_fabricated_number_rejected_then_top_hit_returned(self, pack, catalog):
        gateway, backend = scripted_gateway(pack, ["It costs 9,999yen"])
        hits = self._decks_hits(catalog)
        result = gateway.extract_info(hits, "How much is it?")
        assert result.text == hits[0].text
        assert result.provenance == "retrieved"
        assert backend.calls == 2

    def test_no_hits_is_a_caller_error(self, gateway):
        with pytest.raises(ValueError):
            gateway.extract_info([], "How much?")

    def test_digit_containment_invariant(self, gateway, catalog):
        hits = self._decks_hits(catalog)
        allowed = set().union(*(digit_runs(h.text) for h in hits))
        for question in ("How much is it?", "Where is it?", "When does it open?"):
            result = gateway.extract_info(hits, question)
            assert digit_runs(result.text) <= allowed


class TestKanaNormalize:
    READINGS = {"方": ("ほう", "かた")}

    def test_text_without_target_is_unchanged(self, gateway):
        text = "こちらへどうぞ"
        assert gateway.kana_normalize(text, self.READINGS) == text

    def test_single_occurrence_replaces_exactly_one_span(self, gateway):
        pre, post = "あの", "はガイドです"
        result = gateway.kana_normalize(pre + "方" + post, self.READINGS)
        assert result.startswith(pre) and result.endswith(post)
        middle = result[len(pre):len(result) - len(post)]
        assert middle in self.READINGS["方"]
        assert "方" not in result

    def test_idempotent_after_normalization(self, gateway):
        once = gateway.kana_normalize("この方が好きです", self.READINGS)
        assert gateway.kana_normalize(once, self.READINGS) == once

    def test_deterministic(self, gateway):
        text = "あの方とこの方"
        assert gateway.kana_normalize(text, self.READINGS) == gateway.kana_normalize(text, self.READINGS)


class TestPolicyChecks:
    def test_ends_with_question_check(self):
        policy = FilterPolicy(checks=("ends_with_question",))
        assert policy.rejects("no mark", max_length=100) == "ends_with_question"
        assert policy.rejects("really? yes", max_length=100) == "ends_with_question"
        assert policy.rejects("is it so?", max_length=100) is None

    def test_overlength_check(self):
        policy = FilterPolicy(checks=("max_length",))
        assert policy.rejects("x" * 11, max_length=10) == "max_length"
        assert policy.rejects("x" * 10, max_length=10) is None

    def test_digits_grounded_check(self):
        policy = FilterPolicy(checks=("digits_grounded",))
        assert policy.rejects("pay 1,200 yen", max_length=99, grounding={"1200"}) is None
        assert policy.rejects("pay 1,300 yen", max_length=99, grounding={"1200"}) == "digits_grounded"

    def test_forbidden_phrase_check(self):
        policy = FilterPolicy(checks=("forbidden_phrase",))
        assert policy.rejects("we recommend X", max_length=99,
                              forbidden_phrases=("we recommend X",)) == "forbidden_phrase"
        assert policy.rejects("all fine", max_length=99, forbidden_phrases=("nope",)) is None
