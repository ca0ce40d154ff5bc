"""Question answering: decision heuristic, grounding, steering, session loop."""

import json

import pytest

from conftest import FIXTURES, FakeClock

from tourbot import qa as qa_ops
from tourbot.sightdb import digit_runs, ingest_text
from tourbot.types import Phase, SightAssignment


class TestWantsQuestion:
    def test_decline(self, lexicon):
        assert qa_ops.wants_question("no, I'm good", lexicon) == "no"

    def test_plain_yes(self, lexicon):
        assert qa_ops.wants_question("yes - one thing", lexicon) == "yes"

    def test_direct_question_counts_as_yes(self, lexicon):
        assert qa_ops.wants_question("how much is it?", lexicon) == "yes"
        assert lexicon.is_direct_question("how much is it?")

    def test_labeled_fixture(self, lexicon):
        cases = json.loads((FIXTURES / "wants_question_labeled.json").read_text())["cases"]
        for case in cases:
            assert qa_ops.wants_question(case["text"], lexicon) == case["decision"], case
            assert lexicon.is_direct_question(case["text"]) is case["direct"], case


# The two-tower pricing scene used as the reference QA context: two synthetic
# records whose charge lines carry the full price ladders.
TOWERS_CORPUS = "\n".join(
    json.dumps(obj)
    for obj in [
        {
            "sight_id": "tokyo_tower",
            "name": "Tokyo Tower",
            "summary_long": "Tokyo Tower is repainted radio tower with observation decks over Minato ward.",
            "summary_one_line": "Tokyo Tower is a radio tower with observation decks over Minato ward.",
            "business_hours": "9:00 - 22:30",
            "location": "4-2-8 Shibakoen, Minato-ku, Tokyo",
            "access": "A 5-minute walk from Akabanebashi Station",
            "charge": "Main Deck: Adults 1,200 yen, High School Students 1,000 yen, Children 700 yen, Infants 500 yen",
            "reviews": [{"text": "The night view over the bay sparkles.", "rating": 5}],
            "n_reviews": 900,
            "review_score": 4.4,
            "indoor": "yes",
            "distance_from_station": 400,
        },
        {
            "sight_id": "skytree",
            "name": "Tokyo Skytree",
            "summary_long": "Tokyo Skytree is the tallest broadcasting tower in the country, opened in 2012 in Sumida ward.",
            "summary_one_line": "Tokyo Skytree is the tallest broadcasting tower in the country.",
            "business_hours": "10:00 - 21:00",
            "location": "1-1-2 Oshiage, Sumida-ku, Tokyo",
            "access": "Directly above Tokyo Skytree Station",
            "charge": "Observation Deck: Adults 2,300 yen, Students 1,650 yen, Children 1,000 yen",
            "reviews": [{"text": "Queues were long but the floor-to-ceiling view is unreal.", "rating": 4}],
            "n_reviews": 1200,
            "review_score": 4.2,
            "indoor": "yes",
            "distance_from_station": 50,
        },
    ]
)


@pytest.fixture(scope="module")
def towers_catalog():
    return ingest_text(TOWERS_CORPUS)


class TestAnswer:
    def test_tower_price_question_carries_all_four_figures(self, gateway, towers_catalog):
        ctx = qa_ops.build_context(
            towers_catalog, "tokyo_tower", "skytree", "tokyo_tower",
            "How much is the ticket price for Tokyo Tower?", k=5,
        )
        text, provenance = qa_ops.answer(gateway, ctx)
        runs = digit_runs(text)
        assert {"1200", "1000", "700", "500"} <= runs
        assert provenance == "generated"

    def test_no_hits_for_either_sight_gives_honest_fallback(self, gateway, towers_catalog):
        ctx = qa_ops.build_context(
            towers_catalog, "tokyo_tower", "skytree", "tokyo_tower",
            "zzz qqq xxx", k=5,
        )
        assert not ctx.d1 and not ctx.d2
        text, provenance = qa_ops.answer(gateway, ctx)
        assert text == qa_ops.NO_INFO_FALLBACK
        assert provenance == "fixed"

    def test_digits_always_grounded_in_context(self, gateway, towers_catalog):
        for question in (
            "How much is the ticket price for Tokyo Tower?",
            "How much is Skytree?",
            "When does the tower open?",
            "Where is Skytree located?",
        ):
            ctx = qa_ops.build_context(
                towers_catalog, "tokyo_tower", "skytree", "tokyo_tower", question, k=5,
            )
            allowed = set().union(*(digit_runs(h.text) for h in ctx.d1 + ctx.d2), digit_runs(ctx.s1), digit_runs(ctx.s2))
            text, _ = qa_ops.answer(gateway, ctx)
            assert digit_runs(text) <= allowed, question

    def test_steer_present_only_when_both_sights_have_hits(self, gateway, towers_catalog):
        both = qa_ops.build_context(
            towers_catalog, "tokyo_tower", "skytree", "tokyo_tower",
            "how much are tickets", k=5,
        )
        assert both.d1 and both.d2
        text, _ = qa_ops.answer(gateway, both)
        assert "Tokyo Tower is the one I would recommend" in text

        one_sided = qa_ops.build_context(
            towers_catalog, "tokyo_tower", "skytree", "tokyo_tower",
            "Akabanebashi", k=5,
        )
        assert one_sided.d1 and not one_sided.d2
        text, _ = qa_ops.answer(gateway, one_sided)
        assert "I would recommend" not in text


def drive_to_qa(engine, clock=None):
    session = engine.create_session(
        SightAssignment("daiba_park", "trick_art_museum", "trick_art_museum")
    )
    script = [None, "I teach music.", "Mostly choirs.", "no",
              "with my family", "no", "yes", "no", "yes", "no", "clean restrooms"]
    for utterance in script:
        engine.advance(session, utterance)
        if clock is not None:
            clock.tick(10)
    assert session.phase is Phase.QA
    return session


class TestQaLoopThroughSessions:
    def test_decline_immediately_skips_to_closing(self, make_engine):
        engine = make_engine()
        session = drive_to_qa(engine)
        engine.advance(session, "no thanks")
        assert session.phase is Phase.DONE
        assert session.qa_answers == 0
        phases = [r.phase for r in session.transcript]
        assert Phase.CLOSING in phases

    def test_two_questions_then_decline(self, make_engine):
        engine = make_engine()
        session = drive_to_qa(engine)
        engine.advance(session, "how much is the museum?")
        assert session.phase is Phase.QA
        engine.advance(session, "yes")
        engine.advance(session, "where is it")
        engine.advance(session, "no, that is everything")
        assert session.phase is Phase.DONE
        assert session.qa_answers == 2

    def test_budget_expiry_mid_loop_forces_closing(self, make_engine):
        clock = FakeClock()
        engine = make_engine(clock=clock, time_budget_s=300)
        session = drive_to_qa(engine, clock)
        engine.advance(session, "how much is the park?")
        clock.tick(400)  # past the five-minute budget
        turns = engine.advance(session, "yes, where is it?")
        assert session.phase is Phase.DONE
        assert turns[0].phase is Phase.CLOSING

    def test_unknown_reasks_once_then_closes(self, make_engine):
        engine = make_engine()
        session = drive_to_qa(engine)
        turns = engine.advance(session, "mumble")
        assert session.phase is Phase.QA
        assert turns[-1].text.endswith("?")
        engine.advance(session, "mumble")
        assert session.phase is Phase.DONE
