"""Two-step recommendation and counter-recommendation.

Step 1 picks at most two recommendation points: one per interview question
the customer said yes to, topped up (never past two) with points derived
from the sight's own favorable features. Customer-dependent points always
outrank customer-independent ones. Step 2 turns summary + searched details
+ points into the spoken pitch.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gateway import Gateway, GenResult, PROVENANCE_FIXED, PROVENANCE_GENERATED
from .interview import CustomerProfile, LocWiseQuestionSet
from .sightdb import DerivedFeatures, SearchHit, SightCatalog, digit_runs

CUSTOMER_DEPENDENT = "customer_dependent"
CUSTOMER_INDEPENDENT = "customer_independent"

MAX_POINTS = 2

RECOMMEND_FRAME = "According to your information, we recommend {name}."

# Favorable-feature checks in fixed priority order: popularity, price,
# proximity, indoor (rainy-day default). Texts stay digit-free so the
# grounding filter downstream never trips over them.
FAVORABLE_FEATURES = (
    ("popularity", lambda f: f.popularity == "high",
     "{name} is very popular, with a large number of traveler reviews."),
    ("price_band", lambda f: f.price_band in ("free", "low"),
     "{name} is easy on the wallet, since admission costs little or nothing."),
    ("station_proximity", lambda f: f.station_proximity == "near",
     "{name} is only a short walk from the nearest station."),
    ("indoor", lambda f: f.indoor == "yes",
     "{name} is indoors, so it can be enjoyed even on a rainy day."),
)

# Unfavorable-feature checks for the counter-recommendation, same priority.
UNFAVORABLE_FEATURES = (
    ("popularity", lambda f: f.popularity == "low",
     "has few reviews and is not very popular"),
    ("price_band", lambda f: f.price_band == "high",
     "is rather expensive to enter"),
    ("station_proximity", lambda f: f.station_proximity == "far",
     "is a long way from the nearest station"),
)

SOFT_CONTRAST = (
    "{other_name} is also lovely, but this time {recommended_name} "
    "is simply the better fit for you."
)

STEER_CLAUSE = "Compared with {other_name}, {recommended_name} is the one I would recommend."


@dataclass(frozen=True)
class RecommendationPoint:
    text: str
    origin: str  # customer_dependent | customer_independent
    source: str  # question index or feature name


@dataclass
class RecommendationBundle:
    sight_id: str
    points: list[RecommendationPoint]
    search_context: list[SearchHit]
    appeal: str


def select_points(
    profile: CustomerProfile,
    loc_set: LocWiseQuestionSet,
    features: DerivedFeatures,
    sight_name: str,
) -> list[RecommendationPoint]:
    """At most two points, customer-dependent first."""
    points: list[RecommendationPoint] = []
    for idx in range(len(loc_set.questions)):
        if profile.loc_answers.get((loc_set.sight_id, idx)) == "yes":
            points.append(
                RecommendationPoint(
                    text=loc_set.source_points[idx],
                    origin=CUSTOMER_DEPENDENT,
                    source=f"question_{idx}",
                )
            )
    if len(points) < MAX_POINTS:
        for feature_name, favorable, text in FAVORABLE_FEATURES:
            if len(points) >= MAX_POINTS:
                break
            if favorable(features):
                points.append(
                    RecommendationPoint(
                        text=text.format(name=sight_name),
                        origin=CUSTOMER_INDEPENDENT,
                        source=feature_name,
                    )
                )
    return points[:MAX_POINTS]


def build_appeal(gateway: Gateway, summary_one_line: str) -> str:
    """Appeal sentence grown from the fixed stem; corpus-build time."""
    result = gateway.run("recommend_appeal", {"summary": summary_one_line})
    if result.fell_back:
        from .errors import CorpusError

        raise CorpusError("appeal generation produced nothing usable")
    return "This place is appealing because " + result.text


def gather_search_context(
    catalog: SightCatalog,
    sight_id: str,
    points: list[RecommendationPoint],
    k: int = 3,
) -> list[SearchHit]:
    """Point texts double as search queries against the recommended sight."""
    hits: list[SearchHit] = []
    seen: set[tuple[str, str]] = set()
    for point in points:
        for hit in catalog.search(point.text, sight_filter=sight_id, k=k):
            key = (hit.field, hit.text)
            if key not in seen:
                seen.add(key)
                hits.append(hit)
    return hits


def recommend_utterance(
    gateway: Gateway,
    sight_name: str,
    summary_one_line: str,
    appeal: str,
    hits: list[SearchHit],
    points: list[RecommendationPoint],
) -> tuple[str, str]:
    """(text, provenance): fixed frame, appeal, then the grounded pitch."""
    frame = RECOMMEND_FRAME.format(name=sight_name)
    lead = f"{frame} {appeal}"
    if not points:
        return lead, PROVENANCE_FIXED
    grounding = set().union(*(digit_runs(h.text) for h in hits)) if hits else set()
    result = gateway.run(
        "recommend_utterance",
        {
            "summary": summary_one_line,
            "details": " | ".join(h.text for h in hits[:3]) if hits else "(none)",
            "points": " ".join(p.text for p in points),
        },
        grounding=grounding,
    )
    if result.fell_back:
        return lead, PROVENANCE_FIXED
    return f"{lead} {result.text}", PROVENANCE_GENERATED


def counter_utterance(
    gateway: Gateway,
    other_name: str,
    features_other: DerivedFeatures,
    recommended_name: str,
) -> tuple[str, str]:
    """Polite contrast citing up to two weak spots, re-endorsing the pick."""
    drawbacks = [text for _, unfavorable, text in UNFAVORABLE_FEATURES if unfavorable(features_other)]
    if not drawbacks:
        return (
            SOFT_CONTRAST.format(other_name=other_name, recommended_name=recommended_name),
            PROVENANCE_FIXED,
        )
    result = gateway.run(
        "counter_utterance",
        {
            "other_name": other_name,
            "drawbacks": " and ".join(drawbacks[:MAX_POINTS]),
            "recommended_name": recommended_name,
        },
        required_phrases=(other_name, recommended_name),
        forbidden_phrases=(RECOMMEND_FRAME.format(name=other_name),),
    )
    if result.fell_back:
        return result.text, PROVENANCE_FIXED
    return result.text, PROVENANCE_GENERATED
