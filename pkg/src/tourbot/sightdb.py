"""Tourist-sight catalog: corpus ingest, fielded lexical search, features.

The corpus is a line-delimited UTF-8 file, one sight per line. Ingest
validates every record, derives customer-independent features, and builds
a small fielded index. Search scores by normalized token overlap plus a
field-affinity bonus driven by a synonym table (price words pull the charge
field, time words pull business hours, and so on), which keeps results
deterministic and easy to reason about in tests.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigurationError, CorpusError

# Field ordering doubles as the deterministic tie-break order for hits.
FIELD_ORDER = ("business_hours", "location", "access", "charge", "review")

TOKEN_RE = re.compile(r"\w+")

# Tokens ignored when scoring queries (kept in documents).
STOPWORDS = frozenset(
    """a an the of for to in on at and or is are was were be been it its this
    that these those there do does did can could will would should i you we
    they he she my your our their me us them with about from as by have has
    had please tell know want""".split()
)

# Query vocabulary -> field with affinity. A query containing any of a
# field's cue words ranks that field's documents first.
FIELD_VOCAB: dict[str, frozenset[str]] = {
    "charge": frozenset(
        """price prices pricing cost costs fee fees charge charges admission
        ticket tickets yen much expensive cheap pay entry""".split()
    ),
    "business_hours": frozenset(
        """hours hour open opens opening close closes closed closing time
        when schedule late early""".split()
    ),
    "location": frozenset("where location address place located situated".split()),
    "access": frozenset(
        """access station train walk walking get reach far near bus line
        transport directions""".split()
    ),
    "review": frozenset("review reviews rating ratings reputation popular visitors".split()),
}

AFFINITY_BONUS = 1.0


def tokenize(text: str, bigram: bool = False) -> list[str]:
    """Lowercase word tokens; optional character bigrams for unspaced scripts."""
    if bigram:
        compact = re.sub(r"\s+", "", text.lower())
        return [compact[i : i + 2] for i in range(len(compact) - 1)] or list(compact)
    return TOKEN_RE.findall(text.lower())


def digit_runs(text: str) -> set[str]:
    """Digit sequences after folding grouping separators and width variants.

    "1,200 yen" and "1200yen" both yield {"1200"}; used by the grounding
    filter to reject fabricated figures.
    """
    normalized = text.translate(_FULLWIDTH_DIGITS)
    normalized = re.sub(r"(?<=\d)[,，](?=\d)", "", normalized)
    return set(re.findall(r"\d+", normalized))


_FULLWIDTH_DIGITS = str.maketrans({chr(0xFF10 + i): str(i) for i in range(10)})


@dataclass(frozen=True)
class Review:
    text: str
    rating: int


@dataclass(frozen=True)
class DerivedFeatures:
    price_band: str  # free | low | mid | high
    indoor: str  # yes | no | unknown
    station_proximity: str  # near | far | unknown
    popularity: str  # low | mid | high


@dataclass(frozen=True)
class FeatureThresholds:
    """Banding cutoffs; the defaults are documented engine configuration."""

    price_low_max: int = 1000
    price_mid_max: int = 3000
    station_near_max_m: int = 600
    popularity_low_below: int = 30
    popularity_high_min: int = 300
    walk_speed_m_per_min: int = 80


@dataclass(frozen=True)
class SightRecord:
    sight_id: str
    name: str
    summary_long: str
    business_hours: str
    location: str
    access: str
    charge: str
    reviews: tuple[Review, ...]
    n_reviews: int
    review_score: float | None
    indoor: str  # yes | no | unknown
    distance_from_station: float | None = None
    summary_one_line: str = ""
    price_band_override: str | None = None


@dataclass(frozen=True)
class SearchHit:
    sight_id: str
    field: str
    text: str
    score: float


_REQUIRED_FIELDS = (
    "sight_id",
    "name",
    "summary_long",
    "business_hours",
    "location",
    "access",
    "charge",
    "reviews",
)

_TRI = {"yes": "yes", "no": "no", "unknown": "unknown", True: "yes", False: "no", None: "unknown"}


def _parse_record(obj: dict) -> SightRecord:
    for key in _REQUIRED_FIELDS:
        if key not in obj:
            raise ValueError(f"missing field {key!r}")
    if not isinstance(obj["reviews"], list):
        raise ValueError("reviews must be a list")
    reviews = []
    for i, entry in enumerate(obj["reviews"]):
        if "text" not in entry or "rating" not in entry:
            raise ValueError(f"review {i} needs text and rating")
        rating = int(entry["rating"])
        if not 1 <= rating <= 5:
            raise ValueError(f"review {i} rating {rating} outside 1-5")
        reviews.append(Review(text=str(entry["text"]), rating=rating))

    n_reviews = int(obj.get("n_reviews", len(reviews)))
    if n_reviews < 0:
        raise ValueError("n_reviews must be >= 0")
    review_score = obj.get("review_score")
    if review_score is None and n_reviews > 0:
        if not reviews:
            raise ValueError("n_reviews > 0 but no review_score and no sample reviews")
        review_score = sum(r.rating for r in reviews) / len(reviews)
    if review_score is not None:
        review_score = float(review_score)
        if not 1.0 <= review_score <= 5.0:
            raise ValueError(f"review_score {review_score} outside 1-5")
        if n_reviews == 0:
            raise ValueError("review_score given but n_reviews is 0")

    indoor_raw = obj.get("indoor", "unknown")
    if indoor_raw not in _TRI:
        raise ValueError(f"indoor must be yes/no/unknown, got {indoor_raw!r}")

    distance = obj.get("distance_from_station")
    return SightRecord(
        sight_id=str(obj["sight_id"]),
        name=str(obj["name"]),
        summary_long=str(obj["summary_long"]),
        business_hours=str(obj["business_hours"]),
        location=str(obj["location"]),
        access=str(obj["access"]),
        charge=str(obj["charge"]),
        reviews=tuple(reviews),
        n_reviews=n_reviews,
        review_score=review_score,
        indoor=_TRI[indoor_raw],
        distance_from_station=float(distance) if distance is not None else None,
        summary_one_line=str(obj.get("summary_one_line", "")),
        price_band_override=obj.get("price_band_override"),
    )


def _record_to_obj(record: SightRecord) -> dict:
    obj = {
        "sight_id": record.sight_id,
        "name": record.name,
        "summary_long": record.summary_long,
        "business_hours": record.business_hours,
        "location": record.location,
        "access": record.access,
        "charge": record.charge,
        "reviews": [{"text": r.text, "rating": r.rating} for r in record.reviews],
        "n_reviews": record.n_reviews,
        "indoor": record.indoor,
    }
    if record.review_score is not None:
        obj["review_score"] = record.review_score
    if record.distance_from_station is not None:
        obj["distance_from_station"] = record.distance_from_station
    if record.summary_one_line:
        obj["summary_one_line"] = record.summary_one_line
    if record.price_band_override is not None:
        obj["price_band_override"] = record.price_band_override
    return obj


# --- feature derivation ----------------------------------------------------

_YEN_AMOUNT = re.compile(r"(\d{1,3}(?:,\d{3})+|\d+)\s*(?:yen|円)|[¥￥]\s*(\d[\d,]*)", re.IGNORECASE)
_FREE = re.compile(r"\bfree\b|無料", re.IGNORECASE)
_WALK_MINUTES = re.compile(r"(\d+)[\s-]*min(?:ute)?s?[\s-]*walk", re.IGNORECASE)


def parse_first_charge_yen(charge: str) -> int | None:
    """First money amount in the charge text (adult price by listing convention)."""
    m = _YEN_AMOUNT.search(charge)
    if m:
        amount = m.group(1) or m.group(2)
        return int(amount.replace(",", ""))
    return None


def parse_walk_distance_m(access: str, walk_speed_m_per_min: int) -> float | None:
    """Distance implied by the first "N-minute walk" phrase, if any."""
    m = _WALK_MINUTES.search(access)
    if m:
        return int(m.group(1)) * walk_speed_m_per_min
    return None


def derive_features(record: SightRecord, thresholds: FeatureThresholds = FeatureThresholds()) -> DerivedFeatures:
    """Pure banding of one record into customer-independent features."""
    amount = parse_first_charge_yen(record.charge)
    if amount is not None:
        if amount == 0:
            price_band = "free"
        elif amount <= thresholds.price_low_max:
            price_band = "low"
        elif amount <= thresholds.price_mid_max:
            price_band = "mid"
        else:
            price_band = "high"
    elif _FREE.search(record.charge):
        price_band = "free"
    elif record.price_band_override in ("free", "low", "mid", "high"):
        price_band = record.price_band_override
    else:
        price_band = "mid"  # unknown-safe middle band

    distance = record.distance_from_station
    if distance is None:
        distance = parse_walk_distance_m(record.access, thresholds.walk_speed_m_per_min)
    if distance is None:
        station_proximity = "unknown"
    elif distance <= thresholds.station_near_max_m:
        station_proximity = "near"
    else:
        station_proximity = "far"

    if record.n_reviews < thresholds.popularity_low_below:
        popularity = "low"
    elif record.n_reviews >= thresholds.popularity_high_min:
        popularity = "high"
    else:
        popularity = "mid"

    return DerivedFeatures(
        price_band=price_band,
        indoor=record.indoor,
        station_proximity=station_proximity,
        popularity=popularity,
    )


# --- catalog and search ----------------------------------------------------


@dataclass(frozen=True)
class _IndexedDoc:
    sight_id: str
    field: str
    text: str
    tokens: frozenset[str]


@dataclass
class SightCatalog:
    """Immutable after ingest; shared read-only across sessions."""

    records: dict[str, SightRecord]
    order: list[str]
    thresholds: FeatureThresholds = field(default_factory=FeatureThresholds)
    bigram_tokens: bool = False
    _docs: list[_IndexedDoc] = field(default_factory=list, repr=False)
    _features: dict[str, DerivedFeatures] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._rebuild()

    def _rebuild(self) -> None:
        self._docs = []
        self._features = {}
        for sight_id in self.order:
            record = self.records[sight_id]
            self._features[sight_id] = derive_features(record, self.thresholds)
            for field_name in ("business_hours", "location", "access", "charge"):
                text = getattr(record, field_name)
                if text:
                    self._docs.append(
                        _IndexedDoc(sight_id, field_name, text, frozenset(tokenize(text, self.bigram_tokens)))
                    )
            for review in record.reviews:
                self._docs.append(
                    _IndexedDoc(sight_id, "review", review.text, frozenset(tokenize(review.text, self.bigram_tokens)))
                )

    def __len__(self) -> int:
        return len(self.order)

    def __contains__(self, sight_id: str) -> bool:
        return sight_id in self.records

    def get(self, sight_id: str) -> SightRecord:
        try:
            return self.records[sight_id]
        except KeyError:
            raise ConfigurationError(f"unknown sight id {sight_id!r}") from None

    def replace_record(self, record: SightRecord) -> None:
        """Swap in an enriched record (corpus build only)."""
        if record.sight_id not in self.records:
            raise ConfigurationError(f"unknown sight id {record.sight_id!r}")
        self.records[record.sight_id] = record
        self._rebuild()

    def features(self, sight_id: str) -> DerivedFeatures:
        self.get(sight_id)
        return self._features[sight_id]

    def search(self, query: str, sight_filter: str | None = None, k: int = 5) -> list[SearchHit]:
        """Top-k hits by token overlap + field affinity; fully deterministic.

        Ties break on field order (business_hours, location, access, charge,
        review) and then on text, so equal-scoring hits always land in the
        same order.
        """
        if k <= 0:
            return []
        query_tokens = [t for t in tokenize(query, self.bigram_tokens) if t not in STOPWORDS]
        if not query_tokens:
            query_tokens = tokenize(query, self.bigram_tokens)
        if not query_tokens:
            return []
        qset = set(query_tokens)
        boosted_fields = {
            field_name for field_name, vocab in FIELD_VOCAB.items() if qset & vocab
        }
        hits: list[SearchHit] = []
        for doc in self._docs:
            if sight_filter is not None and doc.sight_id != sight_filter:
                continue
            score = len(qset & doc.tokens) / len(qset)
            if doc.field in boosted_fields:
                score += AFFINITY_BONUS
            if score > 0:
                hits.append(SearchHit(doc.sight_id, doc.field, doc.text, score))
        hits.sort(key=lambda h: (-h.score, FIELD_ORDER.index(h.field), h.text))
        return hits[:k]

    def positive_reviews(self, sight_id: str, k: int) -> list[str]:
        """Up to k reviews rated >= 4, best and longest first."""
        record = self.get(sight_id)
        good = [r for r in record.reviews if r.rating >= 4]
        good.sort(key=lambda r: (-r.rating, -len(r.text), r.text))
        return [r.text for r in good[:k]]

    def serialize(self) -> str:
        """Corpus text that ingest() accepts back into an equal catalog."""
        lines = [
            json.dumps(_record_to_obj(self.records[sid]), ensure_ascii=False)
            for sid in self.order
        ]
        return "".join(line + "\n" for line in lines)


def ingest_text(
    text: str,
    thresholds: FeatureThresholds = FeatureThresholds(),
    bigram_tokens: bool = False,
    source: str = "<corpus>",
) -> SightCatalog:
    records: dict[str, SightRecord] = {}
    order: list[str] = []
    problems: list[str] = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append(f"{source}:{line_no}: invalid JSON ({exc.msg})")
            continue
        try:
            record = _parse_record(obj)
        except (ValueError, TypeError) as exc:
            problems.append(f"{source}:{line_no}: {exc}")
            continue
        if record.sight_id in records:
            problems.append(f"{source}:{line_no}: duplicate sight_id {record.sight_id!r}")
            continue
        records[record.sight_id] = record
        order.append(record.sight_id)
    if problems:
        raise CorpusError("corpus build rejected:\n" + "\n".join(problems))
    return SightCatalog(records=records, order=order, thresholds=thresholds, bigram_tokens=bigram_tokens)


def ingest(
    corpus_path: str | Path,
    thresholds: FeatureThresholds = FeatureThresholds(),
    bigram_tokens: bool = False,
) -> SightCatalog:
    """Build a validated catalog from a corpus file; rejects the whole build
    on any malformed entry, with line-numbered diagnostics."""
    path = Path(corpus_path)
    if not path.exists():
        raise ConfigurationError(f"corpus file not found: {path}")
    return ingest_text(
        path.read_text(encoding="utf-8"),
        thresholds=thresholds,
        bigram_tokens=bigram_tokens,
        source=str(path),
    )
