"""Title-only feature sets: lexical cues, bait-phrase counters, and
valence/sentiment scores."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .lexicons import BaitLexicons, packaged_data_dir

PUNCT_MARKS = "!?,.;:"

NEGATION_SCALAR = -0.74
ALLCAPS_SCALAR = 1.5
EXCLAIM_BOOST = 0.292
EXCLAIM_CAP = 3
NEGATION_WINDOW = 3
DEFAULT_ALPHA = 15.0

_EDGE_PUNCT = re.compile(r"^[\W_]+|[\W_]+$", re.UNICODE)


@dataclass
class LexicalFeatures:
    has_number: bool
    is_question: bool
    emoji_count: int
    capital_ratio: float
    punct_count: int

    def as_row(self) -> list[float]:
        return [
            float(self.has_number),
            float(self.is_question),
            float(self.emoji_count),
            self.capital_ratio,
            float(self.punct_count),
        ]


@dataclass
class BaitinessFeatures:
    celebrity_mentions: int
    slang_count: int
    porn_word_count: int
    bollywood_phrase_count: int
    generic_lure_count: int

    def as_row(self) -> list[float]:
        return [
            float(self.celebrity_mentions),
            float(self.slang_count),
            float(self.porn_word_count),
            float(self.bollywood_phrase_count),
            float(self.generic_lure_count),
        ]


@dataclass
class SentimentScores:
    positive: float
    negative: float
    neutral: float
    compound: float
    raw_sum: float
    alpha: float

    def as_row(self) -> list[float]:
        return [self.positive, self.negative, self.neutral, self.compound]


@lru_cache(maxsize=1)
def _emoji_ranges() -> tuple[tuple[int, int], ...]:
    ranges = []
    text = (packaged_data_dir() / "emoji_ranges.txt").read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        lo, hi = line.split()
        ranges.append((int(lo, 16), int(hi, 16)))
    return tuple(sorted(ranges))


def is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _emoji_ranges())


def lexical_features(title: str) -> LexicalFeatures:
    """Count-based cues: digits, question marks, emoji, capitals, punctuation."""
    title = title.strip()
    letters = [ch for ch in title if ch.isalpha()]
    uppercase = sum(1 for ch in letters if ch.isupper())
    return LexicalFeatures(
        has_number=any(ch.isdecimal() for ch in title),
        is_question="?" in title,
        emoji_count=sum(1 for ch in title if is_emoji(ch)),
        capital_ratio=uppercase / len(letters) if letters else 0.0,
        punct_count=sum(1 for ch in title if ch in PUNCT_MARKS),
    )


@lru_cache(maxsize=256)
def _category_pattern(terms: tuple[str, ...]) -> re.Pattern | None:
    if not terms:
        return None
    # Longest alternative first so the scan is leftmost-longest and
    # non-overlapping within the category.
    ordered = sorted(terms, key=len, reverse=True)
    return re.compile("|".join(re.escape(t) for t in ordered), re.IGNORECASE)


def _count_category(title: str, terms: list[str]) -> int:
    pattern = _category_pattern(tuple(terms))
    if pattern is None:
        return 0
    return sum(1 for _ in pattern.finditer(title))


def baitiness_features(title: str, lexicons: BaitLexicons) -> BaitinessFeatures:
    """Bait-phrase counters per category; matches may overlap across categories
    but never within one."""
    title = title.strip()
    return BaitinessFeatures(
        celebrity_mentions=_count_category(title, lexicons.celebrities),
        slang_count=_count_category(title, lexicons.slang),
        porn_word_count=_count_category(title, lexicons.porn),
        bollywood_phrase_count=_count_category(title, lexicons.bollywood),
        generic_lure_count=_count_category(title, lexicons.generic),
    )


def compound_score(raw_sum: float, alpha: float) -> float:
    """Normalize a valence sum into [-1, 1], antisymmetric in the sum."""
    return raw_sum / math.sqrt(raw_sum * raw_sum + alpha)


def _clean_token(token: str) -> str:
    return _EDGE_PUNCT.sub("", token)


def sentiment_scores(title: str, lexicons: BaitLexicons, alpha: float = DEFAULT_ALPHA) -> SentimentScores:
    """Rule-adjusted valence sum plus positive/negative/neutral mass shares.

    Per-token adjustments, applied in order: negation within the three
    preceding tokens flips and damps; an all-caps token in a mixed-case title
    amplifies; an immediately preceding intensifier shifts toward the valence
    sign. Exclamation marks after the first (up to three) push the total
    toward its own sign before normalization.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    raw_tokens = title.split()
    words = [w for w in (_clean_token(t) for t in raw_tokens) if w]
    lookup = [w.lower() for w in words]

    lettered = [w for w in words if any(ch.isalpha() for ch in w)]
    caps = sum(1 for w in lettered if w.isupper())
    mixed_case = 0 < caps < len(lettered)

    pos_mass = 0.0
    neg_mass = 0.0
    neu_mass = 0.0
    total = 0.0
    for i, word in enumerate(lookup):
        v = lexicons.valence.get(word, 0.0)
        if v != 0.0:
            window = lookup[max(0, i - NEGATION_WINDOW) : i]
            if any(w in lexicons.negators for w in window):
                v *= NEGATION_SCALAR
            if mixed_case and words[i].isupper():
                v *= ALLCAPS_SCALAR
            if i > 0 and lookup[i - 1] in lexicons.intensifiers:
                # Applied along the valence's sign: positive map values push
                # away from zero, negative ones (dampeners) pull toward it.
                shift = lexicons.intensifiers[lookup[i - 1]]
                v += shift if v > 0 else -shift
        if v > 0:
            pos_mass += v
        elif v < 0:
            neg_mass += -v
        else:
            neu_mass += 1.0
        total += v

    extra_marks = min(max(title.count("!") - 1, 0), EXCLAIM_CAP)
    if total > 0:
        total += EXCLAIM_BOOST * extra_marks
    elif total < 0:
        total -= EXCLAIM_BOOST * extra_marks

    mass = pos_mass + neg_mass + neu_mass
    if mass == 0.0:
        v1, v2, v3 = 0.0, 0.0, 1.0
    else:
        v1, v2, v3 = pos_mass / mass, neg_mass / mass, neu_mass / mass
    return SentimentScores(
        positive=v1,
        negative=v2,
        neutral=v3,
        compound=compound_score(total, alpha),
        raw_sum=total,
        alpha=alpha,
    )
