"""Synthetic corpora with exact, injected ground truth.

The generator plants marker tokens for each toy feature at a chosen
per-1,000-word rate, optionally decorating injections with positive or
negative context-cue tokens nearby. Marker, cue and filler vocabularies
are disjoint, so the expected retained match set is known exactly at
generation time, including context-driven suppressions.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import PeriodId
from .errors import SynthSpecError
from .patterns import (
    CONFIDENCE_BASE,
    CONFIDENCE_CEILING,
    CONFIDENCE_FLOOR,
    CONFIDENCE_PER_NEGATIVE,
    CONFIDENCE_PER_POSITIVE,
    RETENTION_THRESHOLD,
    FeatureCategory,
    FeaturePattern,
    PatternCatalog,
)

# IAST-flavored filler lexicon; never collides with the zz-prefixed
# marker/cue vocabulary below.
FILLER_LEXICON = (
    "agním", "īḷe", "puróhitaṃ", "yajñásya", "devám", "ṛtvíjam", "hótāraṃ",
    "ratnadhātamam", "sóma", "pávate", "índra", "marútvān", "bráhman",
    "ātmán", "vidyā", "satyám", "jñānam", "ánantam", "pṛthivī", "dyáus",
    "āpaḥ", "agne", "váruṇa", "mitrá", "aryamán", "bhága", "aṃśa", "dákṣa",
    "savitár", "pūṣán", "viṣṇu", "tváṣṭar", "vāyú", "uṣás", "rātrī",
    "sárasvatī", "iḍā", "bhāratī", "hávis", "ghṛtám", "mádhu", "páyas",
    "kṣīrá", "dádhi", "yáva", "vrīhí", "gáuḥ", "áśva", "ajá", "ávi",
)

_CUE_POSITIVE_PREFIX = "zzpu"
_CUE_NEGATIVE_PREFIX = "zzni"
_MARKER_PREFIX = "zzmā"


def _alpha_index(k: int) -> str:
    """Two-letter base-26 tag: 0 -> 'aa', 1 -> 'ab', ..."""
    if not 0 <= k < 26 * 26:
        raise ValueError("index out of range")
    return chr(ord("a") + k // 26) + chr(ord("a") + k % 26)


def marker_token(k: int) -> str:
    return _MARKER_PREFIX + _alpha_index(k)


def positive_cue_token(k: int) -> str:
    return _CUE_POSITIVE_PREFIX + _alpha_index(k)


def negative_cue_token(k: int) -> str:
    return _CUE_NEGATIVE_PREFIX + _alpha_index(k)


def toy_catalog(num_features: int, version: str = "toy-1") -> PatternCatalog:
    """Catalog of marker-token features with one positive and one negative cue."""
    categories = list(FeatureCategory)
    patterns = [
        FeaturePattern(
            feature_id=f"synth_{_alpha_index(k)}",
            category=categories[k % len(categories)],
            base_regex=marker_token(k),
            positive_contexts=(positive_cue_token(k),),
            negative_contexts=(negative_cue_token(k),),
            description=f"synthetic marker feature {k}",
        )
        for k in range(num_features)
    ]
    return PatternCatalog(version=version, patterns=patterns)


@dataclass(frozen=True)
class SynthTextSpec:
    text_id: str
    period: PeriodId
    token_count: int
    rates: dict[str, float] = field(default_factory=dict)  # feature_id -> per 1000
    positive_cue_prob: float = 0.0
    negative_cue_prob: float = 0.0


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    texts: tuple[SynthTextSpec, ...]
    window: int = 20
    title_prefix: str = "synthetic text"


@dataclass(frozen=True)
class PlantedMatch:
    feature_id: str
    word_index: int
    positives_in_window: int
    negatives_in_window: int
    confidence: float
    retained: bool


@dataclass
class GroundTruth:
    """Exact per-(text, feature) injection bookkeeping."""

    # text_id -> feature_id -> list of planted matches
    planted: dict[str, dict[str, list[PlantedMatch]]]
    token_counts: dict[str, int]

    def injected_count(self, text_id: str, feature_id: str) -> int:
        return len(self.planted.get(text_id, {}).get(feature_id, []))

    def retained_count(self, text_id: str, feature_id: str) -> int:
        return sum(
            1 for m in self.planted.get(text_id, {}).get(feature_id, []) if m.retained
        )

    def expected_frequency(self, text_id: str, feature_id: str) -> float:
        tokens = self.token_counts[text_id]
        if tokens == 0:
            return 0.0
        return 1000.0 * self.retained_count(text_id, feature_id) / tokens

    def retained_positions(self, text_id: str, feature_id: str) -> list[int]:
        return [
            m.word_index
            for m in self.planted.get(text_id, {}).get(feature_id, [])
            if m.retained
        ]

    def to_doc(self) -> dict:
        return {
            "token_counts": self.token_counts,
            "planted": {
                tid: {
                    fid: [
                        {
                            "word_index": m.word_index,
                            "positives_in_window": m.positives_in_window,
                            "negatives_in_window": m.negatives_in_window,
                            "confidence": m.confidence,
                            "retained": m.retained,
                        }
                        for m in matches
                    ]
                    for fid, matches in features.items()
                }
                for tid, features in self.planted.items()
            },
        }


def _injection_count(rate: float, token_count: int) -> int:
    """Round-half-up of rate * tokens / 1000, so recovery is exact."""
    import math

    return int(math.floor(rate * token_count / 1000.0 + 0.5))


def _confidence(positives: int, negatives: int) -> float:
    # Deliberately restated here: the generator's expectations must not
    # depend on the production confidence kernel.
    raw = (
        CONFIDENCE_BASE
        + CONFIDENCE_PER_POSITIVE * positives
        - CONFIDENCE_PER_NEGATIVE * negatives
    )
    return min(CONFIDENCE_CEILING, max(CONFIDENCE_FLOOR, raw))


@dataclass
class SynthText:
    text_id: str
    period: PeriodId
    tokens: list[str]
    rendered: str


def _render(tokens: list[str], rng: random.Random) -> str:
    """Join tokens with spaces, sprinkling separator-only punctuation."""
    parts = []
    for i, tok in enumerate(tokens):
        parts.append(tok)
        if i + 1 < len(tokens):
            roll = rng.random()
            if roll < 0.02:
                parts.append("॥\n")
            elif roll < 0.05:
                parts.append("।")
    return " ".join(parts) + "\n"


def generate_text(
    spec: SynthTextSpec,
    feature_index: dict[str, int],
    window: int,
    rng: random.Random,
) -> tuple[SynthText, dict[str, list[PlantedMatch]]]:
    n = spec.token_count
    if n <= 0:
        raise SynthSpecError(f"{spec.text_id}: token_count must be positive")
    slots: list[Optional[str]] = [None] * n
    # feature_id -> list of injection positions
    injections: dict[str, list[int]] = {}
    free = list(range(n))
    rng.shuffle(free)

    def take_slot() -> int:
        while free:
            pos = free.pop()
            if slots[pos] is None:
                return pos
        raise SynthSpecError(
            f"{spec.text_id}: injections and cues exceed token_count {n}"
        )

    for fid in sorted(spec.rates):
        rate = spec.rates[fid]
        if rate < 0:
            raise SynthSpecError(f"{spec.text_id}: negative rate for {fid}")
        count = _injection_count(rate, n)
        if count > n:
            raise SynthSpecError(
                f"{spec.text_id}: rate {rate} implies {count} injections > {n} tokens"
            )
        k = feature_index[fid]
        positions = []
        for _ in range(count):
            pos = take_slot()
            slots[pos] = marker_token(k)
            positions.append(pos)
        injections[fid] = sorted(positions)

    # Context decoration: cue tokens land on a free slot within the window
    # of their injection (when one exists nearby).
    cue_positions: dict[str, dict[str, list[int]]] = {"pos": {}, "neg": {}}
    for fid, positions in injections.items():
        k = feature_index[fid]
        for pos in positions:
            for kind, prob, token in (
                ("pos", spec.positive_cue_prob, positive_cue_token(k)),
                ("neg", spec.negative_cue_prob, negative_cue_token(k)),
            ):
                if prob <= 0 or rng.random() >= prob:
                    continue
                lo = max(0, pos - window)
                hi = min(n - 1, pos + window)
                candidates = [q for q in range(lo, hi + 1) if slots[q] is None]
                if not candidates:
                    continue
                q = rng.choice(candidates)
                slots[q] = token
                cue_positions[kind].setdefault(fid, []).append(q)

    for pos in range(n):
        if slots[pos] is None:
            slots[pos] = rng.choice(FILLER_LEXICON)

    # Expected retained set: count cue tokens inside each injection's
    # window by direct position arithmetic.
    planted: dict[str, list[PlantedMatch]] = {}
    for fid, positions in injections.items():
        entries = []
        pos_cues = cue_positions["pos"].get(fid, [])
        neg_cues = cue_positions["neg"].get(fid, [])
        for pos in positions:
            lo, hi = pos - window, pos + window
            # Presence per context pattern: each feature has one positive
            # and one negative cue pattern, so presence is 0 or 1.
            p = 1 if any(lo <= q <= hi for q in pos_cues) else 0
            m = 1 if any(lo <= q <= hi for q in neg_cues) else 0
            conf = _confidence(p, m)
            entries.append(
                PlantedMatch(
                    feature_id=fid,
                    word_index=pos,
                    positives_in_window=p,
                    negatives_in_window=m,
                    confidence=conf,
                    retained=conf >= RETENTION_THRESHOLD,
                )
            )
        planted[fid] = entries

    final_tokens = [tok for tok in slots if tok is not None]
    assert len(final_tokens) == n
    rendered = _render(final_tokens, rng)
    return (
        SynthText(text_id=spec.text_id, period=spec.period, tokens=final_tokens, rendered=rendered),
        planted,
    )


@dataclass
class SynthCorpus:
    texts: list[SynthText]
    catalog: PatternCatalog
    ground_truth: GroundTruth
    spec: SynthSpec

    def manifest_doc(self, texts_dir: str = "texts") -> dict:
        return {
            "entries": [
                {
                    "id": t.text_id,
                    "title": f"{self.spec.title_prefix} {i}",
                    "period": t.period.value,
                    "chrono_index": i,
                    "file_path": f"{texts_dir}/{t.text_id}.txt",
                    "expected_word_count": len(t.tokens),
                }
                for i, t in enumerate(self.texts)
            ]
        }


def generate(spec: SynthSpec) -> SynthCorpus:
    """Deterministic synthetic corpus + toy catalog + exact ground truth."""
    feature_ids = sorted({fid for t in spec.texts for fid in t.rates})
    catalog = toy_catalog(len(feature_ids))
    # The toy catalog enumerates ids synth_aa, synth_ab, ...; specs must
    # use those ids so markers and patterns line up.
    known = set(catalog.feature_ids)
    unknown = [fid for fid in feature_ids if fid not in known]
    if unknown:
        raise SynthSpecError(f"rates reference unknown toy features: {unknown}")
    index = {fid: i for i, fid in enumerate(catalog.feature_ids)}
    texts = []
    planted_all: dict[str, dict[str, list[PlantedMatch]]] = {}
    token_counts: dict[str, int] = {}
    seen_ids: set[str] = set()
    for i, tspec in enumerate(spec.texts):
        if tspec.text_id in seen_ids:
            raise SynthSpecError(f"duplicate text_id {tspec.text_id!r}")
        seen_ids.add(tspec.text_id)
        rng = random.Random(spec.seed * 1_000_003 + i)
        text, planted = generate_text(tspec, index, spec.window, rng)
        texts.append(text)
        planted_all[text.text_id] = planted
        token_counts[text.text_id] = tspec.token_count
    return SynthCorpus(
        texts=texts,
        catalog=catalog,
        ground_truth=GroundTruth(planted=planted_all, token_counts=token_counts),
        spec=spec,
    )


def write_corpus(corpus: SynthCorpus, out_dir: str | Path) -> Path:
    """Materialize manifest, text files, catalog and ground truth."""
    from .patterns import catalog_to_doc

    out = Path(out_dir)
    (out / "texts").mkdir(parents=True, exist_ok=True)
    for text in corpus.texts:
        (out / "texts" / f"{text.text_id}.txt").write_text(
            text.rendered, encoding="utf-8"
        )
    (out / "manifest.json").write_text(
        json.dumps(corpus.manifest_doc(), ensure_ascii=False, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    (out / "catalog.json").write_text(
        json.dumps(catalog_to_doc(corpus.catalog), ensure_ascii=False, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    (out / "ground_truth.json").write_text(
        json.dumps(corpus.ground_truth.to_doc(), ensure_ascii=False, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    return out
