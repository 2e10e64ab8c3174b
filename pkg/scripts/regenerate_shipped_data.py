"""Regenerate the shipped synthetic corpus, neural stub and gold fixture.

Everything here is seed-deterministic: re-running the script reproduces
the checked-in bytes exactly. The synthetic corpus carries 20 toy
features over 12 texts (3 per period) with context-cue decoration, a
perturbed neural-prediction stub derived from the ground truth, and a
small constructed gold set exercising context suppression.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from diachron.corpus import PeriodId
from diachron.patterns import match_confidence
from diachron.synth import (
    SynthSpec,
    SynthTextSpec,
    generate,
    marker_token,
    negative_cue_token,
    positive_cue_token,
    toy_catalog,
    write_corpus,
)

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "diachron" / "data"
SEED = 20260314

PERIOD_ORDER = [
    PeriodId.EARLY_VEDIC,
    PeriodId.LATE_VEDIC,
    PeriodId.LATEST_VEDIC,
    PeriodId.CLASSICAL,
]

N_TEXTS = 12
N_FEATURES = 20
FEATURE_IDS = [p.feature_id for p in toy_catalog(N_FEATURES).patterns]


def shipped_rates(rng: random.Random) -> list[dict[str, float]]:
    """Per-text rates: 5 rising, 3 falling, 8 roughly flat, 4 sparse."""
    rates: list[dict[str, float]] = [{} for _ in range(N_TEXTS)]
    for k, fid in enumerate(FEATURE_IDS):
        for t in range(N_TEXTS):
            if k < 5:  # rising from (near) zero
                base = (3.0 + 0.5 * k) * t
            elif k < 8:  # falling to zero
                base = 25.0 - (2.5 + 0.5 * (k - 5)) * t
            elif k < 16:  # flat with jitter
                base = 8.0 + (k - 8) * 1.5 + rng.uniform(-1.5, 1.5)
            else:  # sparse: absent from many texts
                base = rng.uniform(2.0, 9.0) if rng.random() < 0.55 else 0.0
            rates[t][fid] = max(0.0, round(base, 2))
    return rates


def build_spec() -> SynthSpec:
    rng = random.Random(SEED)
    rates = shipped_rates(rng)
    texts = []
    for t in range(N_TEXTS):
        texts.append(
            SynthTextSpec(
                text_id=f"synth_text_{t:02d}",
                period=PERIOD_ORDER[t // 3],
                token_count=rng.choice((900, 1100, 1300, 1500)),
                rates=rates[t],
                positive_cue_prob=0.35,
                negative_cue_prob=0.20,
            )
        )
    return SynthSpec(seed=SEED, texts=tuple(texts))


def write_neural_stub(corpus, out: Path) -> None:
    """Ground-truth-derived predictions with noise and extra detections."""
    rng = random.Random(SEED + 1)
    lines = []
    for text in corpus.texts:
        for fid in corpus.catalog.feature_ids:
            truth = corpus.ground_truth.expected_frequency(text.text_id, fid)
            roll = rng.random()
            if truth > 0:
                freq = round(truth * rng.uniform(0.75, 1.3), 4)
                conf = round(rng.uniform(0.55, 0.95), 4)
            elif roll < 0.25:
                # spurious neural detection the regex route missed
                freq = round(rng.uniform(0.5, 4.0), 4)
                conf = round(rng.uniform(0.3, 0.9), 4)
            else:
                freq = 0.0
                conf = round(rng.uniform(0.05, 0.6), 4)
            lines.append(
                json.dumps(
                    {
                        "text_id": text.text_id,
                        "feature_id": fid,
                        "frequency": freq,
                        "confidence": conf,
                    },
                    sort_keys=True,
                )
            )
    (out / "neural_stub.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_gold(out: Path) -> None:
    """Constructed gold examples over the toy catalog.

    Covers plain detections, positive-cue reinforcement, negative-cue
    suppression (annotated as expected false positives), the mixed-cue
    case where suppression fails, and filler-only contexts.
    """
    filler = "agním īḷe puróhitaṃ sóma pávate índra bráhman satyám"
    examples = []
    for k in range(8):
        fid = FEATURE_IDS[k]
        mk, pos, neg = marker_token(k), positive_cue_token(k), negative_cue_token(k)
        examples.append(
            {
                "target_word": mk,
                "context": f"{filler} {mk} {filler}",
                "true_features": {fid: match_confidence(0, 0)},
                "expected_false_positives": [],
                "distinguishing_cues": "bare marker, no context cues",
            }
        )
        examples.append(
            {
                "target_word": mk,
                "context": f"{filler} {pos} {mk} {filler}",
                "true_features": {fid: match_confidence(1, 0)},
                "expected_false_positives": [],
                "distinguishing_cues": "positive cue in window",
            }
        )
        examples.append(
            {
                "target_word": mk,
                "context": f"{filler} {neg} {mk} {filler}",
                "true_features": {},
                "expected_false_positives": [fid],
                "distinguishing_cues": "negative cue marks a spurious surface match",
            }
        )
    # Mixed cues: the negative evidence should win per the annotation,
    # but confidence arithmetic keeps the match; a deliberate error case.
    for k in range(8, 10):
        fid = FEATURE_IDS[k]
        mk, pos, neg = marker_token(k), positive_cue_token(k), negative_cue_token(k)
        examples.append(
            {
                "target_word": mk,
                "context": f"{filler} {pos} {mk} {neg} {filler}",
                "true_features": {},
                "expected_false_positives": [fid],
                "distinguishing_cues": "conflicting cues; annotation rejects the match",
            }
        )
    for i in range(4):
        examples.append(
            {
                "target_word": filler.split()[i],
                "context": filler,
                "true_features": {},
                "expected_false_positives": [],
                "distinguishing_cues": "filler only",
            }
        )
    (out / "gold.json").write_text(
        json.dumps({"examples": examples}, ensure_ascii=False, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )


def main() -> None:
    out = DATA_DIR / "synth_corpus"
    corpus = generate(build_spec())
    write_corpus(corpus, out)
    write_neural_stub(corpus, out)
    write_gold(out)
    total = sum(len(t.tokens) for t in corpus.texts)
    print(f"wrote {len(corpus.texts)} texts ({total} tokens), "
          f"{len(corpus.catalog.patterns)} toy features -> {out}")


if __name__ == "__main__":
    main()
