import random
from pathlib import Path

import pytest

from diachron.corpus import PeriodId, TextDocument, normalize, tokenize
from diachron.synth import SynthSpec, SynthTextSpec, generate, toy_catalog

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "diachron" / "data"
SYNTH_DIR = DATA_DIR / "synth_corpus"
DEMO_DIR = DATA_DIR / "demo_corpus"

PERIOD_CYCLE = [
    PeriodId.EARLY_VEDIC,
    PeriodId.LATE_VEDIC,
    PeriodId.LATEST_VEDIC,
    PeriodId.CLASSICAL,
]


def make_spec(
    seed: int,
    n_texts: int,
    tokens_per_text,
    n_features: int = 20,
    max_rate: float = 8.0,
    positive_cue_prob: float = 0.4,
    negative_cue_prob: float = 0.3,
) -> SynthSpec:
    """Randomized synthetic-corpus spec, deterministic in ``seed``."""
    fids = [p.feature_id for p in toy_catalog(n_features).patterns]
    rng = random.Random(seed)
    sizes = (
        tokens_per_text
        if isinstance(tokens_per_text, (list, tuple))
        else [tokens_per_text] * n_texts
    )
    texts = tuple(
        SynthTextSpec(
            text_id=f"text_{i:02d}",
            period=PERIOD_CYCLE[i % 4],
            token_count=sizes[i],
            rates={f: round(rng.uniform(0, max_rate), 2) for f in fids},
            positive_cue_prob=positive_cue_prob,
            negative_cue_prob=negative_cue_prob,
        )
        for i in range(n_texts)
    )
    return SynthSpec(seed=seed, texts=texts)


def docs_from_synth(corpus) -> list[TextDocument]:
    """Tokenize generated texts without touching the filesystem."""
    return [
        TextDocument(
            id=t.text_id,
            title=t.text_id,
            period=t.period,
            chrono_index=i,
            raw=t.rendered,
            tokens=tokenize(normalize(t.rendered)),
        )
        for i, t in enumerate(corpus.texts)
    ]


@pytest.fixture(scope="session")
def small_synth():
    """Three-text toy corpus with decoration, shared across tests."""
    corpus = generate(make_spec(seed=101, n_texts=3, tokens_per_text=1500, n_features=6))
    return corpus, docs_from_synth(corpus)


@pytest.fixture(scope="session")
def shipped_paths():
    return {
        "manifest": SYNTH_DIR / "manifest.json",
        "catalog": SYNTH_DIR / "catalog.json",
        "neural": SYNTH_DIR / "neural_stub.jsonl",
        "gold": SYNTH_DIR / "gold.json",
        "ground_truth": SYNTH_DIR / "ground_truth.json",
    }
