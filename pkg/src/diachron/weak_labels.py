"""Weak-label generation from retained pattern matches.

Each retained match becomes one (word, context, feature, confidence)
training label. The label file is JSON-Lines, one fact per line; a
sidecar header maps feature ids to multi-hot target columns so trainers
can group labels per word-context into multi-label examples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import TextDocument, corpus_hash
from .patterns import DEFAULT_WINDOW, PatternCatalog, scan_corpus, window_text


@dataclass(frozen=True)
class WeakLabel:
    text_id: str
    word_index: int
    word: str
    context: str
    feature_id: str
    confidence: float


@dataclass
class LabelSet:
    labels: list[WeakLabel] = field(default_factory=list)
    catalog_version: str = "0"
    corpus_hash: str = ""
    feature_ids: list[str] = field(default_factory=list)

    @property
    def feature_index(self) -> dict[str, int]:
        return {fid: i for i, fid in enumerate(self.feature_ids)}

    def __len__(self) -> int:
        return len(self.labels)


def generate_labels(
    corpus: Sequence[TextDocument],
    catalog: PatternCatalog,
    window: int = DEFAULT_WINDOW,
) -> LabelSet:
    """One weak label per retained match, ordered by (chrono, word, feature).

    Confidences inherit the match weights, so every label sits in
    [0.4, 0.95]: the clamp floor of 0.1 is below the retention threshold
    and never survives into the label set.
    """
    docs = sorted(corpus, key=lambda d: d.chrono_index)
    surfaces = {d.id: [t.surface for t in d.tokens] for d in docs}
    labels = [
        WeakLabel(
            text_id=m.text_id,
            word_index=m.word_index,
            word=m.matched_surface,
            context=window_text(surfaces[m.text_id], m.word_index, window),
            feature_id=m.feature_id,
            confidence=m.confidence,
        )
        for m in scan_corpus(docs, catalog, window)
    ]
    return LabelSet(
        labels=labels,
        catalog_version=catalog.version,
        corpus_hash=corpus_hash(docs),
        feature_ids=catalog.feature_ids,
    )


def _header_path(path: Path) -> Path:
    return path.with_name(path.name + ".header.json")


def export_labels(label_set: LabelSet, path: str | Path) -> Path:
    """Write labels as JSONL plus a sidecar header with the feature map."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for lbl in label_set.labels:
            fh.write(
                json.dumps(
                    {
                        "text_id": lbl.text_id,
                        "word_index": lbl.word_index,
                        "word": lbl.word,
                        "context": lbl.context,
                        "feature_id": lbl.feature_id,
                        "confidence": lbl.confidence,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
            fh.write("\n")
    header = {
        "catalog_version": label_set.catalog_version,
        "corpus_hash": label_set.corpus_hash,
        "num_features": len(label_set.feature_ids),
        "feature_index": label_set.feature_index,
    }
    _header_path(path).write_text(
        json.dumps(header, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return path


def import_labels(path: str | Path) -> LabelSet:
    """Round-trip counterpart of :func:`export_labels`."""
    path = Path(path)
    labels = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            labels.append(
                WeakLabel(
                    text_id=rec["text_id"],
                    word_index=rec["word_index"],
                    word=rec["word"],
                    context=rec["context"],
                    feature_id=rec["feature_id"],
                    confidence=rec["confidence"],
                )
            )
    header = json.loads(_header_path(path).read_text(encoding="utf-8"))
    order = sorted(header["feature_index"], key=header["feature_index"].__getitem__)
    return LabelSet(
        labels=labels,
        catalog_version=header["catalog_version"],
        corpus_hash=header["corpus_hash"],
        feature_ids=order,
    )
