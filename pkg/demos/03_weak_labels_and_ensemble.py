"""Weak labels from retained matches, then confidence-weighted ensembling.

The label file is the training input for a neural detector; its
per-(text, feature) predictions come back through a JSON-Lines wire
format and blend with the regex frequencies.
"""

import tempfile
from pathlib import Path

from diachron import (
    EnsembleConfig,
    NeuralPrediction,
    combine,
    combine_matrix,
    decide,
    detect_all,
    generate_labels,
    load_corpus,
    read_catalog,
    read_manifest,
)
from diachron.weak_labels import export_labels

DATA = Path(__file__).resolve().parents[1] / "src" / "diachron" / "data"

catalog = read_catalog(DATA / "demo_catalog.json")
docs = load_corpus(read_manifest(DATA / "demo_corpus" / "manifest.json"))

labels = generate_labels(docs, catalog)
print(f"{len(labels)} weak labels; all confidences in [0.4, 0.95]")
for lbl in labels.labels[:5]:
    print(f"  {lbl.text_id} @{lbl.word_index:<4} {lbl.feature_id:<22}"
          f" {lbl.word!r} w={lbl.confidence:.2f}")
with tempfile.TemporaryDirectory() as td:
    path = export_labels(labels, Path(td) / "labels.jsonl")
    print(f"exported {sum(1 for _ in open(path, encoding='utf-8'))} JSONL lines"
          f" + header sidecar")

# The ensemble formula discounts the neural frequency by its confidence:
print("\nensemble blend of f_t=10 (neural) with f_r=20 (regex):")
for c in (0.0, 0.4, 0.8, 1.0):
    f = combine(f_t=10.0, f_r=20.0, c=c, w_t=0.35, w_r=0.65)
    print(f"  confidence {c:.1f} -> {f:.3f}")

# Decisions: regex hits always count; neural-only hits need confidence.
config = EnsembleConfig()
print("\ndecision rule (low=0.25, high=0.75):")
for f_r, f_t, c in [(2.0, 0.0, 0.0), (0.0, 3.0, 0.9), (0.0, 3.0, 0.1), (1.0, 1.0, 0.5)]:
    det, src = decide(f_r, f_t, c, config)
    print(f"  f_r={f_r} f_t={f_t} c={c}: detected={det} via {src.value}")

# Matrix-level combination with a tiny synthetic neural file.
regex_matrix = detect_all(docs, catalog)
predictions = [
    NeuralPrediction(docs[0].id, "deity_names", 25.0, 0.9),
    NeuralPrediction(docs[-1].id, "philosophical_terms", 4.0, 0.8),
]
result = combine_matrix(regex_matrix, predictions, config,
                        categories={p.feature_id: p.category.value for p in catalog.patterns})
print(f"\nensemble detections: {int(result.matrix.detected.sum())}"
      f" (regex alone: {int(regex_matrix.detected.sum())})")
