"""Contextual pattern matching and the confidence weighting scheme.

Matches get a base weight of 0.6, +0.2 per positive context pattern
found in the +/-20-token window, -0.3 per negative one, clamped to
[0.1, 0.95]; anything under 0.4 is dropped.
"""

from pathlib import Path

from diachron import (
    detect_all,
    load_corpus,
    match_confidence,
    read_catalog,
    read_manifest,
    scan_text,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "diachron" / "data"

print("confidence weights by (positives, negatives):")
for p, n in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]:
    print(f"  ({p}, {n}) -> {match_confidence(p, n):.2f}")

catalog = read_catalog(DATA / "demo_catalog.json")
docs = load_corpus(read_manifest(DATA / "demo_corpus" / "manifest.json"))
print(f"\ncatalog {catalog.version}: {len(catalog.patterns)} patterns,",
      catalog.category_counts)

# Per-text scan of one pattern: the sma particle boosted by nearby ha/vai.
sma = next(p for p in catalog.patterns if p.feature_id == "particle_sma")
for doc in docs[:4]:
    matches = scan_text(doc, sma)
    if matches:
        confs = ", ".join(f"{m.confidence:.2f}" for m in matches)
        print(f"  {doc.id}: {len(matches)} sma match(es), weights [{confs}]")

# Whole-corpus frequency matrix, occurrences per 1,000 words.
matrix = detect_all(docs, catalog)
print("\nper-1,000-word frequencies (first texts):")
header = " ".join(f"{t[:9]:>10}" for t in matrix.texts[:4])
print(f"{'feature':<22}{header}")
for i, fid in enumerate(matrix.features):
    row = " ".join(f"{matrix.freq[i, j]:>10.2f}" for j in range(4))
    print(f"{fid:<22}{row}")
