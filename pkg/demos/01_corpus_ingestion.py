"""Walk through corpus loading: normalization, tokenization, ordering.

Uses the bundled demonstration corpus (synthetic IAST pastiche).
"""

from pathlib import Path

from diachron import load_corpus, normalize, read_manifest, tokenize

DATA = Path(__file__).resolve().parents[1] / "src" / "diachron" / "data"

# Normalization lowercases and canonically composes; diacritics survive.
sample = "Agním Īḷe Puróhitaṃ"
print("raw:       ", sample)
print("normalized:", normalize(sample))

# Decomposed letter+mark sequences collapse to one code point.
decomposed = "ā"  # a + combining macron
print(f"compose: {[hex(ord(c)) for c in decomposed]} ->",
      [hex(ord(c)) for c in normalize(decomposed)])

# Tokens are maximal letter runs; danda and digits separate, sandhi and
# avagraha do not split.
text = normalize("tat tvam asi ॥ so'ham iti 42 vākyam")
for tok in tokenize(text):
    print(f"  token {tok.word_index}: {tok.surface!r} bytes {tok.byte_span}")

# Full corpus load: chronological ordering plus period metadata.
manifest = read_manifest(DATA / "demo_corpus" / "manifest.json")
docs = load_corpus(manifest)
print(f"\nloaded {len(docs)} texts:")
for doc in docs:
    print(
        f"  [{doc.chrono_index}] {doc.id:<22} {doc.period.value:<12}"
        f" ({doc.period.date_range:<16}) {doc.word_count:>4} words"
    )
