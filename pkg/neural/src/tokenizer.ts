/**
 * Whitespace tokenizer with a frequency-built vocabulary.
 *
 * Contexts in the weak-label file are already normalized and
 * space-joined by the primary pipeline, so splitting on whitespace
 * reproduces its token boundaries. Index 0 is reserved for
 * out-of-vocabulary words.
 */
export const UNK_ID = 0;

export class Vocabulary {
  private index = new Map<string, number>();

  constructor(readonly capacity: number) {
    if (capacity < 2) throw new Error("vocabulary needs capacity >= 2");
  }

  static build(texts: Iterable<string>, capacity: number): Vocabulary {
    const counts = new Map<string, number>();
    for (const text of texts) {
      for (const word of text.split(/\s+/)) {
        if (!word) continue;
        counts.set(word, (counts.get(word) ?? 0) + 1);
      }
    }
    const vocab = new Vocabulary(capacity);
    const ranked = [...counts.entries()].sort(
      (a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1),
    );
    for (const [word] of ranked.slice(0, capacity - 1)) {
      vocab.index.set(word, vocab.index.size + 1);
    }
    return vocab;
  }

  get size(): number {
    return this.index.size + 1;
  }

  idOf(word: string): number {
    return this.index.get(word) ?? UNK_ID;
  }

  encode(text: string): Int32Array {
    const words = text.split(/\s+/).filter(Boolean);
    const ids = new Int32Array(words.length);
    for (let i = 0; i < words.length; i++) ids[i] = this.idOf(words[i]);
    return ids;
  }

  serialize(): object {
    return { capacity: this.capacity, words: [...this.index.keys()] };
  }

  static deserialize(doc: { capacity: number; words: string[] }): Vocabulary {
    const vocab = new Vocabulary(doc.capacity);
    for (const word of doc.words) vocab.index.set(word, vocab.index.size + 1);
    return vocab;
  }
}
