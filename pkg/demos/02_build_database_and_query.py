"""Build a phrase database keyed by contextual vectors and query it.

The same surface phrase stored under different sentence contexts gets
different key vectors, so a query picks the translation whose context
matches; that is the whole point of keying on contextual representations.

Run with: python3 demos/02_build_database_and_query.py
"""

from phraseprompt import (
    HashedContextEmbedder,
    build_database,
    parse_alignments,
    parse_parallel,
    pool_phrase,
    query,
    stats,
)

# "bank" appears in two senses; the target side disambiguates.
SRC = "the river bank was muddy\nthe savings bank was closed\n"
TGT = "das Flussufer war schlammig\ndie Sparkasse war geschlossen\n"
ALIGN = "0-0 1-1 2-1 3-2 4-3\n0-0 1-1 2-1 3-2 4-3\n"

corpus = parse_parallel(SRC, TGT)
corpus.alignments = parse_alignments(ALIGN, corpus)

embedder = HashedContextEmbedder(dim=64, window=2, seed=42)
db = build_database(corpus, embedder, max_len=3)

s = stats(db)
print(f"entries={s.entry_count} distinct_src={s.distinct_src_phrases} "
      f"distinct_pairs={s.distinct_pairs} dim={s.dim}")

# Embed a new sentence mentioning the river sense and query with the
# pooled vector of its "bank" token.
tokens = "walking along the river bank".split()
tv = embedder.embed(tokens)
vec = pool_phrase(tv, (4, 5))  # the span covering "bank"

print("\nnearest phrase pairs for 'bank' in a river context:")
for entry, dist in query(db, vec, 3):
    print(f"  {dist:8.4f}  {entry.src_phrase!r} -> {entry.tgt_phrase!r} "
          f"(from sentence {entry.sentence_id})")

# Same word, savings context: the other sense wins.
tokens = "my savings bank account".split()
vec = pool_phrase(embedder.embed(tokens), (2, 3))
print("\nnearest phrase pairs for 'bank' in a savings context:")
for entry, dist in query(db, vec, 3):
    print(f"  {dist:8.4f}  {entry.src_phrase!r} -> {entry.tgt_phrase!r} "
          f"(from sentence {entry.sentence_id})")
