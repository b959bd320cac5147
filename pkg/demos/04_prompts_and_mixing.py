"""Retrieve bilingual phrase prompts, render prompt lines, and build the
mixed co-training corpus.

Run with: python3 demos/04_prompts_and_mixing.py
"""

from phraseprompt import (
    HashedContextEmbedder,
    MixConfig,
    PromptConfig,
    build_database,
    constraint_prompt,
    make_mixed_corpus,
    parse_alignments,
    parse_parallel,
    parse_prompted_line,
    render_prompt,
    retrieve_prompt,
)

SRC = (
    "the contract is based on trust\n"
    "payment depends on delivery\n"
    "the risk depends on the dose\n"
    "the treaty is based on consensus\n"
)
TGT = (
    "der Vertrag beruht je nach Vertrauen\n"
    "die Zahlung richtet sich nach Lieferung\n"
    "das Risiko haengt von der Dosis ab\n"
    "der Vertrag beruht je nach Konsens\n"
)
ALIGN = (
    "0-0 1-1 2-2 3-3 4-4 5-5\n0-1 1-2 1-3 2-4 3-5\n"
    "0-0 1-1 2-2 2-6 3-3 4-4 5-5\n0-0 1-1 2-2 3-3 4-4 5-5\n"
)

corpus = parse_parallel(SRC, TGT)
corpus.alignments = parse_alignments(ALIGN, corpus)
embedder = HashedContextEmbedder()
db = build_database(corpus, embedder, max_len=3)

# Automatic retrieval: nearest phrase pairs tile the new input sentence.
tokens = "the price is based on demand".split()
prompt = retrieve_prompt(db, tokens, embedder, PromptConfig(strategy="greedy_cover"))
print("retrieved pairs:")
for p in prompt.pairs:
    print(f"  {p.distance:8.4f}  {p.src_phrase!r} -> {p.tgt_phrase!r}")
line = render_prompt(prompt, tokens)
print(f"\nprompted line:\n  {line}")

# The line format round-trips: downstream tooling can always recover the
# pairs and the bare source.
parsed, source = parse_prompted_line(line)
print(f"\nparsed back {len(parsed)} pairs; source: {' '.join(source)!r}")

# Handcrafted constraint prompts pin terminology without any retrieval.
constraint = constraint_prompt([("based on", "je nach")])
print(f"\nconstraint line:\n  {render_prompt(constraint, tokens)}")

# Mixed co-training data: originals first, prompted copies after.
src_lines, tgt_lines = make_mixed_corpus(
    corpus, db, embedder, MixConfig(ratio=1.0, seed=0, exclude_self=True)
)
print(f"\nmixed corpus ({len(src_lines)} line pairs):")
for s, t in zip(src_lines, tgt_lines):
    print(f"  {s}  |||  {t}")
