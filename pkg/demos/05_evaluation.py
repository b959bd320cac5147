"""Score translations: corpus BLEU and lexical-constraint accuracy.

Run with: python3 demos/05_evaluation.py
"""

from phraseprompt import ConstraintCase, bleu, constraint_accuracy

refs = [
    "das Risiko haengt von der Dosis ab".split(),
    "der Vertrag beruht auf Vertrauen".split(),
    "die Zahlung erfolgt nach Lieferung".split(),
]
system_a = [
    "das Risiko haengt von der Dosis ab".split(),
    "der Vertrag basiert auf Vertrauen".split(),
    "die Zahlung erfolgt nach Lieferung".split(),
]
system_b = [
    "Risiko von Dosis".split(),
    "Vertrag auf Vertrauen".split(),
    "Zahlung nach Lieferung".split(),
]

print(f"system A BLEU: {bleu(system_a, refs):.2f}")
print(f"system B BLEU: {bleu(system_b, refs):.2f}")
print(f"system B BLEU (smoothed): {bleu(system_b, refs, smooth=True):.2f}")

# Constraint accuracy: did the required target phrase make it into the
# output, as a contiguous token sequence?
constraints = ["der Dosis".split(), "beruht auf".split(), "nach Lieferung".split()]
for name, hyps in (("A", system_a), ("B", system_b)):
    cases = [
        ConstraintCase(tuple(h), tuple(c)) for h, c in zip(hyps, constraints)
    ]
    print(f"system {name} constraint accuracy: {constraint_accuracy(cases):.4f}")
