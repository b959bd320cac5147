import math

import numpy as np
import pytest

from phraseprompt import (
    ConstraintCase,
    bleu,
    constraint_accuracy,
    contains_token_subsequence,
)
from phraseprompt.errors import EmptyCaseSet, EmptyCorpus, LengthMismatch
from phraseprompt.oracles import oracle_contains


def test_bleu_identity_is_100():
    corpus = [["a", "b", "c", "d"], ["e", "f", "g", "h", "i"]]
    assert bleu(corpus, corpus) == 100.0


def test_bleu_hand_derived_brevity_case():
    hyp = [["a", "b", "c", "d"]]
    ref = [["a", "b", "c", "d", "e"]]
    score = bleu(hyp, ref)
    assert math.isclose(score, 100.0 * math.exp(1.0 - 5.0 / 4.0), rel_tol=1e-12)
    assert abs(score - 77.88) < 0.01


def test_bleu_disjoint_is_zero():
    assert bleu([["x", "y", "z", "w"]], [["a", "b", "c", "d"]]) == 0.0


def test_bleu_errors():
    with pytest.raises(LengthMismatch):
        bleu([["a"]], [["a"], ["b"]])
    with pytest.raises(EmptyCorpus):
        bleu([], [])


def test_bleu_short_hypothesis_zero_without_smoothing():
    assert bleu([["a", "b"]], [["a", "b"]]) == 0.0  # no 3-grams or 4-grams
    assert bleu([["a", "b"]], [["a", "b"]], smooth=True) > 0.0


def test_bleu_permutation_invariance():
    rng = np.random.default_rng(17)
    hyps = [["a", "b", "c", "d", "e"], ["b", "c"], ["d", "d", "e", "a"]]
    refs = [["a", "b", "d", "d", "e"], ["b", "d"], ["d", "d", "a", "a"]]
    base = bleu(hyps, refs, smooth=True)
    for _ in range(5):
        perm = rng.permutation(len(hyps))
        assert bleu([hyps[i] for i in perm], [refs[i] for i in perm], smooth=True) == base


def test_bleu_range():
    rng = np.random.default_rng(18)
    vocab = list("abcdef")
    for _ in range(50):
        hyps = [
            [vocab[int(i)] for i in rng.integers(0, 6, int(rng.integers(1, 9)))]
            for _ in range(3)
        ]
        refs = [
            [vocab[int(i)] for i in rng.integers(0, 6, int(rng.integers(1, 9)))]
            for _ in range(3)
        ]
        score = bleu(hyps, refs, smooth=bool(rng.random() < 0.5))
        assert 0.0 <= score <= 100.0


def test_constraint_verbatim_containment():
    case = ConstraintCase(("der", "grosse", "Hund", "rennt"), ("grosse", "Hund"))
    assert constraint_accuracy([case]) == 1.0


def test_constraint_two_of_three():
    cases = [
        ConstraintCase(("a", "b", "c"), ("b", "c")),
        ConstraintCase(("x", "b", "c"), ("b", "c")),
        ConstraintCase(("a", "c", "b"), ("b", "c")),
    ]
    assert abs(constraint_accuracy(cases) - 0.6667) < 1e-4


def test_constraint_matching_is_token_exact():
    # "rot" inside "rote" must not count
    case = ConstraintCase(("die", "rote", "Tuer"), ("rot",))
    assert constraint_accuracy([case]) == 0.0
    case_sensitive = ConstraintCase(("die", "Rote",), ("rote",))
    assert constraint_accuracy([case_sensitive]) == 0.0


def test_constraint_empty_case_set():
    with pytest.raises(EmptyCaseSet):
        constraint_accuracy([])


def test_constraint_adding_satisfied_case_never_decreases():
    cases = [
        ConstraintCase(("a", "b"), ("z",)),
        ConstraintCase(("z", "b"), ("z",)),
    ]
    before = constraint_accuracy(cases)
    after = constraint_accuracy(cases + [ConstraintCase(("z",), ("z",))])
    assert after >= before


def test_subsequence_matches_naive_scan():
    rng = np.random.default_rng(19)
    alphabet = list("abc")
    for _ in range(300):
        hay = [alphabet[int(i)] for i in rng.integers(0, 3, int(rng.integers(0, 10)))]
        needle = [alphabet[int(i)] for i in rng.integers(0, 3, int(rng.integers(1, 4)))]
        assert contains_token_subsequence(hay, needle) == oracle_contains(hay, needle)
