import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlslab.homotopy import (
    CyclicWord, RELATOR, TorusClass, TrivialClassError, canonical_codes, canonicalize,
    cyclic_reduce, dehn_reduce, enumerate_classes, format_word, free_reduce, inverse_word,
    parse_class, parse_word,
)
from mlslab.models import bolza, su_inverse


def test_examples_from_the_contract():
    assert canonicalize("a b a⁻¹").class_id == "b"
    assert canonicalize("b a").class_id == "ab"
    with pytest.raises(TrivialClassError):
        canonicalize("a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹")


def test_parse_word_accepts_all_notations():
    assert parse_word("a^-1 b") == parse_word("Ab") == parse_word("a⁻¹b") == (1, 2)
    assert parse_word(["a", "B"]) == (0, 3)
    assert format_word((0, 1, 6, 7)) == "aAdD"
    with pytest.raises(ValueError):
        parse_word("ax")


def test_reductions():
    assert free_reduce((0, 2, 3, 1, 4)) == (4,)
    assert cyclic_reduce((0, 2, 4, 1)) == (2, 4)
    # abABc = dcDC c, which is cyclically c
    assert dehn_reduce(RELATOR[:5]) == (4,)
    assert len(dehn_reduce(RELATOR[:6])) == 2
    assert dehn_reduce(RELATOR) == ()


def test_enumeration_examples():
    assert enumerate_classes("torus", 0) == []
    got = {(c.p, c.q) for c in enumerate_classes("torus", 1)}
    assert got == {(1, 0), (0, 1), (1, 1), (1, -1)}
    assert len(enumerate_classes("torus", 2)) == 12
    # x and x^-1 are kept as distinct classes
    assert sorted(c.class_id for c in enumerate_classes("bolza", 1)) == sorted("aAbBcCdD")


def test_torus_orientation_convention():
    classes = enumerate_classes("torus", 3)
    for c in classes:
        assert c.canonical_orientation() == c
        assert c.inverse() not in classes
    assert TorusClass(-2, 1).canonical_orientation() == TorusClass(2, -1)
    assert TorusClass(0, -3).canonical_orientation() == TorusClass(0, 3)


def test_parse_class():
    assert parse_class("(2,-1)", "torus") == TorusClass(2, -1)
    with pytest.raises(TrivialClassError):
        parse_class("0,0", "torus")
    assert parse_class("ba", "bolza").class_id == "ab"


def test_bolza_enumeration_sorted_and_unique():
    model = bolza()
    classes = enumerate_classes("bolza", 4)
    ids = [c.class_id for c in classes]
    assert len(ids) == len(set(ids))
    L = model.word_lengths([c.letters for c in classes])
    assert np.all(np.diff(L) >= -1e-9)


def test_vectorized_canonical_codes_match_scalar_canonicalization():
    rng = np.random.default_rng(3)
    for n in (4, 5, 6):
        words, lengths, codes = canonical_codes(n)
        for i in rng.choice(len(words), size=60, replace=False):
            try:
                c = canonicalize(tuple(int(x) for x in words[i])).letters
            except TrivialClassError:
                c = ()
            assert lengths[i] == len(c)
            if c:
                assert codes[i] == int(np.array(c) @ 8 ** np.arange(len(c) - 1, -1, -1))


def _ball_matrices(model, radius: int) -> np.ndarray:
    """Every freely reduced word of length <= radius, as SU(1,1) matrices."""
    mats = model.letter_matrices()
    out = [np.eye(2, dtype=complex)[None]]
    layer, last = mats.copy(), np.arange(8)
    out.append(layer)
    for _ in range(radius - 1):
        rows, cols = np.nonzero(np.arange(8)[None, :] != (last[:, None] ^ 1))
        layer, last = layer[rows] @ mats[cols], cols
        out.append(layer)
    return np.concatenate(out)


def test_enumeration_matches_brute_force_conjugacy_search():
    """Partition all words of length <= 3 by exhaustive conjugator search."""
    bound = 3
    model = bolza()
    words = []
    for n in range(1, bound + 1):
        for w in itertools.product(range(8), repeat=n):
            if free_reduce(w) == w:
                words.append(w)
    U = np.stack([model.rho(w) for w in words])
    G = _ball_matrices(model, 2 * bound)
    Ginv = su_inverse(G)
    tr = np.round(np.abs(np.trace(U, axis1=1, axis2=2).real), 6)

    parent = list(range(len(words)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def keys(M):
        # sign-normalized SU(1,1) entries, rounded and hashed
        M = M * np.where(M[:, 0, 0].real < 0, -1, 1)[:, None, None]
        k = np.round(np.stack([M[:, 0, 0].real, M[:, 0, 0].imag, M[:, 0, 1].real, M[:, 0, 1].imag], 1) * 1e5)
        k = np.clip(k, -1e15, 1e15).astype(np.int64)
        return k @ np.array([1, 1_000_003, 998_244_353, 2_147_483_647], dtype=np.int64)

    Ukeys = keys(U)
    for i in range(len(words)):
        if find(i) != i:
            continue
        peers = np.array([j for j in range(i + 1, len(words)) if tr[j] == tr[i]], dtype=int)
        if peers.size == 0:
            continue
        conj = G @ U[i] @ Ginv
        ck = keys(conj)
        for j in peers[np.isin(Ukeys[peers], ck)]:
            d = np.minimum(np.abs(conj - U[j]).max(axis=(1, 2)), np.abs(conj + U[j]).max(axis=(1, 2)))
            if d.min() < 1e-6:
                parent[find(j)] = find(i)
    brute = {}
    for i, w in enumerate(words):
        brute.setdefault(find(i), set()).add(w)
    canon = {}
    for w in words:
        canon.setdefault(canonicalize(w).letters, set()).add(w)
    assert sorted(map(sorted, brute.values())) == sorted(map(sorted, canon.values()))
    assert len(canon) == len(enumerate_classes("bolza", bound))


# ---------------------------------------------------------------- properties

words = st.lists(st.integers(0, 7), min_size=1, max_size=9).map(tuple)


def _safe(w):
    try:
        return canonicalize(w)
    except TrivialClassError:
        return None


@settings(max_examples=150, deadline=None)
@given(words)
def test_canonicalize_is_idempotent(w):
    c = _safe(w)
    if c is not None:
        assert canonicalize(c) == c
        assert canonicalize(c.letters) == c


@settings(max_examples=150, deadline=None)
@given(words, st.lists(st.integers(0, 7), min_size=0, max_size=4).map(tuple))
def test_canonicalize_is_conjugation_invariant(w, u):
    assert _safe(u + w + inverse_word(u)) == _safe(w)


@settings(max_examples=100, deadline=None)
@given(words)
def test_equal_canonical_words_share_traces(w):
    c = _safe(w)
    if c is None:
        return
    model = bolza()
    assert abs(abs(model.trace(c)) - abs(np.trace(model.rho(w)).real)) <= 1e-9 * abs(model.trace(c))


@settings(max_examples=100, deadline=None)
@given(words)
def test_inverse_class_has_equal_length(w):
    c = _safe(w)
    if c is None:
        return
    model = bolza()
    inv = c.inverse()
    assert isinstance(inv, CyclicWord)
    assert abs(model.background_length(c) - model.background_length(inv)) <= 1e-10 * model.background_length(c)
