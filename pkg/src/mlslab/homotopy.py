"""Free-homotopy classes of closed curves on the two model surfaces.

Torus classes are primitive or non-primitive integer pairs.  Genus-2 classes
are conjugacy classes of the surface group

    < a, b, c, d | a b a^-1 b^-1 c d c^-1 d^-1 >

represented by a canonical cyclic word.  Letters are stored as small ints:
a=0, a^-1=1, b=2, b^-1=3, ... so that ``x ^ 1`` is the inverse of ``x`` and
numeric order is the tie-breaking alphabet order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

LETTERS = "aAbBcCdD"
RELATOR = (0, 2, 1, 3, 4, 6, 5, 7)


class TrivialClassError(ValueError):
    """Raised when a word or pair represents the trivial class."""


def inverse_word(w: Sequence[int]) -> tuple:
    return tuple(x ^ 1 for x in reversed(w))


def _rotations(w):
    return [tuple(w[i:]) + tuple(w[:i]) for i in range(len(w))]


RELATOR_ROTATIONS = _rotations(RELATOR) + _rotations(inverse_word(RELATOR))

# prefix of a relator rotation -> the complementary side, read backwards
_DEHN = {}
_HALF = {}
for _r in RELATOR_ROTATIONS:
    for _k in range(5, 9):
        _DEHN[_r[:_k]] = inverse_word(_r[_k:])
    _HALF[_r[:4]] = inverse_word(_r[4:])
del _r, _k


@dataclass(frozen=True, order=True)
class TorusClass:
    p: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))

    @property
    def trivial(self) -> bool:
        return self.p == 0 and self.q == 0

    def inverse(self) -> "TorusClass":
        return TorusClass(-self.p, -self.q)

    def power(self, k: int) -> "TorusClass":
        return TorusClass(k * self.p, k * self.q)

    def canonical_orientation(self) -> "TorusClass":
        if self.p > 0 or (self.p == 0 and self.q > 0):
            return self
        return self.inverse()

    @property
    def class_id(self) -> str:
        return f"{self.p},{self.q}"

    def __str__(self):
        return self.class_id


@dataclass(frozen=True, order=True)
class CyclicWord:
    """A canonical cyclic word; construct through :func:`canonicalize`."""

    letters: tuple

    def __len__(self):
        return len(self.letters)

    @property
    def class_id(self) -> str:
        return format_word(self.letters)

    def inverse(self) -> "CyclicWord":
        return canonicalize(inverse_word(self.letters))

    def power(self, k: int) -> "CyclicWord":
        if k < 1:
            raise ValueError("power must be positive")
        return canonicalize(self.letters * k)

    def __str__(self):
        return self.class_id


ConjugacyClass = Union[TorusClass, CyclicWord]


def format_word(w: Iterable[int]) -> str:
    return "".join(LETTERS[x] for x in w)


_TOKEN = re.compile(r"([a-dA-D])(\^-1|⁻¹|\^\{-1\})?")


def parse_word(word) -> tuple:
    """Accept "abA", "a b a⁻¹", "a^-1 b", or a sequence of ints/letters."""
    if isinstance(word, CyclicWord):
        return word.letters
    if isinstance(word, str):
        s = word.replace(" ", "").replace("*", "")
        out = []
        pos = 0
        while pos < len(s):
            m = _TOKEN.match(s, pos)
            if m is None:
                raise ValueError(f"bad letter in word {word!r} at {pos}")
            x = LETTERS.index(m.group(1))
            if m.group(2):
                x ^= 1
            out.append(x)
            pos = m.end()
        return tuple(out)
    out = []
    for x in word:
        if isinstance(x, str):
            out.extend(parse_word(x))
        else:
            x = int(x)
            if not 0 <= x < 8:
                raise ValueError(f"letter {x} outside alphabet")
            out.append(x)
    return tuple(out)


def free_reduce(w: Sequence[int]) -> tuple:
    stack = []
    for x in w:
        if stack and stack[-1] == x ^ 1:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def cyclic_reduce(w: Sequence[int]) -> tuple:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == w[j - 1] ^ 1:
        i += 1
        j -= 1
    return w[i:j]


def dehn_reduce(w: Sequence[int]) -> tuple:
    """Cyclic Dehn reduction: replace more than half a relator by the rest."""
    w = cyclic_reduce(w)
    while True:
        n = len(w)
        if n < 5:
            return w
        ww = w + w
        hit = None
        for i in range(n):
            for k in range(min(n, 8), 4, -1):
                rep = _DEHN.get(ww[i:i + k])
                if rep is not None:
                    hit = rep + ww[i + k:i + n]
                    break
            if hit is not None:
                break
        if hit is None:
            return w
        w = cyclic_reduce(hit)


def min_rotation(w: Sequence[int]) -> tuple:
    w = tuple(w)
    if not w:
        return w
    ww = w + w
    n = len(w)
    return min(ww[i:i + n] for i in range(n))


_BY_FIRST = {}
_BY_LAST = {}
for _r in RELATOR_ROTATIONS:
    _BY_FIRST.setdefault(_r[0], []).append(_r)
    _BY_LAST.setdefault(_r[-1], []).append(_r)
del _r


def _match(r, uu, pos, limit):
    k = 0
    while k < limit and r[k] == uu[pos + k]:
        k += 1
    return k


def chain_moves(u: tuple):
    """Length-nonincreasing rewrites of a Dehn-reduced cyclic word.

    A chain is a strip of relator cells glued along single letters: cell j
    reads s_j e_j t_j^-1 f_j around its boundary, where s_j runs along the
    current word, t_j along the replacement and e_j = f_(j+1)^-1 is the
    letter shared with the next cell.  A strip replaces s_1...s_k by
    t_1...t_k; a ring of cells replaces the whole cyclic word.  Single-cell
    strips with |s| = 4 are the half-relator swaps.  Yields new cyclic words
    (not yet reduced) whose length is at most len(u).
    """
    n = len(u)
    if n < 3:
        return
    uu = u * 3
    cap = min(4, n)

    def extend(i0, pos, used, e_prev, t_acc, ring_close):
        for r in _BY_LAST.get(e_prev ^ 1, ()):
            if r[0] != uu[pos]:
                continue
            top = _match(r, uu, pos, min(cap, n - used))
            for ell in range(1, top + 1):
                total = used + ell
                if ring_close is None:
                    t = t_acc + inverse_word(r[ell:7])
                    if len(t) <= total:
                        yield (t + uu[i0 + total:i0 + n]) if total < n else t
                e = r[ell]
                t2 = t_acc + inverse_word(r[ell + 1:7])
                if total == n:
                    if ring_close is not None and e == ring_close and len(t2) <= n:
                        yield t2
                    continue
                if len(t2) - total > (n - total) // 2 + 1:
                    continue
                yield from extend(i0, pos + ell, total, e, t2, ring_close)

    for i0 in range(n):
        for r in _BY_FIRST.get(u[i0], ()):
            top = _match(r, uu, i0, cap)
            for ell in range(1, top + 1):
                t = inverse_word(r[ell:])
                if len(t) <= ell:
                    yield (t + uu[i0 + ell:i0 + n]) if ell < n else t
                if ell < n:
                    t1 = inverse_word(r[ell + 1:])
                    if len(t1) - ell <= (n - ell) // 2 + 1:
                        yield from extend(i0, i0 + ell, ell, r[ell], t1, None)
                    # ring whose first cell starts here
                    t1 = inverse_word(r[ell + 1:7])
                    yield from extend(i0, i0 + ell, ell, r[ell], t1, r[7] ^ 1)


def canonical_letters(word) -> tuple:
    """Canonical letter tuple of the conjugacy class of ``word``.

    Dehn reduction alone is not a normal form for this group: chains of
    relator cells can rewrite a reduced word into a different reduced word
    of the same length (or a shorter one).  The set of words reachable by
    such rewrites is closed off and its lexicographically least rotation
    is chosen; a rewrite that shortens the word restarts the search.
    """
    w = dehn_reduce(parse_word(word))
    if not w:
        raise TrivialClassError("word is trivial in the surface group")
    while True:
        start = min_rotation(w)
        seen = {start}
        stack = [start]
        shorter = None
        while stack and shorter is None:
            u = stack.pop()
            for v in chain_moves(u):
                v = dehn_reduce(v)
                if len(v) < len(u):
                    shorter = v
                    break
                v = min_rotation(v)
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if shorter is None:
            return min(seen)
        if not shorter:
            raise TrivialClassError("word is trivial in the surface group")
        w = shorter


def canonicalize(word) -> CyclicWord:
    return CyclicWord(canonical_letters(word))


def unoriented_key(c: CyclicWord) -> tuple:
    """Key shared by a class and its inverse (they have equal lengths)."""
    return min(c.letters, canonical_letters(inverse_word(c.letters)))


def parse_class(text: str, model_kind: str) -> ConjugacyClass:
    if model_kind == "torus":
        parts = text.replace("(", "").replace(")", "").split(",")
        if len(parts) != 2:
            raise ValueError(f"torus class must be 'p,q', got {text!r}")
        c = TorusClass(int(parts[0]), int(parts[1]))
        if c.trivial:
            raise TrivialClassError("(0,0) is the trivial class")
        return c
    return canonicalize(text)


# ---------------------------------------------------------------- enumeration

def torus_classes(bound: int) -> list:
    out = []
    for p in range(0, bound + 1):
        for q in range(-bound, bound + 1):
            if p == 0 and q <= 0:
                continue
            out.append(TorusClass(p, q))
    return out


def reduced_words(n: int) -> np.ndarray:
    """All cyclically reduced words of length n as an (N, n) int8 array."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    words = np.arange(8, dtype=np.int8)[:, None]
    for _ in range(n - 1):
        last = words[:, -1]
        nxt = np.arange(8, dtype=np.int8)
        ok = nxt[None, :] != (last[:, None] ^ 1)
        rows, cols = np.nonzero(ok)
        words = np.concatenate([words[rows], nxt[cols][:, None]], axis=1)
    if n >= 2:
        words = words[words[:, 0] != (words[:, -1] ^ 1)]
    return words


def _word_codes(words: np.ndarray) -> np.ndarray:
    n = words.shape[1]
    powers = 8 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return words.astype(np.int64) @ powers


def code_to_letters(code: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        out.append(int(code % 8))
        code //= 8
    return tuple(reversed(out))


_HALF_CODES = np.array(sorted(_word_codes(np.array(list(_HALF), dtype=np.int8))))
_THIRD_CODES = np.array(sorted(set(_word_codes(np.array([r[:3] for r in RELATOR_ROTATIONS], dtype=np.int8)))))


def canonical_codes(n: int):
    """Canonicalize every cyclically reduced word of length n.

    Returns (words, lengths, codes): the raw words and, per word, the length
    and base-8 code of its canonical representative.  A word admits no
    rewrite unless it has a cyclic window equal to half a relator or is a
    ring of 3-letter relator pieces; all other words are rigid and their
    canonical form is the least rotation.  The rest go through
    :func:`canonical_letters`.
    """
    words = reduced_words(n)
    if n == 0:
        return words, np.zeros(0, np.int64), np.zeros(0, np.int64)
    rot_codes = np.stack([_word_codes(np.roll(words, -r, axis=1)) for r in range(n)], axis=1)
    codes = rot_codes.min(axis=1)
    lengths = np.full(len(words), n, dtype=np.int64)
    if n >= 4:
        window = np.zeros_like(rot_codes)
        for j in range(4):
            window = window * 8 + np.roll(words, -j, axis=1).astype(np.int64)
        dirty = np.isin(window, _HALF_CODES).any(axis=1)
    else:
        dirty = np.zeros(len(words), dtype=bool)
    if n >= 3 and n % 3 == 0:
        third = np.zeros_like(rot_codes)
        for j in range(3):
            third = third * 8 + np.roll(words, -j, axis=1).astype(np.int64)
        piece = np.isin(third, _THIRD_CODES)
        for off in range(3):
            dirty |= piece[:, off::3].all(axis=1)
    if dirty.any():
        cache = {}
        for i in np.nonzero(dirty)[0]:
            key = int(codes[i])
            if key not in cache:
                try:
                    canon = canonical_letters(code_to_letters(key, n))
                    cache[key] = (len(canon), int(_word_codes(np.array([canon], np.int8))[0]) if canon else 0)
                except TrivialClassError:
                    cache[key] = (0, 0)
            lengths[i], codes[i] = cache[key]
    return words, lengths, codes


def genus2_class_keys(bound: int) -> list:
    """Sorted unique (length, code) keys of nontrivial classes up to a word length."""
    keys = set()
    for n in range(1, bound + 1):
        _, lengths, codes = canonical_codes(n)
        pairs = np.unique(np.stack([lengths, codes], axis=1), axis=0)
        keys.update((int(a), int(b)) for a, b in pairs if a > 0)
    return sorted(keys)


def enumerate_classes(model_kind, bound: int, model=None) -> list:
    """Every nontrivial class within ``bound``, sorted by background length.

    ``model_kind`` is "torus", "bolza" (or "genus2"), or a model instance.
    Ties in length are broken by (word length, word) for determinism.
    """
    from . import models as _models

    if not isinstance(model_kind, str):
        model = model_kind
        model_kind = "torus" if isinstance(model, _models.TorusModel) else "bolza"
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if bound == 0:
        return []
    if model_kind == "torus":
        model = model or _models.TorusModel()
        classes = torus_classes(bound)
        lengths = [model.background_length(c) for c in classes]
        order = sorted(range(len(classes)), key=lambda i: (lengths[i], classes[i].p, classes[i].q))
        return [classes[i] for i in order]
    if model_kind not in ("bolza", "genus2"):
        raise ValueError(f"unknown model kind {model_kind!r}")
    model = model or _models.bolza()
    keys = genus2_class_keys(bound)
    classes = [CyclicWord(code_to_letters(code, n)) for n, code in keys]
    lengths = model.word_lengths([c.letters for c in classes])
    order = sorted(range(len(classes)), key=lambda i: (round(float(lengths[i]), 9), keys[i]))
    return [classes[i] for i in order]
