"""Background geometries: the flat torus and the Bolza genus-2 surface.

The hyperbolic surface is worked in the Poincare disk.  Group elements are
kept as SU(1,1) matrices [[alpha, beta], [conj(beta), conj(alpha)]] acting by
Mobius maps; the real SL(2,R) generators are exposed as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .homotopy import (
    ConjugacyClass,
    CyclicWord,
    TorusClass,
    TrivialClassError,
    canonicalize,
    free_reduce,
    inverse_word,
)

SQRT2 = math.sqrt(2.0)
INRADIUS = math.acosh(1.0 + SQRT2)
CIRCUMRADIUS = math.acosh((1.0 + SQRT2) ** 2)
SYSTOLE = 2.0 * INRADIUS
BOLZA_AREA = 4.0 * math.pi
_KLEIN_SIDE = math.tanh(INRADIUS)
_SIDE_DIRS = np.exp(1j * np.pi * np.arange(8) / 4)

# Cayley map between the upper half-plane and the disk, z = (tau - i)/(tau + i)
_CAYLEY = np.array([[1.0, -1j], [1.0, 1j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


class ModelError(ValueError):
    """Invalid model data or a class that the model cannot handle."""


class EnumerationError(RuntimeError):
    """The two independent class dedupes disagree."""


class ReductionError(RuntimeError):
    """Reduction into the fundamental domain did not terminate."""


# ------------------------------------------------------------------ helpers

def translation(distance: float, angle: float) -> np.ndarray:
    """SU(1,1) translation through the origin along direction ``angle``."""
    ch, sh = math.cosh(distance / 2), math.sinh(distance / 2)
    e = complex(math.cos(angle), math.sin(angle))
    return np.array([[ch, sh * e], [sh * e.conjugate(), ch]], dtype=complex)


def su_inverse(M: np.ndarray) -> np.ndarray:
    a, b = M[..., 0, 0], M[..., 0, 1]
    out = np.empty_like(M)
    out[..., 0, 0] = np.conj(a)
    out[..., 0, 1] = -b
    out[..., 1, 0] = -np.conj(b)
    out[..., 1, 1] = a
    return out


def mobius(M: np.ndarray, z):
    return (M[..., 0, 0] * z + M[..., 0, 1]) / (M[..., 1, 0] * z + M[..., 1, 1])


def mobius_deriv(M: np.ndarray, z):
    return 1.0 / (M[..., 1, 0] * z + M[..., 1, 1]) ** 2


def disk_distance(z, w):
    z = np.asarray(z)
    w = np.asarray(w)
    num = 2.0 * np.abs(z - w) ** 2
    den = (1.0 - np.abs(z) ** 2) * (1.0 - np.abs(w) ** 2)
    return np.arccosh(1.0 + num / den)


def conformal_factor(z):
    """Hyperbolic length of a Euclidean unit vector at z: 2/(1-|z|^2)."""
    return 2.0 / (1.0 - np.abs(z) ** 2)


def to_klein(z):
    return 2.0 * z / (1.0 + np.abs(z) ** 2)


def from_klein(x):
    r2 = np.abs(x) ** 2
    return x / (1.0 + np.sqrt(np.maximum(1.0 - r2, 0.0)))


def su_to_sl(U: np.ndarray) -> np.ndarray:
    M = _CAYLEY_INV @ U @ _CAYLEY
    return M.real


def length_from_trace(tr: float) -> float:
    tr = abs(float(tr))
    if tr <= 2.0:
        raise ModelError(f"|trace| = {tr} <= 2: element is not hyperbolic")
    return 2.0 * math.acosh(tr / 2.0)


# -------------------------------------------------------------------- torus

@dataclass(frozen=True, eq=False)
class TorusModel:
    gram: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        G = np.array(self.gram, dtype=float)
        if G.shape == (3,):
            G = np.array([[G[0], G[1]], [G[1], G[2]]])
        if G.shape != (2, 2) or abs(G[0, 1] - G[1, 0]) > 1e-14:
            raise ModelError("gram must be a symmetric 2x2 matrix")
        if np.linalg.det(G) <= 0 or np.trace(G) <= 0:
            raise ModelError("gram must be positive definite")
        G.setflags(write=False)
        object.__setattr__(self, "gram", G)

    kind = "torus"

    @property
    def gram_inv(self) -> np.ndarray:
        return np.linalg.inv(self.gram)

    @property
    def area(self) -> float:
        return math.sqrt(np.linalg.det(self.gram))

    def orthonormal_frame(self) -> np.ndarray:
        """Columns e1, e2 with e_i^T G e_j = delta_ij."""
        L = np.linalg.cholesky(self.gram)
        return np.linalg.inv(L).T

    def background_length(self, c: ConjugacyClass) -> float:
        if not isinstance(c, TorusClass):
            raise ModelError("torus model needs a TorusClass")
        if c.trivial:
            raise TrivialClassError("(0,0) is the trivial class")
        w = np.array([c.p, c.q], dtype=float)
        return float(math.sqrt(w @ self.gram @ w))

    def reduce(self, x):
        x = np.asarray(x, dtype=float)
        n = np.floor(x)
        return x - n, n.astype(int)

    def config(self) -> dict:
        G = self.gram
        return {"model": "torus", "gram": [float(G[0, 0]), float(G[0, 1]), float(G[1, 1])]}


# ------------------------------------------------------------------- Bolza

# side pairings A_k as words in a..d (letters a=0, A=1, ...)
_SIDE_WORDS = {0: (0,), 3: (2,), 1: (7, 0, 2), 2: (4, 7, 0, 2)}
for _k in range(4):
    _SIDE_WORDS[_k + 4] = inverse_word(_SIDE_WORDS[_k])
del _k


@dataclass(frozen=True, eq=False)
class FuchsianModel:
    """The Bolza surface: regular octagon with angles pi/4, area 4 pi.

    ``side_pairings[k]`` translates by the systole along direction k pi/4
    and maps side k+4 of the octagon onto side k.  The surface-group
    generators are a = A0, b = A3, c = A2 A1^-1, d = A0 A3 A1^-1, for which
    [a,b][c,d] = 1 and each is a systolic translation.
    """

    su_generators: np.ndarray
    side_pairings: np.ndarray
    octagon_vertices: np.ndarray

    kind = "bolza"

    @property
    def generators(self) -> np.ndarray:
        return np.stack([su_to_sl(U) for U in self.su_generators])

    def letter_matrices(self) -> np.ndarray:
        """SU(1,1) matrices for letters 0..7 (a, a^-1, b, b^-1, ...)."""
        out = np.empty((8, 2, 2), dtype=complex)
        out[0::2] = self.su_generators
        out[1::2] = su_inverse(self.su_generators)
        return out

    def relator_residual(self) -> float:
        A, B, C, D = self.generators
        inv = np.linalg.inv
        R = A @ B @ inv(A) @ inv(B) @ C @ D @ inv(C) @ inv(D)
        return float(np.abs(R - np.eye(2)).max())

    def rho(self, word) -> np.ndarray:
        mats = self.letter_matrices()
        M = np.eye(2, dtype=complex)
        for x in word:
            M = M @ mats[x]
        return M

    def trace(self, c) -> float:
        letters = c.letters if isinstance(c, CyclicWord) else tuple(c)
        return float(np.trace(self.rho(letters)).real)

    def background_length(self, c: ConjugacyClass) -> float:
        if not isinstance(c, CyclicWord):
            c = canonicalize(c)
        return length_from_trace(self.trace(c))

    def word_traces(self, words) -> np.ndarray:
        """|trace| for many letter tuples, batched by word length."""
        mats = self.letter_matrices()
        out = np.empty(len(words))
        by_len = {}
        for i, w in enumerate(words):
            by_len.setdefault(len(w), []).append(i)
        for n, idx in by_len.items():
            W = np.array([words[i] for i in idx], dtype=np.int64).reshape(len(idx), n)
            out[idx] = np.abs(product_traces(mats, W))
        return out

    def word_lengths(self, words) -> np.ndarray:
        tr = self.word_traces(words)
        if np.any(tr <= 2.0):
            raise ModelError("a word in the list is not hyperbolic")
        return 2.0 * np.arccosh(tr / 2.0)

    # -------------------------------------------------------- reduction
    def reduce_array(self, z, max_steps: int = 10_000):
        """Vectorized reduction: returns (z_reduced, M) with z_reduced = M z."""
        z = np.array(z, dtype=complex)
        shape = z.shape
        z = z.ravel().copy()
        M = np.zeros((z.size, 2, 2), dtype=complex)
        M[:, 0, 0] = 1.0
        M[:, 1, 1] = 1.0
        inv_pairs = su_inverse(self.side_pairings)
        active = np.arange(z.size)
        for _ in range(max_steps):
            if active.size == 0:
                break
            x = to_klein(z[active])
            s = (x[:, None] * np.conj(_SIDE_DIRS)[None, :]).real - _KLEIN_SIDE
            k = np.argmax(s, axis=1)
            bad = s[np.arange(active.size), k] > 1e-13
            active = active[bad]
            k = k[bad]
            if active.size == 0:
                break
            G = inv_pairs[k]
            z[active] = mobius(G, z[active])
            M[active] = G @ M[active]
        else:
            if active.size:
                raise ReductionError("reduction exceeded the side-pairing step limit")
        return z.reshape(shape), M.reshape(shape + (2, 2))

    def reduce(self, z, max_steps: int = 10_000):
        """Reduce one point; returns (point, word) with point = rho(word) z."""
        z = complex(z)
        if abs(z) >= 1.0:
            raise ModelError("point is not in the open unit disk")
        word = []
        inv_pairs = su_inverse(self.side_pairings)
        for _ in range(max_steps):
            s = (to_klein(z) * np.conj(_SIDE_DIRS)).real - _KLEIN_SIDE
            k = int(np.argmax(s))
            if s[k] <= 1e-13:
                return z, free_reduce(word)
            z = complex(mobius(inv_pairs[k], z))
            word = list(_SIDE_WORDS[(k + 4) % 8]) + word
        raise ReductionError("reduction exceeded the side-pairing step limit")

    def in_domain(self, z, tol: float = 1e-12) -> np.ndarray:
        x = to_klein(np.asarray(z, dtype=complex))
        s = (np.asarray(x)[..., None] * np.conj(_SIDE_DIRS)).real - _KLEIN_SIDE
        return s.max(axis=-1) <= tol

    def config(self) -> dict:
        return {"model": "bolza"}


def product_traces(mats: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Real traces of the products mats[W[i,0]] @ mats[W[i,1]] @ ..."""
    N, n = W.shape
    P = np.broadcast_to(np.eye(2, dtype=complex), (N, 2, 2)).copy()
    for j in range(n):
        P = P @ mats[W[:, j]]
    return (P[:, 0, 0] + P[:, 1, 1]).real


@lru_cache(maxsize=1)
def bolza() -> FuchsianModel:
    pairs = np.stack([translation(SYSTOLE, k * math.pi / 4) for k in range(8)])
    A = pairs
    inv = su_inverse
    gens = np.stack([A[0], A[3], A[2] @ inv(A[1]), A[0] @ A[3] @ inv(A[1])])
    rv = math.tanh(CIRCUMRADIUS / 2)
    verts = rv * np.exp(1j * (np.pi * np.arange(8) / 4 + np.pi / 8))
    model = FuchsianModel(gens, pairs, verts)
    if model.relator_residual() > 1e-9:
        raise ModelError("Bolza generators fail the surface relator")
    for U in model.generators:
        if abs(np.trace(U)) <= 2.0:
            raise ModelError("Bolza generator is not hyperbolic")
    for k, w in _SIDE_WORDS.items():
        if np.abs(model.rho(w) - pairs[k]).max() > 1e-9:
            raise ModelError(f"side pairing {k} does not match its word")
    return model


def ball_elements(model: FuchsianModel, radius: float):
    """All group elements g with d(o, g o) <= radius, o the octagon center.

    Breadth-first over side pairings with a deterministic parent rule: the
    parent of h is h A_k for the side k of the octagon that h^-1 o violates
    most.  That neighbour is strictly closer to o, so the ball is a tree
    under this rule and no deduplication is needed.
    Returns (matrices, parent index, side index) with
    matrices[i] = matrices[parent[i]] @ side_pairings[side[i]].
    """
    A = model.side_pairings
    cosh_r = math.cosh(radius)
    mats = [np.eye(2, dtype=complex)[None]]
    parents = [np.array([-1])]
    sides = [np.array([-1])]
    level = mats[0]
    level_idx = np.array([0])
    offset = 1
    while level.shape[0]:
        kids = (level[:, None] @ A[None]).reshape(-1, 2, 2)
        par = np.repeat(level_idx, 8)
        side = np.tile(np.arange(8), level.shape[0])
        alpha, beta = kids[:, 0, 0], kids[:, 0, 1]
        keep = 2 * np.abs(alpha) ** 2 - 1 <= cosh_r
        x = to_klein(-beta[keep] / alpha[keep])
        s = (x[:, None] * np.conj(_SIDE_DIRS)[None, :]).real
        top = s.max(axis=1, keepdims=True)
        kstar = np.argmax(s >= top - 1e-9, axis=1)
        ok = np.zeros(kids.shape[0], dtype=bool)
        good = (kstar == (side[keep] + 4) % 8) & (top[:, 0] > _KLEIN_SIDE + 1e-12)
        ok[np.nonzero(keep)[0][good]] = True
        level = kids[ok]
        mats.append(level)
        parents.append(par[ok])
        sides.append(side[ok])
        level_idx = offset + np.arange(level.shape[0])
        offset += level.shape[0]
    return np.concatenate(mats), np.concatenate(parents), np.concatenate(sides)


def element_word(parents: np.ndarray, sides: np.ndarray, i: int) -> tuple:
    """Letters a..d of the ball element i (product of side-pairing words)."""
    chain = []
    while parents[i] >= 0:
        chain.append(int(sides[i]))
        i = int(parents[i])
    word = []
    for k in reversed(chain):
        word.extend(_SIDE_WORDS[k])
    return free_reduce(word)


def model_from_config(cfg: dict):
    kind = cfg.get("model", "torus")
    if kind == "torus":
        gram = cfg.get("gram", cfg.get("torus", {}).get("gram", [1.0, 0.0, 1.0]))
        return TorusModel(np.array(gram, dtype=float))
    if kind == "bolza":
        return bolza()
    raise ModelError(f"unknown model {kind!r}")


# ------------------------------------------------------- background geodesics

@dataclass(frozen=True)
class BackgroundGeodesic:
    """Unit-speed closed geodesic of g0 in a class.

    ``lift_at(t)`` gives positions/tangents in the universal cover (lattice
    coordinates or the disk); ``point_at(t)`` reduces them into the
    fundamental domain.  Hyperbolic tangents are complex Euclidean vectors
    of hyperbolic length 1.
    """

    cls: ConjugacyClass
    length: float
    lift_at: Callable
    point_at: Callable
    closing: np.ndarray
    conjugator: np.ndarray = None


def torus_geodesic(model: TorusModel, c: TorusClass, x0=(0.0, 0.0)) -> BackgroundGeodesic:
    L = model.background_length(c)
    w = np.array([c.p, c.q], dtype=float)
    v = w / L
    x0 = np.asarray(x0, dtype=float)

    def lift_at(t):
        t = np.asarray(t, dtype=float)
        pos = x0 + t[..., None] * v
        return pos, np.broadcast_to(v, pos.shape).copy()

    def point_at(t):
        pos, vel = lift_at(t)
        return pos - np.floor(pos), vel

    return BackgroundGeodesic(c, L, lift_at, point_at, w)


def axis_conjugator(U: np.ndarray) -> np.ndarray:
    """SU(1,1) map h sending the axis of U to the real diameter.

    The attracting fixed point goes to +1 and the point of the axis nearest
    the origin goes to 0, so h U h^-1 translates along the real axis.
    """
    a, b = U[0, 0], U[0, 1]
    disc = np.sqrt((np.conj(a) - a) ** 2 + 4 * abs(b) ** 2 + 0j)
    roots = [(a - np.conj(a) + s * disc) / (2 * np.conj(b)) for s in (1, -1)]
    roots = [r / abs(r) for r in roots]
    # attracting point: |derivative| < 1
    derivs = [abs(1.0 / (np.conj(b) * r + np.conj(a)) ** 2) for r in roots]
    zp, zm = (roots[0], roots[1]) if derivs[0] < derivs[1] else (roots[1], roots[0])
    mid = zp + zm
    if abs(mid) < 1e-14:
        p = 0.0
    else:
        cos2psi = float(np.clip((zp * np.conj(zm)).real, -1.0, 1.0))
        psi = 0.5 * math.acos(cos2psi)
        xf = (1.0 - math.sin(psi)) / math.cos(psi)
        p = xf * mid / abs(mid)
    s = 1.0 / math.sqrt(1.0 - abs(p) ** 2)
    H = s * np.array([[1.0, -p], [-np.conj(p), 1.0]], dtype=complex)
    q = mobius(H, zp)
    phi = -np.angle(q)
    Rot = np.array([[np.exp(0.5j * phi), 0], [0, np.exp(-0.5j * phi)]])
    return Rot @ H


def hyperbolic_geodesic(model: FuchsianModel, c) -> BackgroundGeodesic:
    if not isinstance(c, CyclicWord):
        c = canonicalize(c)
    U = model.rho(c.letters)
    L = length_from_trace(np.trace(U).real)
    h = axis_conjugator(U)
    hinv = su_inverse(h)

    def lift_at(t):
        t = np.asarray(t, dtype=float)
        zeta = np.tanh(t / 2)
        z = mobius(hinv, zeta)
        v = mobius_deriv(hinv, zeta) * 0.5 / np.cosh(t / 2) ** 2
        return z, v

    def point_at(t):
        z, v = lift_at(t)
        zr, M = model.reduce_array(z)
        return zr, v * mobius_deriv(M, z)

    return BackgroundGeodesic(c, L, lift_at, point_at, U, h)


def background_length(model, c) -> float:
    return model.background_length(c)


def background_geodesic(model, c, **kw) -> BackgroundGeodesic:
    if isinstance(model, TorusModel):
        return torus_geodesic(model, c, **kw)
    return hyperbolic_geodesic(model, c)


def reduce_to_fundamental_domain(model, point):
    """Return (reduced point, deck word) with reduced = deck(point).

    Torus: the word is the integer shift n and reduced = point - n.
    Bolza: the word is a tuple of letters w and reduced = rho(w) point.
    """
    if isinstance(model, TorusModel):
        x, n = model.reduce(point)
        return x, (int(n[0]), int(n[1]))
    return model.reduce(point)


# --------------------------------------------------------- Liouville measure

def torus_liouville(model: TorusModel, F, n_grid: int = 64, n_fiber: int = 32) -> float:
    """Mass-1 average of F(x, v) over the unit tangent bundle (trapezoid)."""
    s = np.arange(n_grid) / n_grid
    X = np.stack(np.meshgrid(s, s, indexing="ij"), axis=-1).reshape(-1, 2)
    th = 2 * np.pi * np.arange(n_fiber) / n_fiber
    E = model.orthonormal_frame()
    V = (E @ np.stack([np.cos(th), np.sin(th)]))
    total = 0.0
    for j in range(n_fiber):
        vals = F(X, np.broadcast_to(V[:, j], X.shape))
        total += float(np.sum(vals))
    return total / (n_grid * n_grid * n_fiber)


def octagon_polar_nodes(n_theta: int = 24, n_rho: int = 48):
    """Gauss-Legendre nodes over the octagon in geodesic polar coordinates.

    Returns (z, weights) with weights summing to the hyperbolic area.
    """
    gt, wt = np.polynomial.legendre.leggauss(n_theta)
    gr, wr = np.polynomial.legendre.leggauss(n_rho)
    zs, ws = [], []
    half = math.pi / 8
    for k in range(8):
        phi = k * math.pi / 4
        theta = phi + half * gt
        wth = half * wt
        rho_max = np.arctanh(_KLEIN_SIDE / np.cos(theta - phi))
        rho = 0.5 * rho_max[:, None] * (gr[None, :] + 1.0)
        w = wth[:, None] * 0.5 * rho_max[:, None] * wr[None, :] * np.sinh(rho)
        zs.append(np.tanh(rho / 2) * np.exp(1j * theta[:, None]))
        ws.append(w)
    return np.concatenate([z.ravel() for z in zs]), np.concatenate([w.ravel() for w in ws])


def bolza_liouville(F, n_theta: int = 24, n_rho: int = 48, n_fiber: int = 16) -> float:
    z, w = octagon_polar_nodes(n_theta, n_rho)
    th = 2 * np.pi * np.arange(n_fiber) / n_fiber
    total = 0.0
    for t in th:
        v = np.exp(1j * t) / conformal_factor(z)
        total += float(np.sum(w * F(z, v)))
    return total / (np.sum(w) * n_fiber)


def liouville_average(model, F, **kw) -> float:
    """Mass-1 Liouville average of F(points, unit tangents)."""
    if isinstance(model, TorusModel):
        return torus_liouville(model, F, **kw)
    return bolza_liouville(F, **kw)


# ------------------------------------------------ geometric class enumeration

def _klein_vertices() -> np.ndarray:
    return to_klein(bolza().octagon_vertices)


def axis_endpoints(mats: np.ndarray):
    """Repelling and attracting fixed points on the unit circle."""
    a, b = mats[:, 0, 0], mats[:, 0, 1]
    disc = np.sqrt((np.conj(a) - a) ** 2 + 4 * np.abs(b) ** 2 + 0j)
    r1 = (a - np.conj(a) + disc) / (2 * np.conj(b))
    r2 = (a - np.conj(a) - disc) / (2 * np.conj(b))
    d1 = np.abs(np.conj(b) * r1 + np.conj(a))
    attract_first = d1 > np.abs(np.conj(b) * r2 + np.conj(a))
    zp = np.where(attract_first, r1, r2)
    zm = np.where(attract_first, r2, r1)
    return zm / np.abs(zm), zp / np.abs(zp)


def axis_meets_octagon(mats: np.ndarray) -> np.ndarray:
    """Whether the translation axis crosses the closed octagon (Klein chord test)."""
    zm, zp = axis_endpoints(mats)
    verts = _klein_vertices()
    d = zp - zm
    cross = (np.conj(d)[:, None] * (verts[None, :] - zm[:, None])).imag
    return (cross.max(axis=1) >= -1e-12) & (cross.min(axis=1) <= 1e-12)


def touching_elements(model: FuchsianModel) -> np.ndarray:
    """Group elements h != 1 whose translate hF shares a side or vertex with F."""
    mats, _, _ = ball_elements(model, 2 * CIRCUMRADIUS + 1e-6)
    verts = model.octagon_vertices
    out = []
    for M in mats[1:]:
        moved = mobius(M, verts)
        if np.abs(moved[:, None] - verts[None, :]).min() < 1e-9:
            out.append(M)
    return np.stack(out)


class _MatrixIndex:
    """Approximate lookup of SU(1,1) matrices by rounded entries."""

    def __init__(self, mats: np.ndarray, scale: float = 1e6):
        self.scale = scale
        self.tables = []
        for shift in (0.0, 0.5):
            keys = self._keys(mats, shift)
            table = {}
            for i, k in enumerate(map(bytes, keys)):
                table.setdefault(k, i)
            self.tables.append(table)

    def _keys(self, mats, shift):
        v = np.stack([mats[:, 0, 0].real, mats[:, 0, 0].imag, mats[:, 0, 1].real, mats[:, 0, 1].imag], axis=1)
        return np.floor(v * self.scale + shift).astype(np.int64)

    def lookup(self, mats: np.ndarray) -> np.ndarray:
        out = np.full(len(mats), -1)
        for shift, table in zip((0.0, 0.5), self.tables):
            for i, k in enumerate(map(bytes, self._keys(mats, shift))):
                if out[i] < 0:
                    out[i] = table.get(k, -1)
        return out


@dataclass
class GeometricEnumeration:
    T: float
    classes: list
    lengths: np.ndarray
    n_candidates: int
    n_axis_groups: int
    dropped_by_word_cap: int
    max_word_length: int
    meta: dict = field(default_factory=dict)


def geometric_classes(model: FuchsianModel, T: float, max_word_length: int = 12) -> GeometricEnumeration:
    """All genus-2 classes with background length <= T, by geometry.

    Every closed geodesic of length <= T has a lift whose axis crosses the
    octagon; such a lift g satisfies cosh d(o, g o) <= cosh^2 R cosh T - sinh^2 R
    with R the circumradius, so a ball search finds all of them.  The
    candidates are deduplicated twice: by canonical word, and numerically by
    joining lifts whose axes cross neighbouring tiles (axis dedupe).  The
    two counts must agree.
    """
    from .homotopy import canonical_letters

    cosh_d = math.cosh(CIRCUMRADIUS) ** 2 * math.cosh(T) - math.sinh(CIRCUMRADIUS) ** 2
    mats, par, side = ball_elements(model, math.acosh(cosh_d) + 1e-9)
    mats, idx = mats[1:], np.arange(1, len(mats))
    tr = np.abs(2.0 * mats[:, 0, 0].real)
    hyper = tr > 2.0
    ell = np.full(len(mats), np.inf)
    ell[hyper] = 2.0 * np.arccosh(tr[hyper] / 2.0)
    sel = ell <= T + 1e-9
    mats, idx, ell = mats[sel], idx[sel], ell[sel]
    sel = axis_meets_octagon(mats)
    mats, idx, ell = mats[sel], idx[sel], ell[sel]

    # numeric dedupe: union lifts related by conjugation with touching tiles
    n = len(mats)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    index = _MatrixIndex(mats)
    for H in touching_elements(model):
        conj = su_inverse(H)[None] @ mats @ H[None]
        hit = index.lookup(conj)
        for i in np.nonzero(hit >= 0)[0]:
            a, b = find(i), find(int(hit[i]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = np.array([find(i) for i in range(n)])
    n_axis = len(np.unique(roots))

    # word dedupe
    canon = {}
    for r in np.unique(roots):
        members = np.nonzero(roots == r)[0]
        words = set()
        for i in members:
            words.add(canonical_letters(element_word(par, side, int(idx[i]))))
        if len(words) != 1:
            raise EnumerationError("axis dedupe and word dedupe disagree")
        w = words.pop()
        if w in canon:
            raise EnumerationError("two axis groups share a canonical word")
        canon[w] = float(ell[members[0]])
    words = sorted(canon, key=lambda w: (round(canon[w], 9), len(w), w))
    kept = [w for w in words if len(w) <= max_word_length]
    return GeometricEnumeration(
        T=T,
        classes=[CyclicWord(w) for w in kept],
        lengths=np.array([canon[w] for w in kept]),
        n_candidates=n,
        n_axis_groups=n_axis,
        dropped_by_word_cap=len(words) - len(kept),
        max_word_length=max_word_length,
        meta={"longest_word": max((len(w) for w in words), default=0)},
    )
