"""Symmetric tensor fields on the two models.

Torus fields are trigonometric polynomials in lattice coordinates x in
[0,1)^2.  A degree-m field has m+1 components; component j is the entry
T_{1..1 2..2} with j twos, so that

    f(x)(v, ..., v) = sum_j binom(m, j) T_j(x) v1^(m-j) v2^j.

Coefficients are stored as an array c[j, kx+K, ky+K] with
T_j(x) = sum_k c[j,k] exp(2 pi i k.x).

Hyperbolic fields are sums over the group of compactly supported bumps and
only support evaluation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg
from scipy.special import comb

from .models import (
    CIRCUMRADIUS,
    FuchsianModel,
    TorusModel,
    bolza,
    conformal_factor,
    disk_distance,
    mobius,
    mobius_deriv,
)

BASIS = {0: "1", 1: "dx,dy", 2: "dxx,dxy,dyy", 3: "dxxx,dxxy,dxyy,dyyy", 4: "dxxxx,dxxxy,dxxyy,dxyyy,dyyyy"}


class UnsupportedOperation(TypeError):
    pass


def binomials(m: int) -> np.ndarray:
    return comb(m, np.arange(m + 1), exact=False)


@lru_cache(maxsize=64)
def _tensor_weights(m: int, g: tuple) -> np.ndarray:
    """W[j, l] so that <S, S'>_G = sum_jl S_j W[j,l] S'_l for symmetric S, S'."""
    Ginv = np.linalg.inv(np.array(g).reshape(2, 2))
    W = np.zeros((m + 1, m + 1))
    for I in itertools.product((0, 1), repeat=m):
        for J in itertools.product((0, 1), repeat=m):
            W[sum(I), sum(J)] += np.prod([Ginv[i, j] for i, j in zip(I, J)]) if m else 1.0
    return W


def tensor_weights(model: TorusModel, m: int) -> np.ndarray:
    return _tensor_weights(m, tuple(model.gram.ravel()))


def fourier_phases(x, K: int) -> np.ndarray:
    """exp(2 pi i k x) for k = -K..K, shape x.shape + (2K+1,), built by
    repeated multiplication (relative error grows like K * eps)."""
    x = np.asarray(x, dtype=float)
    e1 = np.exp(2j * np.pi * x)
    out = np.empty(x.shape + (2 * K + 1,), dtype=complex)
    out[..., K] = 1.0
    if K:
        out[..., K + 1:] = np.cumprod(np.broadcast_to(e1[..., None], x.shape + (K,)), axis=-1)
        out[..., :K] = np.conj(out[..., :K:-1])
    return out


def frequencies(K: int):
    k = np.arange(-K, K + 1)
    return np.meshgrid(k, k, indexing="ij")


# ----------------------------------------------------------------- torus

@dataclass(frozen=True)
class TorusField:
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[0] != self.degree + 1 or c.shape[1] != c.shape[2] or c.shape[1] % 2 == 0:
            raise ValueError(f"bad coefficient shape {c.shape} for degree {self.degree}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return (self.coeffs.shape[1] - 1) // 2

    @classmethod
    def zeros(cls, degree: int, K: int) -> "TorusField":
        return cls(degree, np.zeros((degree + 1, 2 * K + 1, 2 * K + 1), dtype=complex))

    @classmethod
    def constant(cls, components: Sequence[float], K: int = 0) -> "TorusField":
        comps = np.asarray(components, dtype=float)
        f = np.zeros((comps.size, 2 * K + 1, 2 * K + 1), dtype=complex)
        f[:, K, K] = comps
        return cls(comps.size - 1, f)

    def resized(self, K: int) -> "TorusField":
        out = np.zeros((self.degree + 1, 2 * K + 1, 2 * K + 1), dtype=complex)
        k = min(K, self.K)
        out[:, K - k:K + k + 1, K - k:K + k + 1] = self.coeffs[:, self.K - k:self.K + k + 1, self.K - k:self.K + k + 1]
        return TorusField(self.degree, out)

    def hermitian_error(self) -> float:
        c = self.coeffs
        return float(np.abs(c - np.conj(c[:, ::-1, ::-1])).max(initial=0.0))

    def real_part(self) -> "TorusField":
        c = self.coeffs
        return TorusField(self.degree, 0.5 * (c + np.conj(c[:, ::-1, ::-1])))

    def _binop(self, other, op):
        if not isinstance(other, TorusField) or other.degree != self.degree:
            return NotImplemented
        K = max(self.K, other.K)
        return TorusField(self.degree, op(self.resized(K).coeffs, other.resized(K).coeffs))

    def __add__(self, other):
        return self._binop(other, np.add)

    def __sub__(self, other):
        return self._binop(other, np.subtract)

    def __mul__(self, s):
        return TorusField(self.degree, self.coeffs * s)

    __rmul__ = __mul__

    def __neg__(self):
        return TorusField(self.degree, -self.coeffs)

    # evaluation ---------------------------------------------------------
    def components_at(self, x) -> np.ndarray:
        """Component values, shape (m+1, P), at points x of shape (P, 2)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        Ex = fourier_phases(x[:, 0], self.K)
        Ey = fourier_phases(x[:, 1], self.K)
        return np.stack([np.sum((Ex @ c) * Ey, axis=1) for c in self.coeffs]).real

    def on_grid(self, n: int) -> np.ndarray:
        """Component values on the n x n grid x = (i/n, j/n); shape (m+1, n, n)."""
        K = self.K
        if n < 2 * K + 1:
            raise ValueError("grid too coarse for the band limit")
        full = np.zeros((self.degree + 1, n, n), dtype=complex)
        idx = np.arange(-K, K + 1) % n
        full[:, idx[:, None], idx[None, :]] = self.coeffs
        return (np.fft.ifft2(full, axes=(1, 2)) * n * n).real

    def to_json(self) -> str:
        K = self.K
        rows = []
        for a in range(2 * K + 1):
            for b in range(2 * K + 1):
                c = self.coeffs[:, a, b]
                rows.append([a - K, b - K] + [float(v) for v in c.real] + [float(v) for v in c.imag])
        return json.dumps({"degree": self.degree, "K": K, "basis": BASIS[self.degree], "coeffs": rows})

    @classmethod
    def from_json(cls, text: str) -> "TorusField":
        d = json.loads(text)
        m, K = int(d["degree"]), int(d["K"])
        if d.get("basis", BASIS[m]) != BASIS[m]:
            raise ValueError(f"unsupported basis {d['basis']!r}")
        c = np.zeros((m + 1, 2 * K + 1, 2 * K + 1), dtype=complex)
        for row in d["coeffs"]:
            kx, ky = int(row[0]), int(row[1])
            if max(abs(kx), abs(ky)) > K or len(row) != 2 + 2 * (m + 1):
                raise ValueError("bad coefficient row")
            re = np.array(row[2:3 + m], dtype=float)
            im = np.array(row[3 + m:], dtype=float)
            c[:, kx + K, ky + K] = re + 1j * im
        return cls(m, c)


def velocity_powers(v: np.ndarray, m: int) -> np.ndarray:
    """binom(m,j) v1^(m-j) v2^j, shape (m+1, P)."""
    v = np.atleast_2d(v)
    j = np.arange(m + 1)[:, None]
    return binomials(m)[:, None] * v[None, :, 0] ** (m - j) * v[None, :, 1] ** j


def torus_pullback(f: TorusField, x, v) -> np.ndarray:
    vals = f.components_at(x)
    return np.sum(vals * velocity_powers(np.asarray(v, dtype=float), f.degree), axis=0)


def pullback(f, x, v, model=None, check: bool = True):
    """(pi_m^* f)(x, v) = f(x)(v, ..., v) for unit tangents v."""
    if isinstance(f, TorusField):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if check and model is not None:
            nv = np.einsum("...i,ij,...j->...", v, model.gram, v)
            if np.any(np.abs(nv - 1.0) > 1e-8):
                raise ValueError("tangent vector is not g0-unit")
        out = torus_pullback(f, np.atleast_2d(x), np.atleast_2d(v))
        return float(out[0]) if x.ndim == 1 else out
    if isinstance(f, HyperbolicField):
        z = np.asarray(x, dtype=complex)
        v = np.asarray(v, dtype=complex)
        if check:
            nv = conformal_factor(z) * np.abs(v)
            if np.any(np.abs(nv - 1.0) > 1e-8):
                raise ValueError("tangent vector is not unit for the hyperbolic metric")
        out = f.pullback(np.atleast_1d(z), np.atleast_1d(v), model)
        return float(out[0]) if z.ndim == 0 else out
    raise TypeError("unknown field type")


# ------------------------------------------------------- D, D*, projection

def _sym_derivative_blocks(m: int, K: int) -> np.ndarray:
    """Per-frequency matrices Q[kx, ky] mapping degree m to degree m+1."""
    KX, KY = frequencies(K)
    a1 = 2j * np.pi * KX
    a2 = 2j * np.pi * KY
    Q = np.zeros((2 * K + 1, 2 * K + 1, m + 2, m + 1), dtype=complex)
    for l in range(m + 2):
        if l <= m:
            Q[:, :, l, l] += (m + 1 - l) * a1 / (m + 1)
        if l >= 1:
            Q[:, :, l, l - 1] += l * a2 / (m + 1)
    return Q


def _require_torus(f):
    if not isinstance(f, TorusField):
        raise UnsupportedOperation("tensor calculus is only available on the torus")


def symmetric_derivative(f: TorusField) -> TorusField:
    _require_torus(f)
    Q = _sym_derivative_blocks(f.degree, f.K)
    out = np.einsum("abij,jab->iab", Q, f.coeffs)
    return TorusField(f.degree + 1, out)


def divergence(model: TorusModel, f: TorusField) -> TorusField:
    """Formal L2 adjoint of D for the metric g0."""
    _require_torus(f)
    m = f.degree
    if m < 1:
        raise ValueError("divergence needs degree >= 1")
    Q = _sym_derivative_blocks(m - 1, f.K)
    W0 = tensor_weights(model, m - 1)
    W1 = tensor_weights(model, m)
    A = np.linalg.solve(W0, np.einsum("abji,jk->abik", np.conj(Q), W1))
    out = np.einsum("abij,jab->iab", A, f.coeffs)
    return TorusField(m - 1, out)


def inner(model: TorusModel, f: TorusField, h: TorusField) -> float:
    """L2 pairing with respect to g0 and its volume form."""
    if f.degree != h.degree:
        raise ValueError("degree mismatch")
    K = max(f.K, h.K)
    a, b = f.resized(K).coeffs, h.resized(K).coeffs
    W = tensor_weights(model, f.degree)
    return float(model.area * np.einsum("iab,ij,jab->", a, W, np.conj(b)).real)


def solenoidal_project(model: TorusModel, f: TorusField):
    """Split f = f_s + D p with D* f_s = 0 and zero-mean p (per frequency)."""
    _require_torus(f)
    m = f.degree
    if m < 1:
        raise ValueError("projection needs degree >= 1")
    K = f.K
    Q = _sym_derivative_blocks(m - 1, K)
    W = tensor_weights(model, m)
    QH = np.conj(np.swapaxes(Q, -1, -2))
    N = QH @ W @ Q
    rhs = np.einsum("abij,jk,kab->abi", QH, W, f.coeffs)
    N[K, K] = np.eye(m)
    rhs[K, K] = 0.0
    p = np.linalg.solve(N, rhs[..., None])[..., 0]
    p_field = TorusField(m - 1, np.moveaxis(p, -1, 0))
    fs = f - symmetric_derivative(p_field)
    return fs, p_field


def solenoidal_project_cg(model: TorusModel, f: TorusField, rtol: float = 1e-14):
    """Same split from a global conjugate-gradient solve of D*D p = D*f."""
    _require_torus(f)
    m, K = f.degree, f.K
    Q = _sym_derivative_blocks(m - 1, K)
    W = tensor_weights(model, m)
    QH = np.conj(np.swapaxes(Q, -1, -2))
    shape = (2 * K + 1, 2 * K + 1, m)
    mask = np.ones(shape, dtype=bool)
    mask[K, K] = False

    def apply(x):
        p = np.zeros(shape, dtype=complex)
        p[mask] = x
        y = np.einsum("abij,jk,abkl,abl->abi", QH, W, Q, p)
        return y[mask]

    rhs = np.einsum("abij,jk,kab->abi", QH, W, f.coeffs)[mask]
    n = rhs.size
    op = LinearOperator((n, n), matvec=apply, dtype=complex)
    x, info = cg(op, rhs, rtol=rtol, atol=0.0, maxiter=20 * n)
    if info != 0:
        raise RuntimeError(f"conjugate gradient did not converge (info={info})")
    p = np.zeros(shape, dtype=complex)
    p[mask] = x
    p_field = TorusField(m - 1, np.moveaxis(p, -1, 0))
    return f - symmetric_derivative(p_field), p_field


def trace(model: TorusModel, f: TorusField) -> TorusField:
    """g0-trace of a 2-tensor."""
    if f.degree != 2:
        raise ValueError("trace is implemented for 2-tensors")
    Gi = model.gram_inv
    c = f.coeffs
    return TorusField(0, (Gi[0, 0] * c[0] + 2 * Gi[0, 1] * c[1] + Gi[1, 1] * c[2])[None])


# -------------------------------------------------------------------- norms

@dataclass
class NormReport:
    sobolev: dict
    holder_surrogate: dict
    l2: float
    c3_surrogate: float = float("nan")
    meta: dict = field(default_factory=dict)


def sobolev_norm(model: TorusModel, f: TorusField, s: float) -> float:
    K = f.K
    KX, KY = frequencies(K)
    Gi = model.gram_inv
    q = Gi[0, 0] * KX ** 2 + 2 * Gi[0, 1] * KX * KY + Gi[1, 1] * KY ** 2
    mult = (1.0 + 4 * np.pi ** 2 * q) ** s
    W = tensor_weights(model, f.degree)
    dens = np.einsum("iab,ij,jab->ab", f.coeffs, W, np.conj(f.coeffs)).real
    return float(math.sqrt(max(model.area * np.sum(mult * dens), 0.0)))


def pointwise_norm(model: TorusModel, comps: np.ndarray) -> np.ndarray:
    m = comps.shape[0] - 1
    W = tensor_weights(model, m)
    return np.sqrt(np.maximum(np.einsum("i...,ij,j...->...", comps, W, comps), 0.0))


HOLDER_GRID = 256
HOLDER_LEVELS = range(1, 9)
HOLDER_DIRECTIONS = ((1, 0), (0, 1), (1, 1), (1, -1))


def holder_surrogate(model: TorusModel, f: TorusField, alpha: float, n: int = HOLDER_GRID) -> float:
    """Sampled stand-in for the C^alpha norm: sup norm plus the largest
    difference quotient over dyadic shifts in four lattice directions."""
    vals = f.on_grid(n)
    sup = float(pointwise_norm(model, vals).max())
    quot = 0.0
    for j in HOLDER_LEVELS:
        step = n >> j
        if step < 1:
            continue
        for dx, dy in HOLDER_DIRECTIONS:
            diff = np.roll(vals, (-dx * step, -dy * step), axis=(1, 2)) - vals
            delta = np.array([dx, dy]) * step / n
            dist = math.sqrt(delta @ model.gram @ delta)
            quot = max(quot, float(pointwise_norm(model, diff).max()) / dist ** alpha)
    return sup + quot


def c3_surrogate(model: TorusModel, f: TorusField, n: int = 128) -> float:
    K = f.K
    KX, KY = frequencies(K)
    total = 0.0
    for order in range(4):
        for a in range(order + 1):
            b = order - a
            mult = (2j * np.pi * KX) ** a * (2j * np.pi * KY) ** b
            d = TorusField(f.degree, f.coeffs * mult[None])
            total += float(pointwise_norm(model, d.on_grid(max(n, 2 * K + 1))).max())
    return total


def norms(model: TorusModel, f: TorusField, s_list=(), alpha_list=(), c3: bool = False) -> NormReport:
    _require_torus(f)
    sob = {float(s): sobolev_norm(model, f, s) for s in s_list}
    hol = {float(a): holder_surrogate(model, f, a) for a in alpha_list}
    meta = {"holder": f"sampled surrogate on a {HOLDER_GRID}^2 grid, dyadic shifts 2^-1..2^-8"}
    return NormReport(sob, hol, sobolev_norm(model, f, 0.0), c3_surrogate(model, f) if c3 else float("nan"), meta)


# ----------------------------------------------------------- random fields

def _gaussian_coeffs(rng, degree: int, K: int, decay: float = 3.0) -> np.ndarray:
    KX, KY = frequencies(K)
    scale = np.maximum(np.hypot(KX, KY), 1.0) ** (-decay)
    shape = (degree + 1, 2 * K + 1, 2 * K + 1)
    c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * scale[None]
    c = 0.5 * (c + np.conj(c[:, ::-1, ::-1]))
    return c


def random_field(seed: int, K: int, degree: int = 2, amplitude: float = 1.0, decay: float = 3.0,
                 mean: bool = True) -> TorusField:
    """Generic real field, scaled so the sampled sup of its g0-norm (square torus) is ``amplitude``."""
    rng = np.random.default_rng(seed)
    c = _gaussian_coeffs(rng, degree, K, decay)
    if not mean:
        c[:, K, K] = 0.0
    f = TorusField(degree, c)
    sup = float(pointwise_norm(TorusModel(), f.on_grid(max(64, 4 * K + 4))).max())
    return f * (amplitude / sup)


def random_solenoidal(seed: int, K: int, degree: int = 2, target_alpha_norm: float = 1.0,
                      alpha: float = 0.5, model: TorusModel = None) -> TorusField:
    model = model or TorusModel()
    while True:
        rng = np.random.default_rng(seed)
        f = TorusField(degree, _gaussian_coeffs(rng, degree, K))
        if degree >= 1:
            f, _ = solenoidal_project(model, f)
        h = holder_surrogate(model, f, alpha)
        if h > 0:
            return f * (target_alpha_norm / h)
        seed += 1


def random_potential(seed: int, K: int, degree: int = 2, amplitude: float = 1.0,
                     model: TorusModel = None) -> tuple:
    """(Dp, p) for a random mean-free p of degree-1, scaled by sup norm of Dp."""
    model = model or TorusModel()
    rng = np.random.default_rng(seed)
    c = _gaussian_coeffs(rng, degree - 1, K)
    c[:, K, K] = 0.0
    p = TorusField(degree - 1, c)
    f = symmetric_derivative(p)
    sup = float(pointwise_norm(model, f.on_grid(max(64, 4 * K + 4))).max())
    return f * (amplitude / sup), p * (amplitude / sup)


def conformal(model: TorusModel, u: TorusField) -> TorusField:
    """The 2-tensor 2 u g0."""
    G = model.gram
    c = u.coeffs[0]
    return TorusField(2, 2.0 * np.stack([G[0, 0] * c, G[0, 1] * c, G[1, 1] * c]))


def random_nonnegative(seed: int, K: int, amplitude: float = 1.0) -> TorusField:
    """Random trig polynomial u with min u = 0 and max u = amplitude (sampled)."""
    rng = np.random.default_rng(seed)
    c = _gaussian_coeffs(rng, 0, K)
    c[:, K, K] = 0.0
    u = TorusField(0, c)
    # trig polynomial of degree K: a 16K grid brackets the minimum well;
    # a small safety margin keeps it nonnegative between samples
    vals = u.on_grid(max(64, 16 * K))[0]
    lo, hi = vals.min(), vals.max()
    span = hi - lo
    c = c / span
    c[:, K, K] = -lo / span + 1e-3
    return TorusField(0, c * amplitude / (1 + 1e-3))


# ------------------------------------------------------------- hyperbolic

def bump_profile(rho, radius):
    x = np.asarray(rho, dtype=float) / radius
    out = np.zeros_like(x)
    inside = x < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


@dataclass(frozen=True)
class Bump:
    center: complex
    radius: float
    coeff: tuple  # components in an orthonormal frame, same layout as the torus


@dataclass(frozen=True)
class HyperbolicField:
    """Group-invariant sum of bumps plus a constant multiple of g0^(m/2).

    A bump contributes u(d(z, center)) * T(e, ..., e) where e is the
    Euclidean direction of the tangent, i.e. T is written in an orthonormal
    frame.  Summing over all group translates makes the field descend to
    the surface.
    """

    degree: int
    bumps: tuple = ()
    constant: float = 0.0

    def __post_init__(self):
        for b in self.bumps:
            if len(b.coeff) != self.degree + 1:
                raise ValueError("bump coefficient has the wrong number of components")
            if b.radius <= 0:
                raise ValueError("bump radius must be positive")
        if self.constant and self.degree % 2:
            raise ValueError("a constant term needs even degree")

    def _neighbors(self, model: FuchsianModel):
        return [_bump_neighbors(model, complex(b.center), float(b.radius)) for b in self.bumps]

    def pullback(self, z, v, model: FuchsianModel = None) -> np.ndarray:
        model = model or bolza()
        z = np.asarray(z, dtype=complex).ravel()
        v = np.asarray(v, dtype=complex).ravel()
        zr, M = model.reduce_array(z)
        vr = v * mobius_deriv(M, z)
        m = self.degree
        # constant * g0(v, v)^(m/2), exact also for non-unit v
        out = float(self.constant) * np.abs(conformal_factor(z) * v) ** m
        binom = binomials(m)
        for b, mats in zip(self.bumps, self._neighbors(model)):
            coeff = np.asarray(b.coeff, dtype=float)
            for G in mats:
                w = mobius(G, zr)
                rho = disk_distance(w, b.center)
                u = bump_profile(rho, b.radius)
                hit = u > 0
                if not np.any(hit):
                    continue
                if m == 0:
                    out[hit] += u[hit] * coeff[0]
                    continue
                e = conformal_factor(w[hit]) * mobius_deriv(G, zr[hit]) * vr[hit]
                e1, e2 = e.real, e.imag
                val = sum(binom[j] * coeff[j] * e1 ** (m - j) * e2 ** j for j in range(m + 1))
                out[hit] += u[hit] * val
        return out


    def disk_matrix(self, z, model: FuchsianModel = None) -> np.ndarray:
        """Degree-2 field as (P, 2, 2) matrices F with f(v, v) = v^T F v for
        Euclidean disk tangents v at the points z."""
        if self.degree != 2:
            raise UnsupportedOperation("disk_matrix needs a degree-2 field")
        model = model or bolza()
        z = np.asarray(z, dtype=complex).ravel()
        zr, M = model.reduce_array(z)
        dM = mobius_deriv(M, z)
        out = np.zeros(z.shape + (2, 2))
        lam = conformal_factor(z)
        out[:, 0, 0] = out[:, 1, 1] = self.constant * lam ** 2
        for b, mats in zip(self.bumps, self._neighbors(model)):
            C = np.array([[b.coeff[0], b.coeff[1]], [b.coeff[1], b.coeff[2]]], dtype=float)
            for G in mats:
                w = mobius(G, zr)
                u = bump_profile(disk_distance(w, b.center), b.radius)
                hit = u > 0
                if not np.any(hit):
                    continue
                kap = conformal_factor(w[hit]) * mobius_deriv(G, zr[hit]) * dM[hit]
                R = np.empty((kap.size, 2, 2))
                R[:, 0, 0] = R[:, 1, 1] = kap.real
                R[:, 0, 1] = -kap.imag
                R[:, 1, 0] = kap.imag
                out[hit] += u[hit, None, None] * np.einsum("pai,ab,pbj->pij", R, C, R)
        return out


@lru_cache(maxsize=256)
def _bump_neighbors(model: FuchsianModel, center: complex, radius: float):
    """Group elements whose translate of the octagon can meet the bump."""
    from .models import ball_elements

    d0 = float(disk_distance(0.0, center))
    mats, _, _ = ball_elements(model, d0 + CIRCUMRADIUS + radius)
    orbit = mobius(mats, 0.0)
    keep = disk_distance(orbit, center) < CIRCUMRADIUS + radius
    return mats[keep]


def centered_bump(radius: float = 1.0, degree: int = 0, coeff=None, center: complex = 0j) -> HyperbolicField:
    if coeff is None:
        coeff = (1.0,) if degree == 0 else tuple(1.0 if j in (0, degree) and degree % 2 == 0 else 0.0
                                                  for j in range(degree + 1))
    return HyperbolicField(degree, (Bump(complex(center), float(radius), tuple(float(c) for c in coeff)),))
