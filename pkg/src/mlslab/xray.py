"""X-ray transforms of symmetric tensors along background closed geodesics.

I_m f(c) is the average of f(gamma', ..., gamma') over one period of the
unit-speed closed geodesic of g0 in the class c.

On the torus the line integral of a Fourier mode over a closed line is
exact: it is the mode itself when k.(p,q) = 0 and zero otherwise.  The
closed geodesics of a class form a one-parameter family of parallel lines
x0 = s*u, s in [0,1); along that family the transform is a trigonometric
polynomial in s, which is what :func:`torus_family` returns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .homotopy import ConjugacyClass, CyclicWord, TorusClass, canonicalize
from .models import FuchsianModel, TorusModel, hyperbolic_geodesic
from .tensors import HyperbolicField, TorusField, velocity_powers


class QuadratureError(RuntimeError):
    pass


@dataclass
class XrayRecord:
    cls: ConjugacyClass
    value: float
    quad_error_estimate: float
    L_g0: float
    error: str = ""

    @property
    def class_id(self) -> str:
        return self.cls.class_id


# ----------------------------------------------------------------- torus

def transverse_vector(c: TorusClass) -> np.ndarray:
    """Integer u with det(w/g, u) = 1, so x0 = s u sweeps the family once."""
    g = math.gcd(c.p, c.q)
    p, q = c.p // g, c.q // g
    # extended Euclid for p*uy - q*ux = 1
    old_r, r = p, -q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    uy, ux = old_s, old_t
    if old_r < 0:
        uy, ux = -uy, -ux
    u = np.array([ux, uy])
    assert p * u[1] - q * u[0] == 1
    return u


@dataclass
class TorusFamily:
    """I_m f(c; s u) = sum_j amps[j] exp(2 pi i js[j] s)."""

    js: np.ndarray
    amps: np.ndarray
    u: np.ndarray

    def value(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return np.real(np.exp(2j * np.pi * np.multiply.outer(s, self.js)) @ self.amps)

    def extremes(self):
        """(min, argmin, max, argmax) over s in [0, 1)."""
        if len(self.js) <= 1 or np.all(np.abs(self.amps[self.js != 0]) == 0):
            v = float(self.value(0.0))
            return v, 0.0, v, 0.0
        J = int(np.abs(self.js).max())
        grid = np.arange(64 * (J + 1)) / (64 * (J + 1))
        vals = self.value(grid)
        out = []
        for sign in (1.0, -1.0):
            i = int(np.argmin(sign * vals))
            h = 1.0 / len(grid)
            res = minimize_scalar(lambda s: sign * float(self.value(s)), bounds=(grid[i] - h, grid[i] + h),
                                  method="bounded", options={"xatol": 1e-13})
            s = float(res.x) % 1.0 if res.fun <= sign * vals[i] else float(grid[i])
            out.append((float(self.value(s)), s))
        (vmin, smin), (vmax, smax) = out
        return vmin, smin, vmax, smax


def torus_family(model: TorusModel, f: TorusField, c: TorusClass) -> TorusFamily:
    L = model.background_length(c)
    v = np.array([c.p, c.q], dtype=float) / L
    g = math.gcd(c.p, c.q)
    n = np.array([-c.q // g, c.p // g])
    K = f.K
    jmax = K // max(abs(n[0]), abs(n[1]))
    js = np.arange(-jmax, jmax + 1)
    kk = js[:, None] * n[None, :]
    coeff = f.coeffs[:, kk[:, 0] + K, kk[:, 1] + K]
    weights = velocity_powers(v, f.degree)[:, 0]
    amps = weights @ coeff
    return TorusFamily(js, amps, transverse_vector(c))


def torus_xray(model: TorusModel, f: TorusField, c: TorusClass, x0=(0.0, 0.0)) -> float:
    L = model.background_length(c)
    v = np.array([c.p, c.q], dtype=float) / L
    K = f.K
    k = np.arange(-K, K + 1)
    KX, KY = np.meshgrid(k, k, indexing="ij")
    resonant = (KX * c.p + KY * c.q) == 0
    phase = np.exp(2j * np.pi * (KX * x0[0] + KY * x0[1]))
    modes = np.einsum("j,jab->ab", velocity_powers(v, f.degree)[:, 0], f.coeffs)
    return float(np.real(np.sum(modes[resonant] * phase[resonant])))


def segment_mode_integral(kv: np.ndarray, L: float) -> np.ndarray:
    """(1/L) int_0^L exp(2 pi i t kv) dt with a series fallback near kv = 0."""
    kv = np.asarray(kv, dtype=float)
    x = 2j * np.pi * kv * L
    small = np.abs(kv) < 1e-8
    out = np.empty(kv.shape, dtype=complex)
    xs = x[~small]
    out[~small] = (np.exp(xs) - 1.0) / xs
    xm = x[small]
    out[small] = 1.0 + xm / 2 + xm ** 2 / 6
    return out


# ------------------------------------------------------------- hyperbolic

def _simpson(vals: np.ndarray, h: np.ndarray) -> np.ndarray:
    w = np.ones(vals.shape[-1])
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (vals @ w) * h / 3.0


def hyperbolic_xray_many(model: FuchsianModel, f: HyperbolicField, classes, tol: float = 1e-10,
                         h0: float = 0.05, max_points: int = 1 << 16):
    """Composite Simpson along each axis, doubling points until the estimate
    from the half-resolution rule is below ``tol``.  Returns (values, errors)."""
    geos = [hyperbolic_geodesic(model, c) for c in classes]
    values = np.zeros(len(geos))
    errors = np.zeros(len(geos))
    todo = {}
    for i, g in enumerate(geos):
        n = max(16, 2 * int(math.ceil(g.length / h0 / 2)))
        n = 1 << int(math.ceil(math.log2(n)))
        todo.setdefault(n, []).append(i)
    while todo:
        n, idx = min(todo.items())
        del todo[n]
        for chunk in range(0, len(idx), max(1, 200_000 // (n + 1))):
            sub = idx[chunk:chunk + max(1, 200_000 // (n + 1))]
            Ls = np.array([geos[i].length for i in sub])
            t = np.linspace(0.0, 1.0, n + 1)[None, :] * Ls[:, None]
            z = np.empty(t.shape, dtype=complex)
            v = np.empty(t.shape, dtype=complex)
            for r, i in enumerate(sub):
                z[r], v[r] = geos[i].lift_at(t[r])
            F = f.pullback(z.ravel(), v.ravel(), model).reshape(t.shape)
            fine = _simpson(F, Ls / n)
            coarse = _simpson(F[:, ::2], 2 * Ls / n)
            err = np.abs(fine - coarse) / 15.0
            # divide by the same rule applied to 1 so constants average exactly
            w = _simpson_weights(n)
            vals = np.array([np.sum(row * w) for row in F]) / np.sum(w)
            for r, i in enumerate(sub):
                if err[r] <= tol * max(1.0, Ls[r]) or n >= max_points:
                    if err[r] > tol * max(1.0, Ls[r]):
                        raise QuadratureError(f"Simpson rule did not converge for class {classes[i]}")
                    values[i] = vals[r]
                    errors[i] = err[r] / Ls[r]
                else:
                    todo.setdefault(2 * n, []).append(i)
    return values, errors


def _simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


# ------------------------------------------------------------------- API

def xray_tensor(model, f, c: ConjugacyClass, x0=(0.0, 0.0), **kw) -> XrayRecord:
    if isinstance(model, TorusModel):
        if not isinstance(f, TorusField):
            raise TypeError("torus model needs a torus field")
        L = model.background_length(c)
        return XrayRecord(c, torus_xray(model, f, c, x0), 0.0, L)
    if not isinstance(c, CyclicWord):
        c = canonicalize(c)
    vals, errs = hyperbolic_xray_many(model, f, [c], **kw)
    return XrayRecord(c, float(vals[0]), float(errs[0]), model.background_length(c))


def xray_batch(model, f, classes, family: str = "base", **kw):
    """Records for every class plus the sup of |value|.

    On the torus ``family`` picks the value reported for each class: "base"
    uses the line through the origin, "sup" the largest |I| over the family
    of parallel closed geodesics, "min" the smallest I over the family.
    """
    records = []
    if isinstance(model, TorusModel):
        for c in classes:
            try:
                L = model.background_length(c)
                if family == "base":
                    val = torus_xray(model, f, c)
                else:
                    lo, _, hi, _ = torus_family(model, f, c).extremes()
                    val = lo if family == "min" else (hi if abs(hi) >= abs(lo) else lo)
                records.append(XrayRecord(c, float(val), 0.0, L))
            except Exception as exc:  # recorded per class, batch continues
                records.append(XrayRecord(c, float("nan"), float("nan"), float("nan"), f"{type(exc).__name__}: {exc}"))
    else:
        classes = list(classes)
        try:
            vals, errs = hyperbolic_xray_many(model, f, classes, **kw)
            for c, v, e in zip(classes, vals, errs):
                records.append(XrayRecord(c, float(v), float(e), model.background_length(c)))
        except QuadratureError:
            for c in classes:
                try:
                    records.append(xray_tensor(model, f, c, **kw))
                except Exception as exc:
                    records.append(XrayRecord(c, float("nan"), float("nan"), float("nan"), f"{type(exc).__name__}: {exc}"))
    good = [abs(r.value) for r in records if not r.error]
    return records, (max(good) if good else float("nan"))
