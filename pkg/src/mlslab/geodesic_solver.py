"""Closed geodesics of g = g0 + f in a free homotopy class.

The loop is a periodic polyline in a chart of the universal cover: the
lattice coordinates of R^2 for the torus, and for the hyperbolic surface the
band chart w = s + iy, z = h^-1(tanh(w/2)), in which the axis of the class
is the line y = 0 and the deck transformation of the class is s -> s + L0.
In both charts closing the loop is a fixed translation W, so node n is
node 0 shifted by W and never stored.

The discrete energy n * sum_i g_mid(D_i, D_i) (D_i = x_{i+1} - x_i, metric
at the segment midpoint) is minimized by preconditioned descent, then the
node count is doubled until the polyline length settles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .homotopy import ConjugacyClass, CyclicWord, TorusClass, TrivialClassError, canonicalize
from .models import (FuchsianModel, TorusModel, hyperbolic_geodesic, mobius, mobius_deriv,
                     su_inverse)
from .tensors import HyperbolicField, TorusField, fourier_phases


class SolverError(RuntimeError):
    pass


class MetricError(SolverError):
    """g0 + f is not positive definite at a quadrature node."""


class IterationCapError(SolverError):
    pass


class LineSearchError(SolverError):
    pass


@dataclass
class SolverOptions:
    grad_tol: float | None = None  # None: 1e-10 on the torus, 1e-8 hyperbolic
    rtol: float = 1e-7
    max_iters: int = 10_000
    init_nodes_per_unit_length: int = 64
    cg: bool = True
    max_levels: int = 7
    init_perturbation: float = 0.0
    seed: int = 0

    @classmethod
    def from_dict(cls, d: dict | None) -> "SolverOptions":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown solver options: {sorted(bad)}")
        return cls(**d)

    def tolerance(self, model) -> float:
        if self.grad_tol is not None:
            return float(self.grad_tol)
        return 1e-10 if isinstance(model, TorusModel) else 1e-8


@dataclass
class DiscreteLoop:
    nodes: np.ndarray  # (n, 2) chart coordinates
    cls: ConjugacyClass
    closure: np.ndarray  # node n = node 0 + closure

    @property
    def n(self) -> int:
        return len(self.nodes)

    def closed_nodes(self) -> np.ndarray:
        return np.vstack([self.nodes, self.nodes[:1] + self.closure])


@dataclass
class SolveReport:
    length: float
    energy: float
    iterations: int
    grad_norm: float
    refinement_levels: int
    n_nodes: int
    converged: bool
    level_lengths: list = field(default_factory=list)
    loop: DiscreteLoop | None = None

    @property
    def length_extrapolated(self) -> float:
        """Richardson value from the last two levels (midpoint error is O(n^-2))."""
        if len(self.level_lengths) < 2:
            return self.length
        a, b = self.level_lengths[-2:]
        return (4.0 * b - a) / 3.0


@dataclass
class SpectrumRecord:
    cls: ConjugacyClass
    L_g0: float
    L_g: float
    ratio: float
    iterations: int = 0
    grad_norm: float = float("nan")
    refinement_levels: int = 0
    converged: bool = False
    L_extrapolated: float = float("nan")
    error: str = ""

    @property
    def class_id(self) -> str:
        return self.cls.class_id


# ------------------------------------------------------------ metrics

class TorusMetric:
    """g0 + f in lattice coordinates, with analytic x-derivatives."""

    def __init__(self, model: TorusModel, f: TorusField | None):
        self.gram = np.asarray(model.gram, dtype=float)
        self.C = None
        if f is not None:
            if not isinstance(f, TorusField) or f.degree != 2:
                raise ValueError("the torus solver needs a degree-2 torus field")
            if np.any(f.coeffs != 0):
                self.C = f.coeffs
                self.K = f.K
                self.k = 2j * np.pi * np.arange(-f.K, f.K + 1)

    def __call__(self, X: np.ndarray, deriv: bool = True):
        P = len(X)
        G = np.broadcast_to(self.gram, (P, 2, 2)).copy()
        dG = np.zeros((P, 2, 2, 2)) if deriv else None
        if self.C is None:
            return G, dG
        Ex = fourier_phases(X[:, 0], self.K)
        Ey = fourier_phases(X[:, 1], self.K)
        A = np.stack([Ex @ c for c in self.C])
        T = np.sum(A * Ey[None], axis=2).real
        G[:, 0, 0] += T[0]
        G[:, 0, 1] += T[1]
        G[:, 1, 0] += T[1]
        G[:, 1, 1] += T[2]
        if deriv:
            Exk = Ex * self.k
            Tx = np.stack([np.sum((Exk @ c) * Ey, axis=1) for c in self.C]).real
            Ty = np.sum(A * (Ey * self.k)[None], axis=2).real
            for l, Tl in enumerate((Tx, Ty)):
                dG[:, 0, 0, l] = Tl[0]
                dG[:, 0, 1, l] = dG[:, 1, 0, l] = Tl[1]
                dG[:, 1, 1, l] = Tl[2]
        return G, dG


class BandMetric:
    """g0 + f in the band chart of one axis.

    g0 is |dw|^2 / cos^2 y.  The f part is pulled back through the conformal
    map w -> z; its derivatives are central differences with step ``h``.
    """

    def __init__(self, model: FuchsianModel, f: HyperbolicField | None, conjugator: np.ndarray,
                 period: float, h: float = 1e-5):
        self.model = model
        self.f = f if (f is not None and (f.bumps or f.constant)) else None
        if self.f is not None and self.f.degree != 2:
            raise ValueError("the hyperbolic solver needs a degree-2 field")
        self.hinv = su_inverse(conjugator)
        self.period = float(period)
        self.h = h

    def _f_part(self, s, y):
        L = self.period
        s = (s + 0.5 * L) % L - 0.5 * L  # periodic in s; keeps points away from the boundary
        w = s + 1j * y
        zeta = np.tanh(0.5 * w)
        z = mobius(self.hinv, zeta)
        mu = mobius_deriv(self.hinv, zeta) * 0.5 / np.cosh(0.5 * w) ** 2
        F = self.f.disk_matrix(z, self.model)
        R = np.empty((len(mu), 2, 2))
        R[:, 0, 0] = R[:, 1, 1] = mu.real
        R[:, 0, 1] = -mu.imag
        R[:, 1, 0] = mu.imag
        return np.einsum("pai,pab,pbj->pij", R, F, R)

    def __call__(self, X: np.ndarray, deriv: bool = True):
        s, y = X[:, 0], X[:, 1]
        P = len(X)
        c2 = 1.0 / np.cos(y) ** 2
        G = np.zeros((P, 2, 2))
        G[:, 0, 0] = G[:, 1, 1] = c2
        dG = None
        if deriv:
            dG = np.zeros((P, 2, 2, 2))
            dG[:, 0, 0, 1] = dG[:, 1, 1, 1] = 2.0 * np.tan(y) * c2
        if self.f is None:
            return G, dG
        if not deriv:
            return G + self._f_part(s, y), None
        h = self.h
        S = np.concatenate([s, s + h, s - h, s, s])
        Y = np.concatenate([y, y, y, y + h, y - h])
        F = self._f_part(S, Y).reshape(5, P, 2, 2)
        G += F[0]
        dG[..., 0] += (F[1] - F[2]) / (2 * h)
        dG[..., 1] += (F[3] - F[4]) / (2 * h)
        return G, dG


# ------------------------------------------------------------ energy

def discrete_energy(X: np.ndarray, W: np.ndarray, metric, grad: bool = True):
    """(E, squared segment lengths, dE/dX or None)."""
    n = len(X)
    Xc = np.vstack([X, X[:1] + W])
    D = np.diff(Xc, axis=0)
    mid = 0.5 * (Xc[1:] + Xc[:-1])
    G, dG = metric(mid, grad)
    if np.any(G[:, 0, 0] <= 0) or np.any(G[:, 0, 0] * G[:, 1, 1] - G[:, 0, 1] * G[:, 1, 0] <= 0):
        i = int(np.argmin(G[:, 0, 0] * G[:, 1, 1] - G[:, 0, 1] ** 2))
        raise MetricError(f"metric not positive definite at node {mid[i].tolist()}")
    GD = np.einsum("pij,pj->pi", G, D)
    q = np.einsum("pi,pi->p", D, GD)
    E = n * float(q.sum())
    if not grad:
        return E, q, None
    gs = 2 * n * GD
    hm = n * np.einsum("pi,pijl,pj->pl", D, dG, D)
    g = np.roll(gs, 1, axis=0) - gs + 0.5 * (np.roll(hm, 1, axis=0) + hm)
    return E, q, g


class _Preconditioner:
    """Inverse of 2n (L_per + sigma) (x) Gbar, applied by FFT along the loop."""

    def __init__(self, n: int, Gbar: np.ndarray):
        lam = 4.0 * np.sin(np.pi * np.arange(n) / n) ** 2
        self.scale = 1.0 / (2.0 * n * (lam + 4.0 * math.sin(math.pi / n) ** 2))
        self.Ginv_T = np.linalg.inv(Gbar).T

    def __call__(self, r: np.ndarray) -> np.ndarray:
        rh = np.fft.fft(r, axis=0) * self.scale[:, None]
        return np.fft.ifft(rh @ self.Ginv_T, axis=0).real


def _line_search(X, W, metric, E0, s0, d, a0):
    """Safeguarded secant on phi'(a) with an Armijo test that tolerates
    rounding in E.  Returns (a, X, E, q, g)."""
    slack = 1e-13 * abs(E0)
    lo, slo = 0.0, s0
    prev = None
    hi, shi = None, None
    best = None
    a = a0
    for _ in range(60):
        Xa = X + a * d
        Ea, qa, ga = discrete_energy(Xa, W, metric)
        sa = float(np.sum(ga * d))
        armijo = Ea <= E0 + 1e-4 * a * s0 + slack
        if armijo and sa <= 0 and abs(sa) <= 0.1 * abs(s0):
            return a, Xa, Ea, qa, ga
        if armijo and sa > 0 and abs(sa) <= 0.1 * abs(s0):
            return a, Xa, Ea, qa, ga
        if armijo and sa < 0:
            prev = (lo, slo)
            lo, slo = a, sa
            best = (a, Xa, Ea, qa, ga)
        else:
            hi, shi = a, sa
        if hi is None:
            p_a, p_s = prev
            if slo > p_s:
                a = lo - slo * (lo - p_a) / (slo - p_s)
                a = min(a, 10.0 * lo)
            else:
                a = 4.0 * lo
        else:
            width = hi - lo
            if shi is not None and shi > 0 and shi > slo:
                a = lo - slo * width / (shi - slo)
                a = min(max(a, lo + 0.05 * width), hi - 0.05 * width)
            else:
                a = lo + 0.5 * width
        if hi is not None and hi - lo <= 1e-14 * max(hi, 1e-300):
            break
    if best is not None:
        return best
    raise LineSearchError("no acceptable step along the descent direction")


def _minimize(X, W, metric, tol, opts: SolverOptions):
    n = len(X)
    E, q, g = discrete_energy(X, W, metric)
    G, _ = metric(0.5 * (X + np.vstack([X[1:], X[:1] + W])), False)
    P = _Preconditioner(n, G.mean(axis=0))
    Pg = P(g)
    gPg = float(np.sum(g * Pg))
    gn = math.sqrt(max(gPg, 0.0) / E)
    d = -Pg
    alpha = 1.0
    it = 0
    while gn > tol:
        if it >= opts.max_iters:
            raise IterationCapError(f"no convergence in {opts.max_iters} iterations (grad {gn:.3e})")
        s0 = float(np.sum(g * d))
        if s0 >= 0:
            d = -Pg
            s0 = -gPg
        alpha, X, E, q, g_new = _line_search(X, W, metric, E, s0, d, alpha)
        Pg_new = P(g_new)
        gPg_new = float(np.sum(g_new * Pg_new))
        if opts.cg:
            beta = max(0.0, float(np.sum(g_new * (Pg_new - Pg))) / gPg) if gPg > 0 else 0.0
            d_new = -Pg_new + beta * d
        else:
            d_new = -Pg_new
        s_new = float(np.sum(g_new * d_new))
        alpha = alpha * s0 / s_new if s_new < 0 else 1.0
        alpha = min(max(alpha, 1e-8), 10.0)
        g, Pg, gPg, d = g_new, Pg_new, gPg_new, d_new
        gn = math.sqrt(max(gPg, 0.0) / E)
        it += 1
    return X, E, q, gn, it


# ------------------------------------------------------------ driver

def _setup(model, f, c):
    if isinstance(model, TorusModel):
        if not isinstance(c, TorusClass):
            raise TypeError("torus model needs a TorusClass")
        if c.trivial:
            raise TrivialClassError("the trivial class has no closed geodesic")
        metric = TorusMetric(model, f)
        L0 = model.background_length(c)
        W = np.array([c.p, c.q], dtype=float)
        x0 = np.zeros(2)
        if metric.C is not None:
            from .xray import torus_family

            fam = torus_family(model, f, c)
            _, smin, _, _ = fam.extremes()
            x0 = smin * fam.u.astype(float)
        return metric, L0, W, x0, c
    if not isinstance(c, CyclicWord):
        c = canonicalize(c)
    if not c.letters:
        raise TrivialClassError("the trivial class has no closed geodesic")
    geo = hyperbolic_geodesic(model, c)
    metric = BandMetric(model, f, geo.conjugator, geo.length)
    return metric, geo.length, np.array([geo.length, 0.0]), np.zeros(2), c


def solve_geodesic(model, f, c: ConjugacyClass, options=None) -> SolveReport:
    """Length of the g0 + f closed geodesic in the class c."""
    opts = options if isinstance(options, SolverOptions) else SolverOptions.from_dict(options)
    tol = opts.tolerance(model)
    metric, L0, W, x0, c = _setup(model, f, c)
    n = max(16, opts.init_nodes_per_unit_length * int(math.ceil(L0)))
    X = x0[None, :] + np.outer(np.arange(n) / n, W)
    if opts.init_perturbation:
        rng = np.random.default_rng(opts.seed)
        X = X + opts.init_perturbation * rng.uniform(-1.0, 1.0, X.shape)
    lengths = []
    iters = 0
    converged = False
    for level in range(opts.max_levels):
        X, E, q, gn, it = _minimize(X, W, metric, tol, opts)
        iters += it
        lengths.append(float(np.sum(np.sqrt(q))))
        if level > 0 and abs(lengths[-1] - lengths[-2]) < opts.rtol * lengths[-1]:
            converged = True
            break
        if level + 1 < opts.max_levels:
            X2 = np.empty((2 * n, 2))
            X2[0::2] = X
            X2[1::2] = 0.5 * (X + np.vstack([X[1:], X[:1] + W]))
            X, n = X2, 2 * n
    return SolveReport(length=lengths[-1], energy=E, iterations=iters, grad_norm=gn,
                       refinement_levels=len(lengths), n_nodes=n, converged=converged,
                       level_lengths=lengths, loop=DiscreteLoop(X, c, W))


def _spectrum_one(args) -> SpectrumRecord:
    model, f, c, options = args
    try:
        L0 = model.background_length(c)
    except Exception as exc:  # noqa: BLE001 - recorded in the row
        return SpectrumRecord(c, float("nan"), float("nan"), float("nan"), error=f"{type(exc).__name__}: {exc}")
    try:
        rep = solve_geodesic(model, f, c, options)
    except Exception as exc:  # noqa: BLE001
        return SpectrumRecord(c, L0, float("nan"), float("nan"), error=f"{type(exc).__name__}: {exc}")
    return SpectrumRecord(c, L0, rep.length, rep.length / L0, rep.iterations, rep.grad_norm,
                          rep.refinement_levels, rep.converged, rep.length_extrapolated)


def spectrum_batch(model, f, classes, options=None, threads: int = 1) -> list:
    """One SpectrumRecord per class, in input order."""
    from .parallel import ordered_map

    classes = list(classes)
    if not classes:
        raise ValueError("classes must be nonempty")
    if not isinstance(options, SolverOptions):
        options = SolverOptions.from_dict(options)
    return ordered_map(_spectrum_one, [(model, f, c, options) for c in classes], threads)
