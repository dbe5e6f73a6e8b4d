"""Numerical checks of the linearization, kernel, positivity, volume,
equidistribution, gauge and stability statements.

Every check returns a :class:`Report`: named pass/fail assertions plus a
table of rows that the command line writes as CSV.  Reports depend only on
their inputs and seeds.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.integrate import quad
from scipy.stats import spearmanr

from .geodesic_solver import SolverOptions, spectrum_batch
from .homotopy import TorusClass, enumerate_classes
from .models import (FuchsianModel, TorusModel, bolza, bolza_liouville, geometric_classes,
                     torus_liouville)
from .parallel import ordered_map
from .tensors import (HyperbolicField, TorusField, bump_profile, divergence, fourier_phases,
                      holder_surrogate, inner,
                      pointwise_norm, pullback, random_potential, random_solenoidal, sobolev_norm,
                      solenoidal_project, trace)
from .xray import hyperbolic_xray_many, torus_family, xray_tensor


class GaugeError(RuntimeError):
    pass


@dataclass
class Assertion:
    name: str
    passed: bool
    value: float
    tolerance: float


@dataclass
class Report:
    experiment: str
    config: dict
    columns: list
    rows: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, value: float, tolerance: float) -> bool:
        self.assertions.append(Assertion(name, bool(passed), float(value), float(tolerance)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "config": self.config,
                "assertions": [asdict(a) for a in self.assertions], "meta": self.meta}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


@dataclass
class ExperimentConfig:
    s: float = 0.1
    alpha: float = 0.5
    nu: float = 0.5
    T_or_bound: float = 8
    ensemble_size: int = 50
    seed: int = 0
    K: int = 8
    degree: int = 2
    # target C^alpha sizes of the ensemble are log-uniform in this range
    amplitude_range: tuple = (0.1, 1.0)
    t_values: tuple = (1e-2, 5e-3)
    n_isometry: int = 2
    isometry_size: float = 0.02
    isometry_K: int = 2
    gauge_tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.s < self.alpha < 1:
            raise ValueError("need 0 < s < alpha < 1")
        if not 0 < self.nu < 1:
            raise ValueError("need 0 < nu < 1")
        if self.ensemble_size < 0 or self.K < 0:
            raise ValueError("ensemble_size and K must be nonnegative")
        self.amplitude_range = tuple(float(a) for a in self.amplitude_range)
        self.t_values = tuple(float(t) for t in self.t_values)

    @classmethod
    def from_dict(cls, d: dict | None) -> "ExperimentConfig":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def _options(options) -> SolverOptions:
    return options if isinstance(options, SolverOptions) else SolverOptions.from_dict(options)


def xray_values(model, f, classes, family: str = "min") -> np.ndarray:
    """I_m f per class.  On the torus the closed geodesics of a class come in
    a family of parallel lines; ``family`` selects min, max-modulus or the line
    through the origin ("base")."""
    if isinstance(model, TorusModel):
        out = []
        for c in classes:
            fam = torus_family(model, f, c)
            if family == "base":
                out.append(float(fam.value(0.0)))
                continue
            lo, _, hi, _ = fam.extremes()
            out.append(lo if family == "min" else max(abs(lo), abs(hi)))
        return np.array(out)
    vals, _ = hyperbolic_xray_many(model, f, list(classes))
    return np.abs(vals) if family == "sup" else vals


# ------------------------------------------------------------- linearization

def linearization_check(model, f, t_values=(1e-2, 5e-3, 2.5e-3), classes=None, options=None,
                        threads: int = 1, factor: float = 1.3, bound: int = 5) -> Report:
    """R(t) = sup_c |L(g0 + t f)(c) - 1 - (t/2) I2 f(c)| should scale like t^2."""
    t_values = [float(t) for t in t_values]
    if any(t <= 0 for t in t_values) or any(b >= a for a, b in zip(t_values, t_values[1:])):
        raise ValueError("t_values must be positive and decreasing")
    opts = _options(options)
    if classes is None:
        classes = enumerate_classes("torus" if isinstance(model, TorusModel) else "bolza", bound, model)
    I2 = xray_values(model, f, classes, "min")
    rep = Report("linearization", {"t_values": t_values, "n_classes": len(classes), "factor": factor,
                                   "solver": asdict(opts)},
                 ["t", "class_id", "L_g0", "L_g", "ratio", "I2", "remainder"])
    R = []
    for t in t_values:
        recs = spectrum_batch(model, f * t, classes, opts, threads)
        worst = 0.0
        for r, i2 in zip(recs, I2):
            if r.error:
                raise RuntimeError(f"solver failed for class {r.class_id}: {r.error}")
            # the Richardson value removes the O(n^-2) discretization error
            ratio = r.L_extrapolated / r.L_g0
            rem = abs(ratio - 1.0 - 0.5 * t * i2)
            worst = max(worst, rem)
            rep.rows.append((t, r.class_id, r.L_g0, r.L_extrapolated, ratio, i2, rem))
        R.append(worst)
    scaled = [r / t ** 2 for r, t in zip(R, t_values)]
    rep.meta["R"] = R
    rep.meta["R_over_t2"] = scaled
    rep.check("R/t^2 finite", all(math.isfinite(x) for x in scaled), max(scaled), float("inf"))
    if max(R) <= 1e-13:
        rep.check("R/t^2 stable", True, 0.0, factor)
    else:
        spread = max(max(a, b) / min(a, b) if min(a, b) > 0 else float("inf")
                     for a, b in zip(scaled, scaled[1:]))
        rep.check("R/t^2 stable", spread <= factor, spread, factor)
    return rep


# ---------------------------------------------------------------- positivity

def positivity_check(model, f, classes, options=None, tol: float = 1e-6, threads: int = 1) -> Report:
    """Among classes with L_g >= L_g0 (up to rtol), the background integral
    of f must be nonnegative.  Classes failing the hypothesis are skipped."""
    opts = _options(options)
    recs = spectrum_batch(model, f, classes, opts, threads)
    I2 = xray_values(model, f, classes, "min")
    rep = Report("positivity", {"tol": tol, "n_classes": len(classes), "solver": asdict(opts)},
                 ["class_id", "L_g0", "L_g", "ratio", "hypothesis", "integral"])
    violations = 0
    gated = 0
    for r, i2 in zip(recs, I2):
        if r.error:
            raise RuntimeError(f"solver failed for class {r.class_id}: {r.error}")
        hyp = r.ratio >= 1.0 - opts.rtol
        integral = r.L_g0 * i2 if hyp else float("nan")
        if hyp:
            violations += integral < -tol
        else:
            gated += 1
        rep.rows.append((r.class_id, r.L_g0, r.L_g, r.ratio, int(hyp), integral))
    rep.meta["gated"] = gated
    rep.check("violations", violations == 0, violations, 0)
    return rep


# -------------------------------------------------------------------- volume

def volume(model: TorusModel, f: TorusField, t: float, n: int | None = None) -> float:
    n = n or max(64, 8 * f.K + 8)
    F = f.on_grid(n)
    G = model.gram
    det = (G[0, 0] + t * F[0]) * (G[1, 1] + t * F[2]) - (G[0, 1] + t * F[1]) ** 2
    return float(np.mean(np.sqrt(det)))


def volume_identity(model: TorusModel, f: TorusField, t: float = 1e-3, tol: float = 1e-10,
                    rel_tol: float = 1e-4) -> Report:
    """Liouville average of pi_2^* f equals half the mean g0-trace; the first
    variation of the volume is (1/2) int Tr f dvol."""
    if f.degree != 2:
        raise ValueError("volume identity needs a 2-tensor")
    K = f.K
    liou = torus_liouville(model, lambda X, V: pullback(f, X, V, check=False),
                           n_grid=max(64, 2 * K + 2), n_fiber=32)
    tr_mean = float(trace(model, f).coeffs[0, K, K].real)
    half_trace = 0.5 * tr_mean
    exact = half_trace * model.area

    def central(h):
        return (volume(model, f, h) - volume(model, f, -h)) / (2 * h)

    d1, d2 = central(t), central(t / 2)
    rich = (4 * d2 - d1) / 3
    rep = Report("volume", {"t": t, "tol": tol, "rel_tol": rel_tol, "K": K},
                 ["quantity", "lhs", "rhs", "abs_diff"])
    rep.rows.append(("liouville_vs_half_trace", liou, half_trace, abs(liou - half_trace)))
    rep.rows.append(("volume_first_order", rich, exact, abs(rich - exact)))
    rep.check("liouville = half trace", abs(liou - half_trace) <= tol, abs(liou - half_trace), tol)
    err = abs(rich - exact)
    # relative test with a floor for mean-free fields, whose coefficient is 0
    rep.check("volume first order", err <= rel_tol * abs(exact) + 1e-10, err, rel_tol * abs(exact) + 1e-10)
    return rep


# --------------------------------------------------------------------- Parry

def radial_average(F: HyperbolicField, model: FuchsianModel | None = None) -> float:
    """Mass-1 Liouville average of one degree-0 bump centred at the origin,
    by a 1D radial integral (valid while the bump fits inside the domain)."""
    (b,) = F.bumps
    val, _ = quad(lambda r: float(bump_profile(np.array([r]), b.radius)[0]) * math.sinh(r), 0, b.radius,
                  epsabs=1e-14, epsrel=1e-13, limit=200)
    return F.constant + b.coeff[0] * 2 * math.pi * val / (4 * math.pi)


def parry_average(model: FuchsianModel, F: HyperbolicField, T_values=(6.0, 8.0, 10.0, 12.0),
                  max_word_length: int = 12, liouville: float | None = None,
                  n_theta: int = 48, n_rho: int = 96) -> Report:
    """Weighted class averages sum e^{-L} I(c) / sum e^{-L} over L(c) <= T.

    With J^u = -1 the weight e^{int J^u} / L times int_c F equals e^{-L} I(c);
    dividing by the same sum with F = 1 makes constants average exactly.
    """
    model = model or bolza()
    T_values = sorted(float(t) for t in T_values)
    enum = geometric_classes(model, T_values[-1], max_word_length)
    if not enum.classes or enum.lengths.min() > T_values[0]:
        raise ValueError(f"no classes with length <= {T_values[0]}")
    if liouville is None:
        liouville = bolza_liouville(lambda z, v: F.pullback(z, v, model), n_theta=n_theta, n_rho=n_rho)
    vals, errs = hyperbolic_xray_many(model, F, enum.classes)
    L = enum.lengths
    rep = Report("parry", {"T_values": T_values, "max_word_length": max_word_length, "degree": F.degree},
                 ["T", "n_classes", "weighted_average", "plain_average", "liouville", "abs_error"])
    errors = []
    for T in T_values:
        sel = L <= T
        w = np.exp(-L[sel])
        avg = float(np.sum(w * vals[sel]) / np.sum(w))
        plain = float(np.mean(vals[sel]))
        errors.append(abs(avg - liouville))
        rep.rows.append((T, int(sel.sum()), avg, plain, liouville, errors[-1]))
    rep.meta.update({"dropped_by_word_cap": enum.dropped_by_word_cap, "n_axis_groups": enum.n_axis_groups,
                     "max_quad_error": float(errs.max(initial=0.0))})
    rep.check("error decreases", errors[-1] < errors[0], errors[-1], errors[0])
    return rep


# --------------------------------------------------------------------- gauge

def _fourier_eval(coeffs: np.ndarray, X: np.ndarray, grad: bool):
    K = (coeffs.shape[1] - 1) // 2
    k = 2j * np.pi * np.arange(-K, K + 1)
    Ex = fourier_phases(X[:, 0], K)
    Ey = fourier_phases(X[:, 1], K)
    A = np.stack([Ex @ c for c in coeffs])
    val = np.sum(A * Ey[None], axis=2).real
    if not grad:
        return val, None
    Exk = Ex * k
    dx = np.stack([np.sum((Exk @ c) * Ey, axis=1) for c in coeffs]).real
    dy = np.sum(A * (Ey * k)[None], axis=2).real
    return val, np.stack([dx, dy], axis=-1)  # (comp, P, direction)


def grid_points(n: int) -> np.ndarray:
    s = np.arange(n) / n
    return np.stack(np.meshgrid(s, s, indexing="ij"), axis=-1).reshape(-1, 2)


def grid_to_field(vals: np.ndarray, K: int) -> TorusField:
    """Band-K coefficients of samples on the n x n grid (shape (m+1, n, n))."""
    n = vals.shape[-1]
    hat = np.fft.fft2(vals, axes=(1, 2)) / (n * n)
    idx = np.arange(-K, K + 1) % n
    return TorusField(vals.shape[0] - 1, hat[:, idx[:, None], idx[None, :]]).real_part()


@dataclass
class GaugeMap:
    """Time-one flow of the vector field ``generator`` (lattice components)."""

    generator: TorusField
    steps: int = 16

    def flow(self, X: np.ndarray):
        """Images and Jacobians of the points X, by RK4 on the flow and its
        variational equation."""
        C = self.generator.coeffs
        Y = np.array(X, dtype=float)
        J = np.broadcast_to(np.eye(2), (len(Y), 2, 2)).copy()
        if not np.any(C):
            return Y, J
        h = 1.0 / self.steps

        def rhs(Y, J):
            v, dv = _fourier_eval(C, Y, True)
            return v.T, np.einsum("ipl,plj->pij", dv, J)

        for _ in range(self.steps):
            k1y, k1j = rhs(Y, J)
            k2y, k2j = rhs(Y + 0.5 * h * k1y, J + 0.5 * h * k1j)
            k3y, k3j = rhs(Y + 0.5 * h * k2y, J + 0.5 * h * k2j)
            k4y, k4j = rhs(Y + h * k3y, J + h * k3j)
            Y = Y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
            J = J + h / 6 * (k1j + 2 * k2j + 2 * k3j + k4j)
        return Y, J

    def max_gradient(self, n: int = 64) -> float:
        _, dv = _fourier_eval(self.generator.coeffs, grid_points(n), True)
        return float(np.linalg.norm(np.moveaxis(dv, 0, 1), ord=2, axis=(1, 2)).max())

    def pulled_back_difference(self, model: TorusModel, f: TorusField | None, K_out: int) -> TorusField:
        """phi^*(g0 + f) - g0 re-expanded to band K_out."""
        n = 4 * max(K_out, self.generator.K, f.K if f is not None else 0, 2)
        X = grid_points(n)
        Y, J = self.flow(X)
        G = np.broadcast_to(model.gram, (len(X), 2, 2)).copy()
        if f is not None:
            c = f.components_at(Y)
            G[:, 0, 0] += c[0]
            G[:, 0, 1] += c[1]
            G[:, 1, 0] += c[1]
            G[:, 1, 1] += c[2]
        P = np.einsum("pki,pkl,plj->pij", J, G, J) - model.gram
        vals = np.stack([P[:, 0, 0], P[:, 0, 1], P[:, 1, 1]]).reshape(3, n, n)
        return grid_to_field(vals, K_out)


def divergence_norm(model: TorusModel, h: TorusField) -> float:
    d = divergence(model, h)
    return math.sqrt(max(inner(model, d, d), 0.0))


def gauge_normalize(model: TorusModel, f: TorusField, tol: float = 1e-6, K_prime: int | None = None,
                    max_iter: int = 50, max_grad: float = 0.5):
    """Find phi with D*(phi^* g - g0) = 0 for g = g0 + f.

    Returns (GaugeMap, normalized difference, info).  Each step removes the
    potential part of the current difference: if h = h_s + D p then the Lie
    derivative of g0 along V is 2 D V^flat, so V^flat moves by -p/2.
    """
    if f.degree != 2:
        raise ValueError("gauge normalization needs a 2-tensor")
    K_prime = K_prime or max(2 * f.K, 1)
    gauge = GaugeMap(TorusField.zeros(1, K_prime))
    h = f.resized(K_prime)
    r = divergence_norm(model, h)
    history = [r]
    vflat = TorusField.zeros(1, K_prime)
    increases = 0
    it = 0
    Gi = model.gram_inv
    while r > tol:
        if it >= max_iter:
            raise GaugeError(f"no convergence in {max_iter} iterations (residual {r:.3e})")
        _, p = solenoidal_project(model, h)
        vflat = vflat - 0.5 * p.resized(K_prime)
        c = vflat.coeffs
        gen = TorusField(1, np.stack([Gi[0, 0] * c[0] + Gi[0, 1] * c[1], Gi[1, 0] * c[0] + Gi[1, 1] * c[1]]))
        gauge = GaugeMap(gen)
        if gauge.max_gradient() >= max_grad:
            raise GaugeError("generator too large: flow regularity bound violated")
        h = gauge.pulled_back_difference(model, f, K_prime)
        r_new = divergence_norm(model, h)
        increases = increases + 1 if r_new > r else 0
        if increases >= 3:
            raise GaugeError("residual increased three times in a row")
        r = r_new
        history.append(r)
        it += 1
    return gauge, h, {"iterations": it, "residual": r, "history": history, "K_prime": K_prime}


def isometry_difference(model: TorusModel, seed: int, K: int = 2, size: float = 0.02) -> tuple:
    """(phi0^* g0 - g0, sup|grad w|) for phi0(x) = x + w(x), with w a random
    band-K displacement scaled so that sup |grad w| = size.  The difference is
    band-limited (band 2K) and recovered exactly from a grid."""
    rng = np.random.default_rng([seed, 7])
    kk = np.arange(-K, K + 1)
    KX, KY = np.meshgrid(kk, kk, indexing="ij")
    scale = np.maximum(np.hypot(KX, KY), 1.0) ** -3.0
    c = (rng.standard_normal((2, 2 * K + 1, 2 * K + 1)) + 1j * rng.standard_normal((2, 2 * K + 1, 2 * K + 1))) * scale
    c = 0.5 * (c + np.conj(c[:, ::-1, ::-1]))
    c[:, K, K] = 0.0
    n = 8 * K + 8
    X = grid_points(n)
    _, dw = _fourier_eval(c, X, True)
    g = float(np.linalg.norm(np.moveaxis(dw, 0, 1), ord=2, axis=(1, 2)).max())
    c = c * (size / g)
    _, dw = _fourier_eval(c, X, True)
    J = np.eye(2)[None] + np.moveaxis(dw, 0, 1)
    P = np.einsum("pki,kl,plj->pij", J, model.gram, J) - model.gram
    vals = np.stack([P[:, 0, 0], P[:, 0, 1], P[:, 1, 1]]).reshape(3, n, n)
    return grid_to_field(vals, 2 * K), size


def gauge_check(model: TorusModel, fields_, tol: float = 1e-6, max_iter: int = 50,
                isometry_seeds=(0,), isometry_size: float = 0.02) -> Report:
    rep = Report("gauge", {"tol": tol, "max_iter": max_iter, "n_fields": len(fields_),
                           "isometry_seeds": list(isometry_seeds)},
                 ["case", "iterations", "residual", "normalized_l2", "input_sup"])
    worst = 0.0
    for i, f in enumerate(fields_):
        _, h, info = gauge_normalize(model, f, tol, max_iter=max_iter)
        sup = float(pointwise_norm(model, f.on_grid(max(64, 4 * f.K + 4))).max())
        worst = max(worst, info["residual"])
        rep.rows.append((f"field{i}", info["iterations"], info["residual"], math.sqrt(inner(model, h, h)), sup))
    if fields_:
        rep.check("divergence residual", worst <= tol, worst, tol)
    for s in isometry_seeds:
        f, _ = isometry_difference(model, s, size=isometry_size)
        _, h, info = gauge_normalize(model, f, tol, max_iter=max_iter)
        l2 = math.sqrt(inner(model, h, h))
        sup = float(pointwise_norm(model, f.on_grid(64)).max())
        rep.rows.append((f"isometry{s}", info["iterations"], info["residual"], l2, sup))
        rep.check(f"isometry {s} recovered", l2 <= 10 * tol, l2, 10 * tol)
    return rep


# ----------------------------------------------------------------- stability

def torus_sup_xray(model: TorusModel, f: TorusField, classes) -> float:
    """sup over classes and over each parallel family of |I_m f|."""
    return float(max(xray_values(model, f, classes, "sup"), default=0.0))


def _stability_member(args):
    model, f, classes, cfg = args
    lhs = sobolev_norm(model, f, -1.0 - cfg.s)
    linf = torus_sup_xray(model, f, classes)
    hol = holder_surrogate(model, f, cfg.alpha)
    a = linf ** ((1 - cfg.nu) / 2)
    rhs = a * (hol + linf) ** ((1 + cfg.nu) / 2)
    return lhs, linf, hol, a, rhs


def stability_probe(model: TorusModel, config: ExperimentConfig, threads: int = 1) -> Report:
    """||f||_{H^{-1-s}} against ||I f||^{(1-nu)/2} (||f||_{C^alpha} + ||I f||)^{(1+nu)/2}
    over an ensemble of random solenoidal fields."""
    cfg = config
    if cfg.ensemble_size < 10:
        raise ValueError("ensemble_size must be at least 10")
    classes = enumerate_classes("torus", int(cfg.T_or_bound))
    rng = np.random.default_rng([cfg.seed, 1])
    lo, hi = cfg.amplitude_range
    amps = np.exp(rng.uniform(math.log(lo), math.log(hi), cfg.ensemble_size))
    seeds = [cfg.seed * 100_003 + i for i in range(cfg.ensemble_size)]
    members = [random_solenoidal(s, cfg.K, cfg.degree, float(a), cfg.alpha, model) for s, a in zip(seeds, amps)]
    out = ordered_map(_stability_member, [(model, f, classes, cfg) for f in members], threads)
    rep = Report("stability", cfg.to_dict(),
                 ["member", "seed", "amplitude", "lhs", "linf", "holder", "linf_factor", "rhs", "ratio"])
    ratios = []
    for i, ((lhs, linf, hol, a, rhs), s, amp) in enumerate(zip(out, seeds, amps)):
        ratio = lhs / rhs if rhs > 0 else float("inf")
        ratios.append(ratio)
        rep.rows.append((i, s, float(amp), lhs, linf, hol, a, rhs, ratio))
    C_hat = max(ratios)
    rho = float(spearmanr([r[3] for r in rep.rows], [r[6] for r in rep.rows]).statistic)
    rep.meta.update({"C_hat": C_hat, "spearman": rho, "bound": cfg.T_or_bound, "n_classes": len(classes)})
    rep.check("C_hat finite", math.isfinite(C_hat), C_hat, float("inf"))
    rep.check("rank correlation positive", rho > 0, rho, 0.0)
    # homogeneity: every factor is degree one in f
    lam = 3.0
    base = _stability_member((model, members[0], classes, cfg))
    scaled = _stability_member((model, members[0] * lam, classes, cfg))
    hom = max(abs(scaled[0] / (lam * base[0]) - 1), abs(scaled[4] / (lam * base[4]) - 1))
    rep.check("homogeneity", hom <= 1e-9, hom, 1e-9)
    # an injected potential has zero X-ray and zero solenoidal part
    dp, _ = random_potential(cfg.seed, cfg.K, cfg.degree, 1.0, model)
    fs, _ = solenoidal_project(model, dp)
    pot_linf = torus_sup_xray(model, dp, classes)
    pot_lhs = sobolev_norm(model, fs, -1.0 - cfg.s)
    rep.meta.update({"potential_linf": pot_linf, "potential_lhs": pot_lhs})
    rep.check("potential invisible", max(pot_linf, pot_lhs) <= 1e-8, max(pot_linf, pot_lhs), 1e-8)
    return rep


def mls_probe(model: TorusModel, config: ExperimentConfig, options=None, threads: int = 1,
              bound: int | None = None) -> Report:
    """Gauge-normalized size of g - g0 against the length-spectrum deviation."""
    cfg = config
    opts = _options(options)
    classes = enumerate_classes("torus", int(bound if bound is not None else cfg.T_or_bound))
    rep = Report("mls", {**cfg.to_dict(), "solver": asdict(opts), "n_classes": len(classes)},
                 ["member", "kind", "t", "lhs", "spectrum_dev", "c0", "ratio"])

    def deviation(f):
        recs = spectrum_batch(model, f, classes, opts, threads)
        bad = [r for r in recs if r.error]
        if bad:
            raise RuntimeError(f"solver failed for class {bad[0].class_id}: {bad[0].error}")
        return max(abs(r.ratio - 1.0) for r in recs)

    zero = TorusField.zeros(2, 0)
    dev0 = deviation(zero)
    rep.rows.append((0, "zero", 0.0, 0.0, dev0, 0.0, float("nan")))
    rep.check("g0 deviation", dev0 <= opts.rtol, dev0, opts.rtol)
    for j in range(cfg.n_isometry):
        f, _ = isometry_difference(model, cfg.seed + j, cfg.isometry_K, cfg.isometry_size)
        c0 = float(pointwise_norm(model, f.on_grid(64)).max())
        dev = deviation(f)
        rep.rows.append((j, "isometry", 1.0, float("nan"), dev, c0, float("nan")))
        rep.check(f"isometry {j} invariance", dev <= 10 * opts.rtol, dev, 10 * opts.rtol)
        rep.check(f"isometry {j} nontrivial", c0 >= 1e-3, c0, 1e-3)
    for i in range(cfg.ensemble_size):
        f = random_solenoidal(cfg.seed * 100_003 + i, cfg.K, 2, 1.0, cfg.alpha, model)
        ratios = []
        for t in cfg.t_values:
            _, h, _ = gauge_normalize(model, f * t, cfg.gauge_tol)
            lhs = sobolev_norm(model, h, -1.0 - cfg.s)
            dev = deviation(f * t)
            rhs = dev ** ((1 - cfg.nu) / 2) + dev
            ratio = lhs / rhs if rhs > 0 else float("inf")
            ratios.append(ratio)
            c0 = float(pointwise_norm(model, (f * t).on_grid(64)).max())
            rep.rows.append((i, "solenoidal", t, lhs, dev, c0, ratio))
        spread = max(ratios) / min(ratios) if min(ratios) > 0 else float("inf")
        rep.check(f"member {i} ratio stable", spread <= 2.0, spread, 2.0)
    return rep
