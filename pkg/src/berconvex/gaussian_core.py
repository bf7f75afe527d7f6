"""Gaussian measure and curvature of polyhedra.

The second derivative of the Gaussian density in the SNR ``gamma`` (or in the
noise power ``P_N = 1/gamma``) factors as ``pdf(x) * poly(|x|^2)``, so one
stream of Gaussian samples estimates a probability and its curvature at the
same time. Regions whose normals form (up to rotation) an orthogonal set are
products of one-dimensional intervals and are evaluated in closed form.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.special import erfc

from .geometry import Polyhedron

VARIABLES = ("snr", "noise")
METHODS = ("auto", "mc", "exact")
CHUNK = 1 << 15
DEFAULT_BUDGET = 1_000_000
FD_STEP = 0.01
TAIL_LIMIT = 64.0
LOW_COUNT = 10
AXIS_TOL = 1e-10


def q_function(t):
    """Gaussian tail probability ``Q(t) = P[N(0,1) > t]``."""
    return 0.5 * erfc(np.asarray(t, dtype=float) / math.sqrt(2.0))


def _phi(t):
    return np.exp(-0.5 * np.asarray(t, dtype=float) ** 2) / math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class NoiseModel:
    """White Gaussian noise of per-dimension variance ``1 / gamma``."""

    n: int
    gamma: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if not self.gamma > 0:
            raise ValueError("SNR must be positive")

    @classmethod
    def from_noise_power(cls, n: int, noise_power: float) -> "NoiseModel":
        if not noise_power > 0:
            raise ValueError("noise power must be positive")
        return cls(n, 1.0 / noise_power)

    @property
    def noise_power(self) -> float:
        return 1.0 / self.gamma


@dataclass(frozen=True)
class CurvatureKernel:
    """Roots of the quadratics governing the sign of the density curvature.

    In the SNR the curvature is ``pdf * f(t) / 4`` with
    ``f(t) = (t - alpha1/gamma)(t - alpha2/gamma)``; in the noise power it is
    ``pdf * g(t) / (4 P_N^4)`` with ``g(t) = (t - beta1 P_N)(t - beta2 P_N)``,
    where ``t = |x|^2``.
    """

    n: int
    alpha1: float = field(init=False)
    alpha2: float = field(init=False)
    beta1: float = field(init=False)
    beta2: float = field(init=False)

    def __post_init__(self):
        n = self.n
        object.__setattr__(self, "alpha1", n + math.sqrt(2 * n))
        object.__setattr__(self, "alpha2", n - math.sqrt(2 * n))
        object.__setattr__(self, "beta1", n + 2 + math.sqrt(2 * (n + 2)))
        object.__setattr__(self, "beta2", n + 2 - math.sqrt(2 * (n + 2)))

    def f(self, t, gamma):
        return (t - self.alpha1 / gamma) * (t - self.alpha2 / gamma)

    def f_star(self, t, noise_power):
        return (t - self.beta1 * noise_power) * (t - self.beta2 * noise_power)

    def to_dict(self) -> dict[str, float]:
        return {"n": self.n, "alpha1": self.alpha1, "alpha2": self.alpha2,
                "beta1": self.beta1, "beta2": self.beta2}


@dataclass(frozen=True)
class Estimate:
    """A numerical value with its Monte Carlo standard error (zero if exact)."""

    value: float
    std_error: float = 0.0
    samples: int = 0
    method: str = "closed_form"
    flags: tuple[str, ...] = ()

    def significant(self, k: float = 3.0) -> bool:
        return abs(self.value) > k * self.std_error

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "std_error": self.std_error, "samples": self.samples,
                "method": self.method, "flags": list(self.flags)}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Estimate":
        return cls(float(doc["value"]), float(doc["std_error"]), int(doc["samples"]),
                   doc["method"], tuple(doc.get("flags", ())))


def _sqnorm(x, n: int | None) -> tuple[np.ndarray, int]:
    """Squared norm over the last axis; a scalar is a point in one dimension."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x * x, 1 if n is None else n
    return np.sum(x * x, axis=-1), x.shape[-1] if n is None else n


def gaussian_pdf(x, noise_power: float, n: int | None = None):
    """Density of ``N(0, noise_power * I_n)`` at ``x`` (shape ``(..., n)``)."""
    t, n = _sqnorm(x, n)
    return (2 * math.pi * noise_power) ** (-n / 2) * np.exp(-t / (2 * noise_power))


def snr_curvature_integrand(x, gamma: float, n: int | None = None):
    """Second derivative of the noise density with respect to the SNR."""
    t, n = _sqnorm(x, n)
    return gaussian_pdf(x, 1.0 / gamma, n) * CurvatureKernel(n).f(t, gamma) / 4


def noise_curvature_integrand(x, noise_power: float, n: int | None = None):
    """Second derivative of the noise density with respect to the noise power."""
    t, n = _sqnorm(x, n)
    pdf = gaussian_pdf(x, noise_power, n)
    return pdf * CurvatureKernel(n).f_star(t, noise_power) / (4 * noise_power**4)


# --- exact path for products of intervals -----------------------------------

def box_intervals(p: Polyhedron) -> list[tuple[np.ndarray, float, float]] | None:
    """Decompose ``p`` into intervals along mutually orthogonal directions.

    Returns ``[(u, lo, hi), ...]`` meaning ``lo <= u.x <= hi`` for each unit
    direction ``u``, or ``None`` when the normals are not pairwise parallel or
    orthogonal.
    """
    dirs: list[np.ndarray] = []
    bounds: list[list[float]] = []
    for a, b in zip(p.normals, p.offsets):
        for k, u in enumerate(dirs):
            dot = float(a @ u)
            if abs(abs(dot) - 1) <= AXIS_TOL:
                if dot > 0:
                    bounds[k][1] = min(bounds[k][1], b)
                else:
                    bounds[k][0] = max(bounds[k][0], -b)
                break
            if abs(dot) > AXIS_TOL:
                return None
        else:
            dirs.append(np.asarray(a, dtype=float))
            bounds.append([-math.inf, float(b)])
    return [(u, lo, hi) for u, (lo, hi) in zip(dirs, bounds)]


def _interval_mass(lo: float, hi: float, sigma: float) -> float:
    if lo >= hi:
        return 0.0
    a, b = lo / sigma, hi / sigma
    if a >= 0:
        return float(q_function(a) - q_function(b))
    if b <= 0:
        return float(q_function(-b) - q_function(-a))
    return float(1.0 - q_function(-a) - q_function(b))


def _endpoint_derivs(c: float, gamma: float) -> tuple[float, float]:
    """First and second SNR derivatives of ``Phi(c sqrt(gamma))``."""
    if not math.isfinite(c):
        return 0.0, 0.0
    r = math.sqrt(gamma)
    ph = float(_phi(c * r))
    d1 = c * ph / (2 * r)
    d2 = -c * ph * (c * c * gamma + 1) / (4 * gamma * r)
    return d1, d2


def _interval_terms(lo: float, hi: float, gamma: float) -> tuple[float, float, float]:
    if lo >= hi:
        return 0.0, 0.0, 0.0
    F = _interval_mass(lo, hi, 1.0 / math.sqrt(gamma))
    h1, h2 = _endpoint_derivs(hi, gamma)
    l1, l2 = _endpoint_derivs(lo, gamma)
    return F, h1 - l1, h2 - l2


def box_terms(intervals, gamma: float) -> tuple[float, float, float]:
    """Gaussian mass of a box and its first two SNR derivatives."""
    P, P1, P2 = 1.0, 0.0, 0.0
    for _, lo, hi in intervals:
        F, F1, F2 = _interval_terms(lo, hi, gamma)
        P, P1, P2 = P * F, P1 * F + P * F1, P2 * F + 2 * P1 * F1 + P * F2
    return P, P1, P2


def box_complement(intervals, gamma: float) -> float:
    """``1 - mass`` of a box without cancellation when the mass is close to one."""
    sigma = 1.0 / math.sqrt(gamma)
    log_inside = 0.0
    for _, lo, hi in intervals:
        if lo >= hi:
            return 1.0
        inside = _interval_mass(lo, hi, sigma)
        if inside < 0.5:
            log_inside += math.log(inside) if inside > 0 else -math.inf
        else:
            out = (float(q_function(-lo / sigma)) if math.isfinite(lo) else 0.0) + \
                  (float(q_function(hi / sigma)) if math.isfinite(hi) else 0.0)
            log_inside += math.log1p(-out)
    return float(-math.expm1(log_inside))


def _to_variable(F: float, F1g: float, F2g: float, gamma: float, variable: str) -> tuple[float, float]:
    # chain rule for P_N = 1/gamma
    if variable == "snr":
        return F, F2g
    return F, gamma**4 * F2g + 2 * gamma**3 * F1g


def _stencil(variable: str, value: float, step: float) -> np.ndarray:
    """Noise powers at (value - h, value, value + h) of the chosen variable."""
    vals = value * np.array([1 - step, 1.0, 1 + step])
    return 1.0 / vals if variable == "snr" else vals


# --- stream engine ------------------------------------------------------------

@dataclass
class _Moments:
    count: int
    mean: np.ndarray
    m2: np.ndarray
    events: np.ndarray

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / n)
        return _Moments(n, mean, m2, self.events + other.events)

    @property
    def std_error(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def stream_plan(budget: int, chunk: int = CHUNK) -> list[int]:
    """Sizes of the independent sample streams a budget is split into."""
    full, rest = divmod(int(budget), chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_streams(kernel, n: int, budget: int, seed, chunk: int, workers: int) -> _Moments:
    sizes = stream_plan(budget, chunk)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def one(k: int) -> _Moments:
        rng = np.random.default_rng(children[k])
        Z = rng.standard_normal((sizes[k], n))
        out, events = kernel(Z)
        mean = out.mean(axis=0)
        m2 = ((out - mean) ** 2).sum(axis=0)
        return _Moments(sizes[k], mean, m2, events)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(k) for k in range(len(sizes))]
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


@dataclass(frozen=True)
class CombinedEstimate:
    """Value, analytic curvature and finite-difference curvature of one quantity."""

    value: Estimate
    curvature: Estimate
    fd_curvature: Estimate | None


def _region_mode(p: Polyhedron, method: str):
    if p.n_constraints == 0:
        return "whole", None
    box = box_intervals(p)
    if box is not None:
        if any(lo >= hi for _, lo, hi in box):
            return "empty", None
        if method != "mc":
            return "box", box
    elif method == "exact":
        raise ValueError("no exact path for a region whose normals are not orthogonal")
    if p.empty:
        return "empty", None
    return "mc", None


def measure_combinations(
    regions: Sequence[Polyhedron],
    weights,
    consts=None,
    *,
    variable: str = "snr",
    value: float,
    budget: int = DEFAULT_BUDGET,
    seed=0,
    method: str = "auto",
    fd: bool = True,
    fd_step: float = FD_STEP,
    tail_distance: float | None = None,
    workers: int = 1,
    chunk: int = CHUNK,
) -> list[CombinedEstimate]:
    """Estimate ``const_q + sum_r W[q, r] * mu(R_r)`` and its curvature.

    ``mu`` is the Gaussian measure with per-dimension variance ``P_N``
    (``1/value`` for ``variable="snr"``, ``value`` for ``"noise"``). All
    regions share one sample stream, and the three finite-difference stencil
    points reuse the same standard normal draws (common random numbers), so
    covariances between regions and between stencil points are carried into
    the reported standard errors. With ``fd=False`` the stencil is skipped
    and ``fd_curvature`` is ``None``.
    """
    if variable not in VARIABLES:
        raise ValueError(f"variable must be one of {VARIABLES}")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if not value > 0:
        raise ValueError("evaluation point must be positive")
    if budget < 1:
        raise ValueError("sample budget must be >= 1")
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    Q, R = W.shape
    if R != len(regions):
        raise ValueError("weights need one column per region")
    const = np.zeros(Q) if consts is None else np.asarray(consts, dtype=float)
    n = regions[0].dim if regions else 1
    gamma = value if variable == "snr" else 1.0 / value
    pn = 1.0 / gamma
    sten = _stencil(variable, value, fd_step) if fd else np.array([pn])
    center = 1 if fd else 0
    habs = fd_step * value

    ex = np.zeros((Q, 3))
    ex[:, 0] = const
    var0 = np.zeros(Q)
    mc_cols: list[int] = []
    kinds: list[str] = []
    for r, reg in enumerate(regions):
        used = np.any(W[:, r] != 0)
        mode, box = _region_mode(reg, method) if used else ("unused", None)
        kinds.append(mode)
        if mode == "whole":
            ex[:, 0] += W[:, r]
        elif mode == "box":
            F, d2 = _to_variable(*box_terms(box, gamma), gamma, variable)
            ex[:, 1] += W[:, r] * d2
            # near-unit mass: carry W - W * (1 - F) so constant offsets cancel exactly
            comp = F > 0.5
            mass = box_complement if comp else (lambda bx, g: box_terms(bx, g)[0])
            sign = -1.0 if comp else 1.0
            if comp:
                ex[:, 0] += W[:, r]
            var0 += sign * W[:, r] * mass(box, gamma)
            if fd:
                Fs = [mass(box, 1.0 / p) for p in sten]
                ex[:, 2] += sign * W[:, r] * (Fs[2] - 2 * Fs[1] + Fs[0]) / habs**2
        elif mode == "mc":
            mc_cols.append(r)

    involved_mc = np.any(W[:, mc_cols] != 0, axis=1) if mc_cols else np.zeros(Q, bool)
    involved_box = [any(W[q, r] != 0 and kinds[r] == "box" for r in range(R)) for q in range(Q)]

    mean = np.zeros((Q, 3))
    se = np.zeros((Q, 3))
    count = 0
    flags_tail: tuple[str, ...] = ()
    if mc_cols:
        if tail_distance is not None and gamma * tail_distance**2 > TAIL_LIMIT:
            flags_tail = ("tail_unreliable",)
        kern = CurvatureKernel(n)
        Wmc = W[:, mc_cols].T.copy()
        mats = [(regions[r].normals, regions[r].offsets) for r in mc_cols]
        sig = np.sqrt(sten)
        S = len(sig)

        def kernel(Z):
            N = Z.shape[0]
            r2 = np.sum(Z * Z, axis=1)
            ind = np.empty((S, N, len(mats)))
            for k, (A, b) in enumerate(mats):
                AZ = Z @ A.T
                inside = np.ones((N, S), dtype=bool)
                for m in range(A.shape[0]):
                    inside &= np.multiply.outer(AZ[:, m], sig) <= b[m]
                ind[:, :, k] = inside.T
            Y = ind @ Wmc
            y0 = Y[center]
            if variable == "snr":
                kv = pn**2 * (r2 - kern.alpha1) * (r2 - kern.alpha2) / 4
            else:
                kv = (r2 - kern.beta1) * (r2 - kern.beta2) / (4 * pn**2)
            cols = np.zeros((N, Q, 3))
            cols[:, :, 0] = y0
            cols[:, :, 1] = y0 * kv[:, None]
            if fd:
                cols[:, :, 2] = (Y[2] - 2 * y0 + Y[0]) / habs**2
            events = np.count_nonzero(y0 + const, axis=0)
            return cols.reshape(N, Q * 3), events

        mom = _run_streams(kernel, n, budget, seed, chunk, workers)
        mean = mom.mean.reshape(Q, 3)
        se = mom.std_error.reshape(Q, 3)
        count = mom.count

    out = []
    for q in range(Q):
        if involved_mc[q]:
            method_q = "monte_carlo"
            flags = flags_tail + (("low_count",) if mom.events[q] < LOW_COUNT else ())
            samples = count
        else:
            method_q = "quadrature" if involved_box[q] else "closed_form"
            flags, samples = (), 0
        est = [
            Estimate(float(ex[q, c] + var0[q] * (c == 0) + mean[q, c]),
                     float(se[q, c]) if involved_mc[q] else 0.0,
                     samples, method_q, flags)
            for c in range(3)
        ]
        out.append(CombinedEstimate(est[0], est[1], est[2] if fd else None))
    return out


def _default_tail(p: Polyhedron) -> float | None:
    return float(np.min(np.abs(p.offsets))) if p.n_constraints else None


def polytope_estimates(p: Polyhedron, variable: str, value: float, budget: int = DEFAULT_BUDGET,
                       seed=0, method: str = "auto", **kw) -> CombinedEstimate:
    """Probability and curvatures of a single polyhedron from one sample stream."""
    kw.setdefault("tail_distance", _default_tail(p))
    return measure_combinations([p], [[1.0]], variable=variable, value=value, budget=budget,
                                seed=seed, method=method, **kw)[0]


def polytope_probability(p: Polyhedron, noise_power: float, budget: int = DEFAULT_BUDGET,
                         seed=0, method: str = "auto", **kw) -> Estimate:
    """Gaussian measure of ``p`` under ``N(0, noise_power * I)``.

    Exact for unconstrained, empty and box-shaped regions (every region in one
    dimension is an interval); plain Monte Carlo otherwise.
    """
    return polytope_estimates(p, "noise", noise_power, budget, seed, method, **kw).value


def polytope_curvature(p: Polyhedron, variable: str, value: float, budget: int = DEFAULT_BUDGET,
                       seed=0, method: str = "auto", **kw) -> Estimate:
    """Second derivative of the Gaussian measure of ``p`` in SNR or noise power."""
    return polytope_estimates(p, variable, value, budget, seed, method, **kw).curvature
