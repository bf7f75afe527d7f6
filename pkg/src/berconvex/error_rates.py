"""Pairwise, symbol and bit error rates of minimum-distance detection in AWGN.

For a transmitted point ``s_i`` every quantity is a linear combination of the
Gaussian measures of the decision regions seen from ``s_i``:

* ``pep[i, j]``   = mu(Omega_j shifted to s_i)
* ``ser_point[i]`` = 1 - mu(Omega_i)
* ``ber``          = sum_i prior_i sum_{j != i} h_ij / log2(M) * pep[i, j]

All combinations for one ``i`` are evaluated from one sample stream, so their
standard errors account for the shared samples. Different transmitted points
use independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .constellation import Constellation, ConstellationError, hamming_matrix
from .gaussian_core import (
    DEFAULT_BUDGET, FD_STEP, LOW_COUNT, CombinedEstimate, Estimate, measure_combinations,
)
from .geometry import summarize


def _point_seed(seed, i: int) -> list[int]:
    base = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    return base + [i]


def _check_gamma(gamma: float):
    if not gamma > 0:
        raise ValueError(f"SNR must be positive, got {gamma!r}")


@dataclass(frozen=True)
class PointTerms:
    """Every error quantity conditioned on one transmitted point."""

    index: int
    pep: dict[int, CombinedEstimate]
    ser_point: CombinedEstimate
    pep_sum: CombinedEstimate | None
    ber_part: CombinedEstimate | None


def point_terms(c: Constellation, i: int, *, variable: str = "snr", value: float,
                budget: int = DEFAULT_BUDGET, seed=0, method: str = "auto",
                fd: bool = True, fd_step: float = FD_STEP, workers: int = 1,
                pairs: bool = True) -> PointTerms:
    """Evaluate PEPs, SER and the BER contribution of point ``i`` jointly.

    ``pairs=False`` skips the individual PEPs (and their sum); the SER and
    BER contributions are still computed.
    """
    geo = summarize(c)
    M = c.M
    regions = [geo.region_in_frame(j, i) for j in range(M)]
    others = [j for j in range(M) if j != i] if pairs else []
    rows, consts = [], []
    for j in others:
        w = np.zeros(M)
        w[j] = 1.0
        rows.append(w)
        consts.append(0.0)
    own = np.zeros(M)
    own[i] = -1.0
    rows.append(own)
    consts.append(1.0)
    total = np.ones(M)
    total[i] = 0.0
    if pairs:
        rows.append(total)
        consts.append(0.0)
    if c.has_labels:
        h = hamming_matrix(c)[i] / c.bits_per_symbol
        h = h.astype(float)
        h[i] = 0.0
        rows.append(h)
        consts.append(0.0)
    res = measure_combinations(
        regions, np.array(rows), np.array(consts), variable=variable, value=value,
        budget=budget, seed=_point_seed(seed, i), method=method, fd=fd, fd_step=fd_step,
        tail_distance=geo.d_min, workers=workers,
    )
    m = len(others)
    k = m + 2 if pairs else m + 1
    return PointTerms(
        i, dict(zip(others, res[:m])), res[m], res[m + 1] if pairs else None,
        res[k] if c.has_labels else None,
    )


def _weighted(parts: list[tuple[float, Estimate]]) -> Estimate:
    """Sum of independent estimates with nonnegative weights."""
    value = sum(w * e.value for w, e in parts)
    var = sum((w * e.std_error) ** 2 for w, e in parts)
    methods = {e.method for w, e in parts if w > 0}
    method = ("monte_carlo" if "monte_carlo" in methods
              else "quadrature" if "quadrature" in methods else "closed_form")
    samples = sum(e.samples for w, e in parts if w > 0)
    flags = tuple(sorted({f for w, e in parts if w > 0 for f in e.flags if f != "low_count"}))
    if method == "monte_carlo":
        mc = [e for w, e in parts if w > 0 and e.method == "monte_carlo"]
        if all("low_count" in e.flags for e in mc):
            flags = tuple(sorted(flags + ("low_count",)))
    return Estimate(float(value), float(math.sqrt(var)), samples, method, flags)


def _combine(parts: list[tuple[float, CombinedEstimate]]) -> CombinedEstimate:
    fd = None
    if all(e.fd_curvature is not None for _, e in parts):
        fd = _weighted([(w, e.fd_curvature) for w, e in parts])
    return CombinedEstimate(
        _weighted([(w, e.value) for w, e in parts]),
        _weighted([(w, e.curvature) for w, e in parts]),
        fd,
    )


@dataclass(frozen=True)
class RateTerms:
    """All quantities of a constellation at one value of SNR or noise power."""

    variable: str
    value: float
    points: tuple[PointTerms, ...]
    ser: CombinedEstimate
    ber: CombinedEstimate | None

    def quantity(self, name: str) -> CombinedEstimate:
        """Look up ``ser``, ``ber``, ``ser_point:i`` or ``pep:i,j``."""
        kind, _, arg = name.partition(":")
        if kind == "ser" and not arg:
            return self.ser
        if kind == "ber":
            if self.ber is None:
                raise ConstellationError("BER requires bit labels")
            return self.ber
        if kind == "ser_point":
            return self.points[int(arg)].ser_point
        if kind == "pep_sum":
            return self.points[int(arg)].pep_sum
        if kind == "pep":
            i, j = (int(v) for v in arg.split(","))
            return self.points[i].pep[j]
        raise ValueError(f"unknown quantity {name!r}")


def rate_terms(c: Constellation, *, variable: str = "snr", value: float,
               budget: int = DEFAULT_BUDGET, seed=0, method: str = "auto",
               fd: bool = True, fd_step: float = FD_STEP, workers: int = 1,
               points=None, pairs: bool = True) -> RateTerms:
    """Evaluate every point's terms and the prior-weighted SER and BER.

    ``points`` restricts evaluation to a subset of transmitted points; the
    averaged SER and BER then cover only that subset.
    """
    idx = range(c.M) if points is None else points
    terms = tuple(
        point_terms(c, i, variable=variable, value=value, budget=budget, seed=seed,
                    method=method, fd=fd, fd_step=fd_step, workers=workers, pairs=pairs)
        for i in idx
    )
    pri = c.priors
    ser = _combine([(float(pri[t.index]), t.ser_point) for t in terms])
    ber = None
    if c.has_labels:
        ber = _combine([(float(pri[t.index]), t.ber_part) for t in terms])
    return RateTerms(variable, value, terms, ser, ber)


def pep(c: Constellation, i: int, j: int, gamma: float, budget: int = DEFAULT_BUDGET,
        seed=0, method: str = "auto") -> Estimate:
    """Probability of deciding ``s_j`` when ``s_i`` was sent."""
    if i == j:
        raise ValueError("pairwise error probability needs i != j")
    _check_gamma(gamma)
    geo = summarize(c)
    reg = geo.region_in_frame(j, i)
    return measure_combinations(
        [reg], [[1.0]], variable="snr", value=gamma, budget=budget,
        seed=_point_seed(seed, i), method=method, fd=False, tail_distance=geo.d_min,
    )[0].value


def ser_point(c: Constellation, i: int, gamma: float, budget: int = DEFAULT_BUDGET,
              seed=0, method: str = "auto") -> Estimate:
    """Symbol error probability given ``s_i``: one minus the mass of its own region."""
    _check_gamma(gamma)
    geo = summarize(c)
    return measure_combinations(
        [geo.regions[i]], [[-1.0]], [1.0], variable="snr", value=gamma, budget=budget,
        seed=_point_seed(seed, i), method=method, fd=False, tail_distance=geo.d_min,
    )[0].value


def ser(c: Constellation, gamma: float, budget: int = DEFAULT_BUDGET, seed=0,
        method: str = "auto") -> Estimate:
    """Prior-weighted average symbol error rate."""
    _check_gamma(gamma)
    parts = [(float(p), ser_point(c, i, gamma, budget, seed, method))
             for i, p in enumerate(c.priors) if p > 0]
    return _weighted(parts)


def ber(c: Constellation, gamma: float, budget: int = DEFAULT_BUDGET, seed=0,
        method: str = "auto") -> Estimate:
    """Bit error rate as the Hamming-weighted combination of pairwise error probabilities."""
    if not c.has_labels:
        raise ConstellationError(f"BER needs bit labels; constellation {c.name!r} has none")
    _check_gamma(gamma)
    active = [i for i, p in enumerate(c.priors) if p > 0]
    return rate_terms(c, value=gamma, budget=budget, seed=seed, method=method,
                      points=active, fd=False, pairs=False).ber.value


def ber_gray_approximation(c: Constellation, gamma: float, budget: int = DEFAULT_BUDGET,
                           seed=0, method: str = "auto") -> Estimate:
    """The nearest-neighbour approximation ``SER / log2(M)``; not the BER."""
    s = ser(c, gamma, budget, seed, method)
    k = math.log2(c.M)
    return Estimate(s.value / k, s.std_error / k, s.samples, s.method, s.flags + ("approximation",))


@dataclass(frozen=True)
class RatePoint:
    """Error rates at one SNR, from a single PEP-matrix evaluation."""

    gamma: float
    pep: list[list[Estimate | None]]
    ser_per_point: list[Estimate]
    ser: Estimate
    ber: Estimate | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "gamma": self.gamma,
            "pep": [[None if e is None else e.to_dict() for e in row] for row in self.pep],
            "ser_per_point": [e.to_dict() for e in self.ser_per_point],
            "ser": self.ser.to_dict(),
            "ber": None if self.ber is None else self.ber.to_dict(),
        }


def rate_point(c: Constellation, gamma: float, budget: int = DEFAULT_BUDGET, seed=0,
               method: str = "auto") -> RatePoint:
    """PEP matrix, per-point SER, SER and BER at SNR ``gamma``.

    The diagonal of the PEP matrix is ``None``.
    """
    _check_gamma(gamma)
    rt = rate_terms(c, value=gamma, budget=budget, seed=seed, method=method, fd=False)
    M = c.M
    matrix: list[list[Estimate | None]] = [[None] * M for _ in range(M)]
    for t in rt.points:
        for j, e in t.pep.items():
            matrix[t.index][j] = e.value
    return RatePoint(
        gamma, matrix, [t.ser_point.value for t in rt.points], rt.ser.value,
        None if rt.ber is None else rt.ber.value,
    )


def simulate(c: Constellation, gamma: float, trials: int, seed=0,
             chunk: int = 1 << 16) -> dict[str, Estimate | None]:
    """Brute-force minimum-distance detection of random symbols in AWGN.

    Ties go to the lowest index. Returns ``{"ser": ..., "ber": ...}``; the BER
    is ``None`` for unlabeled constellations.
    """
    _check_gamma(gamma)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sigma = 1.0 / math.sqrt(gamma)
    pts = c.points
    h = hamming_matrix(c) / c.bits_per_symbol if c.has_labels else None
    sym_err = 0
    bit_sum = 0.0
    bit_sq = 0.0
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        tx = rng.choice(c.M, size=size, p=c.priors)
        r = pts[tx] + sigma * rng.standard_normal((size, c.n))
        d2 = np.sum((r[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        rx = np.argmin(d2, axis=1)
        sym_err += int(np.count_nonzero(rx != tx))
        if h is not None:
            frac = h[tx, rx]
            bit_sum += float(frac.sum())
            bit_sq += float((frac**2).sum())
        done += size

    def flags(events):
        return ("low_count",) if events < LOW_COUNT else ()

    p = sym_err / trials
    ser_est = Estimate(p, math.sqrt(p * (1 - p) / trials), trials, "monte_carlo", flags(sym_err))
    ber_est = None
    if h is not None:
        mean = bit_sum / trials
        var = max(bit_sq / trials - mean**2, 0.0) * trials / max(trials - 1, 1)
        ber_est = Estimate(mean, math.sqrt(var / trials), trials, "monte_carlo", flags(sym_err))
    return {"ser": ser_est, "ber": ber_est}
