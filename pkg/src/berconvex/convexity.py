"""Convexity thresholds, curvature sweeps, inflection search and numerical convexity checks.

Every threshold is a ratio of a kernel root (``alpha1, alpha2`` in the SNR,
``beta1, beta2`` in the noise power) and a squared distance from the
constellation geometry. Regions governed by ``d_max`` are empty when the
relevant decision region is unbounded.

Numerical convexity on an interval means: no point of a log-spaced grid has an
analytic curvature estimate below ``-3`` standard errors (concavity: above
``+3``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .constellation import Constellation, ConstellationError
from .error_rates import point_terms, rate_terms
from .gaussian_core import (
    DEFAULT_BUDGET, FD_STEP, CombinedEstimate, CurvatureKernel, Estimate, measure_combinations,
)
from .geometry import summarize

SIGMA = 3.0
GRID_POINTS = 33
SPAN = 8.0
PARITY_POINTS = 65
REFINE_REL_WIDTH = 1e-3

GUARANTEED_CONVEX = "guaranteed_convex"
GUARANTEED_CONCAVE = "guaranteed_concave"
UNCONDITIONALLY_CONVEX = "unconditionally_convex"
INDETERMINATE = "indeterminate"


def _enc(v):
    if v is None:
        return None
    return v if math.isfinite(v) else "inf"


def log_grid(start: float, stop: float, count: int = GRID_POINTS) -> np.ndarray:
    return np.geomspace(start, stop, count)


@dataclass(frozen=True)
class PairBand:
    """SNR band ``[lower, upper]`` between the PEP's low- and high-SNR regimes.

    ``lower`` is ``None`` when the low-SNR regime is empty (unbounded region).
    """

    lower: float | None
    upper: float


@dataclass(frozen=True, eq=False)
class ThresholdReport:
    """Every convexity threshold of a constellation.

    SNR values bound regions of the form ``gamma >= x`` (convex) or
    ``gamma <= x`` (concave, ``None`` when empty). Noise-power values bound
    ``P_N <= x`` (convex) or ``P_N >= x`` (``inf`` when empty).
    """

    n: int
    kernel: CurvatureKernel
    normalized: bool
    d_min: float
    d_min_per_point: np.ndarray
    d_max_per_point: np.ndarray
    d_pair: np.ndarray
    gamma_convex: np.ndarray
    gamma_concave: tuple[float | None, ...]
    gamma_star: float
    pep_bands: dict[tuple[int, int], PairBand]
    noise_convex: np.ndarray
    noise_concave: np.ndarray
    noise_pair: dict[tuple[int, int], float]
    noise_star: float
    extras: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        key = lambda p: f"{p[0]},{p[1]}"  # noqa: E731
        return {
            "inputs": {
                "n": self.n,
                "d_min": self.d_min,
                "d_min_per_point": self.d_min_per_point.tolist(),
                "d_max_per_point": [_enc(float(v)) for v in self.d_max_per_point],
                "normalized": self.normalized,
            },
            "kernel": self.kernel.to_dict(),
            "gamma_convex_per_point": self.gamma_convex.tolist(),
            "gamma_concave_per_point": [_enc(v) for v in self.gamma_concave],
            "gamma_star": self.gamma_star,
            "pep_bands": {key(p): {"lower": _enc(b.lower), "upper": b.upper}
                          for p, b in self.pep_bands.items()},
            "noise_convex_per_point": self.noise_convex.tolist(),
            "noise_concave_per_point": [_enc(float(v)) for v in self.noise_concave],
            "noise_pair": {key(p): _enc(v) for p, v in self.noise_pair.items()},
            "noise_star": self.noise_star,
            "extras": {k: ({key(p): x for p, x in v.items()} if isinstance(v, dict) else v)
                       for k, v in self.extras.items()},
        }


def thresholds(c: Constellation) -> ThresholdReport:
    """Evaluate all SNR and noise-power thresholds from the geometry."""
    geo = summarize(c)
    n, M = c.n, c.M
    k = CurvatureKernel(n)
    dmin_i = geo.d_min_per_point
    dmax_i = geo.d_max_per_point
    gamma_convex = k.alpha1 / dmin_i**2
    gamma_concave = tuple(
        k.alpha2 / d**2 if n > 2 and math.isfinite(d) else None for d in dmax_i
    )
    # for n <= 2 the low-SNR PEP regime is bounded by alpha1, above that by alpha2
    low_root = k.alpha1 if n <= 2 else k.alpha2
    bands, npair, sharper = {}, {}, {}
    for i in range(M):
        for j in range(M):
            if i == j:
                continue
            reach = geo.d_pair[i, j] + dmax_i[j]
            lower = low_root / reach**2 if math.isfinite(reach) else None
            bands[(i, j)] = PairBand(lower, float(gamma_convex[i]))
            npair[(i, j)] = reach**2 / k.beta2 if math.isfinite(reach) else math.inf
            sharper[(i, j)] = k.alpha1 / (geo.d_pair[i, j] / 2) ** 2
    return ThresholdReport(
        n=n, kernel=k, normalized=c.normalized, d_min=geo.d_min,
        d_min_per_point=dmin_i, d_max_per_point=dmax_i, d_pair=geo.d_pair,
        gamma_convex=gamma_convex, gamma_concave=gamma_concave,
        gamma_star=k.alpha1 / geo.d_min**2, pep_bands=bands,
        noise_convex=dmin_i**2 / k.beta1,
        noise_concave=np.where(np.isfinite(dmax_i), dmax_i**2 / k.beta2, np.inf),
        noise_pair=npair, noise_star=geo.d_min**2 / k.beta1,
        extras={
            "pep_gamma_convex_per_pair_sharper": sharper,
            "note": "per-pair sharper SNR thresholds are not used by verify",
            "d_max_approximate": geo.approximate,
        },
    )


# --- quantities ---------------------------------------------------------------

def parse_quantity(name: str, c: Constellation) -> tuple[str, tuple[int, ...]]:
    kind, _, arg = name.partition(":")
    if kind in ("ser", "ber") and not arg:
        if kind == "ber" and not c.has_labels:
            raise ConstellationError(f"BER needs bit labels; constellation {c.name!r} has none")
        return kind, ()
    try:
        idx = tuple(int(v) for v in arg.replace(" ", "").split(",")) if arg else ()
    except ValueError:
        raise ValueError(f"bad quantity {name!r}") from None
    if kind == "ser_point" and len(idx) == 1 and 0 <= idx[0] < c.M:
        return kind, idx
    if kind == "pep" and len(idx) == 2 and idx[0] != idx[1] and all(0 <= v < c.M for v in idx):
        return kind, idx
    raise ValueError(f"bad quantity {name!r}; use pep:i,j, ser_point:i, ser or ber")


def all_quantities(c: Constellation) -> list[str]:
    names = ["ser"] + (["ber"] if c.has_labels else [])
    names += [f"ser_point:{i}" for i in range(c.M)]
    names += [f"pep:{i},{j}" for i in range(c.M) for j in range(c.M) if i != j]
    return names


def classify(c: Constellation, variable: str, value: float,
             quantities: list[str] | None = None) -> dict[str, str]:
    """Regime of each quantity at one SNR or noise power, from thresholds alone."""
    if not value > 0:
        raise ValueError("value must be positive")
    t = thresholds(c)
    low_n = c.n <= 2
    out = {}
    for name in quantities or all_quantities(c):
        kind, idx = parse_quantity(name, c)
        regime = INDETERMINATE
        if variable == "snr":
            g = value
            if kind == "ser":
                regime = UNCONDITIONALLY_CONVEX if low_n else (
                    GUARANTEED_CONVEX if g >= t.gamma_star else INDETERMINATE)
            elif kind == "ber":
                regime = GUARANTEED_CONVEX if g >= t.gamma_star else INDETERMINATE
            elif kind == "ser_point":
                i = idx[0]
                lo = t.gamma_concave[i]
                if low_n:
                    regime = UNCONDITIONALLY_CONVEX
                elif g >= t.gamma_convex[i]:
                    regime = GUARANTEED_CONVEX
                elif lo is not None and g <= lo:
                    regime = GUARANTEED_CONCAVE
            else:
                band = t.pep_bands[idx]
                if g >= band.upper:
                    regime = GUARANTEED_CONVEX
                elif band.lower is not None and g <= band.lower:
                    regime = GUARANTEED_CONCAVE if low_n else GUARANTEED_CONVEX
        elif variable == "noise":
            p = value
            if kind in ("ser", "ber"):
                regime = GUARANTEED_CONVEX if p <= t.noise_star else INDETERMINATE
            elif kind == "ser_point":
                i = idx[0]
                if p <= t.noise_convex[i]:
                    regime = GUARANTEED_CONVEX
                elif p >= t.noise_concave[i]:
                    regime = GUARANTEED_CONCAVE
            else:
                if p <= t.noise_convex[idx[0]] or p >= t.noise_pair[idx]:
                    regime = GUARANTEED_CONVEX
        else:
            raise ValueError(f"unknown variable {variable!r}")
        out[name] = regime
    return out


def _value_seed(seed, variable: str, value: float) -> list[int]:
    bits = int(np.float64(value).view(np.uint64))
    base = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    return base + [0 if variable == "snr" else 1, bits >> 32, bits & 0xFFFFFFFF]


def evaluate_quantity(c: Constellation, quantity: str, variable: str, value: float,
                      budget: int = DEFAULT_BUDGET, seed=0, method: str = "auto",
                      fd: bool = True, fd_step: float = FD_STEP) -> CombinedEstimate:
    """Value and curvatures of one quantity at one point.

    The sample seed is derived from ``(seed, variable, value)`` so repeated
    evaluations at the same point agree exactly.
    """
    kind, idx = parse_quantity(quantity, c)
    s = _value_seed(seed, variable, value)
    kw = dict(variable=variable, value=value, budget=budget, seed=s, method=method,
              fd=fd, fd_step=fd_step)
    if kind == "pep":
        i, j = idx
        geo = summarize(c)
        return measure_combinations([geo.region_in_frame(j, i)], [[1.0]],
                                    tail_distance=geo.d_min, **kw)[0]
    if kind == "ser_point":
        return point_terms(c, idx[0], pairs=False, **kw).ser_point
    rt = rate_terms(c, pairs=False, **kw)
    return rt.ser if kind == "ser" else rt.ber


# --- sweeps and inflections ---------------------------------------------------

@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float
    refined: bool = False

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def to_dict(self) -> dict[str, Any]:
        return {"lower": self.lower, "upper": self.upper, "refined": self.refined}


@dataclass(frozen=True, eq=False)
class CurvatureSweep:
    """Values and second derivatives of one quantity along a grid."""

    quantity: str
    variable: str
    grid: np.ndarray
    values: tuple[Estimate, ...]
    second_derivative: tuple[Estimate, ...]
    fd_second_derivative: tuple[Estimate, ...] | None
    inflections: tuple[Bracket, ...]
    unresolved: tuple[Bracket, ...]
    constellation: Constellation = field(repr=False)
    budget: int = DEFAULT_BUDGET
    seed: Any = 0
    method: str = "auto"

    def rows(self) -> list[dict[str, Any]]:
        """Flat records for CSV export."""
        out = []
        chans = [("value", self.values), ("second_derivative", self.second_derivative)]
        if self.fd_second_derivative is not None:
            chans.append(("fd_second_derivative", self.fd_second_derivative))
        for k, x in enumerate(self.grid):
            for label, col in chans:
                e = col[k]
                out.append({
                    "variable": self.variable, "value": float(x),
                    "quantity": f"{self.quantity}/{label}", "estimate": e.value,
                    "std_error": e.std_error, "method": e.method, "flags": ";".join(e.flags),
                })
        return out

    def to_dict(self) -> dict[str, Any]:
        def col(es):
            return None if es is None else [e.to_dict() for e in es]

        return {
            "quantity": self.quantity,
            "variable": self.variable,
            "grid": self.grid.tolist(),
            "values": col(self.values),
            "second_derivative": col(self.second_derivative),
            "fd_second_derivative": col(self.fd_second_derivative),
            "inflections": [b.to_dict() for b in self.inflections],
            "unresolved": [b.to_dict() for b in self.unresolved],
        }


def _significant(e: Estimate, k: float = SIGMA) -> bool:
    return abs(e.value) > k * e.std_error


def _brackets(grid, curv) -> tuple[list[Bracket], list[Bracket]]:
    sig = [k for k, e in enumerate(curv) if _significant(e)]
    found = []
    for a, b in zip(sig, sig[1:]):
        if np.sign(curv[a].value) != np.sign(curv[b].value):
            found.append(Bracket(float(grid[a]), float(grid[b])))
    unresolved = []
    for k in range(len(grid) - 1):
        x, y = curv[k], curv[k + 1]
        if np.sign(x.value) * np.sign(y.value) < 0 and not (_significant(x) and _significant(y)):
            unresolved.append(Bracket(float(grid[k]), float(grid[k + 1])))
    return found, unresolved


def sweep(c: Constellation, quantity: str, variable: str, grid, budget: int = DEFAULT_BUDGET,
          seed=0, method: str = "auto", fd: bool = True, fd_step: float = FD_STEP) -> CurvatureSweep:
    """Analytic and finite-difference second derivatives of ``quantity`` along ``grid``."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and positive")
    parse_quantity(quantity, c)
    res = [evaluate_quantity(c, quantity, variable, float(x), budget, seed, method, fd, fd_step)
           for x in grid]
    curv = tuple(r.curvature for r in res)
    found, unresolved = _brackets(grid, curv)
    return CurvatureSweep(
        quantity, variable, grid, tuple(r.value for r in res), curv,
        tuple(r.fd_curvature for r in res) if fd else None,
        tuple(found), tuple(unresolved), c, budget, seed, method,
    )


@dataclass(frozen=True)
class InflectionResult:
    brackets: tuple[Bracket, ...]
    unresolved: tuple[Bracket, ...]

    @property
    def count(self) -> int:
        return len(self.brackets)

    @property
    def parity(self) -> str:
        return "odd" if self.count % 2 else "even"

    def to_dict(self) -> dict[str, Any]:
        return {"count": self.count, "parity": self.parity,
                "brackets": [b.to_dict() for b in self.brackets],
                "unresolved": [b.to_dict() for b in self.unresolved]}


def _bisect(curvature_at: Callable[[float], Estimate], br: Bracket, rel_width: float,
            max_iter: int = 200) -> Bracket:
    lo, hi = br.lower, br.upper
    s_lo = np.sign(curvature_at(lo).value)
    for _ in range(max_iter):
        if (hi - lo) / lo <= rel_width:
            return Bracket(lo, hi, True)
        mid = math.sqrt(lo * hi)
        e = curvature_at(mid)
        if not _significant(e):
            return Bracket(lo, hi, False)
        if np.sign(e.value) == s_lo:
            lo = mid
        else:
            hi = mid
    return Bracket(lo, hi, (hi - lo) / lo <= rel_width)


def find_inflections(s: CurvatureSweep, refine: bool = True,
                     rel_width: float = REFINE_REL_WIDTH) -> InflectionResult:
    """Significant sign changes of the analytic curvature, refined by bisection."""
    if not refine:
        return InflectionResult(s.inflections, s.unresolved)

    def at(x):
        return evaluate_quantity(s.constellation, s.quantity, s.variable, x,
                                 s.budget, s.seed, s.method, fd=False).curvature

    return InflectionResult(tuple(_bisect(at, b, rel_width) for b in s.inflections), s.unresolved)


# --- verification -------------------------------------------------------------

PASS, FAIL, VACUOUS, UNASSERTED = "pass", "fail", "vacuous", "unasserted"


@dataclass
class VerifyConfig:
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    method: str = "auto"
    grid_points: int = GRID_POINTS
    span: float = SPAN
    parity_points: int = PARITY_POINTS
    low_snr_range: tuple[float, float] = (0.01, 100.0)


@dataclass
class ClauseResult:
    """Outcome of one convexity claim.

    ``group`` names the quantity and variable (``"pep_snr"``), ``name`` the
    claim. ``status`` is pass, fail, vacuous (hypothesis region empty) or
    unasserted (reported without a verdict).
    """

    group: str
    name: str
    status: str
    detail: str = ""
    evidence: list[dict[str, Any]] = field(default_factory=list)
    tail_unreliable: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"group": self.group, "name": self.name, "status": self.status,
                "detail": self.detail, "tail_unreliable": self.tail_unreliable,
                **self.extra, "evidence": self.evidence}


@dataclass
class VerifyReport:
    constellation: str
    thresholds: ThresholdReport
    clauses: list[ClauseResult]

    @property
    def passed(self) -> bool:
        return all(cl.status != FAIL for cl in self.clauses)

    @property
    def reliable(self) -> bool:
        return not any(cl.tail_unreliable for cl in self.clauses if cl.status in (PASS, FAIL))

    def clause(self, name: str) -> ClauseResult:
        for cl in self.clauses:
            if cl.name == name:
                return cl
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "constellation": self.constellation,
            "passed": self.passed,
            "reliable": self.reliable,
            "thresholds": self.thresholds.to_dict(),
            "clauses": [cl.to_dict() for cl in self.clauses],
        }


class _Evaluator:
    """Caches curvature evaluations shared between clauses."""

    def __init__(self, c: Constellation, cfg: VerifyConfig):
        self.c = c
        self.cfg = cfg
        self._cache: dict[tuple, Estimate] = {}

    def __call__(self, quantity: str, variable: str, value: float) -> Estimate:
        key = (quantity, variable, float(value))
        if key not in self._cache:
            self._cache[key] = evaluate_quantity(
                self.c, quantity, variable, float(value), self.cfg.budget, self.cfg.seed,
                self.cfg.method, fd=False,
            ).curvature
        return self._cache[key]


def _check_sign(ev: _Evaluator, quantity: str, variable: str, grid, convex: bool):
    """Returns (ok, evidence, tail_flagged) for one curve on one grid."""
    worst = (math.inf, None)
    ok, tail, pts = True, False, []
    for x in grid:
        e = ev(quantity, variable, x)
        margin = (e.value + SIGMA * e.std_error) if convex else (SIGMA * e.std_error - e.value)
        ok &= margin >= 0
        tail |= "tail_unreliable" in e.flags
        pts.append({"x": float(x), "value": e.value, "std_error": e.std_error, "method": e.method})
        if margin < worst[0]:
            worst = (margin, float(x))
    evidence = {"quantity": quantity, "variable": variable, "points": pts,
                "worst_margin": worst[0], "worst_at": worst[1]}
    return bool(ok), evidence, tail


def _sign_clause(group, name, ev, items, convex: bool, empty_reason: str) -> ClauseResult:
    """``items`` lists (quantity, variable, grid) curves that must all hold."""
    if not items:
        return ClauseResult(group, name, VACUOUS, empty_reason)
    ok_all, tail_any, evidence = True, False, []
    for quantity, variable, grid in items:
        ok, evid, tail = _check_sign(ev, quantity, variable, grid, convex)
        ok_all &= ok
        tail_any |= tail
        evidence.append(evid)
    shape = "convex" if convex else "concave"
    detail = f"{len(items)} curve(s) checked {shape} at {SIGMA:g} sigma"
    return ClauseResult(group, name, PASS if ok_all else FAIL, detail, evidence, tail_any)


def _parity_clause(group, name, ev, t: ThresholdReport, pairs, expected: str,
                   cfg: VerifyConfig) -> ClauseResult:
    if not pairs:
        return ClauseResult(group, name, VACUOUS, "no pair has a finite inflection band")
    evidence, ok, asserted, seen = [], True, 0, set()
    for i, j in pairs:
        band = t.pep_bands[(i, j)]
        q = f"pep:{i},{j}"
        grid = log_grid(band.lower, band.upper, cfg.parity_points)
        curv = [ev(q, "snr", x) for x in grid]
        found, unresolved = _brackets(grid, curv)
        exact = all(e.method != "monte_carlo" for e in curv)
        parity = "odd" if len(found) % 2 else "even"
        if exact:
            asserted += 1
            seen.add(parity)
            ok &= parity == expected
        evidence.append({"quantity": q, "band": [band.lower, band.upper], "count": len(found),
                         "parity": parity, "exact": exact,
                         "brackets": [b.to_dict() for b in found],
                         "unresolved": [b.to_dict() for b in unresolved]})
    if asserted == 0:
        return ClauseResult(group, name, UNASSERTED,
                            "no exact-path pair; counts reported without a parity verdict",
                            evidence, extra={"expected_parity": expected})
    observed = "/".join(sorted(seen))
    return ClauseResult(group, name, PASS if ok else FAIL,
                        f"expected {expected}, exact pairs show {observed}", evidence,
                        extra={"expected_parity": expected, "parity": observed})


def verify(c: Constellation, config: VerifyConfig | None = None) -> VerifyReport:
    """Check every convexity and concavity claim on threshold-anchored grids."""
    cfg = config or VerifyConfig()
    t = thresholds(c)
    ev = _Evaluator(c, cfg)
    n, M = c.n, c.M
    up = lambda x: log_grid(x, cfg.span * x, cfg.grid_points)  # noqa: E731
    down = lambda x: log_grid(x / cfg.span, x, cfg.grid_points)  # noqa: E731
    active = [i for i in range(M) if c.priors[i] > 0]
    pairs = [(i, j) for i in active for j in range(M) if j != i]
    finite = [p for p in pairs if t.pep_bands[p].lower is not None]
    low_dim = n <= 2
    not_low = f"needs n <= 2 (n = {n})"
    not_high = f"needs n > 2 (n = {n})"
    no_labels = "constellation has no bit labels"
    unbounded = "every relevant decision region is unbounded"
    out: list[ClauseResult] = []

    def sign(group, name, items, convex, reason=""):
        out.append(_sign_clause(group, name, ev, items, convex, reason))

    def skip(group, name, reason):
        out.append(ClauseResult(group, name, VACUOUS, reason))

    lo, hi = cfg.low_snr_range
    if low_dim:
        sign("ser_snr", "ser_convex_all_snr", [("ser", "snr", log_grid(lo, hi, cfg.grid_points))], True)
    else:
        skip("ser_snr", "ser_convex_all_snr", not_low)
    sign("ser_snr", "ser_point_convex_high_snr",
         [(f"ser_point:{i}", "snr", up(t.gamma_convex[i])) for i in active], True)
    sign("ser_snr", "ser_point_concave_low_snr",
         [(f"ser_point:{i}", "snr", down(t.gamma_concave[i]))
          for i in active if t.gamma_concave[i] is not None], False,
         not_high if low_dim else unbounded)
    sign("ser_snr", "ser_convex_high_snr", [("ser", "snr", up(t.gamma_star))], True)

    sign("ser_noise", "ser_point_concave_large_noise",
         [(f"ser_point:{i}", "noise", up(t.noise_concave[i]))
          for i in active if math.isfinite(t.noise_concave[i])], False, unbounded)
    sign("ser_noise", "ser_point_convex_small_noise",
         [(f"ser_point:{i}", "noise", down(t.noise_convex[i])) for i in active], True)
    sign("ser_noise", "ser_convex_small_noise", [("ser", "noise", down(t.noise_star))], True)

    sign("pep_snr", "pep_convex_high_snr",
         [(f"pep:{i},{j}", "snr", up(t.pep_bands[(i, j)].upper)) for i, j in pairs], True)
    low_items = [(f"pep:{i},{j}", "snr", down(t.pep_bands[(i, j)].lower)) for i, j in finite]
    if low_dim:
        sign("pep_snr", "pep_concave_low_snr", low_items, False, unbounded)
        out.append(_parity_clause("pep_snr", "pep_inflection_parity_odd", ev, t, finite, "odd", cfg))
        skip("pep_snr", "pep_convex_low_snr", not_high)
        skip("pep_snr", "pep_inflection_parity_even", not_high)
    else:
        skip("pep_snr", "pep_concave_low_snr", not_low)
        skip("pep_snr", "pep_inflection_parity_odd", not_low)
        sign("pep_snr", "pep_convex_low_snr", low_items, True, unbounded)
        out.append(_parity_clause("pep_snr", "pep_inflection_parity_even", ev, t, finite, "even", cfg))

    if c.has_labels:
        sign("ber_snr", "ber_convex_high_snr", [("ber", "snr", up(t.gamma_star))], True)
    else:
        skip("ber_snr", "ber_convex_high_snr", no_labels)

    sign("pep_noise", "pep_convex_small_noise",
         [(f"pep:{i},{j}", "noise", down(t.noise_convex[i])) for i, j in pairs], True)
    sign("pep_noise", "pep_convex_large_noise",
         [(f"pep:{i},{j}", "noise", up(t.noise_pair[(i, j)]))
          for i, j in pairs if math.isfinite(t.noise_pair[(i, j)])], True, unbounded)

    if c.has_labels:
        sign("ber_noise", "ber_convex_small_noise", [("ber", "noise", down(t.noise_star))], True)
    else:
        skip("ber_noise", "ber_convex_small_noise", no_labels)
    return VerifyReport(c.name, t, out)
