"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
collected into the end-of-run summary.
"""

import math
import time

import numpy as np
import oracles
import pytest

from berconvex import (
    ber, find_inflections, parse_constellation, pep, ser, summarize, sweep, thresholds,
)
from berconvex.cli import main
from berconvex.error_rates import point_terms
from berconvex.gaussian_core import noise_curvature_integrand, snr_curvature_integrand
from berconvex.reports import body_of

SEED = 7
BUDGET = 1_000_000
EXACT_TOL = 1e-10
MC_ABS_TOL = 2e-4
SIGMAS = 3.0
ARITH_FLOOR = 1e-12
KERNEL_REL_TOL = 1e-5
FD_REL_TOL = 0.05
INFLECTION_REL_TOL = 0.01


def test_c01_bpsk_closed_form(criterion):
    c = parse_constellation("bpsk")
    exact_bad, mc_sigma_bad, mc_abs_bad = [], [], []
    worst_abs = 0.0
    for g in (0.5, 1.0, 2.0, 4.0):
        ref = float(oracles.bpsk_pep(g))
        for name, fn in (("pep", lambda m: pep(c, 0, 1, g, BUDGET, SEED, m)),
                         ("ser", lambda m: ser(c, g, BUDGET, SEED, m)),
                         ("ber", lambda m: ber(c, g, BUDGET, SEED, m))):
            e = fn("auto")
            if not (e.method == "quadrature" and e.std_error == 0 and abs(e.value - ref) <= EXACT_TOL):
                exact_bad.append((name, g, e.value - ref))
            m = fn("mc")
            d = abs(m.value - ref)
            worst_abs = max(worst_abs, d)
            if d > SIGMAS * m.std_error:
                mc_sigma_bad.append((name, g, d / m.std_error))
            if d > MC_ABS_TOL:
                mc_abs_bad.append((name, g, round(d, 6), round(m.std_error, 6)))
    ok = not (exact_bad or mc_sigma_bad or mc_abs_bad)
    criterion(1, ok, f"exact misses={exact_bad} mc>3se={mc_sigma_bad} "
                     f"mc>2e-4={mc_abs_bad} worst mc |d|={worst_abs:.2e}")
    assert not exact_bad
    assert not mc_sigma_bad
    assert not mc_abs_bad, "MC absolute tolerance is below one standard error at budget 1e6"


def test_c02_ser_equals_sum_of_peps(criterion):
    t0 = time.perf_counter()
    worst = {}
    bad = []
    for name in ("psk:4:gray", "psk:8:gray", "qam:16:gray", "pam:4:gray"):
        c = parse_constellation(name)
        worst[name] = 0.0
        for g in (1.0, 4.0, 16.0):
            for i in range(c.M):
                total = point_terms(c, i, value=g, seed=[SEED, 1], fd=False).pep_sum.value
                own = point_terms(c, i, value=g, seed=[SEED, 2], fd=False, pairs=False).ser_point.value
                pooled = math.hypot(total.std_error, own.std_error)
                diff = abs(total.value - own.value)
                if diff > SIGMAS * pooled + ARITH_FLOOR:
                    bad.append((name, g, i, diff, pooled))
                worst[name] = max(worst[name], diff / pooled if pooled else diff)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 60
    criterion(2, ok, f"worst (z or |d| if exact)={ {k: round(v, 3) for k, v in worst.items()} } "
                     f"time={elapsed:.1f}s")
    assert not bad
    assert elapsed <= 60


def _fd(f, x, h):
    return (f(x + h) - 2 * f(x) + f(x - h)) / h**2


def test_c03_kernels_match_pdf_differences(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for n in (1, 2, 3, 4):
        for _ in range(100):
            gamma = float(10 ** rng.uniform(-1, 1.5))
            x = rng.standard_normal(n) * rng.uniform(0.2, 3.0) / math.sqrt(gamma)
            r2 = float(np.sum(x * x))
            p = 1 / gamma
            h_g = oracles.mp.mpf(gamma) * oracles.mp.mpf("1e-12")
            h_p = oracles.mp.mpf(p) * oracles.mp.mpf("1e-12")
            ref_g = _fd(lambda g: oracles.gaussian_pdf(r2, 1 / g, n), oracles.mp.mpf(gamma), h_g)
            ref_p = _fd(lambda q: oracles.gaussian_pdf(r2, q, n), oracles.mp.mpf(p), h_p)
            got_g = snr_curvature_integrand(x, gamma)
            got_p = noise_curvature_integrand(x, p)
            worst = max(worst, float(abs(got_g - ref_g) / abs(ref_g)),
                        float(abs(got_p - ref_p) / abs(ref_p)))
    ok = worst <= KERNEL_REL_TOL
    criterion(3, ok, f"worst relative error={worst:.2e} over 800 comparisons")
    assert ok


def test_c04_analytic_vs_fd_curvature(criterion):
    grids = {"snr": np.geomspace(0.1, 100, 33), "noise": np.geomspace(0.01, 10, 33)}
    bad, checked = [], 0
    for name in ("bpsk", "psk:4:gray", "psk:8:gray", "qam:16:gray", "pam:4:gray"):
        c = parse_constellation(name)
        budget = 100_000 if name == "psk:8:gray" else BUDGET
        for q in ("pep:0,1", "ser", "ber"):
            for var, grid in grids.items():
                s = sweep(c, q, var, grid, budget=budget, seed=SEED)
                for x, a, f in zip(grid, s.second_derivative, s.fd_second_derivative):
                    checked += 1
                    tol = max(SIGMAS * math.hypot(a.std_error, f.std_error), FD_REL_TOL * abs(a.value))
                    if abs(a.value - f.value) > tol:
                        bad.append((name, q, var, float(x), a.value, f.value))
    ok = not bad
    criterion(4, ok, f"{checked} grid points, disagreements={bad[:3]}")
    assert ok


def test_c05_ser_convex_low_dimension(criterion):
    grid = np.geomspace(0.01, 100, 33)
    worst = math.inf
    exact = True
    for name in ("bpsk", "psk:4:gray"):
        s = sweep(parse_constellation(name), "ser", "snr", grid, fd=False)
        for e in s.second_derivative:
            exact &= e.std_error == 0 and e.method != "monte_carlo"
            worst = min(worst, e.value)
    ok = exact and worst > -ARITH_FLOOR
    criterion(5, ok, f"exact paths={exact} min curvature={worst:.3e}")
    assert ok


def test_c06_ber_convex_above_threshold(criterion):
    t0 = time.perf_counter()
    stars, worst, bad = {}, {}, []
    for name in ("bpsk", "psk:4:gray", "psk:8:gray", "qam:16:gray"):
        c = parse_constellation(name)
        gs = thresholds(c).gamma_star
        stars[name] = gs
        s = sweep(c, "ber", "snr", np.geomspace(gs, 8 * gs, 33), budget=BUDGET, seed=SEED, fd=False)
        z = [e.value + SIGMAS * e.std_error for e in s.second_derivative]
        worst[name] = min(z)
        bad += [(name, float(x)) for x, v in zip(s.grid, z) if v < 0]
    elapsed = time.perf_counter() - t0
    star_ok = (abs(stars["bpsk"] - (1 + math.sqrt(2))) <= 1e-12
               and abs(stars["psk:4:gray"] - 8.0) <= 1e-12)
    ok = not bad and star_ok and elapsed <= 600
    criterion(6, ok, f"gamma*={ {k: round(v, 5) for k, v in stars.items()} } "
                     f"violations={bad} time={elapsed:.0f}s")
    assert star_ok and not bad and elapsed <= 600


def test_c07_pam4_single_inflection(criterion):
    c = parse_constellation("pam:4:gray")
    t = thresholds(c)
    d_max_inner = t.d_max_per_point[1]
    band = t.pep_bands[(0, 1)]
    expected_lower = (1 + math.sqrt(2)) / (t.d_pair[0, 1] + 1 / math.sqrt(5)) ** 2
    grid = np.geomspace(band.lower / 8, band.upper * 8, 65)
    res = find_inflections(sweep(c, "pep:0,1", "snr", grid, fd=False))
    inside = [b for b in res.brackets if band.lower <= b.lower and b.upper <= band.upper]
    low = sweep(c, "pep:0,1", "snr", np.geomspace(band.lower / 8, band.lower, 33), fd=False)
    concave = all(e.value < 0 and e.std_error == 0 for e in low.second_derivative)
    oracle_ok = all(
        abs(e.value - float(oracles.second_derivative(oracles.pam4_outer_inner_pep, x)))
        <= 1e-9 * max(1.0, abs(e.value))
        for x, e in zip(low.grid, low.second_derivative)
    )
    ok = (abs(d_max_inner - 1 / math.sqrt(5)) <= 1e-12 and abs(band.lower - expected_lower) <= 1e-12
          and res.count == 1 and len(inside) == 1 and concave and oracle_ok)
    br = res.brackets[0] if res.brackets else None
    criterion(7, ok, f"band=[{band.lower:.5f}, {band.upper:.5f}] inflections={res.count} "
                     f"bracket={br and (round(br.lower, 5), round(br.upper, 5))} "
                     f"concave below band={concave}")
    assert ok


def test_c08_noise_power_convexity(criterion):
    c = parse_constellation("bpsk")
    p_small = 1 / (3 + math.sqrt(6))
    s = sweep(c, "pep:0,1", "noise", np.geomspace(p_small / 100, p_small, 33), fd=False)
    positive = all(e.value > 0 for e in s.second_derivative)
    matches = all(
        abs(e.value - float(oracles.bpsk_pep_curv_noise(x))) <= 1e-9 * abs(e.value)
        for x, e in zip(s.grid, s.second_derivative)
    )
    res = find_inflections(sweep(c, "pep:0,1", "noise", np.geomspace(0.05, 2, 33), fd=False))
    mids = [math.sqrt(b.lower * b.upper) for b in res.brackets]
    located = len(mids) == 1 and abs(mids[0] - 1 / 3) <= INFLECTION_REL_TOL / 3
    worst, bad = {}, []
    for name in ("bpsk", "psk:4:gray", "psk:8:gray", "qam:16:gray", "pam:4:gray"):
        cc = parse_constellation(name)
        ps = thresholds(cc).noise_star
        sw = sweep(cc, "ber", "noise", np.geomspace(ps / 8, ps, 33), budget=BUDGET, seed=SEED, fd=False)
        z = [e.value + SIGMAS * e.std_error for e in sw.second_derivative]
        worst[name] = min(z)
        bad += [(name, float(x)) for x, v in zip(sw.grid, z) if v < 0]
    ok = positive and matches and located and not bad
    criterion(8, ok, f"small-noise positive={positive} oracle match={matches} "
                     f"inflection={mids} ber violations={bad}")
    assert ok


def test_c09_geometry(criterion):
    rng = np.random.default_rng(SEED)
    geo_pam = summarize(parse_constellation("pam:4:gray"))
    inner_ok = all(abs(geo_pam.d_max_per_point[i] - 1 / math.sqrt(5)) <= 1e-12 for i in (1, 2))
    cert_ok = True
    disagreements = {}
    for name in ("bpsk", "psk:4:gray", "psk:8:gray", "qam:16:gray", "pam:4:gray"):
        c = parse_constellation(name)
        geo = summarize(c)
        for i, (reg, md) in enumerate(zip(geo.regions, geo.max_distances)):
            if md.bounded:
                continue
            d = md.certificate
            cert_ok &= (d is not None and abs(np.linalg.norm(d) - 1) < 1e-9
                        and bool(np.all(reg.normals @ d <= 1e-9)) and bool(reg.contains(1e6 * d, tol=1e-3)))
        if name == "bpsk":
            cert_ok &= not any(m.bounded for m in geo.max_distances)
        k = rng.integers(0, c.M, 100_000)
        r = c.points[k] + rng.standard_normal((k.size, c.n)) * 0.7
        d2 = np.sum((r[:, None, :] - c.points[None]) ** 2, axis=2)
        order = np.sort(d2, axis=1)
        off_tie = order[:, 1] - order[:, 0] > 1e-9
        nearest = np.argmin(d2, axis=1)
        member = np.stack([geo.regions[i].contains(r - c.points[i]) for i in range(c.M)], axis=1)
        unique = member.sum(axis=1) == 1
        found = np.argmax(member, axis=1)
        disagreements[name] = int(np.count_nonzero(off_tie & (~unique | (found != nearest))))
    pam_outer = [not geo_pam.max_distances[i].bounded for i in (0, 3)]
    ok = inner_ok and cert_ok and all(pam_outer) and not any(disagreements.values())
    criterion(9, ok, f"inner d_max ok={inner_ok} certificates ok={cert_ok} "
                     f"disagreements={disagreements}")
    assert ok


COMMANDS = [
    ["info", "--constellation", "qam:16:gray"],
    ["thresholds", "--constellation", "psk:8:gray"],
    ["pep", "--constellation", "psk:8:gray", "--pair", "0,1", "--snr", "1:8:3:log", "--budget", "20000", "--seed", "3"],
    ["ser", "--constellation", "psk:8:gray", "--snr-db", "0:6:3", "--budget", "20000", "--seed", "3", "--format", "csv"],
    ["ber", "--constellation", "qam:16:gray", "--noise-power", "0.1"],
    ["sweep", "--constellation", "psk:8:gray", "--quantity", "ber", "--snr", "2:20:4:log", "--budget", "20000", "--seed", "3", "--format", "csv"],
    ["inflections", "--constellation", "bpsk", "--quantity", "pep", "--pair", "0,1", "--noise-power", "0.05:2:17:log"],
    ["verify", "--constellation", "pam:4:gray", "--seed", "7"],
    ["simulate", "--constellation", "psk:8:gray", "--snr", "4", "--trials", "50000", "--seed", "3"],
]


def test_c10_reproducible_reports(criterion, tmp_path):
    mismatched = []
    for k, argv in enumerate(COMMANDS):
        bodies = []
        for rep in range(2):
            out = tmp_path / f"run{k}_{rep}.out"
            status = main(argv + ["--output", str(out)])
            assert status == 0, argv
            bodies.append(body_of(out.read_text()))
        if bodies[0] != bodies[1]:
            mismatched.append(argv[0])
    ok = not mismatched
    criterion(10, ok, f"{len(COMMANDS)} commands re-run, mismatched={mismatched}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
