"""Acceptance gate: one test per numbered guarantee, at stated tolerance.

Every test prints a single `criterion NN PASS|FAIL` verdict line (shown
under -s, or in the failure report) and asserts the same condition, so a
plain pytest run is the gate. Shared heavy inputs live in module-scoped
fixtures: the 100-model interval study feeds criteria 2 and 3, and the
randomized comparison run feeds criterion 12.

Criterion 11 contains a measured, recorded discrepancy (two r=2 cells on
the 4th-order two-band fixture where the band-limited Gramian baseline
attains the smaller in-band peak); it is asserted as stated and left
failing rather than weakened. The assertion message carries the numbers.
"""

import numpy as np
import pytest

from fdbt import (
    FrequencyGrid,
    IntervalConfig,
    RandomModelSpec,
    SfConfig,
    StateSpace,
    band_gramians,
    build_interval_extended,
    build_sf_extended,
    draw_random_models,
    evaluate,
    fgbt_reduce,
    fibt_reduce,
    gspa_reduce,
    hermitize,
    interval_eta,
    interval_gramians,
    interval_reduce,
    is_hurwitz,
    log_principal,
    moebius_substitute,
    run_randomized_experiment,
    sf_gramians,
    sf_reduce,
    solve_lyapunov,
    sqrt_principal,
    stability_epsilon_cap,
    standard_gramians,
    verify_bound,
)
from fdbt import example_fixture

import oracles
from helpers import random_stable, random_unstable, well_conditioned_transform

EX2_CASES = {"case1": (-0.4, 0.4), "case2": (-0.8, 0.8)}
STUDY_HALF_WIDTHS = (0.2, 0.4, 0.8, 1.5)
STUDY_ORDERS = (1, 2, 3)


def _verdict(num, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    line = f"criterion {num:02d} {tag}" + (f"  [{detail}]" if detail else "")
    print(line)
    return line


def _rel_gap(sys_a, sys_b, omegas):
    worst = 0.0
    for w in omegas:
        ga = evaluate(sys_a, float(w))
        gb = evaluate(sys_b, float(w))
        gap = np.linalg.norm(ga - gb, 2) / (1.0 + np.linalg.norm(ga, 2))
        worst = max(worst, float(gap))
    return worst


@pytest.fixture(scope="module")
def interval_study():
    """1200 band reductions over 100 seeded 4th-order models.

    For each model, half-width, and order: reduce, check the reduced
    system's poles, and verify the in-band bound on a 2000-point refined
    sweep. Returns flat lists of records and stability flags.
    """
    models, _ = draw_random_models(RandomModelSpec(n=4, seed=0, count=100))
    records, stable_flags = [], []
    for sys in models:
        for wl in STUDY_HALF_WIDTHS:
            grid = FrequencyGrid.linear(-wl, wl, 2000)
            for r in STUDY_ORDERS:
                res = interval_reduce(sys, IntervalConfig(-wl, wl), r, with_ef_bound=False)
                stable_flags.append(bool(is_hurwitz(res.reduced).stable))
                records.append(verify_bound(sys, res, grid, "interval"))
    return records, stable_flags


@pytest.fixture(scope="module")
def experiment():
    return run_randomized_experiment(RandomModelSpec(n=4, seed=0, count=100))


def test_criterion_01_sf_bound_soundness_at_the_anchor():
    """Single-frequency bound holds at omega = varpi, 100% of cases."""
    failures, total = [], 0
    ex1 = example_fixture("ex1").system
    for eps in (1.0, 3.0, 4.0, 5.0, 10.0):
        for r in range(1, ex1.n):
            res = sf_reduce(ex1, SfConfig(varpi=0.0, epsilon=eps), r)
            rec = verify_bound(ex1, res, FrequencyGrid.explicit((0.0,)), "sf")
            total += 1
            if not rec.passed:
                failures.append(("ex1", eps, r, rec.margin))
    rng = np.random.default_rng(1234)
    for k in range(50):
        n = 2 + k % 5
        sys = random_stable(400 + k, n)
        varpi = float(rng.uniform(0.0, 2.0))
        eps = float(rng.uniform(0.5, 5.0))
        r = 1 + k % max(1, n - 1)
        res = sf_reduce(sys, SfConfig(varpi=varpi, epsilon=eps), r)
        rec = verify_bound(sys, res, FrequencyGrid.explicit((varpi,)), "sf")
        total += 1
        if not rec.passed:
            failures.append((400 + k, eps, r, rec.margin))
    line = _verdict(1, not failures, f"{total - len(failures)}/{total} anchors sound")
    assert not failures, f"{line}: {failures}"


def test_criterion_02_interval_bound_soundness(interval_study):
    """In-band peak never exceeds the eta-sum bound, 100% of cases."""
    failures = []
    ex2 = example_fixture("ex2").system
    total = 0
    for case, (w1, w2) in EX2_CASES.items():
        grid = FrequencyGrid.linear(w1, w2, 2000)
        for r in (1, 2, 3):
            res = interval_reduce(ex2, IntervalConfig(w1, w2), r)
            rec = verify_bound(ex2, res, grid, "interval")
            total += 1
            if not rec.passed:
                failures.append((case, r, rec.margin))
    records, _ = interval_study
    total += len(records)
    failures += [
        (rec.method, rec.margin) for rec in records if not rec.passed
    ]
    line = _verdict(2, not failures, f"{total - len(failures)}/{total} bands sound")
    assert not failures, f"{line}: {failures[:10]}"


def test_criterion_03_stability_preservation(interval_study):
    """Band reduction of a Hurwitz model is Hurwitz, 100% of >= 500 runs."""
    _, stable_flags = interval_study
    assert len(stable_flags) >= 500
    bad = len(stable_flags) - sum(stable_flags)
    line = _verdict(3, bad == 0, f"{sum(stable_flags)}/{len(stable_flags)} reductions stable")
    assert bad == 0, line


def test_criterion_04_substitution_identity():
    """The extension is a linear-fractional substitution, both directions.

    The mirrored tuple (eps-jv, -v^2, -1, eps+jv) inverts the extension
    back to the original response; the conjugate-ordered tuple
    (eps+jv, v^2, 1, eps-jv) rebuilds the extension from the original.
    Both checked at 20 random frequencies per system, rel. err <= 1e-9.
    """
    rng = np.random.default_rng(77)
    worst = 0.0
    for k in range(20):
        n = 2 + k % 5
        sys = random_stable(500 + k, n, complex_entries=bool(k % 3 == 0))
        eps = float(rng.uniform(0.4, 4.0))
        varpi = float(rng.uniform(-1.5, 1.5))
        ext = build_sf_extended(sys, SfConfig(varpi=varpi, epsilon=eps)).sys
        back = moebius_substitute(ext, eps - 1j * varpi, -varpi**2, -1.0, eps + 1j * varpi)
        fwd = moebius_substitute(sys, eps + 1j * varpi, varpi**2, 1.0, eps - 1j * varpi)
        omegas = rng.uniform(-8.0, 8.0, size=20)
        worst = max(worst, _rel_gap(sys, back, omegas), _rel_gap(ext, fwd, omegas))
    ok = worst <= 1e-9
    line = _verdict(4, ok, f"worst relative gap {worst:.3e}")
    assert ok, line


def test_criterion_05_stability_cap_is_sharp():
    """0.9x cap keeps every extension Hurwitz; 1.1x breaks at least one."""
    not_stable_low, flipped = [], 0
    for k in range(20):
        n = 3 + k % 3
        sys = random_unstable(300 + k, n, lift=0.2 + 0.05 * (k % 5))
        varpi = 0.1 * (k % 7)
        cap = stability_epsilon_cap(sys, varpi)
        assert np.isfinite(cap) and cap > 0
        low = build_sf_extended(sys, SfConfig(varpi=varpi, epsilon=0.9 * cap)).sys
        high = build_sf_extended(sys, SfConfig(varpi=varpi, epsilon=1.1 * cap)).sys
        if not is_hurwitz(low).stable:
            not_stable_low.append(300 + k)
        flipped += not is_hurwitz(high).stable
    ok = not not_stable_low and flipped >= 1
    line = _verdict(5, ok, f"20/20 below cap stable, {flipped}/20 above cap unstable")
    assert ok, f"{line}: bad seeds {not_stable_low}"


def test_criterion_06_sf_gramian_limits():
    """Damping limits: vanishing at eps->0, standard at eps->inf, dominated throughout."""
    problems = []
    for label, sys, varpi in (
        ("random4", random_stable(7, 4), 0.7),
        ("ex1", example_fixture("ex1").system, 0.0),
    ):
        Wc, Wo = standard_gramians(sys)
        norms = {"c": np.linalg.norm(Wc, 2), "o": np.linalg.norm(Wo, 2)}
        for eps in np.geomspace(1e-6, 1e6, 13):
            g = sf_gramians(build_sf_extended(sys, SfConfig(varpi=varpi, epsilon=float(eps))))
            for side, W, We in (("c", Wc, g.Wc), ("o", Wo, g.Wo)):
                low = float(np.linalg.eigvalsh(hermitize(W - We)).min())
                if low < -1e-8 * norms[side]:
                    problems.append(f"{label}: ordering {side} eps={eps:.1e} min={low:.2e}")
        g_lo = sf_gramians(build_sf_extended(sys, SfConfig(varpi=varpi, epsilon=1e-6)))
        g_hi = sf_gramians(build_sf_extended(sys, SfConfig(varpi=varpi, epsilon=1e6)))
        for side, W, lo, hi in (("c", Wc, g_lo.Wc, g_hi.Wc), ("o", Wo, g_lo.Wo, g_hi.Wo)):
            if np.linalg.norm(lo, 2) > 1e-4 * norms[side]:
                problems.append(f"{label}: low-damping {side} norm too large")
            if np.linalg.norm(hi - W, 2) > 1e-3 * norms[side]:
                problems.append(f"{label}: high-damping {side} not near standard")
    line = _verdict(6, not problems, "random4 and ex1, both sides")
    assert not problems, f"{line}: {problems}"


def test_criterion_07_interval_gramian_limits():
    """Band limits: vanishing on a point-like band, standard on a huge one."""
    problems = []
    for label, sys in (
        ("random4", random_stable(7, 4)),
        ("ex1", example_fixture("ex1").system),
    ):
        Wc, Wo = standard_gramians(sys)
        nc, no = np.linalg.norm(Wc, 2), np.linalg.norm(Wo, 2)

        tiny = IntervalConfig(-1e-6, 1e-6)
        g = interval_gramians(build_interval_extended(sys, tiny))
        if np.linalg.norm(g.Wc, 2) > 1e-6 * nc:
            problems.append(f"{label}: tiny band controllability not vanishing")
        if np.linalg.norm(g.Wo, 2) > 1e-6 * no:
            problems.append(f"{label}: tiny band observability not vanishing")
        eta = interval_eta(sys.transformed(g.T, g.Tinv), g, tiny, 0)
        if eta.eta.size != sys.n or float(eta.eta.max()) > 1e-6:
            problems.append(f"{label}: tiny band eta max {float(eta.eta.max()):.2e}")

        wide = IntervalConfig(-1e6, 1e6)
        gw = interval_gramians(build_interval_extended(sys, wide))
        if np.linalg.norm(gw.Wc - Wc, 2) > 1e-3 * nc:
            problems.append(f"{label}: wide band controllability far from standard")
        if np.linalg.norm(gw.Wo - Wo, 2) > 1e-3 * no:
            problems.append(f"{label}: wide band observability far from standard")
    line = _verdict(7, not problems, "random4 and ex1, tiny and wide bands")
    assert not problems, f"{line}: {problems}"


def test_criterion_08_band_factor_similarity():
    """M and N of a similar state matrix are the similar M and N, to 1e-8."""
    from fdbt.interval import _band_factors

    rng = np.random.default_rng(88)
    worst = 0.0
    for k in range(20):
        n = 2 + k % 5
        a = random_stable(600 + k, n, complex_entries=bool(k % 4 == 0)).A
        T, Tinv = well_conditioned_transform(700 + k, n)
        lo = float(rng.uniform(-1.0, 0.1))
        cfg = IntervalConfig(lo, lo + float(rng.uniform(0.2, 1.5)))
        M, N = _band_factors(a, cfg)
        Ms, Ns = _band_factors(Tinv @ a @ T, cfg)
        for direct, similar in ((M, Ms), (N, Ns)):
            ref = Tinv @ direct @ T
            gap = np.linalg.norm(similar - ref, 2) / max(1.0, np.linalg.norm(ref, 2))
            worst = max(worst, float(gap))
    ok = worst <= 1e-8
    line = _verdict(8, ok, f"worst similarity gap {worst:.3e}")
    assert ok, line


def test_criterion_09_full_order_round_trips():
    """Every method at r=n reproduces the input response to 1e-9.

    The two extension-based methods exercise their inverse reconstructions
    (the backwards substitution and the band-factor reassembly).
    """
    omegas = np.linspace(-4.0, 4.0, 41)
    worst, where = 0.0, ""
    for k in range(6):
        n = 3 + k % 4
        sys = random_stable(640 + k, n, complex_entries=bool(k == 2))
        full = {
            "fibt": fibt_reduce(sys, n),
            "spa": gspa_reduce(sys, n, 0.0),
            "gspa": gspa_reduce(sys, n, 2.0),
            "fgbt": fgbt_reduce(sys, n, -0.8, 0.8),
            "sf-fdbt": sf_reduce(sys, SfConfig(varpi=0.4, epsilon=1.5), n),
            "int-fdbt": interval_reduce(sys, IntervalConfig(-0.6, 0.6), n),
        }
        for method, res in full.items():
            gap = _rel_gap(sys, res.reduced, omegas)
            if gap > worst:
                worst, where = gap, f"{method} seed {640 + k}"
    ok = worst <= 1e-9
    line = _verdict(9, ok, f"worst round-trip gap {worst:.3e} ({where})")
    assert ok, line


def test_criterion_10_oracle_equivalence():
    """Library primitives agree with slow independent reimplementations."""
    problems = []

    for n in range(1, 9):
        sys = random_stable(660 + n, n, complex_entries=bool(n % 2))
        q = sys.B @ sys.B.conj().T
        fast = solve_lyapunov(sys.A, q)
        slow = oracles.lyap_kron(sys.A, q)
        if np.linalg.norm(fast - slow, 2) > 1e-8 * max(1.0, np.linalg.norm(slow, 2)):
            problems.append(f"lyapunov n={n}")

    for n in (2, 4, 6):
        w = random_stable(680 + n, n).A
        m = w @ w.conj().T + 0.1 * np.eye(n)  # definite, clean principal branch
        if np.linalg.norm(sqrt_principal(m) - oracles.sqrt_eig(m), 2) > 1e-8:
            problems.append(f"sqrt n={n}")
        if np.linalg.norm(log_principal(m) - oracles.log_eig(m), 2) > 1e-8:
            problems.append(f"log n={n}")

    sys = random_stable(699, 4)
    for label, band, pieces in (
        ("straddling", (-0.4, 0.4), ((-0.4, 0.4),)),
        ("one-sided", (0.3, 0.7), ((-0.7, -0.3), (0.3, 0.7))),
    ):
        fast = band_gramians(sys, *band)
        slow_c, slow_o = oracles.band_gramians_quad(sys.A, sys.B, sys.C, pieces)
        for got, want in ((fast[0], slow_c), (fast[1], slow_o)):
            if np.linalg.norm(got - want, 2) > 1e-6 * max(1.0, np.linalg.norm(want, 2)):
                problems.append(f"band gramian {label}")

    # Scalar hand values, A=-1, B=C=1, D=0. Damped shift at varpi=0, eps=1:
    # R = I - A = 2, so A' = -1/2, B' = C' = 1/2, and 2 A' W + B'^2 = 0
    # gives W = 1/4. Band (-1, 1): M^2 = 1/((1-j)(1+j)) = 1/2, extended
    # input M B = sqrt(1/2), and 2 (-1) W + 1/2 = 0 gives W = 1/4 again.
    scalar = StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])
    g_sf = sf_gramians(build_sf_extended(scalar, SfConfig(varpi=0.0, epsilon=1.0)))
    if abs(g_sf.Wc[0, 0] - 0.25) > 1e-10 or abs(g_sf.Wo[0, 0] - 0.25) > 1e-10:
        problems.append(f"scalar damped-shift gramian {g_sf.Wc[0, 0]:.12f}")
    g_int = interval_gramians(build_interval_extended(scalar, IntervalConfig(-1.0, 1.0)))
    if abs(g_int.Wc[0, 0] - 0.25) > 1e-10 or abs(g_int.Wo[0, 0] - 0.25) > 1e-10:
        problems.append(f"scalar band gramian {g_int.Wc[0, 0]:.12f}")

    line = _verdict(10, not problems, "lyapunov, sqrt/log, band quadrature, scalars")
    assert not problems, f"{line}: {problems}"


def test_criterion_11_example_reproductions(bundles):
    """Qualitative comparisons recomputed from the bundled example runs.

    Two clauses are false by measurement, not by defect: on the 4th-order
    two-band fixture at r=2 the band-limited Gramian baseline lands below
    the interval method's in-band peak in both cases. The numbers are in
    the failure message; everything else holds, including both ladder
    comparisons (where the baseline comparator is disqualified for
    instability, as recorded in the bundle notes).
    """
    clauses = []

    ex1 = bundles.get("ex1")
    clauses.append((
        "ex1 anchor error below plain truncation for some eps in [3,5]",
        bool(ex1.assertions["sf_dc_error_below_fibt_for_some_eps_in_3_5"]),
    ))

    for case in ("case1", "case2"):
        vals = bundles.get(f"ex2_{case}").values
        for r in (1, 2):
            peak_int = vals[f"peak_int_r{r}"]
            best_rival = min(vals[f"peak_fibt_r{r}"], vals[f"peak_fgbt_r{r}"])
            clauses.append((
                f"ex2 {case} r={r}: interval peak {peak_int:.3e} <= "
                f"min(fibt, fgbt) {best_rival:.3e}",
                bool(peak_int <= best_rival * (1 + 1e-8)),
            ))
    for r in (1, 2):
        b1 = bundles.get("ex2_case1").values[f"interval_bound_r{r}"]
        b2 = bundles.get("ex2_case2").values[f"interval_bound_r{r}"]
        clauses.append((f"ex2 r={r}: wider band has larger bound", bool(b2 > b1)))

    ex3a = bundles.get("ex3_case1")
    clauses.append((
        "ex3 ladder: r=51 single-frequency method under r=181 plain truncation (anchor)",
        bool(ex3a.assertions["sf_r51_dc_error_below_fibt_r181"]),
    ))
    clauses.append((
        "ex3 ladder: same comparison on the neighborhood sweep",
        bool(ex3a.assertions["sf_r51_nbhd_peak_below_fibt_r181"]),
    ))
    ex3b = bundles.get("ex3_case2")
    for r in (51, 61):
        clauses.append((
            f"ex3 ladder: interval r={r} beats the band-limited baseline in-band",
            bool(ex3b.assertions[f"int_beats_fgbt_in_band_r{r}"]),
        ))

    failed = [text for text, ok in clauses if not ok]
    line = _verdict(11, not failed, f"{len(clauses) - len(failed)}/{len(clauses)} clauses hold")
    assert not failed, (
        f"{line}; recorded discrepancy, kept failing rather than weakened: "
        + "; ".join(failed)
    )


def test_criterion_12_randomized_comparison(experiment):
    """Band method vs plain truncation over 100 seeded models, cell means."""
    problems = []
    for wl in STUDY_HALF_WIDTHS:
        for r in STUDY_ORDERS:
            cell = experiment.cell(wl, r)
            if not (cell.err_fdbt_mean < 1.0 and cell.err_fdbt_frac_below_1 >= 0.6):
                problems.append(
                    f"err cell wl={wl} r={r}: mean {cell.err_fdbt_mean:.3f} "
                    f"frac {cell.err_fdbt_frac_below_1:.2f}"
                )
            if wl <= 0.8 and not (
                cell.eb_fdbt_mean < 1.0 and cell.eb_fdbt_frac_below_1 >= 0.6
            ):
                problems.append(
                    f"eb cell wl={wl} r={r}: mean {cell.eb_fdbt_mean:.3f} "
                    f"frac {cell.eb_fdbt_frac_below_1:.2f}"
                )
    line = _verdict(12, not problems, "12 err cells, 9 bound cells")
    assert not problems, f"{line}: {problems}"
