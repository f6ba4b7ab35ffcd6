"""End-to-end acceptance checks, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest
from analytic import HELIX, TEST_CURVES, TWISTED_CUBIC, TWISTED_POWER

from affine_curves import (
    CurveJet,
    NaturalEquations,
    apply,
    arc_length_curve,
    classify_case,
    closed_form,
    estimate_jet,
    expm,
    frenet_matrix,
    generate_canonical,
    jet_signature,
    maurer_cartan_pullback,
    random_map,
    reconstruct_curve,
    roundtrip_constants,
    signature,
    unimodular_frame,
    verify_equivalence,
)
from affine_curves.canonical import canonical_frames
from affine_curves.curve_model import det3
from affine_curves.numerics import fd_weights
from affine_curves.reconstruction import alignment_from_jets

SAMPLES = 400
SAMPLED_TOL = 1e-3
ANALYTIC_TOL = 1e-9
INVARIANCE_MAPS = 100
INVARIANCE_SECONDS = 30.0
CLASSIFY_TOL = 1e-2
CLASSIFY_SECONDS = 10.0
CLOSED_FORM_TOL = 1e-9
SPOT_TOL = 1e-6
EQUIVALENCE_MAPS = 20
MAP_TOL_SAMPLED = 1e-3
MAP_TOL_ANALYTIC = 1e-6
DISTINCT_DISTANCE = 0.9
RECONSTRUCTION_TOL = 1e-2
FRAME_DET_TOL = 1e-9
TRACE_TOL = 1e-9
REPARAM_DET_TOL = 1e-3
ODE_TOL = 1e-4


def report(label: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    capture = _capture[0]
    if capture is None:
        print(line)
    else:
        with capture.disabled():
            print("\n" + line)


_capture: list = [None]


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    _capture[0] = capsys
    yield
    _capture[0] = None


def mapped_jet(jet: CurveJet, b: np.ndarray) -> CurveJet:
    return CurveJet(jet.params, jet.d1 @ b.T, jet.d2 @ b.T, jet.d3 @ b.T, jet.d4 @ b.T)


def test_signature_invariance():
    start = time.perf_counter()
    sampled, analytic = 0.0, 0.0
    for curve in TEST_CURVES:
        c = curve.sampled(SAMPLES)
        base = signature(c)
        jet = curve.jet(np.linspace(*curve.span, 31))
        exact = jet_signature(jet)
        for seed in range(INVARIANCE_MAPS):
            m = random_map(seed)
            sig = signature(apply(m, c))
            sampled = max(sampled, np.max(np.abs(sig.chi1 - base.chi1)), np.max(np.abs(sig.chi2 - base.chi2)))
            moved = jet_signature(mapped_jet(jet, m.B))
            analytic = max(analytic, np.max(np.abs(moved.chi1 - exact.chi1)), np.max(np.abs(moved.chi2 - exact.chi2)))
    elapsed = time.perf_counter() - start
    ok = sampled <= SAMPLED_TOL and analytic <= ANALYTIC_TOL and elapsed <= INVARIANCE_SECONDS
    report(
        "1 invariance",
        ok,
        f"5 curves x {INVARIANCE_MAPS} maps, sampled max {sampled:.2e} (<= {SAMPLED_TOL:g}), "
        f"analytic max {analytic:.2e} (<= {ANALYTIC_TOL:g}), {elapsed:.1f}s (<= {INVARIANCE_SECONDS:g}s)",
    )
    assert ok


def test_canonical_classification():
    start = time.perf_counter()
    failures, worst = [], 0.0
    for c1, c2 in itertools.product([-1.0, 0.0, 1.0], repeat=2):
        r1, r2 = roundtrip_constants(c1, c2, 3.0, SAMPLES)
        worst = max(worst, abs(r1 - c1), abs(r2 - c2))
        if classify_case(r1, r2, eps=CLASSIFY_TOL) != classify_case(c1, c2):
            failures.append((c1, c2, str(classify_case(r1, r2, eps=CLASSIFY_TOL))))
    elapsed = time.perf_counter() - start
    ok = not failures and worst <= CLASSIFY_TOL and elapsed <= CLASSIFY_SECONDS
    report(
        "2 classification",
        ok,
        f"9 sign patterns, misclassified {failures or 'none'}, constants max err {worst:.2e} "
        f"(<= {CLASSIFY_TOL:g}), {elapsed:.1f}s (<= {CLASSIFY_SECONDS:g}s)",
    )
    assert ok


def _cube_root_frame(chi1: float, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Frame and curve of the chi2 = 0 cases written out from M, N, R.

    For chi1 < 0 the same expressions hold with b = |chi1|^(1/3) and
    M = e^(bs/2) cos(sqrt3 b s / 2), N = -e^(bs/2) sin(sqrt3 b s / 2), R = e^(-bs),
    which is the chi1 > 0 form evaluated at the negative real cube root.
    """
    r3 = np.sqrt(3.0)
    if chi1 > 0:
        a = chi1 ** (1 / 3)
        m = np.exp(-a * s / 2) * np.cos(r3 / 2 * a * s)
        n = np.exp(-a * s / 2) * np.sin(r3 / 2 * a * s)
        r = np.exp(a * s)
    else:
        b = abs(chi1) ** (1 / 3)
        m = np.exp(b * s / 2) * np.cos(r3 / 2 * b * s)
        n = -np.exp(b * s / 2) * np.sin(r3 / 2 * b * s)
        r = np.exp(-b * s)
        a = -b
    diag = 2 * m / 3 + r / 3
    p, q = r3 * n - m + r, r3 * n + m - r
    frame = np.array(
        [
            [diag, -a / 3 * q, a * a / 3 * p],
            [p / (3 * a), diag, -a / 3 * q],
            [-q / (3 * a * a), p / (3 * a), diag],
        ]
    )
    curve = np.array([p / (3 * a), (-r3 * n - m + r) / (3 * a * a), (2 * m + r) / (3 * chi1)])
    return frame, curve


def test_closed_form_agreement():
    s = np.linspace(0.0, 3.0, 301)
    worst_exact = 0.0
    for c2 in (0.0, 1.0, 2.5, -1.0, -0.4):
        frame, _ = closed_form(0.0, c2, s)
        expected = canonical_frames(0.0, c2, s)
        worst_exact = max(worst_exact, float(np.max(np.abs(frame - expected))))
    worst_spot = 0.0
    spots = (0.5, 1.0, 2.0)
    for c1 in (1.0, 2.0, -1.0, -3.0):
        c = generate_canonical(c1, 0.0, 2.0, 401)
        f = canonical_frames(c1, 0.0, np.array(spots))
        for k, sigma in enumerate(spots):
            frame, curve = _cube_root_frame(c1, sigma)
            _, origin = _cube_root_frame(c1, 0.0)
            i = int(round(sigma / 0.005))
            worst_spot = max(
                worst_spot,
                float(np.max(np.abs(f[k] - frame))),
                float(np.max(np.abs(c.points[i] - (curve - origin)))),
            )
    ok = worst_exact <= CLOSED_FORM_TOL and worst_spot <= SPOT_TOL
    report(
        "3 closed forms",
        ok,
        f"cases I-III max {worst_exact:.2e} (<= {CLOSED_FORM_TOL:g}), "
        f"cases IV-V at sigma in {spots} max {worst_spot:.2e} (<= {SPOT_TOL:g})",
    )
    assert ok


def test_equivalence_round_trip():
    failures, sampled_err, analytic_err = [], 0.0, 0.0
    for curve in TEST_CURVES:
        c = curve.sampled(SAMPLES)
        jet = curve.jet([0.0])
        point = curve.derivs(np.array([0.0]))[0, 0]
        for seed in range(EQUIVALENCE_MAPS):
            a = random_map(1000 + seed)
            rep = verify_equivalence(c, apply(a, c), SAMPLED_TOL)
            if not rep.equivalent:
                failures.append((curve.name, seed))
                continue
            sampled_err = max(sampled_err, float(np.max(np.abs(rep.map.B - a.B))))
            m = alignment_from_jets(jet, point, mapped_jet(jet, a.B), a(point))
            analytic_err = max(analytic_err, float(np.max(np.abs(m.B - a.B))))
    distinct = verify_equivalence(TWISTED_CUBIC.sampled(SAMPLES), HELIX.sampled(SAMPLES), SAMPLED_TOL)
    ok = (
        not failures
        and sampled_err <= MAP_TOL_SAMPLED
        and analytic_err <= MAP_TOL_ANALYTIC
        and not distinct.equivalent
        and distinct.distance >= DISTINCT_DISTANCE
    )
    report(
        "4 equivalence",
        ok,
        f"{EQUIVALENCE_MAPS} maps x 5 curves, rejected {failures or 'none'}, "
        f"B err sampled {sampled_err:.2e} (<= {MAP_TOL_SAMPLED:g}) analytic {analytic_err:.2e} (<= {MAP_TOL_ANALYTIC:g}); "
        f"cubic vs helix equivalent={distinct.equivalent} distance {distinct.distance:.4f} (>= {DISTINCT_DISTANCE:g})",
    )
    assert ok


def test_reconstruction_fidelity():
    results = {}
    for curve in TEST_CURVES:
        c = curve.sampled(SAMPLES)
        back = reconstruct_curve(NaturalEquations.from_signature(signature(c)))
        rep = verify_equivalence(back, c, RECONSTRUCTION_TOL)
        results[curve.name] = (rep.equivalent, rep.distance)
    ok = all(eq for eq, _ in results.values())
    detail = ", ".join(f"{k} {'ok' if eq else 'NO'} ({d:.1e})" for k, (eq, d) in results.items())
    report("5 reconstruction", ok, f"tol {RECONSTRUCTION_TOL:g}: {detail}")
    assert ok


def _generic_jet(t):
    # c(t) = (t, t^2/2 + 0.1 t^4, t^3/6 + 0.2 sin t), nondegenerate on [0, 0.8]
    t = np.asarray(t, float)
    z, o = np.zeros_like(t), np.ones_like(t)
    return CurveJet(
        t,
        np.stack([o, t + 0.4 * t**3, t**2 / 2 + 0.2 * np.cos(t)], -1),
        np.stack([z, 1 + 1.2 * t**2, t - 0.2 * np.sin(t)], -1),
        np.stack([z, 2.4 * t, 1 - 0.2 * np.cos(t)], -1),
        np.stack([z, 2.4 * o, 0.2 * np.sin(t)], -1),
    )


def test_structural_invariants():
    rng = np.random.default_rng(20)
    frame_err, trace_err, pattern_ok = 0.0, 0.0, True
    jets = [curve.jet(np.linspace(*curve.span, 25)) for curve in TEST_CURVES]
    jets.append(_generic_jet(np.linspace(0, 0.8, 25)))
    for _ in range(50):
        v = rng.normal(size=(4, 3))
        if det3(v[0], v[1], v[2]) < 0:
            v[0] = -v[0]
        jets.append(CurveJet([0.0], v[0:1], v[1:2], v[2:3], v[3:4]))
    for jet in jets:
        for i in range(len(jet)):
            frame_err = max(frame_err, abs(unimodular_frame(jet, i).det - 1))
            m = maurer_cartan_pullback(jet, i).matrix
            trace_err = max(trace_err, abs(np.trace(m)) / max(1.0, np.abs(m).max()))
            pattern_ok &= m[1, 0] == 1 and m[2, 1] == 1 and m[0, 1] == 0 and m[2, 0] == 0
    reparam_err = 0.0
    for curve in [TWISTED_POWER] + TEST_CURVES:
        g = arc_length_curve(curve.sampled(SAMPLES))
        reparam_err = max(reparam_err, float(np.max(np.abs(estimate_jet(g).det() - 1)[3:-3])))
    t = np.linspace(0.1, 0.7, 13)
    target = _generic_jet(t)
    target = det3(target.d1, target.d2, target.d4)
    slope_err = []
    for h in (1e-2, 5e-3):
        hi, lo = _generic_jet(t + h), _generic_jet(t - h)
        slope = (hi.det() - lo.det()) / (2 * h)
        slope_err.append(float(np.max(np.abs(slope - target))))
    order = np.log2(slope_err[0] / slope_err[1])
    ok = frame_err <= FRAME_DET_TOL and trace_err <= TRACE_TOL and pattern_ok and reparam_err <= REPARAM_DET_TOL and order > 1.8
    report(
        "6 structure",
        ok,
        f"frame det err {frame_err:.1e} (<= {FRAME_DET_TOL:g}), pullback trace {trace_err:.1e} (<= {TRACE_TOL:g}) "
        f"pattern {'ok' if pattern_ok else 'BROKEN'}, arc-length det err {reparam_err:.1e} (<= {REPARAM_DET_TOL:g}), "
        f"d/dt det order {order:.2f} (~2)",
    )
    assert ok


def test_frame_ode_residual():
    h = 0.04
    taps = np.arange(-4, 5)
    w = {k: fd_weights(tuple(taps), k) for k in (1, 2, 4)}
    s = np.linspace(0.0, 3.0, 61)
    worst = 0.0
    for c1, c2 in itertools.product(np.linspace(-2, 2, 9), repeat=2):
        y = expm((s[:, None] + h * taps)[..., None, None] * frenet_matrix(c1, c2))[..., 0]
        d = {k: np.einsum("j,ijc->ic", w[k], y) / h**k for k in w}
        worst = max(worst, float(np.max(np.abs(d[4] + c2 * d[2] - c1 * d[1]))))
    ok = worst <= ODE_TOL
    report("7 ODE", ok, f"81 pairs |chi| <= 2, sigma <= 3, max residual {worst:.2e} (<= {ODE_TOL:g})")
    assert ok


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
