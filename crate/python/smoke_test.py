#!/usr/bin/env python3
"""Smoke test for the shocklab_py extension module.

Builds the cdylib with cargo if needed, loads it, and exercises the main
types and operations end to end. Exits nonzero on the first failure.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    lib = REPO / "target" / "release" / "libshocklab_py.so"
    print("building shocklab-python (cargo build --release) ...")
    subprocess.run(
        ["cargo", "build", "--release", "-p", "shocklab-python"],
        cwd=REPO,
        check=True,
    )
    if not lib.exists():
        sys.exit("extension library not found after build")
    stage = Path(tempfile.mkdtemp(prefix="shocklab_py_"))
    shutil.copy2(lib, stage / "shocklab_py.so")
    return stage


FAILURES = []


def check(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[smoke] {name}: {status} {detail}")
    if not ok:
        FAILURES.append(name)


def main():
    sys.path.insert(0, str(build_extension()))
    import shocklab_py as sl

    gamma = 5.0 / 3.0
    params = sl.ModelParams(gamma)

    # Equation of state spot values.
    check("pressure identity point", sl.ModelParams(2.0).pressure(1.0) == 1.0)
    p09 = params.pressure(0.9)
    check(
        "pressure gamma-law value",
        abs(p09 - math.exp(gamma * math.log(1 / 0.9))) < 1e-14,
        f"p(0.9) = {p09:.6f}",
    )
    eta = sl.ModelParams(2.0).rel_entropy_density(2.0, 1.0, 1.0, 0.0)
    check("relative entropy density", abs(eta - 1.0) < 1e-14, f"eta = {eta}")

    # Shock data: speed, strength, jump-relation residuals.
    shock = sl.shock_from_right(params, 1.0, 0.0, 0.1)
    sigma_expect = math.sqrt((p09 - 1.0) / 0.1)
    check(
        "shock speed",
        abs(shock.sigma - sigma_expect) < 1e-14,
        f"sigma = {shock.sigma:.6f}",
    )
    r1, r2 = shock.rh_residuals(params)
    check("jump-relation residuals", abs(r1) < 1e-12 and abs(r2) < 1e-12, f"({r1:.2e}, {r2:.2e})")
    check("C* positive", shock.c_star > 0.0, f"C* = {shock.c_star:.5f}")
    ident = shock.sigma_ell**3 * shock.alpha_ell - (1 + gamma) / (2 * shock.v_minus)
    check("sigma_ell^3 alpha_ell identity", abs(ident) < 1e-12, f"residual {ident:.2e}")

    # Traveling-wave profile: monotonicity, weight bounds, tail decay.
    profile = sl.solve_profile(params, 1.0, 0.0, 0.1, n_samples=1024)
    v = profile.v_tilde
    check("profile strictly increasing", all(b > a for a, b in zip(v, v[1:])))
    check(
        "far-field misfit",
        max(profile.far_field_misfit) <= 1e-9,
        f"misfit = {profile.far_field_misfit}",
    )
    a, a_x = profile.weight()
    sd = math.sqrt(profile.delta)
    check(
        "weight bounds",
        all(1.0 - 1e-15 <= ai <= 1.0 + sd + 1e-15 for ai in a) and all(x > 0 for x in a_x),
    )
    slope, r2fit = profile.tail_fit()
    check("tail log-linear", slope < 0 and r2fit >= 0.999, f"slope {slope:.4f}, r2 {r2fit:.6f}")

    # Weighted Poincare inequality: equality for f(y) = y.
    n = 10001
    lhs, rhs = sl.poincare_check([i / (n - 1) for i in range(n)])
    check(
        "poincare affine equality",
        abs(lhs - 1 / 12) < 1e-6 and abs(rhs - 1 / 12) < 1e-6,
        f"lhs {lhs:.8f}, rhs {rhs:.8f}",
    )

    # Leading coefficient of the relative-pressure bound.
    pr, plim, qr, qlim = sl.relative_bound_coefficients(params, 0.9 + 1e-3, 0.9)
    check(
        "relative bound coefficients",
        abs(pr / plim - 1) < 0.05 and abs(qr / qlim - 1) < 0.05,
        f"p {pr:.4f}/{plim:.4f}, q {qr:.4f}/{qlim:.4f}",
    )

    # A short desk-scale run through the scenario layer.
    text = sl.default_scenario()
    text = text.replace("n_cells = 8192", "n_cells = 1024")
    text = text.replace("t_end = 200", "t_end = 10")
    text = text.replace("snapshot_every = 50", "snapshot_every = 0")
    summary = sl.run_scenario(text)
    check("run completed", summary.completed, f"{summary.steps} steps, {summary.ticks} ticks")
    check(
        "weighted relative entropy decreased",
        summary.a_re_last < summary.a_re_first,
        f"{summary.a_re_first:.3e} -> {summary.a_re_last:.3e}",
    )
    check(
        "contraction slack small",
        summary.contraction_slack <= 1e-3 * summary.a_re_first,
        f"slack {summary.contraction_slack:.2e}",
    )
    check("h1 size near 0.01", 0.005 < summary.h1_initial < 0.02, f"h1 = {summary.h1_initial:.4f}")

    # Determinism of the whole pipeline.
    again = sl.run_scenario(text)
    check(
        "bitwise deterministic rerun",
        again.a_re_last == summary.a_re_last and again.x_final == summary.x_final,
    )

    if FAILURES:
        sys.exit(f"{len(FAILURES)} smoke checks failed: {', '.join(FAILURES)}")
    print(f"[smoke] all checks passed")


if __name__ == "__main__":
    main()
