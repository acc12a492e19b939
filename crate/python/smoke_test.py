"""Smoke test for the bandcorr extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/py`.
"""

import math

import bandcorr


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    p = bandcorr.BandProfile(16, 2.0)
    assert (p.n, p.w) == (16, 2.0)
    q = bandcorr.BandProfile.from_kappa(64, 1.0)
    assert q.w == 8.0 and close(q.kappa, 1.0, 1e-15)

    j = p.covariance()
    assert len(j) == 16
    assert all(close(sum(row), 1.0, 1e-12) for row in j)

    curve = bandcorr.ratio_curve(p, 0.0, [0.0, 0.5, -0.5], 200, seed=3)
    assert curve[0].ratio == 1.0
    assert curve[1].ratio == curve[2].ratio
    assert 0.0 < curve[1].ratio <= 1.0

    zeta = 0.5
    gin = bandcorr.ginibre_limit(zeta)
    fac = bandcorr.factorized_limit(zeta)
    crit = bandcorr.critical_limit(p.kappa_u(0.0), zeta)
    assert close(fac, math.exp(-2 * zeta**2), 1e-15)
    assert fac <= crit <= gin
    assert bandcorr.critical_limit(1.0, 0.0) == 1.0

    s = bandcorr.a_star_spectrum(1.0, 50.0)
    assert s["max_rel_err"] <= 1e-8

    # <1 - t_00> ~ 2 l(l+1) / (2 u*^2 W^2 trS) for large W
    a = bandcorr.su2_average(1, 80.0)
    assert close(a["one_minus_average"], 4.0 / (2 * 80.0**2 * 2.0), 1e-7)

    g = bandcorr.block_gate(7)
    assert g["ct1_holds"] and g["projection_holds"]

    try:
        bandcorr.BandProfile(0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("N = 0 accepted")

    print(f"bandcorr {bandcorr.__version__}: smoke test passed "
          f"(ratio {curve[1].ratio:.4f}, critical {crit:.4f})")


if __name__ == "__main__":
    main()
