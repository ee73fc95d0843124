"""Smoke test for the star_forge extension module.

Build and install first, e.g.
    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
then run `python python/smoke_test.py`.
"""

import json

import star_forge as sf


def series(p, text):
    return sf.Series(p, text)


def main():
    p = sf.Profile.desk()
    assert str(p) == "6,4,6,2"
    assert sf.Profile.parse("4,3,4,3").dim == 3
    try:
        sf.Profile(17, 4, 6, 2)
        raise AssertionError("profile bound not enforced")
    except ValueError:
        pass

    # series arithmetic and canonical text
    a = series(p, "1 h^0 + 1/2 h^1 x^(1,0)")
    assert str(a * a.invert()) == "1/1+0/1*i h^0 x^(0,0)"
    assert series(p, str(a)) == a
    assert (a - a).is_zero()
    assert str(a.deriv(1)) == "1/2+0/1*i h^1 x^(0,0)"

    # Moyal: [x1, x2]_* = 2(hbar + hbar^3) for pi = (hbar + hbar^3) J
    m = sf.Moyal(p, {(1, 2): "1 h^1 + 1 h^3"})
    x1, x2 = series(p, "1 x^(1,0)"), series(p, "1 x^(0,1)")
    assert m.mul(x1, x2) - m.mul(x2, x1) == series(p, "2 h^1 + 2 h^3")
    assert m.assoc_residual(x1 * x2, x2, x1 * x1).is_zero()
    assert m.mc_residual_terms() == 0
    try:
        sf.Moyal(p, {(1, 2): "1 h^1", (2, 1): "1 h^1"})
        raise AssertionError("non-antisymmetric pi accepted")
    except ValueError as e:
        assert "antisymmetric" in str(e)

    # gauge action: a(B, hbar J) with B = b dx1^dx2 is hbar/(1 - b hbar) J
    closed = {(1, 2): " + ".join(f"{2 ** (k - 1)} h^{k}" for k in range(1, 7))}
    neumann = sf.gauge(p, {(1, 2): "2"}, {(1, 2): "1 h^1"})
    ode = sf.gauge_ode(p, {(1, 2): "2"}, {(1, 2): "1 h^1"})
    assert neumann == ode
    assert neumann[(1, 2)] == str(series(p, closed[(1, 2)]))

    # Fedosov: flat connection reproduces Moyal, a curved one has nonzero r
    flat = sf.Fedosov(p, {(1, 2): "1 h^1"})
    assert flat.r == "0" and flat.class_residual_terms() == 0
    moyal = sf.Moyal(p, {(1, 2): "1 h^1"})
    assert flat.star(x1, x2) == moyal.mul(x1, x2)
    curved = sf.Fedosov(
        p,
        {(1, 2): "1 h^1"},
        {(1, 1, 1): "1", (1, 2, 2): "1 x^(1,0)", (2, 1, 1): "-1 x^(0,1)", (2, 1, 2): "-1"},
    )
    assert curved.r != "0"
    assert curved.certificate_terms() == 0 and curved.class_residual_terms() == 0
    print("fedosov r has", curved.r.count(" + ") + 1, "terms;", curved.iterations, "iterations")

    # scenarios
    rep = sf.run_scenario("[fedosov]\npi 1 2 = 1 h^1\nmode = quantum\n")
    assert rep.passed and "\nclass_residual: 0 terms\n" in rep.text()
    assert json.loads(rep.json())["passed"] is True
    assert sf.canonical_scenario(sf.canonical_scenario("[ode]\nseed=3\n")) == sf.canonical_scenario("[ode]\nseed = 3\n")
    bad = sf.run_scenario("[transition-demo]\npi 1 2 = 1 h^1\nc 1 2 = 1\n")
    assert not bad.passed
    try:
        sf.run_scenario("[gauge]\nprofile = 4,3,4,3\npi 1 2 = 1 h^1\nb 1 2 = 1 x^(0,0,1)\n")
        raise AssertionError("non-closed B accepted")
    except ValueError as e:
        assert "dx(1,2,3)" in str(e)

    print("smoke test ok")


if __name__ == "__main__":
    main()
