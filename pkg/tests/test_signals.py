import numpy as np
import pytest

from whankel.grid import build_radial_grid
from whankel.signals import SignalSpec, gaussian, laguerre, laguerre_mix, raised_cosine, random_family


def test_family_is_seeded_and_cycles_kinds():
    a = random_family(9, 4)
    assert a == random_family(9, 4)
    assert a != random_family(9, 5)
    assert [s.kind for s in a[:3]] == ["gaussian", "laguerre_mix", "raised_cosine"]


def test_bumps_stay_inside_support_window():
    for spec in random_family(60, 0):
        if spec.kind == "raised_cosine":
            c, r = spec.params["center"], spec.params["radius"]
            assert c == 0.0 or c >= r
            assert c + r <= 6.0 + 1e-12


def test_raised_cosine_shape():
    bump = raised_cosine(2.0, 3.0)
    t = np.array([0.5, 1.0, 3.0, 5.0, 5.5])
    assert np.allclose(bump.evaluate(t), [0, 0, 1, 0, 0])


def test_laguerre_depends_on_order():
    t = np.linspace(0, 3, 5)
    assert not np.allclose(laguerre(2).evaluate(t, 0.0), laguerre(2).evaluate(t, 1.0))
    mix = laguerre_mix([0.0, 0.0, 1.0]).evaluate(t, 1.0)
    assert np.allclose(mix, laguerre(2).evaluate(t, 1.0))


def test_sample_and_label():
    g = build_radial_grid(0.5, 4.0, 4, 8)
    s = gaussian(0.75).sample(g)
    assert s.grid is g
    assert np.allclose(s.values, np.exp(-0.5 * (g.nodes / 0.75) ** 2))
    assert gaussian(0.75).label() == "gaussian(amplitude=1,width=0.75)"
    assert laguerre_mix([1.0, -0.5]).label() == "laguerre_mix(coefficients=[1,-0.5],scale=1)"
    assert SignalSpec("zero").to_dict() == {"kind": "zero"}


@pytest.mark.parametrize("bad", [lambda: SignalSpec("square"), lambda: gaussian(0.0), lambda: laguerre(-1),
                                 lambda: raised_cosine(-1.0)])
def test_validation(bad):
    with pytest.raises(ValueError):
        bad()
