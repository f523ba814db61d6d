import cmath
import math
from pathlib import Path

import numpy as np
import pytest

import bloch_green as bg

DATA = Path(__file__).resolve().parents[2] / "data"


def test_free_green_function():
    p = bg.free_potential(1.0)
    k = 0.7
    gs, gf = bg.green_exact(p, 0.9, 0.2, k)
    want = cmath.exp(1j * k * 0.7) / (2j * k)
    assert abs(gs - want) < 1e-12
    assert abs(gf - want) < 1e-12


def test_unimodular_and_vectorized_potential():
    p = bg.square_potential(1.0, 1.0, 0.6)
    U = bg.evolve(p, 0.4, -1.3, 2.1 + 0.2j)
    assert U.shape == (2, 2)
    assert abs(np.linalg.det(U) - 1) < 1e-12
    v = p.V(np.array([0.1, 0.7]))
    assert v.shape == (2,)
    assert v[0] != v[1]


def test_square_well_band_structure():
    p = bg.load_potential(str(DATA / "fig1_square.pot"))
    assert bg.classify_band(p, 0.5) == "band"
    assert bg.classify_band(p, 2.5) == "gap"
    gs, _ = bg.green_exact(p, 0.4, 0.1, 0.5)
    assert gs == pytest.approx(0.14943813247359922 - 1.5162104709361621j, rel=1e-9)


def test_series_leading_term():
    p = bg.square_potential(1.0, 1.0, 0.6)
    s = bg.green_series(p, 0.4, 0.1)
    assert s.gm1 == pytest.approx(0.5 * math.exp(bg.cell_constants(p)["V0"]), rel=1e-12)
    exact, _ = bg.green_exact(p, 0.4, 0.1, 0.05)
    assert abs(s.eval(0.05) - exact) < 1e-3 * abs(exact)


def test_errors_are_python_exceptions():
    p = bg.free_potential(1.0)
    with pytest.raises(ValueError):
        bg.green_exact(p, 0.1, 0.2, 0.0)
    with pytest.raises(bg.ConfigError):
        bg.parse_potential("period 1\nnonsense")


def test_render_matches_cli_header():
    text = bg.render(str(DATA / "fig1_square.pot"), "bands", n=5)
    assert text.startswith("# bloch-green v" + bg.version)
    assert text == bg.render(str(DATA / "fig1_square.pot"), "bands", n=5)
