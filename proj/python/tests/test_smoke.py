import math

import numpy as np
import pytest

import shapecalc


def annulus(flow="potential"):
    cfg = shapecalc.Config()
    cfg.flow = flow
    return cfg


def test_radial_oracle_matches_log_profile():
    # Psi = ln r / ln 2 between r = 1 (Psi = 0) and r = 2 (Psi = 1).
    r = shapecalc.radial_oracles("potential", 1.0, 2.0, 0.0, 1.0)
    assert r["S"] == pytest.approx(-1.0 / (2.0 * math.log(2.0)), rel=1e-12)


def test_potential_S_close_to_oracle():
    p = shapecalc.Problem(annulus(), level=1)
    S = p.S()
    wall = p.wall()
    assert S.shape == wall["s"].shape
    assert np.all(wall["loop"] == 0)
    assert np.allclose(wall["kappa"], 0.5, atol=1e-12)
    oracle = shapecalc.radial_oracles("potential", 1.0, 2.0, 0.0, 1.0)["S"]
    assert np.max(np.abs(S - oracle)) < 1e-4


def test_dS_is_linear_in_the_field():
    p = shapecalc.Problem(annulus(), level=0)
    a = p.dS("fourier 0 2 cos")
    b = p.dS("fourier 0 2 cos * 2")
    assert np.allclose(b, 2.0 * a, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("flow", ["potential", "stokes"])
def test_adjoint_identity(flow):
    p = shapecalc.Problem(annulus(flow), level=1)
    r = p.identity("bump 0 3.0 2.0", "fourier 0 1 sin")
    assert r["residual"] < 1e-3


def test_flipped_kappa_breaks_identity():
    p = shapecalc.Problem(annulus(), level=1)
    assert p.identity("uniform 0", "uniform 0", flip_kappa=True)["residual"] > 0.1


def test_config_errors_raise_value_error():
    with pytest.raises(ValueError):
        shapecalc.parse_config("[mesh]\nlevle = 2\n")
    cfg = shapecalc.parse_config(shapecalc.config_reference())
    assert cfg.level == shapecalc.Config().level


def test_verify_reports_checks():
    cfg = annulus()
    cfg.level = 2
    checks = shapecalc.verify(cfg)
    assert checks
    assert all(c["passed"] for c in checks), [c["name"] for c in checks if not c["passed"]]
