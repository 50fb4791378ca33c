import pathlib

import numpy as np
import pytest

import ghft

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def test_load_config():
    cfg = ghft.load_config(str(CONFIGS / "minkowski_scalar.ini"))
    assert cfg["n_t"] > 0 and cfg["n_x"] > 0
    assert "scalar" in cfg["suites"]


def test_check_minkowski_scalar(tmp_path):
    passed, rows = ghft.check(str(CONFIGS / "minkowski_scalar.ini"), str(tmp_path))
    assert passed
    assert rows and all(r[4] for r in rows)
    assert (tmp_path / "report.csv").read_text().startswith("suite,check,measured,threshold,pass")


def test_massless_proca_rejected(tmp_path):
    with pytest.raises(ValueError, match="m\\^2"):
        ghft.check(str(CONFIGS / "proca_massless.ini"), str(tmp_path))


def test_missing_config():
    with pytest.raises(OSError):
        ghft.load_config(str(CONFIGS / "does_not_exist.ini"))


def test_algebra_normal_form(tmp_path):
    expr = (CONFIGS / "ccr.expr").read_text()
    assert ghft.algebra(str(CONFIGS / "minkowski_scalar.ini"), expr, str(tmp_path)) == "(2+3/2i)*Phi(3)"


def test_green_is_retarded_and_splits():
    cfg_path = str(CONFIGS / "minkowski_scalar.ini")
    cfg = ghft.load_config(cfg_path)
    nt, nx = cfg["n_t"], cfg["n_x"]
    f = np.zeros((nt, nx, 1), dtype=complex)
    k0, j0 = nt // 2, nx // 2
    f[k0, j0, 0] = 1.0
    ep = ghft.green(cfg_path, "scalar", f, "retarded")
    em = ghft.green(cfg_path, "scalar", f, "advanced")
    e = ghft.green(cfg_path, "scalar", f, "causal")
    assert np.abs(ep[:k0]).max() == 0.0
    assert np.abs(em[k0 + 1 :]).max() == 0.0
    np.testing.assert_allclose(e, em - ep, atol=1e-14)


def test_green_shape_checked():
    with pytest.raises(ValueError):
        ghft.green(str(CONFIGS / "minkowski_scalar.ini"), "scalar", np.zeros((2, 2, 1)))


def test_clifford():
    checks = ghft.clifford_check()
    assert len(checks) == 35 and all(ok for _, ok in checks)
