import json
import math
from pathlib import Path

import numpy as np
import pytest

import bihflow

REFERENCE = (Path(__file__).resolve().parents[2] / "configs" / "reference.ini").read_text()


def test_profile_origin_value():
    g0 = bihflow.eval_profile([0.0])
    assert g0 == pytest.approx(2 * math.gamma(1.25) / (2 * math.pi), rel=1e-12)
    assert bihflow.kernel_mass(1, 1.0) == pytest.approx(1.0, abs=1e-8)


def test_kernel_scaling():
    a = bihflow.eval_kernel([1.0], 16.0)
    b = bihflow.eval_kernel([0.5], 1.0)
    assert a == pytest.approx(b / 2, rel=1e-14)


def test_certificate_dict():
    c = bihflow.certify("2.3", order=1)
    assert c["estimate_id"] == "2.3"
    assert c["fitted_constant"] > 0


def test_apply_G_decays_single_mode():
    L, M, t = 8.0, 64, 0.3
    x = np.arange(M) * L / M
    k = 2 * np.pi / L
    u = np.cos(k * x)[None, :]
    v = bihflow.apply_G(u, L, t)
    assert v.shape == (1, M)
    np.testing.assert_allclose(v, np.exp(-t * k**4) * u, atol=1e-14)


def test_projection_and_derivative():
    y = np.array([0.0, 0.0, 2.0])
    np.testing.assert_allclose(bihflow.project(y), [0.0, 0.0, 1.0])
    d = bihflow.dpi(y, 1, [np.array([1.0, 0.0, 0.0])])
    np.testing.assert_allclose(d, [0.5, 0.0, 0.0], atol=1e-15)


def test_bmo_of_constant_is_zero():
    f = np.ones((3, 64))
    assert bihflow.bmo_seminorm(f, 8.0, 1.0) == 0.0


def test_config_roundtrip_and_errors():
    canonical = bihflow.parse_config(REFERENCE)
    assert bihflow.parse_config(canonical) == canonical
    with pytest.raises(bihflow.BihflowError) as info:
        bihflow.parse_config("[grid]\nbogus = 1\n")
    assert info.value.code == "config-parse-error"


def test_evolve_reference():
    times, frames, diag = bihflow.evolve(REFERENCE)
    assert len(times) == frames.shape[0] == 64
    assert frames.shape[1:] == (3, 128)
    assert diag["converged"]
    assert max(diag["ratios"]) < 1
    np.testing.assert_allclose(np.linalg.norm(frames[0], axis=0), 1.0, atol=1e-12)


def test_run_kernel_suite(tmp_path):
    man = bihflow.run_suite("kernel", REFERENCE, tmp_path)
    assert man["status"] == "passed"
    stored = json.loads((tmp_path / "manifest.json").read_text())
    assert stored["files"] == man["files"]
    assert "kernel" in bihflow.suite_ids()
