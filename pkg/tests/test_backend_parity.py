"""End-to-end runs under the forced numpy backend match the default backend."""

import json
import os
import subprocess
import sys

import pytest

from genpoincare import kernels

pytestmark = pytest.mark.skipif("numba" not in kernels.IMPLEMENTATIONS, reason="numba not installed")


def _run(tmp_path, tag, disable):
    env = dict(os.environ, GENPOINCARE_DISABLE_NUMBA="1" if disable else "0")
    out = tmp_path / f"{tag}.json"
    proc = subprocess.run(
        [sys.executable, "-m", "genpoincare.cli", "poincare", "--config", "symmetric_gradient_r2",
         "--out", str(out)],
        env=env, capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(out.read_text())


def test_poincare_report_backend_independent(tmp_path):
    fast = _run(tmp_path, "numba", disable=False)
    slow = _run(tmp_path, "numpy", disable=True)
    assert fast.pop("backend") == "numba"
    assert slow.pop("backend") == "numpy"
    for a, b in zip(fast["reports"], slow["reports"]):
        assert a["ratios"] == pytest.approx(b["ratios"], rel=1e-10)
        assert a["empirical_constant"] == pytest.approx(b["empirical_constant"], rel=1e-10)
        assert a["rank_profile"] == b["rank_profile"]
