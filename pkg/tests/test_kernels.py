import os
import subprocess
import sys

import numpy as np
import pytest

from ridemarket import kernels
from ridemarket.kernels import pure

try:
    from ridemarket.kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


def test_selected_backend_is_exposed():
    assert kernels.BACKEND in ("pure", "compiled")
    assert callable(kernels.sigmoid)


def test_pure_scalar_values():
    assert pure.sigmoid(0.0, 1.0) == 0.5
    assert pure.step_cu(0.1, 1.0, 0.0, 8.0) == 0.1
    assert pure.step_cu(7.9, 1.0, 5.0, 8.0) == 8.0
    assert pure.logit(0.5, 0.5, 3.0) == 0.5
    assert pure.inverse_sigmoid(0.5, 2.0) == 0.0


def test_pure_nearest_of_first_wins():
    row = np.array([5.0, 3.0, 3.0, 9.0])
    assert pure.nearest_of(row, [0, 1, 2, 3]) == 1
    assert pure.nearest_of(row, [3, 2, 1]) == 1  # position in the list, not node


def test_pure_saturates_instead_of_overflowing():
    assert pure.sigmoid(1000.0, 1.0) == 0.0
    assert pure.sigmoid(-1000.0, 1.0) == 1.0
    assert pure.logit(0.2, 0.9, 1e4) == 0.0
    assert pure.logit(0.9, 0.2, 1e4) == 1.0


@needs_compiled
def test_backends_agree_at_saturation():
    for cu in (700.0, 709.5, 710.0, 1e6, -700.0, -709.5, -1e6):
        assert pure.sigmoid(cu, 1.0) == _core.sigmoid(cu, 1.0)
        assert pure.logit(0.0, cu / 10.0, 10.0) == _core.logit(0.0, cu / 10.0, 10.0)


@needs_compiled
def test_backends_bitwise_identical():
    rng = np.random.default_rng(0)
    for _ in range(5000):
        cu = float(rng.uniform(-12, 12))
        beta = float(rng.uniform(0.05, 5))
        assert pure.sigmoid(cu, beta) == _core.sigmoid(cu, beta)
        u = float(rng.uniform(1e-9, 1 - 1e-9))
        assert pure.inverse_sigmoid(u, beta) == _core.inverse_sigmoid(u, beta)
        alpha = float(rng.uniform(0.01, 4))
        delta = float(rng.uniform(-6, 6))
        cap = float(rng.uniform(0.5, 16))
        assert pure.step_cu(cu, alpha, delta, cap) == _core.step_cu(cu, alpha, delta, cap)
        own, alt = (float(x) for x in rng.uniform(0, 1, size=2))
        mu = float(rng.uniform(0, 10))
        assert pure.logit(own, alt, mu) == _core.logit(own, alt, mu)


@needs_compiled
def test_nearest_of_backends_agree():
    rng = np.random.default_rng(1)
    row = rng.uniform(0, 1e4, size=500)
    row[rng.integers(0, 500, size=40)] = 777.0  # force ties
    for _ in range(500):
        k = int(rng.integers(1, 60))
        idx = [int(i) for i in rng.choice(500, size=k, replace=False)]
        assert pure.nearest_of(row, idx) == _core.nearest_of(row, idx)


@needs_compiled
def test_end_to_end_ledgers_identical_across_backends(tmp_path, desk_path):
    # the backend choice must never leak into results; full-run CSV bytes
    # have to agree
    for backend, out in (("", tmp_path / "compiled"), ("pure", tmp_path / "pure")):
        env = dict(os.environ, RIDEMARKET_BACKEND=backend)
        subprocess.run(
            [sys.executable, "-m", "ridemarket.cli", "run", str(desk_path), "--out", str(out)],
            env=env,
            check=True,
            capture_output=True,
        )
    assert (tmp_path / "compiled" / "ledger_0.csv").read_bytes() == (
        tmp_path / "pure" / "ledger_0.csv"
    ).read_bytes()
