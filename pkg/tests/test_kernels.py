import random
import subprocess
import sys

import numpy as np
import pytest

from hiagg.kernels import _numba, _numpy

from oracles import power_mean_direct, weighted_mean_exact


def _random_arrays(rng, n):
    v = np.array([float(rng.randint(1, 10)) for _ in range(n)])
    w = np.array([rng.uniform(0.1, 700.0) for _ in range(n)])
    return v, w


@pytest.mark.parametrize("backend", [_numpy, _numba],
                         ids=["numpy", "numba"])
def test_backend_matches_exact_oracle(backend):
    rng = random.Random(11)
    for _ in range(200):
        v, w = _random_arrays(rng, rng.randint(1, 30))
        exact = float(weighted_mean_exact(v.tolist(), w.tolist()))
        assert backend.weighted_mean(v, w) == pytest.approx(exact, rel=1e-12)
        assert backend.weighted_sum(v, w) == pytest.approx(
            float(np.longdouble(0) + sum(np.longdouble(a) * np.longdouble(b)
                                         for a, b in zip(v, w))), rel=1e-12)
        assert backend.min_value(v) == min(v)
        direct = power_mean_direct(v.tolist(), w.tolist(), -2.0)
        assert backend.power_mean(v, w, -2.0) == pytest.approx(direct, rel=1e-9)


def test_backends_agree():
    rng = random.Random(42)
    for _ in range(500):
        v, w = _random_arrays(rng, rng.randint(1, 40))
        for a, b in ((_numpy.weighted_mean(v, w), _numba.weighted_mean(v, w)),
                     (_numpy.weighted_sum(v, w), _numba.weighted_sum(v, w)),
                     (_numpy.power_mean(v, w, -2.0), _numba.power_mean(v, w, -2.0)),
                     (_numpy.min_value(v), _numba.min_value(v))):
            assert a == pytest.approx(b, rel=1e-9)


@pytest.mark.parametrize("backend", [_numpy, _numba],
                         ids=["numpy", "numba"])
def test_backend_bitwise_repeatable(backend):
    rng = random.Random(3)
    v, w = _random_arrays(rng, 37)
    first = (backend.weighted_mean(v, w), backend.weighted_sum(v, w),
             backend.power_mean(v, w, -2.0))
    for _ in range(50):
        again = (backend.weighted_mean(v, w), backend.weighted_sum(v, w),
                 backend.power_mean(v, w, -2.0))
        assert again == first  # bitwise, not approx


@pytest.mark.parametrize("env,expected", [
    ("numpy", "numpy"),
    ("numba", "numba"),
    ("auto", "numba"),  # numba is installed here, so auto picks it
])
def test_env_var_selects_backend(env, expected):
    code = ("import hiagg.kernels as k; print(k.backend_name())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env={"HIAGG_KERNELS": env, "PATH": "/usr/bin:/bin"})
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == expected


def test_env_var_rejects_garbage():
    code = "import hiagg.kernels"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env={"HIAGG_KERNELS": "cuda", "PATH": "/usr/bin:/bin"})
    assert out.returncode != 0
    assert "HIAGG_KERNELS" in out.stderr


def test_power_mean_identity_on_equal_values():
    v = np.full(6, 7.0)
    w = np.linspace(1.0, 3.0, 6)
    assert _numpy.power_mean(v, w, -2.0) == pytest.approx(7.0, rel=1e-12)
    assert _numba.power_mean(v, w, -2.0) == pytest.approx(7.0, rel=1e-12)
