"""Both backends agree; the active one is chosen by PARTHETA_BACKEND."""

import os
import subprocess
import sys

import numpy as np
import pytest

from partheta import kernels
from partheta.kernels import _loops, _numpy

CASES = [(0.5, 1.0, 0, 0), (0.3 + 0.2j, -4 + 1j, 1, 0), (-0.7, 3.0, 0, 1), (0.6j, 2 - 2j, 1, 1), (0.4, 5.0, 2, 0)]


@pytest.mark.parametrize("q,x,dx,dq", CASES)
def test_series_agree(q, x, dx, dq):
    a, ma = _loops.series_sum(complex(q), complex(x), 40, dx, dq)
    b, mb = _numpy.series_sum(complex(q), complex(x), 40, dx, dq)
    assert abs(a - b) <= 1e-13 * ma
    assert ma == pytest.approx(mb, rel=1e-12)


def test_series_many():
    xs = np.exp(1j * np.linspace(0, 6, 50)) * 7
    a, _ = _loops.series_sum_many(0.45 + 0.1j, xs, 60, 1, 0)
    b, mb = _numpy.series_sum_many(0.45 + 0.1j, xs, 60, 1, 0)
    assert np.all(np.abs(a - b) <= 1e-13 * mb)


def test_newton_ratio():
    for z in [3 + 1j, -1000.0 + 0j, 1e-3j]:
        a = _loops.newton_ratio(0.4 + 0.1j, 50, complex(z))
        b = _numpy.newton_ratio(0.4 + 0.1j, 50, complex(z))
        assert abs(a - b) <= 1e-12 * abs(a)


def test_aberth_same_roots():
    q, N = 0.31 + 0j, 12
    k = np.arange(1, N + 1)
    seeds = -(q ** -k) * np.exp(1j * (0.3 * (-1.0) ** k + 0.0137 * k))
    ra, da, _ = _loops.aberth(q, N, seeds.astype(np.complex128), 300, 1e-13)
    rb, db, _ = _numpy.aberth(q, N, seeds.astype(np.complex128), 300, 1e-13)
    assert da.all() and db.all()
    sa = sorted(ra, key=lambda z: (round(abs(z), 6), z.imag))
    sb = sorted(rb, key=lambda z: (round(abs(z), 6), z.imag))
    assert np.allclose(sa, sb, rtol=1e-10)
    pair = [z for z in sa if abs(z) < 10]
    assert len(pair) == 2 and abs(pair[0].imag) > 0.3


def test_elementary_symmetric():
    v = np.array([0.5, 0.25, 0.125, 0.0625])
    e = _loops.elementary_symmetric(v, 3)
    assert np.allclose(e, _numpy.elementary_symmetric(v, 3))
    assert np.allclose(e, np.poly(-v)[:4])


def test_triple_product_shifted_vanishes():
    v, rel = _loops.theta_star_product(0.5 + 0j, -(0.5 ** -3) + 0j, 0j, 3, 60)
    assert v == 0


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_env_selects_backend(backend):
    code = "from partheta import kernels, eval_theta; print(kernels.BACKEND, eval_theta(0.5, 1).value.real)"
    env = dict(os.environ, PARTHETA_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    name, val = out.split()
    expect = backend if (backend == "numpy" or kernels.NUMBA_AVAILABLE) else "numpy"
    assert name == expect
    assert float(val) == pytest.approx(1.6416325606551254, rel=1e-15)
