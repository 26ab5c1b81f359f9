import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbsam import _kernels_py, kernels

try:
    from hilbsam import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None

BACKENDS = [_kernels_py] + ([compiled] if compiled is not None else [])
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def _ids(mod):
    return "compiled" if mod is compiled else "python"


@pytest.mark.parametrize("mod", BACKENDS, ids=_ids)
def test_count_standard_small(mod):
    assert mod.count_standard(np.zeros((0, 2), dtype=np.int64), 2, 5) == 6
    assert mod.count_standard(np.array([[1, 1]], dtype=np.int64), 2, 5) == 2


@needs_compiled
@given(st.integers(1, 4), st.integers(0, 9),
       st.lists(st.lists(st.integers(0, 3), min_size=4, max_size=4), max_size=5))
def test_count_standard_backends_agree(k, n, gens):
    g = np.array([row[:k] for row in gens], dtype=np.int64).reshape(-1, k)
    assert compiled.count_standard(g, k, n) == _kernels_py.count_standard(g, k, n)


@needs_compiled
@given(st.integers(1, 3), st.integers(0, 8),
       st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=5), st.data())
def test_polytope_slice_sum_backends_agree(k, n, pts, data):
    P = np.array([p[:k] for p in pts], dtype=np.int64)
    mask = np.array(data.draw(st.lists(st.lists(st.booleans(), min_size=k, max_size=k),
                                       min_size=len(pts), max_size=len(pts))), dtype=np.uint8)
    assert tuple(compiled.polytope_slice_sum(P, mask, k, n)) == tuple(_kernels_py.polytope_slice_sum(P, mask, k, n))


@needs_compiled
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=25))
def test_superadditive_scan_backends_agree(vals):
    N = len(vals) - 1
    offs = np.arange(N + 1, dtype=np.int64)
    v = np.array(vals, dtype=np.int64)
    a = tuple(compiled.superadditive_scan(offs, offs, v, N))
    b = tuple(_kernels_py.superadditive_scan(offs, offs, v, N))
    assert a == b


def test_pure_python_switch():
    env = dict(os.environ, HILBSAM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import hilbsam; print(hilbsam.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("python", "compiled")


_PROBE = """
import random
from hilbsam import BACKEND
from hilbsam.monomial import hilbert_function, random_monomial_ideal
from hilbsam.superadd import check_superadditive, min_linear_forms, random_min_linear_forms
from hilbsam.tube import random_polytope_profile, sup_chi
rng = random.Random(7)
out = [BACKEND]
for _ in range(5):
    J = random_monomial_ideal(rng)
    out.append([hilbert_function(J, n) for n in range(10)])
    p = random_polytope_profile(rng)
    out.append([str(sup_chi(p, n)) for n in range(8)])
    s = random_min_linear_forms(rng, 2)
    out.append(bool(check_superadditive(s, 12)))
print(repr(out))
"""


def _probe(pure):
    env = dict(os.environ)
    env.pop("HILBSAM_PURE_PYTHON", None)
    if pure:
        env["HILBSAM_PURE_PYTHON"] = "1"
    res = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True)
    return eval(res.stdout)


@needs_compiled
def test_backends_give_identical_results():
    pure, fast = _probe(True), _probe(False)
    assert pure[0] == "python" and fast[0] == "compiled"
    assert pure[1:] == fast[1:]
