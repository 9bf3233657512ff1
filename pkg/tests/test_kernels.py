import os

import numpy as np
import pytest

from nodalcount import kernels
from nodalcount._accel import HAVE_NUMBA
from nodalcount.ensembles import sample_goe
from nodalcount.sampling import SeedPlan
from nodalcount.spectral import symmetric_eigen

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@pytest.mark.parametrize("n", [2, 3, 31, 33, 100])
def test_edge_counts_numpy_matches_bruteforce(n):
    A = sample_goe(n, SeedPlan(n).stream(0))
    V = symmetric_eigen(A).vectors
    counts, mins = kernels.edge_sign_counts_numpy(A, V, 0.0)
    iu, ju = np.triu_indices(n, 1)
    P = A[iu, ju][:, None] * V[iu] * V[ju]
    assert np.array_equal(counts, (P > 0).sum(axis=0))
    assert np.allclose(mins, np.abs(P).min(axis=0))


@needs_numba
@pytest.mark.parametrize("n", [2, 5, 32, 65, 200])
@pytest.mark.parametrize("edge_tol", [0.0, 0.05])
def test_edge_counts_backends_agree(n, edge_tol):
    A = sample_goe(n, SeedPlan(n).stream(1))
    V = symmetric_eigen(A).vectors
    c1, m1 = kernels.edge_sign_counts_numba(A, V, edge_tol)
    c2, m2 = kernels.edge_sign_counts_numpy(A, V, edge_tol)
    assert np.array_equal(c1, c2)
    assert np.allclose(m1, m2, rtol=1e-12)


def test_edge_counts_no_edges():
    counts, mins = kernels.edge_sign_counts(np.eye(3), np.eye(3))
    assert np.array_equal(counts, [0, 0, 0]) and np.all(np.isinf(mins))


def test_pair_index():
    assert kernels.pair_index(4) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _reference_frame_signs(G, lam, k):
    out = []
    for block in G:
        Q, R = np.linalg.qr(block.T)
        Q = Q * np.sign(np.diag(R))
        X = Q.T
        out.append([np.sign(X[a, k] * X[b, k] * np.sum(lam * X[a] * X[b]))
                    for a, b in kernels.pair_index(block.shape[0])])
    return np.array(out, dtype=np.int8)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_frame_signs_match_qr(m):
    rng = SeedPlan(m).stream(0)
    n = 12
    lam = np.linspace(-1.5, 1.5, n)
    G = rng.standard_normal((200, m, n))
    ref = _reference_frame_signs(G, lam, 5)
    assert np.array_equal(kernels.frame_edge_signs_numpy(G, lam, 5), ref)


@needs_numba
@pytest.mark.parametrize("m", [2, 3, 4])
def test_frame_signs_backends_agree(m):
    rng = SeedPlan(10 + m).stream(0)
    lam = rng.standard_normal(40)
    G = rng.standard_normal((500, m, 40))
    a = kernels.frame_edge_signs_numba(G, lam, 7)
    b = kernels.frame_edge_signs_numpy(G, lam, 7)
    assert np.array_equal(a, b)


def test_frame_signs_degenerate_rows_are_zero():
    G = np.zeros((2, 2, 4))
    G[1] = np.arange(8, dtype=float).reshape(2, 4) + 1
    s = kernels.frame_edge_signs(G, np.ones(4), 0)
    assert np.all(s[0] == 0)


def test_env_flag_selects_numpy_path():
    import subprocess
    import sys

    code = (
        "import numpy as np\n"
        "from nodalcount import _accel, nodal_all, sample_goe, SeedPlan\n"
        "A = sample_goe(40, SeedPlan(1).stream(0))\n"
        "print(int(_accel.USE_NUMBA), ','.join(map(str, nodal_all(A).phi)))\n"
    )

    def run(flag):
        env = dict(os.environ, NODALCOUNT_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        return out

    off, phi_off = run("1")
    assert off == "0"
    on, phi_on = run("")
    assert on == str(int(HAVE_NUMBA))
    assert phi_on == phi_off
