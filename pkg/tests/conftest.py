import numpy as np
import pytest

from ultrascale import seqcore as sc


@pytest.fixture(scope="session")
def K200():
    return 200


@pytest.fixture(scope="session")
def builtins_200():
    """One representative per built-in family shape, at K = 200."""
    fams = [
        sc.Gevrey(1.5), sc.Gevrey(2), sc.Gevrey(3),
        sc.LQR(2, 1.5), sc.LQR(2, 2), sc.LQR(3, 2),
        sc.NQR(2, 1.5), sc.NQR(2, 2), sc.NQR(3, 2),
        sc.BJSigma(1, 0.5), sc.BJSigma(1, 1), sc.BJSigma(2, 1), sc.BJSigma(3, 1),
        sc.DoubleExp(),
    ]
    return [sc.build_sequence(f, 200) for f in fams]


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
