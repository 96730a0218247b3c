import numpy as np
import pytest

import hyperhawkes as hh


def canonical_params() -> hh.ModelParams:
    """3 nodes, two pairwise links, one group edge; shared by many tests."""
    a = np.zeros((3, 3))
    a[2, 0] = 0.5
    a[1, 2] = 0.4
    return hh.ModelParams(mu=np.array([0.3, 0.3, 0.7]), alpha_pw=a,
                          hyperedges=((hh.Hyperedge((0, 1)), 0.4),),
                          beta=1.0, delta=0.5)


@pytest.fixture(scope="session")
def canon_params():
    return canonical_params()


@pytest.fixture(scope="session")
def canon_seq(canon_params):
    """The documented-seed dataset used by the recovery experiments."""
    return hh.simulate(hh.SimConfig(params=canon_params, horizon=1000.0,
                                    seed=107)).seq


@pytest.fixture(scope="session")
def short_seq(canon_params):
    """A cheap sequence for oracle tests that recompute things by brute force."""
    return hh.simulate(hh.SimConfig(params=canon_params, horizon=60.0,
                                    seed=3)).seq
