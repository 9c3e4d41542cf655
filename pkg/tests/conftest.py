import numpy as np
import pytest

import qcrkit as q


@pytest.fixture(scope="session")
def example_state():
    return q.build_example_state()


@pytest.fixture(scope="session")
def max_ent():
    return q.maximally_entangled(2)


@pytest.fixture()
def biased_state():
    # sqrt(1/3)|0,0> + sqrt(2/3)|1,1> on dealer + one player, d=2
    layout = q.standard_layout(2, 1)
    v = np.zeros(4, dtype=complex)
    v[0] = np.sqrt(1 / 3)
    v[3] = np.sqrt(2 / 3)
    return q.QuantumState(layout, vector=v)


@pytest.fixture()
def classical_state():
    # (1/2)(|00><00| + |11><11|), perfectly correlated but only classically
    layout = q.standard_layout(2, 1)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 0.5
    m[3, 3] = 0.5
    return q.QuantumState(layout, matrix=m)
