import math

import numpy as np
import pytest
from hypothesis import strategies as st

from qclone.qmat import PureQubit


@st.composite
def pure_qubits(draw, real: bool = False):
    theta = draw(st.floats(0.0, math.pi, allow_nan=False))
    if real:
        return PureQubit.from_angles(theta)
    phi = draw(st.floats(0.0, 2 * math.pi, allow_nan=False))
    phase = draw(st.floats(0.0, 2 * math.pi, allow_nan=False))
    return PureQubit.from_angles(theta, phi, phase)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
