"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from besov_lab.spectral_core import TrigPolynomial

amplitudes = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
times = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
small_times = st.floats(min_value=0.0, max_value=0.5, allow_nan=False)


@st.composite
def trig_polys(draw, max_k=40, max_terms=6):
    n = draw(st.integers(min_value=1, max_value=max_terms))
    ks = draw(st.lists(st.integers(min_value=0, max_value=max_k), min_size=n, max_size=n, unique=True))
    a = draw(st.lists(amplitudes, min_size=n, max_size=n))
    b = draw(st.lists(amplitudes, min_size=n, max_size=n))
    return TrigPolynomial(ks, a, b)


@st.composite
def real_samples(draw, sizes=(8, 16, 32, 64)):
    N = draw(st.sampled_from(sizes))
    vals = draw(st.lists(amplitudes, min_size=N, max_size=N))
    return np.array(vals)
