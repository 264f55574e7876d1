import numpy as np
import pytest

from touchemc.oscillator import CircuitParams


def random_params(rng: np.random.Generator, max_duty: float = 0.8) -> CircuitParams:
    """Valid oscillator parameters spread over several decades.

    J is drawn so that duty stays below ``max_duty`` (Toff not vanishingly short).
    """
    k = rng.uniform(0.5, 4.0)
    c_int = 10 ** rng.uniform(-10, -8)
    # duty = k / (2k - 2j) <= max_duty  <=>  j <= k (1 - 1/(2 max_duty))
    j = rng.uniform(0.0, k * (1.0 - 1.0 / (2.0 * max_duty)))
    c_off = 10 ** rng.uniform(-12, -10.5)
    r2 = 10 ** rng.uniform(3, 5)
    return CircuitParams(
        r1=k * r2, r2=r2, r_ref=10 ** rng.uniform(3.5, 5.5), c_int=c_int,
        c_off=c_off, c_sen=c_off + j * c_int, edge_time=0.0,
    )


@pytest.fixture
def params_25k() -> CircuitParams:
    return CircuitParams(r1=20e3, r2=10e3, r_ref=10e3, c_int=1e-9, c_off=20e-12, c_sen=20e-12)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240520)
