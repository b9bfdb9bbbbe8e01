import numpy as np
import pytest

from covstat.config import get_settings
from covstat.constraints import SystemState


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def pair_state(separation, momentum=0.0, mass=1.0, energy=None, tau=0.0, axis=0):
    """Two particles at equal time in their CMS, separated along ``axis``."""
    q = np.zeros((2, 4))
    p = np.zeros((2, 4))
    q[:, 0] = tau
    q[1, 1 + axis] = separation
    p[0, 2 - axis] = momentum
    p[1, 2 - axis] = -momentum
    p[:, 0] = energy if energy is not None else np.sqrt(mass**2 + momentum**2)
    return SystemState(q=q, p=p, masses=[mass, mass], tau=tau)


def numeric_gradient(func, state, h=1e-6):
    """Central differences of a scalar phase function, shapes (N,4) and (N,4)."""
    dq = np.zeros_like(state.q)
    dp = np.zeros_like(state.p)
    for target, out in (("q", dq), ("p", dp)):
        base = np.array(getattr(state, target))
        for index in np.ndindex(base.shape):
            plus = base.copy()
            minus = base.copy()
            plus[index] += h
            minus[index] -= h
            up = func(state.replace(**{target: plus}))
            down = func(state.replace(**{target: minus}))
            out[index] = (up - down) / (2.0 * h)
    return dq, dp
