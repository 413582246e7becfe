import numpy as np
import pytest

from wwmc.config import load_config
from wwmc.model import Material, Mesh1D, TimeGrid


@pytest.fixture(scope="session")
def benchmark_spec():
    """The shipped supercritical impulse benchmark at full desk scale."""
    return load_config("azurv1_impulse", {})


@pytest.fixture()
def benchmark_mesh():
    return Mesh1D.uniform(-20.5, 20.5, 201)


@pytest.fixture()
def benchmark_material():
    return Material(sigma_t=1.0, sigma_s=1.0 / 3.0, sigma_f=1.0 / 3.0, nu_f=2.3)


def small_spec(base, **kw):
    """Shrunk copy of a spec for fast integration tests."""
    hist = kw.pop("histories", 2000)
    steps = kw.pop("steps", None)
    spec = base.replace(n_histories=hist, **kw)
    if steps is not None:
        t_end = spec.time.t[0] + steps * (spec.time.t[1] - spec.time.t[0])
        spec = spec.replace(time=TimeGrid(np.linspace(spec.time.t[0], t_end, steps + 1)))
    return spec
