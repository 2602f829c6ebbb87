import numpy as np
import pytest

from purf.model import RegressionModel, catalog_model

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def linear():
    return catalog_model("linear-uniform", noise_sd=1.0)


def constant_model(value=2.5, noise_sd=0.0):
    return RegressionModel(
        regression_fn=lambda x: np.full_like(np.asarray(x, dtype=float), value),
        design_density=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        noise_sd=noise_sd,
        lipschitz_const=1.0,
        density_max=1.0,
        density_min=1.0,
        design_cdf=lambda x: np.asarray(x, dtype=float),
        design_ppf=lambda u: np.asarray(u, dtype=float),
        name="constant",
    )
