"""Random-design regression models ``Y = s(X) + eps`` on the unit interval.

A :class:`RegressionModel` bundles the regression function, the design
density and the noise level together with the constants the risk bounds are
stated in (Lipschitz constant ``C``, density bounds ``m <= mu <= M``).
Models from :func:`catalog_model` ship an exact CDF and inverse CDF; models
built by hand fall back to quadrature for the CDF and to rejection sampling
under the flat envelope ``density_max`` for draws.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

RealFn = Callable[[np.ndarray], np.ndarray]

NOISE_KINDS = ("gaussian", "uniform")


@dataclass(frozen=True)
class RegressionModel:
    """Data-generating process for one-dimensional regression.

    Parameters
    ----------
    regression_fn : callable
        Vectorised regression function ``s`` on ``[0, 1]``.
    design_density : callable
        Vectorised density ``mu`` of ``X`` on ``[0, 1]``.
    noise_sd : float
        Standard deviation ``sigma`` of the additive noise.
    lipschitz_const, density_max, density_min : float
        Declared constants ``C``, ``M`` and ``m``; :meth:`validate` checks
        them on a grid.
    design_cdf, design_ppf : callable, optional
        Exact CDF and inverse CDF of the design. Without a ppf, sampling
        uses rejection under ``density_max``.
    noise : {"gaussian", "uniform"}
        Noise law. Uniform noise is drawn on ``(-a, a)`` with
        ``a = sqrt(3) * noise_sd`` so the variance matches.
    """

    regression_fn: RealFn
    design_density: RealFn
    noise_sd: float
    lipschitz_const: float
    density_max: float
    density_min: float
    design_cdf: Optional[RealFn] = None
    design_ppf: Optional[RealFn] = None
    noise: str = "gaussian"
    name: str = "custom"

    def __post_init__(self):
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be nonnegative, got {self.noise_sd}")
        if self.lipschitz_const <= 0:
            raise ValueError("lipschitz_const must be positive")
        if not 0 < self.density_min <= self.density_max:
            raise ValueError("need 0 < density_min <= density_max")
        if self.noise not in NOISE_KINDS:
            raise ValueError(f"noise must be one of {NOISE_KINDS}, got {self.noise!r}")

    def with_noise(self, noise_sd: float, noise: Optional[str] = None) -> "RegressionModel":
        """Copy of the model with a different noise level (and optionally law)."""
        return dataclasses.replace(
            self, noise_sd=float(noise_sd), noise=self.noise if noise is None else noise
        )

    def cdf(self, x) -> np.ndarray:
        """Design CDF; exact when available, Gauss-Legendre otherwise."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        if self.design_cdf is not None:
            return self.design_cdf(x)
        from .quadrature import integrate_cells

        flat = x.ravel()
        out = integrate_cells(
            lambda t, _: self.design_density(t), np.zeros_like(flat), flat
        )
        return out.reshape(x.shape)

    def validate(self, grid_size: int = 10_000) -> None:
        """Check the declared constants and normalisation.

        Raises ``ValueError`` naming the first violated invariant.
        """
        from .quadrature import integrate_cells

        total = integrate_cells(
            lambda t, _: self.design_density(t), np.array([0.0]), np.array([1.0])
        )[0]
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"design density integrates to {total!r}, not 1")
        grid = np.linspace(0.0, 1.0, grid_size)
        dens = self.design_density(grid)
        tol = 1e-12
        if dens.min() < self.density_min - tol or dens.max() > self.density_max + tol:
            raise ValueError(
                f"density range [{dens.min()}, {dens.max()}] outside declared "
                f"[{self.density_min}, {self.density_max}]"
            )
        # adjacent grid pairs bound the Lipschitz ratio from below; any larger
        # slope between distant points shows up between some adjacent pair
        vals = self.regression_fn(grid)
        slope = np.max(np.abs(np.diff(vals)) / np.diff(grid))
        if slope > self.lipschitz_const * (1 + 1e-9):
            raise ValueError(
                f"regression function slope {slope} exceeds declared C={self.lipschitz_const}"
            )


@dataclass(frozen=True)
class LearningSample:
    """``n`` observations ``(X_i, Y_i)`` with ``X_i`` in ``[0, 1]``."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("xs and ys must be 1-d arrays of equal length")
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise ValueError("design points must lie in [0, 1]")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self):
        return self.xs.size


def _linear(x):
    return np.asarray(x, dtype=float)


def _sine(x):
    return np.sin(2 * np.pi * np.asarray(x, dtype=float))


def _flat_density(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _tilted_density(x):
    return (2.0 / 3.0) * (1.0 + np.asarray(x, dtype=float))


def _tilted_cdf(x):
    x = np.asarray(x, dtype=float)
    return (2.0 * x + x * x) / 3.0


def _tilted_ppf(u):
    # root in [0, 1] of x^2 + 2x - 3u = 0
    return np.sqrt(1.0 + 3.0 * np.asarray(u, dtype=float)) - 1.0


_CATALOG = {
    "linear-uniform": dict(
        regression_fn=_linear,
        design_density=_flat_density,
        lipschitz_const=1.0,
        density_max=1.0,
        density_min=1.0,
        design_cdf=_linear,
        design_ppf=_linear,
    ),
    "sine-uniform": dict(
        regression_fn=_sine,
        design_density=_flat_density,
        lipschitz_const=2 * np.pi,
        density_max=1.0,
        density_min=1.0,
        design_cdf=_linear,
        design_ppf=_linear,
    ),
    "linear-tilted": dict(
        regression_fn=_linear,
        design_density=_tilted_density,
        lipschitz_const=1.0,
        density_max=4.0 / 3.0,
        density_min=2.0 / 3.0,
        design_cdf=_tilted_cdf,
        design_ppf=_tilted_ppf,
    ),
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog_model(name: str, noise_sd: float = 1.0, noise: str = "gaussian") -> RegressionModel:
    """Return a named test model.

    ``"linear-uniform"``: ``s(x) = x``, uniform design, ``C = 1``.
    ``"sine-uniform"``: ``s(x) = sin(2 pi x)``, uniform design, ``C = 2 pi``.
    ``"linear-tilted"``: ``s(x) = x`` with density ``(2/3)(1 + x)``, so
    ``m = 2/3`` and ``M = 4/3``.

    All three sample the design through their exact inverse CDF.
    """
    try:
        spec = _CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; valid names: {', '.join(CATALOG_NAMES)}"
        ) from None
    return RegressionModel(noise_sd=float(noise_sd), noise=noise, name=name, **spec)


def draw_design(model: RegressionModel, size, rng: np.random.Generator) -> np.ndarray:
    """Draw design points of the given shape from ``model``'s density."""
    if model.design_ppf is not None:
        return model.design_ppf(rng.random(size))
    shape = (size,) if np.isscalar(size) else tuple(size)
    count = int(np.prod(shape))
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        batch = max(2 * need, 64)
        cand = rng.random(batch)
        keep = cand[rng.random(batch) * model.density_max <= model.design_density(cand)]
        take = keep[:need]
        out[filled:filled + take.size] = take
        filled += take.size
    return out.reshape(shape)


def draw_noise(model: RegressionModel, size, rng: np.random.Generator) -> np.ndarray:
    if model.noise == "uniform":
        half = np.sqrt(3.0) * model.noise_sd
        return rng.uniform(-half, half, size)
    return model.noise_sd * rng.standard_normal(size)


def sample(model: RegressionModel, n: int, rng: np.random.Generator) -> LearningSample:
    """Draw a learning set of ``n`` i.i.d. pairs from ``model``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    xs = draw_design(model, n, rng)
    ys = model.regression_fn(xs)
    if model.noise_sd > 0:
        ys = ys + draw_noise(model, n, rng)
    return LearningSample(xs, ys)
