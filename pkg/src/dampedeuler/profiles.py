"""Named C^1 initial-data profiles.

Profiles are referenced by name in configs; each carries its derivative and
an effective support radius (|f| < 1e-16 outside) used for domain sizing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))[()]


def _gaussian(x):
    return np.exp(-np.asarray(x, dtype=float) ** 2)[()]


def _gaussian_dx(x):
    xa = np.asarray(x, dtype=float)
    return (-2.0 * xa * np.exp(-(xa ** 2)))[()]


def _odd_gaussian(x):
    xa = np.asarray(x, dtype=float)
    return (-xa * np.exp(-(xa ** 2)))[()]


def _odd_gaussian_dx(x):
    xa = np.asarray(x, dtype=float)
    return ((2.0 * xa ** 2 - 1.0) * np.exp(-(xa ** 2)))[()]


# name -> (f, f', effective support radius)
_REGISTRY = {
    "zero": (_zero, _zero, 0.0),
    "gaussian": (_gaussian, _gaussian_dx, 6.5),
    "odd_gaussian": (_odd_gaussian, _odd_gaussian_dx, 6.5),
}


def profile_names():
    return tuple(sorted(_REGISTRY))


@dataclass(frozen=True)
class Profile:
    """A registered profile shifted by `center`: f(x - center)."""

    name: str
    center: float = 0.0

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ConfigError(
                f"unknown profile {self.name!r}; available: {profile_names()}")

    def __call__(self, x):
        return _REGISTRY[self.name][0](np.asarray(x, dtype=float) - self.center)

    def deriv(self, x):
        return _REGISTRY[self.name][1](np.asarray(x, dtype=float) - self.center)

    @property
    def support_radius(self) -> float:
        """Radius about the origin outside which the profile is negligible."""
        return _REGISTRY[self.name][2] + abs(self.center)
