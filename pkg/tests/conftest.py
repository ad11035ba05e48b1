"""Shared fixtures: default-resolution measures and canonicalized domains."""

import numpy as np
import pytest

from capfold.directions import canonicalize
from capfold.measures import (
    ConformalDomain,
    disk_quadrature,
    pullback_measure,
    sphere_quadrature,
)


@pytest.fixture(scope="session")
def uniform_disk():
    return disk_quadrature(96, 192)


@pytest.fixture(scope="session")
def bent_domain():
    """The workhorse asymmetric domain z + 0.3 z^2."""
    return ConformalDomain([1.0, 0.3])


@pytest.fixture(scope="session")
def bent_canonical(bent_domain):
    """Canonicalized pullback measure of z + 0.3 z^2 with its transform."""
    raw = pullback_measure(bent_domain, 96, 192)
    return canonicalize(raw)


@pytest.fixture(scope="session")
def sphere3_uniform():
    g = sphere_quadrature(3, resolution=16)
    return g.scaled(1.0 / g.total_mass)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
