"""Shared fixtures: geometries, targets, and cached state builds."""

import numpy as np
import pytest

from boxsqueeze.families import (
    build_discretized_state,
    build_theta_state,
    build_truncated_gaussian,
    build_well_adapted,
    gaussian_density,
    sharp_cut_gaussian_fixture,
)
from boxsqueeze.geometry import ClassicalTarget, IntervalGeometry


@pytest.fixture(scope="session")
def geom():
    return IntervalGeometry()


@pytest.fixture(scope="session")
def origin_target(geom):
    return ClassicalTarget.make(geom, 0.0, 0.0)


@pytest.fixture(scope="session")
def moving_target(geom):
    return ClassicalTarget.make(geom, 0.3, 2.0)


@pytest.fixture(scope="session")
def gauss_state(geom, origin_target):
    return build_truncated_gaussian(geom, origin_target, 0.05, 0.02)


@pytest.fixture(scope="session")
def gauss_state_moving(geom, moving_target):
    return build_truncated_gaussian(geom, moving_target, 0.05, 0.02)


@pytest.fixture(scope="session")
def theta_state_8(geom, origin_target):
    return build_theta_state(geom, origin_target, 8.0)


@pytest.fixture(scope="session")
def theta_state_moving(geom, moving_target):
    return build_theta_state(geom, moving_target, 4.0)


@pytest.fixture(scope="session")
def disc_state_10(geom):
    target = ClassicalTarget.make(geom, 0.3, 3.3 * np.pi)
    return build_discretized_state(geom, target, gaussian_density(), 10.0)


@pytest.fixture(scope="session")
def well_state(geom):
    target = ClassicalTarget.make(geom, 0.2, 4.0)
    return build_well_adapted(geom, target, inner="theta", alpha=4.0)


@pytest.fixture(scope="session")
def sharpcut_state(geom, moving_target):
    return sharp_cut_gaussian_fixture(geom, moving_target, 0.1, K=512)
