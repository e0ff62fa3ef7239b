"""Shared fixtures: kernel profiles and acceptance runs are built once."""

import pytest

from sqgkit.contracts import VerifyContext
from sqgkit.kernel import build_profile


@pytest.fixture(scope="session")
def verify_ctx():
    """One shared cache of profiles and acceptance runs for the whole suite."""
    return VerifyContext()


@pytest.fixture(scope="session")
def profile_a1():
    return build_profile(1.0)


@pytest.fixture(scope="session")
def profile_a2():
    return build_profile(2.0)


@pytest.fixture(scope="session")
def profile_a05():
    return build_profile(0.5)


@pytest.fixture(scope="session")
def profile_a075():
    return build_profile(0.75)


@pytest.fixture(scope="session")
def profile_a05_far():
    # wide table: the leading-order tail only reaches percent-level accuracy
    # at radii ~ alpha-dependent thousands for heavy tails
    return build_profile(0.5, r_max=8000.0, quad_tol=1e-7)
