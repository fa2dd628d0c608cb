from __future__ import annotations

import pytest

from hardstars import StarParameters, build_star


@pytest.fixture(scope="session")
def star_r01():
    return build_star(StarParameters(R=0.1, grid_n=2001))


@pytest.fixture(scope="session")
def star_r005():
    return build_star(StarParameters(R=0.05, grid_n=2001))


@pytest.fixture(scope="session")
def star_r002():
    return build_star(StarParameters(R=0.02, grid_n=2001))
