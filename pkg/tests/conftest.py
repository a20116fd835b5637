import pytest

from fisr.derive import derive_all


@pytest.fixture(scope="session")
def derivations():
    """All six (objective, iterations) derivation results, computed once."""
    return derive_all()


@pytest.fixture(scope="session")
def derived_magics(derivations):
    """The five distinct derived seed constants, in derivation order."""
    seen = dict.fromkeys(r.magic for r in derivations)
    return list(seen)
