import pytest

from polycanon.experiments import ExperimentSpec, run


@pytest.fixture(scope="session")
def reports():
    """Run each experiment at most once per test session, on demand."""
    cache = {}

    def get(name, seed=42, **overrides):
        key = (name, seed, tuple(sorted(overrides.items())))
        if key not in cache:
            cache[key] = run(ExperimentSpec(name, seed, overrides))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def canonical():
    from polycanon.experiments._common import canonical_piece
    return canonical_piece(42)
