"""Shared fixtures: simulator runs are expensive, so they are session-scoped."""

import pytest

from lobflow.book import SessionSpec
from lobflow.simulator import default_config, high_rate_config, run


@pytest.fixture(scope="session")
def default_run():
    """The shipped quiet-tape preset: 10,000 snapshots, seed 1001."""
    return run(default_config())


@pytest.fixture(scope="session")
def high_rate_run():
    """The shipped busy-tape preset: frequent multi-tick gaps, seed 2002."""
    return run(high_rate_config())


@pytest.fixture(scope="session")
def short_run():
    """A quick run for structural checks where scale does not matter."""
    return run(default_config(duration=1500, seed=31))


@pytest.fixture(scope="session")
def raw_spec():
    """Session layout matching raw simulator timestamps (epoch at zero)."""
    def make(duration, interval_length=30):
        return SessionSpec(
            segments=((0, duration),),
            snapshot_period=3,
            tick_size=0.01,
            interval_length=interval_length,
        )
    return make
