import numpy as np
import pytest

from scalarlab.errors import ResolutionError
from scalarlab.flow.oracle import (
    MixerOracleState,
    mixer_oracle_step,
    stripe_pattern,
    two_cell_state,
)


def test_step_zero_exact_halves():
    state = two_cell_state(1250, 875)
    nxt = mixer_oracle_step(state)
    counts = nxt.cell_counts(1)
    per_cell = (1250 // 5) * (875 // 5)
    assert counts.shape == (5, 5)
    assert np.all(counts * 2 == per_cell)


@pytest.mark.parametrize("steps", [1, 2, 3])
def test_exact_halves_at_depth(steps):
    state = two_cell_state(1250, 875)
    for _ in range(steps):
        state = mixer_oracle_step(state)
    counts = state.cell_counts(steps)
    n = 5 ** steps
    per_cell = (1250 // n) * (875 // n)
    assert per_cell % 2 == 0
    assert np.all(counts * 2 == per_cell)


def test_permutation_fixes_constants_and_mass():
    ones = MixerOracleState(np.ones((875, 1250), dtype=np.uint8))
    assert np.all(mixer_oracle_step(ones).data == 1)
    rng = np.random.default_rng(5)
    noisy = MixerOracleState((rng.random((875, 1250)) < 0.37).astype(np.uint8))
    stepped = mixer_oracle_step(noisy)
    assert stepped.total_mass() == noisy.total_mass()
    assert sorted(np.unique(stepped.data)) == sorted(np.unique(noisy.data))


def test_pattern_matches_analytic_stripes():
    state = two_cell_state(1250, 875)
    xs = (np.arange(1250) + 0.5) * np.sqrt(2.0) / 1250
    for level in (1, 2, 3):
        state = mixer_oracle_step(state)
        expected = stripe_pattern(level, xs)
        assert np.all(state.data == expected[None, :].astype(np.uint8))


def test_resolution_exhaustion():
    state = MixerOracleState(np.zeros((7, 10), dtype=np.uint8), level=1)
    with pytest.raises(ResolutionError):
        mixer_oracle_step(state)


def test_two_cell_values():
    state = two_cell_state(1250, 875)
    assert state.cell_averages(0)[0, 0] == 0.5
