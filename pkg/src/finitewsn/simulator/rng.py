"""Counter-based random numbers for the trial kernels.

Every random quantity of trial ``t`` is a pure function of
``(master_seed, t, counter)``: the SplitMix64 finaliser applied to
``key + (counter + 1) * gamma``.  Outcomes therefore do not depend on how
trials are scheduled across workers, and two runs that differ only in the
radius see identical node positions, activations and link coins.
"""

from __future__ import annotations

import numba
import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TRIAL_SALT = np.uint64(0x2545F4914F6CDD1D)
_LINK_SALT = np.uint64(0xD6E8FEB86659FD93)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0

_MASK64 = (1 << 64) - 1


@numba.njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(cache=True, inline="always")
def uniform(key, counter):
    """Uniform double in [0, 1) for stream ``key`` at position ``counter``."""
    z = key + (np.uint64(counter) + _ONE) * _GAMMA
    return np.float64(mix64(z) >> _S11) * _INV53


@numba.njit(cache=True)
def trial_key(master, t):
    return mix64(mix64(master ^ _TRIAL_SALT) + np.uint64(t) * _GAMMA)


@numba.njit(cache=True, inline="always")
def link_key(key):
    return mix64(key ^ _LINK_SALT)


def as_key(seed: int) -> np.uint64:
    return np.uint64(int(seed) & _MASK64)


def trial_seed(master_seed: int, t: int) -> int:
    """Seed of trial ``t``; feeding it to the samplers reproduces that trial."""
    return int(trial_key(as_key(master_seed), np.int64(t)))
