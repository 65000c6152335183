"""Spike-fault model and deterministic fault campaigns.

A spike fault is a single-sample additive perturbation with a bounded
amplitude at one time index. Campaigns place exactly one fault per signal
at a location drawn from the package PRNG, so a campaign is a pure
function of (signal ids, signal length, amplitude magnitude, seed) and
regenerates bit-identically anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exceptions import DimensionError
from ._rng import Xoshiro256StarStar
from ._star import SignalStar, from_spike_fault
from ._validation import as_vector, check_index


@dataclass(frozen=True)
class SpikeFault:
    location: int
    amp_lower: float
    amp_upper: float

    def __post_init__(self):
        if self.location < 0:
            raise DimensionError("location", "must be nonnegative")
        if self.amp_lower > self.amp_upper:
            raise DimensionError("amp_lower", "amplitude interval is inverted")

    def input_star(self, signal) -> SignalStar:
        """Star of every faulted variant of `signal` under this fault."""
        return from_spike_fault(signal, self.location, self.amp_lower, self.amp_upper)


@dataclass(frozen=True)
class CampaignEntry:
    signal_id: str
    fault: SpikeFault


@dataclass(frozen=True)
class Campaign:
    entries: tuple
    seed: int
    amp_magnitude: float

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))


def apply_fault(signal, fault: SpikeFault, amplitude: float) -> np.ndarray:
    """Concrete faulted signal: one sample shifted, the rest untouched."""
    signal = as_vector(signal, "signal")
    check_index(fault.location, signal.shape[0], "location")
    if not fault.amp_lower <= amplitude <= fault.amp_upper:
        raise DimensionError(
            "amplitude",
            f"{amplitude} outside the fault interval [{fault.amp_lower}, {fault.amp_upper}]",
        )
    out = signal.copy()
    out[fault.location] += amplitude
    return out


def generate_campaign(signal_ids, n_samples_per_signal: int, amp_magnitude: float,
                      seed: int) -> Campaign:
    """One symmetric spike fault per signal at a PRNG-drawn location."""
    signal_ids = list(signal_ids)
    if not signal_ids:
        raise DimensionError("signal_ids", "campaign needs at least one signal")
    if n_samples_per_signal <= 0:
        raise DimensionError("n_samples_per_signal", "must be positive")
    if amp_magnitude < 0:
        raise DimensionError("amp_magnitude", "must be nonnegative")
    rng = Xoshiro256StarStar(seed)
    entries = []
    for signal_id in signal_ids:
        location = rng.below(n_samples_per_signal)
        entries.append(CampaignEntry(
            signal_id=str(signal_id),
            fault=SpikeFault(location=location, amp_lower=-amp_magnitude,
                             amp_upper=amp_magnitude),
        ))
    return Campaign(entries=tuple(entries), seed=int(seed), amp_magnitude=float(amp_magnitude))
