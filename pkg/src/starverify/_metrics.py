"""Robustness metrics: per-instance verdicts against a threshold band.

An output-bound profile is robust when, at every time instance, the
reachable interval stays inside ``reference +- tau``. Two failure grades
are exposed because they answer different questions:

* ``band_exceedance``: worst overshoot past the permissible band, divided
  by tau. Zero exactly when fully robust.
* ``from_reference``: worst deviation of a bound from the reference signal
  itself, divided by tau. At most 1 exactly when fully robust.

Comparisons use closed inequalities with a 1e-9 slack so LP round-off at
exactly touching bounds cannot flip a verdict; the exceedance values are
floored to zero below the same slack to keep verdict, percentage and
grade logically consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exceptions import DimensionError
from ._star import Bounds
from ._validation import as_vector

WITHIN_SLACK = 1e-9

GRADE_VARIANTS = ("band_exceedance", "from_reference")


@dataclass(frozen=True)
class ThresholdBand:
    """Corridor ``reference +- tau`` that output bounds must stay inside."""

    reference: np.ndarray
    tau: float

    def __post_init__(self):
        reference = as_vector(self.reference, "reference")
        tau = float(self.tau)
        if not tau > 0.0:
            raise DimensionError("tau", f"must be positive, got {tau}")
        object.__setattr__(self, "reference", reference)
        object.__setattr__(self, "tau", tau)

    @property
    def band_lower(self) -> np.ndarray:
        return self.reference - self.tau

    @property
    def band_upper(self) -> np.ndarray:
        return self.reference + self.tau

    @property
    def dim(self) -> int:
        return self.reference.shape[0]


@dataclass(frozen=True)
class InstanceVerdict:
    index: int
    out_lower: float
    out_upper: float
    band_lower: float
    band_upper: float
    within: bool
    exceedance: float


@dataclass(frozen=True)
class RobustnessReport:
    per_instance: tuple
    percentage_robustness: float
    grade_band_exceedance: float
    grade_from_reference: float
    worst_index: int
    verdict: str  # "robust" | "violated"


def _check_dims(bounds: Bounds, band: ThresholdBand):
    if bounds.dim != band.dim:
        raise DimensionError(
            "bounds", f"bounds have {bounds.dim} instances, band has {band.dim}"
        )


def _band_exceedances(bounds: Bounds, band: ThresholdBand) -> np.ndarray:
    raw = np.maximum(band.band_lower - bounds.lower, bounds.upper - band.band_upper)
    raw = np.maximum(raw, 0.0)
    raw[raw <= WITHIN_SLACK] = 0.0
    return raw


def percentage_robustness(bounds: Bounds, band: ThresholdBand) -> float:
    """Fraction of time instances whose output bounds sit inside the band."""
    _check_dims(bounds, band)
    within = _band_exceedances(bounds, band) == 0.0
    return float(np.count_nonzero(within)) / band.dim


def unrobustness_grade(bounds: Bounds, band: ThresholdBand,
                       variant: str = "band_exceedance"):
    """Worst-case deviation grade and its time instance.

    Ties pick the lowest index. See the module docstring for the two
    variants.
    """
    _check_dims(bounds, band)
    if variant not in GRADE_VARIANTS:
        raise DimensionError("variant", f"must be one of {GRADE_VARIANTS}, got {variant!r}")
    if variant == "band_exceedance":
        deviations = _band_exceedances(bounds, band)
    else:
        deviations = np.maximum(band.reference - bounds.lower, bounds.upper - band.reference)
    worst_index = int(np.argmax(deviations))
    return float(deviations[worst_index] / band.tau), worst_index


def build_report(bounds: Bounds, band: ThresholdBand) -> RobustnessReport:
    """Full per-instance report; the default grade variant fixes worst_index."""
    _check_dims(bounds, band)
    exceedances = _band_exceedances(bounds, band)
    within = exceedances == 0.0
    grade_band, worst_index = unrobustness_grade(bounds, band, "band_exceedance")
    grade_ref, _ = unrobustness_grade(bounds, band, "from_reference")
    per_instance = tuple(
        InstanceVerdict(
            index=i,
            out_lower=float(bounds.lower[i]),
            out_upper=float(bounds.upper[i]),
            band_lower=float(band.band_lower[i]),
            band_upper=float(band.band_upper[i]),
            within=bool(within[i]),
            exceedance=float(exceedances[i]),
        )
        for i in range(band.dim)
    )
    return RobustnessReport(
        per_instance=per_instance,
        percentage_robustness=float(np.count_nonzero(within)) / band.dim,
        grade_band_exceedance=grade_band,
        grade_from_reference=grade_ref,
        worst_index=worst_index,
        verdict="robust" if bool(np.all(within)) else "violated",
    )
