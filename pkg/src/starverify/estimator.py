"""Scikit-learn style front end for batch robustness verification.

`SpikeRobustnessVerifier` treats rows of ``X`` as clean reference signals.
Each row is verified against one spike fault: at a fixed time index when
`fault_location` is given, otherwise at a per-row location drawn
deterministically from `random_state` (campaign semantics). `predict`
returns the per-signal robust/violated verdicts, `score_samples` the
per-signal Percentage Robustness, and `score` its mean, so the verifier
drops into pipelines, grid searches and cross-validation tooling unchanged.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._faults import generate_campaign
from ._metrics import GRADE_VARIANTS, ThresholdBand, build_report
from ._reach import DEFAULT_SPLIT_BUDGET, reach_network
from ._star import from_spike_fault
from .io import load_model


class SpikeRobustnessVerifier(BaseEstimator):
    """Verify spike-fault robustness of a signal reconstruction network.

    Parameters
    ----------
    network : Network or str, default=None
        The model to verify, or a path to a model JSON file.
    tau : float, default=0.05
        Acceptable deviation around each reference signal.
    amp_magnitude : float, default=0.3
        Spike amplitudes range over ``[-amp_magnitude, +amp_magnitude]``.
    fault_location : int or None, default=None
        Fixed fault index; None draws one location per row from
        `random_state`.
    method : {"exact", "approx"}, default="exact"
        Reachability method.
    grade_variant : {"band_exceedance", "from_reference"}, default="band_exceedance"
        Which Un-robustness Grade `decision_grades` reports.
    random_state : int, default=0
        Seed for per-row fault placement when `fault_location` is None.
    split_budget : int, default=10000
        Maximum star count for the exact method.

    Attributes
    ----------
    network_ : Network
        The resolved, validated network.
    n_features_in_ : int
        Signal length seen during `fit`.
    """

    def __init__(self, network=None, tau=0.05, amp_magnitude=0.3, fault_location=None,
                 method="exact", grade_variant="band_exceedance", random_state=0,
                 split_budget=DEFAULT_SPLIT_BUDGET):
        self.network = network
        self.tau = tau
        self.amp_magnitude = amp_magnitude
        self.fault_location = fault_location
        self.method = method
        self.grade_variant = grade_variant
        self.random_state = random_state
        self.split_budget = split_budget

    def _resolve_network(self):
        if self.network is None:
            raise ValueError("network must be set (a Network or a model JSON path)")
        net = load_model(self.network) if isinstance(self.network, str) else self.network
        problems = net.validate()
        if problems:
            raise ValueError("invalid network: " + "; ".join(problems))
        return net

    def fit(self, X, y=None):
        """Validate the signals against the network; no training happens."""
        X = check_array(X, dtype=float)
        if self.grade_variant not in GRADE_VARIANTS:
            raise ValueError(f"grade_variant must be one of {GRADE_VARIANTS}")
        if not float(self.tau) > 0.0:
            raise ValueError("tau must be positive")
        if float(self.amp_magnitude) < 0.0:
            raise ValueError("amp_magnitude must be nonnegative")
        net = self._resolve_network()
        if X.shape[1] != net.input_dim:
            raise ValueError(
                f"X has {X.shape[1]} samples per signal, network expects {net.input_dim}"
            )
        if self.fault_location is not None and not 0 <= int(self.fault_location) < net.input_dim:
            raise ValueError(
                f"fault_location {self.fault_location} outside [0, {net.input_dim})"
            )
        self.network_ = net
        self.n_features_in_ = X.shape[1]
        return self

    def _locations(self, n_rows: int) -> np.ndarray:
        if self.fault_location is not None:
            return np.full(n_rows, int(self.fault_location))
        campaign = generate_campaign(
            [str(i) for i in range(n_rows)], self.n_features_in_,
            float(self.amp_magnitude), int(self.random_state),
        )
        return np.array([e.fault.location for e in campaign.entries])

    def _reports(self, X):
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} samples per signal, expected {self.n_features_in_}"
            )
        amp = float(self.amp_magnitude)
        reports = []
        for row, location in zip(X, self._locations(X.shape[0])):
            star = from_spike_fault(row, int(location), -amp, amp)
            result = reach_network(self.network_, star, self.method, self.split_budget)
            band = ThresholdBand(reference=row, tau=float(self.tau))
            reports.append(build_report(result.union_bounds, band))
        return reports

    def predict(self, X) -> np.ndarray:
        """Boolean verdict per signal: True when fully robust."""
        check_is_fitted(self)
        return np.array([r.verdict == "robust" for r in self._reports(X)])

    def score_samples(self, X) -> np.ndarray:
        """Percentage Robustness per signal, in [0, 1]."""
        check_is_fitted(self)
        return np.array([r.percentage_robustness for r in self._reports(X)])

    def decision_grades(self, X) -> np.ndarray:
        """Un-robustness Grade per signal, using `grade_variant`."""
        check_is_fitted(self)
        key = (
            "grade_band_exceedance"
            if self.grade_variant == "band_exceedance"
            else "grade_from_reference"
        )
        return np.array([getattr(r, key) for r in self._reports(X)])

    def score(self, X, y=None) -> float:
        """Mean Percentage Robustness over the rows of X."""
        return float(np.mean(self.score_samples(X)))

    def verify_signal(self, signal, fault_location=None):
        """Full report for one signal; returns a RobustnessReport."""
        check_is_fitted(self)
        signal = np.asarray(signal, dtype=float)
        location = self.fault_location if fault_location is None else fault_location
        if location is None:
            location = int(self._locations(1)[0])
        amp = float(self.amp_magnitude)
        star = from_spike_fault(signal, int(location), -amp, amp)
        result = reach_network(self.network_, star, self.method, self.split_budget)
        band = ThresholdBand(reference=signal, tau=float(self.tau))
        return build_report(result.union_bounds, band)
