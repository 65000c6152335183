"""Serialization: model JSON, signal CSV, campaign/report JSON, fixtures.

Formats are deliberately boring. JSON numbers use Python's shortest
round-trip float representation, so model weights survive a save/load
cycle bit-exactly and files stay diffable. Writes go to a temporary file
followed by an atomic rename, so a crashed run never leaves a partial
file behind.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from ._exceptions import FormatError
from ._faults import Campaign, CampaignEntry, SpikeFault
from ._metrics import RobustnessReport, ThresholdBand
from ._network import DenseLayer, Network, ReluLayer
from ._star import Bounds
from ._validation import as_vector

MODEL_FORMAT_VERSION = "1"
CAMPAIGN_FORMAT_VERSION = "1"
REPORT_FORMAT_VERSION = "1"
BOUNDS_FORMAT_VERSION = "1"


# -- normalization -------------------------------------------------------------


def minmax_normalize(samples, orig_min: float, orig_max: float) -> np.ndarray:
    """Affine rescale into [0, 1] using the dataset extremes."""
    if not orig_max > orig_min:
        raise FormatError(f"orig_max ({orig_max}) must exceed orig_min ({orig_min})")
    samples = np.asarray(samples, dtype=float)
    return (samples - orig_min) / (orig_max - orig_min)


def minmax_denormalize(samples, orig_min: float, orig_max: float) -> np.ndarray:
    if not orig_max > orig_min:
        raise FormatError(f"orig_max ({orig_max}) must exceed orig_min ({orig_min})")
    samples = np.asarray(samples, dtype=float)
    return samples * (orig_max - orig_min) + orig_min


@dataclass(frozen=True)
class MinMaxNormalization:
    orig_min: float
    orig_max: float


@dataclass(frozen=True)
class SignalSet:
    """Named fixed-length signals plus how they were normalized (if at all)."""

    ids: tuple
    samples: np.ndarray  # (n_signals, n_samples)
    normalization: MinMaxNormalization | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2:
            raise FormatError(f"samples must be 2-D, got shape {samples.shape}")
        if len(self.ids) != samples.shape[0]:
            raise FormatError(
                f"{len(self.ids)} ids for {samples.shape[0]} signal rows"
            )
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "samples", samples)

    @property
    def n_signals(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    def get(self, signal_id: str) -> np.ndarray:
        try:
            row = self.ids.index(str(signal_id))
        except ValueError:
            raise FormatError(f"unknown signal id {signal_id!r}") from None
        return self.samples[row]


# -- atomic file helpers -------------------------------------------------------


def _atomic_write_text(path, text: str):
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as err:
        offset = len(raw[: err.pos].encode("utf-8"))
        raise FormatError(f"{path}: parse error at byte offset {offset}: {err.msg}") from None


def _require_version(doc, expected: str, path, kind: str):
    version = doc.get("format_version")
    if version != expected:
        raise FormatError(
            f"{path}: {kind} format_version {version!r} is not supported; "
            f"this build reads version {expected!r}"
        )


# -- model files ---------------------------------------------------------------


def save_model(network: Network, path) -> None:
    layers = []
    for layer in network.layers:
        if isinstance(layer, DenseLayer):
            layers.append({
                "type": "dense",
                "weights": [[float(v) for v in row] for row in layer.weights],
                "bias": [float(v) for v in layer.bias],
            })
        elif isinstance(layer, ReluLayer):
            layers.append({"type": "relu"})
        else:
            raise FormatError(f"cannot serialize layer type {type(layer).__name__}")
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "name": network.name,
        "input_dim": network.input_dim,
        "output_dim": network.output_dim,
        "layers": layers,
    }
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_model(path) -> Network:
    doc = _read_json(path)
    _require_version(doc, MODEL_FORMAT_VERSION, path, "model")
    try:
        input_dim = int(doc["input_dim"])
        output_dim = int(doc["output_dim"])
        raw_layers = doc["layers"]
    except KeyError as err:
        raise FormatError(f"{path}: missing required field {err.args[0]!r}") from None
    layers = []
    width = input_dim
    for i, spec in enumerate(raw_layers):
        kind = spec.get("type")
        if kind == "dense":
            layer = DenseLayer(
                weights=np.asarray(spec["weights"], dtype=float),
                bias=np.asarray(spec["bias"], dtype=float),
            )
            width = layer.output_width
        elif kind == "relu":
            layer = ReluLayer(width)
        else:
            raise FormatError(
                f"{path}: layer {i}: unknown type {kind!r}; supported types are 'dense' and 'relu'"
            )
        layers.append(layer)
    network = Network(
        layers=tuple(layers),
        input_dim=input_dim,
        output_dim=output_dim,
        name=str(doc.get("name", "network")),
    )
    problems = network.validate()
    if problems:
        raise FormatError(f"{path}: inconsistent model: " + "; ".join(problems))
    return network


# -- signal CSV ----------------------------------------------------------------


def save_signals(signal_set: SignalSet, path) -> None:
    n = signal_set.n_samples
    lines = ["id," + ",".join(f"s{i}" for i in range(n))]
    for signal_id, row in zip(signal_set.ids, signal_set.samples):
        lines.append(signal_id + "," + ",".join(repr(float(v)) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def load_signals(path) -> SignalSet:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise FormatError(f"{path}: empty signal file")
    header = rows[0]
    if not header or header[0] != "id":
        raise FormatError(f"{path}: first header column must be 'id'")
    n = len(header) - 1
    if n == 0:
        raise FormatError(f"{path}: header declares no sample columns")
    ids = []
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise FormatError(
                f"{path}: row {lineno} has {len(row) - 1} values, expected {n}"
            )
        ids.append(row[0])
        try:
            values = [float(v) for v in row[1:]]
        except ValueError as err:
            raise FormatError(f"{path}: row {lineno}: {err}") from None
        if any(math.isnan(v) or math.isinf(v) for v in values):
            raise FormatError(f"{path}: row {lineno} contains NaN or infinite samples")
        samples.append(values)
    if not ids:
        raise FormatError(f"{path}: no signal rows")
    return SignalSet(ids=tuple(ids), samples=np.asarray(samples, dtype=float))


# -- campaigns -----------------------------------------------------------------


def save_campaign(campaign: Campaign, path) -> None:
    doc = {
        "format_version": CAMPAIGN_FORMAT_VERSION,
        "seed": campaign.seed,
        "amp_magnitude": campaign.amp_magnitude,
        "entries": [
            {
                "signal_id": e.signal_id,
                "fault": {
                    "location": e.fault.location,
                    "amp_lower": e.fault.amp_lower,
                    "amp_upper": e.fault.amp_upper,
                },
            }
            for e in campaign.entries
        ],
    }
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_campaign(path) -> Campaign:
    doc = _read_json(path)
    _require_version(doc, CAMPAIGN_FORMAT_VERSION, path, "campaign")
    entries = tuple(
        CampaignEntry(
            signal_id=str(e["signal_id"]),
            fault=SpikeFault(
                location=int(e["fault"]["location"]),
                amp_lower=float(e["fault"]["amp_lower"]),
                amp_upper=float(e["fault"]["amp_upper"]),
            ),
        )
        for e in doc["entries"]
    )
    return Campaign(entries=entries, seed=int(doc["seed"]),
                    amp_magnitude=float(doc["amp_magnitude"]))


# -- recorded output-bound fixtures ---------------------------------------------


def save_bounds_fixture(reference, bounds: Bounds, path) -> None:
    reference = as_vector(reference, "reference")
    doc = {
        "format_version": BOUNDS_FORMAT_VERSION,
        "reference": [float(v) for v in reference],
        "out_lower": [float(v) for v in bounds.lower],
        "out_upper": [float(v) for v in bounds.upper],
    }
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_bounds_fixture(path):
    doc = _read_json(path)
    _require_version(doc, BOUNDS_FORMAT_VERSION, path, "bounds")
    reference = np.asarray(doc["reference"], dtype=float)
    bounds = Bounds(
        lower=np.asarray(doc["out_lower"], dtype=float),
        upper=np.asarray(doc["out_upper"], dtype=float),
    )
    if bounds.dim != reference.shape[0]:
        raise FormatError(f"{path}: reference and bounds lengths disagree")
    return reference, bounds


# -- reports -------------------------------------------------------------------


def report_document(report: RobustnessReport, band: ThresholdBand,
                    grade_variant: str = "band_exceedance", config: dict | None = None) -> dict:
    grade = (
        report.grade_band_exceedance
        if grade_variant == "band_exceedance"
        else report.grade_from_reference
    )
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "config": config,
        "verdict": report.verdict,
        "percentage_robustness": report.percentage_robustness,
        "grade_variant": grade_variant,
        "grade": grade,
        "grade_band_exceedance": report.grade_band_exceedance,
        "grade_from_reference": report.grade_from_reference,
        "worst_index": report.worst_index,
        "tau": band.tau,
        "per_instance": [
            {
                "index": v.index,
                "out_lower": v.out_lower,
                "out_upper": v.out_upper,
                "band_lower": v.band_lower,
                "band_upper": v.band_upper,
                "within": v.within,
                "exceedance": v.exceedance,
            }
            for v in report.per_instance
        ],
    }


def write_report(report: RobustnessReport, band: ThresholdBand, path,
                 grade_variant: str = "band_exceedance", config: dict | None = None) -> None:
    doc = report_document(report, band, grade_variant, config)
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
