"""JSON (de)serialization for the wire formats.

All numbers are plain decimal doubles; readers go through the validating
constructors, so malformed files surface the same named errors as direct
construction.
"""

from __future__ import annotations

import json

from .core import SignedStepKernel, StepFunction1D, StepGraphon
from .errors import StepGraphonError
from .measures import DiscreteMeasure
from .metrics import Coupling
from .multiway import MultiwayMatrixSet
from .order import EnvelopeSample


def dumps(obj, indent=None):
    """Canonical JSON for any package object or plain dict."""
    payload = obj.to_dict() if hasattr(obj, "to_dict") else obj
    return json.dumps(payload, sort_keys=True, indent=indent)


def save(obj, path, indent=2):
    with open(path, "w") as fh:
        fh.write(dumps(obj, indent=indent))
        fh.write("\n")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StepGraphonError(f"cannot read {path}: {exc}") from exc


def load_graphon(path):
    d = _load_json(path)
    try:
        if d.get("signed"):
            return SignedStepKernel(d["weights"], d["values"])
        return StepGraphon(d["weights"], d["values"])
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not a step kernel file: {exc}") from exc


def load_kernel(path):
    d = _load_json(path)
    try:
        return SignedStepKernel(d["weights"], d["values"])
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not a signed kernel file: {exc}") from exc


def load_measure(path):
    d = _load_json(path)
    try:
        return DiscreteMeasure(d["atoms"], d["masses"])
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not a measure file: {exc}") from exc


def load_coupling(path):
    d = _load_json(path)
    try:
        return Coupling.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not a coupling file: {exc}") from exc


def load_step_function(path):
    d = _load_json(path)
    try:
        return StepFunction1D.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not a step-function file: {exc}") from exc


def load_matrix_set(path):
    d = _load_json(path)
    try:
        return MultiwayMatrixSet.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not a cut-set file: {exc}") from exc


def load_envelope(path):
    d = _load_json(path)
    try:
        return EnvelopeSample.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise StepGraphonError(f"{path} is not an envelope sample file: {exc}") from exc
