"""Run records: one BO run, step by step, stored as JSON Lines.

The first line is a header with run metadata; every later line is one step.
Floats are written with ``json`` (shortest repr), so reading a record back
reproduces hyperparameters bit for bit.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from prb_bayesopt.config import DEFAULT_NUM_FEATURES
from prb_bayesopt.errors import CorruptRecordError
from prb_bayesopt.models import Dataset, GPHyperparams, Link

_STEP_KEYS = ("run_id", "seed", "t", "x", "y", "hyperparams", "incumbent", "acq_value")
_HEADER_KEYS = ("run_id", "seed", "objective", "dim", "noise", "budget", "initial_design")


@dataclass(frozen=True)
class StepEntry:
    """State after t evaluations; model fields are None before the initial design ends."""

    t: int
    x: tuple[float, ...]
    y: float
    hyperparams: dict[str, Any] | None = None
    incumbent: tuple[float, ...] | None = None
    acq_value: float | None = None  # acquisition value of the query made at step t + 1


@dataclass
class RunRecord:
    run_id: str
    seed: int
    objective: str
    dim: int
    noise_variance: float
    budget: int
    initial_design: int
    link: Link = Link.IDENTITY
    valid: bool = True
    error: str | None = None
    num_features: int = DEFAULT_NUM_FEATURES  # random features behind a GP-draw objective
    steps: list[StepEntry] = field(default_factory=list)

    @property
    def last_step(self) -> int:
        return self.steps[-1].t if self.steps else 0

    def dataset(self, t: int | None = None) -> Dataset:
        """Observations of the first ``t`` steps (all of them by default)."""
        steps = self.steps if t is None else self.steps[:t]
        if not steps:
            return Dataset.empty(self.dim)
        return Dataset(np.array([s.x for s in steps]), np.array([s.y for s in steps]))

    def step(self, t: int) -> StepEntry:
        if not 1 <= t <= len(self.steps):
            raise IndexError(f"step {t} outside 1..{len(self.steps)}")
        return self.steps[t - 1]

    def hyperparams_at(self, t: int) -> GPHyperparams | None:
        logged = self.step(t).hyperparams
        if logged is None:
            return None
        return GPHyperparams.from_dict(logged, self.link)


def record_path(out_dir: str | Path, run_id: str) -> Path:
    """``<run_id>.jsonl`` under ``out_dir``; run ids carry objective, dim, noise, and seed."""
    return Path(out_dir) / f"{run_id}.jsonl"


def _header(record: RunRecord) -> dict[str, Any]:
    return {
        "run_id": record.run_id,
        "seed": record.seed,
        "objective": record.objective,
        "dim": record.dim,
        "noise": record.noise_variance,
        "budget": record.budget,
        "initial_design": record.initial_design,
        "link": record.link.value,
        "valid": record.valid,
        "error": record.error,
        "features": record.num_features,
    }


def _step_line(record: RunRecord, step: StepEntry) -> dict[str, Any]:
    return {
        "run_id": record.run_id,
        "seed": record.seed,
        "t": step.t,
        "x": list(step.x),
        "y": step.y,
        "hyperparams": step.hyperparams,
        "incumbent": None if step.incumbent is None else list(step.incumbent),
        "acq_value": step.acq_value,
    }


def write_record(record: RunRecord, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(_header(record)) + "\n")
        for step in record.steps:
            f.write(json.dumps(_step_line(record, step)) + "\n")
    return path


def _parse_step(raw: dict[str, Any]) -> StepEntry:
    incumbent = raw["incumbent"]
    return StepEntry(
        t=int(raw["t"]),
        x=tuple(float(v) for v in raw["x"]),
        y=float(raw["y"]),
        hyperparams=raw["hyperparams"],
        incumbent=None if incumbent is None else tuple(float(v) for v in incumbent),
        acq_value=None if raw["acq_value"] is None else float(raw["acq_value"]),
    )


def read_record(path: str | Path) -> RunRecord:
    """Load a run record.

    Raises:
        CorruptRecordError: If the file is empty, a line is not JSON, a field
            is missing, or the steps are not numbered 1, 2, ... in order.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as exc:
        raise CorruptRecordError(f"{path}: invalid JSON ({exc})") from exc
    if not lines:
        raise CorruptRecordError(f"{path}: empty record")

    header, raw_steps = lines[0], lines[1:]
    missing = [key for key in _HEADER_KEYS if key not in header]
    if missing:
        raise CorruptRecordError(f"{path}: header lacks {', '.join(missing)}")
    try:
        steps = []
        for raw in raw_steps:
            absent = [key for key in _STEP_KEYS if key not in raw]
            if absent:
                raise CorruptRecordError(f"{path}: step lacks {', '.join(absent)}")
            steps.append(_parse_step(raw))
        record = RunRecord(
            run_id=str(header["run_id"]),
            seed=int(header["seed"]),
            objective=str(header["objective"]),
            dim=int(header["dim"]),
            noise_variance=float(header["noise"]),
            budget=int(header["budget"]),
            initial_design=int(header["initial_design"]),
            link=Link(header.get("link", Link.IDENTITY.value)),
            valid=bool(header.get("valid", True)),
            error=header.get("error"),
            num_features=int(header.get("features", DEFAULT_NUM_FEATURES)),
            steps=steps,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, CorruptRecordError):
            raise
        raise CorruptRecordError(f"{path}: malformed field ({exc})") from exc

    if [s.t for s in record.steps] != list(range(1, len(record.steps) + 1)):
        raise CorruptRecordError(f"{path}: steps are not contiguous from t = 1")
    if any(len(s.x) != record.dim for s in record.steps):
        raise CorruptRecordError(f"{path}: a query point does not have dimension {record.dim}")
    return record


def read_records(directory: str | Path) -> list[RunRecord]:
    """Every ``*.jsonl`` record in a directory, sorted by file name."""
    return [read_record(path) for path in sorted(Path(directory).glob("*.jsonl"))]
