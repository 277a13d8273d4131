"""File-protocol adapter wrapping an external simulator process.

Protocol per evaluation, rooted in the adapter workdir:

  input.json   {"hardpoints": {name: [x, y, z]}, "sweep": {"half_range": h,
                "samples": n}, "track_width": w}
  output.json  {statistic name: value}

The process is invoked with the given argv, must exit 0 and write every
declared output statistic. Failures (nonzero exit, timeout, malformed
output) raise EvaluationError, which the solver's exclusion policy handles.
"""

from __future__ import annotations

import json
import subprocess
from pathlib import Path

import numpy as np

from .errors import EvaluationError
from .gp import DomainBounds
from .kinematics import (
    DEFAULT_TRACK_WIDTH,
    DesignVariables,
    HardpointSet,
    default_travel_grid,
)

DEFAULT_TIMEOUT = 600.0


class ExternalModel:
    """Discipline model backed by an external process. Calls are serialized
    per workdir; use distinct workdirs for concurrent evaluation."""

    is_pure = False

    def __init__(
        self,
        command,
        workdir,
        base: HardpointSet,
        design: DesignVariables,
        output_names=("bump_steer", "roll_steer", "static_toe"),
        timeout: float = DEFAULT_TIMEOUT,
        sweep_half_range: float = 0.08,
        sweep_samples: int = 33,
        track_width: float = DEFAULT_TRACK_WIDTH,
        name: str = "external",
    ):
        self.command = [str(c) for c in command]
        if not self.command:
            raise ValueError("command must be a non-empty argv list")
        self.workdir = Path(workdir)
        self.workdir.mkdir(parents=True, exist_ok=True)
        self.base = base
        self.design = design
        self.output_names = tuple(output_names)
        self.timeout = float(timeout)
        self.sweep_half_range = float(sweep_half_range)
        self.sweep_samples = int(sweep_samples)
        self.track_width = float(track_width)
        self.name = name

    @property
    def bounds(self) -> DomainBounds:
        return self.design.bounds

    @property
    def variable_names(self) -> tuple[str, ...]:
        return self.design.names

    def evaluate(self, point: np.ndarray) -> dict[str, float]:
        hardpoints = self.design.apply(self.base, np.asarray(point, dtype=float))
        query = {
            "hardpoints": hardpoints.as_dict(),
            "sweep": {
                "half_range": self.sweep_half_range,
                "samples": self.sweep_samples,
            },
            "track_width": self.track_width,
        }
        (self.workdir / "input.json").write_text(json.dumps(query, indent=2))
        output_path = self.workdir / "output.json"
        if output_path.exists():
            output_path.unlink()

        try:
            proc = subprocess.run(
                self.command,
                cwd=self.workdir,
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired:
            raise EvaluationError(
                f"external model timed out after {self.timeout:.0f} s"
            ) from None
        except OSError as exc:
            raise EvaluationError(f"could not launch external model: {exc}") from exc
        if proc.returncode != 0:
            stderr = proc.stderr.strip()
            raise EvaluationError(
                f"external model exited with status {proc.returncode}"
                + (f": {stderr}" if stderr else "")
            )

        try:
            payload = json.loads(output_path.read_text())
        except FileNotFoundError:
            raise EvaluationError("external model wrote no output.json") from None
        except json.JSONDecodeError as exc:
            raise EvaluationError(f"output.json is not valid JSON: {exc}") from exc
        try:
            return {name: float(payload[name]) for name in self.output_names}
        except (KeyError, TypeError, ValueError) as exc:
            raise EvaluationError(f"output.json is malformed: {exc!r}") from exc


def external_adapter(command, workdir, base, design, **kwargs) -> ExternalModel:
    """Functional constructor mirroring the other model factories."""
    return ExternalModel(command, workdir, base, design, **kwargs)


def run_protocol_request(io_dir, base: HardpointSet, track_width: float) -> dict:
    """Serve one input.json -> output.json exchange using the built-in model.

    Used by the CLI so the external adapter can wrap this package itself.
    Values present in input.json override the fixture defaults.
    """
    from .kinematics import curve_statistics, evaluate_kinematics

    io_dir = Path(io_dir)
    request_path = io_dir / "input.json"
    try:
        request = json.loads(request_path.read_text())
    except FileNotFoundError:
        raise EvaluationError(f"no input.json in {io_dir}") from None
    except json.JSONDecodeError as exc:
        raise EvaluationError(f"input.json is not valid JSON: {exc}") from exc

    hardpoints = (
        HardpointSet.from_dict(request["hardpoints"])
        if "hardpoints" in request
        else base
    )
    sweep = request.get("sweep", {})
    grid = default_travel_grid(
        float(sweep.get("half_range", 0.08)), int(sweep.get("samples", 33))
    )
    width = float(request.get("track_width", track_width))
    stats = curve_statistics(evaluate_kinematics(hardpoints, grid), width)
    payload = stats.as_dict()
    (io_dir / "output.json").write_text(json.dumps(payload, indent=2))
    return payload
