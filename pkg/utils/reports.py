"""
Reports
=======

Schema-versioned JSON envelope for every command. ``inputs_digest`` is the
md5 of the sorted JSON of the echoed inputs, so identical invocations are
recognizable across runs.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from utils import __version__

SCHEMA = "moebius-cert/1"


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def inputs_digest(inputs: Dict[str, Any]) -> str:
    sorted_inputs = json.dumps(_jsonable(inputs), sort_keys=True)
    return hashlib.md5(sorted_inputs.encode()).hexdigest()


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any]
    results: Any
    passed: bool
    deviations: List[str] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__
    schema: str = SCHEMA

    @property
    def digest(self) -> str:
        return inputs_digest(self.inputs)

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "schema": self.schema,
            "version": self.version,
            "command": self.command,
            "inputs": _jsonable(self.inputs),
            "inputs_digest": self.digest,
            "results": _jsonable(self.results),
            "deviations": list(self.deviations),
            "passed": bool(self.passed),
        }
        if include_timing:
            data["wall_time"] = round(self.wall_time, 6)
        return data

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(
            command=data["command"],
            inputs=data["inputs"],
            results=data["results"],
            passed=data["passed"],
            deviations=list(data.get("deviations", [])),
            wall_time=data.get("wall_time", 0.0),
            version=data.get("version", __version__),
        )
