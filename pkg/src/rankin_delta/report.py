"""Structured pass/fail records and their serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["VerificationReport", "ReportEnvelope", "to_jsonable"]


def to_jsonable(obj):
    """Convert numpy scalars, Fractions and complex numbers to JSON-native values.

    Fractions become ``"p/q"`` strings, complex numbers ``[re, im]`` pairs and
    non-finite floats their string names.
    """
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


@dataclass
class VerificationReport:
    """Outcome of one verification: measured residuals against tolerances."""

    name: str
    passed: bool
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return to_jsonable({
            "name": self.name,
            "passed": self.passed,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "details": self.details,
            "elapsed": self.elapsed,
        })

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["name"], bool(d["passed"]), dict(d.get("residuals", {})),
                   dict(d.get("tolerances", {})), dict(d.get("details", {})),
                   float(d.get("elapsed", 0.0)))


@dataclass
class ReportEnvelope:
    """Everything one CLI invocation produced; ``passed`` is the conjunction of its reports."""

    command: str
    params: dict
    results: list
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self, include_timing: bool = True) -> dict:
        results = [r.to_dict() for r in self.results]
        if not include_timing:
            for r in results:
                r.pop("elapsed", None)
        d = {"command": self.command, "params": to_jsonable(self.params),
             "results": results, "pass": self.passed}
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ReportEnvelope":
        return cls(d["command"], dict(d["params"]),
                   [VerificationReport.from_dict(r) for r in d["results"]],
                   float(d.get("wall_time", 0.0)))

    def to_csv(self, include_timing: bool = True) -> str:
        """One row per (report, section, key); nested values are JSON-encoded."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["command", "report", "section", "key", "value"])
        for k, v in to_jsonable(self.params).items():
            w.writerow([self.command, "", "params", k, json.dumps(v)])
        for r in self.to_dict(include_timing)["results"]:
            w.writerow([self.command, r["name"], "passed", "", json.dumps(r["passed"])])
            for section in ("residuals", "tolerances", "details"):
                for k, v in r[section].items():
                    w.writerow([self.command, r["name"], section, k, json.dumps(v)])
        w.writerow([self.command, "", "pass", "", json.dumps(self.passed)])
        return buf.getvalue()
