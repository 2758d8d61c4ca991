"""Result bundles shared by the command-line front end."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

ROUTES = ("closed-form", "matrix-oracle", "quadrature", "reported")


@dataclass
class Result:
    value: Any
    route: str
    tolerance: Optional[float] = None

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")


@dataclass
class Pair:
    first: str
    second: str
    tolerance: float
    difference: float

    @property
    def agree(self) -> bool:
        return self.difference <= self.tolerance


@dataclass
class ReportBundle:
    command: str
    params: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    pairs: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    paper_refs: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    curves: Optional[dict] = None

    def add(self, name: str, value, route: str, tolerance: Optional[float] = None) -> None:
        self.results[name] = Result(value, route, tolerance)

    def pair(self, first: str, second: str, tolerance: float) -> Pair:
        """Record that two results computed by different routes must agree."""
        a = self.results[first].value
        b = self.results[second].value
        p = Pair(first, second, tolerance, abs(float(a) - float(b)))
        self.results[first].tolerance = self.results[first].tolerance or tolerance
        self.results[second].tolerance = self.results[second].tolerance or tolerance
        self.pairs.append(p)
        return p

    @property
    def discrepant(self) -> bool:
        return any(not p.agree for p in self.pairs)

    # ------------------------------------------------------------------ output

    def to_json_obj(self) -> dict:
        obj = {
            "command": self.command,
            "params": {k: encode(v) for k, v in self.params.items()},
            "results": {
                k: {"value": encode(r.value), "route": r.route, "tolerance": r.tolerance}
                for k, r in self.results.items()
            },
            "pairs": [
                {"first": p.first, "second": p.second, "tolerance": p.tolerance,
                 "difference": p.difference, "agree": p.agree}
                for p in self.pairs
            ],
            "verdicts": {k: encode(v) for k, v in self.verdicts.items()},
            "paper_refs": list(self.paper_refs),
            "discrepant": self.discrepant,
        }
        if self.notes:
            obj["notes"] = list(self.notes)
        if self.curves is not None:
            obj["curves"] = self.curves
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value", "route", "tolerance"])
        for k, r in self.results.items():
            w.writerow([k, format_value(r.value), r.route, "" if r.tolerance is None else r.tolerance])
        return buf.getvalue()

    def to_table(self) -> str:
        lines = [f"== {self.command} =="]
        if self.params:
            lines.append("params: " + ", ".join(f"{k}={format_value(v)}" for k, v in self.params.items()))
        width = max((len(k) for k in self.results), default=0)
        for k, r in self.results.items():
            lines.append(f"  {k:<{width}}  {format_value(r.value):>22}  [{r.route}]")
        if self.pairs:
            lines.append("route checks:")
            for p in self.pairs:
                status = "ok" if p.agree else "DISCREPANT"
                lines.append(f"  {p.first} vs {p.second}: |diff|={p.difference:.3g} tol={p.tolerance:g} {status}")
        if self.verdicts:
            lines.append("verdicts:")
            for k, v in self.verdicts.items():
                lines.append(f"  {k}: {format_value(v)}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        return self.to_table()


def encode(v):
    """JSON encoding: Fractions become ``"num/den"`` strings."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, (list, tuple)):
        return [encode(x) for x in v]
    if isinstance(v, dict):
        return {k: encode(x) for k, x in v.items()}
    if hasattr(v, "value") and isinstance(getattr(v, "value"), str):
        return v.value
    return float(v)


def decode(v):
    """Inverse of :func:`encode` for parameter values."""
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    if isinstance(v, list):
        return [decode(x) for x in v]
    return v


def format_value(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator} ({float(v):.12g})"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(format_value(x) for x in v) + ")"
    return str(v)
