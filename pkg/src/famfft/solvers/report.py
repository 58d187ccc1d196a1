"""Uniform result record shared by the solvers and the command line."""
from __future__ import annotations

import json
from dataclasses import dataclass, field


def _plain(value):
    # exact decimal strings for integers so large counts survive JSON readers
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


@dataclass
class SolveReport:
    problem: str
    answer: object
    tier: str
    fallbacks: list = field(default_factory=list)
    domain_size: int = 0
    moduli: tuple = ()
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)
    verified: bool | None = None

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "problem": self.problem,
            "answer": _plain(self.answer),
            "tier": self.tier,
            "fallbacks": list(self.fallbacks),
            "domain_size": _plain(self.domain_size),
            "moduli": _plain(list(self.moduli)),
            "details": _plain(self.details),
            "verified": self.verified,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    def to_text(self, timing: bool = True) -> str:
        d = self.to_dict(timing)
        lines = []
        for key in ("problem", "answer", "tier", "fallbacks", "domain_size", "moduli", "verified", "wall_time"):
            if key not in d:
                continue
            v = d[key]
            if isinstance(v, list):
                v = ",".join(str(x) for x in v) or "-"
            lines.append(f"{key}={'none' if v is None else v}")
        for k, v in sorted(d["details"].items()):
            lines.append(f"{k}={v}")
        return "\n".join(lines)
