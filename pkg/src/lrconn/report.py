"""Check results, task reports and deterministic rendering."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import List, Optional

TOOL_VERSION = "0.1.0"

# layout and normalization constants; hashed into every report header so that
# stored reference files invalidate loudly if any convention changes
CONVENTIONS = {
    "christoffel_layout": "gamma[i][mu][nu] = coefficient of v_nu in nabla_{X_i} v_mu",
    "curvature": "R_ij = X_i(G_j) - X_j(G_i) + G_j G_i - G_i G_j - sum_k c_ij^k G_k",
    "end_connection": "D_i(phi) = X_i(phi) + phi G_i - G_i phi",
    "defect_square": "[C,C](i,j) = C_i C_j - C_j C_i, defect = ddr(C) + sign*[C,C]",
    "perturbation_square": "(i,j) -> eta_j eta_i - eta_i eta_j",
    "gauge_layout": "gauge matrices act on column vectors; christoffel data transposed at the boundary",
    "koszul": "2 sum_m gamma[i][j][m] G_mk = rhs(i,j,k)",
    "default_order": "grevlex",
}


def conventions_hash(order: str = "grevlex") -> str:
    payload = dict(CONVENTIONS)
    payload["active_order"] = order
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class Check:
    """One verified statement: name, outcome, witnesses for failures (or context)."""

    name: str
    passed: bool
    witnesses: List[str] = field(default_factory=list)
    info: bool = False  # informational entries never fail a run

    @property
    def status(self) -> str:
        if self.info:
            return "info"
        return "pass" if self.passed else "fail"


@dataclass
class TaskReport:
    task: str
    checks: List[Check] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        if all(c.passed or c.info for c in self.checks):
            return "pass"
        return "fail"

    def counts(self):
        ok = sum(1 for c in self.checks if c.passed and not c.info)
        bad = sum(1 for c in self.checks if not c.passed and not c.info)
        info = sum(1 for c in self.checks if c.info)
        return ok, bad, info


@dataclass
class Report:
    scenario: str
    order: str
    tasks: List[TaskReport] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if any(t.error is not None for t in self.tasks):
            return 2
        return 0 if all(t.status == "pass" for t in self.tasks) else 1

    def header_lines(self) -> List[str]:
        return [
            f"lrconn {TOOL_VERSION}",
            f"scenario: {self.scenario}",
            f"monomial order: {self.order}",
            f"conventions: {conventions_hash(self.order)}",
        ]

    def to_text(self) -> str:
        lines = self.header_lines()
        for t in self.tasks:
            ok, bad, info = t.counts()
            tally = f"{ok} pass" + (f", {bad} fail" if bad else "") + (f", {info} info" if info else "")
            if t.error is not None:
                lines.append(f"[error] {t.task}: {t.error}")
                continue
            lines.append(f"[{t.status}] {t.task} ({tally})")
            for c in t.checks:
                if c.status == "pass":
                    lines.append(f"    pass  {c.name}")
                else:
                    lines.append(f"    {c.status:<5} {c.name}")
                for w in c.witnesses:
                    lines.append(f"          {w}")
        lines.append(f"result: {'PASS' if self.exit_code == 0 else 'FAIL' if self.exit_code == 1 else 'ERROR'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "tool": "lrconn",
            "version": TOOL_VERSION,
            "scenario": self.scenario,
            "monomial_order": self.order,
            "conventions": conventions_hash(self.order),
            "tasks": [
                {
                    "task": t.task,
                    "status": t.status,
                    **({"error": t.error} if t.error is not None else {}),
                    "checks": [
                        {"name": c.name, "status": c.status, "witnesses": list(c.witnesses)}
                        for c in t.checks
                    ],
                }
                for t in self.tasks
            ],
            "exit_code": self.exit_code,
        }
