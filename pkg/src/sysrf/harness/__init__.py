"""Executable checks of the metatheory: generated programs, requirement suites, solver cross-checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .gen import GenConfig, Generator, GiveUp, random_term
from .requirements import SuiteReport, requirement_implication, requirement_primitives
from .solver_check import SolverReport, solver_run
from .soundness import (
    MUTATIONS, CountReport, SoundnessReport, canonical_forms_run, determinism_run,
    erasure_run, mutation_run, progress_preservation_run, round_trip_run, substitution_run,
)


@dataclass
class Section:
    name: str
    ok: bool
    summary: dict


@dataclass
class SelftestReport:
    sections: list[Section] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.sections)

    def add(self, name: str, ok: bool, summary: dict):
        self.sections.append(Section(name, ok, summary))

    def as_dict(self) -> dict:
        return {"ok": self.ok, "sections": [{"name": s.name, "ok": s.ok, **s.summary} for s in self.sections]}

    def text(self) -> str:
        lines = []
        for s in self.sections:
            counts = ", ".join(f"{k}={len(v) if isinstance(v, list) else v}" for k, v in s.summary.items())
            lines.append(f"{'PASS' if s.ok else 'FAIL'} {s.name}: {counts}")
        lines.append("all passed" if self.ok else "some checks failed")
        return "\n".join(lines)


def selftest(terms: int = 200, seed: int = 42) -> SelftestReport:
    out = SelftestReport()
    r = requirement_primitives()
    out.add("primitive obligations", r.ok, r.as_dict())
    r = requirement_implication(seed=seed)
    out.add("implication axioms", r.ok and r.notes["queries"] >= 1000, r.as_dict())
    s = solver_run(n=max(200, terms), seed=seed)
    out.add("solver vs enumeration", not s.disagreements and s.unknown_rate < 0.05, s.as_dict())
    cfg = GenConfig(seed=seed, terms=terms)
    p = progress_preservation_run(cfg)
    out.add("progress and preservation", p.failures == 0, p.as_dict())
    small = GenConfig(seed=seed, terms=min(terms, 100))
    for name, rep in mutation_run(small).items():
        out.add(f"mutation {name} is caught", rep.failures > 0, {"failures": rep.failures})
    for name, run in (
        ("canonical forms", canonical_forms_run),
        ("substitution", substitution_run),
        ("erasure", erasure_run),
        ("round trip", round_trip_run),
    ):
        c = run(cfg)
        out.add(name, c.ok, c.as_dict())
    d = determinism_run(n=max(1000, 10 * terms), seed=seed)
    out.add("step determinism", d.ok, d.as_dict())
    return out


__all__ = [
    "MUTATIONS", "CountReport", "GenConfig", "Generator", "GiveUp", "SelftestReport",
    "SolverReport", "SoundnessReport", "SuiteReport", "canonical_forms_run", "determinism_run",
    "erasure_run", "mutation_run", "progress_preservation_run", "random_term",
    "requirement_implication", "requirement_primitives", "round_trip_run", "selftest",
    "solver_run", "substitution_run",
]
