"""Replaying persuasion dialogues as a sequence of labelling updates.

A scenario fixes a graph, the user's starting beliefs, the reasoning
constraints, and one or more batches of observed beliefs. Each batch is
applied together with the reasoning constraints to the previous labelling.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from .config import DEFAULT, Config
from .constraints import (ConstraintSet, LinearAtomicConstraint, Relation, generate_coherence,
                          generate_dual_average, load_constraints, parse_constraint, pin,
                          render_constraint)
from .errors import DomainError, ParseError
from .model import BAF, ProbabilityLabelling
from .solver import feasible
from .update import BOT, labelling_update

GENERATORS = {"dual_average": generate_dual_average, "coherence": generate_coherence}


@dataclass(frozen=True)
class DialogueScenario:
    baf: BAF
    initial: ProbabilityLabelling
    constraints: ConstraintSet
    observations: tuple[ConstraintSet, ...]

    def __post_init__(self):
        if self.initial.baf != self.baf or self.constraints.baf != self.baf:
            raise DomainError("scenario parts refer to different graphs")
        for phi in self.observations:
            for c in phi:
                if c.relation is not Relation.EQ or len(c.terms) != 1 or c.terms[0][1] != 1:
                    raise DomainError(f"observation {render_constraint(c)!r} is not of the form p(X) = v")


def observation(baf: BAF, arg_id: str, value) -> LinearAtomicConstraint:
    if arg_id not in baf:
        raise DomainError(f"observation names unknown argument {arg_id!r}")
    v = value if isinstance(value, Fraction) else Fraction(str(value))
    if not 0 <= v <= 1:
        raise DomainError(f"observed belief {float(v)} for {arg_id!r} is outside [0, 1]")
    return pin(arg_id, v)


def _resolve(base: Path, ref):
    return json.loads((base / ref).read_text()) if isinstance(ref, str) else ref


def load_scenario(path, *, verbatim: bool = False) -> DialogueScenario:
    """Read a scenario file; ``verbatim`` swaps in its ``verbatim_constraints`` file."""
    path = Path(path)
    base = path.parent
    try:
        doc = json.loads(path.read_text())
        baf = BAF.from_dict(_resolve(base, doc["baf"]))
        initial = ProbabilityLabelling.from_dict(baf, _resolve(base, doc["initial"]))
        source = doc.get("constraints", {"generator": "dual_average"})
        if verbatim:
            if "verbatim_constraints" not in doc:
                raise DomainError("scenario has no verbatim_constraints entry")
            cs = load_constraints(base / doc["verbatim_constraints"], baf)
        elif source["generator"] == "file":
            cs = load_constraints(base / source["path"], baf)
        elif source["generator"] in GENERATORS:
            cs = GENERATORS[source["generator"]](baf)
        else:
            raise DomainError(f"unknown constraint generator {source['generator']!r}")
        obs = tuple(
            ConstraintSet(baf, [observation(baf, o["arg"], o["value"]) for o in batch])
            for batch in doc.get("observations", [])
        )
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed scenario file: missing or invalid {exc}") from None
    return DialogueScenario(baf, initial, cs, obs)


def irreducible_conflict(cs: ConstraintSet, *, config: Config = DEFAULT) -> list[LinearAtomicConstraint]:
    """A minimal unsatisfiable subset, by dropping one constraint at a time."""
    keep = list(cs)
    i = 0
    while i < len(keep):
        trial = keep[:i] + keep[i + 1:]
        if not feasible(ConstraintSet(cs.baf, trial).polytope(), config=config):
            keep = trial
        else:
            i += 1
    return keep


@dataclass
class Step:
    index: int
    applied: list[str]
    labelling: ProbabilityLabelling | None
    delta: dict[str, float] | None
    conflict: list[str] = field(default_factory=list)

    @property
    def bot(self) -> bool:
        return self.labelling is None

    def record(self, digits: int | None = None) -> dict:
        out = {"step": self.index, "applied": self.applied, "result": "BOT" if self.bot else "labelling"}
        if self.bot:
            out["conflict"] = self.conflict
        else:
            out["labelling"] = self.labelling.to_dict(digits=digits)
            out["delta"] = {a: v if digits is None else float(f"{v:.{digits}g}") for a, v in self.delta.items()}
        return out


@dataclass
class DialogueTranscript:
    baf: BAF
    initial: ProbabilityLabelling
    steps: list[Step] = field(default_factory=list)

    @property
    def final(self) -> ProbabilityLabelling:
        for s in reversed(self.steps):
            if not s.bot:
                return s.labelling
        return self.initial

    @property
    def ended_in_bot(self) -> bool:
        return bool(self.steps) and self.steps[-1].bot

    def json_lines(self, digits: int | None = None) -> str:
        return "".join(json.dumps(s.record(digits)) + "\n" for s in self.steps)

    def table(self) -> str:
        cols = [("L0", self.initial)] + [(f"L{s.index}", s.labelling) for s in self.steps if not s.bot]
        head = ["arg"] + [c for c, _ in cols]
        if len(cols) > 1:
            head.append("delta")
        rows = [head]
        for a in self.baf.ids:
            row = [a] + [f"{L[a]:.6g}" for _, L in cols]
            if len(cols) > 1:
                row.append(f"{cols[-1][1][a] - self.initial[a]:+.6g}")
            rows.append(row)
        widths = [max(len(r[k]) for r in rows) for k in range(len(head))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        for s in self.steps:
            if s.bot:
                lines.append(f"step {s.index}: BOT; irreducible conflict:")
                lines += [f"  {c}" for c in s.conflict]
        return "\n".join(lines) + "\n"


def _delta(new: ProbabilityLabelling, old: ProbabilityLabelling) -> dict[str, float]:
    return {a: float(v) for a, v in zip(new.baf.ids, np.asarray(new.values) - np.asarray(old.values))}


def _apply(L, cs: ConstraintSet, phi: ConstraintSet, index: int, config: Config) -> Step:
    combined = cs | phi
    applied = [render_constraint(c) for c in phi]
    res = labelling_update(L, combined, config=config)
    if res is BOT:
        conflict = [render_constraint(c) for c in irreducible_conflict(combined, config=config)]
        return Step(index, applied, None, None, conflict)
    return Step(index, applied, res, _delta(res, L))


def replay(scenario: DialogueScenario, *, config: Config = DEFAULT) -> DialogueTranscript:
    """Apply each observation batch in turn; stop at the first BOT."""
    t = DialogueTranscript(scenario.baf, scenario.initial)
    L = scenario.initial
    batches = scenario.observations or (ConstraintSet(scenario.baf),)
    for i, phi in enumerate(batches, start=1):
        step = _apply(L, scenario.constraints, phi, i, config)
        t.steps.append(step)
        if step.bot:
            break
        L = step.labelling
    return t


_HELP = """commands:
  assert p(X) = v   record an observed belief (replaces an earlier one for X)
  update            update the labelling with the constraints and all observations
  show              print the current labelling and observations
  undo              revert the last assert or update
  quit              leave the session"""


def interactive_session(baf: BAF, cs: ConstraintSet, L0: ProbabilityLabelling, *,
                        stdin: IO[str], stdout: IO[str], config: Config = DEFAULT,
                        prompt: str = "> ") -> DialogueTranscript:
    """Line-oriented console over a labelling; returns the transcript of updates."""
    t = DialogueTranscript(baf, L0)
    L = L0
    obs: dict[str, LinearAtomicConstraint] = {}
    history: list[tuple] = []

    def say(text=""):
        stdout.write(text + "\n")

    def show():
        for a in baf.ids:
            say(f"  {a}: {L[a]:.6g}")
        if obs:
            say("observations: " + ", ".join(render_constraint(c) for c in obs.values()))

    say(_HELP)
    while True:
        stdout.write(prompt)
        stdout.flush()
        line = stdin.readline()
        if not line:
            break
        cmd = line.split("#", 1)[0].strip()
        if not cmd:
            continue
        word, _, rest = cmd.partition(" ")
        if word == "quit":
            break
        if word == "help":
            say(_HELP)
        elif word == "show":
            show()
        elif word == "assert":
            try:
                c = parse_constraint(rest, baf)
                if c.relation is not Relation.EQ or len(c.terms) != 1 or c.terms[0][1] != 1:
                    raise DomainError("assertions must have the form p(X) = v")
                (arg, _), = c.terms
                c = observation(baf, arg, c.bound)
            except (ParseError, DomainError) as exc:
                say(f"error: {exc}")
                continue
            history.append((L, dict(obs), len(t.steps)))
            obs[arg] = c
            say(f"noted {render_constraint(c)}")
        elif word == "update":
            phi = ConstraintSet(baf, obs.values())
            step = _apply(L, cs, phi, len(t.steps) + 1, config)
            if step.bot:
                say("BOT: the constraints and observations cannot all hold; irreducible conflict:")
                for c in step.conflict:
                    say(f"  {c}")
                continue
            history.append((L, dict(obs), len(t.steps)))
            t.steps.append(step)
            L = step.labelling
            for a in baf.ids:
                say(f"  {a}: {L[a]:.6g}  ({step.delta[a]:+.6g})")
        elif word == "undo":
            if not history:
                say("nothing to undo")
                continue
            L, obs, n_steps = history.pop()
            del t.steps[n_steps:]
            say("reverted")
        else:
            say(f"error: unknown command {word!r}; type help")
    return t
