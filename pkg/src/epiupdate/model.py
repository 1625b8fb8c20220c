"""Argumentation frameworks, possible worlds, distributions and labellings.

Worlds are bitmasks over the BAF's argument order: bit ``i`` set means the
``i``-th argument is accepted. A :class:`ProbabilityFunction` stores a dense
array of ``2**n`` probabilities indexed by that mask.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .config import DEFAULT, Config
from .errors import DomainError, ResourceError


@dataclass(frozen=True)
class Argument:
    id: str
    text: str = ""

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise DomainError(f"argument id must be a nonempty string, got {self.id!r}")


@dataclass(frozen=True)
class BAF:
    """Bipolar argumentation framework (arguments, attacks, supports).

    Supports are stored but carry no semantics in this package.
    """

    arguments: tuple[Argument, ...]
    attacks: tuple[tuple[str, str], ...] = ()
    supports: tuple[tuple[str, str], ...] = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        args = tuple(a if isinstance(a, Argument) else Argument(a) for a in self.arguments)
        object.__setattr__(self, "arguments", args)
        index = {}
        for i, a in enumerate(args):
            if a.id in index:
                raise DomainError(f"duplicate argument id {a.id!r}")
            index[a.id] = i
        object.__setattr__(self, "_index", index)
        for name in ("attacks", "supports"):
            pairs = tuple(tuple(p) for p in getattr(self, name))
            if len(set(pairs)) != len(pairs):
                raise DomainError(f"duplicate pair in {name}")
            for p in pairs:
                if len(p) != 2 or p[0] not in index or p[1] not in index:
                    raise DomainError(f"{name} pair {p!r} refers to an undeclared argument")
            object.__setattr__(self, name, pairs)

    @classmethod
    def of(cls, ids: Iterable[str], attacks=(), supports=()) -> "BAF":
        return cls(tuple(Argument(i) for i in ids), tuple(attacks), tuple(supports))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.arguments)

    def __len__(self):
        return len(self.arguments)

    def __contains__(self, arg_id):
        return arg_id in self._index

    def index(self, arg_id: str) -> int:
        try:
            return self._index[arg_id]
        except KeyError:
            raise DomainError(f"unknown argument {arg_id!r}") from None

    def attackers(self, arg_id: str) -> tuple[str, ...]:
        self.index(arg_id)
        found = {a for a, b in self.attacks if b == arg_id}
        return tuple(i for i in self.ids if i in found)

    def to_dict(self) -> dict:
        return {
            "arguments": [{"id": a.id, "text": a.text} if a.text else {"id": a.id} for a in self.arguments],
            "attacks": [list(p) for p in self.attacks],
            "supports": [list(p) for p in self.supports],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "BAF":
        try:
            args = []
            for a in data["arguments"]:
                if isinstance(a, str):
                    args.append(Argument(a))
                else:
                    args.append(Argument(a["id"], a.get("text", "")))
            return cls(tuple(args), tuple(map(tuple, data.get("attacks", []))),
                       tuple(map(tuple, data.get("supports", []))))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed BAF document: {exc}") from None


def check_world_cap(baf: BAF, config: Config = DEFAULT) -> None:
    if len(baf) > config.world_cap:
        raise ResourceError(
            f"{len(baf)} arguments exceed the world cap of {config.world_cap} "
            f"({2 ** len(baf)} worlds); use the labelling representation instead"
        )


@dataclass(frozen=True)
class World:
    baf: BAF
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << len(self.baf)):
            raise DomainError(f"world mask {self.mask} out of range for {len(self.baf)} arguments")

    @classmethod
    def from_members(cls, baf: BAF, members: Iterable[str]) -> "World":
        mask = 0
        for m in members:
            mask |= 1 << baf.index(m)
        return cls(baf, mask)

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(a for i, a in enumerate(self.baf.ids) if self.mask >> i & 1)

    def __contains__(self, arg_id):
        return bool(self.mask >> self.baf.index(arg_id) & 1)


def _frozen(arr):
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class ProbabilityFunction:
    """Distribution over the ``2**n`` possible worlds of a BAF."""

    __slots__ = ("baf", "probs")

    def __init__(self, baf: BAF, probs, *, config: Config = DEFAULT):
        check_world_cap(baf, config)
        p = np.array(probs, dtype=np.float64).ravel()
        if p.shape != (1 << len(baf),):
            raise DomainError(f"expected {1 << len(baf)} world probabilities, got {p.size}")
        if not np.all(np.isfinite(p)):
            raise DomainError("probabilities must be finite")
        if p.min() < -config.norm_tol:
            raise DomainError(f"negative world probability {p.min():.3g}")
        p = np.maximum(p, 0.0)
        total = p.sum()
        if abs(total - 1.0) > config.norm_tol:
            raise DomainError(f"world probabilities sum to {total!r}, not 1")
        self.baf = baf
        self.probs = _frozen(p / total)

    @classmethod
    def from_worlds(cls, baf: BAF, worlds: Mapping, *, config: Config = DEFAULT) -> "ProbabilityFunction":
        check_world_cap(baf, config)
        p = np.zeros(1 << len(baf))
        for members, prob in worlds.items():
            p[World.from_members(baf, members).mask] += prob
        return cls(baf, p, config=config)

    @classmethod
    def point_mass(cls, baf: BAF, members: Iterable[str] = ()) -> "ProbabilityFunction":
        return cls.from_worlds(baf, {tuple(members): 1.0})

    @classmethod
    def uniform(cls, baf: BAF) -> "ProbabilityFunction":
        check_world_cap(baf)
        return cls(baf, np.full(1 << len(baf), 1.0 / (1 << len(baf))))

    def __getitem__(self, members) -> float:
        """Probability of the world with exactly these members."""
        return float(self.probs[World.from_members(self.baf, members).mask])

    def __eq__(self, other):
        return (isinstance(other, ProbabilityFunction) and self.baf == other.baf
                and np.array_equal(self.probs, other.probs))

    def __hash__(self):
        return hash((self.baf, self.probs.tobytes()))

    def __repr__(self):
        shown = ", ".join(
            "{" + ",".join(World(self.baf, m).members) + f"}}: {p:.6g}"
            for m, p in enumerate(self.probs) if p > 0
        )
        return f"ProbabilityFunction({shown})"

    def worlds(self) -> list[tuple[tuple[str, ...], float]]:
        return [(World(self.baf, m).members, float(p)) for m, p in enumerate(self.probs)]

    def to_dict(self, *, digits: int | None = None) -> dict:
        out = []
        for m, p in enumerate(self.probs):
            if p > 0:
                out.append({"members": list(World(self.baf, m).members),
                            "p": float(p) if digits is None else float(f"{p:.{digits}g}")})
        return {"worlds": out}

    @classmethod
    def from_dict(cls, baf: BAF, data: Mapping, *, config: Config = DEFAULT) -> "ProbabilityFunction":
        try:
            entries = data["worlds"]
            check_world_cap(baf, config)
            p = np.zeros(1 << len(baf))
            for e in entries:
                p[World.from_members(baf, e["members"]).mask] += float(e["p"])
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed distribution document: {exc}") from None
        return cls(baf, p, config=config)


class ProbabilityLabelling:
    """Belief in each argument of a BAF, each in [0, 1]."""

    __slots__ = ("baf", "values")

    def __init__(self, baf: BAF, values, *, tol: float = DEFAULT.norm_tol):
        if isinstance(values, Mapping):
            missing = [a for a in baf.ids if a not in values]
            extra = [a for a in values if a not in baf]
            if missing or extra:
                raise DomainError(f"labelling must cover exactly the BAF arguments "
                                  f"(missing {missing}, unknown {extra})")
            arr = np.array([float(values[a]) for a in baf.ids])
        else:
            arr = np.array(values, dtype=np.float64).ravel()
            if arr.shape != (len(baf),):
                raise DomainError(f"expected {len(baf)} values, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("labelling values must be finite")
        if arr.size and (arr.min() < -tol or arr.max() > 1 + tol):
            bad = baf.ids[int(np.argmax(np.maximum(-arr, arr - 1)))]
            raise DomainError(f"labelling value for {bad!r} outside [0, 1]")
        self.baf = baf
        self.values = _frozen(np.clip(arr, 0.0, 1.0))

    def __getitem__(self, arg_id: str) -> float:
        return float(self.values[self.baf.index(arg_id)])

    def __eq__(self, other):
        return (isinstance(other, ProbabilityLabelling) and self.baf == other.baf
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.baf, self.values.tobytes()))

    def __repr__(self):
        inner = ", ".join(f"{a}: {v:.6g}" for a, v in zip(self.baf.ids, self.values))
        return f"ProbabilityLabelling({inner})"

    def as_dict(self) -> dict[str, float]:
        return {a: float(v) for a, v in zip(self.baf.ids, self.values)}

    def to_dict(self, *, digits: int | None = None) -> dict[str, float]:
        if digits is None:
            return self.as_dict()
        return {a: float(f"{v:.{digits}g}") for a, v in zip(self.baf.ids, self.values)}

    @classmethod
    def from_dict(cls, baf: BAF, data: Mapping) -> "ProbabilityLabelling":
        if not isinstance(data, Mapping):
            raise DomainError("labelling document must be a JSON object")
        return cls(baf, data)


def _same_baf(a, b):
    if a.baf != b.baf:
        raise DomainError("operands are defined over different BAFs")


def marginal(P: ProbabilityFunction, arg_id: str) -> float:
    """Probability that ``arg_id`` is accepted: the mass of worlds containing it."""
    i = P.baf.index(arg_id)
    n = len(P.baf)
    return float(P.probs.reshape(1 << (n - 1 - i), 2, 1 << i)[:, 1, :].sum())


def to_labelling(P: ProbabilityFunction) -> ProbabilityLabelling:
    return ProbabilityLabelling(P.baf, kernels.world_marginals(P.probs, len(P.baf)))


def atomically_equivalent(P1: ProbabilityFunction, P2: ProbabilityFunction, tol: float = 1e-9) -> bool:
    _same_baf(P1, P2)
    m1 = kernels.world_marginals(P1.probs, len(P1.baf))
    m2 = kernels.world_marginals(P2.probs, len(P2.baf))
    return bool(np.all(np.abs(m1 - m2) <= tol))


def canonical_lift(L: ProbabilityLabelling, *, config: Config = DEFAULT) -> ProbabilityFunction:
    """Independent-product distribution whose marginals are exactly ``L``.

    This is one fixed representative of the class of distributions sharing
    the atomic beliefs of ``L``.
    """
    check_world_cap(L.baf, config)
    return ProbabilityFunction(L.baf, kernels.world_product(L.values, len(L.baf)), config=config)


def mixture(P1: ProbabilityFunction, P2: ProbabilityFunction, alpha: float) -> ProbabilityFunction:
    _same_baf(P1, P2)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("mixture weight must lie in [0, 1]")
    return ProbabilityFunction(P1.baf, alpha * P1.probs + (1 - alpha) * P2.probs)


# ---- JSON files ---------------------------------------------------------------

def _read_json(path):
    return json.loads(Path(path).read_text())


def load_baf(path) -> BAF:
    return BAF.from_dict(_read_json(path))


def load_labelling(path, baf: BAF) -> ProbabilityLabelling:
    return ProbabilityLabelling.from_dict(baf, _read_json(path))


def load_distribution(path, baf: BAF, *, config: Config = DEFAULT) -> ProbabilityFunction:
    return ProbabilityFunction.from_dict(baf, _read_json(path), config=config)


def load_state(path, baf: BAF, *, config: Config = DEFAULT):
    """Read a labelling or a distribution file, telling them apart by the ``worlds`` key."""
    data = _read_json(path)
    if isinstance(data, Mapping) and "worlds" in data:
        return ProbabilityFunction.from_dict(baf, data, config=config)
    return ProbabilityLabelling.from_dict(baf, data)
