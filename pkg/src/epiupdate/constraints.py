"""Linear atomic constraints: ``sum_i c_i * p(A_i)  (<= | >= | =)  c0``.

Coefficients and bounds are exact :class:`fractions.Fraction` values; they
are converted to floats only when a constraint is evaluated or handed to
the solver.

Concrete syntax, one constraint per line, ``#`` starts a comment::

    p(A) + p(B) <= 1
    p(C) + 1/3*p(D) + 1/3*p(E) + 1/3*p(F) = 1
    -p(A) >= -0.5
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DomainError, ParseError, PreconditionError
from .model import BAF, ProbabilityFunction, ProbabilityLabelling
from .solver import PolytopeSpec, feasible, maximize_linear


class Relation(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are taken at their shortest decimal spelling, so 0.19 -> 19/100
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class LinearAtomicConstraint:
    terms: tuple[tuple[str, Fraction], ...]
    relation: Relation
    bound: Fraction

    def __post_init__(self):
        merged: dict[str, Fraction] = {}
        for arg, coef in self.terms:
            merged[arg] = merged.get(arg, Fraction(0)) + _fraction(coef)
        terms = tuple((a, c) for a, c in merged.items() if c != 0)
        if not terms:
            raise DomainError("a linear atomic constraint needs at least one nonzero coefficient")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "bound", _fraction(self.bound))

    @classmethod
    def of(cls, terms: Mapping[str, object] | Iterable[tuple[str, object]], relation, bound):
        items = terms.items() if isinstance(terms, Mapping) else terms
        return cls(tuple((a, _fraction(c)) for a, c in items), Relation(relation), _fraction(bound))

    def _key(self):
        return frozenset(self.terms), self.relation, self.bound

    def __eq__(self, other):
        return isinstance(other, LinearAtomicConstraint) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def arguments(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.terms)

    def coefficient(self, arg_id: str) -> Fraction:
        return dict(self.terms).get(arg_id, Fraction(0))

    def lhs(self, values: Mapping[str, float]) -> float:
        return sum(float(c) * float(values[a]) for a, c in self.terms)

    def __str__(self):
        return render_constraint(self)


def pin(arg_id: str, value) -> LinearAtomicConstraint:
    """``p(arg_id) = value``."""
    return LinearAtomicConstraint.of({arg_id: 1}, Relation.EQ, value)


class ConstraintSet(Sequence):
    """Ordered collection of constraints over one BAF."""

    __slots__ = ("baf", "constraints")

    def __init__(self, baf: BAF, constraints: Iterable[LinearAtomicConstraint] = ()):
        cs = tuple(constraints)
        for c in cs:
            for a in c.arguments:
                if a not in baf:
                    raise DomainError(f"constraint {render_constraint(c)!r} mentions unknown argument {a!r}")
        self.baf = baf
        self.constraints = cs

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ConstraintSet(self.baf, self.constraints[i])
        return self.constraints[i]

    def __len__(self):
        return len(self.constraints)

    def __iter__(self) -> Iterator[LinearAtomicConstraint]:
        return iter(self.constraints)

    def __eq__(self, other):
        return isinstance(other, ConstraintSet) and self.baf == other.baf and self.constraints == other.constraints

    def __hash__(self):
        return hash((self.baf, self.constraints))

    def __repr__(self):
        return f"ConstraintSet({[render_constraint(c) for c in self.constraints]})"

    def __or__(self, other: "ConstraintSet") -> "ConstraintSet":
        if other.baf != self.baf:
            raise DomainError("cannot combine constraint sets over different BAFs")
        return ConstraintSet(self.baf, self.constraints + other.constraints)

    def with_constraints(self, extra: Iterable[LinearAtomicConstraint]) -> "ConstraintSet":
        return ConstraintSet(self.baf, self.constraints + tuple(extra))

    def polytope(self, *, box: bool = True) -> PolytopeSpec:
        """Labelling-space feasible region (optionally intersected with ``[0, 1]^n``)."""
        return polytope(self.baf, self.constraints, box=box)

    def rows(self):
        """World-row form: ``(eq_rows, eq_rhs, le_rows, le_rhs)`` with ``(const, coeffs...)`` rows."""
        n = len(self.baf)
        eq, eq_rhs, le, le_rhs = [], [], [], []
        for c in self.constraints:
            row = np.zeros(n + 1)
            for a, coef in c.terms:
                row[1 + self.baf.index(a)] = float(coef)
            if c.relation is Relation.EQ:
                eq.append(row)
                eq_rhs.append(float(c.bound))
            elif c.relation is Relation.LE:
                le.append(row)
                le_rhs.append(float(c.bound))
            else:
                le.append(-row)
                le_rhs.append(-float(c.bound))
        return (np.array(eq).reshape(-1, n + 1), np.array(eq_rhs),
                np.array(le).reshape(-1, n + 1), np.array(le_rhs))


def polytope(baf: BAF, constraints: Iterable[LinearAtomicConstraint], *, box: bool = True) -> PolytopeSpec:
    n = len(baf)
    g_rows, g_cols, g_vals, h = [], [], [], []
    a_rows, a_cols, a_vals, b = [], [], [], []
    for c in constraints:
        sign = -1.0 if c.relation is Relation.GE else 1.0
        if c.relation is Relation.EQ:
            r = len(b)
            for a, coef in c.terms:
                a_rows.append(r)
                a_cols.append(baf.index(a))
                a_vals.append(float(coef))
            b.append(float(c.bound))
        else:
            r = len(h)
            for a, coef in c.terms:
                g_rows.append(r)
                g_cols.append(baf.index(a))
                g_vals.append(sign * float(coef))
            h.append(sign * float(c.bound))
    G = sp.csr_matrix((g_vals, (g_rows, g_cols)), shape=(len(h), n))
    A = sp.csr_matrix((a_vals, (a_rows, a_cols)), shape=(len(b), n))
    lo, hi = (0.0, 1.0) if box else (None, None)
    return PolytopeSpec.build(n, G, h, A, b, lo, hi)


# ---- semantics ---------------------------------------------------------------

def _holds(lhs: float, c: LinearAtomicConstraint, tol: float) -> bool:
    bound = float(c.bound)
    if c.relation is Relation.LE:
        return lhs <= bound + tol
    if c.relation is Relation.GE:
        return lhs >= bound - tol
    return abs(lhs - bound) <= tol


def _check_args(c, baf):
    for a in c.arguments:
        if a not in baf:
            raise DomainError(f"constraint mentions {a!r}, which is not an argument of the BAF")


def satisfied_by_labelling(c: LinearAtomicConstraint, L: ProbabilityLabelling, tol: float = 1e-9) -> bool:
    _check_args(c, L.baf)
    return _holds(sum(float(coef) * L[a] for a, coef in c.terms), c, tol)


def satisfied_by_distribution(c: LinearAtomicConstraint, P: ProbabilityFunction, tol: float = 1e-9) -> bool:
    """Evaluate the constraint world by world: ``sum_w P(w) * sum_{A_i in w} c_i``."""
    _check_args(c, P.baf)
    n = len(P.baf)
    coeffs = np.zeros(n)
    for a, coef in c.terms:
        coeffs[P.baf.index(a)] = float(coef)
    return _holds(float(P.probs @ kernels.world_affine(coeffs, 0.0, n)), c, tol)


def satisfies(state, cs: Iterable[LinearAtomicConstraint], tol: float = 1e-9) -> bool:
    check = satisfied_by_distribution if isinstance(state, ProbabilityFunction) else satisfied_by_labelling
    return all(check(c, state, tol) for c in cs)


# ---- transformations -----------------------------------------------------------

def negate(c: LinearAtomicConstraint) -> LinearAtomicConstraint:
    """Multiply both sides by -1 (flips LE/GE)."""
    flipped = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}[c.relation]
    return LinearAtomicConstraint(tuple((a, -k) for a, k in c.terms), flipped, -c.bound)


def normalize(c: LinearAtomicConstraint) -> tuple[LinearAtomicConstraint, ...]:
    """Equivalent LE-only constraints: GE is negated, EQ becomes an LE pair."""
    if c.relation is Relation.LE:
        return (c,)
    if c.relation is Relation.GE:
        return (negate(c),)
    le = LinearAtomicConstraint(c.terms, Relation.LE, c.bound)
    return (le, negate(LinearAtomicConstraint(c.terms, Relation.GE, c.bound)))


def scale(c: LinearAtomicConstraint, q) -> LinearAtomicConstraint:
    q = _fraction(q)
    if q <= 0:
        raise DomainError("scale factor must be positive")
    return LinearAtomicConstraint(tuple((a, k * q) for a, k in c.terms), c.relation, c.bound * q)


def combine(constraints: Sequence[LinearAtomicConstraint], weights: Sequence) -> LinearAtomicConstraint:
    """Nonnegative combination of LE-normalized constraints (an implied LE constraint)."""
    terms: dict[str, Fraction] = {}
    bound = Fraction(0)
    for c, w in zip(constraints, weights):
        w = _fraction(w)
        if w < 0:
            raise DomainError("combination weights must be nonnegative")
        for le in normalize(c)[:1]:
            for a, k in le.terms:
                terms[a] = terms.get(a, Fraction(0)) + w * k
            bound += w * le.bound
    return LinearAtomicConstraint(tuple(terms.items()), Relation.LE, bound)


# ---- generators ------------------------------------------------------------

def generate_coherence(baf: BAF) -> ConstraintSet:
    """``p(B) + p(A) <= 1`` for every attack ``(A, B)``."""
    return ConstraintSet(baf, [
        LinearAtomicConstraint(((target, Fraction(1)), (attacker, Fraction(1))), Relation.LE, Fraction(1))
        for attacker, target in baf.attacks
    ])


def generate_dual_average(baf: BAF) -> ConstraintSet:
    """Belief in X is one minus the average belief in its attackers.

    ``p(X) + (1/k) * sum_{Y attacks X} p(Y) = 1`` for each attacked X, with
    ``k`` its number of attackers; unattacked arguments are left free.
    """
    out = []
    for x in baf.ids:
        att = baf.attackers(x)
        if not att:
            continue
        w = Fraction(1, len(att))
        out.append(LinearAtomicConstraint(((x, Fraction(1)),) + tuple((y, w) for y in att),
                                          Relation.EQ, Fraction(1)))
    return ConstraintSet(baf, out)


# ---- implication -----------------------------------------------------------

def implied_by(cs: ConstraintSet, c: LinearAtomicConstraint, tol: float = 1e-9) -> bool:
    """Does every labelling (equivalently, distribution) satisfying ``cs`` satisfy ``c``?"""
    _check_args(c, cs.baf)
    spec = cs.polytope()
    if not feasible(spec):
        raise PreconditionError("implied_by needs a satisfiable constraint set")
    row = np.zeros(len(cs.baf))
    for a, coef in c.terms:
        row[cs.baf.index(a)] = float(coef)
    bound = float(c.bound)
    if c.relation in (Relation.LE, Relation.EQ) and maximize_linear(row, spec).objective > bound + tol:
        return False
    if c.relation in (Relation.GE, Relation.EQ) and -maximize_linear(-row, spec).objective < bound - tol:
        return False
    return True


# ---- concrete syntax ---------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+/\d+|\d+\.\d*|\.\d+|\d+)
  | (?P<prob>p\(\s*(?P<ident>[^()\s]+)\s*\))
  | (?P<rel><=|>=|=|≤|≥)
  | (?P<op>[+\-*])
""", re.VERBOSE)

_REL = {"<=": Relation.LE, "≤": Relation.LE, ">=": Relation.GE, "≥": Relation.GE, "=": Relation.EQ}


def _parse_number(text: str, line: int, col: int) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ParseError("division by zero in fraction literal", line, col)
        return Fraction(int(num), int(den))
    return Fraction(text)


def _tokenize(text: str, line: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = "prob" if m.group("prob") is not None else m.lastgroup
        if kind != "ws":
            value = m.group("ident") if kind == "prob" else m.group(kind)
            out.append((kind, value, pos + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


def parse_constraint(text: str, baf: BAF | None = None, *, line: int = 1) -> LinearAtomicConstraint:
    toks = _tokenize(text, line)
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, what=None):
        nonlocal i
        tok = toks[i]
        if kind is not None and tok[0] != kind:
            found = tok[1] or "end of line"
            raise ParseError(f"expected {what or kind}, found {found!r}", line, tok[2])
        i += 1
        return tok

    def signed_number(what):
        sign = 1
        if peek()[0] == "op" and peek()[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
        tok = take("num", what)
        return sign * _parse_number(tok[1], line, tok[2])

    def term(sign):
        coef = Fraction(1)
        if peek()[0] == "num":
            tok = take()
            coef = _parse_number(tok[1], line, tok[2])
            if peek()[:2] != ("op", "*"):
                raise ParseError("expected '*' between coefficient and p(...)", line, peek()[2])
            take()
        tok = take("prob", "p(<argument>)")
        if baf is not None and tok[1] not in baf:
            raise ParseError(f"unknown argument {tok[1]!r}", line, tok[2])
        return tok[1], sign * coef

    terms = []
    sign = 1
    if peek()[0] == "op" and peek()[1] in "+-":
        sign = -1 if take()[1] == "-" else 1
    terms.append(term(sign))
    while peek()[0] == "op" and peek()[1] in "+-":
        sign = -1 if take()[1] == "-" else 1
        terms.append(term(sign))
    rel_tok = take("rel", "'<=', '>=' or '='")
    bound = signed_number("a number")
    if peek()[0] != "end":
        raise ParseError(f"unexpected {peek()[1]!r} after the bound", line, peek()[2])
    try:
        return LinearAtomicConstraint.of(terms, _REL[rel_tok[1]], bound)
    except DomainError as exc:
        raise ParseError(str(exc), line, 1) from None


def parse_constraints(text: str, baf: BAF) -> ConstraintSet:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        out.append(parse_constraint(body, baf, line=lineno))
    return ConstraintSet(baf, out)


def load_constraints(path, baf: BAF) -> ConstraintSet:
    with open(path, encoding="utf-8") as fh:
        return parse_constraints(fh.read(), baf)


def format_number(q: Fraction) -> str:
    """Exact decimal when the denominator allows it, ``a/b`` otherwise."""
    q = Fraction(q)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    if q.denominator == 1:
        return str(q.numerator)
    digits = max(twos, fives)
    scaled = abs(q.numerator) * (10 ** digits // q.denominator)
    s = str(scaled).rjust(digits + 1, "0")
    s = s[:-digits] + "." + s[-digits:]
    return ("-" if q < 0 else "") + s


def render_constraint(c: LinearAtomicConstraint) -> str:
    parts = []
    for k, (arg, coef) in enumerate(c.terms):
        mag = abs(coef)
        body = f"p({arg})" if mag == 1 else f"{format_number(mag)}*p({arg})"
        if k == 0:
            parts.append(("-" if coef < 0 else "") + body)
        else:
            parts.append(("- " if coef < 0 else "+ ") + body)
    return f"{' '.join(parts)} {c.relation.value} {format_number(c.bound)}"


def render(cs: Iterable[LinearAtomicConstraint]) -> str:
    return "".join(render_constraint(c) + "\n" for c in cs)
