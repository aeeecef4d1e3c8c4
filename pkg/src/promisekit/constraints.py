"""Equality reasoning over flat terms.

The heart of the analyzer: a union-find closure over equality constraints,
plus satisfiability with disequalities, canonical reduction, entailment, and
mutual exclusivity of conditions.  Terms are atomic (no function symbols), so
congruence degenerates to transitive closure of the stated equalities.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import UnsatisfiableError
from .model import (
    Attribute,
    CmpLiteral,
    Condition,
    EqConstraint,
    FlagLiteral,
    NamedConst,
    NumConst,
    Parameter,
    StrConst,
    Term,
    format_term,
    is_constant,
    is_observable,
    term_key,
)


class _UnionFind:
    """Plain union-find with path halving; roots chosen by canonical order."""

    def __init__(self) -> None:
        self.parent: dict[Term, Term] = {}

    def add(self, t: Term) -> None:
        if t not in self.parent:
            self.parent[t] = t

    def find(self, t: Term) -> Term:
        p = self.parent
        while p[t] != t:
            p[t] = p[p[t]]
            t = p[t]
        return t

    def union(self, a: Term, b: Term) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # Keep the canonically smaller term as root so results are stable.
        if term_key(rb) < term_key(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra


class TermPartition:
    """The equivalence classes induced by a constraint set.

    Classes are tuples sorted by term order; the canonical representative of a
    class is its smallest member (constants before named constants before
    attributes before parameters).  Terms never mentioned are implicitly
    singleton classes.
    """

    def __init__(self, classes: Iterable[Iterable[Term]]) -> None:
        normalized = []
        for cls in classes:
            members = tuple(sorted(cls, key=term_key))
            if members:
                normalized.append(members)
        normalized.sort(key=lambda c: term_key(c[0]))
        self.classes: tuple[tuple[Term, ...], ...] = tuple(normalized)
        self._class_of: dict[Term, tuple[Term, ...]] = {}
        for cls in self.classes:
            for t in cls:
                self._class_of[t] = cls

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TermPartition):
            return NotImplemented
        return self.as_sets() == other.as_sets()

    def __hash__(self) -> int:
        return hash(self.as_sets())

    def __repr__(self) -> str:
        body = "; ".join(
            "{" + ", ".join(format_term(t) for t in cls) + "}" for cls in self.classes
        )
        return f"TermPartition({body})"

    def as_sets(self) -> frozenset[frozenset[Term]]:
        return frozenset(frozenset(cls) for cls in self.classes)

    @property
    def terms(self) -> tuple[Term, ...]:
        return tuple(t for cls in self.classes for t in cls)

    def class_of(self, t: Term) -> tuple[Term, ...]:
        return self._class_of.get(t, (t,))

    def representative(self, t: Term) -> Term:
        return self.class_of(t)[0]

    def same_class(self, a: Term, b: Term) -> bool:
        if a == b:
            return True
        cls = self._class_of.get(a)
        return cls is not None and b in cls

    def constant_clash(self) -> Union[tuple[Term, Term], None]:
        """Two distinct literal constants forced together, if any."""
        for cls in self.classes:
            consts = [t for t in cls if is_constant(t)]
            if len(consts) > 1:
                return (consts[0], consts[1])
        return None

    def merged_pairs(self, vocabulary: Iterable[Term]) -> tuple[tuple[Term, Term], ...]:
        """All same-class pairs drawn from ``vocabulary``."""
        vocab = set(vocabulary)
        pairs = []
        for cls in self.classes:
            members = [t for t in cls if t in vocab]
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    pairs.append((members[i], members[j]))
        return tuple(sorted(pairs, key=lambda p: (term_key(p[0]), term_key(p[1]))))

    def restrict(self, vocabulary: Iterable[Term]) -> "TermPartition":
        vocab = set(vocabulary)
        return TermPartition(
            [t for t in cls if t in vocab] for cls in self.classes
        )

    def new_pairs_over(
        self, baseline: "TermPartition", vocabulary: Iterable[Term]
    ) -> tuple[tuple[Term, Term], ...]:
        """Vocabulary pairs merged here but not in ``baseline``."""
        return tuple(
            (a, b)
            for a, b in self.merged_pairs(vocabulary)
            if not baseline.same_class(a, b)
        )


def closure(
    constraints: Iterable[EqConstraint], extra_terms: Iterable[Term] = ()
) -> TermPartition:
    """Least equivalence over the mentioned terms containing every equality."""
    uf = _UnionFind()
    for t in extra_terms:
        uf.add(t)
    for c in constraints:
        uf.add(c.lhs)
        uf.add(c.rhs)
        uf.union(c.lhs, c.rhs)
    groups: dict[Term, list[Term]] = {}
    for t in uf.parent:
        groups.setdefault(uf.find(t), []).append(t)
    return TermPartition(groups.values())


def satisfiable(
    constraints: Iterable[EqConstraint],
    disequalities: Iterable[tuple[Term, Term]] = (),
) -> bool:
    """True iff no class holds two distinct constants and no disequality pair
    falls inside one class."""
    part = closure(constraints)
    if part.constant_clash() is not None:
        return False
    for a, b in disequalities:
        if part.same_class(a, b):
            return False
    return True


def reduce(constraints: Iterable[EqConstraint]) -> frozenset[EqConstraint]:
    """Canonical minimal form: bind each attribute (and named constant) of a
    class to the class's binding target.

    The target is the class constant when present, else its first parameter,
    else its first named constant, else its first attribute — so
    ``{width=$w, height=$h, $w=$h}`` reduces to ``{width=$h, height=$h}``.
    Parameter-only classes are unobservable and drop out.  Rejects
    unsatisfiable input.
    """
    source = list(constraints)
    part = closure(source)
    clash = part.constant_clash()
    if clash is not None:
        raise UnsatisfiableError(
            f"cannot reduce: {format_term(clash[0])} and {format_term(clash[1])} "
            f"are forced equal"
        )
    out: list[EqConstraint] = []
    for cls in part.classes:
        consts = [t for t in cls if is_constant(t)]
        params = [t for t in cls if isinstance(t, Parameter)]
        named = [t for t in cls if isinstance(t, NamedConst)]
        attrs = [t for t in cls if isinstance(t, Attribute)]
        if not (consts or named or attrs):
            continue  # parameters only: nothing observable to bind
        if consts:
            target: Term = consts[0]
        elif params:
            target = params[0]
        elif named:
            target = named[0]
        else:
            target = attrs[0]
        for member in named + attrs:
            if member != target:
                out.append(EqConstraint(member, target))
    return frozenset(out)


def entails(
    base: Iterable[EqConstraint], candidate: Iterable[EqConstraint]
) -> bool:
    """True iff every candidate equality already holds in closure(base).
    Both sets must be satisfiable."""
    base_list = list(base)
    cand_list = list(candidate)
    if not satisfiable(base_list) or not satisfiable(cand_list):
        raise UnsatisfiableError("entails requires satisfiable constraint sets")
    part = closure(base_list)
    return all(part.same_class(c.lhs, c.rhs) for c in cand_list)


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExclusivityVerdict:
    """Outcome of a mutual-exclusivity test; carries a satisfying assignment
    sketch exactly when the conditions can hold together."""

    exclusive: bool
    witness: Union[tuple[tuple[str, str], ...], None] = None

    def witness_dict(self) -> dict[str, str]:
        return dict(self.witness or ())


def split_condition(
    cond: Condition,
) -> tuple[list[EqConstraint], list[tuple[Term, Term]], dict[str, bool]]:
    """A condition's equalities, disequalities, and flag polarity map.
    Raises ValueError on an internally contradictory flag pair."""
    eqs: list[EqConstraint] = []
    neqs: list[tuple[Term, Term]] = []
    flags: dict[str, bool] = {}
    for lit in cond.sorted_literals():
        if isinstance(lit, FlagLiteral):
            wanted = not lit.negated
            if flags.setdefault(lit.name, wanted) != wanted:
                raise ValueError(f"flag {lit.name!r} both required and forbidden")
            continue
        if lit.op == "eq":
            eqs.append(EqConstraint(lit.lhs, lit.rhs))
        else:
            neqs.append((lit.lhs, lit.rhs))
    return eqs, neqs, flags


def condition_satisfiable(*conds: Condition) -> bool:
    """Can all these conditions hold at once?"""
    eqs: list[EqConstraint] = []
    neqs: list[tuple[Term, Term]] = []
    flags: dict[str, bool] = {}
    for cond in conds:
        try:
            ce, cn, cf = split_condition(cond)
        except ValueError:
            return False
        eqs.extend(ce)
        neqs.extend(cn)
        for name, wanted in cf.items():
            if flags.setdefault(name, wanted) != wanted:
                return False
    for a, b in neqs:
        if a == b:
            return False
    return satisfiable(eqs, neqs)


def _conjunction_witness(
    eqs: Sequence[EqConstraint],
    neqs: Sequence[tuple[Term, Term]],
    flags: dict[str, bool],
) -> tuple[tuple[str, str], ...]:
    """A satisfying assignment sketch: one value per class, flags as booleans.
    Distinct classes get distinct synthetic values, so all disequalities hold."""
    extra = [t for pair in neqs for t in pair]
    part = closure(eqs, extra)
    entries: list[tuple[str, str]] = []
    fresh = 0
    for cls in part.classes:
        consts = [t for t in cls if is_constant(t)]
        if consts:
            value = format_term(consts[0])
        else:
            value = f"v{fresh}"
            fresh += 1
        for t in cls:
            if not is_constant(t):
                entries.append((format_term(t), value))
    for name in sorted(flags):
        entries.append((name, "true" if flags[name] else "false"))
    return tuple(sorted(entries))


def mutually_exclusive(c1: Condition, c2: Condition) -> ExclusivityVerdict:
    """Can ``c1`` and ``c2`` hold at the same time?  Exclusive iff their
    conjunction is unsatisfiable; otherwise the verdict carries a witness."""
    eqs: list[EqConstraint] = []
    neqs: list[tuple[Term, Term]] = []
    flags: dict[str, bool] = {}
    for cond in (c1, c2):
        try:
            ce, cn, cf = split_condition(cond)
        except ValueError:
            return ExclusivityVerdict(exclusive=True)
        eqs.extend(ce)
        neqs.extend(cn)
        for name, wanted in cf.items():
            if flags.setdefault(name, wanted) != wanted:
                return ExclusivityVerdict(exclusive=True)
    for a, b in neqs:
        if a == b:
            return ExclusivityVerdict(exclusive=True)
    if not satisfiable(eqs, neqs):
        return ExclusivityVerdict(exclusive=True)
    return ExclusivityVerdict(
        exclusive=False, witness=_conjunction_witness(eqs, neqs, flags)
    )


@dataclass(frozen=True)
class PairwiseReport:
    """Pairwise exclusivity over a family of conditions."""

    ok: bool
    violations: tuple[tuple[int, int, tuple[tuple[str, str], ...]], ...] = ()


def pairwise_exclusive(conditions: Sequence[Condition]) -> PairwiseReport:
    """Check every unordered pair; a singleton family is a caller error."""
    if len(conditions) < 2:
        raise ValueError("pairwise exclusivity needs at least two conditions")
    violations = []
    for i in range(len(conditions)):
        for j in range(i + 1, len(conditions)):
            verdict = mutually_exclusive(conditions[i], conditions[j])
            if not verdict.exclusive:
                violations.append((i, j, verdict.witness or ()))
    return PairwiseReport(ok=not violations, violations=tuple(violations))
