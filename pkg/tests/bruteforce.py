"""Finite-domain enumeration oracles for cross-checking the constraint engine.

Everything here decides satisfiability and entailment the slow, obviously
correct way: enumerate every assignment of domain values to the free terms
and evaluate the formulas directly.  No union-find, no closure — only the
shared term dataclasses are reused, never the algorithms under test.

Exactness caveat: a finite domain can refute formulas that are satisfiable
over arbitrarily many values.  With distinct interpreted constants drawn
from the domain itself and at most ``len(domain) - 1`` disequality edges,
every closure-level model can be realized inside the domain (each class is
either pinned to one constant or free to pick among ``len(domain)`` values
while avoiding at most ``len(domain) - 1`` neighbours), so the enumeration
agrees with the unbounded semantics.  The generators in the tests stay
inside that regime.
"""
from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence, Union

from promisekit.model import (
    CmpLiteral,
    Condition,
    EqConstraint,
    FlagLiteral,
    is_constant,
    Term,
)

Value = Union[int, str]
Assignment = Mapping[Term, Value]


def _constant_value(term: Term) -> Value:
    return term.value  # type: ignore[union-attr]


def _split_terms(terms: Iterable[Term]) -> tuple[list[Term], list[Term]]:
    """Partition into (interpreted constants, free terms), deterministically."""
    seen: dict[Term, None] = {}
    for term in terms:
        seen.setdefault(term, None)
    constants = [t for t in seen if is_constant(t)]
    free = [t for t in seen if not is_constant(t)]
    return constants, free


def assignments(
    terms: Iterable[Term], domain: Sequence[Value]
) -> Iterator[Assignment]:
    """Every map fixing constants to their own value and frees to the domain.

    The domain is widened with any constant values present so that a free
    term can always be set equal to a constant it is compared against.
    """
    constants, free = _split_terms(terms)
    values = list(domain)
    for const in constants:
        if _constant_value(const) not in values:
            values.append(_constant_value(const))
    base = {c: _constant_value(c) for c in constants}
    for choice in product(values, repeat=len(free)):
        env = dict(base)
        env.update(zip(free, choice))
        yield env


def _eq_terms(constraints: Iterable[EqConstraint]) -> list[Term]:
    out: list[Term] = []
    for c in constraints:
        out.append(c.lhs)
        out.append(c.rhs)
    return out


def _holds(env: Assignment, constraints: Iterable[EqConstraint]) -> bool:
    return all(env[c.lhs] == env[c.rhs] for c in constraints)


def oracle_satisfiable(
    constraints: Sequence[EqConstraint],
    disequalities: Sequence[tuple[Term, Term]] = (),
    domain: Sequence[Value] = (0, 1, 2),
) -> bool:
    """True iff some assignment satisfies every equality and disequality."""
    terms = _eq_terms(constraints)
    for a, b in disequalities:
        terms.append(a)
        terms.append(b)
    for env in assignments(terms, domain):
        if _holds(env, constraints) and all(
            env[a] != env[b] for a, b in disequalities
        ):
            return True
    return False


def oracle_same_class_pairs(
    constraints: Sequence[EqConstraint],
    domain: Sequence[Value] = (0, 1, 2),
) -> set[frozenset[Term]]:
    """Unordered pairs of distinct terms equal under every satisfying model.

    If no assignment satisfies the equalities (possible only when a constant
    is forced outside the domain), every pair is vacuously entailed and the
    full pair set is returned.
    """
    terms = list(dict.fromkeys(_eq_terms(constraints)))
    pairs = {
        frozenset((s, t))
        for i, s in enumerate(terms)
        for t in terms[i + 1 :]
    }
    alive = set(pairs)
    witnessed = False
    for env in assignments(terms, domain):
        if not _holds(env, constraints):
            continue
        witnessed = True
        alive = {p for p in alive if len({env[t] for t in p}) == 1}
        if not alive:
            break
    return alive if witnessed else pairs


def oracle_entails(
    constraints: Sequence[EqConstraint],
    goal: EqConstraint,
    domain: Sequence[Value] = (0, 1, 2),
) -> bool:
    """True iff every model of the constraints also satisfies the goal."""
    terms = _eq_terms(constraints) + [goal.lhs, goal.rhs]
    return all(
        env[goal.lhs] == env[goal.rhs]
        for env in assignments(terms, domain)
        if _holds(env, constraints)
    )


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------

def _condition_parts(
    conds: Iterable[Condition],
) -> tuple[set[str], list[Term]]:
    flags: set[str] = set()
    terms: list[Term] = []
    for cond in conds:
        for lit in cond.literals:
            if isinstance(lit, FlagLiteral):
                flags.add(lit.name)
            else:
                terms.append(lit.lhs)
                terms.append(lit.rhs)
    return flags, terms


def _literal_true(
    lit: Union[CmpLiteral, FlagLiteral],
    env: Assignment,
    flag_env: Mapping[str, bool],
) -> bool:
    if isinstance(lit, FlagLiteral):
        return flag_env[lit.name] != lit.negated
    outcome = env[lit.lhs] == env[lit.rhs]
    return outcome if lit.op == "eq" else not outcome


def oracle_conditions_satisfiable(
    conds: Sequence[Condition],
    domain: Sequence[Value] = (0, 1, 2),
) -> bool:
    """True iff one joint model makes every condition's literals all true."""
    flags, terms = _condition_parts(conds)
    flag_names = sorted(flags)
    for env in assignments(terms, domain):
        for bits in product((False, True), repeat=len(flag_names)):
            flag_env = dict(zip(flag_names, bits))
            if all(
                _literal_true(lit, env, flag_env)
                for cond in conds
                for lit in cond.literals
            ):
                return True
    return False


def oracle_mutually_exclusive(
    c1: Condition,
    c2: Condition,
    domain: Sequence[Value] = (0, 1, 2),
) -> bool:
    return not oracle_conditions_satisfiable([c1, c2], domain)
