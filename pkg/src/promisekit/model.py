"""Immutable domain model for promise graphs.

Agents promise things to one another.  A promise body couples a polarity
(``give`` = offer behaviour, ``use`` = accept behaviour) with a promise type
and, for valued types, equality constraints over attributes, parameters, and
constants.  Bodies may be conditional on a conjunction of literals; groups of
bodies can be declared once as a named bundle and attached to any agent pair.

Everything here is a frozen dataclass: graphs compare structurally, and
construction sorts every collection so that identical declaration sets yield
identical graphs regardless of declaration order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal, Mapping, Sequence, Union

from .errors import (
    BundleCycleError,
    DanglingReferenceError,
    DuplicateNameError,
    InvalidBodyError,
    TypeCollisionError,
)

GIVE = "give"
USE = "use"

#: Pseudo-type carried by constraint-only bodies such as ``give $w = $h;``.
#: "=" cannot collide with a declared type because it is not an identifier.
LINK_TYPE = "="


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Attribute:
    """A promise type used as a value carrier, e.g. ``width``."""

    name: str


@dataclass(frozen=True)
class Parameter:
    """A free value placeholder, written ``$w``; scoped to its promise group."""

    name: str


@dataclass(frozen=True)
class NumConst:
    value: Union[int, float]


@dataclass(frozen=True)
class StrConst:
    value: str


@dataclass(frozen=True)
class NamedConst:
    """A bare identifier that is not a declared type.

    It resolves to a private attribute of the agent whose condition mentions
    it when one exists; otherwise it stays a distinct symbolic constant.
    """

    name: str


Term = Union[Attribute, Parameter, NumConst, StrConst, NamedConst]

_TERM_RANK = {NumConst: 0, StrConst: 1, NamedConst: 2, Attribute: 3, Parameter: 4}


def term_key(term: Term) -> tuple:
    """Total order over terms: constants first, then named, attributes, parameters."""
    rank = _TERM_RANK[type(term)]
    if isinstance(term, NumConst):
        return (rank, float(term.value), "")
    if isinstance(term, StrConst):
        return (rank, 0.0, term.value)
    return (rank, 0.0, term.name)


def format_number(value: Union[int, float]) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def escape_string(value: str) -> str:
    out = value.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def format_term(term: Term) -> str:
    if isinstance(term, Attribute):
        return term.name
    if isinstance(term, Parameter):
        name = term.name.split("::", 1)[-1]  # drop internal scope tags
        return f"${name}"
    if isinstance(term, NumConst):
        return format_number(term.value)
    if isinstance(term, StrConst):
        return escape_string(term.value)
    return term.name


def is_constant(term: Term) -> bool:
    return isinstance(term, (NumConst, StrConst))


def is_observable(term: Term) -> bool:
    """Terms whose identity matters to solutions (everything but parameters)."""
    return not isinstance(term, Parameter)


# ---------------------------------------------------------------------------
# Constraints and conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqConstraint:
    """An equality between two terms; stored order-normalized so the set
    {a=b} equals {b=a}."""

    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        if term_key(self.lhs) > term_key(self.rhs):
            lhs = self.lhs
            object.__setattr__(self, "lhs", self.rhs)
            object.__setattr__(self, "rhs", lhs)

    def terms(self) -> tuple[Term, Term]:
        return (self.lhs, self.rhs)


def format_constraint(c: EqConstraint) -> str:
    # Prefer attribute/parameter on the left for display, constants on the right.
    lhs, rhs = c.lhs, c.rhs
    if is_constant(lhs) or (isinstance(lhs, NamedConst) and not is_constant(rhs)):
        lhs, rhs = rhs, lhs
    return f"{format_term(lhs)}={format_term(rhs)}"


@dataclass(frozen=True)
class CmpLiteral:
    """``lhs == rhs`` or ``lhs != rhs`` inside a condition."""

    lhs: Term
    op: Literal["eq", "neq"]
    rhs: Term

    def __post_init__(self) -> None:
        if term_key(self.lhs) > term_key(self.rhs):
            lhs = self.lhs
            object.__setattr__(self, "lhs", self.rhs)
            object.__setattr__(self, "rhs", lhs)


@dataclass(frozen=True)
class FlagLiteral:
    """A boolean flag mention, possibly negated (``not employee``)."""

    name: str
    negated: bool = False


ConditionLiteral = Union[CmpLiteral, FlagLiteral]


def _literal_sort_key(lit: ConditionLiteral) -> tuple:
    if isinstance(lit, CmpLiteral):
        return (0, term_key(lit.lhs), term_key(lit.rhs), lit.op)
    return (1, lit.name, lit.negated)


def format_literal(lit: ConditionLiteral) -> str:
    if isinstance(lit, CmpLiteral):
        op = "==" if lit.op == "eq" else "!="
        lhs, rhs = lit.lhs, lit.rhs
        # Display with the attribute first when one side is an attribute.
        if not isinstance(lhs, Attribute) and isinstance(rhs, Attribute):
            lhs, rhs = rhs, lhs
        return f"{format_term(lhs)} {op} {format_term(rhs)}"
    return f"not {lit.name}" if lit.negated else lit.name


@dataclass(frozen=True)
class Condition:
    """A conjunction of literals; the empty condition is always true."""

    literals: frozenset[ConditionLiteral] = frozenset()

    @staticmethod
    def of(*literals: ConditionLiteral) -> "Condition":
        return Condition(frozenset(literals))

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def sorted_literals(self) -> tuple[ConditionLiteral, ...]:
        return tuple(sorted(self.literals, key=_literal_sort_key))

    def conjoin(self, other: "Condition") -> "Condition":
        return Condition(self.literals | other.literals)


ALWAYS = Condition()


def format_condition(cond: Condition) -> str:
    if cond.is_empty:
        return ""
    return " and ".join(format_literal(l) for l in cond.sorted_literals())


# ---------------------------------------------------------------------------
# Bodies, promises, bundles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PromiseBody:
    """Polarity + type + constraints + condition.

    Use-bodies accept the counterpart's behaviour and carry no constraints of
    their own; constructing one with constraints raises.
    """

    polarity: Literal["give", "use"]
    type: str
    constraints: frozenset[EqConstraint] = frozenset()
    condition: Condition = ALWAYS

    def __post_init__(self) -> None:
        if self.polarity not in (GIVE, USE):
            raise InvalidBodyError(f"unknown polarity: {self.polarity!r}")
        if self.polarity == USE and self.constraints:
            raise InvalidBodyError(
                f"use body for {self.type!r} must not carry constraints"
            )

    @property
    def is_link(self) -> bool:
        return self.type == LINK_TYPE

    def sorted_constraints(self) -> tuple[EqConstraint, ...]:
        return tuple(
            sorted(self.constraints, key=lambda c: (term_key(c.lhs), term_key(c.rhs)))
        )

    def terms(self) -> tuple[Term, ...]:
        out: list[Term] = []
        for c in self.sorted_constraints():
            out.extend(c.terms())
        return tuple(out)


def give(type_: str, *constraints: EqConstraint, condition: Condition = ALWAYS) -> PromiseBody:
    return PromiseBody(GIVE, type_, frozenset(constraints), condition)


def use(type_: str, condition: Condition = ALWAYS) -> PromiseBody:
    return PromiseBody(USE, type_, frozenset(), condition)


def link(lhs: Term, rhs: Term, condition: Condition = ALWAYS) -> PromiseBody:
    """A constraint-only body, e.g. the square's ``give $w = $h;``."""
    return PromiseBody(GIVE, LINK_TYPE, frozenset({EqConstraint(lhs, rhs)}), condition)


def format_body(body: PromiseBody) -> str:
    if body.is_link:
        core = format_constraint(next(iter(body.constraints)))
        text = f"+{core}"
    else:
        parts = [format_constraint(c) for c in body.sorted_constraints()]
        core = body.type if not parts else ",".join(parts)
        text = f"+{core}" if body.polarity == GIVE else f"U({core})"
    if not body.condition.is_empty:
        text += f" if {format_condition(body.condition)}"
    return text


def body_key(body: PromiseBody) -> tuple:
    return (
        body.type,
        body.polarity,
        tuple((term_key(c.lhs), term_key(c.rhs)) for c in body.sorted_constraints()),
        tuple(_literal_sort_key(l) for l in body.condition.sorted_literals()),
    )


@dataclass(frozen=True)
class Promise:
    """A directed edge: ``promiser`` makes ``body`` toward ``promisee``.

    ``group`` identifies the enclosing parameter scope (one bundle attachment
    or one direct declaration); it is derived from content so graphs stay
    order-insensitive.
    """

    promiser: str
    promisee: str
    body: PromiseBody
    group: str = ""

    def formatted(self) -> str:
        return f"{self.promiser} -> {self.promisee}: {format_body(self.body)}"


def promise_sort_key(p: Promise) -> tuple:
    return (p.promiser, p.promisee, body_key(p.body), p.group)


@dataclass(frozen=True)
class Bundle:
    """A named, reusable collection of bodies, optionally extending another."""

    name: str
    bodies: tuple[PromiseBody, ...]
    parent: Union[str, None] = None

    def sorted_bodies(self) -> tuple[PromiseBody, ...]:
        return tuple(sorted(self.bodies, key=body_key))


@dataclass(frozen=True)
class Agent:
    """An autonomous party.  ``private_attrs`` bind names to constant terms
    visible only to analyses evaluating this agent's own conditions."""

    name: str
    private_attrs: tuple[tuple[str, Term], ...] = ()

    @staticmethod
    def make(name: str, attrs: Union[Mapping[str, Term], None] = None) -> "Agent":
        items = tuple(sorted((attrs or {}).items()))
        return Agent(name, items)

    @property
    def attrs(self) -> dict[str, Term]:
        return dict(self.private_attrs)


KIND_NUM = "num"
KIND_STR = "str"
KIND_FLAG = "flag"
KIND_SERVICE = "service"

VALUED_KINDS = (KIND_NUM, KIND_STR)


@dataclass(frozen=True)
class PromiseTypeDecl:
    """A registered promise type.  ``name`` is the flattened dotted path."""

    name: str
    kind: Literal["num", "str", "flag", "service"]
    path: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.path:
            object.__setattr__(self, "path", tuple(self.name.split(".")))


def flatten_type(path: Sequence[str]) -> str:
    """Join a namespace path into a single dotted type name."""
    if not path:
        raise ValueError("type path must not be empty")
    for seg in path:
        if not seg:
            raise ValueError("type path segments must be non-empty")
    return ".".join(path)


@dataclass(frozen=True)
class Valuation:
    """A party's worth judgement about one promise; stored, never analyzed."""

    valuer: str
    promise: Promise
    worth: float


@dataclass(frozen=True)
class AutonomyFinding:
    """A condition literal that leans on something never promised to the agent."""

    promise: Promise
    type_name: str
    message: str


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PromiseGraph:
    agents: tuple[Agent, ...]
    types: tuple[PromiseTypeDecl, ...]
    bundles: tuple[Bundle, ...]
    promises: tuple[Promise, ...]
    valuations: tuple[Valuation, ...] = ()

    @cached_property
    def _agent_map(self) -> dict[str, Agent]:
        return {a.name: a for a in self.agents}

    @cached_property
    def _type_map(self) -> dict[str, PromiseTypeDecl]:
        return {t.name: t for t in self.types}

    @cached_property
    def _bundle_map(self) -> dict[str, Bundle]:
        return {b.name: b for b in self.bundles}

    def agent(self, name: str) -> Agent:
        return self._agent_map[name]

    def has_agent(self, name: str) -> bool:
        return name in self._agent_map

    def type_decl(self, name: str) -> Union[PromiseTypeDecl, None]:
        return self._type_map.get(name)

    def bundle(self, name: str) -> Union[Bundle, None]:
        return self._bundle_map.get(name)

    def channels(self) -> dict[tuple[str, str], tuple[Promise, ...]]:
        """Promises grouped by (promiser, promisee), deterministically ordered."""
        out: dict[tuple[str, str], list[Promise]] = {}
        for p in self.promises:
            out.setdefault((p.promiser, p.promisee), []).append(p)
        return {k: tuple(v) for k, v in sorted(out.items())}

    def promises_from(self, agent: str) -> tuple[Promise, ...]:
        return tuple(p for p in self.promises if p.promiser == agent)

    def promises_to(self, agent: str) -> tuple[Promise, ...]:
        return tuple(p for p in self.promises if p.promisee == agent)

    def given_types(self, giver: str, receiver: str) -> frozenset[str]:
        """Types that ``giver`` promises (polarity give) toward ``receiver``."""
        return frozenset(
            p.body.type
            for p in self.promises
            if p.promiser == giver and p.promisee == receiver and p.body.polarity == GIVE
        )


def _check_type_registry(types: Iterable[PromiseTypeDecl]) -> tuple[PromiseTypeDecl, ...]:
    by_name: dict[str, PromiseTypeDecl] = {}
    for decl in types:
        flat = flatten_type(decl.path)
        if flat != decl.name:
            raise TypeCollisionError(
                f"type {decl.name!r} does not match its path {'.'.join(decl.path)!r}"
            )
        prior = by_name.get(flat)
        if prior is not None:
            if prior.path != decl.path:
                raise TypeCollisionError(
                    f"type paths {'.'.join(prior.path)!r} and {'.'.join(decl.path)!r} "
                    f"both flatten to {flat!r}"
                )
            raise DuplicateNameError(f"type {flat!r} declared twice")
        by_name[flat] = decl
    return tuple(sorted(by_name.values(), key=lambda d: d.name))


def flatten_bundles(bundles: Iterable[Bundle]) -> tuple[Bundle, ...]:
    """Resolve ``extends`` chains: each bundle's bodies become its parent's
    bodies (already flattened) followed by its own new ones."""
    by_name: dict[str, Bundle] = {}
    for b in bundles:
        if b.name in by_name:
            raise DuplicateNameError(f"bundle {b.name!r} declared twice")
        by_name[b.name] = b

    flat: dict[str, Bundle] = {}

    def resolve(name: str, trail: tuple[str, ...]) -> Bundle:
        if name in flat:
            return flat[name]
        if name in trail:
            cycle = " -> ".join(trail[trail.index(name):] + (name,))
            raise BundleCycleError(f"bundle inheritance cycle: {cycle}")
        bundle = by_name.get(name)
        if bundle is None:
            raise DanglingReferenceError(f"unknown parent bundle {name!r}")
        bodies: list[PromiseBody] = []
        if bundle.parent is not None:
            parent = resolve(bundle.parent, trail + (name,))
            bodies.extend(parent.bodies)
        for body in bundle.bodies:
            if body not in bodies:
                bodies.append(body)
        result = Bundle(bundle.name, tuple(bodies), bundle.parent)
        flat[name] = result
        return result

    for name in by_name:
        resolve(name, ())
    return tuple(sorted(flat.values(), key=lambda b: b.name))


def derive_group(promiser: str, promisee: str, body: PromiseBody) -> str:
    """Content-derived scope id for a directly declared promise body."""
    return f"{promiser}->{promisee}|body:{format_body(body)}"


def bundle_group(promiser: str, promisee: str, bundle_name: str) -> str:
    """Scope id shared by all bodies of one bundle attachment."""
    return f"{promiser}->{promisee}|bundle:{bundle_name}"


def _referenced_types(body: PromiseBody) -> set[str]:
    names: set[str] = set()
    for c in body.constraints:
        for t in c.terms():
            if isinstance(t, Attribute):
                names.add(t.name)
    for lit in body.condition.literals:
        if isinstance(lit, FlagLiteral):
            names.add(lit.name)
        else:
            for t in (lit.lhs, lit.rhs):
                if isinstance(t, Attribute):
                    names.add(t.name)
    return names


def build_graph(
    agents: Iterable[Agent],
    types: Iterable[PromiseTypeDecl],
    bundles: Iterable[Bundle] = (),
    promises: Iterable[Promise] = (),
    valuations: Iterable[Valuation] = (),
) -> PromiseGraph:
    """Assemble and validate an immutable promise graph.

    Checks name uniqueness, reference integrity, bundle acyclicity, and
    valuation sanity; flattens bundle inheritance; deduplicates promises
    within a group; sorts every collection for determinism.
    """
    agent_list = list(agents)
    seen: set[str] = set()
    for a in agent_list:
        if a.name in seen:
            raise DuplicateNameError(f"agent {a.name!r} declared twice")
        seen.add(a.name)
    agent_names = seen

    type_tuple = _check_type_registry(types)
    known_types = {t.name for t in type_tuple}

    flat_bundles = flatten_bundles(bundles)

    def check_body(body: PromiseBody, context: str) -> None:
        if body.type != LINK_TYPE and body.type not in known_types:
            raise DanglingReferenceError(f"{context}: unknown type {body.type!r}")
        for name in _referenced_types(body):
            if name not in known_types:
                raise DanglingReferenceError(
                    f"{context}: unknown type {name!r} referenced"
                )

    for b in flat_bundles:
        for body in b.bodies:
            check_body(body, f"bundle {b.name!r}")

    deduped: dict[tuple, Promise] = {}
    for p in promises:
        if p.promiser not in agent_names:
            raise DanglingReferenceError(f"unknown promiser {p.promiser!r}")
        if p.promisee not in agent_names:
            raise DanglingReferenceError(f"unknown promisee {p.promisee!r}")
        check_body(p.body, f"promise {p.promiser} -> {p.promisee}")
        group = p.group or derive_group(p.promiser, p.promisee, p.body)
        normalized = Promise(p.promiser, p.promisee, p.body, group)
        deduped[(p.promiser, p.promisee, group, p.body)] = normalized
    promise_tuple = tuple(sorted(deduped.values(), key=promise_sort_key))
    promise_set = set(promise_tuple)

    valuation_list: list[Valuation] = []
    for v in valuations:
        anchored = v.promise
        if not anchored.group:
            anchored = Promise(
                anchored.promiser,
                anchored.promisee,
                anchored.body,
                derive_group(anchored.promiser, anchored.promisee, anchored.body),
            )
        if anchored not in promise_set:
            raise DanglingReferenceError(
                f"valuation refers to an absent promise: {anchored.formatted()}"
            )
        if v.valuer not in (anchored.promiser, anchored.promisee):
            raise DanglingReferenceError(
                f"valuer {v.valuer!r} is party to neither side of {anchored.formatted()}"
            )
        valuation_list.append(Valuation(v.valuer, anchored, v.worth))
    valuation_tuple = tuple(
        sorted(valuation_list, key=lambda v: (v.valuer, promise_sort_key(v.promise), v.worth))
    )

    return PromiseGraph(
        agents=tuple(sorted(agent_list, key=lambda a: a.name)),
        types=type_tuple,
        bundles=flat_bundles,
        promises=promise_tuple,
        valuations=valuation_tuple,
    )


def validate_autonomy(graph: PromiseGraph) -> list[AutonomyFinding]:
    """Conditions may only watch what the promiser can see: types promised to
    it by the promisee, or its own private attributes.  One finding per
    offending reference."""
    findings: list[AutonomyFinding] = []
    for p in graph.promises:
        if p.body.condition.is_empty:
            continue
        visible = graph.given_types(p.promisee, p.promiser)
        private = {name for name, _ in graph.agent(p.promiser).private_attrs}
        for lit in p.body.condition.sorted_literals():
            if isinstance(lit, FlagLiteral):
                referenced = [lit.name]
            else:
                referenced = [t.name for t in (lit.lhs, lit.rhs) if isinstance(t, Attribute)]
            for name in referenced:
                if name in visible or name in private:
                    continue
                findings.append(
                    AutonomyFinding(
                        promise=p,
                        type_name=name,
                        message=(
                            f"condition of {p.formatted()} references {name!r}, "
                            f"which {p.promisee} never promises to {p.promiser}"
                        ),
                    )
                )
    return findings
