"""Static analyses over promise graphs.

Treats recurring promise structure as class structure: canonical bundle
signatures, role discovery, the spanning set of class-like containers,
extension / specialization / substitution checks, the behavioural is-a
verdict, dispatch-pattern validation, channel conflict detection, and
class-hierarchy derivation.
"""
from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .constraints import (
    closure,
    condition_satisfiable,
    mutually_exclusive,
    pairwise_exclusive,
    satisfiable,
    split_condition,
    TermPartition,
)
from .errors import UnsatisfiableError
from .model import (
    ALWAYS,
    Attribute,
    body_key,
    Bundle,
    CmpLiteral,
    Condition,
    ConditionLiteral,
    EqConstraint,
    FlagLiteral,
    format_body,
    format_condition,
    format_term,
    GIVE,
    is_constant,
    LINK_TYPE,
    Parameter,
    Promise,
    PromiseBody,
    PromiseGraph,
    term_key,
    Term,
    USE,
)


class Severity(enum.IntEnum):
    """How bad a finding is; comparable, worst last."""

    PATTERN_ERROR = 1
    POLICY_VIOLATION = 2
    RESTRICTED = 3
    INCONSISTENT = 4

    @property
    def label(self) -> str:
        return _SEVERITY_LABELS[self]


_SEVERITY_LABELS = {
    Severity.PATTERN_ERROR: "PatternError",
    Severity.POLICY_VIOLATION: "PolicyViolation",
    Severity.RESTRICTED: "Restricted",
    Severity.INCONSISTENT: "Inconsistent",
}


@dataclass(frozen=True)
class Finding:
    """One detected problem, citing the promises (or bodies) involved."""

    severity: Severity
    code: str
    message: str
    promises: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.promises:
            raise ValueError("a finding must cite at least one promise")


def finding_sort_key(f: Finding) -> tuple:
    return (-int(f.severity), f.code, f.promises, f.message)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a structural check: fine iff there are no findings."""

    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings


# ---------------------------------------------------------------------------
# Canonical signatures
# ---------------------------------------------------------------------------
#
# A signature must be identical for bundles that differ only by a bijective
# parameter renaming.  Parameters are therefore renamed to numeric indices
# assigned in first-use order of a canonical body ordering; when several
# parameters occupy interchangeable positions, the lexicographically least
# rendering over their permutations is taken (exact up to _PERM_CAP tied
# parameters, a deterministic fallback beyond).

_PERM_CAP = 720


def _term_sig(term: Term, assign: dict[str, int]) -> tuple:
    if isinstance(term, Parameter):
        return ("param", assign.get(term.name, -1))
    kind = type(term).__name__
    if is_constant(term):
        return (kind, term.value)  # type: ignore[union-attr]
    return (kind, term.name)  # type: ignore[union-attr]


def _constraint_sig(c: EqConstraint, assign: dict[str, int]) -> tuple:
    sides = sorted((_term_sig(c.lhs, assign), _term_sig(c.rhs, assign)))
    return ("eq", sides[0], sides[1])


def _literal_sig(lit: ConditionLiteral, assign: dict[str, int]) -> tuple:
    if isinstance(lit, FlagLiteral):
        return ("flag", lit.name, lit.negated)
    sides = sorted((_term_sig(lit.lhs, assign), _term_sig(lit.rhs, assign)))
    return ("cmp", lit.op, sides[0], sides[1])


def _entry_sig(
    body: PromiseBody, assign: dict[str, int], with_condition: bool
) -> tuple:
    constraints = tuple(sorted(_constraint_sig(c, assign) for c in body.constraints))
    entry: tuple = (body.polarity, body.type, constraints)
    if with_condition:
        lits = tuple(sorted(_literal_sig(l, assign) for l in body.condition.literals))
        entry += (lits,)
    return entry


def _body_params(body: PromiseBody, with_condition: bool) -> list[str]:
    names = []
    for c in body.constraints:
        for t in c.terms():
            if isinstance(t, Parameter):
                names.append(t.name)
    if with_condition:
        for lit in body.condition.literals:
            if isinstance(lit, CmpLiteral):
                for t in (lit.lhs, lit.rhs):
                    if isinstance(t, Parameter):
                        names.append(t.name)
    return names


def _param_classes(
    bodies: Sequence[PromiseBody], with_condition: bool
) -> list[list[str]]:
    """Group parameters by their renaming-invariant occurrence profile."""
    masked: dict[str, int] = {}
    contexts: dict[str, list[tuple]] = {}
    for body in bodies:
        body_ctx = _entry_sig(body, masked, with_condition)
        items: list[tuple[tuple, tuple[Term, ...]]] = [
            (_constraint_sig(c, masked), c.terms()) for c in body.constraints
        ]
        if with_condition:
            for lit in body.condition.literals:
                if isinstance(lit, CmpLiteral):
                    items.append((_literal_sig(lit, masked), (lit.lhs, lit.rhs)))
        for item_ctx, terms in items:
            for t in terms:
                if isinstance(t, Parameter):
                    contexts.setdefault(t.name, []).append((body_ctx, item_ctx))
    profiles: dict[tuple, list[str]] = {}
    for name, ctx in contexts.items():
        profiles.setdefault(tuple(sorted(ctx)), []).append(name)
    return [sorted(profiles[key]) for key in sorted(profiles)]


def _assignments(classes: list[list[str]]) -> Iterable[dict[str, int]]:
    total = 1
    for cls in classes:
        for n in range(2, len(cls) + 1):
            total *= n
    if total > _PERM_CAP:
        base = 0
        assign = {}
        for cls in classes:
            for name in cls:
                assign[name] = base
                base += 1
        yield assign
        return
    per_class = [list(itertools.permutations(cls)) for cls in classes]
    for combo in itertools.product(*per_class):
        assign = {}
        base = 0
        for ordering in combo:
            for name in ordering:
                assign[name] = base
                base += 1
        yield assign


def _canonical(bodies: Sequence[PromiseBody], with_condition: bool) -> tuple:
    has_params = any(_body_params(b, with_condition) for b in bodies)
    if not has_params:
        return tuple(sorted(_entry_sig(b, {}, with_condition) for b in bodies))
    classes = _param_classes(bodies, with_condition)
    best: Union[tuple, None] = None
    for assign in _assignments(classes):
        cand = tuple(sorted(_entry_sig(b, assign, with_condition) for b in bodies))
        if best is None or cand < best:
            best = cand
    return best or ()


def bundle_signature(bundle: Bundle) -> tuple:
    """Canonical multiset of (polarity, type, constraint shape), parameter
    names erased.  Conditions do not participate: an attachment condition
    never changes which class a bundle belongs to."""
    stripped = [
        PromiseBody(b.polarity, b.type, b.constraints, ALWAYS)
        for b in bundle.bodies
    ]
    return _canonical(stripped, with_condition=False)


def normalize_body(body: PromiseBody) -> tuple:
    """One body's shape with parameters canonically indexed, condition
    included — the equality used for containment checks."""
    return _canonical([body], with_condition=True)[0]


# ---------------------------------------------------------------------------
# Roles and the spanning set
# ---------------------------------------------------------------------------

OUT = "out"
IN = "in"

RoleSignature = tuple  # sorted ((direction, polarity, type), count) pairs


@dataclass(frozen=True)
class Role:
    """A maximal set of agents with identical incident promise shapes."""

    signature: RoleSignature
    label: str
    members: tuple[str, ...]


def role_signature(graph: PromiseGraph, agent: str) -> RoleSignature:
    """Multiset of (direction, polarity, type) over the agent's promises.

    Constraints and conditions are deliberately invisible, and so are
    constraint-only link bodies: an extra equation never changes the role."""
    counts: Counter = Counter()
    for p in graph.promises_from(agent):
        if not p.body.is_link:
            counts[(OUT, p.body.polarity, p.body.type)] += 1
    for p in graph.promises_to(agent):
        if not p.body.is_link:
            counts[(IN, p.body.polarity, p.body.type)] += 1
    return tuple(sorted(counts.items()))


def _role_label(signature: RoleSignature) -> str:
    if not signature:
        return "isolated"
    for direction, polarity in ((OUT, GIVE), (OUT, USE), (IN, GIVE), (IN, USE)):
        types = sorted(
            {
                entry[2]
                for entry, _ in signature
                if entry[0] == direction and entry[1] == polarity
            }
        )
        if types:
            if direction == OUT:
                verb = "gives" if polarity == GIVE else "uses"
            else:
                verb = "receives" if polarity == GIVE else "serves"
            return f"{verb}:{'+'.join(types)}"
    return "isolated"


def discover_roles(graph: PromiseGraph) -> list[Role]:
    """Partition every agent by role signature, ordered by signature."""
    by_signature: dict[RoleSignature, list[str]] = {}
    for agent in graph.agents:
        by_signature.setdefault(role_signature(graph, agent.name), []).append(
            agent.name
        )
    return [
        Role(sig, _role_label(sig), tuple(sorted(members)))
        for sig, members in sorted(by_signature.items())
    ]


@dataclass(frozen=True)
class SpanningClass:
    """One distinct bundle shape and everything that exhibits it."""

    representative: str
    members: tuple[str, ...]
    signature: tuple


def extract_spanning_set(graph: PromiseGraph) -> tuple[SpanningClass, ...]:
    """The distinct bundle signatures present in the graph: declared bundles
    plus, per channel, the collection of directly promised bodies."""
    candidates: list[tuple[str, tuple]] = []
    for bundle in graph.bundles:
        candidates.append((bundle.name, bundle_signature(bundle)))
    for (promiser, promisee), promises in graph.channels().items():
        direct = [p.body for p in promises if "|body:" in p.group]
        if direct:
            name = f"{promiser}->{promisee}"
            candidates.append((name, bundle_signature(Bundle(name, tuple(direct)))))
    grouped: dict[tuple, list[str]] = {}
    for name, sig in sorted(candidates):
        grouped.setdefault(sig, []).append(name)
    classes = [
        SpanningClass(members[0], tuple(members), sig)
        for sig, members in grouped.items()
    ]
    return tuple(sorted(classes, key=lambda c: c.representative))


# ---------------------------------------------------------------------------
# Containment-style checks
# ---------------------------------------------------------------------------

def check_extension(child: Bundle, parent: Bundle) -> bool:
    """Does ``child`` contain every body of ``parent``?  Bodies are compared
    with parameters canonically renamed, so the copy may use fresh names."""
    child_bodies = Counter(normalize_body(b) for b in child.bodies)
    parent_bodies = Counter(normalize_body(b) for b in parent.bodies)
    return not parent_bodies - child_bodies


def _type_multiset(bundle: Bundle) -> Counter:
    return Counter(b.type for b in bundle.bodies)


def _bundle_refs(bundle: Bundle) -> tuple[str, ...]:
    return tuple(f"bundle {bundle.name}: {format_body(b)}" for b in bundle.sorted_bodies()) or (
        f"bundle {bundle.name}: (empty)",
    )


def _format_types(counts: Counter) -> str:
    parts = []
    for name in sorted(counts):
        n = counts[name]
        parts.append(name if n == 1 else f"{name} x{n}")
    return ", ".join(parts)


def _witness_text(witness: tuple[tuple[str, str], ...]) -> str:
    return ", ".join(f"{k}={v}" for k, v in witness) or "always"


def _exclusivity_findings(
    named: Sequence[tuple[str, Condition]], code: str, refs: dict[str, tuple[str, ...]]
) -> list[Finding]:
    if len(named) < 2:
        return []
    report = pairwise_exclusive([cond for _, cond in named])
    findings = []
    for i, j, witness in report.violations:
        a, b = named[i][0], named[j][0]
        findings.append(
            Finding(
                Severity.PATTERN_ERROR,
                code,
                f"conditions of {a} ({format_condition(named[i][1])}) and {b} "
                f"({format_condition(named[j][1])}) can hold together: "
                f"{_witness_text(witness)}",
                tuple(sorted(set(refs[a] + refs[b]))),
            )
        )
    return findings


def check_specialization(
    parent: Bundle,
    base_condition: Condition,
    children: Sequence[tuple[Bundle, Condition]],
) -> CheckReport:
    """Children may each replace a subset of the parent's typed bodies, and
    the parent's own condition plus every child condition must be pairwise
    exclusive — at most one variant in force at a time."""
    if not children:
        raise ValueError("specialization needs at least one child")
    findings: list[Finding] = []
    parent_types = _type_multiset(parent)
    for child, _cond in children:
        extra = _type_multiset(child) - parent_types
        if extra:
            findings.append(
                Finding(
                    Severity.PATTERN_ERROR,
                    "type-mismatch",
                    f"bundle {child.name} overrides types {parent.name} does not "
                    f"offer: {_format_types(extra)}",
                    _bundle_refs(child),
                )
            )
    named = [(f"bundle {parent.name}", base_condition)] + [
        (f"bundle {child.name}", cond) for child, cond in children
    ]
    refs = {f"bundle {parent.name}": _bundle_refs(parent)}
    for child, _cond in children:
        refs[f"bundle {child.name}"] = _bundle_refs(child)
    findings.extend(_exclusivity_findings(named, "non-exclusive", refs))
    return CheckReport(tuple(sorted(findings, key=finding_sort_key)))


def check_substitution(
    parent: Bundle,
    children: Sequence[tuple[Bundle, Condition]],
    parent_condition: Union[Condition, None] = None,
) -> CheckReport:
    """Each child must stand in for the parent wholesale: identical type
    multiset, under conditions exclusive with the parent's predicate.  The
    parent predicate defaults to whatever condition all its bodies share."""
    if not children:
        raise ValueError("substitution needs at least one child")
    if parent_condition is None:
        parent_condition = _shared_condition(parent)
    findings: list[Finding] = []
    parent_types = _type_multiset(parent)
    for child, _cond in children:
        child_types = _type_multiset(child)
        extra = child_types - parent_types
        missing = parent_types - child_types
        if extra:
            findings.append(
                Finding(
                    Severity.PATTERN_ERROR,
                    "type-mismatch",
                    f"bundle {child.name} introduces types {parent.name} does not "
                    f"offer: {_format_types(extra)}",
                    _bundle_refs(child),
                )
            )
        elif missing:
            findings.append(
                Finding(
                    Severity.PATTERN_ERROR,
                    "incomplete-replacement",
                    f"bundle {child.name} replaces only part of {parent.name}; "
                    f"missing: {_format_types(missing)}",
                    _bundle_refs(child),
                )
            )
    named = [(f"bundle {parent.name}", parent_condition)] + [
        (f"bundle {child.name}", cond) for child, cond in children
    ]
    refs = {f"bundle {parent.name}": _bundle_refs(parent)}
    for child, _cond in children:
        refs[f"bundle {child.name}"] = _bundle_refs(child)
    findings.extend(_exclusivity_findings(named, "non-exclusive", refs))
    return CheckReport(tuple(sorted(findings, key=finding_sort_key)))


def _shared_condition(bundle: Bundle) -> Condition:
    """The condition literals common to every body of the bundle."""
    literal_sets = [set(b.condition.literals) for b in bundle.bodies]
    if not literal_sets:
        return ALWAYS
    shared = set.intersection(*literal_sets)
    return Condition(frozenset(shared))


# ---------------------------------------------------------------------------
# The is-a verdict
# ---------------------------------------------------------------------------

IS_A = "is-a"
RESTRICTED = "restricted"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class IsAVerdict:
    """Can the child's promises ride along with the parent's unharmed?"""

    outcome: str  # IS_A, RESTRICTED, or INCONSISTENT
    details: tuple[str, ...] = ()
    involved: tuple[str, ...] = ()

    @property
    def is_a(self) -> bool:
        return self.outcome == IS_A


@dataclass(frozen=True)
class _Scenario:
    active: frozenset[Condition]
    eqs: tuple[EqConstraint, ...]
    neqs: tuple[tuple[Term, Term], ...]

    def describe(self) -> str:
        if not self.active:
            return ""
        return " & ".join(sorted(format_condition(c) for c in self.active))


def _scenarios(conditions: Iterable[Condition]) -> list[_Scenario]:
    """Maximal co-satisfiable combinations of the distinct conditions seen.

    Each scenario carries the equality/disequality premises its conditions
    impose; bodies with conditions outside the scenario are dormant."""
    distinct = sorted(
        {c for c in conditions if not c.is_empty},
        key=lambda c: format_condition(c),
    )
    viable = [c for c in distinct if condition_satisfiable(c)]
    subsets: list[frozenset[Condition]] = []
    for r in range(len(viable), -1, -1):
        for combo in itertools.combinations(viable, r):
            if not condition_satisfiable(*combo):
                continue
            chosen = frozenset(combo)
            if any(chosen < bigger for bigger in subsets):
                continue
            if chosen not in subsets:
                subsets.append(chosen)
    if not subsets:
        subsets = [frozenset()]
    scenarios = []
    for chosen in subsets:
        eqs: list[EqConstraint] = []
        neqs: list[tuple[Term, Term]] = []
        for cond in chosen:
            ce, cn, _ = split_condition(cond)
            eqs.extend(ce)
            neqs.extend(cn)
        scenarios.append(_Scenario(chosen, tuple(eqs), tuple(neqs)))
    return scenarios


def _scope_params(body: PromiseBody, scope: str) -> frozenset[EqConstraint]:
    """Rename the body's parameters apart from every other scope's."""

    def rescope(t: Term) -> Term:
        if isinstance(t, Parameter):
            return Parameter(f"{scope}::{t.name}")
        return t

    return frozenset(
        EqConstraint(rescope(c.lhs), rescope(c.rhs)) for c in body.constraints
    )


def _active(body: PromiseBody, scenario: _Scenario) -> bool:
    return body.condition.is_empty or body.condition in scenario.active


def _bundle_satisfiable(bundle: Bundle, scope: str) -> bool:
    for scenario in _scenarios(b.condition for b in bundle.bodies):
        eqs = list(scenario.eqs)
        for body in bundle.bodies:
            if _active(body, scenario):
                eqs.extend(_scope_params(body, scope))
        if not satisfiable(eqs, scenario.neqs):
            return False
    return True


def _clash_detail(part: TermPartition) -> str:
    clash = part.constant_clash()
    if clash is None:
        return "a required disequality is violated"
    return f"{format_term(clash[0])} and {format_term(clash[1])} are forced equal"


def check_is_a(child: Bundle, parent: Bundle) -> IsAVerdict:
    """Promise both bundles at once and see what breaks.

    Inconsistent: the union forces two distinct constants together.
    Restricted: the union forces an equality among the parent's own
    attributes and constants that the parent alone does not entail.
    Otherwise the child can genuinely stand in for the parent.
    """
    for bundle, scope in ((parent, "parent"), (child, "child")):
        if not _bundle_satisfiable(bundle, scope):
            raise UnsatisfiableError(
                f"bundle {bundle.name} is unsatisfiable on its own"
            )

    conditions = [b.condition for b in parent.bodies] + [
        b.condition for b in child.bodies
    ]
    merged: list[tuple[str, ...]] = []
    merged_involved: list[str] = []
    for scenario in _scenarios(conditions):
        parent_eqs = list(scenario.eqs)
        joint_eqs = list(scenario.eqs)
        parent_scoped: list[frozenset[EqConstraint]] = []
        refs: list[tuple[str, frozenset[EqConstraint]]] = []
        for body in parent.bodies:
            if _active(body, scenario):
                scoped = _scope_params(body, "parent")
                parent_scoped.append(scoped)
                parent_eqs.extend(scoped)
                joint_eqs.extend(scoped)
                refs.append((f"parent {parent.name}: {format_body(body)}", scoped))
        for body in child.bodies:
            if _active(body, scenario):
                scoped = _scope_params(body, "child")
                joint_eqs.extend(scoped)
                refs.append((f"child {child.name}: {format_body(body)}", scoped))

        joint = closure(joint_eqs)
        if not satisfiable(joint_eqs, scenario.neqs):
            detail = _clash_detail(joint)
            if scenario.active:
                detail += f" (when {scenario.describe()})"
            return IsAVerdict(
                INCONSISTENT,
                (detail,),
                _refs_touching(refs, joint, None),
            )

        baseline = closure(parent_eqs)
        vocabulary = {
            t
            for scoped in parent_scoped
            for c in scoped
            for t in c.terms()
            if not isinstance(t, Parameter)
        }
        for a, b in joint.new_pairs_over(baseline, vocabulary):
            pair = f"{format_term(a)} ~ {format_term(b)}"
            if scenario.active:
                pair += f" (when {scenario.describe()})"
            merged.append((pair, format_term(a), format_term(b)))
            merged_involved.extend(_refs_touching(refs, joint, a))

    if merged:
        details = tuple(sorted({entry[0] for entry in merged}))
        return IsAVerdict(RESTRICTED, details, tuple(sorted(set(merged_involved))))
    return IsAVerdict(IS_A)


def _refs_touching(
    refs: Sequence[tuple[str, frozenset[EqConstraint]]],
    part: TermPartition,
    anchor: Union[Term, None],
) -> tuple[str, ...]:
    """The body references whose terms sit in the anchor's class (or in any
    clashing class when no anchor is given)."""
    if anchor is not None:
        target_classes = [set(part.class_of(anchor))]
    else:
        target_classes = [
            set(cls)
            for cls in part.classes
            if sum(1 for t in cls if is_constant(t)) > 1
        ]
        if not target_classes:
            target_classes = [set(part.terms)]
    out = []
    for name, scoped in refs:
        terms = {t for c in scoped for t in c.terms()}
        if any(terms & cls for cls in target_classes):
            out.append(name)
    return tuple(sorted(set(out))) or tuple(sorted({name for name, _ in refs}))


# ---------------------------------------------------------------------------
# Override policy
# ---------------------------------------------------------------------------

def check_override_policy(base: Bundle, child: Bundle) -> list[Finding]:
    """The base bundle's bodies are not to be overridden: conjoining the
    child must neither contradict nor narrow any of them.  Parameters are a
    shared namespace here — the child is editing the base's own variables."""
    base_cons = [c for b in base.bodies for c in b.constraints]
    child_cons = [c for b in child.bodies for c in b.constraints]
    joint = closure(base_cons + child_cons)
    findings: list[Finding] = []

    clash_classes = [
        set(cls)
        for cls in joint.classes
        if sum(1 for t in cls if is_constant(t)) > 1
    ]
    if clash_classes:
        for body in base.sorted_bodies():
            terms = {t for c in body.constraints for t in c.terms()}
            if any(terms & cls for cls in clash_classes):
                findings.append(
                    Finding(
                        Severity.POLICY_VIOLATION,
                        "override-contradiction",
                        f"base body '{format_body(body)}' of {base.name} is "
                        f"contradicted by {child.name}",
                        _bundle_refs(child) + (f"bundle {base.name}: {format_body(body)}",),
                    )
                )
        return sorted(findings, key=finding_sort_key)

    baseline = closure(base_cons)
    vocabulary = {t for c in base_cons for t in c.terms()}
    new_pairs = joint.new_pairs_over(baseline, vocabulary)
    if not new_pairs:
        return []
    for body in base.sorted_bodies():
        terms = {t for c in body.constraints for t in c.terms()}
        touching = [
            f"{format_term(a)} ~ {format_term(b)}"
            for a, b in new_pairs
            if a in terms or b in terms
        ]
        if touching:
            findings.append(
                Finding(
                    Severity.POLICY_VIOLATION,
                    "override-restriction",
                    f"base body '{format_body(body)}' of {base.name} is narrowed "
                    f"by {child.name}: {', '.join(touching)}",
                    _bundle_refs(child) + (f"bundle {base.name}: {format_body(body)}",),
                )
            )
    return sorted(findings, key=finding_sort_key)


# ---------------------------------------------------------------------------
# Dispatch pattern
# ---------------------------------------------------------------------------

def _mentions_flag(cond: Condition, flag: str) -> bool:
    return any(
        isinstance(lit, FlagLiteral) and lit.name == flag for lit in cond.literals
    )


def check_dispatch_pattern(
    graph: PromiseGraph, sender: str, receiver: str, discriminator: str
) -> CheckReport:
    """A behaviour switch: the receiver reports a discriminating flag, the
    sender promises to heed it, and the sender's flag-conditioned offerings
    never apply two at once."""
    findings: list[Finding] = []

    gives_flag = any(
        p.body.polarity == GIVE and p.body.type == discriminator
        for p in graph.channels().get((receiver, sender), ())
    )
    if not gives_flag:
        findings.append(
            Finding(
                Severity.PATTERN_ERROR,
                "dispatch-missing-give",
                f"{receiver} never gives '{discriminator}' to {sender}, so "
                f"{sender} cannot condition on it",
                (f"{receiver} -> {sender}: +{discriminator}",),
            )
        )

    outgoing = graph.channels().get((sender, receiver), ())
    uses_flag = any(
        p.body.polarity == USE and p.body.type == discriminator for p in outgoing
    )
    if not uses_flag:
        findings.append(
            Finding(
                Severity.PATTERN_ERROR,
                "dispatch-missing-use",
                f"{sender} never promises {receiver} to heed '{discriminator}'",
                (f"{sender} -> {receiver}: U({discriminator})",),
            )
        )

    branches: dict[tuple[str, Condition], list[Promise]] = {}
    for p in outgoing:
        if _mentions_flag(p.body.condition, discriminator):
            branches.setdefault((p.group, p.body.condition), []).append(p)
    keys = sorted(branches, key=lambda k: (k[0], format_condition(k[1])))
    for (g1, c1), (g2, c2) in itertools.combinations(keys, 2):
        verdict = mutually_exclusive(c1, c2)
        if verdict.exclusive:
            continue
        cited = tuple(
            sorted(
                {p.formatted() for p in branches[(g1, c1)]}
                | {p.formatted() for p in branches[(g2, c2)]}
            )
        )
        findings.append(
            Finding(
                Severity.PATTERN_ERROR,
                "dispatch-overlap",
                f"branches on '{discriminator}' overlap: "
                f"({format_condition(c1)}) and ({format_condition(c2)}) "
                f"hold together when {_witness_text(verdict.witness or ())}",
                cited,
            )
        )
    return CheckReport(tuple(sorted(findings, key=finding_sort_key)))


# ---------------------------------------------------------------------------
# Conflict detection
# ---------------------------------------------------------------------------

def _scope_label(group: str) -> str:
    tail = group.split("|", 1)[-1]
    if tail.startswith("bundle:"):
        return f"bundle {tail[len('bundle:'):]}"
    return f"promise {tail[len('body:'):]}"


def _scope_of(term: Term) -> Union[str, None]:
    if isinstance(term, Parameter) and "::" in term.name:
        return term.name.split("::", 1)[0]
    return None


def detect_conflicts(graph: PromiseGraph) -> list[Finding]:
    """Per channel, conjoin everything that can be in force at once.

    Inconsistent: some compatible combination of promises cannot hold.
    Restricted: parameters belonging to independently declared promises are
    forced together — one declaration quietly tightens another.
    Policy violation: two promises of the same polarity and type whose
    conditions can overlap, leaving it ambiguous which one applies.
    """
    findings: dict[tuple, Finding] = {}

    def add(f: Finding) -> None:
        findings.setdefault((f.severity, f.code, f.promises, f.message), f)

    for (promiser, promisee), promises in graph.channels().items():
        channel = f"{promiser} -> {promisee}"

        # Overlapping same-shape promises, regardless of scenario.
        eligible = [p for p in promises if p.body.type != LINK_TYPE]
        for p1, p2 in itertools.combinations(eligible, 2):
            if (p1.body.polarity, p1.body.type) != (p2.body.polarity, p2.body.type):
                continue
            c1, c2 = p1.body.condition, p2.body.condition
            if c1 == c2:
                continue
            verdict = mutually_exclusive(c1, c2)
            if verdict.exclusive:
                continue
            add(
                Finding(
                    Severity.POLICY_VIOLATION,
                    "channel-overlap",
                    f"{channel}: '{format_body(p1.body)}' and "
                    f"'{format_body(p2.body)}' can both apply "
                    f"(when {_witness_text(verdict.witness or ())})",
                    tuple(sorted({p1.formatted(), p2.formatted()})),
                )
            )

        # Scenario-by-scenario joint satisfiability and independence.
        scoped: dict[Promise, frozenset[EqConstraint]] = {
            p: _scope_params(p.body, p.group) for p in promises
        }
        for scenario in _scenarios(p.body.condition for p in promises):
            active = [p for p in promises if _active(p.body, scenario)]
            eqs = list(scenario.eqs)
            for p in active:
                eqs.extend(scoped[p])
            part = closure(eqs)
            when = f" (when {scenario.describe()})" if scenario.active else ""

            if not satisfiable(eqs, scenario.neqs):
                contributors = [p for p in active if scoped[p]]
                add(
                    Finding(
                        Severity.INCONSISTENT,
                        "channel-inconsistent",
                        f"{channel}: promises cannot all hold{when}: "
                        f"{_clash_detail(part)}",
                        tuple(sorted({p.formatted() for p in contributors}))
                        or tuple(sorted({p.formatted() for p in active})),
                    )
                )
                continue

            for cls in part.classes:
                by_scope: dict[str, list[Term]] = {}
                for t in cls:
                    scope = _scope_of(t)
                    if scope is not None:
                        by_scope.setdefault(scope, []).append(t)
                if len(by_scope) < 2:
                    continue
                shared = " = ".join(
                    f"{_scope_label(scope)} "
                    f"{{{', '.join(format_term(t) for t in sorted(terms, key=term_key))}}}"
                    for scope, terms in sorted(by_scope.items())
                )
                involved = tuple(
                    sorted(
                        {
                            p.formatted()
                            for p in active
                            if p.group in by_scope
                        }
                    )
                )
                add(
                    Finding(
                        Severity.RESTRICTED,
                        "channel-restricted",
                        f"{channel}: independent declarations are forced to "
                        f"share one value{when}: {shared}",
                        involved,
                    )
                )

    return sorted(findings.values(), key=finding_sort_key)


# ---------------------------------------------------------------------------
# Class-hierarchy derivation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassNode:
    """One class-like unit: a guard condition ('' for the base) and the
    bodies promised under it."""

    condition: str
    bodies: tuple[str, ...]


@dataclass(frozen=True)
class RoleClasses:
    role: Role
    base: ClassNode
    subtypes: tuple[ClassNode, ...]


@dataclass(frozen=True)
class ClassHierarchy:
    classes: tuple[RoleClasses, ...]
    findings: tuple[Finding, ...] = ()


def derive_class_hierarchy(graph: PromiseGraph) -> ClassHierarchy:
    """Read class structure off the graph, one class per role.

    Unconditional bodies form the base class.  Conditional bodies group by
    condition; groups whose conditions are pairwise exclusive become subtype
    nodes, anything overlapping stays in the base and is reported."""
    findings: list[Finding] = []
    entries: list[RoleClasses] = []
    for role in discover_roles(graph):
        rep = role.members[0]
        bodies: list[PromiseBody] = []
        citations: dict[PromiseBody, str] = {}
        for p in graph.promises_from(rep):
            if p.body not in citations:
                bodies.append(p.body)
                citations[p.body] = p.formatted()
        bodies.sort(key=body_key)

        base = [b for b in bodies if b.condition.is_empty]
        groups: dict[Condition, list[PromiseBody]] = {}
        for b in bodies:
            if not b.condition.is_empty:
                groups.setdefault(b.condition, []).append(b)

        conditions = sorted(groups, key=format_condition)
        overlapping: set[Condition] = set()
        if len(conditions) >= 2:
            report = pairwise_exclusive(conditions)
            for i, j, witness in report.violations:
                overlapping.update((conditions[i], conditions[j]))
                findings.append(
                    Finding(
                        Severity.PATTERN_ERROR,
                        "hierarchy-overlap",
                        f"role '{role.label}': conditions "
                        f"({format_condition(conditions[i])}) and "
                        f"({format_condition(conditions[j])}) can hold together "
                        f"(when {_witness_text(witness)}); their bodies stay in "
                        f"the base class",
                        tuple(
                            sorted(
                                citations[b]
                                for c in (conditions[i], conditions[j])
                                for b in groups[c]
                            )
                        ),
                    )
                )

        base_bodies = [format_body(b) for b in base]
        for cond in conditions:
            if cond in overlapping:
                base_bodies.extend(format_body(b) for b in groups[cond])
        subtypes = tuple(
            ClassNode(
                format_condition(cond),
                tuple(
                    format_body(
                        PromiseBody(b.polarity, b.type, b.constraints, ALWAYS)
                    )
                    for b in groups[cond]
                ),
            )
            for cond in conditions
            if cond not in overlapping
        )
        if len(subtypes) >= 2:
            recheck = pairwise_exclusive(
                [cond for cond in conditions if cond not in overlapping]
            )
            if not recheck.ok:  # pragma: no cover - folding removed overlaps
                raise RuntimeError("subtype conditions failed re-verification")
        entries.append(
            RoleClasses(
                role,
                ClassNode("", tuple(sorted(base_bodies))),
                subtypes,
            )
        )
    return ClassHierarchy(
        tuple(entries), tuple(sorted(findings, key=finding_sort_key))
    )
