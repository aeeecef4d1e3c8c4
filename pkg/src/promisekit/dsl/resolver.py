"""Name resolution and graph construction for parsed models.

Turns a syntax tree into an immutable promise graph: checks declarations,
resolves identifiers into typed terms, enforces kind discipline (numbers
don't mix with strings, services and flags take no values, use-bodies take
no constraints), expands bundle attachments, and attaches autonomy warnings.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..errors import PromiseModelError
from ..model import (
    Agent,
    ALWAYS,
    Attribute,
    build_graph,
    bundle_group,
    Bundle,
    CmpLiteral,
    Condition,
    ConditionLiteral,
    derive_group,
    EqConstraint,
    FlagLiteral,
    flatten_type,
    GIVE,
    KIND_FLAG,
    KIND_NUM,
    KIND_SERVICE,
    KIND_STR,
    LINK_TYPE,
    NamedConst,
    NumConst,
    Parameter,
    Promise,
    PromiseBody,
    PromiseGraph,
    PromiseTypeDecl,
    StrConst,
    Term,
    USE,
    VALUED_KINDS,
)
from .ast_nodes import (
    AgentDecl,
    BodyNode,
    BundleDecl,
    BundleRef,
    CmpLiteralNode,
    ConditionNode,
    FlagDecl,
    FlagLiteralNode,
    IdentTerm,
    ModelAst,
    NumberTerm,
    ParamTerm,
    PromiseDecl,
    StringTerm,
    TermNode,
    TypeDecl,
)
from .diagnostics import (
    Diagnostic,
    diagnostic_sort_key,
    E_RESOLVE_CYCLE,
    E_RESOLVE_DUPLICATE,
    E_RESOLVE_KIND_CONFLICT,
    E_RESOLVE_NOT_A_FLAG,
    E_RESOLVE_TYPE_COLLISION,
    E_RESOLVE_UNKNOWN_AGENT,
    E_RESOLVE_UNKNOWN_BUNDLE,
    E_RESOLVE_UNKNOWN_TYPE,
    E_RESOLVE_USE_CONSTRAINT,
    E_RESOLVE_VALUELESS_TYPE,
    ERROR,
    has_errors,
    SourceSpan,
    W_AUTONOMY,
    WARNING,
)

_UNKNOWN = "unknown"  # kind placeholder for named constants


@dataclass
class ResolveResult:
    graph: Union[PromiseGraph, None]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.graph is not None


class _Resolver:
    def __init__(self, ast: ModelAst) -> None:
        self.ast = ast
        self.diagnostics: list[Diagnostic] = []
        self.agents: dict[str, Agent] = {}
        self.types: dict[str, PromiseTypeDecl] = {}
        self.bundle_decls: dict[str, BundleDecl] = {}
        self.bundles: dict[str, Bundle] = {}
        self.promises: list[Promise] = []
        self.promise_spans: dict[tuple, SourceSpan] = {}

    def error(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic(ERROR, code, message, span))

    # -- declaration collection --------------------------------------------

    def collect_agents(self) -> None:
        for decl in self.ast.decls:
            if not isinstance(decl, AgentDecl):
                continue
            for name in decl.names:
                if name.text in self.agents:
                    self.error(
                        E_RESOLVE_DUPLICATE,
                        f"agent '{name.text}' is already declared",
                        name.span,
                    )
                    continue
                self.agents[name.text] = Agent.make(name.text)

    def collect_types(self) -> None:
        paths: dict[str, tuple[str, ...]] = {}
        for decl in self.ast.decls:
            if isinstance(decl, TypeDecl):
                path = tuple(n.text for n in decl.path)
                flat = flatten_type(path)
                span = decl.path[0].span.merge(decl.path[-1].span)
                if flat in self.types:
                    if paths.get(flat, path) != path:
                        self.error(
                            E_RESOLVE_TYPE_COLLISION,
                            f"type path '{'.'.join(path)}' collides with "
                            f"'{'.'.join(paths[flat])}' (both flatten to '{flat}')",
                            span,
                        )
                    else:
                        self.error(
                            E_RESOLVE_DUPLICATE,
                            f"type '{flat}' is already declared",
                            span,
                        )
                    continue
                self.types[flat] = PromiseTypeDecl(flat, decl.kind, path)  # type: ignore[arg-type]
                paths[flat] = path
            elif isinstance(decl, FlagDecl):
                name = decl.name.text
                if name in self.types:
                    self.error(
                        E_RESOLVE_DUPLICATE,
                        f"'{name}' is already declared (types and flags share one namespace)",
                        decl.name.span,
                    )
                    continue
                self.types[name] = PromiseTypeDecl(name, KIND_FLAG, (name,))
                paths[name] = (name,)

    # -- term and condition resolution --------------------------------------

    def resolve_term(
        self, node: TermNode, kinds: dict[str, str]
    ) -> tuple[Term, str]:
        """Returns (term, kind); kind is 'num', 'str', or 'unknown'."""
        if isinstance(node, NumberTerm):
            return NumConst(node.value), KIND_NUM
        if isinstance(node, StringTerm):
            return StrConst(node.value), KIND_STR
        if isinstance(node, ParamTerm):
            return Parameter(node.name), kinds.get(f"${node.name}", _UNKNOWN)
        if isinstance(node, IdentTerm):
            decl = self.types.get(node.name)
            if decl is None:
                return NamedConst(node.name), _UNKNOWN
            if decl.kind == KIND_FLAG:
                self.error(
                    E_RESOLVE_NOT_A_FLAG,
                    f"flag '{node.name}' cannot be compared to a value",
                    node.span,
                )
                return NamedConst(node.name), _UNKNOWN
            if decl.kind == KIND_SERVICE:
                self.error(
                    E_RESOLVE_VALUELESS_TYPE,
                    f"service type '{node.name}' carries no value",
                    node.span,
                )
                return NamedConst(node.name), _UNKNOWN
            return Attribute(node.name), decl.kind
        raise TypeError(f"not a term node: {node!r}")

    def unify_kinds(
        self,
        left: tuple[Term, str],
        right: tuple[Term, str],
        kinds: dict[str, str],
        span: SourceSpan,
    ) -> None:
        """Propagate value kinds across '=' and comparisons; report clashes."""
        known = [k for _, k in (left, right) if k != _UNKNOWN]
        if len(known) == 2 and known[0] != known[1]:
            self.error(
                E_RESOLVE_KIND_CONFLICT,
                f"cannot relate a {known[0]} value to a {known[1]} value",
                span,
            )
            return
        if not known:
            return
        kind = known[0]
        for term, term_kind in (left, right):
            if isinstance(term, Parameter):
                key = f"${term.name}"
                prior = kinds.get(key, _UNKNOWN)
                if prior == _UNKNOWN:
                    kinds[key] = kind
                elif prior != kind:
                    self.error(
                        E_RESOLVE_KIND_CONFLICT,
                        f"parameter '{key}' is used as both {prior} and {kind}",
                        span,
                    )

    def resolve_condition(
        self, node: Union[ConditionNode, None], kinds: dict[str, str]
    ) -> Condition:
        if node is None:
            return ALWAYS
        literals: list[ConditionLiteral] = []
        for lit in node.literals:
            if isinstance(lit, FlagLiteralNode):
                decl = self.types.get(lit.name.text)
                if decl is None:
                    self.error(
                        E_RESOLVE_UNKNOWN_TYPE,
                        f"unknown flag '{lit.name.text}'",
                        lit.name.span,
                    )
                    continue
                if decl.kind != KIND_FLAG:
                    self.error(
                        E_RESOLVE_NOT_A_FLAG,
                        f"'{lit.name.text}' is a {decl.kind} type, not a flag",
                        lit.name.span,
                    )
                    continue
                literals.append(FlagLiteral(lit.name.text, lit.negated))
            elif isinstance(lit, CmpLiteralNode):
                left = self.resolve_term(lit.lhs, kinds)
                right = self.resolve_term(lit.rhs, kinds)
                self.unify_kinds(left, right, kinds, lit.span)
                op = "eq" if lit.op == "==" else "neq"
                literals.append(CmpLiteral(left[0], op, right[0]))  # type: ignore[arg-type]
        return Condition(frozenset(literals))

    def resolve_body(
        self, node: BodyNode, kinds: dict[str, str]
    ) -> Union[PromiseBody, None]:
        condition = self.resolve_condition(node.condition, kinds)

        if isinstance(node.subject, ParamTerm):
            # Constraint-only body: give $w = $h;
            if node.polarity == USE:
                self.error(
                    E_RESOLVE_USE_CONSTRAINT,
                    "a use body accepts behaviour and cannot carry constraints",
                    node.span,
                )
                return None
            assert node.value is not None  # grammar guarantees PARAM "=" term
            left = (Parameter(node.subject.name), kinds.get(f"${node.subject.name}", _UNKNOWN))
            right = self.resolve_term(node.value, kinds)
            self.unify_kinds(left, right, kinds, node.span)
            return PromiseBody(
                GIVE, LINK_TYPE, frozenset({EqConstraint(left[0], right[0])}), condition
            )

        type_name = node.subject.name
        decl = self.types.get(type_name)
        if decl is None:
            self.error(
                E_RESOLVE_UNKNOWN_TYPE,
                f"unknown type or flag '{type_name}'",
                node.subject.span,
            )
            return None
        if node.value is None:
            return PromiseBody(node.polarity, type_name, frozenset(), condition)  # type: ignore[arg-type]

        # A value is attached: only valued types may take one, only on give.
        if node.polarity == USE:
            self.error(
                E_RESOLVE_USE_CONSTRAINT,
                f"a use body accepts '{type_name}' as promised and cannot constrain it",
                node.span,
            )
            return None
        if decl.kind not in VALUED_KINDS:
            what = "flag" if decl.kind == KIND_FLAG else "service type"
            self.error(
                E_RESOLVE_VALUELESS_TYPE,
                f"{what} '{type_name}' takes no value",
                node.span,
            )
            return None
        left = (Attribute(type_name), decl.kind)
        right = self.resolve_term(node.value, kinds)
        self.unify_kinds(left, right, kinds, node.span)
        return PromiseBody(
            GIVE, type_name, frozenset({EqConstraint(left[0], right[0])}), condition
        )

    # -- bundles -------------------------------------------------------------

    def collect_bundles(self) -> None:
        for decl in self.ast.decls:
            if not isinstance(decl, BundleDecl):
                continue
            if decl.name.text in self.bundle_decls:
                self.error(
                    E_RESOLVE_DUPLICATE,
                    f"bundle '{decl.name.text}' is already declared",
                    decl.name.span,
                )
                continue
            self.bundle_decls[decl.name.text] = decl

        for name, decl in self.bundle_decls.items():
            if decl.parent is not None and decl.parent.text not in self.bundle_decls:
                self.error(
                    E_RESOLVE_UNKNOWN_BUNDLE,
                    f"unknown parent bundle '{decl.parent.text}'",
                    decl.parent.span,
                )

        # Cycle check over declared parents before flattening.
        for name, decl in self.bundle_decls.items():
            trail = [name]
            seen = {name}
            current = decl.parent.text if decl.parent else None
            while current is not None and current in self.bundle_decls:
                if current in seen:
                    cycle = " -> ".join(trail + [current])
                    self.error(
                        E_RESOLVE_CYCLE,
                        f"bundle inheritance cycle: {cycle}",
                        decl.name.span,
                    )
                    return
                trail.append(current)
                seen.add(current)
                parent = self.bundle_decls[current].parent
                current = parent.text if parent else None

        for name, decl in self.bundle_decls.items():
            kinds: dict[str, str] = {}  # one parameter scope per bundle
            bodies = []
            for body_node in decl.bodies:
                body = self.resolve_body(body_node, kinds)
                if body is not None:
                    bodies.append(body)
            parent = decl.parent.text if decl.parent else None
            if parent is not None and parent not in self.bundle_decls:
                parent = None
            self.bundles[name] = Bundle(name, tuple(bodies), parent)

    # -- promises ------------------------------------------------------------

    def check_agent(self, name) -> bool:
        if name.text not in self.agents:
            self.error(
                E_RESOLVE_UNKNOWN_AGENT, f"unknown agent '{name.text}'", name.span
            )
            return False
        return True

    def collect_promises(self) -> None:
        for decl in self.ast.decls:
            if not isinstance(decl, PromiseDecl):
                continue
            ok = self.check_agent(decl.promiser)
            ok = self.check_agent(decl.promisee) and ok
            promiser, promisee = decl.promiser.text, decl.promisee.text

            if isinstance(decl.item, BundleRef):
                ref = decl.item
                bundle = self.bundles.get(ref.name.text)
                if bundle is None:
                    self.error(
                        E_RESOLVE_UNKNOWN_BUNDLE,
                        f"unknown bundle '{ref.name.text}'",
                        ref.name.span,
                    )
                    continue
                kinds: dict[str, str] = {}
                attach_cond = self.resolve_condition(ref.condition, kinds)
                if not ok:
                    continue
                group = bundle_group(promiser, promisee, bundle.name)
                flat = _flatten_for(self.bundles, bundle.name)
                for body in flat.bodies:
                    conditioned = PromiseBody(
                        body.polarity,
                        body.type,
                        body.constraints,
                        body.condition.conjoin(attach_cond),
                    )
                    self.add_promise(promiser, promisee, conditioned, group, decl.span)
            else:
                kinds = {}
                body = self.resolve_body(decl.item, kinds)
                if body is None or not ok:
                    continue
                group = derive_group(promiser, promisee, body)
                self.add_promise(promiser, promisee, body, group, decl.span)

    def add_promise(
        self,
        promiser: str,
        promisee: str,
        body: PromiseBody,
        group: str,
        span: SourceSpan,
    ) -> None:
        self.promises.append(Promise(promiser, promisee, body, group))
        self.promise_spans.setdefault((promiser, promisee, group, body), span)

    # -- entry ---------------------------------------------------------------

    def run(self) -> ResolveResult:
        self.collect_agents()
        self.collect_types()
        self.collect_bundles()
        self.collect_promises()
        if has_errors(self.diagnostics):
            return ResolveResult(None, sorted(self.diagnostics, key=diagnostic_sort_key))

        try:
            graph = build_graph(
                self.agents.values(),
                self.types.values(),
                self.bundles.values(),
                self.promises,
            )
        except PromiseModelError as exc:  # pragma: no cover - prevalidated
            span = SourceSpan(self.ast.file, 1, 1, 1, 1, 0, 0)
            self.error(E_RESOLVE_DUPLICATE, str(exc), span)
            return ResolveResult(None, sorted(self.diagnostics, key=diagnostic_sort_key))

        from ..model import validate_autonomy

        for finding in validate_autonomy(graph):
            p = finding.promise
            span = self.promise_spans.get(
                (p.promiser, p.promisee, p.group, p.body),
                SourceSpan(self.ast.file, 1, 1, 1, 1, 0, 0),
            )
            self.diagnostics.append(
                Diagnostic(WARNING, W_AUTONOMY, finding.message, span)
            )
        return ResolveResult(graph, sorted(self.diagnostics, key=diagnostic_sort_key))


def _flatten_for(bundles: dict[str, Bundle], name: str) -> Bundle:
    """Flatten one bundle against the resolver's (possibly partial) table."""
    seen: list[str] = []
    bodies: list[PromiseBody] = []

    def walk(current: str) -> None:
        if current in seen:
            return  # cycles were already reported
        seen.append(current)
        bundle = bundles[current]
        if bundle.parent is not None and bundle.parent in bundles:
            walk(bundle.parent)
        for body in bundle.bodies:
            if body not in bodies:
                bodies.append(body)

    walk(name)
    return Bundle(name, tuple(bodies), bundles[name].parent)


def resolve(ast: ModelAst) -> ResolveResult:
    """Resolve a parsed model into a promise graph plus diagnostics.

    Returns a graph only when there are no errors; autonomy findings are
    attached as warnings either way.
    """
    return _Resolver(ast).run()
