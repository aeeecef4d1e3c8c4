"""Graph analyses: signatures, roles, structural checks, conflicts, classes."""
from __future__ import annotations

import pytest
from hypothesis import assume, given, settings, strategies as st

from promisekit import corpus
from promisekit.analysis import (
    bundle_signature,
    check_dispatch_pattern,
    check_extension,
    check_is_a,
    check_override_policy,
    check_specialization,
    check_substitution,
    derive_class_hierarchy,
    detect_conflicts,
    discover_roles,
    extract_spanning_set,
    Finding,
    finding_sort_key,
    INCONSISTENT,
    IS_A,
    normalize_body,
    RESTRICTED,
    role_signature,
    Severity,
)
from promisekit.constraints import mutually_exclusive
from promisekit.dsl import parse, resolve
from promisekit.errors import UnsatisfiableError
from promisekit.model import (
    ALWAYS,
    Attribute,
    Bundle,
    CmpLiteral,
    Condition,
    EqConstraint,
    FlagLiteral,
    give,
    link,
    NumConst,
    Parameter,
    PromiseBody,
    use,
)

from loaders import load_corpus, load_text

WIDTH, HEIGHT, ANGLE = Attribute("width"), Attribute("height"), Attribute("angle")


def P(name: str) -> Parameter:
    return Parameter(name)


def rectangle(w: str = "w", h: str = "h") -> Bundle:
    return Bundle(
        "Rectangle",
        (
            give("width", EqConstraint(WIDTH, P(w))),
            give("height", EqConstraint(HEIGHT, P(h))),
            give("angle", EqConstraint(ANGLE, NumConst(90))),
            give("sides", EqConstraint(Attribute("sides"), NumConst(4))),
        ),
    )


def square(w: str = "w", h: str = "h") -> Bundle:
    return Bundle("Square", rectangle(w, h).bodies + (link(P(w), P(h)),))


# ---------------------------------------------------------------------------
# Severities and findings
# ---------------------------------------------------------------------------

class TestSeverity:
    def test_ladder_orders_worst_last(self):
        assert (
            Severity.PATTERN_ERROR
            < Severity.POLICY_VIOLATION
            < Severity.RESTRICTED
            < Severity.INCONSISTENT
        )

    def test_labels(self):
        assert Severity.PATTERN_ERROR.label == "PatternError"
        assert Severity.POLICY_VIOLATION.label == "PolicyViolation"
        assert Severity.RESTRICTED.label == "Restricted"
        assert Severity.INCONSISTENT.label == "Inconsistent"

    def test_findings_must_cite_something(self):
        with pytest.raises(ValueError):
            Finding(Severity.RESTRICTED, "x", "m", ())

    def test_sort_puts_worst_first(self):
        mild = Finding(Severity.PATTERN_ERROR, "a", "m", ("p",))
        bad = Finding(Severity.INCONSISTENT, "z", "m", ("p",))
        assert sorted([mild, bad], key=finding_sort_key) == [bad, mild]


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------

class TestSignatures:
    def test_parameter_names_do_not_matter(self):
        assert bundle_signature(rectangle("w", "h")) == bundle_signature(
            rectangle("p", "q")
        )
        assert bundle_signature(square("w", "h")) == bundle_signature(
            square("a", "b")
        )

    def test_square_and_rectangle_differ(self):
        assert bundle_signature(square()) != bundle_signature(rectangle())

    def test_conditions_are_invisible(self):
        plain = Bundle("B", (use("svc"),))
        gated = Bundle(
            "B", (use("svc", Condition.of(FlagLiteral("f"))),)
        )
        assert bundle_signature(plain) == bundle_signature(gated)

    def test_normalize_body_is_renaming_invariant(self):
        a = give("width", EqConstraint(WIDTH, P("w")))
        b = give("width", EqConstraint(WIDTH, P("zz")))
        assert normalize_body(a) == normalize_body(b)

    def test_constraint_shape_matters(self):
        a = give("width", EqConstraint(WIDTH, P("w")))
        b = give("width", EqConstraint(WIDTH, NumConst(3)))
        assert normalize_body(a) != normalize_body(b)


# ---------------------------------------------------------------------------
# Roles
# ---------------------------------------------------------------------------

class TestRoles:
    def test_geometry_roles(self):
        roles = discover_roles(load_corpus("geometry.pml"))
        by_label = {r.label: r.members for r in roles}
        assert by_label == {
            "gives:angle+height+sides+width": ("rect", "square"),
            "receives:angle+height+sides+width": ("viewer",),
        }

    def test_extra_link_body_does_not_change_the_role(self):
        graph = load_corpus("geometry.pml")
        assert role_signature(graph, "rect") == role_signature(graph, "square")

    def test_bank_roles(self):
        roles = discover_roles(load_corpus("bank.pml"))
        assert {r.label: r.members for r in roles} == {
            "gives:cash_payment+customer+employee+name": ("person",),
            "gives:account_functions+keep_money_safe": ("account",),
        }

    def test_web_roles_split_servers_from_browsers(self):
        roles = discover_roles(load_corpus("web.pml"))
        assert {r.label: r.members for r in roles} == {
            "gives:web": ("s1", "s2"),
            "uses:web": ("b1", "b2", "b3"),
        }

    def test_member_signatures_match_their_role(self):
        for name in corpus.names():
            graph = load_corpus(name)
            roles = discover_roles(graph)
            for role in roles:
                for member in role.members:
                    assert role_signature(graph, member) == role.signature
            signatures = [r.signature for r in roles]
            assert len(signatures) == len(set(map(repr, signatures)))

    def test_every_agent_lands_in_exactly_one_role(self):
        for name in corpus.names():
            graph = load_corpus(name)
            assigned = [m for r in discover_roles(graph) for m in r.members]
            assert sorted(assigned) == [a.name for a in graph.agents]

    def test_isolated_agent_gets_its_own_role(self):
        graph = load_text("agent loner;\n")
        roles = discover_roles(graph)
        assert [r.label for r in roles] == ["isolated"]


class TestSpanningSet:
    def test_bank_collapses_to_two_shapes(self):
        spanning = extract_spanning_set(load_corpus("bank.pml"))
        assert [(s.representative, len(s.members)) for s in spanning] == [
            ("account->person", 1),
            ("person->account", 1),
        ]

    def test_geometry_keeps_declared_bundles_apart(self):
        spanning = extract_spanning_set(load_corpus("geometry.pml"))
        assert [s.representative for s in spanning] == ["Rectangle", "Square"]

    def test_identical_direct_channels_share_a_class(self):
        graph = load_corpus("web.pml")
        spanning = extract_spanning_set(graph)
        sizes = sorted(len(s.members) for s in spanning)
        assert sizes == [6, 6]  # six give channels, six use channels


# ---------------------------------------------------------------------------
# Extension
# ---------------------------------------------------------------------------

class TestExtension:
    def test_square_extends_rectangle_not_conversely(self):
        assert check_extension(square(), rectangle()) is True
        assert check_extension(rectangle(), square()) is False

    def test_reflexive(self):
        for bundle in (rectangle(), square()):
            assert check_extension(bundle, bundle)

    def test_renaming_does_not_matter(self):
        assert check_extension(square("p", "q"), rectangle("w", "h"))

    def test_transitive_on_a_chain(self):
        base = Bundle("A", rectangle().bodies[:2])
        mid = Bundle("B", rectangle().bodies[:3])
        top = Bundle("C", rectangle().bodies)
        assert check_extension(mid, base)
        assert check_extension(top, mid)
        assert check_extension(top, base)

    def test_repeated_bodies_are_counted(self):
        once = Bundle("Once", (use("svc"),))
        twice = Bundle("Twice", (use("svc"), use("svc")))
        assert check_extension(twice, once)
        assert not check_extension(once, twice)


# ---------------------------------------------------------------------------
# Specialization and substitution
# ---------------------------------------------------------------------------

SUBTYPE = Condition.of(FlagLiteral("subtype"))
NOT_SUBTYPE = Condition.of(FlagLiteral("subtype", True))


def parent_api() -> Bundle:
    return Bundle("Parent", (use("ping"), use("render")))


class TestSpecialization:
    def test_exclusive_split_is_ok(self):
        child = Bundle("Child", (use("render"),))
        report = check_specialization(parent_api(), NOT_SUBTYPE, [(child, SUBTYPE)])
        assert report.ok

    def test_child_with_extra_type_is_a_mismatch(self):
        child = Bundle("Child", (use("render"), use("extra")))
        report = check_specialization(parent_api(), NOT_SUBTYPE, [(child, SUBTYPE)])
        codes = [f.code for f in report.findings]
        assert "type-mismatch" in codes

    def test_overlapping_children_are_flagged_with_witness(self):
        child = Bundle("Child", (use("render"),))
        report = check_specialization(
            parent_api(), NOT_SUBTYPE, [(child, SUBTYPE), (child, SUBTYPE)]
        )
        assert not report.ok
        finding = next(f for f in report.findings if f.code == "non-exclusive")
        assert finding.severity == Severity.PATTERN_ERROR
        assert "subtype=true" in finding.message

    def test_parent_condition_participates_in_exclusivity(self):
        child = Bundle("Child", (use("render"),))
        report = check_specialization(parent_api(), ALWAYS, [(child, SUBTYPE)])
        assert [f.code for f in report.findings] == ["non-exclusive"]

    def test_requires_a_child(self):
        with pytest.raises(ValueError):
            check_specialization(parent_api(), NOT_SUBTYPE, [])


class TestSubstitution:
    def test_complete_exclusive_replacement_is_ok(self):
        full = Bundle("Full", (use("ping"), use("render")))
        report = check_substitution(
            parent_api(), [(full, SUBTYPE)], parent_condition=NOT_SUBTYPE
        )
        assert report.ok

    def test_partial_replacement_is_incomplete(self):
        partial = Bundle("Partial", (use("render"),))
        report = check_substitution(parent_api(), [(partial, SUBTYPE)],
                                    parent_condition=NOT_SUBTYPE)
        assert [f.code for f in report.findings] == ["incomplete-replacement"]

    def test_extra_type_is_a_mismatch_not_incompleteness(self):
        extra = Bundle("Extra", (use("ping"), use("render"), use("zap")))
        report = check_substitution(parent_api(), [(extra, SUBTYPE)],
                                    parent_condition=NOT_SUBTYPE)
        assert [f.code for f in report.findings] == ["type-mismatch"]

    def test_unconditioned_parent_and_child_collide(self):
        full = Bundle("Full", (use("ping"), use("render")))
        report = check_substitution(parent_api(), [(full, ALWAYS)])
        assert [f.code for f in report.findings] == ["non-exclusive"]

    def test_parent_predicate_is_recovered_from_body_conditions(self):
        gated = Bundle(
            "Gated",
            (use("ping", NOT_SUBTYPE), use("render", NOT_SUBTYPE)),
        )
        full = Bundle("Full", (use("ping"), use("render")))
        report = check_substitution(gated, [(full, SUBTYPE)])
        assert report.ok


# ---------------------------------------------------------------------------
# Is-a
# ---------------------------------------------------------------------------

class TestIsA:
    def test_square_is_not_a_rectangle(self):
        verdict = check_is_a(square(), rectangle())
        assert verdict.outcome == RESTRICTED
        assert not verdict.is_a
        assert verdict.details == ("height ~ width",)
        joined = " ".join(verdict.involved)
        assert "width" in joined and "height" in joined

    def test_rectangle_is_a_square(self):
        # The merge already happens in the parent; the child adds nothing new.
        assert check_is_a(rectangle(), square()).outcome == IS_A

    def test_everything_is_itself(self):
        for bundle in (rectangle(), square()):
            assert check_is_a(bundle, bundle).outcome == IS_A

    def test_fresh_attribute_cannot_restrict(self):
        extended = Bundle(
            "Colored",
            rectangle().bodies + (give("color", EqConstraint(Attribute("color"), P("c"))),),
        )
        assert check_is_a(extended, rectangle()).outcome == IS_A

    def test_conflicting_constants_are_inconsistent(self):
        ninety = Bundle("Ninety", (give("angle", EqConstraint(ANGLE, NumConst(90))),))
        fortyfive = Bundle("FortyFive", (give("angle", EqConstraint(ANGLE, NumConst(45))),))
        verdict = check_is_a(fortyfive, ninety)
        assert verdict.outcome == INCONSISTENT
        assert verdict.details == ("45 and 90 are forced equal",)

    def test_unsatisfiable_input_is_rejected(self):
        broken = Bundle(
            "Broken",
            (
                give("angle", EqConstraint(ANGLE, NumConst(1))),
                give("angle", EqConstraint(ANGLE, NumConst(2))),
            ),
        )
        with pytest.raises(UnsatisfiableError):
            check_is_a(broken, rectangle())
        with pytest.raises(UnsatisfiableError):
            check_is_a(rectangle(), broken)

    def test_verdict_is_invariant_under_renaming(self):
        assert (
            check_is_a(square("p", "q"), rectangle("x", "y")).outcome
            == check_is_a(square(), rectangle()).outcome
            == RESTRICTED
        )

    def test_conditional_merge_is_reported_per_scenario(self):
        gated_link = Bundle(
            "Sometimes",
            rectangle().bodies + (link(P("w"), P("h"), Condition.of(FlagLiteral("f"))),),
        )
        verdict = check_is_a(gated_link, rectangle())
        assert verdict.outcome == RESTRICTED
        assert verdict.details == ("height ~ width (when f)",)


# ---------------------------------------------------------------------------
# Override policy
# ---------------------------------------------------------------------------

class TestOverridePolicy:
    def test_restating_a_base_constraint_is_fine(self):
        base = Bundle("Base", (give("angle", EqConstraint(ANGLE, NumConst(90))),))
        child = Bundle("Child", (give("angle", EqConstraint(ANGLE, NumConst(90))),))
        assert check_override_policy(base, child) == []

    def test_linking_base_parameters_narrows_both_bodies(self):
        base = Bundle(
            "Base",
            (
                give("width", EqConstraint(WIDTH, P("w"))),
                give("height", EqConstraint(HEIGHT, P("h"))),
            ),
        )
        child = Bundle("Child", (link(P("w"), P("h")),))
        findings = check_override_policy(base, child)
        assert [f.code for f in findings] == [
            "override-restriction",
            "override-restriction",
        ]
        assert all(f.severity == Severity.POLICY_VIOLATION for f in findings)
        touched = " ".join(f.message for f in findings)
        assert "+width=$w" in touched and "+height=$h" in touched

    def test_contradicting_a_base_constant_is_reported(self):
        base = Bundle("Base", (give("angle", EqConstraint(ANGLE, NumConst(90))),))
        child = Bundle("Child", (give("angle", EqConstraint(ANGLE, NumConst(60))),))
        findings = check_override_policy(base, child)
        assert [f.code for f in findings] == ["override-contradiction"]
        assert findings[0].severity == Severity.POLICY_VIOLATION

    def test_unrelated_child_constraints_are_ignored(self):
        base = Bundle("Base", (give("width", EqConstraint(WIDTH, P("w"))),))
        child = Bundle("Child", (give("depth", EqConstraint(Attribute("depth"), NumConst(2))),))
        assert check_override_policy(base, child) == []


# ---------------------------------------------------------------------------
# Dispatch pattern
# ---------------------------------------------------------------------------

def dispatch_variant(old: str, new: str):
    text = corpus.read("dispatch.pml").replace(old, new)
    assert text != corpus.read("dispatch.pml")
    parsed = parse(text, "dispatch.pml")
    assert parsed.ok
    resolved = resolve(parsed.ast)
    # dropping promises can legitimately add autonomy warnings — never errors
    assert resolved.ok
    return resolved.graph


class TestDispatchPattern:
    def test_the_switch_fixture_validates(self):
        graph = load_corpus("dispatch.pml")
        assert check_dispatch_pattern(graph, "provider", "consumer", "subtype").ok

    def test_missing_discriminator_give(self):
        graph = dispatch_variant("consumer -> provider: give subtype;\n", "")
        report = check_dispatch_pattern(graph, "provider", "consumer", "subtype")
        assert [f.code for f in report.findings] == ["dispatch-missing-give"]
        assert report.findings[0].severity == Severity.PATTERN_ERROR

    def test_missing_discriminator_use(self):
        graph = dispatch_variant("provider -> consumer: use subtype;\n", "")
        report = check_dispatch_pattern(graph, "provider", "consumer", "subtype")
        assert [f.code for f in report.findings] == ["dispatch-missing-use"]

    def test_overlapping_branches(self):
        graph = dispatch_variant(
            "bundle ClassicApi if not subtype", "bundle ClassicApi if subtype"
        )
        report = check_dispatch_pattern(graph, "provider", "consumer", "subtype")
        assert [f.code for f in report.findings] == ["dispatch-overlap"]
        assert "subtype=true" in report.findings[0].message

    def test_the_three_defect_codes_are_distinct(self):
        codes = {"dispatch-missing-give", "dispatch-missing-use", "dispatch-overlap"}
        assert len(codes) == 3


# ---------------------------------------------------------------------------
# Conflict detection
# ---------------------------------------------------------------------------

MERGED_SHAPE = """
agent shape; agent viewer;
type width: num; type height: num;
bundle Rectangle { give width = $w; give height = $h; }
bundle Square extends Rectangle { give $w = $h; }
shape -> viewer: bundle Rectangle
shape -> viewer: bundle Square
"""

CLASHING = """
agent a; agent b;
type angle: num;
a -> b: give angle = 90;
a -> b: give angle = 45;
"""


class TestDetectConflicts:
    @pytest.mark.parametrize("name", corpus.names())
    def test_the_corpus_is_conflict_free(self, name):
        assert detect_conflicts(load_corpus(name)) == []

    def test_unconditional_acceptance_overlaps_the_gated_one(self):
        graph = load_text(
            corpus.read("bank.pml") + "\naccount -> person: use priv_update;\n"
        )
        findings = detect_conflicts(graph)
        assert len(findings) >= 1
        worst = findings[0]
        assert worst.code == "channel-overlap"
        assert worst.severity == Severity.POLICY_VIOLATION
        assert "U(priv_update)" in worst.message

    def test_merged_agent_forces_independent_parameters_together(self):
        findings = detect_conflicts(load_text(MERGED_SHAPE))
        assert [f.code for f in findings] == ["channel-restricted"]
        assert findings[0].severity == Severity.RESTRICTED
        assert "bundle Rectangle" in findings[0].message
        assert "bundle Square" in findings[0].message

    def test_clashing_constants_are_inconsistent(self):
        findings = detect_conflicts(load_text(CLASHING))
        assert [f.code for f in findings] == ["channel-inconsistent"]
        assert findings[0].severity == Severity.INCONSISTENT
        assert "45" in findings[0].message and "90" in findings[0].message

    def test_exclusive_conditions_never_conjoin(self):
        text = (
            "agent a; agent b;\n"
            "type angle: num; flag f;\n"
            "b -> a: give f;\n"
            "a -> b: use f;\n"
            "a -> b: give angle = 90 if f;\n"
            "a -> b: give angle = 45 if not f;\n"
        )
        assert detect_conflicts(load_text(text)) == []

    def test_worst_findings_sort_first(self):
        graph = load_text(CLASHING + "a -> b: give angle = 90 if angle == 90;\n")
        findings = detect_conflicts(graph)
        severities = [f.severity for f in findings]
        assert severities == sorted(severities, reverse=True)


# ---------------------------------------------------------------------------
# Class hierarchy
# ---------------------------------------------------------------------------

class TestClassHierarchy:
    def test_bank_splits_the_account_into_two_exclusive_subtypes(self):
        hierarchy = derive_class_hierarchy(load_corpus("bank.pml"))
        assert hierarchy.findings == ()
        by_role = {rc.role.label: rc for rc in hierarchy.classes}
        person = by_role["gives:cash_payment+customer+employee+name"]
        assert person.subtypes == ()
        assert person.base.bodies == (
            "+cash_payment",
            "+customer",
            "+employee",
            "+name=identity",
        )
        account = by_role["gives:account_functions+keep_money_safe"]
        assert account.base.bodies == (
            "+account_functions",
            "+keep_money_safe",
            "U(cash_payment)",
            "U(customer)",
            "U(employee)",
            "U(name)",
        )
        assert [(s.condition, s.bodies) for s in account.subtypes] == [
            ("name != owner and employee", ("U(priv_update)",)),
            ("name == owner and not employee", ("U(use_account)",)),
        ]

    def test_subtype_conditions_re_verify_as_exclusive(self):
        graph = load_corpus("bank.pml")
        hierarchy = derive_class_hierarchy(graph)
        account = hierarchy.classes[1]
        conds = []
        rep = account.role.members[0]
        for p in graph.promises_from(rep):
            if not p.body.condition.is_empty:
                conds.append(p.body.condition)
        distinct = list(dict.fromkeys(conds))
        assert len(distinct) == 2
        assert mutually_exclusive(distinct[0], distinct[1]).exclusive

    def test_unconditional_graph_has_no_subtypes(self):
        hierarchy = derive_class_hierarchy(load_corpus("web.pml"))
        assert all(rc.subtypes == () for rc in hierarchy.classes)
        assert hierarchy.findings == ()

    def test_three_way_exclusive_split(self):
        text = (
            "agent a; agent b;\n"
            "flag f; flag g;\n"
            "type s1: service; type s2: service; type s3: service;\n"
            "b -> a: give f;\nb -> a: give g;\n"
            "a -> b: use f;\na -> b: use g;\n"
            "a -> b: give s1 if f and g;\n"
            "a -> b: give s2 if f and not g;\n"
            "a -> b: give s3 if not f;\n"
        )
        hierarchy = derive_class_hierarchy(load_text(text))
        giver = next(rc for rc in hierarchy.classes if rc.role.members == ("a",))
        assert len(giver.subtypes) == 3
        assert hierarchy.findings == ()

    def test_overlapping_conditions_fold_into_the_base(self):
        text = (
            "agent a; agent b;\n"
            "flag f; flag g;\n"
            "type s1: service; type s2: service;\n"
            "b -> a: give f;\nb -> a: give g;\n"
            "a -> b: use f;\na -> b: use g;\n"
            "a -> b: give s1 if f;\n"
            "a -> b: give s2 if not g;\n"
        )
        hierarchy = derive_class_hierarchy(load_text(text))
        giver = next(rc for rc in hierarchy.classes if rc.role.members == ("a",))
        assert giver.subtypes == ()
        assert "+s1 if f" in giver.base.bodies
        assert "+s2 if not g" in giver.base.bodies
        overlap = [f for f in hierarchy.findings if f.code == "hierarchy-overlap"]
        assert len(overlap) == 1
        assert overlap[0].severity == Severity.PATTERN_ERROR


# ---------------------------------------------------------------------------
# Property-based: extension preorder and renaming invariance
# ---------------------------------------------------------------------------

ATTR_NAMES = ["width", "height", "angle"]
PARAM_NAMES = ["a", "b", "c"]

body_st = st.one_of(
    st.builds(
        lambda t, p: give(t, EqConstraint(Attribute(t), Parameter(p))),
        st.sampled_from(ATTR_NAMES),
        st.sampled_from(PARAM_NAMES),
    ),
    st.builds(
        lambda t, v: give(t, EqConstraint(Attribute(t), NumConst(v))),
        st.sampled_from(ATTR_NAMES),
        st.integers(0, 2),
    ),
    st.builds(
        lambda p, q: link(Parameter(p), Parameter(q)),
        st.sampled_from(PARAM_NAMES),
        st.sampled_from(PARAM_NAMES),
    ).filter(lambda b: len({t for c in b.constraints for t in c.terms()}) == 2),
)

bundle_st = st.builds(
    lambda bodies: Bundle("G", tuple(bodies)), st.lists(body_st, max_size=4)
)


def rename_params(bundle: Bundle, mapping: dict[str, str]) -> Bundle:
    def fix_term(t):
        return Parameter(mapping[t.name]) if isinstance(t, Parameter) else t

    bodies = []
    for body in bundle.bodies:
        constraints = frozenset(
            EqConstraint(fix_term(c.lhs), fix_term(c.rhs)) for c in body.constraints
        )
        bodies.append(PromiseBody(body.polarity, body.type, constraints, body.condition))
    return Bundle(bundle.name, tuple(bodies), bundle.parent)


@settings(max_examples=150)
@given(bundle_st, st.permutations(PARAM_NAMES))
def test_signature_survives_parameter_permutation(bundle, perm):
    mapping = dict(zip(PARAM_NAMES, perm))
    assert bundle_signature(bundle) == bundle_signature(rename_params(bundle, mapping))


@settings(max_examples=100)
@given(bundle_st)
def test_extension_is_reflexive(bundle):
    assert check_extension(bundle, bundle)


@settings(max_examples=100)
@given(bundle_st, st.lists(body_st, max_size=2), st.lists(body_st, max_size=2))
def test_extension_is_transitive_along_body_growth(base, extra1, extra2):
    mid = Bundle("M", base.bodies + tuple(extra1))
    top = Bundle("T", mid.bodies + tuple(extra2))
    assert check_extension(mid, base)
    assert check_extension(top, mid)
    assert check_extension(top, base)


@settings(max_examples=80)
@given(bundle_st, bundle_st, st.permutations(PARAM_NAMES))
def test_is_a_verdict_survives_parameter_permutation(child, parent, perm):
    mapping = dict(zip(PARAM_NAMES, perm))
    try:
        plain = check_is_a(child, parent).outcome
    except UnsatisfiableError:
        assume(False)
    renamed = check_is_a(rename_params(child, mapping), parent).outcome
    assert plain == renamed


@settings(max_examples=80)
@given(bundle_st)
def test_everything_satisfiable_is_itself(bundle):
    try:
        verdict = check_is_a(bundle, bundle)
    except UnsatisfiableError:
        assume(False)
    assert verdict.outcome == IS_A
