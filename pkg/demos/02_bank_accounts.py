"""Read roles and a class split out of a flat promise model.

The bank model never declares classes: it lists what a person promises
an account and what the account promises back. Role discovery groups
agents by the shape of their promises, and the hierarchy derivation
splits the account's conditional behavior into two exclusive subtypes
(serving a customer vs. serving an employee). Finally we plant a flaw —
accepting privileged updates from anyone — and watch it get caught.
"""
from promisekit import corpus
from promisekit.analysis import derive_class_hierarchy, detect_conflicts, discover_roles
from promisekit.dsl import parse, resolve


def load(text: str):
    resolved = resolve(parse(text, "bank.pml").ast)
    assert resolved.ok, resolved.diagnostics
    return resolved.graph


def main() -> None:
    source = corpus.read("bank.pml")
    graph = load(source)

    print(f"promises ({len(graph.promises)}):")
    for promise in graph.promises:
        print(f"  {promise.formatted()}")

    print("\nroles discovered from promise shape:")
    for role in discover_roles(graph):
        members = ", ".join(role.members)
        print(f"  {role.label}: {members}")

    print("\nderived class hierarchy:")
    hierarchy = derive_class_hierarchy(graph)
    for node in hierarchy.classes:
        print(f"  class for {', '.join(node.role.members)}")
        for subtype in node.subtypes:
            print(f"    subtype when {subtype.condition}:")
            for body in subtype.bodies:
                print(f"      {body}")

    print("\nconflict scan on the pristine model:", detect_conflicts(graph) or "clean")

    flawed = load(source + "\naccount -> person: use priv_update;\n")
    print("\nafter accepting privileged updates unconditionally:")
    for finding in detect_conflicts(flawed):
        print(f"  [{finding.severity.label}] {finding.code}: {finding.message}")


if __name__ == "__main__":
    main()
