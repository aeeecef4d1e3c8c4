"""Walk through the square/rectangle question.

A square offers everything a rectangle offers plus one extra pledge
(width equals height), so structurally it *extends* the rectangle.
Behaviorally the extra pledge narrows what observers may rely on, so a
square cannot stand in wherever a rectangle was promised.
"""
from promisekit import corpus
from promisekit.analysis import check_extension, check_is_a
from promisekit.constraints import reduce
from promisekit.dsl import parse, resolve
from promisekit.model import format_constraint


def main() -> None:
    resolved = resolve(parse(corpus.read("geometry.pml"), "geometry.pml").ast)
    graph = resolved.graph
    rectangle = graph.bundle("Rectangle")
    square = graph.bundle("Square")

    print("structural extension:")
    print(f"  Square extends Rectangle? {check_extension(square, rectangle)}")
    print(f"  Rectangle extends Square? {check_extension(rectangle, square)}")

    print("\nbehavioral stand-in:")
    for child, parent in ((square, rectangle), (rectangle, square)):
        verdict = check_is_a(child, parent)
        print(f"  {child.name} as a {parent.name}: {verdict.outcome}")
        for detail in verdict.details:
            print(f"    because {detail}")

    print("\nwhat the square actually pledges, reduced to one binding per attribute:")
    constraints = [c for body in square.sorted_bodies() for c in body.constraints]
    for constraint in sorted(map(format_constraint, reduce(constraints))):
        print(f"  {constraint}")


if __name__ == "__main__":
    main()
