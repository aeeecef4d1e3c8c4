"""Tour the constraint engine on hand-built terms.

Everything the analyzers decide bottoms out in four operations over
equality constraints: closure (which terms are forced together),
satisfiable (is any assignment possible), entails (does one set follow
from another), and reduce (the smallest equivalent binding set). The
same machinery decides whether two promise conditions can ever hold at
once.
"""
from promisekit.constraints import (
    closure,
    entails,
    mutually_exclusive,
    reduce,
    satisfiable,
)
from promisekit.model import (
    Attribute,
    CmpLiteral,
    Condition,
    EqConstraint,
    FlagLiteral,
    NamedConst,
    NumConst,
    Parameter,
    format_constraint,
    format_term,
)

width = Attribute("width")
height = Attribute("height")
angle = Attribute("angle")
w, h = Parameter("w"), Parameter("h")


def show(label: str, value) -> None:
    print(f"{label}: {value}")


def main() -> None:
    square = [EqConstraint(width, w), EqConstraint(height, h), EqConstraint(w, h)]

    partition = closure(square)
    classes = sorted(
        sorted(format_term(t) for t in cls) for cls in partition.classes
    )
    show("forced-together classes of the square", classes)

    show("square bindings are satisfiable", satisfiable(square))
    show(
        "adding width=2 and height=3 stays satisfiable",
        satisfiable(square + [EqConstraint(width, NumConst(2)),
                              EqConstraint(height, NumConst(3))]),
    )

    show("square forces width=height", entails(square, [EqConstraint(width, height)]))
    rectangle = [EqConstraint(width, w), EqConstraint(height, h)]
    show("rectangle forces width=height", entails(rectangle, [EqConstraint(width, height)]))

    reduced = sorted(map(format_constraint, reduce(square)))
    show("square reduced to one binding per attribute", reduced)

    owner = NamedConst("owner")
    name = Attribute("name")
    customer_gate = Condition.of(
        CmpLiteral(name, "eq", owner), FlagLiteral("employee", True)
    )
    staff_gate = Condition.of(
        CmpLiteral(name, "neq", owner), FlagLiteral("employee", False)
    )
    verdict = mutually_exclusive(customer_gate, staff_gate)
    show("\naccount gates can both fire", not verdict.exclusive)

    sloppy_gate = Condition.of(FlagLiteral("employee", False))
    verdict = mutually_exclusive(staff_gate, sloppy_gate)
    show("staff gate vs. bare employee flag can both fire", not verdict.exclusive)
    show("witness assignment", verdict.witness)

    show("right angles only", satisfiable([EqConstraint(angle, NumConst(90)),
                                           EqConstraint(angle, NumConst(45))]))


if __name__ == "__main__":
    main()
