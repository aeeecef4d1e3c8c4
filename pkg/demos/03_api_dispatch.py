"""Check the conditional-dispatch pattern and break it three ways.

A provider offers one base API to every consumer plus two variants
gated on a discriminator the consumer announces about itself. The
pattern check verifies the full loop: the consumer gives the
discriminator, the provider uses it, and the gated variants never
overlap. Each deliberate break below trips a different finding.
"""
from promisekit import corpus
from promisekit.analysis import check_dispatch_pattern
from promisekit.dsl import parse, resolve


def check(text: str):
    resolved = resolve(parse(text, "dispatch.pml").ast)
    assert resolved.ok, resolved.diagnostics
    return check_dispatch_pattern(resolved.graph, "provider", "consumer", "subtype")


def main() -> None:
    source = corpus.read("dispatch.pml")
    report = check(source)
    print(f"pristine fixture valid: {report.ok}")

    breaks = [
        (
            "consumer stops announcing the discriminator",
            source.replace("consumer -> provider: give subtype;\n", ""),
        ),
        (
            "provider stops reading the discriminator",
            source.replace("provider -> consumer: use subtype;\n", ""),
        ),
        (
            "both variants claim the same discriminator value",
            source.replace(
                "bundle ClassicApi if not subtype", "bundle ClassicApi if subtype"
            ),
        ),
    ]
    for label, text in breaks:
        report = check(text)
        print(f"\n{label}:")
        for finding in report.findings:
            print(f"  [{finding.severity.label}] {finding.code}: {finding.message}")


if __name__ == "__main__":
    main()
