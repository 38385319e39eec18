"""Harmonize messy fact-checker verdicts onto the 4-class veracity taxonomy.

Fact-checkers rate the same claim with wildly different vocabularies:
"Pants on Fire!", "Four Pinocchios" and "FALSE." all mean the article's
main claim is untrue. This demo shows canonicalization, table lookup, the
Unmapped outcome for novel labels, and the corpus-level merge report.

Run: python3 demos/02_harmonize_verdicts.py
"""

from factpipe import (
    ArticleRecord,
    Unmapped,
    load_default_table,
    merge_corpus,
    normalize_verdict,
)
from factpipe.labels import canonicalize_label

RAW_VERDICTS = [
    "Pants on Fire!",
    "Four Pinocchios",
    "FALSE.",
    " Mostly   True ",
    "Half-True",
    "miscaptioned",
    "Unproven",
    "a whole new rating nobody has seen",
]


def main() -> None:
    table = load_default_table()
    print(f"seed table: {len(table.verdict_entries)} verdict entries,"
          f" {len(table.domain_entries)} domain entries (version {table.version})\n")

    width = max(len(raw) for raw in RAW_VERDICTS)
    for raw in RAW_VERDICTS:
        outcome = normalize_verdict(raw, table)
        rendered = (
            f"UNMAPPED (canonical {outcome.canonical!r})"
            if isinstance(outcome, Unmapped)
            else outcome.value
        )
        print(f"{raw!r:<{width + 2}} -> {canonicalize_label(raw)!r:<20} -> {rendered}")

    print("\nmerging a small corpus:")
    records = [
        ArticleRecord(
            record_id=str(i),
            canonical_url=f"http://demo.example/{i}",
            site_id="demo",
            title=f"claim {i}",
            body_text="...",
            raw_verdict=raw,
        )
        for i, raw in enumerate(RAW_VERDICTS)
    ] + [
        ArticleRecord(
            record_id="no-verdict",
            canonical_url="http://demo.example/none",
            site_id="demo",
            title="claim without any rating",
            body_text="...",
        )
    ]
    labeled, unmapped = merge_corpus(records, table)
    print(f"  {len(labeled)} labeled examples;"
          f" {unmapped.total()} unmapped (conservation: {len(records)} total)")
    print("  unmapped report:")
    for line in unmapped.format_table().splitlines():
        print(f"    {line}")


if __name__ == "__main__":
    main()
