"""Verdict/topic harmonization onto the 4-class veracity and 6-class domain taxonomies.

Raw fact-checker labels are canonicalized (lowercased, punctuation squashed)
and looked up in a versioned mapping table. Unknown labels are a reportable
data outcome, never an error: heterogeneous sources always produce novel
vocabulary and the pipeline must surface it rather than crash.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, Union

from ._text import squash
from .ingest.extract import ArticleRecord

MISSING_LABEL = "(missing)"


class VerdictClass(str, enum.Enum):
    """Veracity taxonomy: the four harmonized verdict classes."""

    TRUE = "true"
    FALSE = "false"
    PARTIALLY_FALSE = "partially_false"
    OTHER = "other"


class DomainClass(str, enum.Enum):
    """Topical domain taxonomy: the six harmonized subject areas."""

    HEALTH = "health"
    ELECTION = "election"
    CRIME = "crime"
    CLIMATE = "climate"
    ECONOMY = "economy"
    EDUCATION = "education"


class TableFormatError(ValueError):
    """Raised when a mapping table file violates the documented format."""


@dataclass(frozen=True)
class Unmapped:
    """Lookup miss; carries the canonical form that was not found."""

    canonical: str


def canonicalize_label(raw: str) -> str:
    """Canonical form of a raw label: lowercase, punctuation-free, single-spaced."""
    return squash(raw)


@dataclass(frozen=True)
class MappingTable:
    """Versioned dictionary from canonical label strings to classes.

    All keys must already be canonical; the loader enforces this so a
    table edit cannot silently never match.
    """

    version: int
    verdict_entries: dict[str, VerdictClass]
    domain_entries: dict[str, DomainClass]

    def __post_init__(self) -> None:
        for name, entries in (("verdicts", self.verdict_entries),
                              ("domains", self.domain_entries)):
            for key in entries:
                canonical = canonicalize_label(key)
                if key != canonical:
                    raise TableFormatError(
                        f"{name} key {key!r} is not canonical"
                        f" (expected {canonical!r})"
                    )


def normalize_verdict(raw: str, table: MappingTable) -> VerdictClass | Unmapped:
    canonical = canonicalize_label(raw)
    found = table.verdict_entries.get(canonical)
    return found if found is not None else Unmapped(canonical)


def normalize_domain(raw_topic: str, table: MappingTable) -> DomainClass | Unmapped:
    canonical = canonicalize_label(raw_topic)
    found = table.domain_entries.get(canonical)
    return found if found is not None else Unmapped(canonical)


# --- table persistence ------------------------------------------------------

def load_mapping_table(path: str | Path) -> MappingTable:
    """Load a mapping table from its JSON file format.

    Format: ``{"version": int, "verdicts": {key: class}, "domains": {key: class}}``
    with canonical keys and class values drawn from the two taxonomies.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TableFormatError(f"cannot read mapping table {path}: {exc}") from exc
    return parse_mapping_table(raw, source=str(path))


def parse_mapping_table(raw: dict, source: str = "<memory>") -> MappingTable:
    for key in ("version", "verdicts", "domains"):
        if key not in raw:
            raise TableFormatError(f"{source}: missing {key!r} section")
    unknown = set(raw) - {"version", "verdicts", "domains"}
    if unknown:
        raise TableFormatError(f"{source}: unknown sections {sorted(unknown)}")
    if not isinstance(raw["version"], int) or raw["version"] < 1:
        raise TableFormatError(f"{source}: version must be a positive integer")

    def convert(section: str, enum_cls):
        entries = {}
        for key, value in raw[section].items():
            try:
                entries[key] = enum_cls(value)
            except ValueError:
                legal = [member.value for member in enum_cls]
                raise TableFormatError(
                    f"{source}: {section} entry {key!r} has illegal class"
                    f" {value!r} (expected one of {legal})"
                ) from None
        return entries

    try:
        return MappingTable(
            version=raw["version"],
            verdict_entries=convert("verdicts", VerdictClass),
            domain_entries=convert("domains", DomainClass),
        )
    except TableFormatError as exc:
        raise TableFormatError(f"{source}: {exc}") from None


def save_mapping_table(table: MappingTable, path: str | Path) -> None:
    payload = {
        "version": table.version,
        "verdicts": {k: v.value for k, v in sorted(table.verdict_entries.items())},
        "domains": {k: v.value for k, v in sorted(table.domain_entries.items())},
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def load_default_table() -> MappingTable:
    """The seed table shipped with the package (user-extensible via config)."""
    data = resources.files("factpipe.data").joinpath("mapping_table.json")
    raw = json.loads(data.read_text(encoding="utf-8"))
    return parse_mapping_table(raw, source="factpipe.data/mapping_table.json")


# --- corpus merge -----------------------------------------------------------

@dataclass(frozen=True)
class LabeledExample:
    record: ArticleRecord
    label: Union[VerdictClass, DomainClass]


@dataclass
class UnmappedReport:
    """Distinct unmapped canonical labels with frequencies."""

    counts: dict[str, int] = field(default_factory=dict)

    def add(self, canonical: str) -> None:
        self.counts[canonical] = self.counts.get(canonical, 0) + 1

    def total(self) -> int:
        return sum(self.counts.values())

    def sorted_items(self) -> list[tuple[str, int]]:
        """Entries sorted by descending frequency, then label."""
        return sorted(self.counts.items(), key=lambda item: (-item[1], item[0]))

    def as_dict(self) -> dict:
        return {
            "unmapped": [
                {"label": label, "count": count}
                for label, count in self.sorted_items()
            ]
        }

    def format_table(self) -> str:
        items = self.sorted_items()
        if not items:
            return "(no unmapped labels)"
        width = max(len(label) for label, _ in items)
        lines = [f"{label:<{width}}  {count}" for label, count in items]
        return "\n".join(lines)


def merge_corpus(
    records: Iterable[ArticleRecord],
    table: MappingTable,
    target: str = "verdict",
) -> tuple[list[LabeledExample], UnmappedReport]:
    """Merge records into harmonized classes; unmappable ones go to the report.

    ``target`` selects the taxonomy: "verdict" maps raw_verdict onto the
    4 veracity classes, "domain" maps raw_topic onto the 6 domains.
    Records lacking the raw label count as unmapped under "(missing)".
    Conservation: len(labeled) + report.total() == number of records.
    """
    if target == "verdict":
        lookup = normalize_verdict
        raw_of = lambda record: record.raw_verdict
    elif target == "domain":
        lookup = normalize_domain
        raw_of = lambda record: record.raw_topic
    else:
        raise ValueError(f"unknown merge target {target!r}")

    labeled: list[LabeledExample] = []
    report = UnmappedReport()
    for record in records:
        raw = raw_of(record)
        if raw is None:
            report.add(MISSING_LABEL)
            continue
        outcome = lookup(raw, table)
        if isinstance(outcome, Unmapped):
            report.add(outcome.canonical)
        else:
            labeled.append(LabeledExample(record, outcome))
    return labeled, report
