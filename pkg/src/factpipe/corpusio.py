"""Newline-delimited corpus persistence with a fixed field order.

One JSON object per line, keys always in FIELD_ORDER, absent values
null. Files written here round-trip byte-exactly through read/write.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from .ingest.extract import ArticleRecord

FIELD_ORDER = (
    "record_id",
    "canonical_url",
    "site_id",
    "title",
    "published_at",
    "body_text",
    "raw_verdict",
    "raw_topic",
    "verdict_class",
    "domain_class",
)


class CorpusFormatError(ValueError):
    pass


@dataclass
class CorpusRow:
    record_id: str
    canonical_url: str
    site_id: str
    title: str
    published_at: str | None
    body_text: str
    raw_verdict: str | None
    raw_topic: str | None
    verdict_class: str | None = None
    domain_class: str | None = None

    @classmethod
    def from_record(cls, record: ArticleRecord) -> "CorpusRow":
        published = (
            record.published_at.isoformat() if record.published_at else None
        )
        return cls(
            record_id=record.record_id,
            canonical_url=record.canonical_url,
            site_id=record.site_id,
            title=record.title,
            published_at=published,
            body_text=record.body_text,
            raw_verdict=record.raw_verdict,
            raw_topic=record.raw_topic,
        )

    def to_record(self) -> ArticleRecord:
        published = (
            date.fromisoformat(self.published_at) if self.published_at else None
        )
        return ArticleRecord(
            record_id=self.record_id,
            canonical_url=self.canonical_url,
            site_id=self.site_id,
            title=self.title,
            body_text=self.body_text,
            published_at=published,
            raw_verdict=self.raw_verdict,
            raw_topic=self.raw_topic,
        )

    def text(self) -> str:
        return self.title + " " + self.body_text


def dumps_row(row: CorpusRow) -> str:
    payload = {name: getattr(row, name) for name in FIELD_ORDER}
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def loads_row(line: str) -> CorpusRow:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"bad corpus line: {exc}") from exc
    if not isinstance(payload, dict):
        raise CorpusFormatError(f"corpus line is not an object: {line[:80]!r}")
    missing = [name for name in FIELD_ORDER if name not in payload]
    if missing:
        raise CorpusFormatError(f"corpus line missing fields {missing}")
    return CorpusRow(**{name: payload[name] for name in FIELD_ORDER})


def read_corpus(path: str | Path) -> list[CorpusRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(loads_row(line))
    return rows


def write_atomic(path: str | Path, data: str) -> None:
    """Write via temp file + rename so readers never see partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_corpus(path: str | Path, rows: Iterable[CorpusRow]) -> None:
    write_atomic(path, "".join(dumps_row(row) + "\n" for row in rows))


def append_records(path: str | Path, records: Sequence[ArticleRecord]) -> int:
    """Append records not already present (by canonical_url); returns count added."""
    path = Path(path)
    existing = read_corpus(path) if path.exists() else []
    known = {row.canonical_url for row in existing}
    added = []
    for record in records:
        if record.canonical_url in known:
            continue
        known.add(record.canonical_url)
        added.append(CorpusRow.from_record(record))
    write_corpus(path, existing + added)
    return len(added)
