"""Structured article extraction driven by per-site selector rules."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Sequence

from . import htmltree
from .fetch import FetchResult
from .urls import UrlError, canonicalize_url, record_id_for

REQUIRED_FIELDS = ("title", "body")
OPTIONAL_FIELDS = ("raw_verdict", "raw_topic", "published_at")


class ProfileError(ValueError):
    """Raised for invalid site profile definitions."""


class ExtractionError(Exception):
    """A required field's selector matched nothing."""

    def __init__(self, url: str, field_name: str, selector: str) -> None:
        super().__init__(
            f"field {field_name!r} not found on {url} (selector {selector!r})"
        )
        self.url = url
        self.field_name = field_name


class UnsupportedContentError(Exception):
    """The fetched payload is not HTML."""

    def __init__(self, url: str, content_type: str) -> None:
        super().__init__(f"unsupported content type {content_type!r} at {url}")
        self.url = url
        self.content_type = content_type


@dataclass(frozen=True)
class SiteProfile:
    """Declarative crawl/extraction configuration for one fact-check site.

    ``extraction_rules`` maps field names (title, body, raw_verdict,
    raw_topic, published_at) to selector strings understood by
    :mod:`factpipe.ingest.htmltree`. ``date_formats`` lists extra
    ``strptime`` patterns tried after ISO-8601 for published_at.
    """

    site_id: str
    display_name: str
    seed_urls: tuple[str, ...]
    extraction_rules: dict[str, str]
    rate_limit_ms: float = 1000.0
    max_pages: int = 100
    date_formats: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.site_id:
            raise ProfileError("site_id must be nonempty")
        if self.rate_limit_ms < 0:
            raise ProfileError(f"{self.site_id}: rate_limit_ms must be >= 0")
        missing = [f for f in REQUIRED_FIELDS if f not in self.extraction_rules]
        if missing:
            raise ProfileError(
                f"{self.site_id}: extraction_rules missing required {missing}"
            )
        if not self.seed_urls:
            raise ProfileError(f"{self.site_id}: at least one seed URL required")
        for url in self.seed_urls:
            try:
                canonicalize_url(url)
            except UrlError as exc:
                raise ProfileError(f"{self.site_id}: bad seed URL: {exc}") from exc


@dataclass(frozen=True)
class ArticleRecord:
    """One extracted fact-check article; immutable value object."""

    record_id: str
    canonical_url: str
    site_id: str
    title: str
    body_text: str
    published_at: date | None = None
    raw_verdict: str | None = None
    raw_topic: str | None = None


def load_site_profile(path: str | Path) -> SiteProfile:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ProfileError(f"cannot read site profile {path}: {exc}") from exc
    known = {
        "site_id", "display_name", "seed_urls", "extraction_rules",
        "rate_limit_ms", "max_pages", "date_formats",
    }
    unknown = set(raw) - known
    if unknown:
        raise ProfileError(f"{path}: unknown profile keys {sorted(unknown)}")
    try:
        return SiteProfile(
            site_id=raw["site_id"],
            display_name=raw.get("display_name", raw["site_id"]),
            seed_urls=tuple(raw["seed_urls"]),
            extraction_rules=dict(raw["extraction_rules"]),
            rate_limit_ms=float(raw.get("rate_limit_ms", 1000.0)),
            max_pages=int(raw.get("max_pages", 100)),
            date_formats=tuple(raw.get("date_formats", ())),
        )
    except KeyError as exc:
        raise ProfileError(f"{path}: missing required key {exc}") from exc


def load_site_profiles(directory: str | Path) -> list[SiteProfile]:
    """Load every ``*.json`` profile under ``directory``, sorted by site_id."""
    directory = Path(directory)
    profiles = [load_site_profile(p) for p in sorted(directory.glob("*.json"))]
    seen: dict[str, SiteProfile] = {}
    for profile in profiles:
        if profile.site_id in seen:
            raise ProfileError(f"duplicate site_id {profile.site_id!r}")
        seen[profile.site_id] = profile
    return sorted(profiles, key=lambda p: p.site_id)


_META_CHARSET = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([\w.:-]+)""", re.IGNORECASE
)


def decode_html(body: bytes, content_type: str) -> str:
    """Decode page bytes honoring the declared charset, lossy UTF-8 fallback."""
    charset = None
    m = re.search(r"charset\s*=\s*([\w.:-]+)", content_type, re.IGNORECASE)
    if m:
        charset = m.group(1)
    else:
        sniff = _META_CHARSET.search(body[:2048])
        if sniff:
            charset = sniff.group(1).decode("ascii", "ignore")
    if charset:
        try:
            return body.decode(charset, errors="replace")
        except LookupError:
            pass
    return body.decode("utf-8", errors="replace")


def parse_published_date(raw: str, extra_formats: Sequence[str] = ()) -> date | None:
    """ISO-8601 first, then the profile's site-local formats; None if unparseable."""
    text = raw.strip()
    if not text:
        return None
    iso = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        return datetime.fromisoformat(iso).date()
    except ValueError:
        pass
    try:
        return date.fromisoformat(text[:10])
    except ValueError:
        pass
    for fmt in extra_formats:
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    return None


def extract_article(page: FetchResult, profile: SiteProfile) -> ArticleRecord:
    """Apply the profile's selector rules to a fetched page.

    Required fields (title, body) raise :class:`ExtractionError` when their
    selectors match nothing; optional fields become None. Deterministic:
    identical bytes and profile yield an identical record.
    """
    if not page.is_html():
        raise UnsupportedContentError(page.url, page.content_type)

    tree = htmltree.parse_html(decode_html(page.body_bytes, page.content_type))
    values: dict[str, str | None] = {}
    for field_name, selector in profile.extraction_rules.items():
        values[field_name] = htmltree.extract_value(tree, selector)

    for field_name in REQUIRED_FIELDS:
        if not values.get(field_name):
            raise ExtractionError(
                page.url, field_name, profile.extraction_rules[field_name]
            )

    published = None
    raw_date = values.get("published_at")
    if raw_date:
        published = parse_published_date(raw_date, profile.date_formats)

    canonical = canonicalize_url(page.url)
    return ArticleRecord(
        record_id=record_id_for(canonical),
        canonical_url=canonical,
        site_id=profile.site_id,
        title=values["title"] or "",
        body_text=values["body"] or "",
        published_at=published,
        raw_verdict=values.get("raw_verdict") or None,
        raw_topic=values.get("raw_topic") or None,
    )


def dedupe(records: Iterable[ArticleRecord]) -> list[ArticleRecord]:
    """Keep the first record per canonical_url, preserving input order."""
    seen: set[str] = set()
    kept: list[ArticleRecord] = []
    for record in records:
        if record.canonical_url in seen:
            continue
        seen.add(record.canonical_url)
        kept.append(record)
    return kept
