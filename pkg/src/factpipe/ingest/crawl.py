"""Breadth-first polite crawl of one site, yielding extracted articles."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from urllib.parse import urljoin, urlsplit

from . import htmltree
from .extract import (
    ArticleRecord,
    ExtractionError,
    SiteProfile,
    UnsupportedContentError,
    decode_html,
    extract_article,
)
from .fetch import FetchError, PoliteFetcher, RobotsDeniedError
from .urls import UrlError, canonicalize_url

logger = logging.getLogger(__name__)


@dataclass
class CrawlReport:
    """Outcome tally for one crawl; fetched = extracted + failed + skipped.

    fetched counts pages the crawler attempted (dequeued from the
    frontier). skipped covers robots-denied pages, non-HTML payloads and
    pages without extractable article content (index pages). failed
    covers transport errors and non-200 responses.
    """

    site_id: str
    fetched: int = 0
    extracted: int = 0
    failed: int = 0
    skipped: int = 0
    unreachable_seeds: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "site_id": self.site_id,
            "fetched": self.fetched,
            "extracted": self.extracted,
            "failed": self.failed,
            "skipped": self.skipped,
            "unreachable_seeds": list(self.unreachable_seeds),
            "errors": list(self.errors),
        }


def _page_links(page_url: str, html_text: str, allowed_hosts: set[str]) -> list[str]:
    """Same-host http(s) links of a page, canonicalized, document order."""
    tree = htmltree.parse_html(html_text)
    links: list[str] = []
    for anchor in htmltree.select(tree, "a[href]"):
        href = (anchor.get("href") or "").strip()
        if not href or href.startswith("#"):
            continue
        try:
            link = canonicalize_url(urljoin(page_url, href))
        except UrlError:
            continue
        if urlsplit(link).netloc in allowed_hosts:
            links.append(link)
    return links


def crawl_site(
    profile: SiteProfile,
    budget: int,
    fetcher: PoliteFetcher | None = None,
) -> tuple[list[ArticleRecord], CrawlReport]:
    """Crawl from the profile's seeds, breadth first, within ``budget`` pages.

    The crawl is restricted to the seed URLs' hosts. Page-level failures
    are tallied in the report and never abort the crawl. The effective
    page limit is ``min(budget, profile.max_pages)``.
    """
    fetcher = fetcher or PoliteFetcher()
    report = CrawlReport(site_id=profile.site_id)
    limit = min(budget, profile.max_pages)

    seeds = []
    for url in profile.seed_urls:
        seeds.append(canonicalize_url(url))
    allowed_hosts = {urlsplit(url).netloc for url in seeds}

    frontier: deque[str] = deque(seeds)
    enqueued: set[str] = set(seeds)
    seed_set = set(seeds)
    records: list[ArticleRecord] = []

    while frontier and report.fetched < limit:
        url = frontier.popleft()
        report.fetched += 1
        try:
            page = fetcher.fetch_page(url, rate_limit_ms=profile.rate_limit_ms)
        except RobotsDeniedError:
            report.skipped += 1
            continue
        except FetchError as exc:
            report.failed += 1
            report.errors.append(str(exc))
            if url in seed_set:
                report.unreachable_seeds.append(url)
            continue

        if page.status != 200:
            report.failed += 1
            report.errors.append(f"HTTP {page.status} ({page.url})")
            if url in seed_set:
                report.unreachable_seeds.append(url)
            continue

        if not page.is_html():
            report.skipped += 1
            continue

        try:
            records.append(extract_article(page, profile))
            report.extracted += 1
        except (ExtractionError, UnsupportedContentError):
            # Crawled for links only; not an article page.
            report.skipped += 1

        for link in _page_links(page.url, decode_html(page.body_bytes, page.content_type),
                                allowed_hosts):
            if link not in enqueued:
                enqueued.add(link)
                frontier.append(link)

    return records, report
