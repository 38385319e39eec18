"""Article ingestion: polite crawling, per-site extraction, deduplication."""

from .crawl import CrawlReport, crawl_site
from .extract import (
    ArticleRecord,
    ExtractionError,
    ProfileError,
    SiteProfile,
    UnsupportedContentError,
    dedupe,
    extract_article,
    load_site_profile,
    load_site_profiles,
)
from .fetch import (
    FetchError,
    FetchResult,
    HostRateLimiter,
    PermanentFetchError,
    PoliteFetcher,
    RetriableFetchError,
    RobotsDeniedError,
    TooManyRedirectsError,
)
from .urls import UrlError, canonicalize_url, record_id_for

__all__ = [
    "ArticleRecord",
    "CrawlReport",
    "ExtractionError",
    "FetchError",
    "FetchResult",
    "HostRateLimiter",
    "PermanentFetchError",
    "PoliteFetcher",
    "ProfileError",
    "RetriableFetchError",
    "RobotsDeniedError",
    "SiteProfile",
    "TooManyRedirectsError",
    "UnsupportedContentError",
    "UrlError",
    "canonicalize_url",
    "crawl_site",
    "dedupe",
    "extract_article",
    "load_site_profile",
    "load_site_profiles",
    "record_id_for",
]
