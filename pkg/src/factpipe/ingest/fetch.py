"""Polite HTTP fetching: per-host rate limiting, robots.txt, redirect caps."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from urllib.parse import urljoin, urlsplit
from urllib.robotparser import RobotFileParser

import requests

from .urls import UrlError, canonicalize_url

logger = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "factpipe-crawler/0.1"
DEFAULT_RATE_LIMIT_MS = 1000.0
_REDIRECT_STATUSES = {301, 302, 303, 307, 308}


class FetchError(Exception):
    """Base class for fetch failures; carries the offending URL."""

    def __init__(self, url: str, message: str) -> None:
        super().__init__(f"{message} ({url})")
        self.url = url


class RetriableFetchError(FetchError):
    """Transient failure (network error, timeout); safe to retry later."""


class PermanentFetchError(FetchError):
    """Failure that will not resolve by retrying (bad URL, redirect loop)."""


class RobotsDeniedError(PermanentFetchError):
    """The host's robots rules exclude this path; no request was issued."""


class TooManyRedirectsError(PermanentFetchError):
    pass


@dataclass(frozen=True)
class FetchResult:
    url: str
    status: int
    content_type: str
    body_bytes: bytes
    fetched_at: datetime

    def media_type(self) -> str:
        """Media type without parameters, lowercased."""
        return self.content_type.split(";", 1)[0].strip().lower()

    def is_html(self) -> bool:
        return self.media_type() in ("text/html", "application/xhtml+xml")


class HostRateLimiter:
    """Serializes dispatch instants per host.

    ``acquire`` reserves the next slot for the host and sleeps until it;
    concurrent callers for one host therefore dispatch at least the
    configured interval apart. Thread safe.
    """

    def __init__(self, default_interval_ms: float = DEFAULT_RATE_LIMIT_MS) -> None:
        if default_interval_ms < 0:
            raise ValueError("rate limit must be >= 0")
        self.default_interval_ms = default_interval_ms
        self._lock = threading.Lock()
        self._next_allowed: dict[str, float] = {}

    def acquire(self, host: str, interval_ms: float | None = None) -> float:
        """Block until the host's slot opens; return the dispatch instant.

        The returned value is on the ``time.monotonic`` clock.
        """
        interval = (
            self.default_interval_ms if interval_ms is None else interval_ms
        ) / 1000.0
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_allowed.get(host, now))
            self._next_allowed[host] = slot + interval
        delay = slot - time.monotonic()
        if delay > 0:
            time.sleep(delay)
        return slot


class RobotsCache:
    """Per-host robots.txt decisions, fetched once and cached.

    A robots.txt that cannot be fetched or parsed counts as allow-all,
    the conventional reading.
    """

    def __init__(self, user_agent: str, timeout_s: float, session: requests.Session) -> None:
        self.user_agent = user_agent
        self.timeout_s = timeout_s
        self._session = session
        self._lock = threading.Lock()
        self._parsers: dict[tuple[str, str], RobotFileParser | None] = {}

    def _load(self, scheme: str, netloc: str, limiter: HostRateLimiter,
              interval_ms: float | None) -> RobotFileParser | None:
        robots_url = f"{scheme}://{netloc}/robots.txt"
        limiter.acquire(netloc, interval_ms)
        try:
            response = self._session.get(
                robots_url,
                timeout=self.timeout_s,
                headers={"User-Agent": self.user_agent},
            )
        except requests.RequestException:
            logger.debug("robots.txt unreachable for %s; allowing all", netloc)
            return None
        if response.status_code != 200:
            return None
        parser = RobotFileParser()
        parser.parse(response.text.splitlines())
        return parser

    def allowed(self, url: str, limiter: HostRateLimiter,
                interval_ms: float | None = None) -> bool:
        parts = urlsplit(url)
        key = (parts.scheme, parts.netloc)
        with self._lock:
            if key not in self._parsers:
                self._parsers[key] = self._load(parts.scheme, parts.netloc,
                                                limiter, interval_ms)
            parser = self._parsers[key]
        if parser is None:
            return True
        return parser.can_fetch(self.user_agent, url)


class PoliteFetcher:
    """Fetches pages while honoring rate limits, robots rules and redirect caps.

    One instance may be shared by concurrent crawls; the rate limiter is
    the only synchronized state.
    """

    def __init__(
        self,
        user_agent: str = DEFAULT_USER_AGENT,
        timeout_s: float = 10.0,
        max_redirects: int = 5,
        default_rate_limit_ms: float = DEFAULT_RATE_LIMIT_MS,
        respect_robots: bool = True,
        session: requests.Session | None = None,
    ) -> None:
        self.user_agent = user_agent
        self.timeout_s = timeout_s
        self.max_redirects = max_redirects
        self.respect_robots = respect_robots
        self.session = session or requests.Session()
        self.limiter = HostRateLimiter(default_rate_limit_ms)
        self.robots = RobotsCache(user_agent, timeout_s, self.session)

    def fetch_page(self, url: str, rate_limit_ms: float | None = None) -> FetchResult:
        """Fetch ``url``, following at most ``max_redirects`` redirects.

        Every hop (including redirect targets) passes the robots check and
        the per-host rate limiter before being requested.
        """
        try:
            current = canonicalize_url(url)
        except UrlError as exc:
            raise PermanentFetchError(url, str(exc)) from exc

        for _ in range(self.max_redirects + 1):
            host = urlsplit(current).netloc
            if self.respect_robots and not self.robots.allowed(
                current, self.limiter, rate_limit_ms
            ):
                raise RobotsDeniedError(current, "denied by robots.txt")
            self.limiter.acquire(host, rate_limit_ms)
            try:
                response = self.session.get(
                    current,
                    timeout=self.timeout_s,
                    allow_redirects=False,
                    headers={"User-Agent": self.user_agent},
                )
            except (requests.Timeout, requests.ConnectionError) as exc:
                raise RetriableFetchError(current, f"network failure: {exc}") from exc
            except requests.RequestException as exc:
                raise PermanentFetchError(current, f"request failed: {exc}") from exc

            if response.status_code in _REDIRECT_STATUSES:
                location = response.headers.get("Location")
                if not location:
                    raise PermanentFetchError(current, "redirect without Location")
                try:
                    current = canonicalize_url(urljoin(current, location))
                except UrlError as exc:
                    raise PermanentFetchError(current, str(exc)) from exc
                continue

            return FetchResult(
                url=current,
                status=response.status_code,
                content_type=response.headers.get("Content-Type", ""),
                body_bytes=response.content,
                fetched_at=datetime.now(timezone.utc),
            )

        raise TooManyRedirectsError(current, f"more than {self.max_redirects} redirects")
