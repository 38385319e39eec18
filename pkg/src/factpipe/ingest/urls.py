"""URL canonicalization for crawl frontier and record identity."""

from __future__ import annotations

import hashlib
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit


class UrlError(ValueError):
    """Raised for URLs that cannot be canonicalized."""


_TRACKING_PARAMS = {"fbclid", "gclid"}


def _is_tracking_param(name: str) -> bool:
    lowered = name.lower()
    return lowered.startswith("utm_") or lowered in _TRACKING_PARAMS


def canonicalize_url(url: str) -> str:
    """Return the canonical form of an absolute http(s) URL.

    Host is lowercased, the fragment dropped, tracking parameters
    (utm_*, fbclid, gclid) removed, remaining query parameters sorted
    by name, and a trailing slash on non-root paths stripped.
    """
    try:
        parts = urlsplit(url.strip())
    except ValueError as exc:
        raise UrlError(f"malformed URL {url!r}: {exc}") from exc

    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        raise UrlError(f"not an absolute http(s) URL: {url!r}")
    if not parts.hostname:
        raise UrlError(f"URL has no host: {url!r}")

    host = parts.hostname.lower()
    netloc = host
    if parts.port is not None:
        netloc = f"{host}:{parts.port}"
    if parts.username:
        cred = parts.username
        if parts.password:
            cred = f"{cred}:{parts.password}"
        netloc = f"{cred}@{netloc}"

    path = parts.path or "/"
    if path != "/":
        path = path.rstrip("/") or "/"

    pairs = [
        (name, value)
        for name, value in parse_qsl(parts.query, keep_blank_values=True)
        if not _is_tracking_param(name)
    ]
    pairs.sort(key=lambda pair: pair[0])
    query = urlencode(pairs)

    return urlunsplit((scheme, netloc, path, query, ""))


def record_id_for(canonical_url: str) -> str:
    """Deterministic record identifier: SHA-256 of the canonical URL."""
    return hashlib.sha256(canonical_url.encode("utf-8")).hexdigest()
