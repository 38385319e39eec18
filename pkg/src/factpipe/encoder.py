"""Client for an external text-encoder service producing dense vectors.

Protocol: POST ``{"texts": [...]}`` to the endpoint; the service answers
200 with ``{"vectors": [[... dims floats ...], ...], "dims": N}``. Any
other status or shape is a protocol error. The returned vectors feed the
same classifier head as TF-IDF features.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import requests


class EncoderError(Exception):
    pass


class EncoderConnectionError(EncoderError):
    """Transient transport failure; safe to retry."""


class EncoderProtocolError(EncoderError):
    """The service answered, but outside the protocol."""


@dataclass(frozen=True)
class EncoderBackendRef:
    endpoint: str
    dims: int
    timeout_ms: float = 10_000.0
    batch_limit: int = 32

    def __post_init__(self) -> None:
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.batch_limit < 1:
            raise ValueError("batch_limit must be >= 1")


def embed_remote(
    texts: Sequence[str],
    backend: EncoderBackendRef,
    session: requests.Session | None = None,
) -> np.ndarray:
    """Encode texts remotely; returns an (n, dims) float64 array, input order.

    Requests are batched at ``backend.batch_limit`` texts each.
    """
    if not texts:
        raise ValueError("no texts to embed")
    session = session or requests.Session()
    timeout_s = backend.timeout_ms / 1000.0
    vectors = np.empty((len(texts), backend.dims), dtype=np.float64)

    for start in range(0, len(texts), backend.batch_limit):
        batch = list(texts[start:start + backend.batch_limit])
        try:
            response = session.post(
                backend.endpoint, json={"texts": batch}, timeout=timeout_s
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise EncoderConnectionError(
                f"encoder unreachable at {backend.endpoint}: {exc}"
            ) from exc
        if response.status_code != 200:
            raise EncoderProtocolError(
                f"encoder returned status {response.status_code}"
            )
        try:
            payload = response.json()
        except ValueError as exc:
            raise EncoderProtocolError(f"encoder sent non-JSON body: {exc}") from exc

        got = payload.get("vectors")
        if not isinstance(got, list) or len(got) != len(batch):
            count = len(got) if isinstance(got, list) else "no"
            raise EncoderProtocolError(
                f"expected {len(batch)} vectors, got {count}"
            )
        declared = payload.get("dims")
        if declared is not None and declared != backend.dims:
            raise EncoderProtocolError(
                f"dims mismatch: expected {backend.dims}, got {declared}"
            )
        for i, vec in enumerate(got):
            if len(vec) != backend.dims:
                raise EncoderProtocolError(
                    f"dims mismatch: expected {backend.dims}, got {len(vec)}"
                    f" (vector {start + i})"
                )
            vectors[start + i] = vec
    return vectors
