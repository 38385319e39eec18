"""Shared lowercase/strip-punctuation normalization used by labels and textprep."""

import re

_NON_ALNUM = re.compile(r"[\W_]+", re.UNICODE)


def squash(text: str) -> str:
    """Lowercase, replace every non-alphanumeric run with one space, trim.

    Idempotent: the output contains only letters, digits and single spaces.
    """
    return _NON_ALNUM.sub(" ", text.lower()).strip()
