"""Text normalization and tokenization used by bag-of-words providers."""
from __future__ import annotations

import re
import unicodedata

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def normalize_text(text: str) -> str:
    """Unicode NFC, lowercase, collapse runs of whitespace to single spaces."""
    text = unicodedata.normalize("NFC", text)
    text = text.lower()
    return " ".join(text.split())


def tokenize(text: str) -> list[str]:
    """Word tokens of the normalized text. Tokens match ``\\w+`` only."""
    return _TOKEN_RE.findall(normalize_text(text))
