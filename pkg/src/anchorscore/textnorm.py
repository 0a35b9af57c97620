"""Text normalization used for word matching and document-frequency counts."""

import unicodedata


def casefold_text(text: str) -> str:
    """NFC-normalize and lowercase; the exact-match key for anchor lookup."""
    return unicodedata.normalize("NFC", text).lower()
