"""Text normalization shared by name lookups and header matching."""

from __future__ import annotations

_SUBSCRIPT_DIGITS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")


def ascii_subscripts(text: str) -> str:
    """Map Unicode subscript digits to ASCII digits ("CO₂" -> "CO2")."""
    return text.translate(_SUBSCRIPT_DIGITS)


def normalize_name(text: str) -> str:
    """Trim, case-fold, collapse internal whitespace and map subscript digits."""
    return " ".join(ascii_subscripts(text).casefold().split())


def is_word_form(form: str) -> bool:
    """Word forms ("carbon dioxide", "Methane") match case-insensitively; formulas do not.

    A form with a digit is a formula. A single capitalised word of three or
    more letters reads as a name, while "He" or "NaCl" stay formulas.
    """
    form = form.strip()
    if not form or any(ch.isdigit() for ch in form):
        return False
    if any(ch.isspace() for ch in form) or form == form.lower():
        return True
    return len(form) >= 3 and form[0].isupper() and form[1:] == form[1:].lower()


def surface_key(form: str) -> str:
    """Comparison key of a species surface form."""
    form = ascii_subscripts(form).strip()
    return form.casefold() if is_word_form(form) else form
