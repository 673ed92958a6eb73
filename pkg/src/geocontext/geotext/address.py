"""Rule-based street address parsing and normalization.

Rules: a leading integer is the street number; the remaining tokens up to the
first comma form the street name; the final comma segment is the city.
Normalization expands abbreviations from an extensible tab-separated rule
table and strips a trailing "City" word from city names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import UnparseableAddress


@dataclass(frozen=True)
class AddressFields:
    street_number: str | None
    street_name: str | None
    city: str | None
    raw: str


def load_abbreviations(path: str | Path) -> dict[str, str]:
    """Load an "abbrev<TAB>expansion" table; '#' starts a comment line."""
    table: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        abbrev, _, expansion = stripped.partition("\t")
        if not expansion:
            continue
        table[abbrev.strip().casefold()] = expansion.strip()
    return table


def _default_abbreviations() -> dict[str, str]:
    ref = resources.files("geocontext.geotext").joinpath("data/abbreviations.txt")
    table: dict[str, str] = {}
    for line in ref.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        abbrev, _, expansion = stripped.partition("\t")
        if expansion:
            table[abbrev.strip().casefold()] = expansion.strip()
    return table


DEFAULT_ABBREVIATIONS = _default_abbreviations()

_COLLAPSE_WS = re.compile(r"\s+")


def _normalize_city(segment: str) -> str | None:
    words = _COLLAPSE_WS.sub(" ", segment.strip()).split(" ")
    if words and words[-1].casefold() == "city":
        words = words[:-1]
    city = " ".join(w for w in words if w)
    return city or None


def parse_address(s: str, abbreviations: dict[str, str] | None = None) -> AddressFields:
    """Parse an unstructured address string into structured fields.

    Raises UnparseableAddress when no rule matches any field.
    """
    table = DEFAULT_ABBREVIATIONS if abbreviations is None else abbreviations
    segments = s.split(",")
    head_tokens = segments[0].split()

    street_number = None
    if head_tokens and head_tokens[0].isdigit():
        street_number = head_tokens[0]
        head_tokens = head_tokens[1:]

    street_tokens = [table.get(tok.casefold(), tok) for tok in head_tokens]
    street_name = " ".join(street_tokens) or None

    city = _normalize_city(segments[-1]) if len(segments) >= 2 else None

    if street_number is None and street_name is None and city is None:
        raise UnparseableAddress(f"no address rule matched {s!r}")
    return AddressFields(street_number=street_number, street_name=street_name, city=city, raw=s)
