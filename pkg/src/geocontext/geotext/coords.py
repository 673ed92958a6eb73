"""Coordinate <-> text conversion.

Rendering uses predefined templates with [Latitude]/[Longitude] placeholders
at a fixed 4-decimal precision (~11 m). Parsing accepts hemisphere-suffixed
degree components ("1.3008° N") and bare signed decimals, per component.
"""

from __future__ import annotations

import re

from ..errors import BadTemplate, ParseError
from ..geomodel import GeoPoint

LAT_PLACEHOLDER = "[Latitude]"
LON_PLACEHOLDER = "[Longitude]"
COORD_DECIMALS = 4

_NUMBER = re.compile(r"[+-]?\d+(?:\.\d+)?")
_WS = re.compile(r"\s*")


def coord_to_text(p: GeoPoint, template: str) -> str:
    """Substitute placeholders with fixed-point 4-decimal coordinates."""
    if LAT_PLACEHOLDER not in template:
        raise BadTemplate(f"template missing {LAT_PLACEHOLDER}")
    if LON_PLACEHOLDER not in template:
        raise BadTemplate(f"template missing {LON_PLACEHOLDER}")
    return template.replace(LAT_PLACEHOLDER, f"{p.lat:.{COORD_DECIMALS}f}").replace(
        LON_PLACEHOLDER, f"{p.lon:.{COORD_DECIMALS}f}"
    )


def _skip_ws(s: str, pos: int) -> int:
    return _WS.match(s, pos).end()


def _parse_component(s: str, pos: int, hemispheres: str) -> tuple[float, int]:
    """Parse one coordinate: signed decimal with optional '° H' suffix."""
    pos = _skip_ws(s, pos)
    m = _NUMBER.match(s, pos)
    if not m:
        raise ParseError("expected a number", offset=pos)
    value = float(m.group())
    pos = m.end()
    look = _skip_ws(s, pos)
    if look < len(s) and s[look] == "°":
        pos = _skip_ws(s, look + 1)
        if pos >= len(s) or s[pos].upper() not in hemispheres:
            raise ParseError(f"expected hemisphere letter in {{{hemispheres}}}", offset=pos)
        if s[pos].upper() in "SW":
            value = -value
        pos += 1
    return value, pos


def text_to_coord(s: str) -> GeoPoint:
    """Parse "D° H, D° H" or "signed decimal, signed decimal" into a GeoPoint.

    Raises ParseError carrying the offset of the first unconsumed character.
    """
    lat, pos = _parse_component(s, 0, "NS")
    pos = _skip_ws(s, pos)
    if pos >= len(s) or s[pos] != ",":
        raise ParseError("expected ',' between latitude and longitude", offset=pos)
    lon, pos = _parse_component(s, pos + 1, "EW")
    pos = _skip_ws(s, pos)
    if pos != len(s):
        raise ParseError("trailing characters after coordinate", offset=pos)
    return GeoPoint(lat, lon)
