"""Country code normalization and capital coordinates.

Codes are ISO-3166 alpha-2. Raw records may carry full country names
(``"United States"``) or alpha-3 style codes; :func:`normalize_country`
maps the common spellings through a built-in alias table. Anything that
normalizes to two ASCII letters is accepted, so synthetic country codes
pass through unchanged.

Capital coordinates ship as a versioned CSV (``data/capitals.csv``) and
feed the gravity model's great-circle distances.
"""

from __future__ import annotations

import csv
from importlib import resources
from typing import Optional

# Common full-name spellings seen in bibliographic exports. Keys are
# casefolded before lookup.
_ALIASES = {
    "united states": "US",
    "united states of america": "US",
    "usa": "US",
    "japan": "JP",
    "china": "CN",
    "peoples republic of china": "CN",
    "people's republic of china": "CN",
    "germany": "DE",
    "united kingdom": "GB",
    "uk": "GB",
    "great britain": "GB",
    "england": "GB",
    "russia": "RU",
    "russian federation": "RU",
    "ussr": "RU",
    "soviet union": "RU",
    "france": "FR",
    "italy": "IT",
    "republic of korea": "KR",
    "south korea": "KR",
    "korea, republic of": "KR",
    "korea": "KR",
    "switzerland": "CH",
    "india": "IN",
    "sweden": "SE",
    "canada": "CA",
    "netherlands": "NL",
    "the netherlands": "NL",
    "holland": "NL",
    "spain": "ES",
    "portugal": "PT",
    "belgium": "BE",
    "austria": "AT",
    "australia": "AU",
    "brazil": "BR",
    "mexico": "MX",
    "poland": "PL",
    "czech republic": "CZ",
    "czechia": "CZ",
    "slovakia": "SK",
    "hungary": "HU",
    "romania": "RO",
    "ukraine": "UA",
    "finland": "FI",
    "norway": "NO",
    "denmark": "DK",
    "ireland": "IE",
    "greece": "GR",
    "turkey": "TR",
    "israel": "IL",
    "iran": "IR",
    "egypt": "EG",
    "south africa": "ZA",
    "argentina": "AR",
    "chile": "CL",
    "pakistan": "PK",
    "thailand": "TH",
    "vietnam": "VN",
    "viet nam": "VN",
    "singapore": "SG",
    "malaysia": "MY",
    "indonesia": "ID",
    "new zealand": "NZ",
    "taiwan": "TW",
    "saudi arabia": "SA",
    "united arab emirates": "AE",
    "kazakhstan": "KZ",
    "belarus": "BY",
    "lithuania": "LT",
    "latvia": "LV",
    "estonia": "EE",
    "slovenia": "SI",
    "croatia": "HR",
    "serbia": "RS",
    "bulgaria": "BG",
}


def normalize_country(raw: str) -> Optional[str]:
    """Map a raw country string to an alpha-2 code, or None if unmappable.

    Two-letter inputs are uppercased and passed through; longer strings
    go through the alias table.
    """
    if raw is None:
        return None
    text = str(raw).strip()
    if not text:
        return None
    if len(text) == 2 and text.isalpha() and text.isascii():
        return text.upper()
    return _ALIASES.get(text.casefold())


def load_capitals(path=None) -> dict[str, tuple[float, float]]:
    """Load a capitals table as {code: (lat, lon)} in degrees.

    Without ``path`` the packaged table is used. Custom tables (for
    example the ring coordinates emitted by the synthetic generator)
    must have columns country, capital, lat, lon.
    """
    if path is None:
        source = resources.files("rescap.data").joinpath("capitals.csv")
        text = source.read_text(encoding="utf-8")
        rows = csv.DictReader(text.splitlines())
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    table = {}
    for row in rows:
        table[row["country"].strip().upper()] = (float(row["lat"]), float(row["lon"]))
    return table
