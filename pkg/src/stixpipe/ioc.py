"""Indicator-of-Compromise extraction with byte spans.

Regex rules live in ``data/ioc_rules.json`` so the supported set can be
extended without code changes; validation hooks that a pure regex cannot
express (octet ranges, IPv6 grammar, CVE years) are implemented here and
referenced by name from the rule file.
"""

from __future__ import annotations

import ipaddress
import json
import re
from dataclasses import dataclass
from importlib import resources

from .intervals import select_nonoverlapping
from .normalize import NormalizedText

# ioc_type -> STIX object type
IOC_STIX_MAP = {
    "IPv4": "indicator",
    "IPv6": "indicator",
    "URL": "indicator",
    "Domain": "indicator",
    "Email": "indicator",
    "MD5": "indicator",
    "SHA1": "indicator",
    "SHA256": "indicator",
    "FilePath": "indicator",
    "RegistryKey": "indicator",
    "Bitcoin": "indicator",
    "CVE": "vulnerability",
    "AttackTechniqueId": "attack-pattern",
}


class UnknownIocType(KeyError):
    pass


def map_ioc_to_stix(ioc_type: str) -> str:
    try:
        return IOC_STIX_MAP[ioc_type]
    except KeyError:
        raise UnknownIocType(ioc_type) from None


@dataclass(frozen=True)
class IocMatch:
    ioc_type: str
    value: str
    span: tuple[int, int]
    stix_type: str


@dataclass(frozen=True)
class _Rule:
    name: str
    regex: re.Pattern
    validate: str | None


_TRAIL_PUNCT = ".,;:!?)]}>\"'"


def _v_strip_trailing_punct(value: str, span: tuple[int, int]):
    end = len(value)
    while end > 0 and value[end - 1] in _TRAIL_PUNCT:
        end -= 1
    if end == 0:
        return None
    return value[:end], (span[0], span[0] + end)


def _v_ipv4_octets(value: str, span):
    if all(0 <= int(part) <= 255 for part in value.split(".")):
        return value, span
    return None


def _v_ipv6_parse(value: str, span):
    try:
        ipaddress.IPv6Address(value)
    except ValueError:
        return None
    return value, span


def _v_cve_year(value: str, span):
    year = int(value.split("-")[1])
    return (value, span) if year >= 1999 else None


_VALIDATORS = {
    "strip_trailing_punct": _v_strip_trailing_punct,
    "ipv4_octets": _v_ipv4_octets,
    "ipv6_parse": _v_ipv6_parse,
    "cve_year": _v_cve_year,
}


def _data_text(name: str) -> str:
    return resources.files("stixpipe.data").joinpath(name).read_text(encoding="utf-8")


def load_tlds() -> list[str]:
    return [line.strip() for line in _data_text("tlds.txt").splitlines() if line.strip()]


def load_rules(path: str | None = None) -> list[_Rule]:
    """Compile the IOC rule set (from the bundled file unless a path is given)."""
    if path is None:
        raw = json.loads(_data_text("ioc_rules.json"))
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    tld_alt = "|".join(sorted(load_tlds(), key=len, reverse=True))
    rules = []
    for spec in raw["rules"]:
        pattern = spec["pattern"].replace("{TLDS}", tld_alt)
        flags = 0 if spec.get("case_sensitive") else re.IGNORECASE
        rules.append(_Rule(spec["name"], re.compile(pattern, flags), spec.get("validate")))
    return rules


_DEFAULT_RULES: list[_Rule] | None = None


def default_rules() -> list[_Rule]:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = load_rules()
    return _DEFAULT_RULES


def find_iocs(nt: NormalizedText, rules: list[_Rule] | None = None) -> list[IocMatch]:
    """All validated IOC matches in ``nt.text``, overlaps resolved
    longest-match-first (ties: earlier start, then rule order)."""
    rules = rules if rules is not None else default_rules()
    raw: list[tuple[int, int, int, str, str]] = []
    for order, rule in enumerate(rules):
        for m in rule.regex.finditer(nt.text):
            value, span = m.group(0), m.span()
            if rule.validate:
                checked = _VALIDATORS[rule.validate](value, span)
                if checked is None:
                    continue
                value, span = checked
            raw.append((span[0], span[1], order, rule.name, value))

    raw.sort(key=lambda r: (-(r[1] - r[0]), r[0], r[2]))
    kept = select_nonoverlapping(raw, span_of=lambda r: (r[0], r[1]))
    kept.sort(key=lambda r: r[0])
    return [
        IocMatch(name, value, (s, e), map_ioc_to_stix(name))
        for s, e, _, name, value in kept
    ]
