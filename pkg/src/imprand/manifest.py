"""Line-oriented experiment manifests.

Grammar (one construct per line, '#' starts a comment anywhere):

    manifest := (section | blank)*
    section  := '[' ident ']' line*
    line     := key '=' value
    value    := interval | number | quoted string | identifier
    interval := '[' number ',' number ']'
    number   := integer | decimal | integer '/' integer

Rational literals flow through as exact fractions; decimal literals are
binary64.  Unknown sections or keys are rejected, as are values of the wrong
shape, always with a line and column position.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .localmodels import IntervalForecast


class ManifestError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*$")
_INT = re.compile(r"[+-]?\d+$")
_DECIMAL = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+[eE][+-]?\d+|\d+\.\d*[eE][+-]?\d+)$")
_RATIONAL = re.compile(r"([+-]?\d+)\s*/\s*(\d+)$")


#: section -> key -> expected shape
SCHEMA = {
    "system": {
        "kind": "ident",
        "interval": "interval",
        "p": "number",
        "q": "number",
        "rival-interval": "interval",
    },
    "path": {
        "source": "ident",
        "length": "int",
        "seed": "int",
        "policy": "ident",
        "file": "string",
        "format": "ident",
    },
    "battery": {
        "preset": "ident",
        "eps-min": "number",
        "divergence": "ident",
    },
    "audit": {
        "mode": "ident",
        "threshold": "number",
        "tail-window": "number",
    },
    "scan": {
        "grid": "int",
        "mode": "ident",
        "threshold": "number",
        "tail-window": "number",
    },
    "expect": {
        "horizon": "int",
        "gamble": "ident",
        "prefix": "string",
        "side": "ident",
    },
    "lawful": {
        "n": "int",
        "r": "int",
        "m-max": "int",
    },
}


@dataclass
class Manifest:
    sections: dict = field(default_factory=dict)  # section -> {key: value}

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str):
        if section not in self.sections:
            raise ValueError(f"manifest is missing the [{section}] section")
        return self.sections[section]


def _strip_comment(raw: str) -> str:
    out = []
    quoted = False
    for ch in raw:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def _parse_number(text: str, line: int, col: int):
    m = _RATIONAL.match(text)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ManifestError("rational literal with zero denominator", line, col)
        return Fraction(num, den)
    if _INT.match(text):
        return int(text)
    if _DECIMAL.match(text):
        return float(text)
    raise ManifestError(f"expected a number, got {text!r}", line, col)


def _parse_value(text: str, line: int, col: int):
    text = text.strip()
    if not text:
        raise ManifestError("missing value", line, col)
    if text.startswith("["):
        if not text.endswith("]"):
            raise ManifestError("unterminated interval literal", line, col)
        body = text[1:-1]
        parts = body.split(",")
        if len(parts) != 2:
            raise ManifestError("interval literal needs two comma-separated bounds", line, col)
        lo = _parse_number(parts[0].strip(), line, col + 1)
        hi = _parse_number(parts[1].strip(), line, col + 1 + len(parts[0]) + 1)
        try:
            return IntervalForecast(lo, hi)
        except ValueError as exc:
            raise ManifestError(str(exc), line, col) from None
    if text.startswith('"'):
        if len(text) < 2 or not text.endswith('"'):
            raise ManifestError("unterminated string literal", line, col)
        return text[1:-1]
    if _RATIONAL.match(text) or _INT.match(text) or _DECIMAL.match(text):
        return _parse_number(text, line, col)
    if _IDENT.match(text):
        return text
    raise ManifestError(f"unparseable value {text!r}", line, col)


def _check_shape(value, shape: str, key: str, line: int, col: int):
    ok = {
        "ident": lambda: isinstance(value, str),
        "string": lambda: isinstance(value, str),
        "int": lambda: isinstance(value, int) and not isinstance(value, bool),
        "number": lambda: isinstance(value, (int, float, Fraction)),
        "interval": lambda: isinstance(value, IntervalForecast),
    }[shape]()
    if not ok:
        raise ManifestError(
            f"key {key!r} expects a {shape}, got {type(value).__name__}", line, col
        )


def parse_manifest(text: str) -> Manifest:
    """Parse, validate against the schema, and return the structured form."""
    manifest = Manifest()
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw)
        if not stripped.strip():
            continue
        line = stripped.strip()
        col = raw.index(line[0]) + 1 if line else 1
        if line.startswith("["):
            if not line.endswith("]"):
                raise ManifestError("unterminated section header", lineno, col)
            name = line[1:-1].strip()
            if not _IDENT.match(name):
                raise ManifestError(f"bad section name {name!r}", lineno, col + 1)
            if name not in SCHEMA:
                raise ManifestError(f"unknown section [{name}]", lineno, col + 1)
            if name in manifest.sections:
                raise ManifestError(f"duplicate section [{name}]", lineno, col + 1)
            manifest.sections[name] = {}
            current = name
            continue
        if current is None:
            raise ManifestError("key/value line before any section header", lineno, col)
        if "=" not in line:
            raise ManifestError("expected 'key = value'", lineno, col)
        key_text, value_text = line.split("=", 1)
        key = key_text.strip()
        if not _IDENT.match(key):
            raise ManifestError(f"bad key {key!r}", lineno, col)
        if key not in SCHEMA[current]:
            raise ManifestError(f"unknown key {key!r} in [{current}]", lineno, col)
        if key in manifest.sections[current]:
            raise ManifestError(f"duplicate key {key!r} in [{current}]", lineno, col)
        value_col = raw.index("=") + 2
        value = _parse_value(value_text, lineno, value_col)
        _check_shape(value, SCHEMA[current][key], key, lineno, value_col)
        manifest.sections[current][key] = value
    return manifest


def _format_value(value) -> str:
    if isinstance(value, IntervalForecast):
        return f"[{_format_value(value.lower)},{_format_value(value.upper)}]"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        raise TypeError("booleans are not manifest values")
    if isinstance(value, (int, float)):
        return repr(value)
    if _IDENT.match(value):
        return value
    return f'"{value}"'


def serialize_manifest(manifest: Manifest) -> str:
    """Canonical text form; parse(serialize(m)) == m."""
    out = []
    for section, entries in manifest.sections.items():
        out.append(f"[{section}]")
        for key, value in entries.items():
            out.append(f"{key} = {_format_value(value)}")
        out.append("")
    return "\n".join(out)
