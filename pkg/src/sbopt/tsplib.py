"""Reader and writer for TSPLIB asymmetric instances with an explicit full matrix."""

import math

import numpy as np

from .exceptions import (
    MissingDimensionError,
    NonNumericTokenError,
    TokenCountError,
    TsplibError,
    UnsupportedFeatureError,
)
from .problems.tsp import ATSPInstance

SUPPORTED = {
    "TYPE": "ATSP",
    "EDGE_WEIGHT_TYPE": "EXPLICIT",
    "EDGE_WEIGHT_FORMAT": "FULL_MATRIX",
}
WEIGHT_SECTION = "EDGE_WEIGHT_SECTION"


def _split_header(line):
    if ":" in line:
        key, _, value = line.partition(":")
    else:
        key, _, value = line.partition(" ")
    return key.strip().upper(), value.strip()


def _is_keyword(token):
    return bool(token) and token[0].isalpha() and token.replace("_", "").isalnum()


def tokenize(text):
    """Split a document into ``(header, tokens)``.

    ``tokens`` is a list of ``(line_number, token)`` from the weight section.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TsplibError(f"document is not valid UTF-8 text: {exc.reason}") from None
    header = {}
    tokens = []
    section_line = None
    in_section = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if in_section and not _is_keyword(parts[0]):
            tokens.extend((lineno, tok) for tok in parts)
            continue
        in_section = False
        key = parts[0].rstrip(":").upper()
        if key == "EOF":
            break
        if key == WEIGHT_SECTION:
            if section_line is not None:
                raise TsplibError("duplicate EDGE_WEIGHT_SECTION", lineno)
            in_section, section_line = True, lineno
            rest = line[len(parts[0]):].lstrip(" \t:")
            tokens.extend((lineno, tok) for tok in rest.split())
            continue
        if key.endswith("_SECTION"):
            raise UnsupportedFeatureError(f"section {key} is not supported", lineno)
        name, value = _split_header(line)
        header[name] = (value, lineno)
    header["_SECTION_LINE"] = (None, section_line)
    return header, tokens


def parse_atsp(text):
    """Parse a TSPLIB ``ATSP`` document into an :class:`ATSPInstance`."""
    header, tokens = tokenize(text)
    _, section_line = header.pop("_SECTION_LINE")
    for key, expected in SUPPORTED.items():
        if key not in header:
            raise UnsupportedFeatureError(f"{key} is missing; only {key}: {expected} is supported")
        value, lineno = header[key]
        if value.upper() != expected:
            raise UnsupportedFeatureError(f"{key}: {value} is not supported", lineno)
    if "DIMENSION" not in header:
        raise MissingDimensionError("DIMENSION is missing")
    dim_text, dim_line = header["DIMENSION"]
    try:
        k = int(dim_text)
    except ValueError:
        raise NonNumericTokenError(f"DIMENSION {dim_text!r} is not an integer", dim_line) from None
    if k <= 0:
        raise TsplibError(f"DIMENSION must be positive, got {k}", dim_line)
    if section_line is None:
        raise TokenCountError(f"{WEIGHT_SECTION} is missing")
    if len(tokens) != k * k:
        raise TokenCountError(
            f"expected {k * k} weights for DIMENSION {k}, found {len(tokens)}", section_line
        )
    values = np.empty(k * k)
    for idx, (lineno, tok) in enumerate(tokens):
        try:
            v = float(tok)
        except ValueError:
            raise NonNumericTokenError(f"weight {tok[:40]!r} is not a number", lineno) from None
        if not math.isfinite(v) or v < 0:
            raise TsplibError(f"weight {tok[:40]!r} must be finite and non-negative", lineno)
        values[idx] = v
    name = header.get("NAME", ("", None))[0]
    return ATSPInstance(values.reshape(k, k), name=name)


def read_atsp(path):
    with open(path, "rb") as fh:
        return parse_atsp(fh.read())


def _format_weight(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def serialize_atsp(instance, comment=None):
    k = instance.n_cities
    lines = [f"NAME: {instance.name or 'unnamed'}", "TYPE: ATSP"]
    if comment:
        lines.append(f"COMMENT: {comment}")
    lines += [
        f"DIMENSION: {k}",
        "EDGE_WEIGHT_TYPE: EXPLICIT",
        "EDGE_WEIGHT_FORMAT: FULL_MATRIX",
        WEIGHT_SECTION,
    ]
    lines += [" ".join(_format_weight(v) for v in row) for row in instance.matrix]
    lines.append("EOF")
    return "\n".join(lines) + "\n"
