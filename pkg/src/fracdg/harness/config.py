"""Flat ``key = value`` run configuration.

A config file is a list of ``key = value`` lines (``#`` starts a comment);
there are no sections. Lists are comma separated and ``mu`` may be written
as a fraction, e.g. ``mu = 2/3``. Every key can also be given on the
command line, and flags win over the file.
"""

from __future__ import annotations

import configparser
import dataclasses
from fractions import Fraction
from typing import Any

from .study import StudyConfig

__all__ = ["CONFIG_KEYS", "config_from_mapping", "load_config", "parse_value"]

_SECTION = "study"


def _float(text: str) -> float:
    return float(Fraction(text.strip()))


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def _optional_float(text: str) -> float | None:
    text = text.strip()
    return None if text.lower() in ("", "none", "auto") else _float(text)


def _optional_str(text: str) -> str | None:
    text = text.strip()
    return None if text.lower() in ("", "none") else text


#: key -> (parser, help text)
CONFIG_KEYS: dict[str, tuple] = {
    "problem": (str.strip, "registered problem name"),
    "mu": (_float, "fractional order in (0, 1); fractions like 2/3 allowed"),
    "gamma": (_float, "time-mesh grading exponent for time studies and solve"),
    "n_list": (_int_list, "comma-separated N values for time studies (each doubling)"),
    "m_elements": (int, "number of spatial elements M for time studies and solve"),
    "m_list": (_int_list, "comma-separated M values for space studies (each doubling)"),
    "n_steps": (int, "number of time steps for space studies and solve"),
    "space_gamma": (_optional_float, "grading for space studies; 'auto' means max(1, 2/sigma)"),
    "fine_m": (int, "fine-grid subdivisions per interval for the max norm"),
    "limits": (str.strip, "node convention of the max norm: left or both"),
    "initial": (str.strip, "initial value: ritz, interpolant or l2"),
    "output": (_optional_str, "CSV output path"),
    "reference": (_optional_str, "reference table CSV; 'builtin' for the bundled tables"),
    "error_rel": (_float, "relative error tolerance of comparisons"),
    "rate_abs": (_float, "absolute rate tolerance of comparisons"),
}


def parse_value(key: str, text: str) -> Any:
    try:
        parser = CONFIG_KEYS[key][0]
    except KeyError:
        raise KeyError(f"unknown config key {key!r}; known: {sorted(CONFIG_KEYS)}") from None
    try:
        return parser(text)
    except ValueError as exc:
        raise ValueError(f"bad value for {key}: {text!r} ({exc})") from None


def read_file(path) -> dict[str, str]:
    """Raw ``key -> text`` pairs of a flat config file."""
    with open(path) as fh:
        body = fh.read()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str  # keep key case
    cp.read_string(f"[{_SECTION}]\n{body}")
    return dict(cp[_SECTION])


def config_from_mapping(values: dict[str, Any], base: StudyConfig | None = None) -> StudyConfig:
    """Overlay already-parsed values on ``base`` (defaults if None)."""
    base = StudyConfig() if base is None else base
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise KeyError(f"unknown config keys {sorted(unknown)}")
    return dataclasses.replace(base, **values)


def load_config(path=None, overrides: dict[str, str] | None = None) -> StudyConfig:
    """Defaults, then the file at ``path``, then textual ``overrides``."""
    raw = read_file(path) if path is not None else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping({k: parse_value(k, v) for k, v in raw.items()})
