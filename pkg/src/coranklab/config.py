"""Experiment configuration: one JSON file, flat key-value schema.

Command-line flags override config values key by key.  Probabilities
and epsilons are parsed to exact rationals: "1/2" and "0.25" (or the
JSON number 0.25) both become Fractions, so config and flag spellings
of the same value produce identical results.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import InputError


class ExperimentConfig(BaseModel):
    """Schema of the --config file; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    experiment: Optional[str] = None  # enumerate | mc | bounds | fixedvec
    n: Optional[Union[int, List[int]]] = None
    k: Optional[int] = None
    p: Optional[Union[str, float, int]] = None
    epsilon: Optional[Union[str, float, int]] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    c: Optional[float] = None
    C: Optional[float] = None
    L: Optional[Union[str, float, int]] = None
    r: Optional[Union[str, float, int]] = None
    delta: Optional[float] = None
    rho: Optional[float] = None
    mode: Optional[str] = None
    prime: Optional[int] = None
    weights: Optional[List[float]] = None
    matrix: Optional[str] = None  # path to a matrix text file
    vector: Optional[List[float]] = None
    basis: Optional[int] = None  # fixedvec: V = e_basis
    verify: Optional[bool] = None
    out: Optional[str] = None


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: {exc}") from exc
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(x) for x in first["loc"]) or "<root>"
        raise InputError(f"bad config key {key!r}: {first['msg']}") from exc


def parse_probability(value) -> Fraction:
    """Exact rational from "a/b", decimal strings, or JSON numbers."""
    if value is None:
        raise InputError("missing probability")
    try:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse probability {value!r}") from exc


def parse_real(value) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(Fraction(str(value).strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number {value!r}") from exc


__all__ = ["ExperimentConfig", "load_config", "parse_probability", "parse_real"]
