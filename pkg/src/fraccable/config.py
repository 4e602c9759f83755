"""Run configuration for a single solve, read from TOML or JSON.

Example (TOML)::

    [problem]
    case = "Example1_1D_weak"
    gamma = 0.3
    kappa = 0.9

    [mesh]
    n_cells = 5000

    [scheme]
    family = "fbt"
    theta_gamma = 0.0
    theta_kappa = 0.49
    n_steps = 20

    [correction]
    mode = "corrected"      # or "baseline", "off"
    # time = [1.0]          # explicit exponents per operator override mode
    # gamma = [0.3, 0.9]
    # kappa = [0.3, 0.9]

    [output]
    snapshots = [20]
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .exceptions import ParameterError
from .harness import CORRECTION_MODES
from .problems import BenchmarkCase
from .solver import CorrectionSets

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["SolveConfig", "load_config", "parse_config"]

_SECTIONS = {
    "problem": {"case", "gamma", "kappa", "mu"},
    "mesh": {"n_cells"},
    "scheme": {"family", "family_kappa", "theta_gamma", "theta_kappa", "n_steps"},
    "correction": {"mode", "time", "gamma", "kappa"},
    "output": {"snapshots"},
}


@dataclass(frozen=True)
class SolveConfig:
    case: str
    gamma: float
    n_cells: int
    family: str
    n_steps: int
    kappa: Optional[float] = None
    mu: Optional[float] = None
    family_kappa: Optional[str] = None
    theta_gamma: float = 0.0
    theta_kappa: float = 0.0
    correction_mode: str = "corrected"
    correction_sets: Optional[CorrectionSets] = None
    snapshots: tuple = field(default_factory=tuple)

    @property
    def correction(self):
        """Argument for ``SchemeConfig.build``."""
        if self.correction_sets is not None:
            return self.correction_sets
        return CORRECTION_MODES[self.correction_mode]


def _require(section, key, data):
    if key not in data:
        raise ParameterError(f"[{section}] needs '{key}'")
    return data[key]


def parse_config(data: dict) -> SolveConfig:
    """Validate a nested mapping (the parsed file) into a :class:`SolveConfig`."""
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ParameterError(f"unknown config sections: {sorted(unknown)}")
    for name, allowed in _SECTIONS.items():
        extra = set(data.get(name, {})) - allowed
        if extra:
            raise ParameterError(f"unknown keys in [{name}]: {sorted(extra)}")

    prob = data.get("problem", {})
    mesh = data.get("mesh", {})
    scheme = data.get("scheme", {})
    corr = data.get("correction", {})
    out = data.get("output", {})

    case = _require("problem", "case", prob)
    try:
        BenchmarkCase(case)
    except ValueError:
        choices = ", ".join(c.value for c in BenchmarkCase)
        raise ParameterError(f"unknown case {case!r}; choose from {choices}") from None

    mode = corr.get("mode", "corrected")
    if mode not in CORRECTION_MODES:
        raise ParameterError(f"correction mode must be one of {sorted(CORRECTION_MODES)}, got {mode!r}")
    explicit = {k: tuple(corr[k]) for k in ("time", "gamma", "kappa") if k in corr}
    sets = CorrectionSets(**explicit) if explicit else None

    snaps = tuple(int(n) for n in out.get("snapshots", ()))
    n_steps = int(_require("scheme", "n_steps", scheme))
    bad = [n for n in snaps if not 0 <= n <= n_steps]
    if bad:
        raise ParameterError(f"snapshot levels {bad} outside 0..{n_steps}")

    return SolveConfig(
        case=case,
        gamma=float(_require("problem", "gamma", prob)),
        kappa=None if prob.get("kappa") is None else float(prob["kappa"]),
        mu=None if prob.get("mu") is None else float(prob["mu"]),
        n_cells=int(_require("mesh", "n_cells", mesh)),
        family=str(_require("scheme", "family", scheme)),
        family_kappa=scheme.get("family_kappa"),
        theta_gamma=float(scheme.get("theta_gamma", 0.0)),
        theta_kappa=float(scheme.get("theta_kappa", 0.0)),
        n_steps=n_steps,
        correction_mode=mode,
        correction_sets=sets,
        snapshots=snaps,
    )


def load_config(path) -> SolveConfig:
    """Read ``.toml`` or ``.json`` (by suffix) and validate it."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".toml":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    elif suffix == ".json":
        data = json.loads(path.read_text())
    else:
        raise ParameterError(f"config must be .toml or .json, got {path.name}")
    return parse_config(data)
