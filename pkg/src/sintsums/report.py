"""Main term of the asymptotic formula, census comparison over a q ladder, and
the log-log growth fit."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .census import CensusResult, ExponentBox, run_census
from .ideals import enumerate_ideal_inventory
from .qfield import FieldError, make_field, make_place_set
from .sunits import s_unit_basis
from .volume import DEFAULT_CAP, build_halfspaces, c_constant, mc_volume

__all__ = [
    "ConfigError",
    "RunConfig",
    "ComparisonRow",
    "main_term",
    "error_budget",
    "compare",
    "exponent_fit",
    "verify",
    "rows_to_csv",
]

CSV_HEADER = ["q", "u", "main_term", "ratio", "error_budget", "saturated"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    d: object
    n: int
    m: int
    q_ladder: list[int]
    s_primes: list[int] = field(default_factory=list)
    box: int = 2
    box_cap: int = 256
    mc_samples: int = 0
    seed: int = 0
    volume_cap: int = DEFAULT_CAP
    csv_path: str | None = None
    json_path: str | None = None
    proper_subsums_only: bool = False
    allow_unsaturated: bool = False

    def __post_init__(self):
        for name in ("n", "m", "box", "box_cap", "mc_samples", "seed", "volume_cap"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{name} must be an integer")
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be at least 1")
        if self.box < 0 or self.box_cap < 1:
            raise ConfigError("box must be >= 0 and box_cap >= 1")
        q = list(self.q_ladder)
        if any(not isinstance(x, int) or isinstance(x, bool) or x < 1 for x in q):
            raise ConfigError("q ladder entries must be positive integers")
        if any(b <= a for a, b in zip(q, q[1:])):
            raise ConfigError("q ladder must be strictly increasing")
        self.q_ladder = q
        self.s_primes = [int(p) for p in self.s_primes]

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class ComparisonRow:
    q: int
    u: int
    main_term: float
    ratio: float
    error_budget: float
    saturated: bool


def main_term(
    inventory_size: int,
    n: int,
    s: int,
    c_volume: Fraction,
    omega: int,
    regulator: float,
    q: int,
) -> float:
    """|I(m)|^n * c_{n-1,s} / n! * (omega * (log q)^s / Reg)^(n-1), natural log.

    ``c_volume`` must already be c_{n-1,s}.
    """
    if q < 3:
        raise ValueError("main term needs q >= 3")
    if inventory_size < 1 or n < 1:
        raise ValueError("inventory size and n must be positive")
    growth = omega * math.log(q) ** s / float(regulator)
    return inventory_size**n * float(c_volume) / math.factorial(n) * growth ** (n - 1)


def error_budget(n: int, s: int, q: int) -> float:
    return math.log(q) ** ((n - 1) * s - 1)


def rows_to_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.q, r.u, repr(r.main_term), repr(r.ratio), repr(r.error_budget), str(r.saturated).lower()])
    return buf.getvalue()


def _setup(config: RunConfig):
    try:
        K = make_field(config.d)
        S = make_place_set(K, config.s_primes)
    except FieldError as exc:
        raise ConfigError(str(exc)) from None
    if S.s < 1:
        raise ConfigError("asymptotic verification needs s >= 1 (a real field or finite places in S)")
    group = s_unit_basis(K, S)
    inventory = enumerate_ideal_inventory(K, S, group, config.m)
    return K, S, group, inventory


def compare(config: RunConfig, details: list | None = None) -> list[ComparisonRow]:
    """One row per q with the census count u against the main term.

    ``details`` collects the full CensusResult per q when given.
    """
    if not config.q_ladder:
        return []
    K, S, group, inventory = _setup(config)
    n, s = config.n, S.s
    c = c_constant(n - 1, s, config.volume_cap)
    rows = []
    for q in config.q_ladder:
        res: CensusResult = run_census(
            inventory, n, q, ExponentBox.uniform(s, config.box), config.box_cap,
            config.proper_subsums_only,
        )
        if details is not None:
            details.append(res)
        mt = main_term(len(inventory), n, s, c, group.omega, float(group.regulator), q)
        rows.append(ComparisonRow(q, res.u, mt, res.u / mt, error_budget(n, s, q), res.saturated))
    return rows


def exponent_fit(rows: Sequence[ComparisonRow]) -> tuple[float, float]:
    """Least-squares slope of log u against log log q, and its R^2."""
    usable = [r for r in rows if r.saturated and r.u >= 1 and r.q >= 3]
    if len(usable) < 4:
        raise ValueError(f"exponent fit needs at least 4 usable rows, got {len(usable)}")
    x = np.log(np.log(np.array([r.q for r in usable], dtype=float)))
    y = np.log(np.array([r.u for r in usable], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), r2


def verify(config: RunConfig) -> tuple[int, str, str]:
    """Run the comparison; return (exit code, csv text, json text).

    Exit code 0 on success, 3 when some census did not saturate and
    ``allow_unsaturated`` is off.  Config problems raise ConfigError.
    """
    details: list[CensusResult] = []
    rows = compare(config, details)
    K, S, group, inventory = _setup(config)
    c = c_constant(config.n - 1, S.s, config.volume_cap)
    summary = {
        "config": asdict(config),
        "field": str(K),
        "s": S.s,
        "omega": group.omega,
        "regulator": float(group.regulator),
        "inventory_size": len(inventory),
        "c_volume": f"{c.numerator}/{c.denominator}",
        "rows": [asdict(r) for r in rows],
        "census": [d.to_dict() for d in details],
        "predicted_slope": (config.n - 1) * S.s,
    }
    try:
        slope, r2 = exponent_fit(rows)
        summary["fit"] = {"slope": slope, "r_squared": r2}
    except ValueError as exc:
        summary["fit"] = {"slope": None, "r_squared": None, "reason": str(exc)}
    if config.mc_samples and config.n > 1:
        est, err = mc_volume(build_halfspaces(config.n - 1, S.s), config.mc_samples, config.seed)
        summary["c_volume_mc"] = {"estimate": est, "stderr": err}
    unsaturated = [r.q for r in rows if not r.saturated]
    summary["unsaturated_q"] = unsaturated
    code = 3 if unsaturated and not config.allow_unsaturated else 0
    return code, rows_to_csv(rows), json.dumps(summary, indent=2, sort_keys=True) + "\n"
