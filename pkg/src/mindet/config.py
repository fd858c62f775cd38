"""Run configuration shared by the CLI subcommands.

A configuration is one JSON object whose keys are the fields of
:class:`RunConfig`; every key is optional. Validation happens before any
numerics so that bad parameters fail fast with a usage error.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .moments import Tolerances
from .operators import CONTINUOUS_OPERATORS, Operator, operator_from_name
from .seedfn import SeedFunction, SuperposedState, make_bump, shift_scale, superpose

DEFAULT_BETAS = (0.0, math.pi / 2, math.pi)


@dataclass
class RunConfig:
    # seeds: part1 is a bump on [offset, offset + width], part2 = shift_scale(part1, alpha, shift)
    k: int = 1
    width: float = 1.0
    shift: float = 3.0
    alpha: float = 1.0
    offset: float = 0.0
    # drop part2 entirely (fixture whose densities cannot depend on beta)
    single_lobe: bool = False

    operators: list = field(default_factory=lambda: list(CONTINUOUS_OPERATORS))
    c_ppm: float = 1.0
    c_force: float = 1.0
    betas: list = field(default_factory=lambda: list(DEFAULT_BETAS))
    # optional per-operator grid overrides: {"scale": {"r_min": .., "r_max": .., "n_points": ..}}
    grids: dict = field(default_factory=dict)

    n_max: int = 6
    n_max_r: int = 4
    tail_budget: float = 1e-5
    tol_moments: float = 1e-8
    tol_cross: float = 1e-12
    tol_density: float = 0.05
    tol_mass: float = 1e-6

    discrete_n_max: int = 256
    truncation_budget: float = 1e-8
    tol_discrete_spread: float = 1e-6
    tol_pmf_difference: float = 1e-3

    epsilons: list = field(default_factory=lambda: [-1.0, -0.5, 0.0, 0.5, 1.0])
    ks: list = field(default_factory=lambda: [1, 2])
    reference_n_max: int = 4
    tol_reference: float = 1e-6

    out: str = "out"
    format: str = "csv"

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(obj) - names)
        if unknown:
            raise ValidationError(f"unknown configuration keys: {', '.join(unknown)}")
        cfg = cls(**obj)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read configuration {path}: {exc}") from exc
        if not isinstance(obj, dict):
            raise ValidationError("configuration must be a JSON object")
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (output location excluded)."""
        obj = {k: v for k, v in self.to_dict().items() if k not in ("out", "format")}
        blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def validate(self) -> None:
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k!r}")
        for name in ("width", "alpha"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.shift > self.width:
            raise ValidationError(f"shift D must exceed the support width a (D > a), got D={self.shift}, a={self.width}")
        lo2 = self.shift + self.offset / self.alpha
        if lo2 < self.offset + self.width:
            raise ValidationError(
                f"shifted support starts at {lo2:g}, inside the first support "
                f"[{self.offset:g}, {self.offset + self.width:g}]"
            )
        if self.format not in ("csv", "json", "both"):
            raise ValidationError(f"format must be csv, json or both, got {self.format!r}")
        self.betas = [float(b) for b in self.betas]
        if not self.betas:
            raise ValidationError("at least one beta is required")
        self.operators = [operator_from_name(n).name for n in self.operators]
        for n in self.operators:
            if n not in CONTINUOUS_OPERATORS:
                raise ValidationError(f"operator {n!r} is not a continuous-spectrum operator")
        if "scale" in self.operators:
            for lo, hi in self.supports():
                if lo < 0:
                    raise ValidationError(
                        f"scale operator needs supports in x >= 0; [{lo:g}, {hi:g}] reaches below 0"
                    )
        for name in ("n_max", "n_max_r", "discrete_n_max", "reference_n_max"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise ValidationError(f"{name} must be a nonnegative integer, got {v!r}")
        for eps in self.epsilons:
            if not abs(float(eps)) <= 1:
                raise ValidationError(f"Heyde epsilon must lie in [-1, 1], got {eps}")
        for k in self.ks:
            if isinstance(k, bool) or int(k) != k or k < 1:
                raise ValidationError(f"Heyde k must be a positive integer, got {k!r}")
        for name, g in self.grids.items():
            if operator_from_name(name).name not in CONTINUOUS_OPERATORS or set(g) != {"r_min", "r_max", "n_points"}:
                raise ValidationError(f"bad grid override for {name!r}: {g}")

    def supports(self) -> list[tuple[float, float]]:
        lo1, hi1 = self.offset, self.offset + self.width
        return [(lo1, hi1), (self.shift + lo1 / self.alpha, self.shift + hi1 / self.alpha)]

    def seeds(self) -> tuple[SeedFunction, SeedFunction]:
        psi1 = make_bump(self.k, (self.offset, self.offset + self.width))
        return psi1, shift_scale(psi1, self.alpha, self.shift)

    def state(self, beta: float) -> SuperposedState:
        psi1, psi2 = self.seeds()
        if self.single_lobe:
            # sqrt(2) keeps the state at unit norm with the second part switched off
            return SuperposedState(psi1.scaled(math.sqrt(2.0)), psi2.scaled(0.0), float(beta))
        return superpose(psi1, psi2, beta)

    def operator(self, name: str) -> Operator:
        if name == "position_plus_momentum":
            return operator_from_name(name, c=self.c_ppm)
        if name == "constant_force":
            return operator_from_name(name, c=self.c_force)
        return operator_from_name(name)

    def grid(self, op: Operator):
        from .xform import RGrid, default_grid

        g = self.grids.get(op.name)
        return RGrid(**g) if g else default_grid(op)

    def tolerances(self) -> Tolerances:
        return Tolerances(self.tol_moments, self.tol_cross, self.tol_density)
