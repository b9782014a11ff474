"""Objective functions z1..z5 on top of the base cost z0."""
from __future__ import annotations

from dataclasses import dataclass

from .model import LoadReport

KINDS = ("z1", "z2", "z3", "z4", "z5")


@dataclass(frozen=True)
class ObjectiveSpec:
    kind: str = "z5"
    alpha: float = 1.0
    beta: float = 2.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"objective must be one of {KINDS}, got {self.kind!r}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.beta < 2:
            raise ValueError(f"beta must be >= 2, got {self.beta}")

    @property
    def code(self) -> int:
        """1..5, the integer tag the scan kernels switch on."""
        return KINDS.index(self.kind) + 1


@dataclass(frozen=True)
class EvalContext:
    current_feasible: bool = True
    created_ring: int | None = None
    new_ring_load: int = 0


def objective_value(code: int, z0: int, bn: int, violation: int, feasible: bool,
                    current_feasible: bool, created_load: int, capacity: int,
                    alpha: float, beta: float) -> float:
    """Scalar core shared with the scan kernels; ``created_load < 0`` means no new ring.

    The compiled kernel mirrors these expressions operation for operation so
    both produce bit-identical doubles.
    """
    if code == 1 or code == 2:
        z1 = z0 + (bn - capacity if bn > capacity else 0)
        if code == 2 and created_load >= 0:
            return float(z1) + alpha * float(created_load)
        return float(z1)
    if code == 3:
        return float(z0 * capacity + bn)
    if code == 4:
        if current_feasible:
            return float(z0 * capacity + bn) if feasible else float((z0 + 1) * bn)
        return float(z0 * capacity) if feasible else beta * float(z0) * float(bn)
    return float(z0 + violation)


def evaluate(spec: ObjectiveSpec, z0: int, report: LoadReport, ctx: EvalContext,
             capacity: int) -> float:
    created = ctx.new_ring_load if ctx.created_ring is not None else -1
    return objective_value(spec.code, z0, report.bn, report.total_violation, report.feasible,
                           ctx.current_feasible, created, capacity, spec.alpha, spec.beta)


def is_improvement(spec: ObjectiveSpec, candidate_value: float, incumbent_value: float) -> bool:
    return candidate_value < incumbent_value
