"""Shared configuration dataclasses and default budgets."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class EnumerationCaps:
    """Size caps for exhaustive enumeration.

    Labelled enumeration grows like the distinct-multigraph count of the
    pairing model (~1e6 at n=8); unlabelled class counts stay small for
    longer, so unlabelled enumeration is allowed up to n=10 (served by
    Whitehead-move closure above the labelled cap).
    """

    labelled_max: int = 8
    unlabelled_max: int = 10

    def check(self, n: int, mode: str) -> None:
        cap = self.labelled_max if mode == "labelled" else self.unlabelled_max
        if n > cap:
            raise CapExceededError(f"n={n} exceeds {mode} cap {cap}")


@dataclass(frozen=True)
class SolverConfig:
    """Eigensolver tolerances and size budgets."""

    tol: float = 1e-10
    max_sweeps: int = 100
    dense_budget: int = 4000       # hard cap for dense storage
    dense_fast_cap: int = 1200     # above this, prefer the iterative bottom-k path
    iterative_budget: int = 20000  # hard cap for the approximate bottom-k solver


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment invocation: which table, at which sizes, with what seed."""

    experiment: str
    n_values: tuple[int, ...]
    mode: str = "unlabelled"
    k: int = 2
    trials: int = 50
    seed: int = 0
    out: str | None = None
    fmt: str = "json"
    caps: EnumerationCaps = field(default_factory=EnumerationCaps)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")
        for n in self.n_values:
            self.caps.check(n, self.mode)


class CapExceededError(Exception):
    """Requested size is beyond the configured enumeration cap."""


EXACT_CONDUCTANCE_CAP = 20  # exhaustive subset scans up to this many vertices
