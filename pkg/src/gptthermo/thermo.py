"""Ledger simulator for the box-gas thought experiments and the Stirling check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .decomposition import ClassicalDecomposition, classical_decomposition
from .entropy import orthogonal_mixture_relation, shannon, spectral_entropy
from .errors import DomainError
from .models import StateSpaceModel, StateVector
from .second_law import SecondLawReport, mixing_concavity_check


@dataclass(frozen=True)
class GasConfig:
    N: float = 1.0
    V: float = 1.0
    T: float = 1.0
    k_B: float = 1.0

    def __post_init__(self) -> None:
        if not self.N >= 1:
            raise DomainError("N must be at least 1")
        if not (self.V > 0 and self.T > 0 and self.k_B > 0):
            raise DomainError("V, T and k_B must be positive")


@dataclass(frozen=True)
class LedgerStep:
    label: str
    species: int | None
    work_on_gas: float = 0.0
    heat_to_reservoir: float = 0.0
    entropy_change_gas: float = 0.0
    entropy_change_reservoir: float = 0.0
    volume_after: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class ThermoLedger:
    steps: tuple
    final_S_GPT: float
    weights: tuple = field(default_factory=tuple)
    config: GasConfig = field(default_factory=GasConfig)

    def gas_entropy_change(self) -> float:
        return float(sum(s.entropy_change_gas for s in self.steps))

    def total_entropy_change(self) -> float:
        return float(sum(s.entropy_change_gas + s.entropy_change_reservoir for s in self.steps))

    def to_dict(self) -> dict:
        return {
            "config": self.config.__dict__.copy(),
            "weights": list(self.weights),
            "steps": [s.to_dict() for s in self.steps],
            "final_S_GPT": self.final_S_GPT,
        }


def _check_fractions(fractions: Sequence[float]) -> np.ndarray:
    p = np.asarray(fractions, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError("fractions must be a probability vector")
    return np.clip(p, 0.0, None)


def isothermal_compression_work(cfg: GasConfig, fractions: Sequence[float]) -> float:
    """Work ``-N k_B T sum_j p_j ln p_j`` to compress every species to its partial volume."""
    return cfg.N * cfg.k_B * cfg.T * shannon(_check_fractions(fractions))


def _compress_step(cfg: GasConfig, j: int, p: float) -> LedgerStep:
    work = -cfg.N * cfg.k_B * cfg.T * p * math.log(p)
    return LedgerStep(
        "compress",
        j,
        work_on_gas=work,
        heat_to_reservoir=work,
        entropy_change_gas=-work / cfg.T,
        entropy_change_reservoir=work / cfg.T,
        volume_after=p * cfg.V,
    )


def run_von_neumann_protocol(
    model: StateSpaceModel,
    w: StateVector,
    cfg: GasConfig,
    decomposition: ClassicalDecomposition | None = None,
) -> ThermoLedger:
    """Separate the species of a classical decomposition, compress each isothermally, convert and merge.

    Models without a self-dualizing inner product need an explicit
    ``decomposition``: their entropy depends on that choice.
    """
    if decomposition is None:
        if not model.has_self_dual_inner_product:
            raise DomainError(
                f"no unique classical decomposition on {model}; pass one explicitly"
            )
        decomposition = classical_decomposition(model, w)
    elif decomposition.residual(w) > 1e-9:
        raise DomainError("decomposition does not reproduce the state")
    p = decomposition.weights
    species = [j for j in range(p.size) if p[j] > 0]
    steps: list[LedgerStep] = []
    steps += [LedgerStep("separate", j, volume_after=cfg.V) for j in species]
    steps += [_compress_step(cfg, j, float(p[j])) for j in species]
    steps += [LedgerStep("convert", j) for j in species]
    steps.append(LedgerStep("merge", None, volume_after=cfg.V))
    final = -float(sum(s.entropy_change_gas for s in steps)) + 0.0
    return ThermoLedger(tuple(steps), final, tuple(float(x) for x in p), cfg)


class PetzResult(NamedTuple):
    ledger: ThermoLedger
    relation_lhs: float
    relation_rhs: float
    passed: bool


def run_petz_protocol(
    model: StateSpaceModel,
    weights: Sequence[float],
    components: Sequence[StateVector],
    cfg: GasConfig,
) -> PetzResult:
    """Mixture of distinguishable, possibly mixed, components.

    Each component species is compressed to ``lambda_j V`` and then reduced to
    the reference species by its own reversible protocol, costing
    ``N lambda_j k_B T S(w_j)`` of heat.  The relation compares ``S(w)`` with
    ``sum_j lambda_j S(w_j) + H(lambda)`` (per particle, times ``k_B``).
    """
    lam = _check_fractions(weights)
    lhs, rhs, passed = orthogonal_mixture_relation(model, lam, components)
    steps: list[LedgerStep] = []
    live = [j for j in range(lam.size) if lam[j] > 0]
    steps += [LedgerStep("separate", j, volume_after=cfg.V) for j in live]
    steps += [_compress_step(cfg, j, float(lam[j])) for j in live]
    for j in live:
        s_j = spectral_entropy(model, components[j]).value
        heat = cfg.N * cfg.k_B * cfg.T * lam[j] * s_j
        steps.append(
            LedgerStep(
                "convert",
                j,
                work_on_gas=heat,
                heat_to_reservoir=heat,
                entropy_change_gas=-heat / cfg.T,
                entropy_change_reservoir=heat / cfg.T,
            )
        )
    steps.append(LedgerStep("merge", None, volume_after=cfg.V))
    final = -float(sum(s.entropy_change_gas for s in steps)) + 0.0
    ledger = ThermoLedger(tuple(steps), final, tuple(float(x) for x in lam), cfg)
    return PetzResult(ledger, cfg.k_B * lhs, cfg.k_B * rhs, passed)


class StirlingResult(NamedTuple):
    exact_log_multinomial: float
    stirling_value: float
    mixture_formula_value: float

    @property
    def relative_error(self) -> float:
        if self.mixture_formula_value == 0:
            return 0.0 if self.exact_log_multinomial == 0 else math.inf
        return abs(self.exact_log_multinomial - self.mixture_formula_value) / self.mixture_formula_value


def _xlogx(n: float) -> float:
    return n * math.log(n) if n > 0 else 0.0


def stirling_multiplicity_entropy(counts: Sequence[int]) -> StirlingResult:
    """``ln(N! / prod N_j!)`` exactly, with ``ln n! ~ n ln n - n``, and as ``-N sum p ln p``."""
    c = [int(x) for x in counts]
    if any(x < 0 for x in c) or sum(c) < 1:
        raise DomainError("counts must be nonnegative with a positive total")
    n = sum(c)
    exact = math.lgamma(n + 1) - sum(math.lgamma(x + 1) for x in c)
    stirling = (_xlogx(n) - n) - sum(_xlogx(x) - x for x in c)
    mixture = n * shannon([x / n for x in c])
    return StirlingResult(exact + 0.0, stirling + 0.0, mixture + 0.0)


def counts_for(p: Sequence[float], n: int) -> list[int]:
    """Largest-remainder rounding of ``n * p`` to integers summing to ``n``."""
    p = _check_fractions(p)
    raw = p * n
    base = np.floor(raw).astype(int)
    order = np.argsort(-(raw - base), kind="stable")
    for i in order[: n - int(base.sum())]:
        base[i] += 1
    return [int(x) for x in base]


def stirling_sweep(p: Sequence[float], ns: Sequence[int] = (10, 100, 1000, 10000)) -> list[dict]:
    rows = []
    for n in ns:
        res = stirling_multiplicity_entropy(counts_for(p, n))
        rows.append(
            {
                "N": n,
                "exact": res.exact_log_multinomial,
                "stirling": res.stirling_value,
                "mixture": res.mixture_formula_value,
                "relative_error": res.relative_error,
            }
        )
    return rows


def mixing_protocol(
    model: StateSpaceModel, components: Sequence[StateVector], weights: Sequence[float], cfg: GasConfig
) -> SecondLawReport:
    """Irreversible mixing of tanks at equal density; entropies in units of ``N k_B``."""
    rep = mixing_concavity_check(model, components, weights)
    scale = cfg.N * cfg.k_B
    return SecondLawReport.from_values(
        scale * rep.s_before, scale * rep.s_after, "tanks merged at equal density"
    )
