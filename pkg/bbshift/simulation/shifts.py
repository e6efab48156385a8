"""
BBShift Label-Shift Protocols

Constructors for shifted label marginals:

- knock-out: remove a fraction δ of one class's mass and renormalize
- tweak-one: give one class probability ρ and spread the rest evenly
- Dirichlet: draw the marginal from a symmetric Dirichlet(α)

plus the pairing used by the experiments, which decides whether the source
or the target marginal carries the shift.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import softmax

from bbshift.core.exceptions import ConfigError, InputDomainError, SupportError
from bbshift.core.types import LabelDistribution, LabelSpace
from bbshift.simulation.rng import SeededRng
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)


class ShiftKind(str, Enum):
    """Label-shift simulation protocol."""

    KNOCKOUT = "knockout"
    TWEAK_ONE = "tweak_one"
    DIRICHLET = "dirichlet"


_FIELDS = {
    ShiftKind.KNOCKOUT: {"class_index", "delta"},
    ShiftKind.TWEAK_ONE: {"class_index", "rho"},
    ShiftKind.DIRICHLET: {"alpha"},
}


class ShiftSpec(BaseModel):
    """
    One shift setting. Only the parameters of its kind may be set.

    ``class_index=None`` for knock-out or tweak-one means "every class in
    turn"; the experiment harness expands such a spec with ``for_class``.
    """

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    kind: ShiftKind
    class_index: Optional[int] = Field(default=None, ge=0)
    delta: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    rho: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    alpha: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check_kind_fields(self) -> "ShiftSpec":
        allowed = _FIELDS[self.kind]
        for name in ("class_index", "delta", "rho", "alpha"):
            if name not in allowed and getattr(self, name) is not None:
                raise ValueError(f"{name} is not a parameter of {self.kind.value} shift")
        if self.kind is ShiftKind.KNOCKOUT and self.delta is None:
            raise ValueError("knockout shift needs delta")
        if self.kind is ShiftKind.TWEAK_ONE and self.rho is None:
            raise ValueError("tweak_one shift needs rho")
        if self.kind is ShiftKind.DIRICHLET and self.alpha is None:
            raise ValueError("dirichlet shift needs alpha")
        return self

    def for_class(self, class_index: int) -> "ShiftSpec":
        return self.model_copy(update={"class_index": class_index})

    def label(self) -> str:
        """Short description used in tables and logs."""
        if self.kind is ShiftKind.DIRICHLET:
            return f"dirichlet(alpha={self.alpha:g})"
        if self.kind is ShiftKind.KNOCKOUT:
            return f"knockout(class={self.class_index}, delta={self.delta:g})"
        return f"tweak_one(class={self.class_index}, rho={self.rho:g})"

    def source_target(self, space: LabelSpace, rng: SeededRng) -> Tuple[LabelDistribution, LabelDistribution]:
        """
        Source and target label marginals for this setting.

        Knock-out shrinks one class in the source (training and validation)
        marginal and keeps the target uniform; tweak-one and Dirichlet keep the
        source uniform and shift the target.
        """
        uniform = LabelDistribution.uniform(space)
        if self.kind is ShiftKind.DIRICHLET:
            return uniform, dirichlet_shift(space, self.alpha, rng)
        if self.class_index is None:
            raise ConfigError(f"{self.kind.value} shift needs a concrete class_index here")
        if self.kind is ShiftKind.KNOCKOUT:
            return apply_knockout(uniform, self.class_index, self.delta), uniform
        return uniform, tweak_one(space, self.class_index, self.rho)


def _check_class(class_index: int, k: int) -> int:
    if isinstance(class_index, bool) or int(class_index) != class_index or not 0 <= class_index < k:
        raise InputDomainError(f"Class {class_index!r} outside label space 0..{k - 1}")
    return int(class_index)


def apply_knockout(base: LabelDistribution, class_index: int, delta: float) -> LabelDistribution:
    """Scale one class's mass by (1 − δ) and renormalize."""
    c = _check_class(class_index, base.k)
    if not 0.0 <= delta <= 1.0:
        raise InputDomainError(f"Knock-out fraction must lie in [0, 1], got {delta}")
    if delta == 0.0:
        return base
    probs = base.probs.copy()
    probs[c] *= 1.0 - delta
    if probs.sum() <= 0:
        raise InputDomainError("Knock-out removed all probability mass")
    return LabelDistribution.normalized(probs)


def tweak_one(space: LabelSpace, class_index: int, rho: float) -> LabelDistribution:
    """Class ``class_index`` gets ρ, every other class (1 − ρ)/(k − 1)."""
    c = _check_class(class_index, space.k)
    if not 0.0 <= rho <= 1.0:
        raise InputDomainError(f"Tweak-one mass must lie in [0, 1], got {rho}")
    probs = np.full(space.k, (1.0 - rho) / (space.k - 1))
    probs[c] = rho
    return LabelDistribution.normalized(probs)


def dirichlet_shift(space: LabelSpace, alpha: float, rng: SeededRng) -> LabelDistribution:
    """
    Symmetric Dirichlet(α, ..., α) draw from normalized gamma variates.

    Gamma variates come from numpy's Marsaglia–Tsang sampler. For α < 1 the
    boost G(α) = G(α + 1)·U^(1/α) is applied in log space so that very small
    concentrations (down to 1e-3) do not underflow to an all-zero vector.
    """
    if not alpha > 0:
        raise InputDomainError(f"Dirichlet concentration must be positive, got {alpha}")
    gen = rng.generator()
    if alpha >= 1.0:
        gammas = gen.standard_gamma(alpha, size=space.k)
        return LabelDistribution.normalized(gammas)
    log_gammas = np.log(gen.standard_gamma(alpha + 1.0, size=space.k)) + np.log(gen.random(space.k)) / alpha
    return LabelDistribution.normalized(softmax(log_gammas))


def true_weights(p: LabelDistribution, q: LabelDistribution) -> np.ndarray:
    """
    Exact importance weights w = q/p for known marginals.

    Classes absent from both marginals get weight 0. Checks Σ p·w = 1.
    """
    if p.k != q.k:
        raise InputDomainError(f"Marginals over different label spaces: {p.k} vs {q.k}")
    missing = (p.probs == 0) & (q.probs > 0)
    if missing.any():
        raise SupportError(f"Target puts mass on classes absent from the source: {np.flatnonzero(missing).tolist()}")
    w = np.divide(q.probs, p.probs, out=np.zeros(p.k), where=p.probs > 0)
    total = float(p.probs @ w)
    if abs(total - 1.0) > 1e-12:
        raise InputDomainError(f"True weights violate sum p*w = 1 (got {total!r})")
    return w
