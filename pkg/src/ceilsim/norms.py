"""Per-level bias strengths from organizational (meso) and societal (macro) norms.

The variance-explained at level i is a weighted average of a macro norm and a
meso norm that scales with how male-dominated the level above is relative to
the societal expectation. It is zero when the level above is at parity, equals
the macro norm when the level above matches the expectation, and goes negative
(reverse discrimination) when women dominate above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .core import Company

# Defensive clamp keeping d finite for extreme configurations; unreachable
# under the documented parameter ranges.
R2_CLAMP = 0.99


@dataclass(frozen=True)
class NormsParams:
    """Hierarchical-norms parameters; ``enabled`` selects the per-level regime.

    With ``enabled`` False the constant r2 / r2_group from BiasParams apply at
    every level. w0 is the meso weight used before an intervention begins, w
    the weight from the intervention start onward (and always, when no
    intervention window is configured).
    """

    enabled: bool = False
    b_macro: float = 0.01
    b_macro_group: float = 0.01
    p_m: float = 0.7
    w: float = 0.0
    w0: float = 0.0


@dataclass(frozen=True, slots=True)
class LevelNorms:
    """Effective variance-explained per level (index 0 = level 1)."""

    r2: tuple[float, ...]
    r2_group: tuple[float, ...]


def meso_norm(p_next: float, p_m: float, b_macro: float) -> float:
    """Organization-driven norm for a level, from the male share above it."""
    return (p_next - 0.5) / (p_m - 0.5) * b_macro


def effective_r2(w: float, b_meso: float, b_macro: float) -> float:
    """Weighted average of meso and macro norms, defensively clamped."""
    value = w * b_meso + (1.0 - w) * b_macro
    return max(-R2_CLAMP, min(R2_CLAMP, value))


def compute_level_norms(company: "Company", params: NormsParams, w_current: float) -> LevelNorms:
    """Evaluate the norms model against the company's current composition.

    Levels 1..7 use the male share of the level above; the top level mirrors
    society directly (its r2 equals the macro norm exactly, for any weight).
    """
    r2 = []
    r2_group = []
    n = len(company.levels)
    for i in range(n - 1):
        p_next = company.levels[i + 1].male_share()
        r2.append(
            effective_r2(w_current, meso_norm(p_next, params.p_m, params.b_macro), params.b_macro)
        )
        r2_group.append(
            effective_r2(
                w_current,
                meso_norm(p_next, params.p_m, params.b_macro_group),
                params.b_macro_group,
            )
        )
    # Top level: set exactly (not via the weighted sum) so r2_8 == b_macro
    # holds bit-for-bit regardless of w.
    r2.append(max(-R2_CLAMP, min(R2_CLAMP, params.b_macro)))
    r2_group.append(max(-R2_CLAMP, min(R2_CLAMP, params.b_macro_group)))
    return LevelNorms(r2=tuple(r2), r2_group=tuple(r2_group))


def constant_level_norms(r2: float, r2_group: float, n_levels: int) -> LevelNorms:
    """Level-independent strengths (the norms-disabled regime)."""
    return LevelNorms(r2=(r2,) * n_levels, r2_group=(r2_group,) * n_levels)
