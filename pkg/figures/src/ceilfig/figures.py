"""The four figure analogs: faceted line charts with CI bands, plus the
success-differential bar chart.

Every drawn point is a value parsed verbatim from the aggregate CSVs; there
is no smoothing, interpolation, or derived statistics here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ceilfig"

import matplotlib.pyplot as plt
import numpy as np

from .loader import Condition, SchemaError, by_scenario, discover, read_rows, series

FIGURE_IDS = ("fig1a", "fig1b", "fig2", "fig3", "fig4")

# Canonical panel order: unbiased on the left, each mechanism individually,
# everything combined on the right.
BIAS_CONDITIONS = (
    "no-biases",
    "reward-individual-success",
    "penalty-individual-failure",
    "reward-mixed-group-success",
    "penalty-mixed-group-failure",
    "penalty-non-altruism",
    "penalty-stretch-project",
    "all-biases",
)

LEVEL_COLORS = {lvl: plt.get_cmap("tab10")(lvl - 1) for lvl in range(1, 9)}
MACRO_WEIGHT_LABELS = {0.4: "Moderate Macro Norms", 0.7: "Low Macro Norms",
                       1.0: "No Macro Norms"}


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    input_dir: Path
    output: Path | None = None


def _level_lines(ax, rows, scenario_id: str) -> None:
    for lvl in range(1, 9):
        cycles, means, low, high = series(rows, scenario_id=scenario_id,
                                          level=str(lvl), metric="pct_male")
        if not cycles:
            continue
        color = LEVEL_COLORS[lvl]
        ax.plot(cycles, means, color=color, linewidth=1.2, label=f"L{lvl}")
        ax.fill_between(cycles, low, high, color=color, alpha=0.2, linewidth=0)
    ax.set_ylim(0, 1)
    ax.axhline(0.5, color="gray", linewidth=0.6, linestyle=":")


def _facet_grid(n_panels: int, ncols: int = 4):
    nrows = (n_panels + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.8 * nrows),
                             squeeze=False, sharey=True)
    return fig, axes.ravel()


def _require_conditions(conditions: dict[str, Condition], names) -> None:
    missing = [n for n in names if n not in conditions]
    if missing:
        raise SchemaError(
            f"missing condition directories for: {', '.join(missing)} "
            f"(found: {', '.join(sorted(conditions)) or 'none'})"
        )


def render_fig1a(input_dir: Path):
    """Male share per level and cycle, one panel per bias condition."""
    conditions = by_scenario(discover(input_dir))
    _require_conditions(conditions, BIAS_CONDITIONS)
    fig, axes = _facet_grid(len(BIAS_CONDITIONS))
    for ax, name in zip(axes, BIAS_CONDITIONS):
        rows = read_rows(conditions[name].path / "aggregate_composition.csv")
        _level_lines(ax, rows, name)
        ax.set_title(name, fontsize=8)
        ax.set_xlabel("promotion cycle", fontsize=7)
    axes[0].set_ylabel("share of men", fontsize=7)
    axes[0].legend(fontsize=5, ncol=2)
    fig.suptitle("Male share by level across promotion cycles", fontsize=10)
    fig.tight_layout()
    return fig


def render_fig1b(input_dir: Path):
    """Cumulative bias events per woman (all mechanisms), faceted as fig1a."""
    conditions = by_scenario(discover(input_dir))
    _require_conditions(conditions, BIAS_CONDITIONS)
    fig, axes = _facet_grid(len(BIAS_CONDITIONS))
    for ax, name in zip(axes, BIAS_CONDITIONS):
        rows = read_rows(conditions[name].path / "aggregate_bias_counts.csv")
        for lvl in range(1, 9):
            cycles, means, low, high = series(
                rows, scenario_id=name, level=str(lvl),
                metric="mean_count_per_woman", mechanism="total",
            )
            if not cycles:
                continue
            color = LEVEL_COLORS[lvl]
            ax.plot(cycles, means, color=color, linewidth=1.2, label=f"L{lvl}")
            ax.fill_between(cycles, low, high, color=color, alpha=0.2, linewidth=0)
        ax.set_title(name, fontsize=8)
        ax.set_xlabel("promotion cycle", fontsize=7)
    axes[0].set_ylabel("bias events per woman", fontsize=7)
    axes[0].legend(fontsize=5, ncol=2)
    fig.suptitle("Cumulative bias events encountered by women", fontsize=10)
    fig.tight_layout()
    return fig


def render_fig2(input_dir: Path):
    """Net successes (successes - failures) by gender and level, final cycle."""
    conditions = by_scenario(discover(input_dir))
    names = [n for n in BIAS_CONDITIONS if n in conditions]
    if not names:
        names = sorted(conditions)
    fig, axes = _facet_grid(len(names), ncols=min(4, len(names)))
    width = 0.38
    for ax, name in zip(axes, names):
        rows = read_rows(conditions[name].path / "aggregate_performance.csv")
        final = max(int(r["cycle"]) for r in rows)
        for offset, gender, color in ((-width / 2, "man", "tab:cyan"),
                                      (width / 2, "woman", "tab:red")):
            levels, means, errs = [], [], []
            for r in rows:
                if (int(r["cycle"]) == final and r["gender"] == gender
                        and r["metric"] == "mean_net_success" and r["mean"] != ""):
                    levels.append(int(r["level"]))
                    means.append(float(r["mean"]))
                    errs.append((float(r["mean"]) - float(r["ci_low"]),
                                 float(r["ci_high"]) - float(r["mean"])))
            order = np.argsort(levels)
            x = np.asarray(levels)[order] + offset
            y = np.asarray(means)[order]
            yerr = np.asarray(errs)[order].T
            ax.bar(x, y, width=width, color=color, label=gender, yerr=yerr,
                   error_kw={"linewidth": 0.7})
        ax.set_title(name, fontsize=8)
        ax.set_xlabel("level", fontsize=7)
        ax.set_xticks(range(1, 9))
    axes[0].set_ylabel("net successes", fontsize=7)
    axes[0].legend(fontsize=6)
    for ax in axes[len(names):]:
        ax.set_visible(False)
    fig.suptitle("Success-failure differential by gender (final cycle)", fontsize=10)
    fig.tight_layout()
    return fig


def render_fig3(input_dir: Path):
    """Male share trajectories, one panel per meso-norm weight (sweep cells)."""
    cells = [c for c in discover(input_dir) if c.norms_enabled and c.quota == 0]
    if not cells:
        raise SchemaError(f"no norms-sweep cells (norms enabled, no quota) in {input_dir}")
    cells.sort(key=lambda c: c.w)
    fig, axes = _facet_grid(len(cells), ncols=min(3, len(cells)))
    for ax, cell in zip(axes, cells):
        rows = read_rows(cell.path / "aggregate_composition.csv")
        _level_lines(ax, rows, cell.scenario_id)
        ax.set_title(f"w = {cell.w:g}", fontsize=8)
        ax.set_xlabel("promotion cycle", fontsize=7)
    axes[0].set_ylabel("share of men", fontsize=7)
    axes[0].legend(fontsize=5, ncol=2)
    for ax in axes[len(cells):]:
        ax.set_visible(False)
    fig.suptitle("Meso- vs macro-norm weighting in an 80% female company", fontsize=10)
    fig.tight_layout()
    return fig


def render_fig4(input_dir: Path):
    """Quota intervention grid: rows = window length, columns = meso weight."""
    cells = [c for c in discover(input_dir) if c.quota > 0]
    if not cells:
        raise SchemaError(f"no intervention cells (quota > 0) in {input_dir}")
    durations = sorted({c.window for c in cells}, key=lambda win: win[1] - win[0])
    weights = sorted({c.w for c in cells})
    grid = {(c.window, c.w): c for c in cells}
    fig, axes = plt.subplots(len(durations), len(weights),
                             figsize=(3.4 * len(weights), 2.8 * len(durations)),
                             squeeze=False, sharey=True)
    for i, window in enumerate(durations):
        for j, w in enumerate(weights):
            ax = axes[i][j]
            cell = grid.get((window, w))
            if cell is None:
                ax.set_visible(False)
                continue
            rows = read_rows(cell.path / "aggregate_composition.csv")
            _level_lines(ax, rows, cell.scenario_id)
            cycles = (window[1] - window[0]) // cell.n_promotion
            col_label = MACRO_WEIGHT_LABELS.get(w, f"w = {w:g}")
            ax.set_title(f"{col_label}, {cycles} cycles", fontsize=8)
            if i == len(durations) - 1:
                ax.set_xlabel("promotion cycle", fontsize=7)
            if j == 0:
                ax.set_ylabel("share of men", fontsize=7)
    axes[0][0].legend(fontsize=5, ncol=2)
    fig.suptitle("Quota intervention: persistence by window length and meso weight",
                 fontsize=10)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "fig1a": render_fig1a,
    "fig1b": render_fig1b,
    "fig2": render_fig2,
    "fig3": render_fig3,
    "fig4": render_fig4,
}


def render(spec: FigureSpec):
    """Render one figure; save PNG and SVG when an output path is given.

    Returns (figure, [written paths]).
    """
    if spec.figure not in _RENDERERS:
        raise SchemaError(f"unknown figure id {spec.figure!r}; "
                          f"expected one of {', '.join(FIGURE_IDS)}")
    fig = _RENDERERS[spec.figure](Path(spec.input_dir))
    written: list[Path] = []
    if spec.output is not None:
        base = Path(spec.output)
        if base.suffix in (".png", ".svg"):
            base = base.with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        for suffix in (".png", ".svg"):
            path = base.with_suffix(suffix)
            # Fixed metadata keeps reruns byte-identical under one toolchain.
            if suffix == ".svg":
                fig.savefig(path, metadata={"Date": None})
            else:
                fig.savefig(path)
            written.append(path)
    return fig, written
