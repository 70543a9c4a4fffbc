"""
Diagnostics: six-number summaries, MCMC vs theoretical comparison and plot data
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import arviz as az
import numpy as np
import pandas as pd
from scipy import stats as sps

from config import engine_defaults
from models import ComparisonReport, PlotKind, StatComparison, StatSummary
from services.distributions import ClassDistribution

logger = logging.getLogger(__name__)

# numpy's default ("linear") quantile interpolation
QUANTILE_METHOD = "linear"
SUMMARY_HEADER = ["Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max."]


class DiagnosticsError(Exception):
    """Inputs cannot be compared (e.g. statistic names differ)"""
    pass


def six_number_summary(values: Sequence[float]) -> StatSummary:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DiagnosticsError("Cannot summarise an empty column")
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method=QUANTILE_METHOD)
    return StatSummary(
        minimum=float(arr.min()), q1=float(q1), median=float(med),
        mean=float(arr.mean()), q3=float(q3), maximum=float(arr.max()),
    )


def summarize(stats: pd.DataFrame) -> Dict[str, StatSummary]:
    """Six-number summary per statistic column"""
    if stats.empty:
        raise DiagnosticsError("Statistics table is empty")
    return {name: six_number_summary(stats[name].to_numpy()) for name in stats.columns}


def format_summary(summaries: Dict[str, StatSummary], digits: int = 1) -> str:
    """Text block per statistic: 'Statistic: <name>' then the Min..Max row"""
    blocks = []
    for name, s in summaries.items():
        header = " ".join(f"{h:>9}" for h in SUMMARY_HEADER)
        row = " ".join(f"{v:>9.{digits}f}" for v in s.as_row())
        blocks.append(f"Statistic: {name}\n{header}\n{row}")
    return "\n\n".join(blocks) + "\n"


def effective_sample_size(values: Sequence[float]) -> Optional[float]:
    """Initial-monotone-sequence ESS of one chain; None for constant or very short series"""
    arr = np.asarray(values, dtype=float)
    if arr.size < 4 or np.ptp(arr) == 0:
        return None
    ess = float(az.ess(arr[np.newaxis, :], method="mean"))
    return ess if np.isfinite(ess) else None


def shared_bin_edges(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Freedman-Diaconis bin edges on the pooled sample"""
    pooled = np.concatenate([np.asarray(a, dtype=float), np.asarray(b, dtype=float)])
    return np.histogram_bin_edges(pooled, bins="fd")


def reference_overlays(
    distributions: Sequence[ClassDistribution],
    names: Sequence[str]
) -> Dict[str, Tuple[float, float, float]]:
    """Closed-form (mean, 2.5%, 97.5%) per statistic where the distribution has quantiles"""
    overlays: Dict[str, Tuple[float, float, float]] = {}
    offset = 0
    for dist in distributions:
        q = dist.quantiles([0.025, 0.975])
        mean = dist.mean()
        if q is not None:
            for k in range(dist.dim):
                overlays[names[offset + k]] = (float(mean[k]), float(q[0, k]), float(q[1, k]))
        offset += dist.dim
    return overlays


def compare(
    mcmc: pd.DataFrame,
    theoretical: pd.DataFrame,
    overlays: Optional[Dict[str, Tuple[float, float, float]]] = None
) -> ComparisonReport:
    """
    Compare sampled statistics with direct draws from the class distributions

    Args:
        mcmc: Sampler statistics (one column per statistic)
        theoretical: Theoretical draws with the same columns
        overlays: Closed-form (mean, q025, q975) per statistic; empirical quantiles otherwise

    Raises:
        DiagnosticsError: If the column names differ
    """
    mcmc_names = list(mcmc.columns)
    theo_names = list(theoretical.columns)
    if mcmc_names != theo_names:
        raise DiagnosticsError(
            f"Statistic names differ: mcmc has {mcmc_names}, theoretical has {theo_names}"
        )
    overlays = overlays or {}
    comparisons: List[StatComparison] = []
    for name in mcmc_names:
        a = mcmc[name].to_numpy(dtype=float)
        b = theoretical[name].to_numpy(dtype=float)
        ks = float(sps.ks_2samp(a, b).statistic)
        if name in overlays:
            t_mean, q025, q975 = overlays[name]
            analytic = True
        else:
            t_mean = float(b.mean())
            q025, q975 = (float(x) for x in np.quantile(b, [0.025, 0.975], method=QUANTILE_METHOD))
            analytic = False
        comparisons.append(StatComparison(
            name=name,
            mcmc=six_number_summary(a),
            theoretical=six_number_summary(b),
            ks_statistic=min(max(ks, 0.0), 1.0),
            theoretical_mean=t_mean,
            theoretical_q025=q025,
            theoretical_q975=q975,
            analytic_reference=analytic,
            ess=effective_sample_size(a),
            bin_edges=shared_bin_edges(a, b).tolist(),
        ))
        logger.debug(f"{name}: KS={ks:.4f}")
    return ComparisonReport(
        comparisons=comparisons,
        mcmc=mcmc,
        theoretical=theoretical,
        metadata={
            "quantile_method": QUANTILE_METHOD,
            "bins": "freedman-diaconis (pooled)",
            "kde_bandwidth": "silverman",
            "kde_grid_points": engine_defaults.kde_grid_points,
        },
    )


def histogram_table(a: Sequence[float], b: Sequence[float], edges: Sequence[float]) -> pd.DataFrame:
    edges = np.asarray(edges, dtype=float)
    mcmc_density, _ = np.histogram(np.asarray(a, dtype=float), bins=edges, density=True)
    theo_density, _ = np.histogram(np.asarray(b, dtype=float), bins=edges, density=True)
    return pd.DataFrame({
        "bin_left": edges[:-1],
        "bin_right": edges[1:],
        "mcmc_density": mcmc_density,
        "theo_density": theo_density,
    })


def _kde_on_grid(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    if values.size < 2 or np.ptp(values) == 0:
        # point mass: all density on the nearest grid cell
        out = np.zeros_like(grid)
        step = grid[1] - grid[0] if grid.size > 1 else 1.0
        out[int(np.argmin(np.abs(grid - values[0])))] = 1.0 / step
        return out
    return sps.gaussian_kde(values, bw_method="silverman")(grid)


def density_table(a: Sequence[float], b: Sequence[float]) -> pd.DataFrame:
    """Gaussian KDE of both samples on a shared fixed grid"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    pad = 0.1 * (hi - lo) if hi > lo else 0.5
    grid = np.linspace(lo - pad, hi + pad, engine_defaults.kde_grid_points)
    return pd.DataFrame({
        "x": grid,
        "mcmc_density": _kde_on_grid(a, grid),
        "theo_density": _kde_on_grid(b, grid),
    })


def trace_table(values: Sequence[float], overlay: Tuple[float, float, float]) -> pd.DataFrame:
    arr = np.asarray(values, dtype=float)
    mean, q025, q975 = overlay
    return pd.DataFrame({
        "index": np.arange(1, arr.size + 1),
        "value": arr,
        "theo_mean": mean,
        "theo_q025": q025,
        "theo_q975": q975,
    })


def emit_plot_data(report: ComparisonReport, kind: PlotKind) -> pd.DataFrame:
    """
    Long-format plot data for every statistic

    hist: bin_left, bin_right, mcmc_density, theo_density
    density: x, mcmc_density, theo_density (Silverman bandwidth)
    trace: index, value, theo_mean, theo_q025, theo_q975
    """
    kind = PlotKind(kind)
    frames = []
    for c in report.comparisons:
        a = report.mcmc[c.name]
        b = report.theoretical[c.name]
        if kind == PlotKind.HIST:
            frame = histogram_table(a, b, c.bin_edges)
        elif kind == PlotKind.DENSITY:
            frame = density_table(a, b)
        else:
            frame = trace_table(a, (c.theoretical_mean, c.theoretical_q025, c.theoretical_q975))
        frame.insert(0, "statistic", c.name)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def format_comparison(report: ComparisonReport) -> str:
    """Text report: summaries of both samples, KS and ESS per statistic"""
    lines = []
    header = " ".join(f"{h:>9}" for h in SUMMARY_HEADER)
    for c in report.comparisons:
        lines.append(f"Statistic: {c.name}")
        lines.append(f"{'':>12}{header}")
        lines.append(f"{'mcmc':>12}" + " ".join(f"{v:>9.2f}" for v in c.mcmc.as_row()))
        lines.append(f"{'theoretical':>12}" + " ".join(f"{v:>9.2f}" for v in c.theoretical.as_row()))
        ess = f"{c.ess:.1f}" if c.ess is not None else "n/a"
        lines.append(f"KS = {c.ks_statistic:.4f}, ESS = {ess}")
        lines.append("")
    return "\n".join(lines)
