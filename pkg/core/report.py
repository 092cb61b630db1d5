"""Report emission: profile CSVs, fit/KS/config JSON and optional SVG plots.

All files of one report are written to a staging directory next to the
output directory and moved into place only after every file was written,
so a failed run leaves no partial outputs. Output bytes depend only on the
report contents.
"""

import json
import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from .backtest import RiskReturnProfile, RunReport  # noqa: E402
from .measures import RiskMeasure  # noqa: E402
from .stats import LinearFit  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Writer = Callable[[Path], None]

plt.rcParams["svg.hashsalt"] = "qrisk"

__all__ = ["RunReport", "emit_report", "emit_sweep", "plot_profile"]


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _write_json(path: Path, payload) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_frame(path: Path, frame: pd.DataFrame) -> None:
    frame.to_csv(path, index=False, lineterminator="\n")


def _staged_write(out_dir: PathLike, writers: Mapping[str, Writer], replaces: Sequence[str] = ()) -> List[Path]:
    """Run every writer into a staging directory, then move the files into out_dir.

    Existing files in out_dir matching a `replaces` glob and not written by
    this run are removed, so a rerun with fewer measures leaves no stale files.
    """
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".qrisk-", dir=out_dir.parent))
    try:
        for name, writer in writers.items():
            writer(staging / name)
        out_dir.mkdir(parents=True, exist_ok=True)
        for pattern in replaces:
            for stale in sorted(out_dir.glob(pattern)):
                if stale.name not in writers and stale.is_file():
                    logger.info(f"Removing stale {stale}")
                    stale.unlink()
        written = []
        for name in writers:
            target = out_dir / name
            os.replace(staging / name, target)
            written.append(target)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return written


# ===== Tables =====

def profile_frame(profile: RiskReturnProfile) -> pd.DataFrame:
    return pd.DataFrame(
        [(p.bin_index, p.mean_risk, p.e_rel, p.n_cycles) for p in profile.points],
        columns=["bin_index", "mean_risk", "e_rel", "n_cycles_contributing"],
    )


def cycles_frame(report: RunReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (c.cycle_index, c.cycle_start.strftime("%Y-%m-%d"), c.q_used, c.universe_size,
             len(c.records), len(c.dropped), c.reference_forward_return, ";".join(c.dropped))
            for c in report.cycles
        ],
        columns=["cycle_index", "cycle_start", "q_used", "universe_size", "n_kept", "n_dropped",
                 "reference_forward_return", "dropped"],
    )


def fits_payload(report: RunReport) -> Dict[str, dict]:
    payload = {}
    for measure, profile in report.profiles.items():
        entry = profile.fit.to_dict()
        entry['n_cycles'] = profile.n_cycles
        payload[str(measure)] = entry
    return payload


def ks_payload(report: RunReport) -> List[dict]:
    payload = []
    for summary in report.ks_summaries:
        entry = summary.result.to_dict()
        entry.update({
            'cycle_index': summary.cycle_index,
            'cycle_start': summary.cycle_start.strftime("%Y-%m-%d"),
            'q': summary.fit.q,
            'M': summary.fit.M,
            'B': summary.fit.B,
            'converged': summary.fit.converged,
        })
        payload.append(entry)
    return payload


# ===== Plots =====

AXIS_LABELS = {
    RiskMeasure.TRE: "Tsallis relative entropy",
    RiskMeasure.KLRE: "Kullback-Leibler relative entropy",
    RiskMeasure.BETA: "beta",
    RiskMeasure.REL_STD: "relative standard deviation",
}


def plot_profile(profile: RiskReturnProfile, path: PathLike) -> None:
    """Scatter of bin risk vs. E_rel with the fitted line and its chi2."""
    risks = [p.mean_risk for p in profile.points]
    e_rel = [p.e_rel for p in profile.points]

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.scatter(risks, e_rel, color="black", s=18, zorder=3)
    lo, hi = min(risks), max(risks)
    ax.plot([lo, hi], list(profile.fit.predict([lo, hi])), color="tab:red", linewidth=1.2)
    ax.set_xlabel(AXIS_LABELS[profile.measure])
    ax.set_ylabel("E_rel (mean monthly excess return)")
    ax.set_title(
        f"slope {profile.fit.p1:.4g}, intercept {profile.fit.p0:.4g}, chi2 = {profile.fit.chi2:.3f}",
        fontsize=9,
    )
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ===== Emission =====

def emit_report(report: RunReport, out_dir: PathLike, plots: bool = False) -> List[Path]:
    """Write every report file into out_dir.

    Returns:
        Paths written, in a fixed order
    """
    writers: Dict[str, Writer] = {}
    for measure in report.config.measures:
        profile = report.profiles[measure]
        writers[f"profile_{measure}.csv"] = lambda p, prof=profile: _write_frame(p, profile_frame(prof))
    writers["fits.json"] = lambda p: _write_json(p, fits_payload(report))
    writers["cycles.csv"] = lambda p: _write_frame(p, cycles_frame(report))
    writers["ks.json"] = lambda p: _write_json(p, ks_payload(report))
    writers["config.json"] = lambda p: _write_json(p, report.config.to_dict())
    if plots:
        for measure in report.config.measures:
            writers[f"profile_{measure}.svg"] = lambda p, prof=report.profiles[measure]: plot_profile(prof, p)

    written = _staged_write(out_dir, writers, replaces=("profile_*.csv", "profile_*.svg"))
    logger.info(f"Wrote {len(written)} report files to {out_dir}")
    return written


def emit_sweep(sweep: Mapping[int, Mapping[RiskMeasure, LinearFit]], out_dir: PathLike) -> List[Path]:
    """Write a diversification sweep as one CSV row per (size, measure)."""
    rows = [
        (per_bin, str(measure), fit.p0, fit.p1, fit.chi2, fit.n_points)
        for per_bin, fits in sorted(sweep.items())
        for measure, fit in fits.items()
    ]
    frame = pd.DataFrame(rows, columns=["securities_per_bin", "measure", "p0", "p1", "chi2", "n_points"])
    written = _staged_write(out_dir, {"diversification.csv": lambda p: _write_frame(p, frame)})
    logger.info(f"Wrote diversification sweep over {len(sweep)} sizes to {out_dir}")
    return written
