"""Batch camouflage statistics over sampled visible starts.

Starts are drawn area-uniformly from the annulus between the trigger and
visual-range radii around the evader's initial position; every such point is
visible at t = 0, so the deterministic trace from it opens in the stalk
phase. The headline statistic is the share of traces whose flagged fraction
exceeds a threshold (half the flight by default).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PursuitConfig, config_hash
from .grid import format_value
from .ioutil import atomic_write_bytes, atomic_write_json
from .timedep import TimeDependentSolution
from .tracer import _OK, _advance

SCATTER_CSV_HEADER = "x0,y0,amc_fraction"


@dataclass
class BatchSummary:
    """Per-start camouflage fractions and their threshold summary.

    n counts the traces that produced a fraction; failures counts sampled
    starts whose trace did not (and which the percentage therefore excludes).
    """

    starts: np.ndarray
    fractions: np.ndarray
    n: int
    failures: int
    threshold: float
    pct_over_threshold: float
    config_hash: str


def sample_starts(cfg: PursuitConfig, n: int, seed: int) -> np.ndarray:
    """n points area-uniform on the visible annulus around the evader's start.

    Radii follow the inverse CDF sqrt(eps^2 + u (D^2 - eps^2)) with u drawn
    open at 1, so every point lands strictly outside the trigger radius and
    at most at visual range.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    d = cfg.distances
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)
    r = np.sqrt(d.chase_trigger ** 2 + u * (d.visual_range ** 2 - d.chase_trigger ** 2))
    ang = rng.uniform(0.0, 2.0 * np.pi, n)
    center = np.asarray(cfg.path.position(0.0), dtype=float)
    return center + r[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def batch_amc(solution: TimeDependentSolution, cfg: PursuitConfig, n: int,
              seed: int, threshold: float = 0.5) -> BatchSummary:
    """Deterministic trace per sampled start, reduced by sample index.

    Traces that fail (unvalued fields, no flight before the switch) are
    excluded from the percentage's denominator; with no survivors at all the
    percentage reports 0.
    """
    starts = sample_starts(cfg, n, seed)
    res = _advance(starts, solution, cfg)
    ok = (res.status == _OK) & (res.amc_den > 0)
    den = np.where(res.amc_den > 0, res.amc_den, 1)
    fractions = (res.amc_num / den)[ok]
    used = int(ok.sum())
    pct = 100.0 * float((fractions > threshold).sum()) / used if used else 0.0
    return BatchSummary(starts=starts[ok], fractions=fractions, n=used,
                        failures=n - used, threshold=float(threshold),
                        pct_over_threshold=pct, config_hash=config_hash(cfg))


def scatter_to_csv(summary: BatchSummary, path) -> str:
    """One row per traced start: position and its flagged fraction."""
    lines = [SCATTER_CSV_HEADER]
    for (x, y), f in zip(summary.starts, summary.fractions):
        lines.append(f"{format_value(x)},{format_value(y)},{format_value(f)}")
    text = "\n".join(lines) + "\n"
    atomic_write_bytes(path, text.encode())
    return text


def summary_to_json(summary: BatchSummary, path) -> dict:
    """Headline numbers only; the scatter carries the per-start detail."""
    payload = {
        "n": summary.n,
        "failures": summary.failures,
        "threshold": summary.threshold,
        "pct_over_threshold": summary.pct_over_threshold,
        "config_hash": summary.config_hash,
    }
    atomic_write_json(path, payload)
    return payload
