"""Open-chase endgame along the line of centers.

Once the evader bolts (or the pursuer lunges), both fly at their chase speeds
along the line of centers, so duration, energy, and heading have closed forms.
"""

from __future__ import annotations

import numpy as np

from .config import PursuitConfig


def capture_time_from_separation(sep, cfg: PursuitConfig):
    """Seconds to close from separation sep to the capture radius; 0 if already there."""
    s = cfg.speeds
    gap = np.asarray(sep, dtype=float) - cfg.distances.capture_radius
    q = np.maximum(0.0, gap / (s.chase_speed_p - s.chase_speed_e))
    return float(q) if q.ndim == 0 else q


def chase_energy_from_separation(sep, cfg: PursuitConfig):
    """Pursuer energy spent on the chase started at separation sep, joules."""
    s = cfg.speeds
    rate = s.idle_power + 0.5 * s.chase_speed_p ** 2
    q = capture_time_from_separation(sep, cfg)
    return q * rate


def capture_time(z_p, z_e, cfg: PursuitConfig):
    z_p = np.asarray(z_p, dtype=float)
    z_e = np.asarray(z_e, dtype=float)
    return capture_time_from_separation(np.linalg.norm(z_e - z_p, axis=-1), cfg)


def chase_energy(z_p, z_e, cfg: PursuitConfig):
    z_p = np.asarray(z_p, dtype=float)
    z_e = np.asarray(z_e, dtype=float)
    return chase_energy_from_separation(np.linalg.norm(z_e - z_p, axis=-1), cfg)


def chase_direction(z_p, z_e):
    """Unit heading from pursuer to evader; undefined when coincident."""
    z_p = np.asarray(z_p, dtype=float)
    z_e = np.asarray(z_e, dtype=float)
    d = z_e - z_p
    n = np.linalg.norm(d, axis=-1, keepdims=True)
    if np.any(n < 1e-12):
        raise ValueError("chase direction undefined: pursuer and evader coincide")
    return d / n
