"""Deterministic sample sets: coordinate lattices plus seeded Halton points.

Every certificate in the toolkit is evaluated over a SampleSet whose seed is
recorded, so repeated runs are reproducible byte for byte.  Samplers filter
through the chart domain predicate and never land inside the singular
exclusion tube (the supplied ranges are expected to respect it).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc


@dataclass
class SampleSet:
    chart: object
    points: list
    seed: int
    spec: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def filtered(self, predicate, note=""):
        kept = [p for p in self.points if predicate(p)]
        spec = dict(self.spec)
        if note:
            spec["filter"] = note
        return SampleSet(self.chart, kept, self.seed, spec)


def lattice(chart, ranges, counts, seed=0):
    """Regular lattice over per-coordinate [lo, hi] ranges (endpoints included)."""
    if len(ranges) != chart.dim or len(counts) != chart.dim:
        raise ValueError("ranges/counts must match the chart dimension")
    axes = [
        np.linspace(lo, hi, int(n)) if n > 1 else np.array([0.5 * (lo + hi)])
        for (lo, hi), n in zip(ranges, counts)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=-1)
    points = []
    for row in flat:
        if chart.contains(chart.reduce(row)):
            points.append(chart.point(*row))
    return SampleSet(chart, points, seed, {"kind": "lattice", "ranges": list(map(list, ranges)), "counts": list(counts)})


def halton(chart, ranges, n, seed):
    """Seeded low-discrepancy points in the given coordinate box."""
    sampler = qmc.Halton(d=chart.dim, seed=seed)
    unit = sampler.random(int(n))
    lo = np.array([r[0] for r in ranges])
    hi = np.array([r[1] for r in ranges])
    coords = lo + unit * (hi - lo)
    points = []
    for row in coords:
        if chart.contains(chart.reduce(row)):
            points.append(chart.point(*row))
    return SampleSet(chart, points, seed, {"kind": "halton", "ranges": list(map(list, ranges)), "n": int(n)})


def box_samples(chart, ranges, lattice_counts, n_random, seed):
    """Deterministic lattice plus a seeded low-discrepancy set (the default)."""
    a = lattice(chart, ranges, lattice_counts, seed=seed)
    b = halton(chart, ranges, n_random, seed=seed)
    spec = {"kind": "lattice+halton", "lattice": a.spec, "halton": b.spec}
    return SampleSet(chart, a.points + b.points, seed, spec)


def radii(lo, hi, n):
    """1-d sample radii, endpoints included."""
    return np.linspace(lo, hi, int(n))
