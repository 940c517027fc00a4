"""Coordinate charts and numerical exterior calculus.

Everything here is single-chart: a chart is an open box-with-predicates in
R^n (n <= 4), possibly with periodic (angle) coordinates, and forms / vector
fields are represented by pointwise coefficient functions over the canonical
strictly-increasing multi-index basis.  Two evaluation modes coexist:
analytic data (supplied derivative forms, Jacobians, gradients) and central
finite differences with one Richardson extrapolation.  The finite-difference
path is deliberately independent so it can cross-check the analytic one.

Orientation convention: the coordinate order of a chart is its positive
orientation, so a top-degree form is positive exactly when its single
coefficient is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Finite-difference policy: central differences with one Richardson step.
FD_STEP = 1e-5
ANALYTIC_TOL = 1e-6
FD_TOL = 1e-4

# Default exclusion tube around coordinate singularities (r = 0 loci).
SINGULAR_RADIUS = 1e-3


class ChartMismatchError(ValueError):
    """Operands live on different charts."""


class DegreeError(ValueError):
    """Form degree out of range for the requested operation."""


class DomainError(ValueError):
    """A point violates a chart or field domain predicate."""


class FlowDomainError(RuntimeError):
    """A flow trajectory left the field's domain; carries the exit time."""

    def __init__(self, message, exit_time):
        super().__init__(message)
        self.exit_time = exit_time


def reduce_angle(value):
    """Reduce an angle to [0, 2*pi)."""
    return value % TWO_PI


def angle_delta(a, b):
    """Difference a - b of two angles, taken in the covering line (-pi, pi]."""
    return (a - b + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class Chart:
    """A named coordinate chart with per-coordinate periodicity flags.

    ``domain`` is a predicate on raw coordinate tuples; it should express
    geometric validity (e.g. r >= 0 or x > 0).  ``singular_radius`` is the
    radius of the exclusion tube that samplers keep away from coordinate
    singularities; it does not shrink the domain itself.
    """

    name: str
    coord_names: tuple
    periodic: tuple
    domain: Optional[Callable] = None
    singular_radius: float = SINGULAR_RADIUS

    def __post_init__(self):
        if len(self.coord_names) != len(self.periodic):
            raise ValueError("coord_names and periodic must have equal length")
        if self.dim > 4:
            raise ValueError("charts of dimension > 4 are not supported")

    @property
    def dim(self):
        return len(self.coord_names)

    def index(self, coord_name):
        return self.coord_names.index(coord_name)

    def reduce(self, coords):
        return tuple(
            reduce_angle(c) if per else float(c)
            for c, per in zip(coords, self.periodic)
        )

    def contains(self, coords):
        return self.domain is None or bool(self.domain(coords))

    def point(self, *coords, validate=True):
        if len(coords) != self.dim:
            raise ValueError(
                f"chart {self.name} expects {self.dim} coordinates, got {len(coords)}"
            )
        reduced = self.reduce(coords)
        if validate and not self.contains(reduced):
            raise DomainError(f"point {reduced} outside domain of chart {self.name}")
        return Point(self, reduced)

    def delta(self, coords_a, coords_b):
        """Coordinatewise a - b, computed in the covering line for angles."""
        return tuple(
            angle_delta(a, b) if per else a - b
            for a, b, per in zip(coords_a, coords_b, self.periodic)
        )


@dataclass(frozen=True)
class Point:
    chart: Chart
    coords: tuple

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def coord(self, name):
        return self.coords[self.chart.index(name)]

    def shifted(self, i, delta, validate=True):
        coords = list(self.coords)
        coords[i] += delta
        return self.chart.point(*coords, validate=validate)

    def key(self, digits=12):
        return tuple(round(c, digits) for c in self.coords)


def _require_same_chart(*objects):
    charts = {obj.chart.name for obj in objects}
    if len(charts) != 1:
        raise ChartMismatchError(f"operands live on different charts: {sorted(charts)}")


@dataclass
class ScalarField:
    """A scalar function on a chart, with an optional analytic gradient."""

    chart: Chart
    eval_fn: Callable
    grad_fn: Optional[Callable] = None
    label: str = ""

    def __call__(self, point):
        return float(self.eval_fn(point))

    def gradient(self, point):
        if self.grad_fn is not None:
            return np.asarray(self.grad_fn(point), dtype=float)
        return np.array(
            [fd_partial(lambda q: self.eval_fn(q), point, j) for j in range(self.chart.dim)]
        )

    @staticmethod
    def constant(chart, value, label=""):
        return ScalarField(chart, lambda p: value, lambda p: [0.0] * chart.dim, label)


@dataclass
class VectorField:
    """A vector field given by chart-frame coefficients.

    ``domain`` restricts where the field may be evaluated (fields like the
    radial dilations blow up on r = 0 loci); it defaults to the chart domain.
    """

    chart: Chart
    eval_fn: Callable
    jac_fn: Optional[Callable] = None
    domain: Optional[Callable] = None
    label: str = ""

    def __call__(self, point):
        if not self.in_domain(point):
            raise DomainError(
                f"vector field {self.label or '<unnamed>'} undefined at {point.coords}"
            )
        out = np.asarray(self.eval_fn(point), dtype=float)
        if out.shape != (self.chart.dim,):
            raise ValueError(f"vector field {self.label} returned wrong shape {out.shape}")
        return out

    def in_domain(self, point):
        return self.domain is None or bool(self.domain(point))

    def jacobian(self, point):
        if self.jac_fn is not None:
            return np.asarray(self.jac_fn(point), dtype=float)
        dim = self.chart.dim
        jac = np.empty((dim, dim))
        for j in range(dim):
            jac[:, j] = fd_partial_vector(lambda q: self(q), point, j, dim)
        return jac

    def __neg__(self):
        return VectorField(
            self.chart,
            lambda p: -np.asarray(self.eval_fn(p), dtype=float),
            domain=self.domain,
            label=f"-{self.label}",
        )


def multi_indices(dim, degree):
    """Strictly increasing multi-indices of the canonical basis."""
    return list(combinations(range(dim), degree))


def _basis_position(dim, degree):
    return {idx: pos for pos, idx in enumerate(multi_indices(dim, degree))}


@dataclass
class DifferentialForm:
    """A degree-k form via coefficients over the increasing multi-index basis.

    ``analytic_d`` may hold the exterior derivative in closed form; when
    present it is used instead of finite differences and is expected to agree
    with them within FD_TOL at sampled domain points.
    """

    chart: Chart
    degree: int
    coeffs_fn: Callable
    analytic_d: Optional["DifferentialForm"] = None
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.degree <= self.chart.dim:
            raise DegreeError(
                f"degree {self.degree} invalid on {self.chart.dim}-dim chart"
            )

    @property
    def n_components(self):
        return math.comb(self.chart.dim, self.degree)

    def __call__(self, point):
        out = np.asarray(self.coeffs_fn(point), dtype=float)
        if out.shape != (self.n_components,):
            raise ValueError(
                f"form {self.label or '<unnamed>'}: expected {self.n_components} "
                f"coefficients, got shape {out.shape}"
            )
        return out

    def indices(self):
        return multi_indices(self.chart.dim, self.degree)

    # Pointwise linear algebra; labels are kept human-readable and
    # analytic_d is propagated whenever it is cheap to do so.

    def __add__(self, other):
        _require_same_chart(self, other)
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        d = None
        if self.analytic_d is not None and other.analytic_d is not None:
            d = self.analytic_d + other.analytic_d
        return DifferentialForm(
            self.chart,
            self.degree,
            lambda p: self(p) + other(p),
            analytic_d=d,
            label=f"({self.label}+{other.label})",
        )

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        d = None if self.analytic_d is None else self.analytic_d * scalar
        return DifferentialForm(
            self.chart,
            self.degree,
            lambda p: scalar * self(p),
            analytic_d=d,
            label=f"{scalar}*{self.label}",
        )

    __rmul__ = __mul__

    def scaled_by(self, fn, label=""):
        """Multiply by a pointwise scalar function (no analytic derivative)."""
        return DifferentialForm(
            self.chart,
            self.degree,
            lambda p: float(fn(p)) * self(p),
            label=label or f"f*{self.label}",
        )


def zero_form(chart, degree, label="0"):
    n = math.comb(chart.dim, degree)
    zeros = np.zeros(n)
    form = DifferentialForm(chart, degree, lambda p: zeros.copy(), label=label)
    if degree < chart.dim:
        # d0 = 0; stop the recursion one level down.
        m = math.comb(chart.dim, degree + 1)
        zs = np.zeros(m)
        form.analytic_d = DifferentialForm(chart, degree + 1, lambda p: zs.copy(), label="0")
    return form


def form_from_components(chart, degree, components, label="", analytic_d=None):
    """Build a form from a {multi-index: coefficient} mapping.

    Coefficients may be constants or callables taking a Point.  Multi-indices
    must be strictly increasing tuples of coordinate positions.
    """
    idxs = multi_indices(chart.dim, degree)
    pos = {idx: k for k, idx in enumerate(idxs)}
    entries = []
    for idx, coeff in components.items():
        idx = tuple(idx) if isinstance(idx, (tuple, list)) else (idx,)
        if idx not in pos:
            raise ValueError(f"multi-index {idx} is not strictly increasing in range")
        entries.append((pos[idx], coeff))
    n = len(idxs)

    def coeffs(point):
        out = np.zeros(n)
        for k, coeff in entries:
            out[k] = coeff(point) if callable(coeff) else coeff
        return out

    return DifferentialForm(chart, degree, coeffs, analytic_d=analytic_d, label=label)


def coordinate_form(chart, coord, label=None):
    """The coordinate differential d(coord) as a 1-form with d = 0."""
    j = chart.index(coord) if isinstance(coord, str) else int(coord)
    name = label or f"d{chart.coord_names[j]}"
    form = form_from_components(chart, 1, {(j,): 1.0}, label=name)
    form.analytic_d = zero_form(chart, 2)
    return form


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def fd_partial(fn, point, j, step=FD_STEP):
    """Richardson-extrapolated central difference of fn along coordinate j."""

    def central(h):
        return (fn(point.shifted(j, h)) - fn(point.shifted(j, -h))) / (2.0 * h)

    d1 = central(step)
    d2 = central(step / 2.0)
    return (4.0 * d2 - d1) / 3.0


def fd_partial_vector(fn, point, j, out_dim, step=FD_STEP):
    def central(h):
        hi = np.asarray(fn(point.shifted(j, h)), dtype=float)
        lo = np.asarray(fn(point.shifted(j, -h)), dtype=float)
        return (hi - lo) / (2.0 * h)

    d1 = central(step)
    d2 = central(step / 2.0)
    return (4.0 * d2 - d1) / 3.0


# ---------------------------------------------------------------------------
# exterior algebra
# ---------------------------------------------------------------------------

def _merge_sign(left, right):
    """Sign of sorting the concatenation of two disjoint increasing tuples."""
    sign = 1
    for i in left:
        # each element of `right` smaller than i must jump over i
        sign *= (-1) ** sum(1 for j in right if j < i)
    merged = tuple(sorted(left + right))
    return sign, merged


def wedge(a, b):
    """Pointwise exterior product with standard sign conventions."""
    _require_same_chart(a, b)
    deg = a.degree + b.degree
    if deg > a.chart.dim:
        raise DegreeError(
            f"wedge degree {a.degree}+{b.degree} exceeds chart dimension {a.chart.dim}"
        )
    pos = _basis_position(a.chart.dim, deg)
    table = []  # (out_pos, sign, a_pos, b_pos)
    for ia, idx_a in enumerate(a.indices()):
        for ib, idx_b in enumerate(b.indices()):
            if set(idx_a) & set(idx_b):
                continue
            sign, merged = _merge_sign(idx_a, idx_b)
            table.append((pos[merged], sign, ia, ib))
    n = len(pos)

    def coeffs(point):
        ca, cb = a(point), b(point)
        out = np.zeros(n)
        for k, sign, ia, ib in table:
            out[k] += sign * ca[ia] * cb[ib]
        return out

    return DifferentialForm(a.chart, deg, coeffs, label=f"{a.label}^{b.label}")


def exterior_derivative(a, force_fd=False):
    """Exterior derivative; analytic when supplied, else finite differences.

    The result deliberately carries no analytic_d of its own.
    """
    if a.degree >= a.chart.dim:
        raise DegreeError("cannot take d of a top-degree form")
    if a.analytic_d is not None and not force_fd:
        d = a.analytic_d
        return DifferentialForm(a.chart, a.degree + 1, d.coeffs_fn, label=f"d{a.label}")

    dim = a.chart.dim
    in_pos = _basis_position(dim, a.degree)
    out_idx = multi_indices(dim, a.degree + 1)

    def coeffs(point):
        out = np.zeros(len(out_idx))
        for k, K in enumerate(out_idx):
            total = 0.0
            for p_i, j in enumerate(K):
                rest = K[:p_i] + K[p_i + 1 :]
                src = in_pos[rest]
                total += (-1) ** p_i * fd_partial(
                    lambda q, s=src: a(q)[s], point, j
                )
            out[k] = total
        return out

    return DifferentialForm(a.chart, a.degree + 1, coeffs, label=f"d{a.label}")


def interior_product(v, a):
    """Contraction of a form in its first slot with a vector field."""
    _require_same_chart(v, a)
    if a.degree < 1:
        raise DegreeError("interior product needs degree >= 1")
    dim = a.chart.dim
    in_pos = _basis_position(dim, a.degree)
    out_idx = multi_indices(dim, a.degree - 1)
    table = []  # per output index: list of (i, sign, src_pos)
    for J in out_idx:
        row = []
        for i in range(dim):
            if i in J:
                continue
            merged = tuple(sorted((i,) + J))
            sign = (-1) ** merged.index(i)
            row.append((i, sign, in_pos[merged]))
        table.append(row)

    def coeffs(point):
        vv, ca = v(point), a(point)
        out = np.zeros(len(out_idx))
        for k, row in enumerate(table):
            out[k] = sum(sign * vv[i] * ca[src] for i, sign, src in row)
        return out

    return DifferentialForm(a.chart, a.degree - 1, coeffs, label=f"i_{v.label}({a.label})")


def lie_derivative(v, a, force_fd=False):
    """Lie derivative along v via the Cartan formula d(i_v a) + i_v(d a)."""
    _require_same_chart(v, a)
    da = exterior_derivative(a, force_fd=force_fd)
    first = exterior_derivative(interior_product(v, a), force_fd=force_fd)
    second = interior_product(v, da)
    out = first + second
    out.label = f"L_{v.label}({a.label})"
    out.analytic_d = None
    return out


@dataclass
class ChartMap:
    """A smooth map between charts with an analytic or FD Jacobian."""

    source: Chart
    target: Chart
    eval_fn: Callable
    jac_fn: Optional[Callable] = None
    label: str = ""

    def __call__(self, point):
        if point.chart.name != self.source.name:
            raise ChartMismatchError(
                f"map {self.label} expects points on chart {self.source.name}"
            )
        image = self.eval_fn(point)
        if isinstance(image, Point):
            return image
        return self.target.point(*image)

    def jacobian(self, point):
        if self.jac_fn is not None:
            return np.asarray(self.jac_fn(point), dtype=float)
        jac = np.empty((self.target.dim, self.source.dim))
        for j in range(self.source.dim):
            jac[:, j] = _fd_map_partial(self, point, j)
        return jac

    @staticmethod
    def identity(chart):
        return ChartMap(chart, chart, lambda p: p, lambda p: np.eye(chart.dim), "id")

    def compose(self, inner):
        """self after inner."""
        if inner.target.name != self.source.name:
            raise ChartMismatchError("charts do not compose")
        return ChartMap(
            inner.source,
            self.target,
            lambda p: self(inner(p)),
            (None if (self.jac_fn is None or inner.jac_fn is None)
             else lambda p: self.jacobian(inner(p)) @ inner.jacobian(p)),
            label=f"{self.label}∘{inner.label}" if (self.label or inner.label) else "",
        )


def _fd_map_partial(m, point, j, step=FD_STEP):
    """FD column of a ChartMap Jacobian, angle-aware on the target chart."""

    def central(h):
        hi = m(point.shifted(j, h)).coords
        lo = m(point.shifted(j, -h)).coords
        return np.asarray(m.target.delta(hi, lo)) / (2.0 * h)

    d1 = central(step)
    d2 = central(step / 2.0)
    return (4.0 * d2 - d1) / 3.0


def pullback(m, a):
    """Pullback of a form along a ChartMap; degree is preserved."""
    if a.chart.name != m.target.name:
        raise ChartMismatchError(
            f"form {a.label} lives on {a.chart.name}, not on map target {m.target.name}"
        )
    if a.degree > m.source.dim:
        raise DegreeError("pullback degree exceeds source dimension")
    src_idx = multi_indices(m.source.dim, a.degree)
    tgt_idx = a.indices()

    def coeffs(point):
        image = m(point)  # raises DomainError if outside the form's chart domain
        ca = a(image)
        jac = m.jacobian(point)
        out = np.zeros(len(src_idx))
        for k, I in enumerate(src_idx):
            total = 0.0
            for t, J in enumerate(tgt_idx):
                if ca[t] == 0.0:
                    continue
                minor = jac[np.ix_(J, I)]
                total += ca[t] * (np.linalg.det(minor) if len(J) else 1.0)
            out[k] = total
        return out

    return DifferentialForm(m.source, a.degree, coeffs, label=f"{m.label}*({a.label})")


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------

def flow(v, point, t, step=1e-3):
    """Flow a point along v for time t with fixed-step RK4.

    The final partial step is sized exactly.  Angle coordinates are integrated
    in the covering line and reduced only in the returned Point.  If the
    trajectory leaves the field's domain the error names the exit time.
    """
    chart = v.chart
    if t == 0.0:
        return chart.point(*point.coords)
    direction = 1.0 if t > 0 else -1.0
    remaining = abs(t)
    coords = np.asarray(point.coords, dtype=float)
    elapsed = 0.0

    def rhs(c, tau):
        try:
            q = chart.point(*c)
        except DomainError as exc:
            raise FlowDomainError(
                f"trajectory left chart domain near t={tau:.6f}: {exc}", tau
            ) from exc
        if not v.in_domain(q):
            raise FlowDomainError(
                f"vector field {v.label or '<unnamed>'} undefined on trajectory "
                f"at t={tau:.6f}",
                tau,
            )
        return np.asarray(v.eval_fn(q), dtype=float)

    while remaining > 1e-15:
        h = min(step, remaining)
        hd = direction * h
        k1 = rhs(coords, elapsed)
        k2 = rhs(coords + 0.5 * hd * k1, elapsed + 0.5 * h * direction)
        k3 = rhs(coords + 0.5 * hd * k2, elapsed + 0.5 * h * direction)
        k4 = rhs(coords + hd * k3, elapsed + h * direction)
        coords = coords + (hd / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        remaining -= h
        elapsed += h * direction

    return chart.point(*coords)


def flow_map(v, t, step=1e-3, label=""):
    """The time-t flow of v as a ChartMap (FD Jacobian)."""
    return ChartMap(
        v.chart,
        v.chart,
        lambda p: flow(v, p, t, step=step),
        label=label or f"flow_{v.label}_{t}",
    )


def path_integral(one_form, start_coords, end_coords, n_nodes=32, segments=4):
    """Integrate a 1-form along the straight segment between coordinate tuples.

    Gauss-Legendre nodes per segment; exact to machine precision for the
    polynomial-in-arclength integrands that arise here.
    """
    chart = one_form.chart
    a = np.asarray(start_coords, dtype=float)
    b = np.asarray(end_coords, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    total = 0.0
    for s in range(segments):
        lo = s / segments
        hi = (s + 1) / segments
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        for x, w in zip(nodes, weights):
            u = mid + half * x
            coords = a + u * (b - a)
            val = one_form(chart.point(*coords))
            total += w * half * float(val @ (b - a))
    return total
