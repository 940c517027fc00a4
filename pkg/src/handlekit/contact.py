"""Contact forms and contact pairs.

A contact pair is a pair of 1-forms (alpha_plus, alpha_minus) on overlapping
open sets covering a 3-chart, with alpha_plus positive contact, alpha_minus
negative contact, and d(alpha_minus) = -d(alpha_plus) on the overlap.  The
sum alpha_zero = alpha_plus + alpha_minus on the overlap is closed, nowhere
zero, and pairs with both Reeb fields to a value greater than one; those are
exactly the conditions certified by make_contact_pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .certify import (
    Certificate,
    CertificateFailure,
    STRICT_FLOOR,
    condition_certificate,
    equation_certificate,
    positivity_certificate,
)
from .geometry import (
    ANALYTIC_TOL,
    FD_TOL,
    Chart,
    ChartMap,
    ChartMismatchError,
    DifferentialForm,
    DomainError,
    ScalarField,
    VectorField,
    coordinate_form,
    exterior_derivative,
    interior_product,
    lie_derivative,
    pullback,
    wedge,
    zero_form,
)

DEGENERATE_EPS = 1e-12
REEB_COND_LIMIT = 1e10


class ContactPairError(ValueError):
    """A contact-pair invariant failed during construction."""


def check_contact(alpha, sign, samples, surface=None, name=None):
    """Certify sign * alpha ^ d(alpha) > 0 against the chart orientation.

    ``alpha`` must be a 1-form on a 3-dim chart, or on a 4-dim chart together
    with ``surface``, a parametrizing ChartMap from a 3-chart, in which case
    the restriction is the pullback along the parametrization.
    """
    if alpha.degree != 1:
        raise ValueError("contact check needs a 1-form")
    if surface is not None:
        alpha = pullback(surface, alpha)
    if alpha.chart.dim != 3:
        raise ValueError("contact check needs a 3-dim chart (or a surface map)")
    volume = wedge(alpha, exterior_derivative(alpha))

    def value(p):
        v = sign * volume(p)[0]
        # degenerate samples count as recorded violations
        return v if abs(v) >= DEGENERATE_EPS else -abs(v) - DEGENERATE_EPS

    return positivity_certificate(
        name or f"contact-positivity[{alpha.label}]",
        "contact-positivity",
        samples,
        value,
        params={"sign": sign},
    )


def reeb_field(alpha, cond_limit=REEB_COND_LIMIT):
    """The Reeb field of a contact form, solved pointwise.

    At each point the stacked linear system  i_R d(alpha) = 0, alpha(R) = 1
    is solved by least squares; solutions are cached per point.  A system
    with condition number beyond ``cond_limit`` raises, naming the point.
    """
    chart = alpha.chart
    if chart.dim != 3:
        raise ValueError("Reeb solve implemented on 3-dim charts")
    dalpha = exterior_derivative(alpha)
    idx2 = dalpha.indices()
    cache = {}

    def solve(point):
        key = point.key()
        if key in cache:
            return cache[key]
        omega = np.zeros((3, 3))
        c = dalpha(point)
        for k, (i, j) in enumerate(idx2):
            omega[i, j] = c[k]
            omega[j, i] = -c[k]
        rows = np.vstack([omega.T, alpha(point)[None, :]])
        rhs = np.array([0.0, 0.0, 0.0, 1.0])
        cond = np.linalg.cond(rows)
        if not np.isfinite(cond) or cond > cond_limit:
            raise ValueError(
                f"degenerate Reeb system at {point.coords} (cond={cond:.3e})"
            )
        sol, residual, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
        if np.max(np.abs(rows @ sol - rhs)) > 1e-8:
            raise ValueError(f"inconsistent Reeb system at {point.coords}")
        cache[key] = sol
        return sol

    return VectorField(chart, solve, label=f"Reeb[{alpha.label}]")


@dataclass
class ContactPair:
    """A certified contact pair with cached sum form and Reeb fields."""

    chart: Chart
    alpha_plus: DifferentialForm
    alpha_minus: DifferentialForm
    m_plus: Callable
    m_minus: Callable
    alpha_zero: DifferentialForm = None
    certificates: list = field(default_factory=list)
    samples: object = None

    def m_zero(self, point):
        return self.m_plus(point) and self.m_minus(point)

    def reeb_plus(self):
        return reeb_field(self.alpha_plus)

    def reeb_minus(self):
        return reeb_field(self.alpha_minus)

    def gamma(self):
        """The global closed 2-form equal to d(alpha_plus) on the overlap."""
        return exterior_derivative(self.alpha_plus)


def make_contact_pair(alpha_plus, alpha_minus, domains, samples, tol=ANALYTIC_TOL):
    """Build a ContactPair, certifying all defining conditions over samples.

    ``domains`` is the pair (m_plus, m_minus) of predicates on points.
    Construction fails (raising ContactPairError) if any certificate fails;
    the failing certificate rides on the exception.
    """
    m_plus, m_minus = domains
    chart = alpha_plus.chart
    if alpha_minus.chart.name != chart.name:
        raise ChartMismatchError("pair forms must share a chart")

    uncovered = [p for p in samples if not (m_plus(p) or m_minus(p))]
    if uncovered:
        raise ContactPairError(
            f"sample {uncovered[0].coords} lies in neither domain of the pair"
        )

    plus_samples = samples.filtered(m_plus, "plus-domain")
    minus_samples = samples.filtered(m_minus, "minus-domain")
    overlap = samples.filtered(lambda p: m_plus(p) and m_minus(p), "overlap")

    certs = [
        check_contact(alpha_plus, +1, plus_samples, name="pair-positive-contact"),
        check_contact(alpha_minus, -1, minus_samples, name="pair-negative-contact"),
    ]

    d_plus = exterior_derivative(alpha_plus)
    d_minus = exterior_derivative(alpha_minus)
    certs.append(
        equation_certificate(
            "pair-curvature-match",
            "pair-curvature-match",
            overlap,
            lambda p: d_plus(p) + d_minus(p),
            tol,
        )
    )

    alpha_zero = alpha_plus + alpha_minus
    alpha_zero.label = "alpha_zero"
    certs.append(
        equation_certificate(
            "pair-sum-closed",
            "pair-sum-closed",
            overlap,
            lambda p: exterior_derivative(alpha_zero)(p),
            FD_TOL if alpha_zero.analytic_d is None else tol,
        )
    )

    reeb_p = reeb_field(alpha_plus)
    reeb_m = reeb_field(alpha_minus)
    certs.append(
        positivity_certificate(
            "pair-sum-dominates-reeb",
            "pair-sum-dominates-reeb",
            overlap,
            lambda p: min(
                float(alpha_zero(p) @ reeb_p(p)),
                float(alpha_zero(p) @ reeb_m(p)),
            )
            - 1.0,
        )
    )

    failing = [c for c in certs if not c.passed]
    if failing:
        raise ContactPairError(
            f"contact-pair invariant failed: {failing[0].check_name} "
            f"(max violation {failing[0].max_violation:.3e})"
        )
    return ContactPair(
        chart=chart,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        m_plus=m_plus,
        m_minus=m_minus,
        alpha_zero=alpha_zero,
        certificates=certs,
        samples=samples,
    )


@dataclass
class FoliationSample:
    """Oriented characteristic direction at one surface sample."""

    surface_point: object
    ambient_point: object
    direction: Optional[np.ndarray]
    singular: bool


def characteristic_foliation(surface, alpha, co_orient, samples, tangency_tol=1e-10):
    """Sampled oriented line field of (tangent plane) ∩ (contact plane).

    ``surface`` parametrizes a 2-sided surface inside alpha's 3-chart and
    ``co_orient`` is a field transverse to both the surface and the contact
    planes.  The orientation follows the convention: with alpha chosen so
    alpha(V) > 0 and beta a co-normal of the surface with beta(V) > 0, a
    third form gamma with alpha ^ beta ^ gamma > 0 orients the intersection
    line.  Replacing V by -V leaves the orientation unchanged.
    """
    chart = alpha.chart
    if chart.dim != 3 or surface.target.name != chart.name:
        raise ValueError("foliation needs a surface mapping into alpha's 3-chart")
    out = []
    for p2 in samples:
        p3 = surface(p2)
        a = alpha(p3)
        v = co_orient(p3)
        av = float(a @ v)
        if av < 0:
            a = -a
            av = -av
        if av <= tangency_tol:
            raise ValueError(f"co_orient not transverse to the contact plane at {p3.coords}")
        jac = surface.jacobian(p2)
        s1, s2 = jac[:, 0], jac[:, 1]
        # tangent vector inside the contact plane: w = a(s2) s1 - a(s1) s2
        a1, a2 = float(a @ s1), float(a @ s2)
        w = a2 * s1 - a1 * s2
        norm = np.linalg.norm(w)
        if norm <= tangency_tol * max(1.0, np.linalg.norm(s1) + np.linalg.norm(s2)):
            out.append(FoliationSample(p2, p3, None, True))
            continue
        w = w / norm
        # beta = det[s1, s2, .] co-normalizes the surface; flip for beta(V) > 0
        beta = np.cross(s1, s2)
        if float(beta @ v) < 0:
            beta = -beta
        # orient w by gamma with det[a, beta, gamma] > 0: use gamma = a x beta,
        # which always completes (a, beta) positively.
        gamma = np.cross(a, beta)
        if float(gamma @ w) < 0:
            w = -w
        out.append(FoliationSample(p2, p3, w, False))
    return out


def symplectification(alpha, sign, t_name="t", samples=None):
    """Symplectify a contact form: (chart with t prepended, omega, d/dt).

    omega = sign * d(e^{sign*t} alpha) is symplectic and the t-translation
    field is a dilation (sign +1) or contraction (sign -1) for it.  When
    ``samples`` is supplied the contact condition is re-certified first.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    base = alpha.chart
    if samples is not None:
        check_contact(alpha, sign, samples).raise_if_failed()
    chart = Chart(
        name=f"{base.name}_symp{'+' if sign > 0 else '-'}",
        coord_names=(t_name,) + base.coord_names,
        periodic=(False,) + base.periodic,
        domain=(None if base.domain is None else (lambda c: base.domain(c[1:]))),
        singular_radius=base.singular_radius,
    )
    dalpha = exterior_derivative(alpha)
    idx2 = [(i, j) for i, j in dalpha.indices()]
    n_pairs = len(idx2)

    def base_point(point):
        return base.point(*point.coords[1:])

    def omega_coeffs(point):
        t = point.coords[0]
        q = base_point(point)
        scale = math.exp(sign * t)
        a = alpha(q)
        da = dalpha(q)
        # basis order on the 4-chart: (0,i+1) pairs first, then (i+1,j+1)
        out = np.empty(chart.dim * (chart.dim - 1) // 2)
        for i in range(base.dim):
            out[i] = scale * a[i]
        for k, (i, j) in enumerate(idx2):
            out[base.dim + k] = sign * scale * da[k]
        return out

    omega = DifferentialForm(
        chart,
        2,
        omega_coeffs,
        analytic_d=zero_form(chart, 3),
        label=f"omega{'+' if sign > 0 else '-'}[{alpha.label}]",
    )
    unit = np.zeros(chart.dim)
    unit[0] = 1.0
    t_field = VectorField(chart, lambda p: unit.copy(), label="d/dt")
    return chart, omega, t_field


def slice_map(symp_chart, base_chart, t=0.0, label=None):
    """Inclusion of the base chart into a symplectification at fixed t."""

    def jac(point):
        out = np.zeros((symp_chart.dim, base_chart.dim))
        out[1:, :] = np.eye(base_chart.dim)
        return out

    return ChartMap(
        base_chart,
        symp_chart,
        lambda p: symp_chart.point(t, *p.coords),
        jac,
        label=label or f"t={t}-slice",
    )


def graph_map(symp_chart, base_chart, height, label="graph"):
    """Embedding of the graph of a scalar function into a symplectification."""

    def jac(point):
        out = np.zeros((symp_chart.dim, base_chart.dim))
        out[0, :] = height.gradient(point)
        out[1:, :] = np.eye(base_chart.dim)
        return out

    return ChartMap(
        base_chart,
        symp_chart,
        lambda p: symp_chart.point(height(p), *p.coords),
        jac,
        label=label,
    )


def convex_enlargement(alpha, height, samples=None):
    """Rescale a contact form by e^h for h >= 0 (the induced boundary form).

    The kernel plane field is unchanged.  A negative height at any checked
    sample is an error.
    """
    if samples is not None:
        for p in samples:
            if height(p) < 0.0:
                raise ValueError(f"enlargement height negative at {p.coords}")

    def coeffs(point):
        h = height(point)
        if h < 0.0:
            raise ValueError(f"enlargement height negative at {point.coords}")
        return math.exp(h) * alpha(point)

    return DifferentialForm(
        alpha.chart, 1, coeffs, label=f"e^{height.label or 'h'}*{alpha.label}"
    )


def check_weak_convexity(alpha, omega, boundary, samples, name=None):
    """Certify alpha ^ (omega restricted to the boundary) > 0 at samples.

    ``alpha`` lives on the boundary 3-chart; ``omega`` on the ambient chart;
    ``boundary`` parametrizes the boundary inside the ambient chart.
    """
    restricted = pullback(boundary, omega)
    volume = wedge(alpha, restricted)
    return positivity_certificate(
        name or f"weak-convexity[{alpha.label}]",
        "weak-convexity",
        samples,
        lambda p: volume(p)[0],
    )
