"""Worked coordinate models used throughout the toolkit.

The ambient stage is R^4 in double polar coordinates (r1, theta1, r2, theta2)
with the standard symplectic form r1 dr1^dtheta1 + r2 dr2^dtheta2 and the
Morse function f = -r1^2 + r2^2.  Level sets of f carry the coordinates

    on f^{-1}(eps1):  (r, mu, lam) = (r2, theta2, -theta1)
    on f^{-1}(eps2):  (r, mu, lam) = (r1, theta1, theta2)

which are positively oriented for the level-set orientation convention.

The 3-sphere model lives on the sphere of radius sqrt(2), where the radial
dilation induces alpha = (r^2 dmu + (2 - r^2) dlam)/2 near the first core
circle and the Reeb field is exactly d/dmu + d/dlam.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .geometry import (
    Chart,
    ChartMap,
    DifferentialForm,
    ScalarField,
    VectorField,
    coordinate_form,
    form_from_components,
    zero_form,
)
from .sampling import box_samples

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# ambient R^4 in double polar coordinates
# ---------------------------------------------------------------------------

def r4_polar_chart(singular_radius=1e-3):
    return Chart(
        name="r4_polar",
        coord_names=("r1", "theta1", "r2", "theta2"),
        periodic=(False, True, False, True),
        domain=lambda c: c[0] >= 0.0 and c[2] >= 0.0,
        singular_radius=singular_radius,
    )


def standard_symplectic_form(chart):
    """r1 dr1 ^ dtheta1 + r2 dr2 ^ dtheta2, with d = 0 attached."""
    return form_from_components(
        chart,
        2,
        {(0, 1): lambda p: p[0], (2, 3): lambda p: p[2]},
        label="omega_std",
        analytic_d=zero_form(chart, 3),
    )


def morse_function(chart):
    return ScalarField(
        chart,
        lambda p: -p[0] ** 2 + p[2] ** 2,
        lambda p: [-2.0 * p[0], 0.0, 2.0 * p[2], 0.0],
        label="f",
    )


def weak_dilation_field(chart, tube=None):
    """The radial dilation ((r1 - 1/r1) dr1 + r2 dr2)/2; undefined at r1 = 0."""
    tube = chart.singular_radius if tube is None else tube
    return VectorField(
        chart,
        lambda p: [0.5 * (p[0] - 1.0 / p[0]), 0.0, 0.5 * p[2], 0.0],
        domain=lambda p: p[0] >= tube,
        label="V_weak",
    )


def radial_dilation_field(chart):
    """(r1 dr1 + r2 dr2)/2, the dilation transverse to spheres."""
    return VectorField(
        chart,
        lambda p: [0.5 * p[0], 0.0, 0.5 * p[2], 0.0],
        label="V_radial",
    )


def dilation_primitive(chart):
    """The contraction of the radial-minus-unit dilation with omega_std.

    Closed-form coefficients ((r1^2 - 1) dtheta1 + r2^2 dtheta2)/2 with the
    analytic derivative omega_std attached; the finite-difference derivative
    cross-checks the pairing.
    """
    return form_from_components(
        chart,
        1,
        {(1,): lambda p: 0.5 * (p[0] ** 2 - 1.0), (3,): lambda p: 0.5 * p[2] ** 2},
        label="iV_omega",
        analytic_d=standard_symplectic_form(chart),
    )


# ---------------------------------------------------------------------------
# level-set charts of f and their embeddings
# ---------------------------------------------------------------------------

def level_chart(name, r_max=None, singular_radius=1e-3):
    return Chart(
        name=name,
        coord_names=("r", "mu", "lam"),
        periodic=(False, True, True),
        domain=(lambda c: 0.0 <= c[0] <= r_max) if r_max else (lambda c: c[0] >= 0.0),
        singular_radius=singular_radius,
    )


def attaching_level_embedding(eps1, chart=None, ambient=None):
    """f^{-1}(eps1) -> R^4 via (r, mu, lam) = (r2, theta2, -theta1)."""
    chart = chart or level_chart("level_attach")
    ambient = ambient or r4_polar_chart()

    def eval_fn(p):
        r, mu, lam = p.coords
        r1 = math.sqrt(r * r - eps1)
        return ambient.point(r1, -lam, r, mu)

    def jac(p):
        r = p[0]
        r1 = math.sqrt(r * r - eps1)
        out = np.zeros((4, 3))
        out[0, 0] = r / r1
        out[1, 2] = -1.0
        out[2, 0] = 1.0
        out[3, 1] = 1.0
        return out

    return ChartMap(chart, ambient, eval_fn, jac, label="attach-level")


def free_level_embedding(eps2, chart=None, ambient=None):
    """f^{-1}(eps2) -> R^4 via (r, mu, lam) = (r1, theta1, theta2)."""
    chart = chart or level_chart("level_free")
    ambient = ambient or r4_polar_chart()

    def eval_fn(p):
        r, mu, lam = p.coords
        r2 = math.sqrt(r * r + eps2)
        return ambient.point(r, mu, r2, lam)

    def jac(p):
        r = p[0]
        r2 = math.sqrt(r * r + eps2)
        out = np.zeros((4, 3))
        out[0, 0] = 1.0
        out[1, 1] = 1.0
        out[2, 0] = r / r2
        out[3, 2] = 1.0
        return out

    return ChartMap(chart, ambient, eval_fn, jac, label="free-level")


def attaching_contact_form(chart, eps1):
    """(r^2 dmu - (r^2 - eps1 - 1) dlam)/2 on the attaching level."""
    return form_from_components(
        chart,
        1,
        {
            (1,): lambda p: 0.5 * p[0] ** 2,
            (2,): lambda p: -0.5 * (p[0] ** 2 - eps1 - 1.0),
        },
        label="alpha_attach",
        analytic_d=form_from_components(
            chart,
            2,
            {(0, 1): lambda p: p[0], (0, 2): lambda p: -p[0]},
            label="d_alpha_attach",
            analytic_d=zero_form(chart, 3),
        ),
    )


def free_contact_form(chart, eps2):
    """((r^2 - 1) dmu + (r^2 + eps2) dlam)/2 on the free level."""
    return form_from_components(
        chart,
        1,
        {
            (1,): lambda p: 0.5 * (p[0] ** 2 - 1.0),
            (2,): lambda p: 0.5 * (p[0] ** 2 + eps2),
        },
        label="alpha_free",
        analytic_d=form_from_components(
            chart,
            2,
            {(0, 1): lambda p: p[0], (0, 2): lambda p: p[0]},
            label="d_alpha_free",
            analytic_d=zero_form(chart, 3),
        ),
    )


def twisted_free_contact_form(chart, twist):
    """dlam + t(r^2) dmu for a twist profile t (a function of r^2)."""
    return form_from_components(
        chart,
        1,
        {(1,): lambda p: twist(p[0] ** 2), (2,): 1.0},
        label="alpha_free_twisted",
        analytic_d=form_from_components(
            chart,
            2,
            {(0, 1): lambda p: 2.0 * p[0] * twist.d(p[0] ** 2)},
            label="d_alpha_free_twisted",
        ),
    )


def weak_flow_closed_form(eps1, point3, t):
    """Closed-form time-t flow of the radial-minus-unit dilation.

    Starting on f^{-1}(eps1) in level coordinates (r, mu, lam):
    r1^2 = (r^2 - eps1 - 1) e^t + 1, theta1 = -lam, r2^2 = r^2 e^t,
    theta2 = mu.  Returns raw ambient coordinates (not reduced).
    """
    r, mu, lam = point3.coords
    growth = math.exp(t)
    r1sq = (r * r - eps1 - 1.0) * growth + 1.0
    r2sq = r * r * growth
    if r1sq < 0.0:
        raise ValueError(f"closed-form flow undefined (core reached) for r={r}, t={t}")
    return (math.sqrt(r1sq), -lam, math.sqrt(r2sq), mu)


def pair_flow_closed_form(a_const, d_const, point3, t):
    """Closed-form time-t flow of the pair-handle dilation from f^{-1}(eps1).

    r1^2 = (r^2 - 2/A) e^t + 2D, theta1 = -lam, r2^2 = r^2 e^t, theta2 = mu.
    """
    r, mu, lam = point3.coords
    growth = math.exp(t)
    r1sq = (r * r - 2.0 / a_const) * growth + 2.0 * d_const
    r2sq = r * r * growth
    if r1sq < 0.0:
        raise ValueError(f"closed-form flow undefined (core reached) for r={r}, t={t}")
    return (math.sqrt(r1sq), -lam, math.sqrt(r2sq), mu)


# ---------------------------------------------------------------------------
# pair-handle fields and induced forms
# ---------------------------------------------------------------------------

def pair_handle_fields(chart, c_const, d_const, tube=None):
    """The dilation-contraction pair guiding the pair handle.

    V+ = (r1/2 - D/r1) dr1 + (r2/2) dr2   (undefined on r1 = 0)
    V- = -(r1/2) dr1 - (r2/2 - C/r2) dr2  (undefined on r2 = 0)

    With these placements the pair transversely covers the f-levels on
    (-2D, 2C), the induced sum form on the attaching level is C dmu + D dlam,
    and the displayed flow and attaching forms hold verbatim.
    """
    tube = chart.singular_radius if tube is None else tube
    v_plus = VectorField(
        chart,
        lambda p: [0.5 * p[0] - d_const / p[0], 0.0, 0.5 * p[2], 0.0],
        domain=lambda p: p[0] >= tube,
        label="V_plus",
    )
    v_minus = VectorField(
        chart,
        lambda p: [-0.5 * p[0], 0.0, -(0.5 * p[2] - c_const / p[2]), 0.0],
        domain=lambda p: p[2] >= tube,
        label="V_minus",
    )
    return v_plus, v_minus


def pair_attaching_form(chart, a_const):
    """(r^2 (dmu - dlam))/2 + dlam/A on the attaching level."""
    return form_from_components(
        chart,
        1,
        {
            (1,): lambda p: 0.5 * p[0] ** 2,
            (2,): lambda p: 1.0 / a_const - 0.5 * p[0] ** 2,
        },
        label="alpha_plus_attach",
        analytic_d=form_from_components(
            chart,
            2,
            {(0, 1): lambda p: p[0], (0, 2): lambda p: -p[0]},
            label="d_alpha_plus_attach",
            analytic_d=zero_form(chart, 3),
        ),
    )


def constant_sum_form(chart, c_const, d_const):
    """C dmu + D dlam (closed)."""
    return form_from_components(
        chart,
        1,
        {(1,): float(c_const), (2,): float(d_const)},
        label="alpha_zero_const",
        analytic_d=zero_form(chart, 2),
    )


def standard_model_pair_forms(chart, a, b, c, d):
    """The well-behaved model pair with structural data (A, B, C, D).

    alpha_plus = (r^2 dmu + dlam)/(B + A r^2) and alpha_minus =
    C dmu + D dlam - alpha_plus; analytic derivatives attached.
    """
    a, b, c, d = float(a), float(b), float(c), float(d)

    def denom(p):
        return b + a * p[0] ** 2

    d_plus = form_from_components(
        chart,
        2,
        {
            (0, 1): lambda p: 2.0 * p[0] * b / denom(p) ** 2,
            (0, 2): lambda p: -2.0 * p[0] * a / denom(p) ** 2,
        },
        label="d_alpha_plus",
        analytic_d=zero_form(chart, 3),
    )
    alpha_plus = form_from_components(
        chart,
        1,
        {(1,): lambda p: p[0] ** 2 / denom(p), (2,): lambda p: 1.0 / denom(p)},
        label="alpha_plus_model",
        analytic_d=d_plus,
    )
    alpha_minus = form_from_components(
        chart,
        1,
        {
            (1,): lambda p: c - p[0] ** 2 / denom(p),
            (2,): lambda p: d - 1.0 / denom(p),
        },
        label="alpha_minus_model",
        analytic_d=d_plus * -1.0,
    )
    return alpha_plus, alpha_minus


def model_pair_samples(chart, r_lo=0.1, r_hi=1.5, n_lattice=(8, 4, 4), n_random=64, seed=7):
    return box_samples(
        chart,
        [(r_lo, r_hi), (0.0, TWO_PI), (0.0, TWO_PI)],
        n_lattice,
        n_random,
        seed,
    )


# ---------------------------------------------------------------------------
# 3-sphere model (radius sqrt(2)) and its fibered links
# ---------------------------------------------------------------------------

def sphere_chart(singular_radius=1e-3):
    """Tube coordinates (r, mu, lam) near the first core circle of S^3.

    The sphere has radius sqrt(2): r = r1, mu = theta1, lam = theta2 and
    r2 = sqrt(2 - r^2); the chart covers 0 <= r < sqrt(2).
    """
    return Chart(
        name="sphere_tube",
        coord_names=("r", "mu", "lam"),
        periodic=(False, True, True),
        domain=lambda c: 0.0 <= c[0] < math.sqrt(2.0),
        singular_radius=singular_radius,
    )


def sphere_embedding(chart=None, ambient=None, swap=False):
    """Embedding of the tube chart into R^4; swap exchanges the two circles."""
    chart = chart or sphere_chart()
    ambient = ambient or r4_polar_chart()

    def eval_fn(p):
        r, mu, lam = p.coords
        other = math.sqrt(2.0 - r * r)
        if swap:
            return ambient.point(other, lam, r, mu)
        return ambient.point(r, mu, other, lam)

    def jac(p):
        r = p[0]
        other = math.sqrt(2.0 - r * r)
        out = np.zeros((4, 3))
        if swap:
            out[0, 0] = -r / other
            out[1, 2] = 1.0
            out[2, 0] = 1.0
            out[3, 1] = 1.0
        else:
            out[0, 0] = 1.0
            out[1, 1] = 1.0
            out[2, 0] = -r / other
            out[3, 2] = 1.0
        return out

    return ChartMap(chart, ambient, eval_fn, jac, label="sphere-tube")


def sphere_contact_form(chart):
    """(r^2 dmu + (2 - r^2) dlam)/2: the standard form in tube coordinates."""
    return form_from_components(
        chart,
        1,
        {(1,): lambda p: 0.5 * p[0] ** 2, (2,): lambda p: 0.5 * (2.0 - p[0] ** 2)},
        label="alpha_sphere",
        analytic_d=form_from_components(
            chart,
            2,
            {(0, 1): lambda p: p[0], (0, 2): lambda p: -p[0]},
            label="d_alpha_sphere",
            analytic_d=zero_form(chart, 3),
        ),
    )


def sphere_reeb_field(chart):
    return VectorField(chart, lambda p: [0.0, 1.0, 1.0], label="Reeb_sphere")


# ---------------------------------------------------------------------------
# fibration models for the concavity pipeline
# ---------------------------------------------------------------------------

class ComponentModel:
    """Local data near one link component of a nicely fibered model.

    Carries tube coordinates realizing the zero framing, the contact form,
    the transverse contact field, the fibration differential dp, and the
    exact fiber slope and dp(V) pairing.
    """

    def __init__(self, tag, chart, alpha, v_field, dp_form, slope, dp_of_v):
        self.tag = tag
        self.chart = chart
        self.alpha = alpha
        self.v_field = v_field
        self.dp_form = dp_form
        self.slope = Fraction(slope)
        self.dp_of_v = Fraction(dp_of_v)

    def samples(self, seed=11, r_lo=0.1, r_hi=1.25, n_random=48):
        return box_samples(
            self.chart,
            [(r_lo, r_hi), (0.0, TWO_PI), (0.0, TWO_PI)],
            (6, 4, 4),
            n_random,
            seed,
        )


class FibrationModel:
    """A nicely fibered transverse link model for the pipeline.

    ``ambient_zero_framed`` counts the zero-framed unlinked unknots of the
    ambient surgery description (0 for the sphere models) and
    ``leaf_counts`` the closed foliation leaves attached per fiber family.
    """

    def __init__(self, name, components, ambient_zero_framed=0, leaf_counts=()):
        self.name = name
        self.components = list(components)
        self.ambient_zero_framed = int(ambient_zero_framed)
        self.leaf_counts = tuple(int(k) for k in leaf_counts)


def _unknot_component(tag="K"):
    chart = sphere_chart()
    alpha = sphere_contact_form(chart)
    v = sphere_reeb_field(chart)
    dp = coordinate_form(chart, "mu", label="dp")
    # fibers of p = mu have slope dmu/dlam = 0; dp(V) = 1
    return ComponentModel(tag, chart, alpha, v, dp, Fraction(0), Fraction(1))


def _hopf_component(tag):
    chart = sphere_chart()
    alpha = sphere_contact_form(chart)
    v = sphere_reeb_field(chart)
    dp = form_from_components(
        chart, 1, {(1,): 1.0, (2,): 1.0}, label="dp",
        analytic_d=zero_form(chart, 2),
    )
    # fibers of p = mu + lam have slope -1; dp(V) = 2
    return ComponentModel(tag, chart, alpha, v, dp, Fraction(-1), Fraction(2))


def unknot_model():
    return FibrationModel("unknot", [_unknot_component("K")])


def hopf_model():
    return FibrationModel("hopf", [_hopf_component("K1"), _hopf_component("K2")])


def surface_model(genus, punctures, leaf_counts=()):
    """Disk-bundle boundary over a punctured surface.

    Near each of the n link components the structure is a copy of the unknot
    model; the ambient manifold is the sphere with 2g + n - 1 zero-framed
    surgeries, supplied combinatorially.
    """
    if punctures < 1:
        raise ValueError("surface model needs at least one puncture")
    comps = [_unknot_component(f"K{i+1}") for i in range(punctures)]
    ambient = 2 * genus + punctures - 1
    return FibrationModel(
        f"surface(g={genus},n={punctures})",
        comps,
        ambient_zero_framed=ambient,
        leaf_counts=leaf_counts,
    )


# ---------------------------------------------------------------------------
# Weinstein handle model (Cartesian coordinates)
# ---------------------------------------------------------------------------

def cartesian_chart():
    return Chart(
        name="r4_cartesian",
        coord_names=("x1", "y1", "x2", "y2"),
        periodic=(False, False, False, False),
    )


def cartesian_symplectic_form(chart):
    return form_from_components(
        chart,
        2,
        {(0, 1): 1.0, (2, 3): 1.0},
        label="omega_cart",
        analytic_d=zero_form(chart, 3),
    )


def cartesian_morse_function(chart):
    return ScalarField(
        chart,
        lambda p: -p[0] ** 2 + p[1] ** 2 - p[2] ** 2 + p[3] ** 2,
        lambda p: [-2.0 * p[0], 2.0 * p[1], -2.0 * p[2], 2.0 * p[3]],
        label="f_cart",
    )


def weinstein_field(chart, kind):
    """The model dilation (convex kind) or contraction (concave kind)."""
    if kind == "convex":
        return VectorField(
            chart,
            lambda p: [-p[0], 2.0 * p[1], -p[2], 2.0 * p[3]],
            label="V_weinstein_convex",
        )
    if kind == "concave":
        return VectorField(
            chart,
            lambda p: [-2.0 * p[0], p[1], -2.0 * p[2], p[3]],
            label="V_weinstein_concave",
        )
    raise ValueError("kind must be 'convex' or 'concave'")


def descending_circle_points(eps1, n):
    """n points of the descending circle {y = 0, x1^2 + x2^2 = -eps1}."""
    chart = cartesian_chart()
    rho = math.sqrt(-eps1)
    pts = []
    for k in range(n):
        s = TWO_PI * k / n
        pts.append(chart.point(rho * math.cos(s), 0.0, rho * math.sin(s), 0.0))
    return pts


def descending_circle_tangent(point):
    """Unit tangent of the descending circle at one of its points."""
    x1, _, x2, _ = point.coords
    rho = math.hypot(x1, x2)
    return np.array([-x2 / rho, 0.0, x1 / rho, 0.0])


# ---------------------------------------------------------------------------
# Legendrian tube model for the transverse push-off
# ---------------------------------------------------------------------------

def legendrian_tube_chart(eps):
    """Cartesian tube D_eps x S^1 with coordinates (x, y, lam)."""
    return Chart(
        name="legendrian_tube",
        coord_names=("x", "y", "lam"),
        periodic=(False, False, True),
        domain=lambda c: c[0] ** 2 + c[1] ** 2 < eps * eps,
    )


def legendrian_contact_form(chart):
    """dy - x dlam: the standard Legendrian tube form."""
    return form_from_components(
        chart,
        1,
        {(1,): 1.0, (2,): lambda p: -p[0]},
        label="alpha_legendrian",
        analytic_d=form_from_components(
            chart, 2, {(0, 2): -1.0}, label="d_alpha_legendrian",
            analytic_d=zero_form(chart, 3),
        ),
    )


def pushoff_source_chart(radius=2.0):
    """Cartesian disk-times-circle chart (x, y, lam), disk of given radius."""
    return Chart(
        name="pushoff_source",
        coord_names=("x", "y", "lam"),
        periodic=(False, False, True),
        domain=lambda c: c[0] ** 2 + c[1] ** 2 < radius * radius,
    )


def pushoff_target_chart(eps):
    """Tube chart restricted to {x > 0} where the rewritten form lives."""
    return Chart(
        name="pushoff_target",
        coord_names=("x", "y", "lam"),
        periodic=(False, False, True),
        domain=lambda c: c[0] > 0.0 and c[0] ** 2 + c[1] ** 2 < eps,
    )


def pushoff_source_form(chart):
    """dlam + (x dy - y dx)/2, the rotationally symmetric tube form."""
    return form_from_components(
        chart,
        1,
        {(0,): lambda p: -0.5 * p[1], (1,): lambda p: 0.5 * p[0], (2,): 1.0},
        label="alpha_pushoff_source",
        analytic_d=form_from_components(
            chart, 2, {(0, 1): 1.0}, label="dxdy", analytic_d=zero_form(chart, 3)
        ),
    )


def pushoff_target_form(chart):
    """dlam - dy/x, the Legendrian tube form rewritten over {x > 0}."""
    return form_from_components(
        chart,
        1,
        {(1,): lambda p: -1.0 / p[0], (2,): 1.0},
        label="alpha_pushoff_target",
        analytic_d=form_from_components(
            chart,
            2,
            {(0, 1): lambda p: 1.0 / p[0] ** 2},
            label="d_beta",
            analytic_d=zero_form(chart, 3),
        ),
    )
