"""Dilation-contraction pair machinery.

Given a contact pair, the geometry of the overlap is captured by

    gamma   = d(alpha_plus) = -d(alpha_minus)
    g+/-    = alpha_zero(Reeb of alpha_plus / alpha_minus)
    beta+/- = alpha_zero - g+/- alpha+/-
    Z+/-    the unique kernel field with  i_{Z} gamma = beta

and the counterpart fields on the symplectifications are

    V- = (g+ e^{-t} - 1) d/dt + e^{-t} Z+      on  R x M  with  omega+
    V+ = (g- e^{t} - 1) d/dt + e^{t} Z-        on  R x M  with  omega-

The defining equations (Lie derivative, contraction at the zero slice, and
symplectic orthogonality) are re-checked numerically by verify_dcp, and an
independent 4x4 per-point linear solve provides a second derivation path for
the counterpart fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .certify import (
    STRICT_FLOOR,
    Certificate,
    equation_certificate,
    positivity_certificate,
)
from .contact import ContactPair, make_contact_pair, reeb_field, symplectification
from .geometry import (
    ANALYTIC_TOL,
    DifferentialForm,
    ScalarField,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative,
    pullback,
)

MEMBERSHIP_TOL = 1e-8


@dataclass
class DCPair:
    """A dilation-contraction pair over one symplectic form.

    Either field may be None (a lone dilation or contraction is the
    degenerate case with one empty domain).
    """

    omega: DifferentialForm
    v_plus: Optional[VectorField] = None
    v_minus: Optional[VectorField] = None

    def fields(self):
        out = []
        if self.v_plus is not None:
            out.append((+1, self.v_plus))
        if self.v_minus is not None:
            out.append((-1, self.v_minus))
        return out


@dataclass
class PairGeometry:
    """Solved overlap geometry of a contact pair (cached per point)."""

    pair: ContactPair
    gamma: DifferentialForm
    g_plus: ScalarField
    g_minus: ScalarField
    beta_plus: DifferentialForm
    beta_minus: DifferentialForm
    z_plus: VectorField
    z_minus: VectorField

    def to_csv(self, samples):
        """Sampled scalar/field values as CSV for plotting."""
        names = self.pair.chart.coord_names
        header = list(names) + ["g_plus", "g_minus"]
        header += [f"z_plus_{n}" for n in names] + [f"z_minus_{n}" for n in names]
        lines = [",".join(header)]
        for p in samples:
            zp, zm = self.z_plus(p), self.z_minus(p)
            row = list(p.coords) + [self.g_plus(p), self.g_minus(p)]
            row += list(zp) + list(zm)
            lines.append(",".join(f"{x:.12g}" for x in row))
        return "\n".join(lines) + "\n"


def _kernel_basis(covector):
    """Two vectors spanning the kernel of a nonzero covector on R^3."""
    a = np.asarray(covector, dtype=float)
    # seed with the two coordinate directions least aligned with a
    order = np.argsort(np.abs(a))
    e1 = np.zeros(3)
    e1[order[0]] = 1.0
    e2 = np.zeros(3)
    e2[order[1]] = 1.0
    b1 = e1 - (a @ e1) / (a @ a) * a
    b2 = e2 - (a @ e2) / (a @ a) * a
    b2 = b2 - (b1 @ b2) / (b1 @ b1) * b1
    return b1, b2


def _two_form_matrix(form, point):
    mat = np.zeros((3, 3))
    c = form(point)
    for k, (i, j) in enumerate(form.indices()):
        mat[i, j] = c[k]
        mat[j, i] = -c[k]
    return mat


def solve_pair_geometry(pair, samples, degenerate_tol=1e-9):
    """Solve for g, beta and the kernel fields Z of a contact pair.

    Z is found per point from the 2x2 system on ker(alpha) obtained by
    contracting gamma; membership of the solution in ker(alpha_zero) and the
    opposite kernel is verified at the supplied samples.
    """
    gamma = pair.gamma()
    reeb_p = reeb_field(pair.alpha_plus)
    reeb_m = reeb_field(pair.alpha_minus)
    alpha_zero = pair.alpha_zero

    def make_g(reeb, label):
        cache = {}

        def value(p):
            k = p.key()
            if k not in cache:
                cache[k] = float(alpha_zero(p) @ reeb(p))
            return cache[k]

        return ScalarField(pair.chart, value, label=label)

    g_plus = make_g(reeb_p, "g_plus")
    g_minus = make_g(reeb_m, "g_minus")

    def make_beta(g, alpha, label):
        return DifferentialForm(
            pair.chart,
            1,
            lambda p: alpha_zero(p) - g(p) * alpha(p),
            label=label,
        )

    beta_plus = make_beta(g_plus, pair.alpha_plus, "beta_plus")
    beta_minus = make_beta(g_minus, pair.alpha_minus, "beta_minus")

    def make_z(alpha, beta, label):
        cache = {}

        def solve(point):
            k = point.key()
            if k in cache:
                return cache[k]
            b1, b2 = _kernel_basis(alpha(point))
            gmat = _two_form_matrix(gamma, point)
            # i_Z gamma has components (gmat.T @ Z); restrict Z to ker(alpha)
            m = np.column_stack([gmat.T @ b1, gmat.T @ b2])
            rhs = beta(point)
            sol, *_ = np.linalg.lstsq(m, rhs, rcond=None)
            if np.max(np.abs(m @ sol - rhs)) > max(degenerate_tol, 1e-9 * np.max(np.abs(rhs) + 1)):
                raise ValueError(
                    f"gamma degenerate on ker({alpha.label}) at {point.coords}"
                )
            z = sol[0] * b1 + sol[1] * b2
            cache[k] = z
            return z

        return VectorField(pair.chart, solve, label=label)

    z_plus = make_z(pair.alpha_plus, beta_plus, "z_plus")
    z_minus = make_z(pair.alpha_minus, beta_minus, "z_minus")

    overlap = samples.filtered(pair.m_zero, "overlap")
    for p in overlap:
        for z in (z_plus, z_minus):
            zv = z(p)
            if abs(float(alpha_zero(p) @ zv)) > MEMBERSHIP_TOL:
                raise ValueError(f"{z.label} escapes ker(alpha_zero) at {p.coords}")
            if abs(float(pair.alpha_plus(p) @ zv)) > MEMBERSHIP_TOL:
                raise ValueError(f"{z.label} escapes ker(alpha_plus) at {p.coords}")
            if abs(float(pair.alpha_minus(p) @ zv)) > MEMBERSHIP_TOL:
                raise ValueError(f"{z.label} escapes ker(alpha_minus) at {p.coords}")

    return PairGeometry(
        pair=pair,
        gamma=gamma,
        g_plus=g_plus,
        g_minus=g_minus,
        beta_plus=beta_plus,
        beta_minus=beta_minus,
        z_plus=z_plus,
        z_minus=z_minus,
    )


def counterpart_field(pair, which, geometry=None, symp=None):
    """Closed-form counterpart field on the symplectification.

    which=-1 gives the contraction on the positive symplectification,
    which=+1 the dilation on the negative one.  Returns (chart, omega,
    t_field, counterpart).
    """
    if which not in (+1, -1):
        raise ValueError("which must be +1 or -1")
    if geometry is None:
        raise ValueError("solve_pair_geometry result required")
    sign = -which  # V- lives over omega+, V+ over omega-
    if symp is None:
        alpha = pair.alpha_plus if sign > 0 else pair.alpha_minus
        symp = symplectification(alpha, sign)
    chart, omega, t_field = symp
    g = geometry.g_plus if which < 0 else geometry.g_minus
    z = geometry.z_plus if which < 0 else geometry.z_minus
    base = pair.chart

    def coeffs(point):
        t = point.coords[0]
        q = base.point(*point.coords[1:])
        decay = math.exp(-which * t)  # e^{-t} for V-, e^{t} for V+
        out = np.empty(chart.dim)
        out[0] = g(q) * decay - 1.0
        out[1:] = decay * z(q)
        return out

    label = "V_minus" if which < 0 else "V_plus"
    return chart, omega, t_field, VectorField(chart, coeffs, label=label)


def counterpart_linear_solve(pair, symp, base_point, which=-1):
    """Independent 4x4 solve for the counterpart field at the zero slice.

    Solves  i_V omega = alpha_opposite  (with the opposite form lifted by a
    zero dt component) at t = 0; the dt-component equation is exactly the
    symplectic-orthogonality condition against d/dt.
    """
    chart, omega, _ = symp
    point = chart.point(0.0, *base_point.coords)
    mat = np.zeros((4, 4))
    c = omega(point)
    for k, (i, j) in enumerate(omega.indices()):
        mat[i, j] = c[k]
        mat[j, i] = -c[k]
    alpha = pair.alpha_minus if which < 0 else pair.alpha_plus
    rhs = np.concatenate([[0.0], alpha(base_point)])
    return np.linalg.solve(mat.T, rhs)


def verify_dcp(dcp, surface, pair_expected, samples, tol=ANALYTIC_TOL):
    """Certify the three pair equations plus transversality and coverage.

    ``surface`` parametrizes the 3-manifold inside the chart of dcp.omega;
    the induced forms (contractions restricted to the surface) must match
    ``pair_expected``.  Per-equation maximal violations are recorded in the
    certificate params.
    """
    omega = dcp.omega
    base_samples = samples
    worst = {"lie": 0.0, "contraction": 0.0, "orthogonality": 0.0}
    transversality_margin = float("inf")
    count = 0

    lie_forms = {}
    restricted = {}
    for sign, v in dcp.fields():
        lie_forms[sign] = lie_derivative(v, omega)
        restricted[sign] = pullback(surface, interior_product(v, omega))

    expected = {
        +1: pair_expected.alpha_plus,
        -1: pair_expected.alpha_minus,
    }
    domains = {+1: pair_expected.m_plus, -1: pair_expected.m_minus}

    for p in base_samples:
        count += 1
        ambient = surface(p)
        covered = False
        jac = surface.jacobian(p)
        for sign, v in dcp.fields():
            if not domains[sign](p):
                continue
            if not v.in_domain(ambient):
                continue
            covered = True
            lie_res = lie_forms[sign](ambient) - sign * omega(ambient)
            worst["lie"] = max(worst["lie"], float(np.max(np.abs(lie_res))))
            contr_res = restricted[sign](p) - expected[sign](p)
            worst["contraction"] = max(
                worst["contraction"], float(np.max(np.abs(contr_res)))
            )
            det = np.linalg.det(np.column_stack([v(ambient), jac]))
            transversality_margin = min(transversality_margin, det)
        if dcp.v_plus is not None and dcp.v_minus is not None:
            if dcp.v_plus.in_domain(ambient) and dcp.v_minus.in_domain(ambient):
                mat = _ambient_two_form_matrix(omega, ambient)
                val = float(dcp.v_plus(ambient) @ mat @ dcp.v_minus(ambient))
                worst["orthogonality"] = max(worst["orthogonality"], abs(val))
        if not covered:
            return Certificate(
                check_name="dcp-axioms",
                anchor="dcp-axioms",
                sample_count=count,
                max_violation=float("inf"),
                min_margin=float("-inf"),
                verdict="fail",
                params={"uncovered_sample": list(p.coords)},
                seed=getattr(samples, "seed", 0),
            )

    max_violation = max(worst.values())
    params = {f"max_violation_{k}": v for k, v in worst.items()}
    params["min_transversality_margin"] = transversality_margin
    params["tolerance"] = tol
    verdict = (
        "pass"
        if max_violation <= tol and transversality_margin > STRICT_FLOOR
        else "fail"
    )
    return Certificate(
        check_name="dcp-axioms",
        anchor="dcp-axioms",
        sample_count=count,
        max_violation=max_violation,
        min_margin=min(tol - max_violation, transversality_margin),
        verdict=verdict,
        params=params,
        seed=getattr(samples, "seed", 0),
    )


def _ambient_two_form_matrix(omega, point):
    dim = omega.chart.dim
    mat = np.zeros((dim, dim))
    c = omega(point)
    for k, (i, j) in enumerate(omega.indices()):
        mat[i, j] = c[k]
        mat[j, i] = -c[k]
    return mat


def graph_transversality(pair, height, sign, samples, geometry=None):
    """Certify the strict graph-transversality inequality on the overlap.

    The graph of ``height`` inside the symplectification of the sign-side
    form is transverse to the counterpart field iff

        e^{sign*h} < g_sign - dh(Z_sign)

    holds strictly; the certificate requires margin above the strict floor.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if geometry is None:
        geometry = solve_pair_geometry(pair, samples)
    g = geometry.g_plus if sign > 0 else geometry.g_minus
    z = geometry.z_plus if sign > 0 else geometry.z_minus
    overlap = samples.filtered(pair.m_zero, "overlap")

    def value(p):
        dh_z = float(height.gradient(p) @ z(p))
        return g(p) - dh_z - math.exp(sign * height(p))

    return positivity_certificate(
        "graph-transversality",
        "graph-transversality",
        overlap,
        value,
        params={"sign": sign, "height": height.label or "h"},
    )


def induced_graph_pair(pair, height, sign, samples):
    """The induced contact pair on the graph of a height function.

    The sign-side form rescales by e^h, the closed sum form is unchanged,
    and the opposite form is their difference.
    """
    alpha_scaled = DifferentialForm(
        pair.chart,
        1,
        lambda p: math.exp(height(p)) * (pair.alpha_plus(p) if sign > 0 else pair.alpha_minus(p)),
        label=("e^h*" + (pair.alpha_plus.label if sign > 0 else pair.alpha_minus.label)),
    )
    alpha_opposite = DifferentialForm(
        pair.chart,
        1,
        lambda p: pair.alpha_zero(p) - alpha_scaled(p),
        label="alpha_zero-e^h*alpha",
    )
    if sign > 0:
        return make_contact_pair(
            alpha_scaled, alpha_opposite, (pair.m_plus, pair.m_minus), samples
        )
    return make_contact_pair(
        alpha_opposite, alpha_scaled, (pair.m_plus, pair.m_minus), samples
    )
