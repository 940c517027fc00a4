"""Handle builders with validated parameters and attached certificates.

Three families are built here:

* the weak-convexity handle driven by the radial-minus-unit dilation,
* the contact-pair handle driven by a dilation-contraction pair with
  prepared structural data, and
* the Weinstein convex / concave model handles in Cartesian coordinates.

A handle descriptor stores the parameters, the derived flow constants, the
guiding fields, parametrizations of the attaching and free boundaries (the
free boundary as a graph over the attaching level with the flow time as
fourth coordinate), attaching metadata, and the certificate collection.  A
builder refuses to return a descriptor whose certificates do not all pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .certify import (
    Certificate,
    CertificateFailure,
    condition_certificate,
    equation_certificate,
    positivity_certificate,
)
from .contact import check_contact, graph_map, symplectification
from .geometry import (
    ANALYTIC_TOL,
    ChartMap,
    DifferentialForm,
    ScalarField,
    VectorField,
    flow,
    interior_product,
    lie_derivative,
    wedge,
)
from .models import (
    attaching_contact_form,
    attaching_level_embedding,
    cartesian_chart,
    cartesian_morse_function,
    cartesian_symplectic_form,
    constant_sum_form,
    descending_circle_points,
    descending_circle_tangent,
    free_contact_form,
    free_level_embedding,
    level_chart,
    morse_function,
    pair_attaching_form,
    pair_flow_closed_form,
    pair_handle_fields,
    r4_polar_chart,
    standard_symplectic_form,
    twisted_free_contact_form,
    weak_dilation_field,
    weak_flow_closed_form,
    weinstein_field,
)
from .sampling import SampleSet, box_samples, radii

TWO_PI = 2.0 * math.pi


class ParameterError(ValueError):
    """A named builder parameter violates its precondition."""

    def __init__(self, name, message):
        super().__init__(f"{name}: {message}")
        self.parameter = name


class HandleConstructionError(RuntimeError):
    """A builder certificate failed; the certificate rides along."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


# ---------------------------------------------------------------------------
# profile functions
# ---------------------------------------------------------------------------

@dataclass
class ProfileFunction:
    """A piecewise C^1 profile with plateau and monotonicity records.

    ``plateaus`` is a tuple of (lo, hi, value) bands and ``monotone`` a tuple
    of (lo, hi, kind) bands with kind in {'decreasing', 'increasing'}.
    """

    eval_fn: Callable
    deriv_fn: Callable
    breakpoints: tuple = ()
    plateaus: tuple = ()
    monotone: tuple = ()
    label: str = "h"
    meta: dict = field(default_factory=dict)
    certificate: Optional[Certificate] = None

    def __call__(self, r):
        return float(self.eval_fn(r))

    def d(self, r):
        return float(self.deriv_fn(r))

    def c1_defect(self, step=1e-6):
        """Worst mismatch between one-sided difference quotients and deriv."""
        worst = 0.0
        for b in self.breakpoints:
            left = (self(b) - self(b - step)) / step
            right = (self(b + step) - self(b)) / step
            worst = max(worst, abs(left - self.d(b - step)), abs(right - self.d(b + step)))
            worst = max(worst, abs(left - right) * 0.0)  # one-sided quotients only
        return worst

    def check_shape(self, n=400):
        """Sampled verification of the plateau and monotonicity records."""
        issues = []
        for lo, hi, value in self.plateaus:
            hi_eff = hi if math.isfinite(hi) else lo + 1.0
            for r in np.linspace(lo, hi_eff, 32):
                if abs(self(r) - value) > 1e-9:
                    issues.append(f"plateau [{lo},{hi}] violated at r={r}")
                    break
        for lo, hi, kind in self.monotone:
            vals = [self(r) for r in np.linspace(lo, hi, n)]
            diffs = np.diff(vals)
            if kind == "decreasing" and np.any(diffs > 1e-12):
                issues.append(f"not decreasing on [{lo},{hi}]")
            if kind == "increasing" and np.any(diffs < -1e-12):
                issues.append(f"not increasing on [{lo},{hi}]")
        return issues

    def as_scalar_field(self, chart, coord=0, label=None):
        """Lift to a scalar field depending on one chart coordinate."""
        grad = lambda p: [
            (self.d(p[coord]) if j == coord else 0.0) for j in range(chart.dim)
        ]
        return ScalarField(
            chart, lambda p: self(p[coord]), grad, label or self.label
        )


def _smoothstep(u):
    return u * u * u * (10.0 + u * (6.0 * u - 15.0))


def _smoothstep_d(u):
    return 30.0 * u * u * (1.0 - u) ** 2


def default_profile(r1, r2, height):
    """C^2 monotone plateau-descent profile: height on [0, r1], 0 past r2.

    Quintic smoothstep descent; the derivative magnitude is bounded by
    15 * height / (8 * (r2 - r1)).
    """
    if not r1 < r2:
        raise ParameterError("R1", f"need R1 < R2, got {r1} >= {r2}")
    if height <= 0:
        raise ParameterError("T", "profile height must be positive")
    width = r2 - r1

    def eval_fn(r):
        if r <= r1:
            return height
        if r >= r2:
            return 0.0
        return height * (1.0 - _smoothstep((r - r1) / width))

    def deriv_fn(r):
        if r <= r1 or r >= r2:
            return 0.0
        return -height * _smoothstep_d((r - r1) / width) / width

    return ProfileFunction(
        eval_fn,
        deriv_fn,
        breakpoints=(r1, r2),
        plateaus=((0.0, r1, height), (r2, math.inf, 0.0)),
        monotone=((r1, r2, "decreasing"),),
        label="plateau-descent",
        meta={"R1": r1, "R2": r2, "T": height, "max_slope": 15.0 * height / (8.0 * width)},
    )


def twist_function(eps2, delta=0.05, r_max=None, n_check=1000):
    """A twist profile t(x), x = r^2, for capping off the free boundary.

    Vanishes at 0, strictly increasing, and equal to (x-1)/(x+eps2) for
    x >= 1 + delta.  The inner blend is s1*(floor*x + (1-floor)*x^(k+1)/...)
    chosen so the derivative stays above a positive floor everywhere (a
    plain cubic Hermite blend overshoots for small delta).  The returned
    profile carries a certificate for: t(0) = 0, strictly positive
    derivative, tail equality, and 1 - t > 0 up to the working radius.
    """
    if eps2 <= 0:
        raise ParameterError("eps2", "must be positive")
    if delta <= 0:
        raise ParameterError("delta", "must be positive")
    length = 1.0 + delta
    v1 = delta / (1.0 + delta + eps2)
    s1 = (1.0 + eps2) / (1.0 + delta + eps2) ** 2
    floor = 1e-4
    ratio = v1 / (s1 * length)
    if ratio <= floor:
        raise ParameterError("delta", "too small for the derivative floor")
    k = (1.0 - floor) / (ratio - floor) - 1.0

    def tail(x):
        return (x - 1.0) / (x + eps2)

    def tail_d(x):
        return (1.0 + eps2) / (x + eps2) ** 2

    def eval_fn(x):
        if x >= length:
            return tail(x)
        if x <= 0.0:
            return 0.0
        u = x / length
        return s1 * (floor * x + (1.0 - floor) * length * u ** (k + 1.0) / (k + 1.0))

    def deriv_fn(x):
        if x >= length:
            return tail_d(x)
        if x <= 0.0:
            return s1 * floor
        return s1 * (floor + (1.0 - floor) * (x / length) ** k)

    profile = ProfileFunction(
        eval_fn,
        deriv_fn,
        breakpoints=(length,),
        monotone=((0.0, length, "increasing"),),
        label="twist",
        meta={"eps2": eps2, "delta": delta, "derivative_floor": s1 * floor},
    )

    top = (r_max if r_max else 2.0) ** 2
    xs = np.linspace(length / n_check, length, n_check)
    conditions = [
        ("vanishes_at_zero", abs(profile(0.0)) == 0.0),
        ("boundary_value", abs(profile(length) - v1) < 1e-15),
        ("derivative_positive", all(profile.d(x) > 1e-9 for x in xs)),
        (
            "tail_equality",
            all(
                abs(profile(x) - tail(x)) < 1e-12
                for x in np.linspace(length, top, 64)
            ),
        ),
        (
            "twist_below_one",
            all(profile(x) < 1.0 - 1e-9 for x in np.linspace(0.0, top, 256)),
        ),
    ]
    profile.certificate = condition_certificate(
        "twist-profile",
        "twist-profile",
        conditions,
        params={"eps2": eps2, "delta": delta},
    )
    profile.certificate.raise_if_failed()
    return profile


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

@dataclass
class HandleDescriptor:
    """A built handle: parameters, derived constants, fields, boundaries."""

    family: str
    params: dict
    derived: dict
    fields: dict
    boundaries: dict
    attaching: dict
    certificates: list = field(default_factory=list)

    @property
    def all_pass(self):
        return all(c.passed for c in self.certificates)

    def certificate(self, name):
        for c in self.certificates:
            if c.check_name == name:
                return c
        raise KeyError(name)

    def to_json_dict(self):
        digests = [
            {
                "check_name": c.check_name,
                "verdict": c.verdict,
                "max_violation": c.max_violation,
                "min_margin": c.min_margin,
                "sample_count": c.sample_count,
            }
            for c in self.certificates
        ]
        params = {
            k: (f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v)
            for k, v in self.params.items()
            if isinstance(v, (int, float, str, Fraction))
        }
        return {
            "schema_version": "1",
            "family": self.family,
            "params": params,
            "derived": self.derived,
            "attaching": self.attaching,
            "certificates": digests,
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def flow_lines_csv(self, radii_list=None, n_steps=40):
        """Sampled guiding-field flow lines as CSV (t, r1, theta1, r2, theta2)."""
        v = self.fields.get("v_plus") or self.fields["v"]
        embed = self.boundaries["attach_embedding"]
        total = self.derived["T"]
        rows = ["t,r1,theta1,r2,theta2"]
        if radii_list is None:
            lo = self.derived.get("flow_radius_min", self.params["R1"])
            radii_list = np.linspace(lo * 1.05, self.params["R3"], 5)
        for r in radii_list:
            start = embed(embed.source.point(r, 0.7, 1.9))
            for k in range(n_steps + 1):
                t = total * k / n_steps
                try:
                    p = flow(v, start, t, step=1e-2)
                except Exception:
                    break
                rows.append(
                    f"{t:.8g},{p[0]:.8g},{p[1]:.8g},{p[2]:.8g},{p[3]:.8g}"
                )
        return "\n".join(rows) + "\n"


def _collect(descriptor_certs, cert, reject_message=None):
    descriptor_certs.append(cert)
    if not cert.passed and reject_message:
        raise HandleConstructionError(
            f"{reject_message} (max violation {cert.max_violation:.3e})", cert
        )
    return cert


# ---------------------------------------------------------------------------
# weak-convexity handle
# ---------------------------------------------------------------------------

def build_weak_convex_handle(eps1, eps2, r1, r2, r3, profile=None, seed=3,
                             density=6):
    """Build the weak-convexity handle and certify its defining properties.

    Preconditions: -1 < eps1 < 0 < eps2 and r3 > r2 > r1 > sqrt(1 + eps1).
    Certificates: the guiding field is a dilation for the standard form,
    it is positively transverse to f-levels above f = -1, and the time-T
    flow carries attaching-level circles onto the target level set.
    """
    if not -1.0 < eps1 < 0.0:
        raise ParameterError("eps1", f"need -1 < eps1 < 0, got {eps1}")
    if eps2 <= 0.0:
        raise ParameterError("eps2", f"need eps2 > 0, got {eps2}")
    floor_radius = math.sqrt(1.0 + eps1)
    if not r1 > floor_radius:
        raise ParameterError("R1", f"need R1 > sqrt(1+eps1) = {floor_radius:.6f}")
    if not r1 < r2 < r3:
        raise ParameterError("R2", "need R1 < R2 < R3")

    cap_radius = math.sqrt(eps2 * (1.0 + eps1) / (1.0 + eps2))
    total_time = math.log((1.0 + eps2) / (1.0 + eps1))
    if profile is None:
        profile = default_profile(r1, r2, total_time)

    ambient = r4_polar_chart()
    omega = standard_symplectic_form(ambient)
    f = morse_function(ambient)
    v = weak_dilation_field(ambient)

    attach_chart = level_chart("level_attach", r_max=r3 * 1.5)
    attach_embed = attaching_level_embedding(eps1, attach_chart, ambient)
    free_chart = level_chart("level_free")
    free_embed = free_level_embedding(eps2, free_chart, ambient)
    alpha1 = attaching_contact_form(attach_chart, eps1)
    alpha2 = free_contact_form(free_chart, eps2)

    certs = []
    ambient_samples = box_samples(
        ambient,
        [(0.12, 2.2), (0.0, TWO_PI), (0.12, 2.2), (0.0, TWO_PI)],
        (density, 3, density, 3),
        48,
        seed,
    )
    lie = lie_derivative(v, omega)
    _collect(
        certs,
        equation_certificate(
            "dilation-identity",
            "dilation-identity",
            ambient_samples,
            lambda p: lie(p) - omega(p),
            ANALYTIC_TOL,
        ),
        "guiding field is not a dilation",
    )

    level_band = ambient_samples.filtered(lambda p: f(p) > -0.95, "f>-0.95")
    _collect(
        certs,
        positivity_certificate(
            "level-transversality",
            "level-transversality",
            level_band,
            lambda p: float(f.gradient(p) @ v(p)),
        ),
        "guiding field not transverse to level sets",
    )

    flow_samples = [
        attach_chart.point(r, mu, lam)
        for r in radii(max(cap_radius * 1.07, 0.05), r3, 8)
        for (mu, lam) in ((0.4, 1.3), (2.9, 5.1))
    ]

    def flow_residual(p3):
        start = attach_embed(p3)
        end = flow(v, start, total_time)
        target = weak_flow_closed_form(eps1, p3, total_time)
        diffs = ambient.delta(end.coords, ambient.reduce(target))
        return list(diffs) + [f(end) - eps2]

    _collect(
        certs,
        equation_certificate(
            "flow-onto-target-level",
            "flow-onto-target-level",
            SampleSet(attach_chart, flow_samples, seed, {"kind": "flow-radii"}),
            flow_residual,
            ANALYTIC_TOL,
        ),
        "flow does not match its closed form",
    )

    shape_issues = profile.check_shape()
    plateau_ok = (
        abs(profile(0.0) - total_time) < 1e-12
        and abs(profile(r1) - total_time) < 1e-12
        and abs(profile(r2)) < 1e-12
        and abs(profile(r3)) < 1e-12
    )
    _collect(
        certs,
        condition_certificate(
            "profile-shape",
            "profile-shape",
            [
                ("plateau_values", plateau_ok),
                ("shape_records", not shape_issues),
                ("c1_defect", profile.c1_defect() < 1e-3),
            ],
            params={"issues": shape_issues[:3]},
        ),
        "profile does not match the required plateau shape",
    )

    symp_chart, _, _ = symplectification(alpha1, +1)
    height = profile.as_scalar_field(attach_chart, coord=0, label="h")
    free_graph = graph_map(symp_chart, attach_chart, height, label="free-boundary-graph")

    descriptor = HandleDescriptor(
        family="weak_convex",
        params={"eps1": eps1, "eps2": eps2, "R1": r1, "R2": r2, "R3": r3},
        derived={"R": cap_radius, "T": total_time, "flow_radius_min": cap_radius},
        fields={"v": v, "omega": omega, "f": f, "alpha1": alpha1, "alpha2": alpha2},
        boundaries={
            "attach_chart": attach_chart,
            "attach_embedding": attach_embed,
            "free_chart": free_chart,
            "free_embedding": free_embed,
            "free_graph": free_graph,
            "graph_chart": symp_chart,
            "profile": profile,
        },
        attaching={"knot": "core-circle", "framing_reference": "coordinate", "framing_offset": 0},
        certificates=certs,
    )
    return descriptor


# ---------------------------------------------------------------------------
# contact-pair handle
# ---------------------------------------------------------------------------

def build_contact_pair_handle(data, eps2, r1, r2, r3, profile=None, seed=5,
                              density=6):
    """Build the prepared-for-surgery handle for structural data (A=B, C, D).

    The attaching level sits at eps1 = 2/A - 2D; the derived constants are
    R = eps2 / (A (D + eps2/2)) and T = log(A (D + eps2/2)).  Certificates:
    the guiding pair satisfies the dilation-contraction equations and
    transversely covers the f-levels on (-2D, 2C), the induced pair on the
    attaching boundary matches its closed form, the time-T flow matches its
    closed form, and the free boundary passes the transversality inequality
    (rejection names the violating radius).
    """
    if not data.prepared:
        raise ParameterError("data", f"structural data {data} is not prepared for surgery")
    a_const = float(data.A)
    c_const = float(data.C)
    d_const = float(data.D)
    if not 0.0 < eps2 < 2.0 * c_const:
        raise ParameterError("eps2", f"need 0 < eps2 < 2C = {2*c_const}")
    eps1 = 2.0 / a_const - 2.0 * d_const
    cap = eps2 / (a_const * (d_const + eps2 / 2.0))
    total_time = math.log(a_const * (d_const + eps2 / 2.0))
    if not cap < r1 < r2 < r3:
        raise ParameterError("R1", f"need R < R1 < R2 < R3 with R = {cap:.6f}")
    if profile is None:
        profile = default_profile(r1, r2, total_time)

    ambient = r4_polar_chart()
    omega = standard_symplectic_form(ambient)
    f = morse_function(ambient)
    v_plus, v_minus = pair_handle_fields(ambient, c_const, d_const)

    attach_chart = level_chart("level_attach", r_max=r3 * 1.5)
    attach_embed = attaching_level_embedding(eps1, attach_chart, ambient)
    alpha_plus_1 = pair_attaching_form(attach_chart, a_const)
    alpha_zero_1 = constant_sum_form(attach_chart, c_const, d_const)

    certs = []
    ambient_samples = box_samples(
        ambient,
        [(0.15, 2.1), (0.0, TWO_PI), (0.15, 2.1), (0.0, TWO_PI)],
        (density, 3, density, 3),
        48,
        seed,
    )
    lie_plus = lie_derivative(v_plus, omega)
    lie_minus = lie_derivative(v_minus, omega)

    def dcp_residual(p):
        out = list(lie_plus(p) - omega(p))
        out += list(lie_minus(p) + omega(p))
        mat = np.zeros((4, 4))
        c = omega(p)
        for k, (i, j) in enumerate(omega.indices()):
            mat[i, j] = c[k]
            mat[j, i] = -c[k]
        out.append(float(v_plus(p) @ mat @ v_minus(p)))
        return out

    _collect(
        certs,
        equation_certificate(
            "pair-dilation-contraction",
            "pair-dilation-contraction",
            ambient_samples,
            dcp_residual,
            ANALYTIC_TOL,
        ),
        "guiding pair fails the dilation-contraction equations",
    )

    margin = 0.05
    band = ambient_samples.filtered(
        lambda p: -2.0 * d_const + margin < f(p) < 2.0 * c_const - margin, "f-band"
    )

    def cover_margin(p):
        vals = []
        if v_plus.in_domain(p):
            vals.append(float(f.gradient(p) @ v_plus(p)))
        if v_minus.in_domain(p):
            vals.append(float(f.gradient(p) @ v_minus(p)))
        return max(vals) if vals else -1.0

    _collect(
        certs,
        positivity_certificate(
            "pair-transverse-cover",
            "pair-transverse-cover",
            band,
            cover_margin,
        ),
        "pair does not transversely cover the f-levels",
    )

    attach_samples = box_samples(
        attach_chart,
        [(0.08, r3), (0.0, TWO_PI), (0.0, TWO_PI)],
        (6, 3, 3),
        32,
        seed,
    )
    contracted = interior_product(v_plus, omega)

    def induced_residual(p3):
        # pull i_{V+} omega back to the attaching chart and compare
        jac = attach_embed.jacobian(p3)
        amb = contracted(attach_embed(p3))
        pulled = jac.T @ amb
        return pulled - alpha_plus_1(p3)

    _collect(
        certs,
        equation_certificate(
            "induced-attaching-form",
            "induced-attaching-form",
            attach_samples,
            induced_residual,
            ANALYTIC_TOL,
        ),
        "induced form on the attaching boundary mismatches its closed form",
    )

    flow_start = math.sqrt(cap) * 1.07
    flow_points = [
        attach_chart.point(r, mu, lam)
        for r in radii(flow_start, max(r3, flow_start * 1.5), 6)
        for (mu, lam) in ((0.9, 2.2),)
    ]

    def flow_residual(p3):
        start = attach_embed(p3)
        end = flow(v_plus, start, total_time)
        target = pair_flow_closed_form(a_const, d_const, p3, total_time)
        diffs = ambient.delta(end.coords, ambient.reduce(target))
        return list(diffs) + [f(end) - eps2]

    _collect(
        certs,
        equation_certificate(
            "flow-onto-target-level",
            "flow-onto-target-level",
            SampleSet(attach_chart, flow_points, seed, {"kind": "flow-radii"}),
            flow_residual,
            ANALYTIC_TOL,
        ),
        "flow does not match its closed form",
    )

    symp_chart, _, _ = symplectification(alpha_plus_1, +1)
    height = profile.as_scalar_field(attach_chart, coord=0, label="h")
    free_graph = graph_map(symp_chart, attach_chart, height, label="free-boundary-graph")

    descriptor = HandleDescriptor(
        family="contact_pair",
        params={
            "A": data.A,
            "B": data.B,
            "C": data.C,
            "D": data.D,
            "eps1": eps1,
            "eps2": eps2,
            "R1": r1,
            "R2": r2,
            "R3": r3,
        },
        derived={
            "R": cap,
            "T": total_time,
            "R2_bound": math.sqrt(c_const / (a_const * (c_const + d_const))),
            "flow_radius_min": math.sqrt(cap),
        },
        fields={
            "v_plus": v_plus,
            "v_minus": v_minus,
            "omega": omega,
            "f": f,
            "alpha_plus_1": alpha_plus_1,
            "alpha_zero_1": alpha_zero_1,
        },
        boundaries={
            "attach_chart": attach_chart,
            "attach_embedding": attach_embed,
            "free_graph": free_graph,
            "graph_chart": symp_chart,
            "profile": profile,
        },
        attaching={"knot": "core-circle", "framing_reference": "coordinate", "framing_offset": 0},
        certificates=certs,
    )

    free_cert = check_free_boundary_transversality(descriptor)
    descriptor.certificates.append(free_cert)
    if not free_cert.passed:
        raise HandleConstructionError(
            "free boundary not transverse to the contraction at radius "
            f"{free_cert.params.get('violating_radius')}",
            free_cert,
        )
    return descriptor


def check_free_boundary_transversality(descriptor, n_radii=1000):
    """Certify the free-boundary transversality inequality on [R1, R2].

    Evaluates the strict bound

        e^{h(r)} < A(C+D) - (1/r) h'(r) (C - A(C+D) r^2)

    at sampled radii.  The dilation side is transverse by construction and
    is recorded as such; a failing radius is recorded in the params.
    """
    if descriptor.family != "contact_pair":
        raise ParameterError("descriptor", "free-boundary check needs the pair family")
    a_const = float(descriptor.params["A"])
    c_const = float(descriptor.params["C"])
    d_const = float(descriptor.params["D"])
    profile = descriptor.boundaries["profile"]
    r1, r2 = descriptor.params["R1"], descriptor.params["R2"]
    g_plus = a_const * (c_const + d_const)

    rs = radii(r1, r2, n_radii)
    margins = []
    for r in rs:
        rhs = g_plus - profile.d(r) * (c_const - g_plus * r * r) / r
        margins.append(rhs - math.exp(profile(r)))
    margins = np.asarray(margins)
    worst = int(np.argmin(margins))
    params = {
        "g_plus": g_plus,
        "dilation_side": "transverse by construction",
        "violating_radius": float(rs[worst]) if margins[worst] <= 1e-9 else None,
    }
    verdict = "pass" if margins.min() > 1e-9 else "fail"
    return Certificate(
        check_name="free-boundary-transversality",
        anchor="free-boundary-transversality",
        sample_count=n_radii,
        max_violation=max(0.0, 1e-9 - float(margins.min())),
        min_margin=float(margins.min()),
        verdict=verdict,
        params=params,
        seed=0,
    )


# ---------------------------------------------------------------------------
# Weinstein model handles
# ---------------------------------------------------------------------------

def build_weinstein_handle(kind, eps1=-0.5, eps2=0.5, seed=9, density=5):
    """Build the convex or concave Weinstein model handle.

    Certificates: the model field satisfies the dilation (convex) or
    contraction (concave) identity, it is positively transverse to the
    tested f-levels, and the descending circle is isotropic for the induced
    form.  The handle framing is one less than the surface framing of the
    descending circle, recorded as attaching metadata.
    """
    if eps1 >= 0:
        raise ParameterError("eps1", "need eps1 < 0")
    chart = cartesian_chart()
    omega = cartesian_symplectic_form(chart)
    f = cartesian_morse_function(chart)
    v = weinstein_field(chart, kind)
    sign = 1.0 if kind == "convex" else -1.0

    certs = []
    samples = box_samples(
        chart,
        [(-1.4, 1.4)] * 4,
        (density, density, density, density),
        48,
        seed,
    ).filtered(lambda p: sum(x * x for x in p.coords) > 0.04, "away-from-origin")

    lie = lie_derivative(v, omega)
    _collect(
        certs,
        equation_certificate(
            "weinstein-scaling-identity",
            "weinstein-scaling-identity",
            samples,
            lambda p: lie(p) - sign * omega(p),
            ANALYTIC_TOL,
        ),
        "model field fails its scaling identity",
    )

    level_band = samples.filtered(
        lambda p: abs(f(p) - eps1) < 0.35 or abs(f(p) - eps2) < 0.35, "near-levels"
    )
    _collect(
        certs,
        positivity_certificate(
            "level-transversality",
            "level-transversality",
            level_band,
            lambda p: float(f.gradient(p) @ v(p)),
        ),
        "model field not transverse to the tested levels",
    )

    contracted = interior_product(v, omega)
    circle = descending_circle_points(eps1, 100)
    _collect(
        certs,
        equation_certificate(
            "descending-circle-isotropic",
            "descending-circle-isotropic",
            SampleSet(chart, circle, seed, {"kind": "descending-circle"}),
            lambda p: float(contracted(p) @ descending_circle_tangent(p)),
            1e-8,
        ),
        "descending circle is not isotropic for the induced form",
    )

    return HandleDescriptor(
        family=f"weinstein_{kind}",
        params={"eps1": eps1, "eps2": eps2},
        derived={"scaling_sign": sign, "T": math.nan, "R": math.nan},
        fields={"v": v, "omega": omega, "f": f},
        boundaries={},
        attaching={
            "knot": "descending-circle",
            "framing_reference": "surface-framing",
            "framing_offset": -1,
        },
        certificates=certs,
    )
