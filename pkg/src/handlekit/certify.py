"""Certificates: the universal output of every verifier in the toolkit.

A certificate records what was checked, over how many samples, the worst
violation, the smallest margin, the tolerance, and the sampling seed.  Two
builders cover the two shapes of check that occur:

* equation checks  |residual| <= tol at every sample, and
* strict positivity checks  value > floor at every sample.

Serialization is a versioned JSON document with sorted keys so that repeated
runs with the same seed are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = "1"

# Strict inequalities are certified with this much slack; equality fails.
STRICT_FLOOR = 1e-9


class CertificateFailure(RuntimeError):
    """Raised by constructors that refuse to return a failing object."""

    def __init__(self, certificate):
        super().__init__(
            f"check '{certificate.check_name}' failed: max violation "
            f"{certificate.max_violation:.3e}, min margin {certificate.min_margin:.3e}"
        )
        self.certificate = certificate


@dataclass
class Certificate:
    check_name: str
    anchor: str
    sample_count: int
    max_violation: float
    min_margin: float
    verdict: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "check_name": self.check_name,
            "paper_anchor": self.anchor,
            "sample_count": self.sample_count,
            "max_violation": self.max_violation,
            "min_margin": self.min_margin,
            "verdict": self.verdict,
            "params": _jsonable(self.params),
            "seed": self.seed,
        }

    def to_json_line(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def raise_if_failed(self):
        if not self.passed:
            raise CertificateFailure(self)
        return self


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    try:
        import fractions

        if isinstance(value, fractions.Fraction):
            return f"{value.numerator}/{value.denominator}"
    except Exception:  # pragma: no cover
        pass
    return float(value)


def equation_certificate(check_name, anchor, samples, residual_fn, tol,
                         params=None, seed=None):
    """Certify |residual| <= tol at every sample.

    residual_fn maps a sample to a float or an array; arrays are reduced by
    the max absolute entry.
    """
    worst = 0.0
    count = 0
    for p in samples:
        r = residual_fn(p)
        try:
            r = max(abs(float(x)) for x in r)
        except TypeError:
            r = abs(float(r))
        worst = max(worst, r)
        count += 1
    record = dict(params or {})
    record["tolerance"] = tol
    verdict = "pass" if worst <= tol else "fail"
    return Certificate(
        check_name=check_name,
        anchor=anchor,
        sample_count=count,
        max_violation=worst,
        min_margin=tol - worst,
        verdict=verdict,
        params=record,
        seed=_seed_of(samples, seed),
    )


def positivity_certificate(check_name, anchor, samples, value_fn,
                           floor=STRICT_FLOOR, params=None, seed=None):
    """Certify value > floor (strict) at every sample; records the min margin."""
    worst_margin = float("inf")
    count = 0
    for p in samples:
        v = float(value_fn(p))
        worst_margin = min(worst_margin, v - floor)
        count += 1
    record = dict(params or {})
    record["strict_floor"] = floor
    if count == 0:
        worst_margin = float("nan")
        verdict = "fail"
        record["empty_sample_set"] = True
    else:
        verdict = "pass" if worst_margin > 0.0 else "fail"
    return Certificate(
        check_name=check_name,
        anchor=anchor,
        sample_count=count,
        max_violation=max(0.0, -worst_margin) if count else float("inf"),
        min_margin=worst_margin,
        verdict=verdict,
        params=record,
        seed=_seed_of(samples, seed),
    )


def condition_certificate(check_name, anchor, conditions, params=None, seed=0):
    """Certify a finite list of named boolean conditions (exact checks)."""
    record = dict(params or {})
    failed = [name for name, ok in conditions if not ok]
    record["conditions"] = {name: bool(ok) for name, ok in conditions}
    verdict = "pass" if not failed else "fail"
    return Certificate(
        check_name=check_name,
        anchor=anchor,
        sample_count=len(conditions),
        max_violation=float(len(failed)),
        min_margin=0.0 if failed else 1.0,
        verdict=verdict,
        params=record,
        seed=seed,
    )


def _seed_of(samples, seed):
    if seed is not None:
        return seed
    return getattr(samples, "seed", 0)


def write_json_lines(certificates, stream):
    for cert in certificates:
        stream.write(cert.to_json_line())
        stream.write("\n")
