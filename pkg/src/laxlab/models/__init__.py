"""Model catalogue: one constructor per integrable family plus a dispatcher.

``build_model`` accepts a flat spec mapping with a ``family`` key (either
the class-style name, e.g. ``"RationalGaudin"``, or the CLI-style name,
e.g. ``"rational-gaudin"``) and family-specific parameters; unknown keys
raise.  Seeded default instances are provided for the families whose
construction needs orbit seeds.
"""

from __future__ import annotations

import numpy as np

from .base import CanonicalChart, Model
from .toda import OpenTodaFlaschka, OpenTodaSkew, OpenTodaUB, tridiag_lax
from .gaudin import RationalGaudin, default_rational_gaudin
from .cyclo import (
    DST,
    CoupledTodaDST,
    CycloCoefficients,
    CyclotomicGaudin,
    PeriodicToda,
    grade_projection,
)
from .elliptic_gaudin import EllipticGaudin

__all__ = [
    "CanonicalChart", "Model", "build_model",
    "OpenTodaFlaschka", "OpenTodaUB", "OpenTodaSkew",
    "PeriodicToda", "DST", "CoupledTodaDST",
    "RationalGaudin", "CyclotomicGaudin", "EllipticGaudin",
    "default_rational_gaudin", "default_cyclotomic_gaudin",
    "CycloCoefficients", "grade_projection", "tridiag_lax",
]


def default_cyclotomic_gaudin(T=2, sites=1, n=2, seed=11):
    """A generic small cyclotomic instance with properly graded seeds."""
    rng = np.random.default_rng(seed)
    omega = np.exp(2j * np.pi / T)
    zetas = np.arange(1, sites + 1, dtype=float) + 0.4j * np.arange(sites)

    def graded(grade):
        raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return grade_projection(raw, grade, omega, T)

    lam0_0 = graded(0)
    lam0_1 = graded(-1)
    lam_inf = graded(1)
    lambdas = [np.diag(rng.standard_normal(n) + 1.0j * np.arange(1, n + 1))
               for _ in range(sites)]
    return CyclotomicGaudin(T, zetas, lam0_0, lam0_1, lambdas, lam_inf)


def _build_open_toda(params, cls):
    return cls(n_sites=int(params.pop("sites", params.pop("N", 3))))


def _build_periodic_toda(params):
    return PeriodicToda(T=int(params.pop("T", 3)))


def _build_dst(params):
    return DST(
        T=int(params.pop("T", 3)),
        zeta1=complex(params.pop("zeta1", 1.0)),
        c=params.pop("c", None),
    )


def _build_coupled(params):
    return CoupledTodaDST(
        T=int(params.pop("T", 3)),
        zeta1=complex(params.pop("zeta1", 1.0)),
        c=params.pop("c", None),
        beta=complex(params.pop("beta", 0.5)),
    )


def _build_rational_gaudin(params):
    if "zetas" in params:
        return RationalGaudin(
            zetas=params.pop("zetas"),
            lambdas=params.pop("lambdas"),
            omega_twist=params.pop("omega_twist", None),
        )
    return default_rational_gaudin(
        sites=int(params.pop("sites", 3)),
        n=int(params.pop("n", 2)),
        seed=int(params.pop("seed", 11)),
    )


def _build_cyclotomic_gaudin(params):
    if "zetas" in params:
        return CyclotomicGaudin(
            T=int(params.pop("T", 2)),
            zetas=params.pop("zetas"),
            lam0_0=params.pop("lam0_0"),
            lam0_1=params.pop("lam0_1"),
            lambdas=params.pop("lambdas"),
            lam_inf=params.pop("lam_inf"),
        )
    return default_cyclotomic_gaudin(
        T=int(params.pop("T", 2)),
        sites=int(params.pop("sites", 1)),
        n=int(params.pop("n", 2)),
        seed=int(params.pop("seed", 11)),
    )


def _build_elliptic_gaudin(params):
    kwargs = {}
    if "tau" in params:
        kwargs["tau"] = complex(params.pop("tau"))
    if "marked_points" in params:
        kwargs["marked_points"] = [complex(z) for z in params.pop("marked_points")]
    if "eval_points" in params:
        kwargs["eval_points"] = [complex(z) for z in params.pop("eval_points")]
    if "trunc" in params:
        kwargs["trunc"] = int(params.pop("trunc"))
    return EllipticGaudin(**kwargs)


_FAMILIES = {
    "OpenTodaFlaschka": lambda p: _build_open_toda(p, OpenTodaFlaschka),
    "open-toda": lambda p: _build_open_toda(p, OpenTodaFlaschka),
    "OpenTodaUB": lambda p: _build_open_toda(p, OpenTodaUB),
    "open-toda-ub": lambda p: _build_open_toda(p, OpenTodaUB),
    "OpenTodaSkew": lambda p: _build_open_toda(p, OpenTodaSkew),
    "open-toda-skew": lambda p: _build_open_toda(p, OpenTodaSkew),
    "PeriodicToda": _build_periodic_toda,
    "periodic-toda": _build_periodic_toda,
    "DST": _build_dst,
    "dst": _build_dst,
    "CoupledTodaDST": _build_coupled,
    "coupled-toda-dst": _build_coupled,
    "RationalGaudin": _build_rational_gaudin,
    "rational-gaudin": _build_rational_gaudin,
    "CyclotomicGaudin": _build_cyclotomic_gaudin,
    "cyclotomic-gaudin": _build_cyclotomic_gaudin,
    "EllipticGaudin": _build_elliptic_gaudin,
    "elliptic-gaudin": _build_elliptic_gaudin,
}

FAMILY_NAMES = tuple(sorted({k for k in _FAMILIES if k == k.lower()}))


def build_model(spec) -> Model:
    """Construct a model from a flat spec mapping with a ``family`` key."""
    params = dict(spec)
    family = params.pop("family", None)
    if family not in _FAMILIES:
        raise ValueError(
            f"unknown model family {family!r}; known: {', '.join(FAMILY_NAMES)}"
        )
    builder = _FAMILIES[family]
    model = builder(params)
    params.pop("seed", None)  # seed is consumed by stateful factories only
    if params:
        raise ValueError(
            f"unused parameters for family {family!r}: {sorted(params)}"
        )
    return model
