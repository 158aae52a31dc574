"""Bergman-space quasi-norms and membership of (1-z)^{-alpha}.

The A^p quasi-norm is computed from the radial form

    ||f||_{A^p}^p = int_0^1 2 r M_p^p(r; f) dr

with the area measure normalized so the disk has measure 1.  The inner
circle integral reuses the arc machinery of the hardy module at radius
1 - gap; the outer radial integral receives gaps directly from the
singular-endpoint transform, so radii exponentially close to 1 never
suffer the 1 - r rounding collapse.  For p = 2 the norm is also available
exactly from Taylor coefficients as sum |a_n|^2/(n+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum
from typing import Optional

import numpy as np

from .expr import (
    BoundaryEvaluator,
    BoundaryStructure,
    Expr,
    boundary_structure,
    check_param_env,
)
from .hardy import (
    NormResult,
    _circle_mean_p,
    _declared_structure,
    _growth_says_divergent,
    _norm_result,
)
from .quad import NonFiniteSampleError, QuadConfig, integrate

__all__ = [
    "InnerIntegralError",
    "MembershipVerdict",
    "bergman_norm",
    "bergman_norm_coeffs",
    "membership_classify",
    "membership_evidence",
]

_MEMBERSHIP_BAND = 1e-12
_OUTER_BUDGET = 6000        # outer radial nodes; each node is an inner mean


class InnerIntegralError(RuntimeError):
    """The inner circle integral failed at some radius."""

    def __init__(self, radius: float):
        super().__init__(f"inner circle integral failed at radius {radius!r}")
        self.radius = radius


class _RadialIntegrand:
    """Outer radial integrand 2 r^{1+k} M_p^p(r; f).

    Right-endpoint offsets are taken as the circle gap 1 - r directly.
    The offset depth is capped so that the inner peak plateau gap^{-s}
    stays representable in double precision; below that depth the inner
    means are not computable and the outer transform's extrapolated tail
    accounts for the truncation.
    """

    deep_left = False
    flat_below = 0.0

    def __init__(self, ev: BoundaryEvaluator, p: float,
                 structure: BoundaryStructure, inner_cfg: QuadConfig,
                 weight_pow: int = 0):
        self._ev = ev
        self._p = p
        self._st = structure
        self._inner = inner_cfg
        self._k = weight_pow
        smax = structure.max_blowup
        self.deep_right = bool(structure.singular)
        if smax > 0.0:
            self.offset_blowup = max(max(0.0, p * smax - 1.0) + 0.25,
                                     (280.0 / 260.0) * max(1.0, p) * smax)
        else:
            self.offset_blowup = None
        self.inner_evals = 0
        self.max_inner_rel = 0.0
        self.inner_converged = True

    def _term(self, r_factor: float, gap: float) -> float:
        m, e, n, conv = _circle_mean_p(self._ev, self._p, self._st, gap,
                                       self._inner)
        self.inner_evals += n
        if not (math.isfinite(m) and math.isfinite(e)):
            raise InnerIntegralError(1.0 - gap)
        if m > 0.0:
            self.max_inner_rel = max(self.max_inner_rel, e / m)
        self.inner_converged = self.inner_converged and conv
        return 2.0 * r_factor * m

    def values(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        for j, rj in enumerate(r):
            out[j] = self._term(rj ** (1 + self._k), 1.0 - rj)
        return out

    def from_left(self, d):
        return self.values(np.asarray(d, dtype=float))

    def from_right(self, d):
        d = np.atleast_1d(np.asarray(d, dtype=float))
        out = np.empty_like(d)
        for j, dj in enumerate(d):
            out[j] = self._term((1.0 - dj) ** (1 + self._k), dj)
        return out


def _radial_integral(ev: BoundaryEvaluator, p: float,
                     structure: BoundaryStructure, cfg: QuadConfig,
                     weight_pow: int = 0):
    """int_0^1 2 r^{1+k} M_p^p(r; f) dr with folded inner error.

    Returns (value, abs_err_est, converged, evaluations).
    """
    inner = QuadConfig(abs_tol=0.1 * cfg.abs_tol, rel_tol=0.1 * cfg.rel_tol,
                       max_evaluations=min(int(cfg.max_evaluations), 150000))
    intg = _RadialIntegrand(ev, p, structure, inner, weight_pow)
    # the outer target leaves room for the folded inner contributions
    outer = QuadConfig(abs_tol=0.45 * cfg.abs_tol, rel_tol=0.45 * cfg.rel_tol,
                       max_evaluations=_OUTER_BUDGET,
                       singular_right=intg.deep_right)
    r = integrate(intg, 0.0, 1.0, outer)
    err = r.abs_err_est + intg.max_inner_rel * abs(r.value)
    conv = r.converged and err <= max(cfg.abs_tol, cfg.rel_tol * abs(r.value))
    return r.value, err, conv, r.evaluations + intg.inner_evals


def _radial_divergence_probe(ev: BoundaryEvaluator, p: float,
                             structure: BoundaryStructure) -> bool:
    """Truncate the radial integral at 1 - cut for shrinking cuts and apply
    the ladder growth test."""
    if not structure.singular:
        return False
    inner = QuadConfig(abs_tol=1e-7, rel_tol=1e-6, max_evaluations=60000)
    vals = []
    for cut in (1e-4, 1e-6, 1e-8):
        intg = _RadialIntegrand(ev, p, structure, inner)
        try:
            r = integrate(intg, 0.0, 1.0 - cut,
                          QuadConfig(abs_tol=1e-6, rel_tol=1e-4,
                                     max_evaluations=3000))
        except (NonFiniteSampleError, InnerIntegralError):
            return True
        vals.append(r.value)
    return _growth_says_divergent(vals)


def bergman_norm(f: Expr, p: float, env=None,
                 cfg: Optional[QuadConfig] = None,
                 singular_angles=None) -> NormResult:
    """The A^p quasi-norm of f via the radial-means integral."""
    cfg = cfg or QuadConfig()
    p = float(p)
    if p <= 0.0:
        raise ValueError("p must be positive")
    env = check_param_env(env)
    ev = BoundaryEvaluator(f, env)
    if singular_angles is None:
        structure = boundary_structure(f, env)
    else:
        structure = _declared_structure(ev, p, singular_angles)
    try:
        value, err, conv, _ = _radial_integral(ev, p, structure, cfg)
    except NonFiniteSampleError:
        div = _radial_divergence_probe(ev, p, structure)
        return _norm_result("Bergman", p, math.inf, math.inf, False, div)
    if conv:
        return _norm_result("Bergman", p, value, err, True)
    div = _radial_divergence_probe(ev, p, structure)
    return _norm_result("Bergman", p, value, err, False, div)


def bergman_norm_coeffs(coeffs) -> NormResult:
    """Exact A^2 norm from Taylor coefficients: value_p = sum |a_n|^2/(n+1)."""
    vals = [complex(a) for a in coeffs]
    vp = fsum(abs(a) ** 2 / (n + 1.0) for n, a in enumerate(vals))
    return _norm_result("Bergman", 2.0, vp, 0.0, True)


# ---------------------------------------------------------------------------
# Membership of (1-z)^{-alpha}


@dataclass(frozen=True)
class MembershipVerdict:
    alpha: float
    p: float
    product: float                   # p * alpha
    classification: str              # Member | NonMember | Boundary
    evidence: tuple = ()             # pairs (R, I(R)), radii increasing
    diagnostic: Optional[str] = None  # Convergent | Divergent-log | -poly


def _classify(product: float) -> str:
    if product < 2.0 - _MEMBERSHIP_BAND:
        return "Member"
    if abs(product - 2.0) <= _MEMBERSHIP_BAND:
        # on the critical line the function is not in A^p, but the marginal
        # case is tagged so front ends can display it distinctly
        return "Boundary"
    return "NonMember"


def membership_classify(alpha: float, p: float) -> MembershipVerdict:
    """Rule-based classification of (1-z)^{-alpha} in A^p by p*alpha vs 2."""
    alpha = float(alpha)
    p = float(p)
    if alpha <= 0.0 or p <= 0.0:
        raise ValueError("need alpha > 0 and p > 0")
    prod = p * alpha
    return MembershipVerdict(alpha, p, prod, _classify(prod))


def _truncated_disk_integral(s: float, R: float) -> float:
    """(1/pi) int_{|z|<=R} |1-z|^{-s} dx dy via polar coordinates at z = 1.

    At angle t from the center z = 1 the disk |z| <= R is met for radii
    between r- and r+ = cos t +- sqrt(cos^2 t - (1 - R^2)); the radial
    integral of r^{1-s} is elementary, leaving a 1D angular integral.
    """
    one_m_R2 = (1.0 - R) * (1.0 + R)
    tmax = math.asin(R)

    def G(t):
        t = np.asarray(t, dtype=float)
        c = np.cos(t)
        disc = np.maximum(c * c - one_m_R2, 0.0)
        rp = c + np.sqrt(disc)
        rm = one_m_R2 / rp
        if abs(s - 2.0) < 1e-14:
            return np.log(rp / rm)
        q = 2.0 - s
        return (rp ** q - rm ** q) / q

    r = integrate(G, 0.0, tmax,
                  QuadConfig(abs_tol=1e-10, rel_tol=1e-9,
                             max_evaluations=200000))
    return 2.0 * r.value / math.pi


def _default_radii() -> tuple[float, ...]:
    return tuple(1.0 - 2.0 ** (-k) for k in range(2, 13))


def membership_evidence(alpha: float, p: float,
                        radii=None) -> MembershipVerdict:
    """Classification plus truncated integrals I(R) and a growth diagnostic.

    Increment ratios of I along the radii distinguish a geometrically
    convergent tail (ratio < 0.9) from logarithmic (ratio near 1) and
    polynomial (ratio > 1.1) divergence; the thresholds reflect the
    (1-r)^{1-p*alpha} tail behaviour of the integrand.
    """
    base = membership_classify(alpha, p)
    rs = _default_radii() if radii is None else tuple(float(R) for R in radii)
    if len(rs) < 4:
        raise ValueError("need at least 4 radii for the growth diagnostic")
    for a, b in zip(rs[:-1], rs[1:]):
        if not 0.0 < a < b < 1.0:
            raise ValueError("radii must be strictly increasing in (0, 1)")
    s = base.product
    evidence = tuple((R, _truncated_disk_integral(s, R)) for R in rs)
    incs = [b[1] - a[1] for a, b in zip(evidence[:-1], evidence[1:])]
    ratios = sorted(b / a for a, b in zip(incs[:-1], incs[1:]) if a > 0.0)
    tail = ratios[-3:]
    med = tail[len(tail) // 2]
    if med < 0.9:
        diag = "Convergent"
    elif med <= 1.1:
        diag = "Divergent-log"
    else:
        diag = "Divergent-poly"
    return MembershipVerdict(base.alpha, base.p, base.product,
                             base.classification, evidence, diag)
