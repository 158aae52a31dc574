"""Machine-checked verification of quasi-norm identities and the
triangle-inequality violations.

Each case builds its own test functions, computes both sides of the claim
with error estimates, and returns an immutable report.  Verdicts separate
the mathematical claim from numerical noise by a margin equal to kappa
times the summed error estimates (kappa = 10 by default): a strict
inequality is Confirmed only when the computed defect clears that margin,
and an identity is Confirmed only when the defect stays inside it.
Closed-form simplifications used by the strict cases (e.g. f + g
collapsing to a single rational expression) are validated numerically on
a fixed pseudo-random sample of interior points rather than symbolically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bergman import (MembershipVerdict, bergman_norm, membership_classify,
                      membership_evidence, _radial_integral)
from .expr import (Add, BoundaryEvaluator, Const, Expr, Mul, Neg,
                   boundary_structure, check_param_env, evaluate, parse,
                   substitute_negate, substitute_rotate, substitute_square)
from .hardy import NormResult, hardy_norm, _integral_means_full
from .quad import QuadConfig, QuadResult

__all__ = [
    "VerificationReport", "IdentityCheck", "BoundCheck", "EpsWindow",
    "eps_window",
    "verify_lemma_cvh", "verify_lemma_cv", "verify_elem_inequality",
    "verify_lemma_ap",
    "verify_hp_counterexample", "verify_hp_equality_case",
    "verify_ap_large_p", "verify_ap_small_p",
    "verify_means_monotone", "verify_rotation_invariance",
]

DEFAULT_KAPPA = 10.0

_CONFIRMED = "Confirmed"
_REFUTED = "Refuted"
_INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class IdentityCheck:
    """Pointwise agreement of two expressions on a fixed interior sample."""
    description: str
    max_rel_diff: float
    tolerance: float
    points: int
    passed: bool


@dataclass(frozen=True)
class BoundCheck:
    """A single numeric comparison recorded inside a report.

    `passed` means lhs >= rhs - margin for one-sided checks and
    |lhs - rhs| <= margin for equality-style checks; the description says
    which reading applies.
    """
    description: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one verification case.

    defect is lhs - rhs with the case's sign convention; margin is kappa
    times the summed error estimates of everything feeding lhs and rhs.
    sub_results holds (name, value) pairs where value is a NormResult,
    QuadResult, IdentityCheck, BoundCheck, or MembershipVerdict.
    """
    case_id: str
    inputs: dict
    lhs: float
    rhs: float
    defect: float
    margin: float
    verdict: str
    sub_results: tuple = field(default_factory=tuple)


def _strict_verdict(defect: float, margin: float) -> str:
    if not (math.isfinite(defect) and math.isfinite(margin)):
        return _INCONCLUSIVE
    if defect > margin:
        return _CONFIRMED
    if defect < -margin:
        return _REFUTED
    return _INCONCLUSIVE


def _equality_verdict(defect: float, margin: float) -> str:
    if not (math.isfinite(defect) and math.isfinite(margin)):
        return _INCONCLUSIVE
    return _CONFIRMED if abs(defect) <= margin else _REFUTED


def _scaled(e: Expr, scale: float) -> Expr:
    if scale == 1.0:
        return e
    return Mul(Const(complex(scale)), e)


def _disk_points(n: int = 64) -> np.ndarray:
    # fixed seed: reports must be reproducible run to run
    rng = np.random.default_rng(1729)
    r = 0.9 * np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return r * np.exp(1j * theta)


def _identity_check(description: str, lhs: Expr, rhs: Expr, env,
                    tolerance: float = 1e-10, n: int = 64) -> IdentityCheck:
    """Compare two expressions at n fixed pseudo-random points, |z| <= 0.9."""
    z = _disk_points(n)
    a = np.asarray(evaluate(lhs, z, env))
    b = np.asarray(evaluate(rhs, z, env))
    scale = max(1.0, float(np.max(np.abs(a))))
    worst = float(np.max(np.abs(a - b)) / scale)
    return IdentityCheck(description, worst, tolerance, n,
                         math.isfinite(worst) and worst <= tolerance)


# ---------------------------------------------------------------------------
# Identity lemmas


def verify_lemma_cvh(f: Expr, p: float, cfg: Optional[QuadConfig] = None, *,
                     env=None, kappa: float = DEFAULT_KAPPA) -> VerificationReport:
    """The substitution z -> z^2 preserves the Hardy quasi-norm.

    lhs is the norm of f(z^2) raised to the p, rhs the same for f; the
    claim is exact equality, so the verdict is Confirmed when the defect
    stays within the error margin.
    """
    composed = hardy_norm(substitute_square(f), p, env=env, cfg=cfg)
    base = hardy_norm(f, p, env=env, cfg=cfg)
    lhs, rhs = composed.value_p, base.value_p
    defect = lhs - rhs
    margin = kappa * (composed.abs_err_est + base.abs_err_est)
    return VerificationReport(
        case_id="lemma-cvh",
        inputs={"p": p, "kappa": kappa},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_equality_verdict(defect, margin),
        sub_results=(("norm_composed", composed), ("norm_f", base)),
    )


def verify_lemma_cv(h: Expr, p: float, cfg: Optional[QuadConfig] = None, *,
                    env=None, kappa: float = DEFAULT_KAPPA) -> VerificationReport:
    """Area-integral form of the square substitution.

    The p-th power of the Bergman quasi-norm of h equals twice the area
    integral of |h(z^2)|^p |z|^2.  The right side is computed directly by
    folding the |z|^2 weight into the radial integrand, not by reusing the
    norm routine, so the two sides go through genuinely different code.
    """
    env_d = check_param_env(env)
    cfg = cfg if cfg is not None else QuadConfig()
    base = bergman_norm(h, p, env=env, cfg=cfg)
    lhs = base.value_p

    composed = substitute_square(h)
    ev = BoundaryEvaluator(composed, env_d)
    structure = boundary_structure(composed, env_d)
    half, err, conv, evals = _radial_integral(ev, p, structure, cfg,
                                              weight_pow=2)
    rhs = 2.0 * half
    weighted = QuadResult(value=rhs, abs_err_est=2.0 * err,
                          evaluations=evals, converged=conv)

    defect = lhs - rhs
    margin = kappa * (base.abs_err_est + weighted.abs_err_est)
    return VerificationReport(
        case_id="lemma-cv",
        inputs={"p": p, "kappa": kappa},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_equality_verdict(defect, margin),
        sub_results=(("norm_h", base), ("weighted_integral", weighted)),
    )


def verify_elem_inequality(a: float, b: float, q: float) -> VerificationReport:
    """|a^q - b^q| >= |a - b|^q for a, b > 0 and q > 1.

    Pure arithmetic: margin is zero and equality counts as Confirmed.
    """
    if not (a > 0.0 and b > 0.0):
        raise ValueError("requires a > 0 and b > 0")
    if not q > 1.0:
        raise ValueError("requires q > 1")
    lhs = abs(a ** q - b ** q)
    rhs = abs(a - b) ** q
    defect = lhs - rhs
    if not math.isfinite(defect):
        verdict = _INCONCLUSIVE
    else:
        verdict = _CONFIRMED if defect >= 0.0 else _REFUTED
    return VerificationReport(
        case_id="lemma-elem",
        inputs={"a": a, "b": b, "q": q},
        lhs=lhs, rhs=rhs, defect=defect, margin=0.0, verdict=verdict,
    )


def verify_lemma_ap(alpha: float, p: float,
                    radii: Optional[Sequence[float]] = None) -> VerificationReport:
    """Bergman membership of (1-z)^(-alpha) is decided by p*alpha < 2.

    The closed-form classifier and the truncated-integral evidence are
    computed independently; the verdict is Confirmed when the evidence
    diagnostic agrees with the classification (Boundary counts as
    non-membership and must look divergent).
    """
    classified = membership_classify(alpha, p)
    evidence = membership_evidence(alpha, p, radii)
    member = classified.classification == "Member"
    looks_convergent = evidence.diagnostic == "Convergent"
    agree = member == looks_convergent
    defect = classified.product - 2.0
    return VerificationReport(
        case_id="lemma-ap",
        inputs={"alpha": alpha, "p": p},
        lhs=classified.product, rhs=2.0, defect=defect, margin=0.0,
        verdict=_CONFIRMED if agree else _REFUTED,
        sub_results=(("classifier", classified), ("evidence", evidence)),
    )


# ---------------------------------------------------------------------------
# Hardy-space counterexample and its equality companion


def _norm_margin(kappa: float, *results: NormResult) -> float:
    return kappa * math.fsum(r.value_abs_err for r in results)


def verify_hp_counterexample(p: float, cfg: Optional[QuadConfig] = None, *,
                             kappa: float = DEFAULT_KAPPA,
                             scale: float = 1.0) -> VerificationReport:
    """Strict triangle-inequality failure in the Hardy space, 0 < p < 1.

    f = (1+z)/(1-z) and g = -f(-z) have equal norms, yet the norm of the
    sum exceeds the sum of the norms.  Sub-results record the symmetric
    norm check, the closed form f + g = 4z/(1-z^2), and the proof-chain
    equality tying the norm of the sum to 4 times the norm of 1/(1-z).
    The optional scale multiplies f by a positive constant; both sides
    scale alike, so the verdict must not depend on it.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("requires 0 < p < 1")
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    f = _scaled(parse("(1+z)/(1-z)"), scale)
    g = Neg(substitute_negate(f))
    total = Add(f, g)
    closed = _scaled(parse("(4*z)/(1-z^2)"), scale)
    pole = parse("1/(1-z)")

    norm_f = hardy_norm(f, p, cfg=cfg)
    norm_g = hardy_norm(g, p, cfg=cfg)
    norm_sum = hardy_norm(total, p, cfg=cfg)
    norm_pole = hardy_norm(pole, p, cfg=cfg)

    lhs = norm_sum.value
    rhs = norm_f.value + norm_g.value
    defect = lhs - rhs
    margin = _norm_margin(kappa, norm_sum, norm_f, norm_g)

    sym_margin = _norm_margin(kappa, norm_f, norm_g)
    sym = BoundCheck("norms of f and g agree", norm_f.value, norm_g.value,
                     sym_margin,
                     abs(norm_f.value - norm_g.value) <= sym_margin)
    chain_rhs = 4.0 * scale * norm_pole.value
    chain_margin = kappa * (norm_sum.value_abs_err
                            + 4.0 * scale * norm_pole.value_abs_err)
    chain = BoundCheck("norm of f+g equals 4*scale*norm of 1/(1-z)",
                       lhs, chain_rhs, chain_margin,
                       abs(lhs - chain_rhs) <= chain_margin)
    ident = _identity_check("f + g = 4z/(1-z^2)", total, closed, None)

    return VerificationReport(
        case_id="hp-counterexample",
        inputs={"p": p, "kappa": kappa, "scale": scale},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_strict_verdict(defect, margin),
        sub_results=(("norm_f", norm_f), ("norm_g", norm_g),
                     ("norm_sum", norm_sum), ("norm_pole", norm_pole),
                     ("symmetry", sym), ("closed_form", ident),
                     ("proof_chain", chain)),
    )


def verify_hp_equality_case(p: float, cfg: Optional[QuadConfig] = None, *,
                            kappa: float = DEFAULT_KAPPA,
                            scale: float = 1.0) -> VerificationReport:
    """Equality in the Hardy triangle inequality for h = 1/(1-z).

    With k = -h(-z) = -1/(1+z) the norms add exactly: |h+k| and |h|, |k|
    produce the same boundary integrals after the square substitution.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("requires 0 < p < 1")
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    h = _scaled(parse("1/(1-z)"), scale)
    k = Neg(substitute_negate(h))
    total = Add(h, k)
    closed = _scaled(parse("(2*z)/(1-z^2)"), scale)

    norm_h = hardy_norm(h, p, cfg=cfg)
    norm_k = hardy_norm(k, p, cfg=cfg)
    norm_sum = hardy_norm(total, p, cfg=cfg)

    lhs = norm_sum.value
    rhs = norm_h.value + norm_k.value
    defect = lhs - rhs
    margin = _norm_margin(kappa, norm_sum, norm_h, norm_k)

    chain_rhs = 2.0 * norm_h.value
    chain_margin = kappa * (norm_sum.value_abs_err
                            + 2.0 * norm_h.value_abs_err)
    chain = BoundCheck("norm of h+k equals 2*norm of h", lhs, chain_rhs,
                       chain_margin, abs(lhs - chain_rhs) <= chain_margin)
    ident = _identity_check("h + k = 2z/(1-z^2)", total, closed, None)

    return VerificationReport(
        case_id="hp-equality",
        inputs={"p": p, "kappa": kappa, "scale": scale},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_equality_verdict(defect, margin),
        sub_results=(("norm_h", norm_h), ("norm_k", norm_k),
                     ("norm_sum", norm_sum), ("closed_form", ident),
                     ("proof_chain", chain)),
    )


# ---------------------------------------------------------------------------
# Bergman-space counterexamples


@dataclass(frozen=True)
class EpsWindow:
    """Admissible exponent-perturbation interval [lo, hi) or [lo, hi]."""
    lo: float
    hi: float
    hi_closed: bool

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, eps: float) -> bool:
        if eps < self.lo:
            return False
        return eps <= self.hi if self.hi_closed else eps < self.hi

    def midpoint(self) -> float:
        return self.lo if self.degenerate else 0.5 * (self.lo + self.hi)

    def __str__(self) -> str:
        if self.degenerate:
            return f"{{{self.lo:g}}}"
        close = "]" if self.hi_closed else ")"
        return f"[{self.lo:g}, {self.hi:g}{close}"


def eps_window(p: float) -> EpsWindow:
    """Admissible eps for the large-p Bergman counterexample, 1/2 <= p < 1.

    The raw interval is (1-p)/p <= eps < 2(1-p)/p, additionally capped at
    eps <= 1; when the cap bites, the right endpoint 1 itself remains
    admissible and the window closes.  At p = 1/2 this degenerates to the
    single point {1}.
    """
    if not 0.5 <= p < 1.0:
        raise ValueError("eps window is defined for 1/2 <= p < 1")
    lo = (1.0 - p) / p
    hi = 2.0 * (1.0 - p) / p
    if hi > 1.0:
        return EpsWindow(lo, 1.0, True)
    return EpsWindow(lo, hi, False)


def verify_ap_large_p(p: float, eps: float,
                      cfg: Optional[QuadConfig] = None, *,
                      kappa: float = DEFAULT_KAPPA,
                      scale: float = 1.0) -> VerificationReport:
    """Strict Bergman triangle-inequality failure for 1/2 <= p < 1.

    f = (1+z)^(2-eps)/(1-z)^(2+eps) with eps in eps_window(p); g = -f(-z).
    An eps outside the window is an input error, not an Inconclusive
    verdict.  Sub-results record the membership precondition p(2+eps) < 2
    and the closed form f + g = 8z(1+z^2)/(1-z^2)^(2+eps).
    """
    window = eps_window(p)
    if not window.contains(eps):
        raise ValueError(f"eps={eps:g} outside admissible window {window}")
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    env = {"p": p, "eps": eps}
    f = _scaled(parse("(1+z)^(2-eps) / (1-z)^(2+eps)"), scale)
    g = Neg(substitute_negate(f))
    total = Add(f, g)
    closed = _scaled(parse("(8*z*(1+z^2)) / (1-z^2)^(2+eps)"), scale)

    member = membership_classify(2.0 + eps, p)
    precondition = BoundCheck("membership exponent product below 2",
                              member.product, 2.0, 0.0,
                              member.classification == "Member")

    norm_f = bergman_norm(f, p, env=env, cfg=cfg)
    norm_g = bergman_norm(g, p, env=env, cfg=cfg)
    norm_sum = bergman_norm(total, p, env=env, cfg=cfg)

    lhs = norm_sum.value
    rhs = norm_f.value + norm_g.value
    defect = lhs - rhs
    margin = _norm_margin(kappa, norm_sum, norm_f, norm_g)
    ident = _identity_check("f + g = 8z(1+z^2)/(1-z^2)^(2+eps)",
                            total, closed, env)

    return VerificationReport(
        case_id="ap-large-p",
        inputs={"p": p, "eps": eps, "kappa": kappa, "scale": scale},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_strict_verdict(defect, margin),
        sub_results=(("membership", member), ("precondition", precondition),
                     ("norm_f", norm_f), ("norm_g", norm_g),
                     ("norm_sum", norm_sum), ("closed_form", ident)),
    )


_SMALL_P_BOUND = 2.0 ** 8 / (15.0 * math.pi)


def verify_ap_small_p(p: float, cfg: Optional[QuadConfig] = None, *,
                      kappa: float = DEFAULT_KAPPA,
                      scale: float = 1.0) -> VerificationReport:
    """Strict Bergman triangle-inequality failure for 0 < p < 1/2.

    f = (1+z)^(4/p), g = -f(-z).  Named sub-checks follow the proof:
    (a) the p-th power of the norm of f equals 10/3 exactly;
    (b) the p-th power of the norm of f+g is at least 2^8/(15*pi);
    (c) it strictly exceeds 2^p * 10/3 -- the report verdict;
    (d) the arithmetic fact 2^8/(15*pi) > 2^p * 10/3 for this p.
    The norm of g equals the norm of f identically (the area measure is
    symmetric under z -> -z), so it is not recomputed.
    """
    if not 0.0 < p < 0.5:
        raise ValueError("requires 0 < p < 1/2")
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    env = {"p": p}
    f = _scaled(parse("(1+z)^(4/p)"), scale)
    g = Neg(substitute_negate(f))
    total = Add(f, g)
    c_p = scale ** p

    norm_f = bergman_norm(f, p, env=env, cfg=cfg)
    norm_sum = bergman_norm(total, p, env=env, cfg=cfg)

    exact = (10.0 / 3.0) * c_p
    a_margin = kappa * norm_f.abs_err_est
    check_a = BoundCheck("p-th power of norm of f equals 10/3",
                         norm_f.value_p, exact, a_margin,
                         abs(norm_f.value_p - exact) <= a_margin)

    lower = _SMALL_P_BOUND * c_p
    b_margin = kappa * norm_sum.abs_err_est
    check_b = BoundCheck("p-th power of norm of f+g at least 2^8/(15*pi)",
                         norm_sum.value_p, lower, b_margin,
                         norm_sum.value_p >= lower - b_margin)

    lhs = norm_sum.value_p
    rhs = 2.0 ** p * (10.0 / 3.0) * c_p
    defect = lhs - rhs
    margin = kappa * norm_sum.abs_err_est
    check_c = BoundCheck("p-th power of norm of f+g exceeds 2^p * 10/3",
                         lhs, rhs, margin, defect > margin)

    check_d = BoundCheck("2^8/(15*pi) exceeds 2^p * 10/3",
                         lower, rhs, 0.0, lower > rhs)

    return VerificationReport(
        case_id="ap-small-p",
        inputs={"p": p, "kappa": kappa, "scale": scale},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_strict_verdict(defect, margin),
        sub_results=(("norm_f", norm_f), ("norm_sum", norm_sum),
                     ("exact_value", check_a), ("lower_bound", check_b),
                     ("strict_claim", check_c), ("arithmetic", check_d)),
    )


# ---------------------------------------------------------------------------
# Structural properties


_DEFAULT_MEANS_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
                       0.95, 0.99)


def verify_means_monotone(f: Expr, p: float,
                          grid: Optional[Sequence[float]] = None,
                          cfg: Optional[QuadConfig] = None, *,
                          env=None,
                          kappa: float = DEFAULT_KAPPA) -> VerificationReport:
    """Integral means are non-decreasing in the radius.

    Confirmed when every consecutive pair of grid radii satisfies
    M_p(r_k) <= M_p(r_{k+1}) + margin; the report's lhs/rhs/defect are
    those of the worst pair.  This is a one-sided claim, so a failing
    pair makes the verdict Refuted rather than Inconclusive.
    """
    radii = tuple(grid) if grid is not None else _DEFAULT_MEANS_GRID
    if len(radii) < 2:
        raise ValueError("need at least two radii")
    if any(not 0.0 < r < 1.0 for r in radii):
        raise ValueError("radii must lie in (0, 1)")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")

    means, errs = [], []
    for r in radii:
        m, e, _, _ = _integral_means_full(f, p, r, env=env, cfg=cfg)
        means.append(m)
        errs.append(e)

    checks = []
    worst = None
    for k in range(len(radii) - 1):
        pair_margin = kappa * (errs[k] + errs[k + 1])
        gain = means[k + 1] - means[k]
        ok = gain >= -pair_margin
        checks.append(
            ("pair_%g_%g" % (radii[k], radii[k + 1]),
             BoundCheck(f"means non-decreasing on [{radii[k]:g}, "
                        f"{radii[k + 1]:g}]",
                        means[k + 1], means[k], pair_margin, ok)))
        if worst is None or gain + pair_margin < worst[0]:
            worst = (gain + pair_margin, means[k + 1], means[k], pair_margin)

    all_ok = all(c.passed for _, c in checks)
    _, lhs, rhs, margin = worst
    defect = lhs - rhs
    if not math.isfinite(defect):
        verdict = _INCONCLUSIVE
    else:
        verdict = _CONFIRMED if all_ok else _REFUTED
    return VerificationReport(
        case_id="means-monotone",
        inputs={"p": p, "kappa": kappa},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=verdict, sub_results=tuple(checks),
    )


def verify_rotation_invariance(f: Expr, p: float, angle: float = 0.7,
                               cfg: Optional[QuadConfig] = None, *,
                               space: str = "hardy", env=None,
                               kappa: float = DEFAULT_KAPPA) -> VerificationReport:
    """Quasi-norms are invariant under the rotation f(z) -> f(e^{i*angle} z)."""
    if space not in ("hardy", "bergman"):
        raise ValueError("space must be 'hardy' or 'bergman'")
    norm_fn = hardy_norm if space == "hardy" else bergman_norm
    lam = complex(math.cos(angle), math.sin(angle))
    base = norm_fn(f, p, env=env, cfg=cfg)
    rotated = norm_fn(substitute_rotate(f, lam), p, env=env, cfg=cfg)
    lhs, rhs = rotated.value_p, base.value_p
    defect = lhs - rhs
    margin = kappa * (rotated.abs_err_est + base.abs_err_est)
    return VerificationReport(
        case_id="rotation-invariance",
        inputs={"p": p, "angle": angle, "space": space, "kappa": kappa},
        lhs=lhs, rhs=rhs, defect=defect, margin=margin,
        verdict=_equality_verdict(defect, margin),
        sub_results=(("norm_rotated", rotated), ("norm_f", base)),
    )
