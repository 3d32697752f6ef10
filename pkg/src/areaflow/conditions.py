"""Curvature-hypothesis audits for pairs of background spaces.

Each check evaluates one of the named curvature conditions (A)-(F), or the
two main-theorem hypothesis forms, as a set of named slacks (each LHS-RHS of
an inequality).  ``holds`` means every slack is >= 0 (exact comparisons: the
canonical examples have integer slacks); ``strict`` means the condition's
designated strict slack is > 0, which is what the rigidity statements need.
Hypotheses the tool cannot decide (local irreducibility, non-symmetry) are
echoed verbatim as unchecked, never claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curvature import CurvatureBounds
from .spaces import ModelSpace, bounds as space_bounds

CONDITIONS = ("A", "B", "C", "D", "E", "F", "Thm1_i", "Thm1_ii")


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    holds: bool
    strict: bool
    slacks: tuple
    unchecked_hypotheses: tuple = ()
    inputs_echo: dict = field(default_factory=dict)

    def slack(self, name: str) -> float:
        for k, v in self.slacks:
            if k == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "holds": self.holds,
            "strict": self.strict,
            "slacks": [{"name": k, "value": v} for k, v in self.slacks],
            "unchecked_hypotheses": list(self.unchecked_hypotheses),
            "inputs_echo": self.inputs_echo,
        }


def _report(condition, slacks, strict_name, unchecked=(), echo=None):
    holds = all(v >= 0 for _, v in slacks)
    strict = holds and dict(slacks)[strict_name] > 0
    return ConditionReport(
        condition=condition,
        holds=holds,
        strict=strict,
        slacks=tuple(slacks),
        unchecked_hypotheses=tuple(unchecked),
        inputs_echo=echo or {},
    )


def _echo(bm: CurvatureBounds, bn: CurvatureBounds, m: int, n: int) -> dict:
    return {"m": m, "n": n, "bounds_M": bm.to_dict(), "bounds_N": bn.to_dict()}


def check_A(bm: CurvatureBounds, bn: CurvatureBounds, m: int, n: int) -> ConditionReport:
    """Static condition (A): Ricci gap plus sectional floor terms.

    ric_gap  = Ric_min(M) - Ric_max(N) + (m-l) kappa_M + (n-l) kappa_N
    kappa_sum = kappa_M + kappa_N

    holds with kappa_sum >= 0; the rigidity conclusions need kappa_sum > 0
    (the strict flag).
    """
    if m < 2 or n < 2:
        raise ValueError("need m, n >= 2")
    ell = min(m, n)
    slacks = [
        ("ric_gap", bm.ric_min - bn.ric_max + (m - ell) * bm.kappa + (n - ell) * bn.kappa),
        ("kappa_sum", bm.kappa + bn.kappa),
    ]
    return _report("A", slacks, "kappa_sum", echo=_echo(bm, bn, m, n))


def check_B(bm: CurvatureBounds, bn: CurvatureBounds, m: int, n: int) -> ConditionReport:
    """Static condition (B): kappa_M >= 0 and the multiplied sectional form

    sec_gap = (2(m-l) + l - 1) kappa_M - (l-1) tau_N >= 0.

    Stated multiplied through by (l-1); l = 1 would make the divided form
    singular, so l >= 2 is required.  Strict flag: kappa_M > 0.
    """
    ell = min(m, n)
    if ell < 2:
        raise ValueError("condition (B) needs min(m, n) >= 2")
    slacks = [
        ("kappa_M", bm.kappa),
        ("sec_gap", (2 * (m - ell) + ell - 1) * bm.kappa - (ell - 1) * bn.tau),
    ]
    return _report("B", slacks, "kappa_M", echo=_echo(bm, bn, m, n))


def check_C(bm: CurvatureBounds, bn: CurvatureBounds, m: int, n: int) -> ConditionReport:
    """Ricci-flow-coupled condition (C) on the partial Ricci minima chi.

    chi_sum    = chi(M) + chi(N)
    chi_excess = (m-l) chi(M) + (n-l) chi(N)

    Both metrics evolve by d/dt = -Ric.  Strict flag: chi_sum > 0.
    """
    import math

    if not (math.isfinite(bm.ric3_min) and math.isfinite(bn.ric3_min)):
        raise ValueError("condition (C) needs ric3 minima on both sides")
    ell = min(m, n)
    slacks = [
        ("chi_sum", bm.ric3_min + bn.ric3_min),
        ("chi_excess", (m - ell) * bm.ric3_min + (n - ell) * bn.ric3_min),
    ]
    return _report("C", slacks, "chi_sum", echo=_echo(bm, bn, m, n))


def check_D(bm: CurvatureBounds, bn: CurvatureBounds, m: int, n: int) -> ConditionReport:
    """Condition (D): M evolves by -Ric, N static with tau_N <= 0.

    chi_M        = chi(M)
    tau_N_nonpos = -tau_N

    Strict flag follows the rigidity clause chi_M > 0; the alternative
    sharpening tau_N < 0 is readable off the second slack.
    """
    import math

    if not math.isfinite(bm.ric3_min):
        raise ValueError("condition (D) needs the ric3 minimum of M")
    slacks = [("chi_M", bm.ric3_min), ("tau_N_nonpos", -bn.tau)]
    return _report("D", slacks, "chi_M", echo=_echo(bm, bn, m, n))


def check_thm1_i(bm, bn, m, n) -> ConditionReport:
    """Main-theorem hypothesis (i): condition (A) with kappa_sum required > 0."""
    rep = check_A(bm, bn, m, n)
    return ConditionReport("Thm1_i", rep.holds, rep.strict, rep.slacks,
                           rep.unchecked_hypotheses, rep.inputs_echo)


def check_thm1_ii(bm, bn, m, n) -> ConditionReport:
    """Main-theorem hypothesis (ii): kappa_M > 0 plus the multiplied form."""
    rep = check_B(bm, bn, m, n)
    return ConditionReport("Thm1_ii", rep.holds, rep.strict, rep.slacks,
                           rep.unchecked_hypotheses, rep.inputs_echo)


_UNCHECKED_M = (
    "M locally irreducible",
    "M locally non-symmetric",
)


def check_E(space_m: ModelSpace, space_n: ModelSpace, *, seed: int = 0) -> ConditionReport:
    """Coupled condition (E): Einstein target, isotropic-nonnegative source.

    einstein_N   = Ric_min(N) - Ric_max(N)   (zero iff N is Einstein)
    kappa_N      = kappa(N)
    chi_ic1_M    = isotropic shift of M (min Ricci eigenvalue in dim 3)
    scalar_ratio = scal_min(M) - (m/n) scal_max(N)

    Local irreducibility / non-symmetry of M cannot be decided from bounds
    and are echoed unchecked.  Strict flag: scalar_ratio > 0.
    """
    bm = space_bounds(space_m, seed=seed)
    bn = space_bounds(space_n, seed=seed)
    m, n = space_m.dim, space_n.dim
    slacks = [
        ("einstein_N", bn.ric_min - bn.ric_max),
        ("kappa_N", bn.kappa),
        ("chi_ic1_M", bm.chi_ic1),
        ("scalar_ratio", bm.scal_min - (m / n) * bn.scal_max),
    ]
    return _report("E", slacks, "scalar_ratio", unchecked=_UNCHECKED_M,
                   echo=_echo(bm, bn, m, n))


def check_F(space_m: ModelSpace, space_n: ModelSpace, *, seed: int = 0) -> ConditionReport:
    """Coupled condition (F): nonpositively curved target.

    tau_N_nonpos = -tau(N)
    chi_ic1_M    = isotropic shift of M
    scalar_ratio = scal_min(M) - (m/n) scal_max(N)

    Strict flag: tau_N_nonpos > 0 (tau_N < 0 forces strict area decrease).
    """
    bm = space_bounds(space_m, seed=seed)
    bn = space_bounds(space_n, seed=seed)
    m, n = space_m.dim, space_n.dim
    slacks = [
        ("tau_N_nonpos", -bn.tau),
        ("chi_ic1_M", bm.chi_ic1),
        ("scalar_ratio", bm.scal_min - (m / n) * bn.scal_max),
    ]
    return _report("F", slacks, "tau_N_nonpos", unchecked=_UNCHECKED_M,
                   echo=_echo(bm, bn, m, n))


def audit_conditions(space_m: ModelSpace, space_n: ModelSpace, conditions, *,
                     seed: int = 0) -> list[ConditionReport]:
    """Run the named condition checks on a pair of model spaces."""
    bm = space_bounds(space_m, seed=seed)
    bn = space_bounds(space_n, seed=seed)
    m, n = space_m.dim, space_n.dim
    table = {
        "A": lambda: check_A(bm, bn, m, n),
        "B": lambda: check_B(bm, bn, m, n),
        "C": lambda: check_C(bm, bn, m, n),
        "D": lambda: check_D(bm, bn, m, n),
        "E": lambda: check_E(space_m, space_n, seed=seed),
        "F": lambda: check_F(space_m, space_n, seed=seed),
        "Thm1_i": lambda: check_thm1_i(bm, bn, m, n),
        "Thm1_ii": lambda: check_thm1_ii(bm, bn, m, n),
    }
    out = []
    for cond in conditions:
        if cond not in table:
            raise ValueError(f"unknown condition {cond!r}; choose from {CONDITIONS}")
        out.append(table[cond]())
    return out
