"""RSD instances and attack-cost formulas (log2), plus a parameter audit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParameterError
from .params import ParamCheck, ParamSet, get_params, validate_params


@dataclass(frozen=True)
class RsdInstance:
    n_code: int
    k_code: int
    r: int
    label: str

    def __post_init__(self):
        if not 0 <= self.k_code <= self.n_code:
            raise ParameterError(f"need 0 <= k <= n, got ({self.n_code}, {self.k_code})")
        if self.r < 1:
            raise ParameterError("RSD weight must be >= 1")

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.n_code, self.k_code, self.r)


def rsd_instances(p: ParamSet) -> list[RsdInstance]:
    """c1: (n, l, r); c2: (l, l-(n-k), r); joint: (2n-k, l, r);
    c1_reduced: (n, l-(n-k), r) after eliminating n-k message coordinates via c2."""
    n, l, nk, r = p.n, p.l, p.nk, p.r
    return [
        RsdInstance(n, l, r, "c1"),
        RsdInstance(l, l - nk, r, "c2"),
        RsdInstance(2 * n - p.k, l, r, "joint"),
        RsdInstance(n, l - nk, r, "c1_reduced"),
    ]


def comb_exponent(inst: RsdInstance, m: int, ceil: bool = False) -> float:
    n, k, r = inst.n_code, inst.k_code, inst.r
    t = (k + 1) * m / n
    if ceil:
        t = math.ceil(t)
    return r * t - m


def comb_complexity(inst: RsdInstance, m: int, q: int = 2, ceil: bool = False) -> float:
    """log2 of (n-k)^3 m^3 q^(r(k+1)m/n - m)."""
    n, k = inst.n_code, inst.k_code
    if n <= k:
        raise ParameterError("combinatorial attack needs n > k")
    return 3 * math.log2(n - k) + 3 * math.log2(m) + comb_exponent(inst, m, ceil) * math.log2(q)


def alg_exponent(inst: RsdInstance) -> int:
    """r * ceil(((r+1)(k+1) - (n+1)) / r), clamped at 0."""
    n, k, r = inst.n_code, inst.k_code, inst.r
    num = (r + 1) * (k + 1) - (n + 1)
    c = -(-num // r)
    return r * c if c > 0 else 0


def alg_is_polynomial(inst: RsdInstance) -> bool:
    return inst.k_code == 0 or alg_exponent(inst) == 0


def alg_complexity(inst: RsdInstance, q: int = 2) -> float:
    """log2 of r^3 k^3 q^(r ceil(((r+1)(k+1)-(n+1))/r)); a non-positive ceiling
    contributes nothing (polynomial attack, see alg_is_polynomial)."""
    if inst.k_code == 0:
        return 0.0
    return 3 * math.log2(inst.r) + 3 * math.log2(inst.k_code) + alg_exponent(inst) * math.log2(q)


@dataclass
class Entry:
    label: str
    formula: str
    triple: tuple[int, int, int]
    log2: float
    polynomial: bool = False


@dataclass
class SecurityReport:
    params: ParamSet
    target_bits: int
    include_reduced: bool
    entries: list[Entry]
    excluded: list[Entry]
    comb_ceiled: dict[str, float]
    check: ParamCheck
    minimum: float = field(init=False)

    def __post_init__(self):
        self.minimum = min(e.log2 for e in self.entries)

    @property
    def passed(self) -> bool:
        return self.check.ok and self.minimum >= self.target_bits

    def weakest(self) -> Entry:
        return min(self.entries, key=lambda e: e.log2)

    def kv_lines(self) -> list[str]:
        out = []
        for e in self.entries + self.excluded:
            tag = " excluded" if e in self.excluded else ""
            poly = " polynomial" if e.polynomial else ""
            out.append(f"{e.label}.{e.formula} = {e.log2:.4f}{poly}{tag}")
        for label, v in self.comb_ceiled.items():
            out.append(f"{label}.comb_ceiled = {v:.4f}")
        w = self.weakest()
        out += [
            f"minimum = {self.minimum:.4f}",
            f"minimum_at = {w.label}.{w.formula}",
            f"target_bits = {self.target_bits}",
            f"include_reduced = {str(self.include_reduced).lower()}",
            f"structural_ok = {str(self.check.ok).lower()}",
            f"h0_choices_log2q = {self.check.h0_exponent}",
            f"msg_solutions_log2q = {self.check.msg_solutions_exponent}",
            f"msg_solutions_log2q_alt = {self.check.msg_solutions_exponent_alt}",
            f"pass = {str(self.passed).lower()}",
        ]
        return out

    def render(self) -> str:
        p = self.params
        lines = [f"audit of {p.name} (n={p.n}, l={p.l}, k={p.k}, d={p.d}, r={p.r}, m={p.m})"]
        for e in self.entries + self.excluded:
            note = " [polynomial]" if e.polynomial else ""
            note += " [excluded]" if e in self.excluded else ""
            lines.append(f"  {e.label:<11} {e.formula:<5} (n,k,r)={e.triple}  log2 = {e.log2:9.2f}{note}")
        for v in self.check.violations:
            lines.append(f"  violation: {v}")
        for w in self.check.warnings:
            lines.append(f"  warning: {w}")
        lines.append(f"  minimum {self.minimum:.2f} vs target {self.target_bits}: "
                     f"{'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def audit(params: ParamSet | str, target_bits: int, include_reduced: bool = True,
          q: int = 2) -> SecurityReport:
    p = get_params(params)
    check = validate_params(p)
    entries, excluded, ceiled = [], [], {}
    for inst in rsd_instances(p):
        bucket = excluded if (inst.label == "c1_reduced" and not include_reduced) else entries
        if inst.n_code > inst.k_code:
            bucket.append(Entry(inst.label, "comb", inst.triple, comb_complexity(inst, p.m, q)))
            ceiled[inst.label] = comb_complexity(inst, p.m, q, ceil=True)
        bucket.append(Entry(inst.label, "alg", inst.triple, alg_complexity(inst, q),
                            alg_is_polynomial(inst)))
    return SecurityReport(p, target_bits, include_reduced, entries, excluded, ceiled, check)
