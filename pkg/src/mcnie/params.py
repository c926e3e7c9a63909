"""Parameter sets: the six named sets plus user-defined ones."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ParameterError
from .galois import is_irreducible, smallest_irreducible

VARIANTS = ("general", "qc3", "qc4")
VARIANT_IDS = {"general": 0, "qc3": 1, "qc4": 2}


@dataclass(frozen=True)
class ParamSet:
    """n: code length, l: public code dimension, k: LRPC code dimension
    (H has nk = n - k rows), d: LRPC weight, r: error rank, m: field degree."""
    name: str
    m: int
    n: int
    l: int
    k: int
    d: int
    r: int
    variant: str = "general"
    q: int = 2
    modulus: int | None = None
    table_failure_exp: int | None = None
    table_pk_bytes: int | None = None
    security: int | None = None

    @property
    def nk(self) -> int:
        return self.n - self.k

    @property
    def structure(self) -> str:
        return "dense" if self.variant == "general" else self.variant

    @property
    def block(self) -> int | None:
        """Circulant block size (None for the general variant)."""
        return {"qc3": self.n // 3, "qc4": self.n // 4}.get(self.variant)

    @property
    def field_modulus(self) -> int:
        return self.modulus if self.modulus is not None else smallest_irreducible(self.m)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


# qc4 sets: l = 3n/4 and k = n/2, as the 4-QC shapes require.
NAMED: dict[str, ParamSet] = {p.name: p for p in [
    ParamSet("qc3-128", 53, 120, 80, 80, 3, 8, "qc3", table_failure_exp=-23, table_pk_bytes=795, security=128),
    ParamSet("qc3-192", 67, 138, 92, 92, 3, 10, "qc3", table_failure_exp=-25, table_pk_bytes=1156, security=192),
    ParamSet("qc3-256", 71, 156, 104, 104, 3, 12, "qc3", table_failure_exp=-27, table_pk_bytes=1385, security=256),
    ParamSet("qc4-128", 59, 92, 69, 46, 3, 10, "qc4", table_failure_exp=-36, table_pk_bytes=849, security=128),
    ParamSet("qc4-192", 67, 112, 84, 56, 3, 13, "qc4", table_failure_exp=-38, table_pk_bytes=1173, security=192),
    ParamSet("qc4-256", 73, 128, 96, 64, 3, 16, "qc4", table_failure_exp=-36, table_pk_bytes=1460, security=256),
]}
PARAM_IDS = {name: i + 1 for i, name in enumerate(NAMED)}
ID_PARAMS = {v: k for k, v in PARAM_IDS.items()}


def make_params(n: int, m: int, nk: int, d: int, r: int, variant: str = "general",
                l: int | None = None, name: str | None = None, modulus: int | None = None) -> ParamSet:
    if variant not in VARIANTS:
        raise ParameterError(f"variant must be one of {VARIANTS}")
    if l is None:
        if variant == "qc3":
            l = 2 * n // 3
        elif variant == "qc4":
            l = 3 * n // 4
        else:
            l = n - nk
    name = name or f"custom-{variant}-n{n}-m{m}-nk{nk}-d{d}-r{r}"
    return ParamSet(name, m, n, l, n - nk, d, r, variant, modulus=modulus)


def parse_custom(spec: str) -> ParamSet:
    """'n=24,m=11,nk=8,d=2,r=3,variant=qc3' (the 'custom:' prefix is optional)."""
    if spec.startswith("custom:"):
        spec = spec[len("custom:"):]
    kv = {}
    for part in filter(None, spec.split(",")):
        if "=" not in part:
            raise ParameterError(f"bad custom parameter fragment {part!r}")
        key, val = part.split("=", 1)
        kv[key.strip()] = val.strip()
    try:
        ints = {k: int(v, 0) for k, v in kv.items() if k not in ("variant", "name")}
    except ValueError as exc:
        raise ParameterError(f"non-integer custom parameter: {exc}") from None
    if "k" in ints and "nk" not in ints and "n" in ints:
        ints["nk"] = ints["n"] - ints.pop("k")
    missing = {"n", "m", "nk", "d", "r"} - ints.keys()
    if missing:
        raise ParameterError(f"custom parameters missing {sorted(missing)}")
    unknown = ints.keys() - {"n", "m", "nk", "d", "r", "l", "modulus"}
    if unknown:
        raise ParameterError(f"unknown custom parameters {sorted(unknown)}")
    return make_params(variant=kv.get("variant", "general"), name=kv.get("name"), **ints)


def _dir_registry() -> dict[str, ParamSet]:
    d = os.environ.get("MCNIE_PARAM_DIR")
    out: dict[str, ParamSet] = {}
    if not d:
        return out
    for path in sorted(Path(d).glob("*.json")):
        data = json.loads(path.read_text())
        for entry in data if isinstance(data, list) else [data]:
            p = ParamSet(**entry)
            out[p.name] = p
    return out


def registry() -> dict[str, ParamSet]:
    reg = dict(NAMED)
    reg.update(_dir_registry())
    return reg


def get_params(spec: str | ParamSet) -> ParamSet:
    if isinstance(spec, ParamSet):
        return spec
    if spec.startswith("custom:"):
        return parse_custom(spec)
    reg = registry()
    if spec not in reg:
        raise ParameterError(f"unknown parameter set {spec!r}; known: {', '.join(reg)}")
    return reg[spec]


@dataclass
class ParamCheck:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    h0_exponent: int = 0          # log_q of the number of H0 with F = G' H0
    msg_solutions_exponent: int = 0   # m(l - rank F), assuming full-rank F
    msg_solutions_exponent_alt: int = 0   # the same count without the factor m

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_params(p: ParamSet) -> ParamCheck:
    chk = ParamCheck()
    v, w = chk.violations, chk.warnings
    n, nk, l = p.n, p.nk, p.l
    if p.q != 2:
        v.append("only q = 2 is supported")
    if p.m < 2:
        v.append("m must be at least 2")
    elif p.modulus is not None and (p.modulus.bit_length() != p.m + 1 or not is_irreducible(p.modulus)):
        v.append(f"modulus {p.modulus:#x} is not an irreducible polynomial of degree {p.m}")
    if not 0 < nk < n:
        v.append("need 0 < n-k < n")
    if l <= nk:
        v.append("l must exceed n-k")
    if l > n:
        v.append("l cannot exceed n")
    if p.d < 1:
        v.append("d must be positive")
    elif p.d == 1:
        w.append("d = 1 is a degenerate LRPC weight")
    if p.r < 0:
        v.append("r must be non-negative")
    if p.r * p.d > nk:
        v.append("r*d must not exceed n-k")
    if p.d > p.m or p.r > p.m:
        v.append("d and r must not exceed m")
    elif p.r * p.d > p.m:
        w.append("m < r*d: the product space cannot reach dimension r*d")
    if 0 < nk and p.d > 0 and nk * p.d < n:
        w.append("(n-k)*d < n: no decoding matrix exists, decryption will fail")
    if p.variant not in VARIANTS:
        v.append(f"unknown variant {p.variant!r}")
    elif p.variant == "qc3" and (n % 3 or nk != n // 3 or l != 2 * n // 3):
        v.append("qc3 needs 3 | n, n-k = n/3 and l = 2n/3")
    elif p.variant == "qc4" and (n % 4 or nk != n // 2 or l != 3 * n // 4):
        v.append("qc4 needs 4 | n, n-k = n/2 and l = 3n/4")
    chk.h0_exponent = p.m * (n - l) * nk
    chk.msg_solutions_exponent = p.m * max(0, l - nk)
    chk.msg_solutions_exponent_alt = max(0, l - nk)
    return chk
