"""Monte Carlo estimate of the decryption failure rate.

Trial t draws from root.spawn(b"trial" + t) and key block b = t // rekey from
root.spawn(b"key" + b), so results do not depend on how trials are split
across workers.
"""
from __future__ import annotations

import dataclasses
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from scipy.stats import binomtest

from .errors import DecryptionFailure, IntegrityError, ParameterError
from .galois import sample_error, sample_subspace
from .lrpc import decode, failure_probability, gen_lrpc, syndrome
from .params import ParamSet, get_params
from .pke import decrypt, encrypt, keygen, param_field
from .rng import Drbg

MODES = ("pke", "decoder")


@dataclass
class SimResult:
    params: ParamSet
    mode: str
    variant: str
    trials: int
    failures: int
    reasons: dict[str, int]
    predicted: float | None
    ci: tuple[float, float]
    confidence: float

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def exponent(self) -> int:
        p = self.params
        return p.nk + 1 - p.r * p.d

    def in_band(self, factor: float = 2.0) -> bool:
        if self.predicted is None:
            return False
        return self.predicted / factor <= self.rate <= self.predicted * factor

    def kv_lines(self) -> list[str]:
        p = self.params
        lines = [
            f"param = {p.name}",
            f"mode = {self.mode}",
            f"variant = {self.variant}",
            f"n = {p.n}", f"nk = {p.nk}", f"d = {p.d}", f"r = {p.r}", f"m = {p.m}",
            f"trials = {self.trials}",
            f"failures = {self.failures}",
            f"observed_rate = {self.rate:.6g}",
            f"predicted_rate = {self.predicted:.6g}" if self.predicted is not None
            else "predicted_rate = n/a",
            f"predicted_exponent = {-self.exponent}",
            f"ci_level = {self.confidence}",
            f"ci_low = {self.ci[0]:.6g}",
            f"ci_high = {self.ci[1]:.6g}",
            f"within_factor2_band = {str(self.in_band()).lower()}",
        ]
        if p.table_failure_exp is not None:
            lines.append(f"table_failure_exponent = {p.table_failure_exp}")
        for k in sorted(self.reasons):
            lines.append(f"reason.{k} = {self.reasons[k]}")
        return lines


def _run_block(args) -> list[str | None]:
    params, seed, block, start, stop, mode, variant = args
    root = Drbg(seed)
    krng = root.spawn(b"key" + block.to_bytes(8, "little"))
    fld = param_field(params)
    if mode == "pke":
        sk, pk = keygen(params, krng)
    else:
        code = gen_lrpc(params.n, params.nk, params.d, fld, krng, params.structure)
    out: list[str | None] = []
    for t in range(start, stop):
        rng = root.spawn(b"trial" + t.to_bytes(8, "little"))
        if mode == "pke":
            msg = [fld.random(rng) for _ in range(params.l)]
            try:
                got = decrypt(sk, pk, encrypt(pk, msg, rng), variant)
                out.append(None if got == msg else "WrongMessage")
            except DecryptionFailure as exc:
                out.append(exc.reason.value)
            except IntegrityError:
                out.append("Integrity")
        else:
            if params.r == 0:
                e = [0] * params.n
            else:
                e = sample_error(sample_subspace(fld, params.r, rng), params.n, params.r, rng)
            res = decode(code, syndrome(code, e), params.r, variant)
            if not res.ok:
                out.append(res.failure.value)
            else:
                out.append(None if res.error == e else "WrongError")
    return out


def simulate(params: ParamSet | str, trials: int, seed: bytes | str | int = 0, mode: str = "pke",
             variant: str = "K", rekey: int = 250, workers: int = 1, r: int | None = None,
             confidence: float = 0.99) -> SimResult:
    p = get_params(params)
    if r is not None:
        p = dataclasses.replace(p, r=r, name=f"{p.name}@r={r}")
    if trials < 1:
        raise ParameterError("need at least one trial")
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}")
    if rekey < 1:
        raise ParameterError("rekey must be positive")
    seed = Drbg(seed).seed
    jobs = []
    for b, start in enumerate(range(0, trials, rekey)):
        jobs.append((p, seed, b, start, min(trials, start + rekey), mode, variant))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            blocks = list(ex.map(_run_block, jobs))
    else:
        blocks = [_run_block(j) for j in jobs]
    outcomes = [o for blk in blocks for o in blk]
    reasons = Counter(o for o in outcomes if o is not None)
    fails = sum(reasons.values())
    try:
        pred = failure_probability(p.n, p.nk, p.r, p.d)
    except ParameterError:
        pred = None
    ci = binomtest(fails, trials).proportion_ci(confidence_level=confidence, method="exact")
    return SimResult(p, mode, variant, trials, fails, dict(reasons), pred,
                     (float(ci.low), float(ci.high)), confidence)
