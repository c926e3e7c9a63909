"""mcnie command line.

Exit codes: 0 ok, 1 reject or decoding failure, 2 invalid input, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import codec
from .cca import ConversionConfig, Reject, WrappedCiphertext, cca_decrypt, cca_encrypt
from .errors import DecryptionFailure, IntegrityError, McNieError, UnsupportedError
from .params import get_params, registry, validate_params
from .pke import decrypt, encrypt, keygen, param_field
from .rng import Drbg

EXIT_OK, EXIT_REJECT, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):

    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _rng(seed: str | None) -> Drbg:
    if seed is None:
        return Drbg.from_entropy()
    try:
        return Drbg(bytes.fromhex(seed))
    except ValueError:
        raise CliError(f"--seed must be hex, got {seed!r}", EXIT_INVALID) from None


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None


def _write(path: str, data: bytes):
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def _check_writable(*paths: str):
    for p in paths:
        parent = Path(p).resolve().parent
        if not parent.is_dir():
            raise CliError(f"output directory {parent} does not exist", EXIT_IO)


def _params(spec: str):
    p = get_params(spec)
    chk = validate_params(p)
    if not chk.ok:
        raise CliError("invalid parameters:\n" + "\n".join(f"  - {v}" for v in chk.violations),
                       EXIT_INVALID)
    for w in chk.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return p


def _keys(args):
    pk = codec.deserialize_public(_read(args.pub))
    sk = codec.deserialize_private(_read(args.priv))
    if pk.params != sk.params:
        raise CliError("public and private keys use different parameter sets", EXIT_INVALID)
    return sk, pk


def _report(title: str, lines: list[str]):
    print(f"----- BEGIN {title} -----")
    for ln in lines:
        print(ln)
    print(f"----- END {title} -----")


# -- subcommands --------------------------------------------------------------

def cmd_keygen(args):
    p = _params(args.param)
    _check_writable(args.out_pub, args.out_priv)
    sk, pk = keygen(p, _rng(args.seed))
    pub = codec.serialize_public(pk)
    _write(args.out_pub, pub)
    _write(args.out_priv, codec.serialize_private(sk))
    print(f"public key: {len(pub) - len(codec.encode_header(p))} bytes")
    return EXIT_OK


def cmd_encrypt(args):
    pk = codec.deserialize_public(_read(args.pub))
    p = pk.params
    data = _read(args.input)
    nb = param_field(p).nbytes
    if len(data) % nb:
        raise CliError(f"message must be a whole number of {nb}-byte field elements", EXIT_INVALID)
    count = len(data) // nb
    if count > p.l:
        raise CliError(f"message has {count} field elements, at most {p.l} allowed", EXIT_INVALID)
    if count < p.l:
        print(f"warning: message zero-padded from {count} to {p.l} field elements "
              "(use cca-encrypt for real data)", file=sys.stderr)
        data += bytes((p.l - count) * nb)
    msg = codec.decode_vector(p, data, p.l)
    _check_writable(args.out)
    ct = encrypt(pk, msg, _rng(args.seed), e2=args.e2)
    _write(args.out, codec.serialize_ciphertext(p, ct))
    return EXIT_OK


def cmd_decrypt(args):
    sk, pk = _keys(args)
    p, ct = codec.deserialize_ciphertext(_read(args.input))
    if p != pk.params:
        raise CliError("ciphertext parameter set does not match the key", EXIT_INVALID)
    _check_writable(args.out)
    msg = decrypt(sk, pk, ct, args.variant)
    _write(args.out, codec.encode_vector(p, msg))
    return EXIT_OK


def cmd_cca_encrypt(args):
    pk = codec.deserialize_public(_read(args.pub))
    cfg = ConversionConfig(pk.params)
    msg = _read(args.input)
    _check_writable(args.out)
    w = cca_encrypt(cfg, pk, msg, _rng(args.seed))
    _write(args.out, codec.encode_header(pk.params) + w.to_bytes(pk.params, cfg.config_id))
    return EXIT_OK


def cmd_cca_decrypt(args):
    sk, pk = _keys(args)
    cfg = ConversionConfig(pk.params)
    data = _read(args.input)
    try:
        p, off = codec.decode_header(data)
    except McNieError:
        raise Reject() from None
    if p != pk.params:
        raise Reject()
    _check_writable(args.out)
    msg = cca_decrypt(cfg, sk, pk, data[off:])
    _write(args.out, msg)
    return EXIT_OK


def cmd_audit(args):
    from .secest import audit
    p = get_params(args.param)
    target = args.target_bits if args.target_bits is not None else (p.security or 128)
    rep = audit(p, target, include_reduced=args.include_reduced)
    if args.format == "kv":
        _report("AUDIT REPORT", rep.kv_lines())
    else:
        _report("AUDIT REPORT", rep.render().splitlines())
    if args.figure:
        from .plotting import audit_figure
        print(f"figure: {audit_figure(rep, args.figure)}")
    return EXIT_OK if rep.passed else EXIT_REJECT


def cmd_simulate(args):
    from .sim import simulate
    p = get_params(args.param)
    if args.trials < 1:
        raise CliError("--trials must be at least 1", EXIT_INVALID)
    seed = bytes.fromhex(args.seed) if args.seed else Drbg.from_entropy().seed
    res = simulate(p, args.trials, seed, mode=args.mode, variant=args.variant,
                   rekey=args.rekey, workers=args.workers, r=args.r)
    _report("SIMULATION REPORT", res.kv_lines() + [f"seed = {seed.hex()}"])
    if args.figure:
        from .plotting import failure_rate_figure
        print(f"figure: {failure_rate_figure([res], args.figure)}")
    return EXIT_OK


def cmd_params(args):
    from .pke import public_key_bits
    print(f"{'name':<10}{'variant':<9}{'n':>5}{'l':>5}{'k':>5}{'d':>3}{'r':>4}{'m':>4}"
          f"{'pk bits':>9}{'pk bytes':>10}{'sec':>5}")
    for name, p in registry().items():
        try:
            bits = public_key_bits(p)
            size = f"{codec.public_payload_len(p):>10}"
        except UnsupportedError:
            bits, size = "-", f"{codec.public_payload_len(p):>10}"
        print(f"{name:<10}{p.variant:<9}{p.n:>5}{p.l:>5}{p.k:>5}{p.d:>3}{p.r:>4}{p.m:>4}"
              f"{bits:>9}{size}{p.security or '-':>5}")
    return EXIT_OK


def _bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {s!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcnie", description="McNie rank-metric public-key encryption")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("keygen", help="generate a key pair")
    s.add_argument("--param", required=True, help="named set or custom:n=..,m=..,nk=..,d=..,r=..[,variant=..]")
    s.add_argument("--seed")
    s.add_argument("--out-pub", required=True)
    s.add_argument("--out-priv", required=True)
    s.set_defaults(func=cmd_keygen)

    s = sub.add_parser("encrypt", help="raw PKE encryption of a field-element vector")
    s.add_argument("--pub", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed")
    s.add_argument("--e2", action="store_true", help="countermeasure mode (not supported)")
    s.set_defaults(func=cmd_encrypt)

    s = sub.add_parser("decrypt", help="raw PKE decryption")
    s.add_argument("--priv", required=True)
    s.add_argument("--pub", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--variant", choices=("A", "K"), default="K")
    s.set_defaults(func=cmd_decrypt)

    s = sub.add_parser("cca-encrypt", help="CCA2-converted encryption of arbitrary bytes")
    s.add_argument("--pub", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed")
    s.set_defaults(func=cmd_cca_encrypt)

    s = sub.add_parser("cca-decrypt", help="CCA2-converted decryption")
    s.add_argument("--priv", required=True)
    s.add_argument("--pub", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cca_decrypt)

    s = sub.add_parser("audit", help="attack-cost audit of a parameter set")
    s.add_argument("--param", required=True)
    s.add_argument("--target-bits", type=int)
    s.add_argument("--include-reduced", type=_bool, default=True)
    s.add_argument("--format", choices=("text", "kv"), default="kv")
    s.add_argument("--figure", help="write a PNG bar chart here")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("simulate", help="Monte Carlo decryption failure rate")
    s.add_argument("--param", required=True)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed")
    s.add_argument("--mode", choices=("pke", "decoder"), default="pke")
    s.add_argument("--variant", choices=("A", "K"), default="K")
    s.add_argument("--rekey", type=int, default=250, help="trials per key pair")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--r", type=int, help="override the error rank")
    s.add_argument("--figure", help="write a PNG of observed vs predicted rate here")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("params", help="list parameter sets")
    s.set_defaults(func=cmd_params)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (Reject, DecryptionFailure, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECT
    except McNieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
