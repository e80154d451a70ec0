"""Command-line entry point.

Exit status: 0 on success, 2 on a usage or configuration error, 3 when a run
fails (including failed checks such as ``interleaver check``).
"""

import argparse
import json
import math
import sys

import numpy as np

from . import analysis
from .codes import Codebook, build_nordstrom_robinson, parse_code
from .gf2 import Interleaver, InterleaverError, gen_s_random
from .harness import (
    ConfigError,
    ExperimentConfig,
    curve_csv,
    format_csv,
    points_csv,
    read_curve,
    run_sweep,
    spectrum_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class CheckFailed(RuntimeError):
    pass


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _load_config(args):
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
    exp = ExperimentConfig.from_json(text)
    if args.workers is not None:
        exp.workers = args.workers
    if args.output is not None:
        exp.output = args.output
    return exp


def _progress(pt):
    print(f"gamma={pt.gamma_db:g} dB  ber={pt.ber:.3e}  wer={pt.wer:.3e}  frames={pt.frames}",
          file=sys.stderr)


def cmd_simulate(args):
    exp = _load_config(args)
    pts = run_sweep(exp, progress=None if args.quiet else _progress)
    _write(points_csv(pts), exp.output)


def cmd_reference(args):
    exp = _load_config(args)
    exp.decoder = "basic-only"
    exp.validate()
    pts = run_sweep(exp, progress=None if args.quiet else _progress)
    _write(points_csv(pts), exp.output)


def _code(text):
    try:
        return parse_code(text)
    except ValueError as exc:
        raise ConfigError(str(exc), "code") from None


def _bmst_iowef(code, l, j_max):
    b = analysis.iowef_basic(code)
    caps = (code.k * l, j_max if j_max is not None else analysis.default_caps(code, l)[1])
    return analysis.iowef_bmst_m1(b, code.n, l, caps)


def cmd_iowef(args):
    code = _code(args.code)
    poly = analysis.iowef_basic(code) if args.l is None else _bmst_iowef(code, args.l, args.j_max)
    rows = [(i, j, c) for (i, j), c in sorted(poly.terms().items())]
    _write(format_csv(rows, ["i", "j", "coefficient"]), args.output)
    if poly.dropped:
        print(f"dropped coefficient mass above caps: {poly.dropped:.6g}", file=sys.stderr)


def cmd_spectrum(args):
    code = _code(args.code)
    j_max = args.j_max if args.j_max is not None else analysis.default_caps(code, args.l)[1]
    if args.independent:
        dj = analysis.independent_spectrum(analysis.iowef_basic(code), args.l, j_max)
    else:
        dj = analysis.spectrum_dj(_bmst_iowef(code, args.l, j_max), args.l, code.k)
    _write(spectrum_csv(dj), args.output)


def cmd_genie(args):
    l = math.inf if args.l in (None, 0) else args.l
    curve = analysis.genie_bound(read_curve(args.curve), args.m, l)
    _write(curve_csv(curve), args.output)


def cmd_union(args):
    code = _code(args.code)
    j_max = args.j_max if args.j_max is not None else analysis.default_caps(code, args.l)[1]
    dj = analysis.spectrum_dj(_bmst_iowef(code, args.l, j_max), args.l, code.k)
    rate = code.k * args.l / (code.n * (args.l + 1))
    gammas = _floats(args.snr)
    bound = analysis.union_bound_ber(dj, rate, np.array(gammas))
    _write(format_csv(zip(gammas, bound.tolist()), ["gamma_db", "ber_bound"]), args.output)


def cmd_interleaver_gen(args):
    pi = gen_s_random(args.n, args.s, seed=args.seed)
    _write(pi.dumps(), args.output)


def cmd_interleaver_check(args):
    with open(args.file, encoding="utf-8") as fh:
        try:
            pi = Interleaver.loads(fh.read())
        except (ValueError, InterleaverError) as exc:
            raise CheckFailed(f"{args.file}: {exc}") from None
    s = pi.s if args.s is None else args.s
    if not pi.spread_ok(s):
        raise CheckFailed(f"{args.file}: spread condition S={s} violated")
    print(f"ok: n={pi.n} S={s}")


def _codebook_text(cb):
    return "".join("".join(map(str, w)) + "\n" for w in cb.words)


def cmd_codebook_nr(args):
    _write(_codebook_text(build_nordstrom_robinson()), args.output)


def cmd_codebook_verify(args):
    with open(args.file, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or any(set(ln) - {"0", "1"} for ln in lines) or len({len(ln) for ln in lines}) != 1:
        raise CheckFailed(f"{args.file}: expected equal-length lines of 0/1")
    words = np.array([[int(ch) for ch in ln] for ln in lines], dtype=np.uint8)
    if len({w.tobytes() for w in words}) != len(words):
        raise CheckFailed(f"{args.file}: repeated codewords")
    size = len(words)
    cb = Codebook(words, info=np.zeros((size, 0), dtype=np.uint8))
    n, d = cb.n, cb.min_distance()
    print(json.dumps({"n": n, "size": size, "d_min": d}))
    expect = (args.n, args.size, args.d)
    got = (n, size, d)
    bad = [f"{name}={g} (expected {e})" for name, e, g in zip(("n", "size", "d_min"), expect, got)
           if e is not None and e != g]
    if bad:
        raise CheckFailed("; ".join(bad))


def build_parser():
    p = argparse.ArgumentParser(prog="bmst", description="Block Markov superposition transmission toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("simulate", cmd_simulate, "BER/WER sweep of a BMST system"),
                            ("reference", cmd_reference, "BER/WER sweep of the basic code alone")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("config", help="JSON experiment configuration")
        s.add_argument("--workers", type=int)
        s.add_argument("--output", help="CSV path (default: stdout or the config's output)")
        s.add_argument("--quiet", action="store_true")
        s.set_defaults(func=fn)

    an = sub.add_parser("analyze", help="weight spectra and bounds").add_subparsers(dest="what", required=True)
    s = an.add_parser("iowef", help="basic IOWEF, or the m=1 ensemble IOWEF with --l")
    s.add_argument("--code", required=True)
    s.add_argument("--l", type=int)
    s.add_argument("--j-max", type=int)
    s.add_argument("--output")
    s.set_defaults(func=cmd_iowef)
    s = an.add_parser("spectrum", help="D_j of the m=1 ensemble (or of independent transmission)")
    s.add_argument("--code", required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--j-max", type=int)
    s.add_argument("--independent", action="store_true")
    s.add_argument("--output")
    s.set_defaults(func=cmd_spectrum)
    s = an.add_parser("genie", help="shift a basic-code BER curve into the genie-aided bound")
    s.add_argument("--curve", required=True, help="CSV with gamma_db and ber columns")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--l", type=int, help="data blocks; omit for the L -> infinity limit")
    s.add_argument("--output")
    s.set_defaults(func=cmd_genie)
    s = an.add_parser("union", help="union bound for m=1 from the truncated ensemble spectrum")
    s.add_argument("--code", required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--snr", required=True, help="comma-separated Eb/N0 values in dB")
    s.add_argument("--j-max", type=int)
    s.add_argument("--output")
    s.set_defaults(func=cmd_union)

    il = sub.add_parser("interleaver", help="S-random interleavers").add_subparsers(dest="what", required=True)
    s = il.add_parser("gen")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--s", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output")
    s.set_defaults(func=cmd_interleaver_gen)
    s = il.add_parser("check")
    s.add_argument("file")
    s.add_argument("--s", type=int)
    s.set_defaults(func=cmd_interleaver_check)

    cb = sub.add_parser("codebook", help="explicit codebooks").add_subparsers(dest="what", required=True)
    s = cb.add_parser("nr", help="write the (15, 256, 5) Nordstrom-Robinson codebook")
    s.add_argument("--output")
    s.set_defaults(func=cmd_codebook_nr)
    s = cb.add_parser("verify", help="count codewords and compute the minimum distance")
    s.add_argument("file")
    s.add_argument("--n", type=int)
    s.add_argument("--size", type=int)
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_codebook_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - every other failure maps to the runtime status
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
