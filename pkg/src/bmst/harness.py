"""Monte Carlo BER/WER sweeps over BPSK-AWGN, and their CSV form.

Every frame draws its data and noise from its own counter-based stream keyed
by ``(master_seed, snr_index, frame_index)``, and a sweep point stops at the
first frame index where the error targets are met. Results therefore do not
depend on how frames are spread over worker processes.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
import csv
import io
import json
import math
import time

import numpy as np

from .analysis import BerCurve
from .channel import add_awgn, channel_llr, ebn0_to_sigma, frame_rng, modulate
from .codes import parse_code
from .decoder import decode_forward_backward, decode_sliding_window
from .encoder import BmstConfig, encode_sequence
from .gf2 import make_interleavers
from .messages import hard_decision

DECODERS = ("sliding-window", "forward-backward", "basic-only")


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass
class ExperimentConfig:
    code: str
    snr_list_db: list
    m: int = 1
    l: int = 10
    d: int = 0
    i_max: int = 18
    epsilon: float = 1e-5
    stop_rule: str = "entropy"
    list_size: int = 0
    cancel_mode: str = "soft"
    interleaver_seed: int = 0
    interleaver_spread: int = None
    max_frames: int = 1000
    min_bit_errors: int = 100
    min_frame_errors: int = 0
    master_seed: int = 0
    decoder: str = "sliding-window"
    output: str = None
    workers: int = 1
    record_elapsed: bool = True
    trace: str = None

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        for key in raw:
            if key not in known:
                raise ConfigError("unknown key", key)
        for key in ("code", "snr_list_db"):
            if key not in raw:
                raise ConfigError("missing required key", key)
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_json(self):
        return json.dumps(asdict(self), indent=2)

    def validate(self):
        ints = ("m", "l", "d", "i_max", "list_size", "interleaver_seed", "max_frames",
                "min_bit_errors", "min_frame_errors", "master_seed", "workers")
        for name in ints:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError("must be an integer", name)
        if self.interleaver_spread is not None and not isinstance(self.interleaver_spread, int):
            raise ConfigError("must be an integer or null", "interleaver_spread")
        if not isinstance(self.code, str):
            raise ConfigError("must be a code descriptor string", "code")
        if not isinstance(self.snr_list_db, list) or not self.snr_list_db:
            raise ConfigError("must be a non-empty list", "snr_list_db")
        if not all(isinstance(g, (int, float)) and not isinstance(g, bool) for g in self.snr_list_db):
            raise ConfigError("entries must be numbers", "snr_list_db")
        if self.min_bit_errors < 1:
            raise ConfigError("must be >= 1", "min_bit_errors")
        if self.max_frames < 1:
            raise ConfigError("must be >= 1", "max_frames")
        if self.workers < 1:
            raise ConfigError("must be >= 1", "workers")
        if self.decoder not in DECODERS:
            raise ConfigError(f"must be one of {DECODERS}", "decoder")
        if not isinstance(self.record_elapsed, bool):
            raise ConfigError("must be true or false", "record_elapsed")
        try:
            self.build()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc), "code" if "code" in str(exc).lower() else None) from None

    def basic_code(self):
        try:
            return parse_code(self.code)
        except ValueError as exc:
            raise ConfigError(str(exc), "code") from None

    def build(self):
        """The :class:`BmstConfig` this experiment runs (m = 0 for basic-only)."""
        code = self.basic_code()
        m = 0 if self.decoder == "basic-only" else self.m
        if m < 0:
            raise ConfigError("must be >= 0", "m")
        pis = make_interleavers(code.n, m, seed=self.interleaver_seed, s=self.interleaver_spread)
        try:
            return BmstConfig(
                code, m, self.l, pis, d=self.d, i_max=self.i_max, epsilon=self.epsilon,
                stop_rule=self.stop_rule, list_size=self.list_size, cancel_mode=self.cancel_mode,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class SimPoint:
    gamma_db: float
    ber: float
    wer: float
    frames: int
    bit_errors: int
    frame_errors: int
    avg_iterations: float
    elapsed_seconds: float
    sigma: float
    rate_overall: float
    rate_basic: float
    ber_std_error: float = math.nan

    def std_error(self, k_info):
        """Monte Carlo standard error ``sqrt(ber (1 - ber) / info_bits)``."""
        bits = self.frames * k_info
        return math.sqrt(self.ber * (1.0 - self.ber) / bits) if bits else math.inf


@dataclass
class FrameOutcome:
    bit_errors: int
    frame_error: bool
    iterations: float
    trace: list = field(default_factory=list)


def _decode_basic(cfg, y, sigma):
    u_hat = []
    for yt in y:
        _, app = cfg.code.siso(channel_llr(yt, sigma))
        u_hat.append(cfg.code.data_bits(hard_decision(app)))
    return np.array(u_hat, dtype=np.uint8), 1.0


def run_frame(exp, cfg, snr_idx, frame_idx, sigma, keep_trace=False):
    """Simulate one frame of L data blocks at noise level ``sigma``."""
    rng = frame_rng(exp.master_seed, snr_idx, frame_idx)
    u = rng.integers(0, 2, size=(cfg.l, cfg.k), dtype=np.uint8)
    c = encode_sequence(cfg, list(u))
    y = [add_awgn(modulate(ct), sigma, rng) for ct in c]
    trace = [] if keep_trace else None
    if exp.decoder == "basic-only":
        u_hat, iters = _decode_basic(cfg, y, sigma)
    else:
        run = decode_forward_backward if exp.decoder == "forward-backward" else decode_sliding_window
        res = run(cfg, y, sigma, trace=trace)
        u_hat, iters = res.u_hat, float(np.mean(res.iterations))
    errs = int(np.sum(u_hat != u))
    return FrameOutcome(errs, errs > 0, iters, trace or [])


_WORKER = {}


def _worker_init(exp_dict):
    exp = ExperimentConfig(**exp_dict)
    _WORKER["exp"] = exp
    _WORKER["cfg"] = exp.build()


def _worker_batch(args):
    snr_idx, frames, sigma = args
    exp, cfg = _WORKER["exp"], _WORKER["cfg"]
    return [run_frame(exp, cfg, snr_idx, f, sigma, exp.trace is not None) for f in frames]


def _done(bit_errors, frame_errors, exp):
    return bit_errors >= exp.min_bit_errors and frame_errors >= exp.min_frame_errors


def run_sweep(exp, workers=None, progress=None):
    """One :class:`SimPoint` per SNR in ``exp.snr_list_db``."""
    workers = exp.workers if workers is None else workers
    cfg = exp.build()
    rate = cfg.rate
    keep = exp.trace is not None
    trace_fh = open(exp.trace, "w", encoding="utf-8") if keep else None
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(asdict(exp),))
    points = []
    try:
        for snr_idx, gamma in enumerate(exp.snr_list_db):
            sigma = ebn0_to_sigma(gamma, rate)
            t0 = time.perf_counter()
            bits = ferr = frames = 0
            iters = 0.0
            nxt = 0
            while frames < exp.max_frames and not _done(bits, ferr, exp):
                batch = min(exp.max_frames - nxt, max(1, 2 * workers))
                idx = list(range(nxt, nxt + batch))
                nxt += batch
                if pool is None:
                    outs = [run_frame(exp, cfg, snr_idx, f, sigma, keep) for f in idx]
                else:
                    chunks = [(snr_idx, idx[w::workers], sigma) for w in range(workers)]
                    parts = list(pool.map(_worker_batch, chunks))
                    outs = [None] * batch
                    for w, part in enumerate(parts):
                        outs[w::workers] = part
                # reduce in frame order; surplus frames past the stop index are discarded
                for o in outs:
                    if frames >= exp.max_frames or _done(bits, ferr, exp):
                        break
                    if keep:
                        for rec in o.trace:
                            trace_fh.write(json.dumps({"snr_index": snr_idx, "frame": frames, **rec}) + "\n")
                    frames += 1
                    bits += o.bit_errors
                    ferr += int(o.frame_error)
                    iters += o.iterations
            elapsed = time.perf_counter() - t0 if exp.record_elapsed else 0.0
            info = frames * cfg.l * cfg.k
            pt = SimPoint(
                gamma_db=float(gamma), ber=bits / info, wer=ferr / frames, frames=frames,
                bit_errors=bits, frame_errors=ferr, avg_iterations=iters / frames,
                elapsed_seconds=elapsed, sigma=sigma, rate_overall=rate, rate_basic=cfg.code.rate,
            )
            pt.ber_std_error = pt.std_error(cfg.l * cfg.k)
            points.append(pt)
            if progress:
                progress(pt)
    finally:
        if pool is not None:
            pool.shutdown()
        if trace_fh is not None:
            trace_fh.close()
    return points


def run_reference_curve(code, snr_list_db, max_frames=1000, min_bit_errors=100, blocks=1,
                        master_seed=0, workers=1):
    """Basic-code BER under its own MAP/BCJR decoder; returns ``(BerCurve, points)``.

    Zero-error points are kept in ``points`` but left out of the curve.
    """
    exp = ExperimentConfig(
        code=code, snr_list_db=list(snr_list_db), m=0, l=blocks, decoder="basic-only",
        max_frames=max_frames, min_bit_errors=min_bit_errors, master_seed=master_seed, workers=workers,
    )
    exp.validate()
    points = run_sweep(exp)
    return curve_from_points(points, label=code), points


def curve_from_points(points, label=""):
    pts = [p for p in points if p.ber > 0]
    if not pts:
        raise ValueError("no point with a nonzero BER to build a curve from")
    return BerCurve(np.array([p.gamma_db for p in pts]), np.array([p.ber for p in pts]), label=label)


# -- CSV -------------------------------------------------------------------------

SIM_COLUMNS = [f.name for f in fields(SimPoint)]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def points_csv(points):
    return format_csv([[getattr(p, c) for c in SIM_COLUMNS] for p in points], SIM_COLUMNS)


def emit_csv(points, path):
    """Write sweep points (header + one row per point); floats use ``repr`` for exact re-parse."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(points_csv(points))


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_points_csv(fh.read())


def parse_points_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != SIM_COLUMNS:
        raise ValueError(f"expected header {','.join(SIM_COLUMNS)}")
    types = {f.name: f.type for f in fields(SimPoint)}
    out = []
    for r in rows[1:]:
        vals = {c: (int(v) if types[c] in (int, "int") else float(v)) for c, v in zip(SIM_COLUMNS, r)}
        out.append(SimPoint(**vals))
    return out


def curve_csv(curve, value_column="ber"):
    return format_csv(zip(curve.gamma_db.tolist(), curve.ber.tolist()), ["gamma_db", value_column])


def spectrum_csv(dj):
    return format_csv(sorted(dj.items()), ["j", "D_j"])


def read_curve(path):
    """A ``(gamma_db, ber)`` curve from any CSV carrying those two columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "gamma_db" not in rows[0] or "ber" not in rows[0]:
        raise ValueError(f"{path}: need gamma_db and ber columns")
    g = np.array([float(r["gamma_db"]) for r in rows])
    b = np.array([float(r["ber"]) for r in rows])
    keep = b > 0
    return BerCurve(g[keep], b[keep])
