"""Monte-Carlo experiment driver: seeded trials, decoder comparison,
aggregation and CSV emission.

Every trial is fully determined by (master_seed, snr, trial_index), so
sweeps are reproducible byte for byte regardless of the worker count.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from . import channel, stbc
from .constellation import bits_to_symbols, make_qam, symbols_to_bits
from .decoders import ml_bruteforce, simplified_ml_decode, sphere_decode_se
from .structured_qr import SingularChannelError, gram_schmidt_qr, qr_r23, verify_structure

DECODER_NAMES = ("bruteforce", "sphere", "simplified")

CSV_HEADER = ("snr_db", "decoder", "trials", "bit_errors", "ber",
              "avg_total_nodes", "avg_delay_nodes", "max_delay_nodes",
              "mismatches_vs_oracle")

_QAM_CACHE = {}
_GENERATOR = None


def _cached_qam(m):
    if m not in _QAM_CACHE:
        _QAM_CACHE[m] = make_qam(m)
    return _QAM_CACHE[m]


def _cached_generator():
    global _GENERATOR
    if _GENERATOR is None:
        _GENERATOR = stbc.generator_matrix()
    return _GENERATOR


@dataclass(frozen=True)
class SimConfig:
    m: int = 4
    snr_db_list: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    trials_per_point: int = 1000
    master_seed: int = 1
    decoders: tuple = ("sphere", "simplified")
    workers: int = 1
    allow_bruteforce_large_m: bool = False
    use_breaks: bool = True
    out_path: str | None = None

    def validate(self):
        root = int(round(math.sqrt(self.m)))
        if root * root != self.m:
            raise ValueError(f"M={self.m} is not a square QAM order")
        if not self.snr_db_list:
            raise ValueError("SNR list must be nonempty")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if not self.decoders:
            raise ValueError("decoder set must be nonempty")
        for d in self.decoders:
            if d not in DECODER_NAMES:
                raise ValueError(f"unknown decoder {d!r}; choose from {DECODER_NAMES}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class ResultRow:
    snr_db: float
    decoder: str
    trials: int
    bit_errors: int
    avg_total_nodes: float = 0.0
    avg_delay_nodes: float = 0.0
    max_delay_nodes: int = 0
    mismatches_vs_oracle: int = 0

    @property
    def ber(self) -> float:
        bits = self.trials * 8 * int(round(math.log2(self._m)))
        return self.bit_errors / bits

    _m: int = 4


def run_trial(config: SimConfig, snr_db: float, trial_index: int):
    """One codeword: draw channel/bits/noise, run all enabled decoders.

    Returns {decoder: (bit_errors, total_nodes, delay_nodes)} plus a
    ``"mismatches"`` entry when the brute-force oracle is enabled.
    """
    qam = _cached_qam(config.m)
    g = _cached_generator()
    key = channel.snr_key_of(snr_db)

    redraw = 0
    while True:
        rng_h = channel.trial_rng(config.master_seed, key, trial_index, sub=10 + redraw)
        h = channel.draw_channel(rng_h)
        heq = channel.equivalent_channel(h, g)
        try:
            factors = gram_schmidt_qr(heq)
            break
        except SingularChannelError:
            redraw += 1
            if redraw > 100:
                raise
    r23f = qr_r23(factors.block(2, 3))

    rng_bits = channel.trial_rng(config.master_seed, key, trial_index, sub=1)
    bits_in = rng_bits.integers(0, 2, size=8 * qam.bits_per_symbol).astype(np.uint8)
    s = bits_to_symbols(bits_in, qam)
    x = stbc.encode(s)

    rng_noise = channel.trial_rng(config.master_seed, key, trial_index, sub=2)
    y = channel.transmit(x, h, channel.NoiseConfig(snr_db), rng_noise)
    y_tilde = channel.realize_received(y)

    results = {}
    for name in config.decoders:
        if name == "bruteforce":
            res = ml_bruteforce(y_tilde, heq, qam,
                                allow_large=config.allow_bruteforce_large_m)
        elif name == "sphere":
            res = sphere_decode_se(y_tilde, heq, qam, factors=factors,
                                   prune=config.use_breaks)
        else:
            res = simplified_ml_decode(y_tilde, heq, qam, factors=factors,
                                       r23_factors=r23f,
                                       use_breaks=config.use_breaks)
        bits_out = symbols_to_bits(res.symbols, qam)
        errors = int(np.count_nonzero(bits_out != bits_in))
        results[name] = (errors, res.nodes.total_nodes, res.nodes.delay_nodes,
                         res.s_tilde)

    out = {name: vals[:3] for name, vals in results.items()}
    if "bruteforce" in results:
        oracle = results["bruteforce"][3]
        out["mismatches"] = {
            name: int(not np.array_equal(results[name][3], oracle))
            for name in config.decoders if name != "bruteforce"
        }
    return out


def _trial_task(args):
    config, snr_db, trial_index = args
    return run_trial(config, snr_db, trial_index)


def run_sweep(config: SimConfig):
    """Run the full (snr x trials) grid; returns one ResultRow per
    (snr, decoder) and optionally writes them as CSV."""
    config.validate()
    rows = []
    for snr_db in config.snr_db_list:
        tasks = [(config, snr_db, t) for t in range(config.trials_per_point)]
        if config.workers > 1:
            with Pool(config.workers) as pool:
                trial_results = pool.map(_trial_task, tasks, chunksize=64)
        else:
            trial_results = [_trial_task(t) for t in tasks]

        for name in config.decoders:
            errs = sum(tr[name][0] for tr in trial_results)
            tot = sum(tr[name][1] for tr in trial_results)
            dly = sum(tr[name][2] for tr in trial_results)
            mx = max(tr[name][2] for tr in trial_results)
            mism = 0
            if "bruteforce" in config.decoders and name != "bruteforce":
                mism = sum(tr["mismatches"][name] for tr in trial_results)
            n = config.trials_per_point
            rows.append(ResultRow(
                snr_db=snr_db, decoder=name, trials=n, bit_errors=errs,
                avg_total_nodes=tot / n, avg_delay_nodes=dly / n,
                max_delay_nodes=mx, mismatches_vs_oracle=mism, _m=config.m,
            ))
    if config.out_path:
        write_csv(rows, config.out_path)
    return rows


def _fmt(x) -> str:
    return f"{x:.6g}"


def write_csv(rows, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([
                    _fmt(r.snr_db), r.decoder, r.trials, r.bit_errors,
                    _fmt(r.ber), _fmt(r.avg_total_nodes),
                    _fmt(r.avg_delay_nodes), r.max_delay_nodes,
                    r.mismatches_vs_oracle,
                ])
    except OSError as exc:
        raise OSError(f"cannot write results to {path!r}: {exc}") from exc


@dataclass
class VerifyOutcome:
    channels: int
    max_violation_rel: float
    metric_identity_max_rel: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_structure_cmd(n_channels: int, seed: int = 1, tol: float = 1e-9,
                         m: int = 4, fault_column: int | None = None) -> VerifyOutcome:
    """Draw channels and check the R zero structure plus the four-term
    metric decomposition; ``fault_column`` scrambles one generator
    column (test hook for detector sanity)."""
    if n_channels < 1:
        raise ValueError("need at least one channel")
    qam = make_qam(m)
    g = stbc.generator_matrix()
    if fault_column is not None:
        g = g.copy()
        rng = np.random.default_rng(seed)
        g[:, fault_column] = rng.standard_normal(g.shape[0])

    max_rel = 0.0
    max_metric_rel = 0.0
    violations = []
    for t in range(n_channels):
        rng = channel.trial_rng(seed, 0, t, sub=10)
        h = channel.draw_channel(rng)
        heq = channel.equivalent_channel(h, g)
        try:
            factors = gram_schmidt_qr(heq)
        except SingularChannelError:
            continue
        r23f = qr_r23(factors.block(2, 3))
        report = verify_structure(factors, r23f)
        max_rel = max(max_rel, report.max_violation() / report.r_norm)
        for name, v in report.violations(tol):
            violations.append((t, name, v))

        # four-term split of the triangularized metric + E-rotation identity
        rng_s = channel.trial_rng(seed, 0, t, sub=11)
        s_t = rng_s.choice(qam.pam.levels, size=16)
        z = rng_s.standard_normal(16)
        r = factors.r
        lhs = float(np.sum((z - r @ s_t) ** 2))
        a, b, c, d = s_t[0:4], s_t[4:8], s_t[8:12], s_t[12:16]
        e78 = np.sum((z[12:16] - factors.block(4, 4) @ d) ** 2)
        e56 = np.sum((z[8:12] - factors.block(3, 3) @ c - factors.block(3, 4) @ d) ** 2)
        e34 = np.sum((z[4:8] - factors.block(2, 2) @ b - factors.block(2, 3) @ c
                      - factors.block(2, 4) @ d) ** 2)
        e12 = np.sum((z[0:4] - factors.block(1, 1) @ a - factors.block(1, 2) @ b
                      - factors.block(1, 4) @ d) ** 2)
        rel = abs(lhs - (e78 + e56 + e34 + e12)) / (1.0 + lhs)
        v34 = z[4:8] - factors.block(2, 2) @ b - factors.block(2, 4) @ d
        rot = abs(np.sum((v34 - factors.block(2, 3) @ c) ** 2)
                  - np.sum((r23f.e.T @ v34 - r23f.f @ c) ** 2)) / (1.0 + lhs)
        rel = max(rel, rot)
        max_metric_rel = max(max_metric_rel, rel)
        if rel > tol:
            violations.append((t, "metric decomposition", rel))

    return VerifyOutcome(channels=n_channels, max_violation_rel=max_rel,
                         metric_identity_max_rel=max_metric_rel,
                         violations=violations)


def load_config_file(path: str) -> dict:
    """Plain key=value config file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out
