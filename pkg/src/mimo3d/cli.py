"""Command-line interface.

Subcommands:
  ber         BER sweep over an SNR grid, CSV output
  complexity  node-count sweep (same CSV schema, node-friendly defaults)
  verify      draw channels and machine-check the R zero structure
  decode-one  decode a single instance and dump the structured factors
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import channel, stbc
from .constellation import bits_to_symbols, make_qam
from .decoders import ml_bruteforce, simplified_ml_decode, sphere_decode_se
from .harness import (SimConfig, load_config_file, run_sweep, verify_structure_cmd,
                      write_csv)
from .structured_qr import gram_schmidt_qr, qr_r23


def _parse_snr(text: str) -> tuple:
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    return tuple(math.inf if t.strip().lower() == "inf" else float(t)
                 for t in text.split(","))


def _add_sweep_args(p):
    p.add_argument("--m", type=int, default=None, help="QAM order (square)")
    p.add_argument("--snr", type=str, default=None,
                   help="SNR grid in dB: comma list '0,5,10' or 'start:stop:step'")
    p.add_argument("--trials", type=int, default=None, help="trials per SNR point")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--decoders", type=str, default=None,
                   help="comma list from {bruteforce,sphere,simplified}")
    p.add_argument("--out", type=str, default=None, help="CSV output path")
    p.add_argument("--workers", type=int, default=None, help="worker processes")
    p.add_argument("--allow-bruteforce-large-m", action="store_true")
    p.add_argument("--no-early-break", action="store_true",
                   help="debug: disable adaptive-radius early termination")
    p.add_argument("--config", type=str, default=None,
                   help="key=value config file; CLI flags override it")


def _build_config(args, defaults: dict) -> SimConfig:
    cfg = dict(defaults)
    if args.config:
        cfg.update(load_config_file(args.config))
    if args.m is not None:
        cfg["m"] = args.m
    if args.snr is not None:
        cfg["snr"] = args.snr
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.decoders is not None:
        cfg["decoders"] = args.decoders
    if args.workers is not None:
        cfg["workers"] = args.workers
    if args.out is not None:
        cfg["out"] = args.out

    snr = cfg["snr"]
    snr_list = _parse_snr(snr) if isinstance(snr, str) else tuple(snr)
    decs = cfg["decoders"]
    if isinstance(decs, str):
        decs = tuple(d.strip() for d in decs.split(",") if d.strip())
    return SimConfig(
        m=int(cfg["m"]),
        snr_db_list=snr_list,
        trials_per_point=int(cfg["trials"]),
        master_seed=int(cfg["seed"]),
        decoders=decs,
        workers=int(cfg.get("workers", 1)),
        allow_bruteforce_large_m=bool(args.allow_bruteforce_large_m),
        use_breaks=not args.no_early_break,
        out_path=cfg.get("out"),
    )


def _print_rows(rows):
    print("snr_db decoder trials ber avg_total_nodes avg_delay_nodes")
    for r in rows:
        print(f"{r.snr_db:g} {r.decoder} {r.trials} {r.ber:.6g} "
              f"{r.avg_total_nodes:.6g} {r.avg_delay_nodes:.6g}")


def _cmd_sweep(args, defaults):
    config = _build_config(args, defaults)
    rows = run_sweep(config)
    _print_rows(rows)
    if config.out_path:
        print(f"wrote {config.out_path}")
    return 0


def _cmd_verify(args):
    outcome = verify_structure_cmd(args.channels, seed=args.seed, tol=args.tol,
                                   fault_column=args.inject_fault_column)
    print(f"channels checked: {outcome.channels}")
    print(f"max structural violation (rel to |R|_F): {outcome.max_violation_rel:.3e}")
    print(f"max metric-decomposition residual (rel): {outcome.metric_identity_max_rel:.3e}")
    if outcome.passed:
        print("PASS")
        return 0
    print(f"FAIL: {len(outcome.violations)} violations")
    for t, name, v in outcome.violations[:20]:
        print(f"  channel {t}: {name} = {v:.3e}")
    return 1


def _cmd_decode_one(args):
    qam = make_qam(args.m)
    g = stbc.generator_matrix()
    rng = channel.trial_rng(args.seed, channel.snr_key_of(args.snr), 0, sub=10)
    h = channel.draw_channel(rng)
    heq = channel.equivalent_channel(h, g)
    factors = gram_schmidt_qr(heq)
    r23f = qr_r23(factors.block(2, 3))

    rng_bits = channel.trial_rng(args.seed, channel.snr_key_of(args.snr), 0, sub=1)
    bits = rng_bits.integers(0, 2, size=8 * qam.bits_per_symbol).astype(np.uint8)
    s = bits_to_symbols(bits, qam)
    x = stbc.encode(s)
    rng_noise = channel.trial_rng(args.seed, channel.snr_key_of(args.snr), 0, sub=2)
    y = channel.transmit(x, h, channel.NoiseConfig(args.snr), rng_noise)
    y_tilde = channel.realize_received(y)
    z = factors.q.T @ y_tilde

    np.set_printoptions(precision=4, suppress=True, linewidth=140)
    print("transmitted s_tilde:", stbc.realize(s))
    print("z = Q^T y:", z)
    for j in range(1, 5):
        for k in range(j, 5):
            print(f"R_{j}{k}:")
            print(factors.block(j, k))
    print("F (from R_23 = E F):")
    print(r23f.f)

    for name in args.decoders.split(","):
        name = name.strip()
        if name == "bruteforce":
            res = ml_bruteforce(y_tilde, heq, qam,
                                allow_large=args.allow_bruteforce_large_m)
        elif name == "sphere":
            res = sphere_decode_se(y_tilde, heq, qam, factors=factors)
        elif name == "simplified":
            res = simplified_ml_decode(y_tilde, heq, qam, factors=factors,
                                       r23_factors=r23f)
        else:
            print(f"unknown decoder {name!r}", file=sys.stderr)
            return 2
        print(f"[{name}] metric={res.metric:.6g} total_nodes={res.nodes.total_nodes} "
              f"delay_nodes={res.nodes.delay_nodes}")
        if res.nodes.branch_nodes is not None:
            print(f"[{name}] branch nodes (aR,aI,cR,cI): {res.nodes.branch_nodes}")
        print(f"[{name}] s_hat_tilde: {res.s_tilde}")
        ok = np.array_equal(res.s_tilde, stbc.realize(s))
        print(f"[{name}] recovered transmitted vector: {ok}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="mimo3d")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_ber = sub.add_parser("ber", help="BER sweep")
    _add_sweep_args(p_ber)
    p_cx = sub.add_parser("complexity", help="visited-node sweep")
    _add_sweep_args(p_cx)

    p_v = sub.add_parser("verify", help="check R zero structure on random channels")
    p_v.add_argument("--channels", type=int, default=1000)
    p_v.add_argument("--seed", type=int, default=1)
    p_v.add_argument("--tol", type=float, default=1e-9)
    p_v.add_argument("--inject-fault-column", type=int, default=None,
                     help="test hook: scramble one generator column")

    p_d = sub.add_parser("decode-one", help="single-instance debug dump")
    p_d.add_argument("--m", type=int, default=4)
    p_d.add_argument("--snr", type=float, default=10.0)
    p_d.add_argument("--seed", type=int, default=1)
    p_d.add_argument("--decoders", type=str, default="sphere,simplified")
    p_d.add_argument("--allow-bruteforce-large-m", action="store_true")

    args = ap.parse_args(argv)
    if args.cmd == "ber":
        return _cmd_sweep(args, dict(m=4, snr="0:20:5", trials=20000, seed=1,
                                     decoders="sphere,simplified", workers=1))
    if args.cmd == "complexity":
        return _cmd_sweep(args, dict(m=4, snr="0:30:5", trials=1000, seed=1,
                                     decoders="sphere,simplified", workers=1))
    if args.cmd == "verify":
        return _cmd_verify(args)
    if args.cmd == "decode-one":
        return _cmd_decode_one(args)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
