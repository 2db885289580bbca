"""Acceptance gate: seven end-to-end checks, one pass/fail line each.

Run order matters only for readability; every check is independent and
fully seeded.
"""

import math

import numpy as np
import pytest

from conftest import random_instance
from mimo3d import channel, stbc
from mimo3d.cli import main
from mimo3d.decoders import ml_bruteforce, simplified_ml_decode, sphere_decode_se
from mimo3d.harness import SimConfig, run_sweep, verify_structure_cmd


def _report(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {num}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def structure_outcome():
    # one pass over 1000 seeded channels feeds both the zero-structure
    # check and the metric-decomposition check
    return verify_structure_cmd(1000, seed=1, tol=1e-9)


def test_criterion_1_structure_theorems(structure_outcome, capsys):
    out = structure_outcome
    struct_viol = [v for v in out.violations if v[1] != "metric decomposition"]
    ok = not struct_viol and out.max_violation_rel <= 1e-9
    _report(capsys, 1, ok,
            f"1000 channels, max |entry|/|R|_F = {out.max_violation_rel:.2e} "
            f"(tol 1e-9), {len(struct_viol)} violations")


def test_criterion_2_model_consistency(capsys):
    g = stbc.generator_matrix()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        h = channel.draw_channel(rng)
        heq = channel.equivalent_channel(h, g)
        s = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        lhs = stbc.realize((h @ stbc.encode(s)).flatten(order="F"))
        worst = max(worst, float(np.abs(lhs - heq @ stbc.realize(s)).max()))
    _report(capsys, 2, worst < 1e-12,
            f"1000 draws, max |realize(vec(HX)) - H_eq s| = {worst:.2e} (tol 1e-12)")


def test_criterion_3_metric_decomposition(structure_outcome, capsys):
    out = structure_outcome
    ok = out.metric_identity_max_rel <= 1e-9
    _report(capsys, 3, ok,
            f"1000 instances, max relative residual of four-term split and "
            f"rotation identity = {out.metric_identity_max_rel:.2e} (tol 1e-9)")


def test_criterion_4_ml_optimality(qam4, generator, capsys):
    snrs = (0.0, 5.0, 10.0, 15.0, 20.0)
    per_snr = 400
    mismatches = 0
    worst_dm = 0.0
    for snr in snrs:
        rng = np.random.default_rng(4000 + int(snr))
        for _ in range(per_snr):
            y, heq, _ = random_instance(rng, qam4, generator, snr_db=snr)
            ref = ml_bruteforce(y, heq, qam4)
            for dec in (sphere_decode_se, simplified_ml_decode):
                res = dec(y, heq, qam4)
                if not np.array_equal(res.s_tilde, ref.s_tilde):
                    mismatches += 1
                worst_dm = max(worst_dm, abs(res.metric - ref.metric))
    total = len(snrs) * per_snr
    ok = mismatches == 0 and worst_dm < 1e-9
    _report(capsys, 4, ok,
            f"{total} trials x 2 decoders vs brute force: {mismatches} argmin "
            f"mismatches, max metric difference {worst_dm:.2e} (tol 1e-9)")


def test_criterion_5_complexity_reduction(capsys):
    rows = run_sweep(SimConfig(m=4, snr_db_list=(0.0, 30.0),
                               trials_per_point=1000, master_seed=5,
                               decoders=("sphere", "simplified")))
    by = {(r.snr_db, r.decoder): r for r in rows}
    simp0 = by[(0.0, "simplified")].avg_delay_nodes
    sph0 = by[(0.0, "sphere")].avg_total_nodes
    simp30 = by[(30.0, "simplified")].avg_delay_nodes
    sph30 = by[(30.0, "sphere")].avg_total_nodes
    a = simp0 <= 0.5 * sph0
    b = simp30 < sph30 and 10 <= simp30 <= 60 and 15 <= sph30 <= 80
    c = simp0 < 0.1 * 65536 and sph0 < 0.1 * 65536
    _report(capsys, 5, a and b and c,
            f"0 dB delay(simplified)={simp0:.1f} vs total(sphere)={sph0:.1f} "
            f"(need <=0.5x); 30 dB {simp30:.1f} (band [10,60]) vs {sph30:.1f} "
            f"(band [15,80]); both far below 65536")


def test_criterion_6_early_termination_soundness(qam4, generator, capsys):
    rng = np.random.default_rng(6)
    changed = 0
    nodes_on = 0
    nodes_off = 0
    for _ in range(500):
        y, heq, _ = random_instance(rng, qam4, generator,
                                    snr_db=float(rng.uniform(0, 30)))
        on = simplified_ml_decode(y, heq, qam4, use_breaks=True)
        off = simplified_ml_decode(y, heq, qam4, use_breaks=False)
        if not np.array_equal(on.s_tilde, off.s_tilde):
            changed += 1
        nodes_on += on.nodes.total_nodes
        nodes_off += off.nodes.total_nodes
    ok = changed == 0 and nodes_off > nodes_on
    _report(capsys, 6, ok,
            f"500 instances with breaks disabled: {changed} argmin changes; "
            f"avg nodes {nodes_on / 500:.1f} -> {nodes_off / 500:.1f}")


def test_criterion_7_ber_monotone_and_deterministic(tmp_path, capsys):
    paths = [tmp_path / f"sweep{i}.csv" for i in range(3)]
    for path, workers in zip(paths, (1, 1, 2)):
        rc = main(["ber", "--m", "4", "--snr", "0:20:5", "--trials", "20000",
                   "--seed", "1", "--decoders", "sphere,simplified",
                   "--workers", str(workers), "--out", str(path)])
        assert rc == 0
    blobs = [p.read_bytes() for p in paths]
    identical = blobs[0] == blobs[1] == blobs[2]

    lines = blobs[0].decode().strip().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    nbits = 20000 * 8 * 2
    monotone = True
    for dec in ("sphere", "simplified"):
        bers = [float(r["ber"]) for r in rows if r["decoder"] == dec]
        for prev, nxt in zip(bers[:-1], bers[1:]):
            band = 1.96 * math.sqrt(max(prev * (1 - prev), 0.0) / nbits)
            if nxt > prev + band:
                monotone = False
    ber0 = [float(r["ber"]) for r in rows if r["snr_db"] == "0"]
    _report(capsys, 7, identical and monotone,
            f"3 sweeps (workers 1/1/2) byte-identical: {identical}; BER "
            f"non-increasing within 95% binomial bands: {monotone} "
            f"(0 dB BER ~{max(ber0):.3g})")
