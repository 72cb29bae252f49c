#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each hot kernel under both backends in subprocesses (the backend is
fixed at import time via RISDECOY_DISABLE_NUMBA) and prints a table.

Usage: python benchmarks/bench_kernels.py [--trials 200] [--grid 1781]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from risdecoy import _kernels
from risdecoy.ris_kernel import build_basis, NullingWindow, kernel_vector

cfg = json.loads(sys.argv[1])
deg = np.deg2rad
out = {"backend": _kernels.BACKEND}

# --- solver projection loop ---
for M in cfg["sizes"]:
    window = NullingWindow(deg(20.0), deg(3.0), 10)
    basis = build_basis(window, deg(-48.0), deg(20.0), M)
    Vh = np.ascontiguousarray(basis.V.conj().T)
    _kernels.pocs_loop(basis.w, basis.U, Vh, 0.5, 10, 1e-300)  # warm / compile
    reps = []
    for _ in range(5):
        t0 = time.perf_counter()
        _kernels.pocs_loop(basis.w, basis.U, Vh, 0.5, cfg["iters"], 1e-300)
        reps.append(time.perf_counter() - t0)
    out[f"pocs_M{M}"] = min(reps) / cfg["iters"]

# --- ML spectrum batch ---
rng = np.random.default_rng(0)
N, T = 16, 50
g = deg(np.linspace(-89, 89, cfg["grid"]))
A = np.exp(1j * np.pi * np.arange(N)[:, None] * np.sin(g)[None, :])
Y = rng.standard_normal((cfg["trials"], N, T)) + 1j * rng.standard_normal((cfg["trials"], N, T))
R = Y @ Y.conj().transpose(0, 2, 1) / T
_kernels.spectrum_argmax_batch(R[:2], A)  # warm / compile
reps = []
for _ in range(3):
    t0 = time.perf_counter()
    idx, pk = _kernels.spectrum_argmax_batch(R, A)
    reps.append(time.perf_counter() - t0)
out["spectrum"] = min(reps)
out["spectrum_checksum"] = int(idx.sum())
print(json.dumps(out))
"""


def run_backend(disable_numba, cfg):
    env = dict(os.environ)
    if disable_numba:
        env["RISDECOY_DISABLE_NUMBA"] = "1"
    else:
        env.pop("RISDECOY_DISABLE_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", WORKER, json.dumps(cfg)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--grid", type=int, default=1781)
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    args = ap.parse_args()
    cfg = {"trials": args.trials, "grid": args.grid, "iters": args.iters,
           "sizes": args.sizes}

    print("collecting numba timings ...")
    nb = run_backend(False, cfg)
    print("collecting numpy timings ...")
    np_ = run_backend(True, cfg)
    assert nb["spectrum_checksum"] == np_["spectrum_checksum"], "backends disagree"

    print(f"\n{'kernel':<18}{'numba':>12}{'numpy':>12}{'speedup':>9}")
    for M in args.sizes:
        key = f"pocs_M{M}"
        print(f"{'pocs/iter M=' + str(M):<18}{nb[key]*1e6:>10.2f}us"
              f"{np_[key]*1e6:>10.2f}us{np_[key]/nb[key]:>8.1f}x")
    print(f"{'spectrum batch':<18}{nb['spectrum']*1e3:>10.1f}ms"
          f"{np_['spectrum']*1e3:>10.1f}ms{np_['spectrum']/nb['spectrum']:>8.1f}x")


if __name__ == "__main__":
    main()
