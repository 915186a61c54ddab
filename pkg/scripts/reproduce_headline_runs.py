#!/usr/bin/env python3
"""Run the headline experiments end to end through the CLI.

Each block reproduces one figure-scale result: the strange-attractor
dimension of the dissipative baker map, quantum baker revivals, dynamical
localization and its destruction by measurement, the dissipative stationary
state, the spin-boson polarization run, and the double-well basins.

Outputs land under $CHAODYN_OUT (default ./runs). Expect ~10 minutes for the
full set; pass --quick for shrunken versions of the heavy runs.
"""

import argparse
import sys

from chaodyn.cli import main as chaodyn


def run(label, args):
    print(f"== {label}: chaodyn {' '.join(args)}")
    rc = chaodyn(args)
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="shrink the heavy runs")
    opts = ap.parse_args()
    q = opts.quick

    run("baker attractor dimension", [
        "baker", "--mode", "boxdim", "--contraction", "0.5",
        "--n-points", "200000" if q else "1000000",
    ])
    run("discrete recurrence", ["discrete", "--J", "32"])
    run("quantum baker revivals", ["qbaker", "--J", "8", "--steps", "500"])
    run("classical diffusion", [
        "standard-map", "--K", "10", "--steps", "100",
        "--n-traj", "20000" if q else "100000", "--entropy-stride", "10",
    ])
    run("dynamical localization", [
        "qkr", "--K", "10", "--hbar-frac", "0.15", "--steps", "1000",
        "--classical-traj", "5000" if q else "20000",
    ])
    run("measurement revives diffusion (strong)", [
        "qkr-measured", "--K", "5", "--hbar-frac", "0.1", "--nu", "0.5",
        "--steps", "128" if q else "512", "--l-max", "256" if q else "512",
    ])
    run("measurement revives diffusion (weak)", [
        "qkr-measured", "--K", "5", "--hbar-frac", "0.1", "--nu", "0.001",
        "--steps", "256" if q else "2048", "--l-max", "192" if q else "384",
        "--seed", "1",
    ])
    run("dissipative stationary state", [
        "qkr-dissipative", "--K", "5", "--lam", "0.3",
        "--l-max", "128" if q else "160", "--max-steps", "80" if q else "300",
    ])
    run("spin-boson polarization", [
        "spin-boson", "--N", "1", "--nmax", "40", "--g", "0.2",
        "--omega0", "1", "--omega1", "1", "--T", "50" if q else "200", "--dt", "0.01",
    ])
    run("double-well basins", [
        "double-well", "--mode", "basin", "--basin-grid", "64" if q else "256",
    ])
    run("double-well bath outcomes", [
        "double-well", "--mode", "bath", "--n-samples", "1000" if q else "10000",
    ])


if __name__ == "__main__":
    main()
