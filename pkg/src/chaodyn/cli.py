"""Command-line experiment runner.

Every subcommand writes CSV files plus a JSON run record into its output
directory; outputs are deterministic functions of (parameters, seed). The
output root is the CHAODYN_OUT environment variable (default ./runs), and a
plain-text KEY=VALUE config file can stand in for flags.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import doublewell, ensembles, maps, qbaker, qkr, qkr_open, qops, runio, spinboson, symbolic
from .runio import ExperimentConfig, RunRecord, write_csv


def _uniform_theta_sampler(p0: float):
    def sampler(rng, n):
        return rng.uniform(0.0, 2.0 * np.pi, n), np.full(n, p0)

    return sampler


def _uniform_square_sampler(rng, n):
    return rng.uniform(0.0, 1.0, n), rng.uniform(0.0, 1.0, n)


# ---------------------------------------------------------------------------
# runners: cfg -> (manifest, headline)
# ---------------------------------------------------------------------------

def run_bernoulli(cfg: ExperimentConfig):
    p = cfg.params
    x = p["x0"]
    rows = [(0, x)]
    for n in range(1, p["steps"] + 1):
        x = maps.bernoulli_step(x)
        rows.append((n, x))
    count = write_csv(cfg.outdir / "orbit.csv", ["n", "x"], rows)
    return {"orbit.csv": count}, {"final_x": x}


def run_baker(cfg: ExperimentConfig):
    p = cfg.params
    if p["mode"] == "orbit":
        pt = maps.PhasePoint(p["x0"], p["p0"])
        rows = [(0, pt.x, pt.p)]
        for n in range(1, p["steps"] + 1):
            pt = maps.dissipative_baker_step(pt, p["contraction"])
            rows.append((n, pt.x, pt.p))
        count = write_csv(cfg.outdir / "orbit.csv", ["n", "x", "p"], rows)
        return {"orbit.csv": count}, {"final_x": pt.x, "final_p": pt.p}
    if p["mode"] == "ensemble":
        map_id = "baker" if p["contraction"] >= 1.0 else "dissipative_baker"
        res = ensembles.evolve_ensemble(
            map_id,
            {"a": p["contraction"]},
            _uniform_square_sampler,
            p["steps"],
            p["n_traj"],
            cfg.seed,
            checkpoint_steps=tuple(range(p["steps"] + 1)),
        )
        rows = []
        for n in range(p["steps"] + 1):
            x, pp = res.checkpoints[n]
            ent = ensembles.coarse_entropy_2d(x, pp, p["grid"])
            rows.append((n, res.mean_p[n], res.var_p[n], ent))
        count = write_csv(cfg.outdir / "ensemble.csv", ["n", "mean_p", "var_p", "entropy"], rows)
        return {"ensemble.csv": count}, {"final_entropy": rows[-1][3]}
    # box-counting dimension of the dissipative attractor
    pts = ensembles.dissipative_baker_attractor(
        p["contraction"], p["n_points"], p["transient"], p["record"], cfg.seed
    )
    scales = 2.0 ** -np.arange(2, 11)
    dim, counts, resid = ensembles.box_counting_dimension(pts, scales)
    rows = list(zip(scales, counts.astype(int)))
    count = write_csv(cfg.outdir / "boxcounts.csv", ["scale", "boxes"], rows)
    return {"boxcounts.csv": count}, {"dimension": dim, "fit_residual": resid}


def run_standard_map(cfg: ExperimentConfig):
    p = cfg.params
    noise = maps.NoiseSpec(kind=p["noise"], variance=p["variance"], reset_prob=p["nu"])
    map_id = "standard" if (p["noise"] == "none" and p["lam"] == 0.0) else (
        "zaslavsky" if p["noise"] == "none" else "noisy_standard"
    )
    params = {"K": p["K"], "lam": p["lam"], "noise": noise}
    res = ensembles.evolve_ensemble(
        map_id, params, _uniform_theta_sampler(p["p0"]), p["steps"], p["n_traj"], cfg.seed,
        checkpoint_steps=tuple(range(0, p["steps"] + 1, max(1, p["entropy_stride"]))),
    )
    span = 5.0 * math.sqrt(max(p["K"], 1.0) ** 2 / 2.0 * max(p["steps"], 1)) + 10.0
    rows = []
    for n in range(p["steps"] + 1):
        if n in res.checkpoints:
            _, cloud = res.checkpoints[n]
            hist = ensembles.Histogram1D.from_samples(cloud, p["bins"], -span, span)
            ent = ensembles.shannon_entropy(hist)
        else:
            ent = float("nan")
        rows.append((n, res.mean_p[n], res.var_p[n], ent))
    count = write_csv(cfg.outdir / "ensemble.csv", ["n", "mean_p", "var_p", "entropy"], rows)
    fit = ensembles.fit_diffusion(res.var_p)
    return {"ensemble.csv": count}, {
        "D_fit": fit.slope,
        "fit_residual": fit.residual,
        "final_var": float(res.var_p[-1]),
    }


def run_discrete(cfg: ExperimentConfig):
    p = cfg.params
    manifest = {}
    headline = {}
    if p["dump"] in ("matrix", "both"):
        B = symbolic.bernoulli_perm(p["J"]).as_matrix()
        count = write_csv(
            cfg.outdir / "matrix.csv",
            [f"c{j}" for j in range(p["J"])],
            B.tolist(),
        )
        manifest["matrix.csv"] = count
    if p["dump"] in ("recurrence", "both"):
        rows = []
        J = 2
        while J <= p["J"]:
            rows.append((J, symbolic.recurrence_period(J)))
            J *= 2
        count = write_csv(cfg.outdir / "recurrence.csv", ["J", "period"], rows)
        manifest["recurrence.csv"] = count
        headline["max_period"] = rows[-1][1]
    return manifest, headline


def run_qbaker(cfg: ExperimentConfig):
    p = cfg.params
    qb = qbaker.build_quantum_baker(p["J"], p["convention"])
    steps = np.arange(p["steps"] + 1)
    pret = qbaker.return_probability(qb, steps)
    rows = list(zip(steps, pret, pret / qb.J**2))
    count = write_csv(cfg.outdir / "return_probability.csv", ["n", "P_ret", "P_ret_normalized"], rows)
    revivals = qbaker.find_revivals(qb, p["steps"], 0.3)
    best = [r for r in revivals if r[0] > 0]
    return {"return_probability.csv": count}, {
        "unitarity_defect": qb.unitarity_defect(),
        "best_revival_n": best[0][0] if best else -1,
        "best_revival": best[0][1] if best else 0.0,
    }


def _resolve_hbar(p) -> float:
    if p.get("hbar", 0.0) > 0.0:
        return p["hbar"]
    return qkr.hbar_from_frac(p["hbar_frac"])


def run_qkr(cfg: ExperimentConfig):
    p = cfg.params
    hbar = _resolve_hbar(p)
    k = p["K"] / hbar
    l_max = p["l_max"] or qkr.auto_l_max(p["K"], hbar)
    state = qkr.delta_state(l_max, hbar, k, literal_rot_phase=p["literal_rot_phase"])
    run = qkr.evolve(state, p["steps"])
    res = ensembles.evolve_ensemble(
        "standard", {"K": p["K"]}, _uniform_theta_sampler(0.0), p["steps"], p["classical_traj"], cfg.seed
    )
    e_classical = 0.5 * (res.var_p + res.mean_p**2)
    rows = list(zip(range(p["steps"] + 1), run.energies, e_classical))
    manifest = {
        "energy.csv": write_csv(cfg.outdir / "energy.csv", ["n", "E_quantum", "E_classical_ref"], rows),
        "distribution.csv": write_csv(
            cfg.outdir / "distribution.csv", ["l", "P_l"], zip(run.l_values, run.final_distribution)
        ),
    }
    fit = qkr.localization_length(run.final_distribution, run.l_values)
    return manifest, {
        "hbar": hbar,
        "E_final": float(run.energies[-1]),
        "loc_length": fit.length,
        "loc_r2": fit.r_squared,
    }


def run_qkr_measured(cfg: ExperimentConfig):
    p = cfg.params
    hbar = _resolve_hbar(p)
    k = p["K"] / hbar
    gamma = qkr_open.gamma_from_nu(p["nu"]) if p["mode"] == "full_Pl" else p["gamma"]
    state = qkr_open.delta_density(p["l_max"], hbar, k, gamma=gamma, mode=p["mode"])
    run = qkr_open.evolve_density(state, p["steps"], entropy_stride=p["entropy_stride"])
    rows = list(zip(range(p["steps"] + 1), run.energies, run.entropies))
    manifest = {
        "energy.csv": write_csv(cfg.outdir / "energy.csv", ["n", "E", "S_vN"], rows),
        "distribution.csv": write_csv(
            cfg.outdir / "distribution.csv", ["l", "P_l"], zip(run.l_values, run.final_distribution)
        ),
    }
    return manifest, {
        "hbar": hbar,
        "gamma": gamma,
        "E_final": float(run.energies[-1]),
        "trace_drift": run.trace_drift,
    }


def run_qkr_dissipative(cfg: ExperimentConfig):
    p = cfg.params
    hbar = p["hbar"]
    k = p["K"] / hbar
    state = qkr_open.delta_density(
        p["l_max"], hbar, k, gamma=p["gamma"], mode="full_Pl", lam=p["lam"]
    )
    n_run, history = qkr_open.evolve_to_stationary(
        state, n_max=p["max_steps"], rel_tol=1e-3, block=10, n_sub=p["n_sub"]
    )
    theta = 2.0 * np.pi * np.arange(p["theta_bins"]) / p["theta_bins"]
    p_grid, W = qops.wigner_cylinder(state.rho, theta, leak_tol=1e-5)
    wig_rows = (
        (theta[j], hbar * p_grid[i], W[i, j])
        for i in range(p_grid.size)
        for j in range(theta.size)
    )
    # classical stationary cloud of the matching Zaslavsky map, same run
    rng = np.random.default_rng(cfg.seed)
    n_cl = p["classical_traj"]
    th = rng.uniform(0.0, 2.0 * np.pi, n_cl)
    pp = rng.uniform(-np.pi, np.pi, n_cl)
    for _ in range(p["classical_transient"]):
        maps.zaslavsky_array(th, pp, p["K"], p["lam"])
    manifest = {
        "energy.csv": write_csv(
            cfg.outdir / "energy.csv", ["n", "E"], list(zip(range(n_run + 1), history))
        ),
        "wigner.csv": write_csv(cfg.outdir / "wigner.csv", ["theta", "p", "W"], wig_rows),
        "classical_attractor.csv": write_csv(
            cfg.outdir / "classical_attractor.csv", ["theta", "p"], zip(th, pp)
        ),
    }
    band = wigner_band_mass(hbar, theta, p_grid, W, th, pp, p["classical_transient_bins"])
    return manifest, {
        "n_periods": n_run,
        "E_final": float(history[-1]),
        "band_mass_3hbar": band,
    }


def wigner_band_mass(
    hbar: float,
    theta: np.ndarray,
    p_grid: np.ndarray,
    W: np.ndarray,
    th_cl: np.ndarray,
    p_cl: np.ndarray,
    n_theta_bins: int = 64,
    half_width: float = 3.0,
) -> float:
    """Fraction of Wigner mass within ``half_width * hbar`` in momentum of the
    classical attractor backbone (per-angle mean momentum of the classical
    stationary cloud, interpolated over angle)."""
    cols = np.minimum((th_cl / (2.0 * np.pi) * n_theta_bins).astype(int), n_theta_bins - 1)
    centers = (np.arange(n_theta_bins) + 0.5) * 2.0 * np.pi / n_theta_bins
    sums = np.bincount(cols, weights=p_cl, minlength=n_theta_bins)
    counts = np.bincount(cols, minlength=n_theta_bins)
    good = counts > 0
    backbone = np.interp(
        theta, centers[good], (sums[good] / counts[good]), period=2.0 * np.pi
    )
    p_phys = hbar * p_grid
    dth = theta[1] - theta[0]
    sel = np.abs(p_phys[:, None] - backbone[None, :]) <= half_width * hbar
    return float((W * dth)[sel].sum())


def _boson_coeffs(p, levels: int, seed: int) -> np.ndarray:
    kind = p["boson"]
    if kind == "vacuum":
        c = np.zeros(levels)
        c[0] = 1.0
    elif kind == "pair":
        c = np.zeros(levels)
        c[0] = c[1] = 1.0 / math.sqrt(2.0)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        c = rng.normal(size=levels) + 1.0j * rng.normal(size=levels)
        c[levels // 2 :] = 0.0
        c = c / np.linalg.norm(c)
    else:
        c = np.array([float(v) for v in kind.split(",")], dtype=complex)
        if c.size != levels:
            raise ValueError(f"need {levels} coefficients, got {c.size}")
        c = c / np.linalg.norm(c)
    return c


def run_spin_boson(cfg: ExperimentConfig):
    p = cfg.params
    if p["N"] == 1:
        system = spinboson.SpinBosonSystem(1, p["omega0"], [p["omega1"]], [p["g"]], p["nmax"])
    else:
        system = spinboson.SpinBosonSystem.ladder(p["N"], p["omega0"], p["omega1"], p["g"], p["nmax"])
    c = _boson_coeffs(p, system.levels, cfg.seed)
    psi0 = spinboson.initial_state(system, p["sign"], [c] * system.n_modes if system.n_modes > 1 else c)
    rec = spinboson.evolve(system, psi0, p["dt"], p["T"])
    rows = zip(
        rec.times, rec.bloch[:, 0], rec.bloch[:, 1], rec.bloch[:, 2],
        rec.purity, rec.entropy, rec.parity,
    )
    manifest = {
        "series.csv": write_csv(
            cfg.outdir / "series.csv",
            ["t", "a_x", "a_y", "a_z", "purity", "S_vN", "parity_expect"],
            rows,
        )
    }
    dwell = spinboson.switching_statistics(rec.times, rec.bloch[:, 2], p["threshold"])
    return manifest, {
        "dim": system.dim,
        "n_flips": dwell.n_flips,
        "parity_drift": float(np.max(np.abs(rec.parity - rec.parity[0]))),
        "energy_drift": float(np.max(np.abs(rec.energy - rec.energy[0]))),
    }


def run_double_well(cfg: ExperimentConfig):
    p = cfg.params
    manifest = {}
    headline = {}
    if p["mode"] == "basin":
        system = doublewell.DoubleWellSystem(a=p["a"], b=p["b"], lam=p["lam"])
        xc, pc, labels = doublewell.basin_map(
            system, (-p["x_max"], p["x_max"]), (-p["p_max"], p["p_max"]), p["basin_grid"]
        )
        rows = (
            (xc[i], pc[j], int(labels[i, j]))
            for i in range(xc.size)
            for j in range(pc.size)
        )
        manifest["basin.csv"] = write_csv(cfg.outdir / "basin.csv", ["x", "p", "label"], rows)
        headline["undecided_fraction"] = float(np.mean(labels == 0))
    elif p["mode"] == "bath":
        system = doublewell.DoubleWellSystem(
            a=p["a"], b=p["b"], lam=p["lam"], g=p["g"],
            bath_masses=np.ones(p["bath_modes"]),
            bath_omegas=np.linspace(0.2, 1.6, p["bath_modes"]),
        )
        out = doublewell.bath_outcome_experiment(system, p["n_samples"], cfg.seed, kT=p["kT"])
        manifest["bath.csv"] = write_csv(
            cfg.outdir / "bath.csv", ["sample", "label"], enumerate(out.labels.tolist())
        )
        headline["fraction_plus"] = out.fraction_plus
        headline["fraction_undecided"] = out.fraction_undecided
    else:
        system = doublewell.DoubleWellSystem(a=p["a"], b=p["b"], lam=p["lam"])
        traj = doublewell.damped_trajectory(system, p["x0"], p["p0"], record=True)
        manifest["orbit.csv"] = write_csv(
            cfg.outdir / "orbit.csv", ["t", "x", "p"], zip(traj.times, traj.x_s, traj.p_s)
        )
        headline["label"] = traj.label
    return manifest, headline


RUNNERS = {
    "bernoulli": run_bernoulli,
    "baker": run_baker,
    "standard-map": run_standard_map,
    "discrete": run_discrete,
    "qbaker": run_qbaker,
    "qkr": run_qkr,
    "qkr-measured": run_qkr_measured,
    "qkr-dissipative": run_qkr_dissipative,
    "spin-boson": run_spin_boson,
    "double-well": run_double_well,
}


def run(cfg: ExperimentConfig) -> RunRecord:
    """Execute one configured experiment and write its outputs + run record."""
    if cfg.subcommand not in RUNNERS:
        raise ValueError(f"unknown subcommand {cfg.subcommand!r}")
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    manifest, headline = RUNNERS[cfg.subcommand](cfg)
    record = RunRecord(cfg, time.perf_counter() - t0, manifest, headline)
    record.write()
    return record


def run_sweep(
    base_cfg: ExperimentConfig, axis_param: str, axis_values: list, parallelism: int = 1
) -> Path:
    """One run directory per axis value, each seeded from (master seed,
    index); partial failures are recorded and the sweep continues."""
    if not axis_values:
        raise ValueError("sweep axis is empty")
    summary_rows = []
    headline_keys: list[str] = []
    for idx, value in enumerate(axis_values):
        params = dict(base_cfg.params)
        if axis_param not in params:
            raise ValueError(f"unknown sweep parameter {axis_param!r}")
        params[axis_param] = value
        point = ExperimentConfig(
            base_cfg.subcommand,
            params,
            runio.spawn_seed(base_cfg.seed, idx),
            base_cfg.outdir / f"point_{idx:03d}",
        )
        try:
            record = run(point)
            if not headline_keys:
                headline_keys = sorted(record.headline)
            summary_rows.append(
                [idx, value, "ok"] + [record.headline.get(k, "") for k in headline_keys]
            )
        except Exception as exc:  # noqa: BLE001 - sweep must survive point failures
            summary_rows.append([idx, value, f"failed: {exc}"])
    path = base_cfg.outdir / "summary.csv"
    write_csv(path, ["index", axis_param, "status"] + headline_keys, summary_rows)
    return path


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaodyn", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--outdir", type=Path, default=None)
        sp.add_argument("--config", type=Path, default=None, help="KEY=VALUE file; flags win")

    sp = sub.add_parser("bernoulli", help="orbit of the doubling map")
    common(sp)
    sp.add_argument("--x0", type=float, default=0.3)
    sp.add_argument("--steps", type=int, default=50)

    sp = sub.add_parser("baker", help="baker-map orbits, ensembles, attractor dimension")
    common(sp)
    sp.add_argument("--mode", choices=["orbit", "ensemble", "boxdim"], default="orbit")
    sp.add_argument("--x0", type=float, default=0.3)
    sp.add_argument("--p0", type=float, default=0.7)
    sp.add_argument("--steps", type=int, default=20)
    sp.add_argument("--contraction", type=float, default=1.0)
    sp.add_argument("--n-traj", type=int, default=100_000)
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--n-points", type=int, default=1_000_000)
    sp.add_argument("--transient", type=int, default=10)
    sp.add_argument("--record", type=int, default=10)

    sp = sub.add_parser("standard-map", help="kicked-rotor ensemble diagnostics")
    common(sp)
    sp.add_argument("--K", type=float, default=10.0)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--n-traj", type=int, default=100_000)
    sp.add_argument("--p0", type=float, default=0.0)
    sp.add_argument("--noise", choices=["none", "gaussian", "reset"], default="none")
    sp.add_argument("--variance", type=float, default=0.0)
    sp.add_argument("--nu", type=float, default=0.0)
    sp.add_argument("--lam", type=float, default=0.0)
    sp.add_argument("--bins", type=int, default=200)
    sp.add_argument("--entropy-stride", type=int, default=1)

    sp = sub.add_parser("discrete", help="discretized Bernoulli/baker permutations")
    common(sp)
    sp.add_argument("--J", type=int, default=8)
    sp.add_argument("--dump", choices=["matrix", "recurrence", "both"], default="both")

    sp = sub.add_parser("qbaker", help="quantum baker map return probability")
    common(sp)
    sp.add_argument("--J", type=int, default=8)
    sp.add_argument("--steps", type=int, default=500)
    sp.add_argument("--convention", choices=["symmetric", "plain"], default="symmetric")

    sp = sub.add_parser("qkr", help="closed quantum kicked rotor")
    common(sp)
    sp.add_argument("--K", type=float, default=10.0)
    sp.add_argument("--hbar-frac", type=float, default=0.15,
                    help="sets hbar = 2*pi*frac/G, G the inverse golden ratio")
    sp.add_argument("--hbar", type=float, default=0.0, help="direct hbar override")
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--l-max", type=int, default=0, help="0 = auto")
    sp.add_argument("--classical-traj", type=int, default=20_000)
    sp.add_argument("--literal-rot-phase", action="store_true",
                    help="use exp(-i hbar l^2) instead of exp(-i hbar l^2 / 2)")

    sp = sub.add_parser("qkr-measured", help="continuously measured kicked rotor")
    common(sp)
    sp.add_argument("--K", type=float, default=5.0)
    sp.add_argument("--hbar-frac", type=float, default=0.1)
    sp.add_argument("--hbar", type=float, default=0.0)
    sp.add_argument("--nu", type=float, default=0.5)
    sp.add_argument("--gamma", type=float, default=0.0, help="coupling for mean_l mode")
    sp.add_argument("--mode", choices=["full_Pl", "mean_l"], default="full_Pl")
    sp.add_argument("--steps", type=int, default=512)
    sp.add_argument("--l-max", type=int, default=512)
    sp.add_argument("--entropy-stride", type=int, default=16)

    sp = sub.add_parser("qkr-dissipative", help="dissipative measured rotor, stationary state")
    common(sp)
    sp.add_argument("--K", type=float, default=5.0)
    sp.add_argument("--hbar", type=float, default=2.0 * math.pi * 0.02)
    sp.add_argument("--lam", type=float, default=0.3)
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--l-max", type=int, default=160)
    sp.add_argument("--max-steps", type=int, default=300)
    sp.add_argument("--n-sub", type=int, default=200)
    sp.add_argument("--theta-bins", type=int, default=128)
    sp.add_argument("--classical-traj", type=int, default=200_000)
    sp.add_argument("--classical-transient", type=int, default=300)
    sp.add_argument("--classical-transient-bins", type=int, default=64)

    sp = sub.add_parser("spin-boson", help="unitary spin measurement model")
    common(sp)
    sp.add_argument("--N", type=int, default=1)
    sp.add_argument("--nmax", type=int, default=40)
    sp.add_argument("--g", type=float, default=0.2)
    sp.add_argument("--omega0", type=float, default=1.0)
    sp.add_argument("--omega1", type=float, default=1.0,
                    help="mode frequency (N=1) or ladder cutoff (N>1)")
    sp.add_argument("--T", type=float, default=200.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--sign", type=int, choices=[1, -1], default=1)
    sp.add_argument("--boson", default="pair",
                    help="vacuum | pair | random | comma-separated coefficients")
    sp.add_argument("--threshold", type=float, default=0.1)

    sp = sub.add_parser("double-well", help="damped double well: basins, bath outcomes")
    common(sp)
    sp.add_argument("--a", type=float, default=0.25)
    sp.add_argument("--b", type=float, default=0.01)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.04)
    sp.add_argument("--mode", choices=["basin", "bath", "orbit"], default="basin")
    sp.add_argument("--basin-grid", type=int, default=256)
    sp.add_argument("--x-max", type=float, default=10.0)
    sp.add_argument("--p-max", type=float, default=2.0)
    sp.add_argument("--x0", type=float, default=4.0)
    sp.add_argument("--p0", type=float, default=0.0)
    sp.add_argument("--n-samples", type=int, default=10_000)
    sp.add_argument("--kT", type=float, default=1.0)
    sp.add_argument("--bath-modes", type=int, default=8)
    sp.add_argument("--g", type=float, default=0.02)

    sp = sub.add_parser("sweep", help="axis sweep over another subcommand")
    common(sp)
    sp.add_argument("--axis", required=True, help="param=v1,v2,v3")
    sp.add_argument("--parallel", type=int, default=1)
    sp.add_argument("base", nargs=argparse.REMAINDER,
                    help="-- followed by the base subcommand and its flags")

    return parser


def _namespace_to_params(args: argparse.Namespace) -> dict:
    skip = {"subcommand", "seed", "outdir", "config", "axis", "parallel", "base"}
    out = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, "config", None) is not None:
        overrides = runio.parse_config_file(args.config)
        unknown = [k for k in overrides if k not in vars(args)]
        if unknown:
            print(json.dumps({"error": "unknown config keys", "keys": unknown}), file=sys.stderr)
            return 2
        # config values become leading flags; explicit argv flags re-parse last and win
        merged = [args.subcommand]
        for key, value in overrides.items():
            merged += ["--" + key.replace("_", "-"), value]
        merged += [a for a in argv if a != args.subcommand]
        args = parser.parse_args(merged)

    if args.subcommand == "sweep":
        return _main_sweep(parser, args)

    outdir = args.outdir or runio.output_root() / f"{args.subcommand}-seed{args.seed}"
    cfg = ExperimentConfig(args.subcommand, _namespace_to_params(args), args.seed, Path(outdir))
    try:
        record = run(cfg)
    except (ValueError, RuntimeError) as exc:
        print(json.dumps({"error": str(exc), "subcommand": cfg.subcommand}), file=sys.stderr)
        return 1
    print(f"{cfg.subcommand}: wrote {sum(record.manifest.values())} rows "
          f"across {len(record.manifest)} files to {cfg.outdir}")
    for key, value in record.headline.items():
        print(f"  {key} = {value}")
    return 0


def _main_sweep(parser, args) -> int:
    base_argv = [a for a in args.base if a != "--"]
    if not base_argv:
        print(json.dumps({"error": "sweep needs a base subcommand after --"}), file=sys.stderr)
        return 2
    base_args = parser.parse_args(base_argv)
    if "=" not in args.axis:
        print(json.dumps({"error": "axis must be param=v1,v2,..."}), file=sys.stderr)
        return 2
    param, values_text = args.axis.split("=", 1)
    param = param.replace("-", "_")
    values = [_parse_axis_value(v) for v in values_text.split(",") if v != ""]
    if not values:
        print(json.dumps({"error": "empty sweep axis"}), file=sys.stderr)
        return 2
    outdir = args.outdir or runio.output_root() / f"sweep-{base_args.subcommand}-{param}-seed{args.seed}"
    base_cfg = ExperimentConfig(
        base_args.subcommand, _namespace_to_params(base_args), args.seed, Path(outdir)
    )
    try:
        summary = run_sweep(base_cfg, param, values, args.parallel)
    except ValueError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    print(f"sweep: {len(values)} points -> {summary}")
    return 0


def _parse_axis_value(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


if __name__ == "__main__":
    sys.exit(main())
