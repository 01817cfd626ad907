"""Scenario orchestration: solver dispatch, sweeps, CSV and manifest emission."""
from __future__ import annotations

import dataclasses
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, heom, mapping, measures, rcme, weak
from .core import SpinBosonParams, TimeGrid
from .errors import InvalidMomentsError, RcsimError, ValidationError
from .operators import ptrace_matrix
from .scenarios import ScenarioConfig

HEOM_STEADY_T = 300.0
NG_M_LIMIT = 32  # largest RC truncation attempted purely to certify delta_G

SWEEP_COLUMNS = (
    "ln_ratio_rcme",
    "coherence_rcme",
    "ln_ratio_thermal_h0",
    "coherence_thermal_h0",
    "ln_ratio_gibbs_hs",
    "qmi_ss",
    "nongauss_ss",
)
SWEEP_HEOM_COLUMNS = ("ln_ratio_heom", "coherence_heom")


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def converged_rcme_trajectory(config: ScenarioConfig, grid: TimeGrid):
    """RC-truncation-converged RCME trajectory; returns (M, record, trajectory)."""
    mapped = mapping.map_to_rc(config.params, config.ratio)
    solver_tol = config.tolerances["solver"]
    cache = {}

    def evaluate(M):
        L = rcme.build_generator(mapped, config.params, M)
        rho0 = rcme.initial_state(mapped, config.params, M)
        # uniform grid: exact exponential stepping sidesteps the stiff
        # residual-bath rates that throttle explicit integration
        traj = rcme.propagate(L, rho0, grid, tol=solver_tol, method="expm")
        cache[M] = traj
        return np.array([rcme.population_site1(r) for r in traj])

    M, record = rcme.converge_truncation(evaluate, tol=config.tolerances["truncation"])
    return M, record, cache[M]


def steady_observables(
    params: SpinBosonParams,
    ratio: float,
    tolerances: dict,
    include_heom: bool = False,
) -> tuple[dict, dict]:
    """Steady-state observable row for one parameter point; returns (row, meta)."""
    mapped = mapping.map_to_rc(params, ratio)
    cache = {}

    def evaluate(M):
        L = rcme.build_generator(mapped, params, M)
        rho_ss = rcme.steady_state(L)
        rho_s = ptrace_matrix(rho_ss, "TLS")
        ratio_pop, coh = measures.eigenbasis_observables(rho_s, params)
        qmi = measures.mutual_information(rho_ss)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # top-level population checked below
                ng = measures.non_gaussianity(ptrace_matrix(rho_ss, "RC"))
        except InvalidMomentsError:
            # second moments are truncation-limited at this M
            ng = math.nan
        cache[M] = (rho_ss, ratio_pop, coh, qmi, ng)
        return np.array([math.log(ratio_pop), abs(coh), qmi])

    M, record = rcme.converge_truncation(evaluate, tol=tolerances["truncation"])

    # The non-Gaussianity is certified separately against the half truncation
    # (its second moments can be uncomputable at the M that already converges
    # every other observable), extending M if needed up to the largest
    # truncation whose dense generator is still desk-scale.
    def ng_certified(m):
        ng_m, ng_half = cache[m][4], cache[m // 2][4]
        return (
            math.isfinite(ng_m)
            and math.isfinite(ng_half)
            and abs(ng_m - ng_half) < tolerances["truncation"]
        )

    while not ng_certified(M) and 2 * M <= NG_M_LIMIT:
        evaluate(2 * M)
        M *= 2
    rho_ss, ratio_pop, coh, qmi, ng = cache[M]
    ng_converged = ng_certified(M)
    if not ng_converged:
        warnings.warn(
            f"non-Gaussianity not certified by truncation M={M}; reporting NaN",
            stacklevel=2,
        )
        ng = math.nan

    h0 = rcme.build_h0(mapped, params, M)
    rho_th = measures.thermal_state(h0, params.beta)
    ratio_th, coh_th = measures.eigenbasis_observables(ptrace_matrix(rho_th, "TLS"), params)

    row = {
        "ln_ratio_rcme": math.log(ratio_pop),
        "coherence_rcme": abs(coh),
        "ln_ratio_thermal_h0": math.log(ratio_th),
        "coherence_thermal_h0": abs(coh_th),
        "ln_ratio_gibbs_hs": params.beta * params.eta,
        "qmi_ss": qmi,
        "nongauss_ss": ng,
    }
    meta = {"M": M, "truncation_record": record, "nongauss_converged": ng_converged}

    if include_heom:
        hgrid = TimeGrid.linspace(HEOM_STEADY_T, 301)
        hp = heom.HEOMParams.from_spin_boson(params)
        traj, report = heom.heom_propagate(
            np.diag([1.0, 0.0]).astype(complex), hgrid, hp,
            tol=tolerances["heom"], solver_tol=tolerances["solver"],
        )
        ratio_h, coh_h = measures.eigenbasis_observables(traj[-1], params)
        row["ln_ratio_heom"] = math.log(ratio_h)
        row["coherence_heom"] = abs(coh_h)
        meta["heom"] = {"Nc": report["Nc"], "K": report["K"]}
    return row, meta


def _sweep_point(config: ScenarioConfig, value: float) -> tuple[dict, dict]:
    p = config.params
    if config.sweep.axis == "beta":
        params = dataclasses.replace(p, beta=value)
    else:
        params = dataclasses.replace(p, alpha=value)
    include_heom = "heom" in config.solvers
    return steady_observables(params, config.ratio, config.tolerances, include_heom)


def run_sweep(config: ScenarioConfig, out_dir, threads: int = 1) -> dict:
    columns = ("value",) + SWEEP_COLUMNS
    if "heom" in config.solvers:
        columns = columns + SWEEP_HEOM_COLUMNS
    columns = columns + ("error",)

    def worker(value):
        try:
            row, meta = _sweep_point(config, value)
            row = {"value": value, **row, "error": ""}
            return row, meta
        except RcsimError as exc:
            row = {c: math.nan for c in columns}
            row.update({"value": value, "error": type(exc).__name__})
            return row, {"error": str(exc)}

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, config.sweep.values))
    else:
        results = [worker(v) for v in config.sweep.values]

    rows = [r for r, _ in results]
    metas = [m for _, m in results]
    path = os.path.join(out_dir, "sweep.csv")
    write_csv(path, columns, rows)
    return {"outputs": ["sweep.csv"], "points": metas, "rows": rows}


def run_scenario(config: ScenarioConfig, out_dir, threads: int = 1) -> dict:
    """Execute one scenario and write its CSV products plus a run manifest."""
    os.makedirs(out_dir, exist_ok=True)
    if config.sweep is not None:
        report = run_sweep(config, out_dir, threads=threads)
    else:
        report = _run_single(config, out_dir)

    manifest = {
        "version": __version__,
        "config": config.to_dict(),
        "resolved": {k: v for k, v in report.items() if k != "rows"},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=repr)
        fh.write("\n")
    return report


def _run_single(config: ScenarioConfig, out_dir) -> dict:
    grid = TimeGrid.linspace(config.t_max, config.samples)
    report = {"outputs": []}
    ts = grid.as_array()

    traj_rcme = None
    if "rcme" in config.solvers:
        M, record, traj_rcme = converged_rcme_trajectory(config, grid)
        report["M"] = M
        report["truncation_record"] = record

    want_population = "population" in config.measures
    if want_population:
        columns = ["t"]
        series = {}
        if "rcme" in config.solvers:
            columns.append("rho11_rcme")
            series["rho11_rcme"] = [rcme.population_site1(r) for r in traj_rcme]
        if "weak" in config.solvers:
            columns.append("rho11_weak")
            L = weak.build_weak_generator(config.params)
            rho0 = np.diag([1.0, 0.0]).astype(complex)
            traj_w = weak.weak_propagate(L, rho0, grid, tol=config.tolerances["solver"])
            series["rho11_weak"] = [r[0, 0].real for r in traj_w]
        if "heom" in config.solvers:
            columns.append("rho11_heom")
            hp = heom.HEOMParams.from_spin_boson(config.params)
            traj_h, hreport = heom.heom_propagate(
                np.diag([1.0, 0.0]).astype(complex), grid, hp,
                tol=config.tolerances["heom"], solver_tol=config.tolerances["solver"],
            )
            report["heom"] = {"Nc": hreport["Nc"], "K": hreport["K"]}
            series["rho11_heom"] = [r[0, 0].real for r in traj_h]
        rows = [
            {"t": float(t), **{c: series[c][i] for c in columns[1:]}}
            for i, t in enumerate(ts)
        ]
        write_csv(os.path.join(out_dir, "dynamics.csv"), columns, rows)
        report["outputs"].append("dynamics.csv")

    if ("qmi" in config.measures or "nongauss" in config.measures) and traj_rcme is not None:
        columns = ["t"]
        if "nongauss" in config.measures:
            columns.append("nongauss_rcme")
        if "qmi" in config.measures:
            columns.append("qmi_rcme")
        rows = []
        for t, rho in zip(ts, traj_rcme):
            row = {"t": float(t)}
            if "nongauss" in config.measures:
                row["nongauss_rcme"] = measures.non_gaussianity(ptrace_matrix(rho, "RC"))
            if "qmi" in config.measures:
                row["qmi_rcme"] = measures.mutual_information(rho)
            rows.append(row)
        write_csv(os.path.join(out_dir, "measures.csv"), columns, rows)
        report["outputs"].append("measures.csv")

    if "steady" in config.measures or "eigenbasis" in config.measures:
        include_heom = "heom" in config.solvers
        row, meta = steady_observables(
            config.params, config.ratio, config.tolerances, include_heom
        )
        columns = list(SWEEP_COLUMNS)
        if include_heom:
            columns += list(SWEEP_HEOM_COLUMNS)
        write_csv(os.path.join(out_dir, "steady.csv"), columns, [row])
        report["outputs"].append("steady.csv")
        report["steady"] = meta

    return report
