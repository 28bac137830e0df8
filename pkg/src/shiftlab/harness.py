"""Experiment dispatch: turn parsed configs into report rows.

Exit-code conventions for the CLI: 0 success, 1 config error, 2 infeasible
or degenerate experiment (zero-measure cell, empty cylinder), 3 caps or
horizons exhausted with inconclusive verdicts present.
"""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from .config import Experiment, RunConfig, parse_point, parse_rational, parse_set
from .entropy import Partition, generator_partition, sequence_entropy_profile
from .errors import ConfigError, EntryTimeNotFoundError
from .folner import FolnerWindows, birkhoff_average, density, membership_predicate
from .independence import full_e, independence_density_profile, random_table_e
from .measures import measure_of, sample_point
from .panel import panel_pairs, panel_systems
from .reports import ReportRow
from .sensitivity import (
    EquivalenceParams,
    equivalence_crosscheck,
    find_sensitivity_witnesses,
)
from .verdicts import INCONCLUSIVE, WitnessParams


class InfeasibleExperiment(Exception):
    """Raised when an experiment is degenerate (exit code 2)."""


def _run_entropy(exp: Experiment, seed_override: Optional[int]) -> list[ReportRow]:
    sysb = exp.system
    partition_spec = exp.params.get("partition", "generators")
    path = f"{exp.experiment_id}.params.partition"
    if partition_spec == "generators":
        partition = generator_partition(sysb.sft)
    elif isinstance(partition_spec, list):
        atoms = [
            parse_set(atom, sysb.sft, f"{path}[{i}]")
            for i, atom in enumerate(partition_spec)
        ]
        partition = Partition(atoms)
        try:
            partition.validate_under(sysb.measure)
        except ValueError as err:
            raise ConfigError(path, str(err))
    else:
        raise ConfigError(path, "expected 'generators' or a list of atom sets")
    sequences = exp.params.get("sequences")
    if not isinstance(sequences, list) or not sequences:
        raise ConfigError(f"{exp.experiment_id}.params.sequences", "expected a nonempty list")
    rows = []
    for si, seq in enumerate(sequences):
        t0 = time.perf_counter()
        profile = sequence_entropy_profile(sysb.measure, partition, seq)
        dt = (time.perf_counter() - t0) * 1000
        for n, h, rate in profile.rows:
            rows.append(
                ReportRow(
                    experiment_id=exp.experiment_id,
                    system_id=sysb.id,
                    operation=f"sequence_entropy_profile[s{si}][n{n:02d}]",
                    inputs={"sequence": list(seq), "n": n, "partition": "generators"},
                    outputs={"H_n": h, "H_n_over_n": rate},
                    runtime_ms=dt,
                )
            )
    return rows


def _run_independence(exp: Experiment, seed_override: Optional[int]) -> list[ReportRow]:
    sysb = exp.system
    a1 = parse_set(exp.params.get("a1", "full"), sysb.sft, f"{exp.experiment_id}.params.a1")
    a2 = parse_set(exp.params.get("a2", "full"), sysb.sft, f"{exp.experiment_id}.params.a2")
    n_list = exp.params.get("n_list")
    if not isinstance(n_list, list) or not n_list:
        raise ConfigError(f"{exp.experiment_id}.params.n_list", "expected a nonempty list")
    if a1.is_empty or a2.is_empty:
        raise InfeasibleExperiment(f"{exp.experiment_id}: empty target cylinder")
    reports = independence_density_profile(
        sysb.sft, sysb.measure, a1, a2, n_list, [full_e(sysb.sft)]
    )
    rows = []
    for rep in reports:
        rows.append(
            ReportRow(
                experiment_id=exp.experiment_id,
                system_id=sysb.id,
                operation=f"max_independence_subset[N{len(rep.window):02d}]",
                inputs={"N": len(rep.window), "a1": repr(a1), "a2": repr(a2)},
                outputs={
                    "ratio": rep.ratio,
                    "best_size": len(rep.best),
                    "exhaustive": rep.exhaustive,
                },
                witness_summary="I=" + ",".join(map(str, rep.best)),
            )
        )
    return rows


def _run_sensitivity(exp: Experiment, seed_override: Optional[int]) -> tuple[list[ReportRow], bool]:
    sysb = exp.system
    path = f"{exp.experiment_id}.params"
    a = parse_set(exp.params.get("a", "full"), sysb.sft, f"{path}.a")
    ux = parse_set(exp.params.get("ux"), sysb.sft, f"{path}.ux")
    uy = parse_set(exp.params.get("uy"), sysb.sft, f"{path}.uy")
    eps = parse_rational(exp.params.get("eps", "1/5"), f"{path}.eps")
    seeds = exp.params.get("seeds")
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError(f"{path}.seeds", "expected a nonempty list of integers")
    if seed_override is not None:
        seeds = [seed_override + i for i in range(len(seeds))]
    horizon = int(exp.params.get("horizon", 100_000))
    if measure_of(sysb.measure, a) == 0:
        raise InfeasibleExperiment(f"{exp.experiment_id}: zero-measure cell A")
    if ux.is_empty or uy.is_empty:
        raise InfeasibleExperiment(f"{exp.experiment_id}: empty neighbourhood")
    params = WitnessParams(density_horizon=horizon)
    rows = []
    inconclusive = False
    for seed in seeds:
        try:
            verdict = find_sensitivity_witnesses(
                sysb.sft, sysb.measure, a, ux, uy, eps, int(seed), params
            )
        except EntryTimeNotFoundError as err:
            inconclusive = True
            rows.append(
                ReportRow(
                    experiment_id=exp.experiment_id,
                    system_id=sysb.id,
                    operation=f"find_sensitivity_witnesses[seed{seed}]",
                    inputs={"seed": int(seed), "eps": eps, "horizon": horizon},
                    outputs={},
                    verdict=INCONCLUSIVE,
                    witness_summary=str(err),
                )
            )
            continue
        outputs = {}
        summary = verdict.note
        if verdict.witnesses:
            w = verdict.witnesses[0]
            outputs = {
                "s": w.s,
                "t": w.t,
                "entry_time": w.entry_time,
                "target": w.target,
                "density_upper": w.empirical_upper,
            }
            summary = f"(s,t)=({w.s},{w.t}) e={w.entry_time}"
        inconclusive = inconclusive or verdict.classification == INCONCLUSIVE
        rows.append(
            ReportRow(
                experiment_id=exp.experiment_id,
                system_id=sysb.id,
                operation=f"find_sensitivity_witnesses[seed{seed}]",
                inputs={"seed": int(seed), "eps": eps, "horizon": horizon},
                outputs=outputs,
                verdict=verdict.classification,
                witness_summary=summary,
            )
        )
    return rows, inconclusive


def _run_density(exp: Experiment, seed_override: Optional[int]) -> list[ReportRow]:
    sysb = exp.system
    path = f"{exp.experiment_id}.params"
    target = parse_set(exp.params.get("set"), sysb.sft, f"{path}.set")
    point_spec = parse_point(exp.params.get("point"), sysb.sft, f"{path}.point")
    n_max = int(exp.params.get("n_max", 10_000))
    windows = FolnerWindows.canonical_windows()
    if isinstance(point_spec, dict):
        seed = point_spec["seed"] if seed_override is None else seed_override
        lo, hi = point_spec["lo"], point_spec["hi"]
        if not target.is_empty:
            s_lo, s_hi = target.support
            if lo > min(s_lo, 0) or hi < n_max - 1 + max(s_hi, 0):
                raise ConfigError(
                    f"{path}.point",
                    f"window [{lo}, {hi}] cannot cover n_max={n_max} orbit reads",
                )
        point = sample_point(sysb.measure, lo, hi, int(seed))
        point_desc = {"kind": "sampled", "seed": int(seed)}
    else:
        point = point_spec
        point_desc = {"kind": "periodic"}
    avg = birkhoff_average(point, target, windows, n_max)
    est = density(membership_predicate(point, target), windows, n_max=n_max)
    mu = measure_of(sysb.measure, target)
    return [
        ReportRow(
            experiment_id=exp.experiment_id,
            system_id=sysb.id,
            operation="birkhoff_density",
            inputs={"point": point_desc, "set": repr(target), "n_max": n_max},
            outputs={
                "birkhoff_average": avg,
                "density_lower": est.lower,
                "density_upper": est.upper,
                "measure": mu,
            },
        )
    ]


def _run_crosscheck(exp: Experiment, seed_override: Optional[int]) -> list[ReportRow]:
    pair_count = int(exp.params.get("pairs", 10))
    depth = int(exp.params.get("depth", 1))
    extra = int(exp.params.get("extra_table_e", 0))
    include_kush = bool(exp.params.get("include_kush", True))
    eps = parse_rational(exp.params.get("table_e_eps", "1/50"), f"{exp.experiment_id}.params.table_e_eps")
    systems = panel_systems()
    pairs = panel_pairs(pair_count)
    rows = []
    for system in systems:
        params = EquivalenceParams(depth=depth, include_kush=include_kush)
        if extra:
            extras = tuple(
                random_table_e(system.measure, eps, seed=900 + j) for j in range(extra)
            )
            params = dataclasses.replace(
                params, in_params=dataclasses.replace(params.in_params, extra_e_maps=extras)
            )
        report = equivalence_crosscheck([system], {system.id: pairs[system.id]}, params)
        for r in report.rows:
            outputs = {
                "in_positive": r.in_positive,
                "ms_positive": r.ms_positive,
                "diam_positive": bool(r.diam_positive),
                "in_eq_ms": r.in_eq_ms,
                "ms_implies_diam": r.ms_implies_diam,
            }
            if r.kush_positive is not None:
                outputs["kush_positive"] = bool(r.kush_positive)
            rows.append(
                ReportRow(
                    experiment_id=exp.experiment_id,
                    system_id=system.id,
                    operation=f"equivalence_crosscheck[{r.pair_label}]",
                    inputs={"pair": r.pair_label, "depth": depth, "extra_table_e": extra},
                    outputs=outputs,
                    verdict="agree" if r.in_eq_ms else "disagree",
                )
            )
    return rows


def run_experiment(exp: Experiment, seed_override: Optional[int] = None) -> tuple[list[ReportRow], bool]:
    """Rows plus an inconclusive flag for one experiment."""
    t0 = time.perf_counter()
    inconclusive = False
    if exp.kind == "entropy":
        rows = _run_entropy(exp, seed_override)
    elif exp.kind == "independence":
        rows = _run_independence(exp, seed_override)
    elif exp.kind == "sensitivity":
        rows, inconclusive = _run_sensitivity(exp, seed_override)
    elif exp.kind == "density":
        rows = _run_density(exp, seed_override)
    elif exp.kind == "crosscheck":
        rows = _run_crosscheck(exp, seed_override)
    else:
        raise ConfigError("kind", f"unhandled kind {exp.kind!r}")
    elapsed = (time.perf_counter() - t0) * 1000
    for row in rows:
        if not row.runtime_ms:
            row.runtime_ms = elapsed / max(1, len(rows))
    return rows, inconclusive


def run_config(
    config: RunConfig, seed_override: Optional[int] = None, threads: int = 1
) -> tuple[list[ReportRow], int]:
    """All rows for a config plus the process exit code."""
    outcome_rows: list[ReportRow] = []
    inconclusive = False
    if threads > 1 and len(config.experiments) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda e: run_experiment(e, seed_override), config.experiments)
            )
    else:
        results = [run_experiment(e, seed_override) for e in config.experiments]
    for rows, flag in results:
        outcome_rows.extend(rows)
        inconclusive = inconclusive or flag
    return outcome_rows, (3 if inconclusive else 0)
