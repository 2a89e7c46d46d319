"""The three experiment families plus the statistics bundle over their logs.

Every number these functions print or write is recomputable from the JSONL
run logs alone. Seeds fan out over worker processes when configured;
results merge deterministically in (rule, seed) order.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import analysis, metrics
from ..engine import new_episode
from ..learner import a2c
from ..rules import parse_trial_list, resolve_rule
from .config import ExperimentConfig
from .runlog import RunLog

# Color rule vs the shape rule that differs only by feature kind.
COLOR_SHAPE_PAIRS = (
    ("cm_RBKY", "sm_csqt"),
    ("allOfColOrd_BRKY", "allOfShaOrd_qcts"),
    ("col1Ord_BRKY", "sha1Ord_qcts"),
    ("colOrdL1_BRKY", "shaOrdL1_qcts"),
    ("col1OrdBuck_BRKY0213", "sha1OrdBuck_qcts0213"),
)


def _train_one(job: dict) -> str:
    cfg = ExperimentConfig.from_dict(job["config"])
    log_path = Path(job["log_path"])
    log_path.parent.mkdir(parents=True, exist_ok=True)
    a2c.train_run(
        job["phases"],
        cfg.representation,
        cfg.hyperparams,
        seed=job["seed"],
        metric_params=cfg.metric_params,
        encoder_cfg=cfg.encoder,
        net_cfg=cfg.net,
        position_mode=job.get("position_mode", "all"),
        collect_verdicts=cfg.collect_verdicts,
        log_path=log_path,
    )
    return str(log_path)


def _fan_out(jobs: list[dict], workers: int) -> list[str]:
    if workers <= 1:
        return [_train_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_train_one, jobs))


def _metrics_from_log(path, params: metrics.MetricParams, phase: int | None = None) -> metrics.RunMetrics:
    log = RunLog.read(path)
    return metrics.run_metrics(log.error_series(phase), log.code_series(phase), params)


def run_independent(cfg: ExperimentConfig) -> dict:
    """One training run per rule x seed; medians over seeds; difficulty table."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        {
            "config": cfg.to_dict(),
            "phases": [rule],
            "seed": seed,
            "log_path": str(out / rule / f"seed{seed}.jsonl"),
        }
        for rule in cfg.rules
        for seed in cfg.seeds
    ]
    _fan_out(jobs, cfg.workers)

    table = {}
    for rule in cfg.rules:
        runs = [
            _metrics_from_log(out / rule / f"seed{seed}.jsonl", cfg.metric_params)
            for seed in cfg.seeds
        ]
        agg = metrics.aggregate(runs)
        table[rule] = agg
        with open(out / rule / "metrics.json", "w") as fh:
            json.dump(
                {"rule": rule, "runs": [r.to_dict() for r in runs], "aggregate": agg.to_dict()},
                fh, indent=2, sort_keys=True,
            )

    rows = sorted(
        table.items(), key=lambda kv: (kv[1].m_star is None, kv[1].m_star or 0)
    )
    with open(out / "difficulty.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rule", "M_star", "E_star_mean", "E_star_max", "n_runs"])
        for rule, agg in rows:
            w.writerow([rule, agg.m_star, agg.e_star_mean, agg.e_star_max, agg.n_runs])
    _write_config(cfg, out)
    return {rule: agg for rule, agg in rows}


def run_transfer(cfg: ExperimentConfig) -> dict:
    """Each trial list trains one continuing model through its phases."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lists = [parse_trial_list(text) for text in cfg.trial_lists]
    jobs = []
    for li, trial in enumerate(lists, start=1):
        for seed in cfg.seeds:
            jobs.append(
                {
                    "config": cfg.to_dict(),
                    "phases": list(trial.active_rules),
                    "seed": seed,
                    "log_path": str(out / f"list{li}" / f"seed{seed}.jsonl"),
                }
            )
    _fan_out(jobs, cfg.workers)

    report = {}
    for li, trial in enumerate(lists, start=1):
        per_phase = []
        for phase in range(1, len(trial.phases) + 1):
            runs = [
                _metrics_from_log(out / f"list{li}" / f"seed{seed}.jsonl", cfg.metric_params, phase)
                for seed in cfg.seeds
            ]
            per_phase.append(
                {
                    "phase": phase,
                    "rule": trial.active_rules[phase - 1],
                    "aggregate": metrics.aggregate(runs).to_dict(),
                    "runs": [r.to_dict() for r in runs],
                }
            )
        report[f"list{li}"] = per_phase
        with open(out / f"list{li}" / "metrics.json", "w") as fh:
            json.dump(per_phase, fh, indent=2, sort_keys=True)
    _write_config(cfg, out)
    return report


def run_generalization(cfg: ExperimentConfig) -> dict:
    """Train on checkerboard-white boards, then alternate train/test evaluation."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {}
    for rule in cfg.rules:
        ratios = []
        for seed in cfg.seeds:
            log_path = out / rule / f"seed{seed}.jsonl"
            log_path.parent.mkdir(parents=True, exist_ok=True)
            result = a2c.train_run(
                [rule], cfg.representation, cfg.hyperparams, seed=seed,
                metric_params=cfg.metric_params, encoder_cfg=cfg.encoder,
                net_cfg=cfg.net, position_mode="train",
                collect_verdicts=cfg.collect_verdicts, log_path=log_path,
            )
            records = _evaluate_frozen(result, rule, cfg, seed)
            ratio = analysis.test_error_ratio(records)
            ratios.append(ratio)
            with open(out / rule / f"eval_seed{seed}.jsonl", "w") as fh:
                for rec in records:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
        present = [r for r in ratios if r is not None]
        report[rule] = {
            "ratios": ratios,
            "median": metrics.lower_median(present) if present else None,
        }
    with open(out / "generalization.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    _write_config(cfg, out)
    return report


def _evaluate_frozen(result: a2c.TrainResult, rule: str, cfg: ExperimentConfig, seed: int) -> list[dict]:
    """Alternate train-mode and test-mode episodes 1:1 under the frozen policy."""
    spec = resolve_rule(rule)
    rng = np.random.default_rng([seed, 99])
    records = []
    for i in range(cfg.eval_episodes):
        mode = "train" if i % 2 == 0 else "test"
        episode = new_episode(
            spec, n=cfg.hyperparams.n_pieces, seed=seed * 100_000 + i,
            position_set=mode, move_cap=cfg.hyperparams.move_cap,
        )
        rec = a2c.play_episode(
            result.policy, episode, cfg.representation, cfg.hyperparams.n_pieces,
            cfg.encoder, rng,
        )
        rec["episode"] = i + 1
        records.append(rec)
    return records


def _write_config(cfg: ExperimentConfig, out: Path):
    with open(out / "config.json", "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Statistics bundle over a directory of run logs


def _collect_runs(log_dir) -> dict:
    """Group per-run metric values by (rule, representation, n_hist).

    Only single-phase (independent) logs enter the difficulty statistics.
    """
    groups: dict[tuple, list] = {}
    for path in sorted(Path(log_dir).rglob("seed*.jsonl*")):
        log = RunLog.read(path)
        phases = log.config.get("phases", [])
        if len(phases) != 1:
            continue
        params = metrics.MetricParams(**log.config["metric_params"])
        run = metrics.run_metrics(log.error_series(), log.code_series(), params)
        key = (phases[0], log.config.get("representation", "FC"), log.config.get("n_hist", 6))
        caps = {
            "e_star_mean": len(log.episodes) + 1,
            "e_star_max": len(log.episodes) + 1,
            "m_star": len(log.moves) + 1,
        }
        groups.setdefault(key, []).append((run, caps))
    return groups


def _metric_values(runs, metric: str) -> list[float]:
    """Per-run metric values; absent runs count as one past their cap (worst rank)."""
    out = []
    for run, caps in runs:
        value = getattr(run, metric)
        out.append(float(value) if value is not None else float(caps[metric]))
    return out


def analyze(log_dir, out_dir, metric: str = "m_star", set_size: int = 5) -> dict:
    """Statistics bundle: within-rule KW, color/shape KW, MW p-matrix, D, MDS, Spearman."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups = _collect_runs(log_dir)
    bundle: dict = {"metric": metric, "absent_policy": "cap+1"}

    by_repr: dict[tuple, dict] = {}
    for (rule, repr_, hist), runs in groups.items():
        by_repr.setdefault((repr_, hist), {})[rule] = runs

    for (repr_, hist), rules in sorted(by_repr.items()):
        tag = f"{repr_}_h{hist}"
        # Within-rule agreement: seed-sets of `set_size` runs compared by KW.
        within = {}
        for rule, runs in sorted(rules.items()):
            values = _metric_values(runs, metric)
            sets = [values[i : i + set_size] for i in range(0, len(values), set_size)]
            sets = [s for s in sets if len(s) == set_size]
            if len(sets) >= 2:
                h, p = analysis.kruskal_wallis(sets)
                within[rule] = {"H": h, "p": p, "n_sets": len(sets)}
        bundle[f"within_rule_kw_{tag}"] = within

        # Color-vs-shape twins.
        pairs = {}
        for color_rule, shape_rule in COLOR_SHAPE_PAIRS:
            if color_rule in rules and shape_rule in rules:
                per_metric = {}
                for m in ("e_star_mean", "e_star_max", "m_star"):
                    h, p = analysis.kruskal_wallis(
                        [_metric_values(rules[color_rule], m), _metric_values(rules[shape_rule], m)]
                    )
                    per_metric[m] = {"H": h, "p": p}
                pairs[f"{color_rule}|{shape_rule}"] = per_metric
        bundle[f"color_shape_kw_{tag}"] = pairs

        # Pairwise exact MW p-matrix -> dissimilarity -> 3-D embedding.
        samples = {rule: _metric_values(runs, metric) for rule, runs in sorted(rules.items())}
        samples = {k: v for k, v in samples.items() if len(v) >= 2}
        if len(samples) >= 2:
            labels, pmat = analysis.pvalue_matrix(samples)
            dmat = analysis.dissimilarity(pmat)
            coords, evals = analysis.classical_mds(dmat, 3)
            _write_matrix_csv(out / f"pvalues_{tag}.csv", labels, pmat)
            _write_matrix_csv(out / f"dissimilarity_{tag}.csv", labels, dmat)
            with open(out / f"mds_{tag}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["rule", "x", "y", "z"])
                for label, row in zip(labels, coords):
                    w.writerow([label, *[f"{v:.10g}" for v in row]])
            bundle[f"mds_{tag}"] = {
                "labels": labels,
                "negative_eigenvalues": [float(e) for e in evals if e < -1e-9],
            }

    # Spearman across metric variants (three metrics x available history lengths).
    variants = {}
    for (repr_, hist), rules in sorted(by_repr.items()):
        for m in ("e_star_mean", "e_star_max", "m_star"):
            variants[f"{m}_{repr_}_h{hist}"] = {
                rule: metrics.lower_median(_metric_values(runs, m)) for rule, runs in rules.items()
            }
    names = sorted(variants)
    common = sorted(set.intersection(*[set(v) for v in variants.values()])) if variants else []
    if len(common) >= 2 and len(names) >= 2:
        mat = np.ones((len(names), len(names)))
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                try:
                    rho = analysis.spearman(
                        [variants[names[i]][r] for r in common],
                        [variants[names[j]][r] for r in common],
                    )
                except ValueError:  # constant column (tiny desk-scale batches)
                    rho = float("nan")
                mat[i, j] = mat[j, i] = rho
        _write_matrix_csv(out / "spearman_variants.csv", names, mat)
        bundle["spearman_variants"] = {"labels": names, "n_rules": len(common)}

    with open(out / "analysis.json", "w") as fh:
        json.dump(bundle, fh, indent=2, sort_keys=True, default=float)
    return bundle


def _write_matrix_csv(path, labels, matrix):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["", *labels])
        for label, row in zip(labels, np.asarray(matrix)):
            w.writerow([label, *[f"{v:.10g}" for v in row]])
