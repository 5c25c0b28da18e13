"""Analysis config, the end-to-end report run and the Monte Carlo cross-check."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvariantViolation
from .inference import (
    JointDistribution,
    align,
    crosscheck_scores,
    exact_joint,
    format_output,
    monte_carlo_joint,
)
from .metrics import conditional_table, risk_report
from .population import ETHNICITIES, GENES, load_population_table, prior_joint_heatmap
from .programs import (
    DETERMINISTIC_PROGRAMS,
    LINEAR_SCORE,
    NOISY_SCORE,
    PROGRAMS,
    NoiseSpec,
    format_centi,
    load_weight_config,
)
from .utility import tradeoff_frontier, utility_report

log = logging.getLogger(__name__)

CROSSCHECK_SE_LIMIT = 4.0


@dataclass(frozen=True)
class AnalysisConfig:
    population: str = "builtin"
    weights: str = "builtin"
    sigmas: tuple = (0.1, 0.5, 1.0, 2.0, 5.0)
    utility_sigmas: tuple = (10.0,)
    deltas: tuple = (0.1, 0.5, 1.0)
    vulnerability_threshold: float = 0.35
    utility_threshold: float = 0.9
    enforce_privacy_threshold: bool = False
    samples: int = 100_000
    seed: int = 0
    programs: tuple = PROGRAMS
    output_dir: str = "results"

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "AnalysisConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        kw = dict(doc)
        for key in ("sigmas", "utility_sigmas", "deltas", "programs"):
            if key in kw:
                if not isinstance(kw[key], (list, tuple)):
                    raise ConfigError(f"{key}: expected a list")
                kw[key] = tuple(kw[key])
        if base_dir is not None:
            for key in ("population", "weights", "output_dir"):
                v = kw.get(key)
                if isinstance(v, str) and v != "builtin" and not Path(v).is_absolute():
                    kw[key] = str(base_dir / v)
        return cls(**kw)

    @classmethod
    def from_file(cls, path: str | Path) -> "AnalysisConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        return cls.from_dict(doc, path.parent)

    def digest(self) -> str:
        payload = json.dumps({k: v for k, v in asdict(self).items() if k != "output_dir"}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _is_number(x) -> bool:
    return not isinstance(x, bool) and isinstance(x, (int, float)) and not math.isnan(x)


def validate_config(cfg: AnalysisConfig) -> list[str]:
    """Every violated constraint, one message per problem; empty when valid."""
    errors = []
    for key in ("sigmas", "utility_sigmas"):
        for i, s in enumerate(getattr(cfg, key)):
            if not _is_number(s) or not math.isfinite(s) or s <= 0:
                errors.append(f"{key}[{i}]: sigma must be positive (got {s!r})")
    for i, d in enumerate(cfg.deltas):
        if not _is_number(d) or d <= 0:
            errors.append(f"deltas[{i}]: delta must be positive (got {d!r})")
    for key in ("vulnerability_threshold", "utility_threshold"):
        v = getattr(cfg, key)
        if not _is_number(v) or not 0 < v <= 1:
            errors.append(f"{key}: threshold must lie in (0, 1] (got {v!r})")
    if isinstance(cfg.samples, bool) or not isinstance(cfg.samples, int) or cfg.samples < 1:
        errors.append(f"samples: sample count must be a positive integer (got {cfg.samples!r})")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or cfg.seed < 0:
        errors.append(f"seed: must be a non-negative integer (got {cfg.seed!r})")
    bad = [p for p in cfg.programs if p not in PROGRAMS]
    if bad:
        errors.append(f"programs: unknown program ids {bad}, expected a subset of {list(PROGRAMS)}")
    for key, loader in (("population", load_population_table), ("weights", load_weight_config)):
        try:
            loader(getattr(cfg, key))
        except ConfigError as exc:
            errors.extend(f"{key}: {e}" for e in exc.errors)
    return errors


def validated(cfg: AnalysisConfig) -> AnalysisConfig:
    errors = validate_config(cfg)
    if errors:
        raise ConfigError(f"{len(errors)} config error(s): " + "; ".join(errors), errors)
    return cfg


def _sigma_tag(sigma: float) -> str:
    return f"sigma{sigma:g}"


def _variant_name(program: str, sigma: float | None) -> str:
    return program if sigma is None else f"{program}_{_sigma_tag(sigma)}"


def _variants(cfg: AnalysisConfig) -> list[tuple[str, float | None]]:
    out = [(p, None) for p in DETERMINISTIC_PROGRAMS if p in cfg.programs]
    if NOISY_SCORE in cfg.programs:
        out += [(NOISY_SCORE, float(s)) for s in cfg.sigmas]
    return out


class ReportWriter:
    """Serialises all file output and records a manifest entry per artifact."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.entries: list[dict] = []

    def write(self, name: str, text: str, provenance: dict | None = None) -> Path:
        path = self.out_dir / name
        data = text.encode("utf-8")
        path.write_bytes(data)
        self.entries.append({
            "file": name,
            "sha256": hashlib.sha256(data).hexdigest(),
            "provenance": provenance or {},
        })
        return path

    def write_json(self, name: str, doc, provenance: dict | None = None) -> Path:
        return self.write(name, json.dumps(doc, indent=2, sort_keys=True) + "\n", provenance)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def conditional_csv(j: JointDistribution) -> str:
    outputs, cond = conditional_table(j)
    rows = [["ethnicity"] + [format_output(v) for v in outputs]]
    rows += [[name] + [f"{x:.6f}" for x in cond[e]] for e, name in enumerate(ETHNICITIES)]
    return _csv(rows)


def _check_scores(name: str, v: float, mop: float) -> None:
    if not (0.25 - 1e-9 <= v <= mop + 1e-9 and mop <= 1 + 1e-9):
        raise InvariantViolation(f"{name}: expected 0.25 <= V={v} <= max output privacy={mop} <= 1")


def run_full_analysis(cfg: AnalysisConfig, with_crosscheck: bool = False) -> dict:
    """Compute every configured program variant and write the report files.

    Output goes to one flat directory closed by ``manifest.json``. Returns the
    in-memory bundle: scores, risk reports, utility reports, the trade-off
    frontier and, if requested, the Monte Carlo cross-check.
    """
    validated(cfg)
    table = load_population_table(cfg.population)
    weights = load_weight_config(cfg.weights)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = ReportWriter(out_dir)
    base_prov = {"config": cfg.digest(), "weights": weights.digest()}

    for gene in GENES:
        pairs, mat = prior_joint_heatmap(table, gene)
        rows = [["ethnicity"] + [str(p) for p in pairs]]
        rows += [[name] + [f"{x:.6f}" for x in mat[e]] for e, name in enumerate(ETHNICITIES)]
        writer.write(f"prior_{gene}.csv", _csv(rows), {**base_prov, "gene": gene})

    scores: dict = {}
    reports = {}
    for program, sigma in _variants(cfg):
        noise = NoiseSpec(sigma) if sigma is not None else None
        w = weights if program in (LINEAR_SCORE, NOISY_SCORE) else None
        j = exact_joint(table, program, w, noise)
        j.check_invariants()
        rep = risk_report(j, cfg.vulnerability_threshold)
        name = _variant_name(program, sigma)
        _check_scores(name, rep.bayes_vulnerability, rep.max_output_privacy.score)
        reports[(program, sigma)] = rep
        prov = {**base_prov, **j.provenance}
        writer.write(f"joint_{name}.csv", j.to_csv(), prov)
        writer.write_json(f"joint_{name}.json", j.to_json(), prov)
        writer.write(f"output_privacy_{name}.csv", conditional_csv(j), prov)
        entry = rep.summary()
        if sigma is None:
            scores[program] = entry
        else:
            scores.setdefault(program, {})[f"{sigma:g}"] = entry
        log.info("%s: V=%.4f max output privacy=%.4f", name, rep.bayes_vulnerability,
                 rep.max_output_privacy.score)
    writer.write_json("scores.json", {"programs": scores, "config": base_prov}, base_prov)

    bundle = {"scores": scores, "reports": reports, "utility": {}, "frontier": []}
    utility_sigmas = sorted(set(map(float, cfg.sigmas)) | set(map(float, cfg.utility_sigmas)))
    if cfg.sigmas and cfg.deltas and NOISY_SCORE in cfg.programs:
        diff_rows = [["sigma", "abs_difference", "probability"]]
        bound_rows = [["sigma", "delta", "error_bound_probability", "utility_ok"]]
        summary = {}
        for sigma in utility_sigmas:
            rep = reports.get((NOISY_SCORE, sigma))
            ur = utility_report(weights, table, NoiseSpec(sigma), cfg.deltas,
                                rep.bayes_vulnerability if rep else None)
            bundle["utility"][sigma] = ur
            diff_rows += [[f"{sigma:g}", format_centi(int(d)), f"{p:.6f}"]
                          for d, p in zip(ur.differences, ur.probabilities)]
            bound_rows += [[f"{sigma:g}", f"{d:g}", f"{p:.6f}", p >= cfg.utility_threshold]
                           for d, p in ur.error_bounds.items()]
            summary[f"{sigma:g}"] = {
                "mode": format_centi(ur.mode),
                "hdi_94": [format_centi(ur.hdi[0]), format_centi(ur.hdi[1])],
                "error_bounds": {f"{d:g}": round(p, 12) for d, p in ur.error_bounds.items()},
                "bayes_vulnerability": ur.bayes_vulnerability,
            }
        writer.write("utility_differences.csv", _csv(diff_rows), base_prov)
        writer.write("utility_error_bounds.csv", _csv(bound_rows), base_prov)
        writer.write_json("utility_summary.json", summary, base_prov)

    if LINEAR_SCORE in cfg.programs and cfg.deltas:
        noisy_v = {s: r.bayes_vulnerability for (p, s), r in reports.items() if p == NOISY_SCORE}
        frontier = tradeoff_frontier(
            reports[(LINEAR_SCORE, None)].bayes_vulnerability,
            noisy_v,
            cfg.deltas,
            cfg.utility_threshold,
            cfg.vulnerability_threshold,
            cfg.enforce_privacy_threshold,
        )
        bundle["frontier"] = frontier
        rows = [["program", "sigma", "delta", "bayes_vulnerability", "error_bound_probability",
                 "utility_ok", "privacy_ok", "recommended"]]
        rows += [[r.program, "" if r.sigma is None else f"{r.sigma:g}", f"{r.delta:g}",
                  f"{r.bayes_vulnerability:.6f}", f"{r.error_bound:.6f}",
                  r.utility_ok, r.privacy_ok, r.recommended] for r in frontier]
        writer.write("tradeoff.csv", _csv(rows), base_prov)
        writer.write_json("tradeoff.json", [r.as_dict() for r in frontier], base_prov)

    if with_crosscheck:
        bundle["crosscheck"] = crosscheck(cfg)
        writer.write_json("crosscheck.json", bundle["crosscheck"], base_prov)

    settings = {k: v for k, v in asdict(cfg).items() if k != "output_dir"}
    manifest = {"config": settings, "config_digest": cfg.digest(), "artifacts": writer.entries}
    writer.write_json("manifest.json", manifest)
    bundle["manifest"] = manifest
    return bundle


def crosscheck(cfg: AnalysisConfig, programs=None) -> dict:
    """Monte Carlo vs exact joint for every configured variant.

    Reports, per variant, the largest per-cell deviation in standard-error
    units; a variant fails above ``CROSSCHECK_SE_LIMIT``.
    """
    validated(cfg)
    table = load_population_table(cfg.population)
    weights = load_weight_config(cfg.weights)
    results = {}
    for program, sigma in programs if programs is not None else _variants(cfg):
        name = _variant_name(program, sigma)
        noise = NoiseSpec(sigma) if sigma is not None else None
        w = weights if program in (LINEAR_SCORE, NOISY_SCORE) else None
        exact = exact_joint(table, program, w, noise)
        empirical = monte_carlo_joint(table, program, w, noise, cfg.samples, cfg.seed)
        z = crosscheck_scores(exact, empirical)
        worst = float(z.max())
        results[name] = {
            "max_se_units": round(worst, 6),
            "max_abs_difference": round(float(np.abs(_aligned_diff(exact, empirical)).max()), 9),
            "cells": int(z.size),
            "passed": worst <= CROSSCHECK_SE_LIMIT,
        }
    return {
        "samples": cfg.samples,
        "seed": cfg.seed,
        "se_limit": CROSSCHECK_SE_LIMIT,
        "variants": results,
        "passed": all(r["passed"] for r in results.values()),
    }


def _aligned_diff(a: JointDistribution, b: JointDistribution) -> np.ndarray:
    _, ta, tb = align(a, b)
    return ta - tb


def with_overrides(cfg: AnalysisConfig, **kw) -> AnalysisConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})

