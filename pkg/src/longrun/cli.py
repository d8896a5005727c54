"""Pipeline orchestration and report emission.

The command line exposes each analysis stage as a subcommand plus a
``pipeline`` command that runs everything in order: ingest the
manifest, extract the inflation trend and its uncertainty, build the
unit-root table, run the single-break cointegration tests for every
index and specification, aggregate decisions, fit the long-run
equations with break dummies (with a joint shift test), estimate the
error-correction models for cointegrated indexes and first-difference
VARs for the rest, and trace the recursive-residual stability paths.

Stages communicate through CSV files in the output directory, so
running them one at a time produces byte-identical artifacts to one
``pipeline`` invocation.  Every artifact starts with the hash of the
effective configuration; a stage refuses inputs written under a
different configuration.  Indexes are processed independently (the
loop could fan out to a worker pool) and assembled in manifest order,
so all outputs are deterministic for a fixed config and seed.

Exit codes: 0 on success, 1 when a stage fails (the failing stage and
cause go to stderr and that invocation's partial outputs are removed),
2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

try:
    import tomllib  # type: ignore[import-not-found]
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib  # type: ignore[no-redef]

import longrun
from longrun.cointegration import (
    GH_MODELS,
    GhCriticalValues,
    decide,
    fit_break_regression,
    gh_critical_values,
    gh_test,
    wald_test,
)
from longrun.dynamics import EcmFit, fit_ecm, fit_var_diff
from longrun.ingest import IngestError, load_csv, materialize, read_manifest
from longrun.montecarlo import simulate_critical_values
from longrun.series import (
    AlignmentError,
    MonthIndex,
    TimeSeries,
    align,
    diff,
    log_level,
    yoy_growth,
)
from longrun.stability import cusum, cusum_sq, recursive_residuals
from longrun.ucsv import UcsvConfig, estimate_ucsv, uncertainty_series
from longrun.unitroot import adf_test, pp_test

DEFAULT_TRIM = (0.15, 0.85)


class ConfigError(ValueError):
    """The pipeline configuration is missing, invalid, or inconsistent."""


class StageError(RuntimeError):
    """A pipeline stage aborted; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved settings for one run, hashed into every artifact.

    ``digest`` identifies the effective configuration (all analysis
    settings plus the manifest bytes, but not the output directory);
    artifacts carry it so stages can refuse mixed inputs.
    """

    seed: int
    manifest_path: Path
    out: Path
    inflation_id: str
    output_id: str
    with_output: bool
    indexes: tuple[str, ...]
    ucsv_gamma: float
    ucsv_draws: int
    ucsv_burn_in: int
    models: tuple[str, ...]
    trim: tuple[float, float]
    bandwidth: int | None
    max_lags: int | None
    unitroot_spec: str
    decision_level: int
    decision_min_statistics: int
    ecm_extra_diff_lags: int
    var_order: int
    stability_level: int
    digest: str = ""


_CONFIG_KEYS = {
    "pipeline": {"seed", "manifest", "out", "inflation", "output", "with_output", "indexes"},
    "ucsv": {"gamma", "draws", "burn_in"},
    "break_test": {"models", "trim", "bandwidth", "max_lags"},
    "unitroot": {"spec"},
    "decision": {"level", "min_statistics"},
    "ecm": {"extra_diff_lags"},
    "var": {"order"},
    "stability": {"level"},
}


def _digest(cfg: PipelineConfig, manifest_bytes: bytes) -> str:
    """Hash of every analysis-relevant setting plus the manifest bytes."""
    lines = [
        f"break_test.bandwidth={'auto' if cfg.bandwidth is None else cfg.bandwidth}",
        f"break_test.max_lags={'auto' if cfg.max_lags is None else cfg.max_lags}",
        f"break_test.models={','.join(cfg.models)}",
        f"break_test.trim={cfg.trim[0]!r},{cfg.trim[1]!r}",
        f"decision.level={cfg.decision_level}",
        f"decision.min_statistics={cfg.decision_min_statistics}",
        f"ecm.extra_diff_lags={cfg.ecm_extra_diff_lags}",
        f"manifest.sha256={hashlib.sha256(manifest_bytes).hexdigest()}",
        f"pipeline.indexes={','.join(cfg.indexes)}",
        f"pipeline.inflation={cfg.inflation_id}",
        f"pipeline.output={cfg.output_id}",
        f"pipeline.seed={cfg.seed}",
        f"pipeline.with_output={str(cfg.with_output).lower()}",
        f"stability.level={cfg.stability_level}",
        f"ucsv.burn_in={cfg.ucsv_burn_in}",
        f"ucsv.draws={cfg.ucsv_draws}",
        f"ucsv.gamma={cfg.ucsv_gamma!r}",
        f"unitroot.spec={cfg.unitroot_spec}",
        f"var.order={cfg.var_order}",
    ]
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def _parse_trim(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"trim must be two comma-separated fractions, got {text!r}")
    lo, hi = (float(p) for p in parts)
    if not 0.0 < lo < hi < 1.0:
        raise ConfigError(f"trim fractions must satisfy 0 < a < b < 1, got {text!r}")
    return (lo, hi)


def load_config(
    path: str | Path,
    out: str | None = None,
    seed: int | None = None,
    trim: str | None = None,
    with_output: bool = False,
) -> PipelineConfig:
    """Read a TOML pipeline config, apply overrides, and validate it.

    The manifest path resolves relative to the config file; the output
    directory resolves relative to the working directory.  The seed is
    mandatory (file or ``--seed``) so every run is reproducible.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config {path}: {e}") from e

    for section, table in raw.items():
        if section not in _CONFIG_KEYS:
            raise ConfigError(f"config {path}: unknown section [{section}]")
        if not isinstance(table, dict):
            raise ConfigError(f"config {path}: [{section}] must be a table")
        for key in table:
            if key not in _CONFIG_KEYS[section]:
                raise ConfigError(f"config {path}: unknown key {section}.{key}")

    pipe = raw.get("pipeline", {})
    if seed is None:
        seed = pipe.get("seed")
    if seed is None:
        raise ConfigError("a seed is mandatory: set pipeline.seed or pass --seed")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must fit an unsigned 64-bit integer, got {seed}")

    if "manifest" not in pipe:
        raise ConfigError("pipeline.manifest is required")
    manifest_path = (path.parent / str(pipe["manifest"])).resolve()
    if not manifest_path.is_file():
        raise ConfigError(f"manifest not found: {manifest_path}")
    manifest_bytes = manifest_path.read_bytes()
    manifest = read_manifest(manifest_path)
    known_ids = [e.id for e in manifest.entries]

    inflation_id = str(pipe.get("inflation", "I"))
    output_id = str(pipe.get("output", "IP"))
    for label, sid in (("inflation", inflation_id), ("output", output_id)):
        if sid not in known_ids:
            raise ConfigError(f"pipeline.{label} series {sid!r} is not in the manifest")
    indexes = tuple(str(s) for s in pipe.get("indexes", []))
    if not indexes:
        indexes = tuple(i for i in known_ids if i not in (inflation_id, output_id))
    for sid in indexes:
        if sid not in known_ids:
            raise ConfigError(f"index series {sid!r} is not in the manifest")
        if sid in (inflation_id, output_id):
            raise ConfigError(f"index series {sid!r} is already a regressor")
    if not indexes:
        raise ConfigError("no index series left after removing the regressors")

    ucsv_tab = raw.get("ucsv", {})
    bt = raw.get("break_test", {})
    models = tuple(str(m) for m in bt.get("models", GH_MODELS))
    bad = [m for m in models if m not in GH_MODELS]
    if bad or not models:
        raise ConfigError(f"break_test.models must be a non-empty subset of {GH_MODELS}")
    models = tuple(m for m in GH_MODELS if m in models)

    if trim is not None:
        trim_pair = _parse_trim(trim)
    elif "trim" in bt:
        pair = bt["trim"]
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError("break_test.trim must be a two-element array")
        trim_pair = _parse_trim(f"{pair[0]},{pair[1]}")
    else:
        trim_pair = DEFAULT_TRIM

    def _optional_count(table: dict, key: str) -> int | None:
        value = int(table.get(key, 0))
        if value < 0:
            raise ConfigError(f"{key} must be >= 0 (0 means automatic), got {value}")
        return value if value > 0 else None

    spec = str(raw.get("unitroot", {}).get("spec", "c"))
    if spec not in ("c", "ct"):
        raise ConfigError(f"unitroot.spec must be 'c' or 'ct', got {spec!r}")
    dec = raw.get("decision", {})
    level = int(dec.get("level", 10))
    if level not in (1, 5, 10):
        raise ConfigError(f"decision.level must be 1, 5, or 10, got {level}")
    min_stats = int(dec.get("min_statistics", 2))
    if not 1 <= min_stats <= 3:
        raise ConfigError(f"decision.min_statistics must be in 1..3, got {min_stats}")
    stab_level = int(raw.get("stability", {}).get("level", 5))
    if stab_level not in (1, 5, 10):
        raise ConfigError(f"stability.level must be 1, 5, or 10, got {stab_level}")

    cfg = PipelineConfig(
        seed=seed,
        manifest_path=manifest_path,
        out=Path(out if out is not None else pipe.get("out", "out")),
        inflation_id=inflation_id,
        output_id=output_id,
        with_output=bool(with_output or pipe.get("with_output", False)),
        indexes=indexes,
        ucsv_gamma=float(ucsv_tab.get("gamma", 0.04)),
        ucsv_draws=int(ucsv_tab.get("draws", 5000)),
        ucsv_burn_in=int(ucsv_tab.get("burn_in", 1000)),
        models=models,
        trim=trim_pair,
        bandwidth=_optional_count(bt, "bandwidth"),
        max_lags=_optional_count(bt, "max_lags"),
        unitroot_spec=spec,
        decision_level=level,
        decision_min_statistics=min_stats,
        ecm_extra_diff_lags=int(raw.get("ecm", {}).get("extra_diff_lags", 0)),
        var_order=int(raw.get("var", {}).get("order", 2)),
        stability_level=stab_level,
    )
    return dataclasses.replace(cfg, digest=_digest(cfg, manifest_bytes))


# ---------------------------------------------------------------------------
# artifact reading and writing
# ---------------------------------------------------------------------------


def _fmt_month(m: MonthIndex) -> str:
    """Report-style month, e.g. 2009M12."""
    return f"{m.year}M{m.month:02d}"


def _provenance_lines(cfg: PipelineConfig) -> list[str]:
    return [f"# config: {cfg.digest}", f"# seed: {cfg.seed}"]


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _csv_text(cfg: PipelineConfig, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for line in _provenance_lines(cfg):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _series_text(cfg: PipelineConfig, s: TimeSeries) -> str:
    lines = _provenance_lines(cfg) + ["date,value"]
    for t in range(len(s)):
        lines.append(f"{s.start.shift(t)},{float(s.values[t])!r}")
    return "\n".join(lines) + "\n"


def _check_artifact(path: Path, cfg: PipelineConfig, stage: str) -> str:
    """Return the artifact text after verifying it belongs to this config."""
    if not path.is_file():
        raise FileNotFoundError(
            f"missing artifact {path}; run the stages before {stage!r} first"
        )
    text = path.read_text(encoding="utf-8")
    first = text.splitlines()[0] if text else ""
    expected = f"# config: {cfg.digest}"
    if first != expected:
        found = first.removeprefix("# config: ") if first.startswith("# config: ") else "none"
        raise ConfigError(
            f"{path} was written under config {found}, current config is "
            f"{cfg.digest}; refusing to mix artifacts"
        )
    return text


def _read_series(path: Path, cfg: PipelineConfig, stage: str, id: str | None = None) -> TimeSeries:
    _check_artifact(path, cfg, stage)
    return load_csv(path, id=id)


def _read_rows(path: Path, cfg: PipelineConfig, stage: str) -> list[dict]:
    text = _check_artifact(path, cfg, stage)
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(body))


# ---------------------------------------------------------------------------
# shared stage inputs
# ---------------------------------------------------------------------------


def _series_dir(cfg: PipelineConfig) -> Path:
    return cfg.out / "series"


def _regressors(cfg: PipelineConfig, stage: str) -> list[TimeSeries]:
    """Inflation, uncertainty, and (when enabled) output growth."""
    sdir = _series_dir(cfg)
    xs = [
        _read_series(sdir / f"{cfg.inflation_id}.csv", cfg, stage, id=cfg.inflation_id),
        _read_series(sdir / "U.csv", cfg, stage, id="U"),
    ]
    if cfg.with_output:
        xs.append(_read_series(sdir / f"{cfg.output_id}.csv", cfg, stage, id=cfg.output_id))
    return xs


def _index_series(cfg: PipelineConfig, stage: str, index_id: str) -> TimeSeries:
    return _read_series(_series_dir(cfg) / f"{index_id}.csv", cfg, stage, id=index_id)


def _decision_rows(cfg: PipelineConfig, stage: str) -> list[dict]:
    return _read_rows(cfg.out / "decisions.csv", cfg, stage)


def _stars_lower(value: float, cvs: GhCriticalValues, statistic: str) -> str:
    for lvl, mark in ((1, "***"), (5, "**"), (10, "*")):
        if value < cvs.cv(statistic, lvl):
            return mark
    return ""


def _stars_t(t: float) -> str:
    a = abs(t)
    if a >= 2.576:
        return "***"
    if a >= 1.960:
        return "**"
    if a >= 1.645:
        return "*"
    return ""


def _stars_p(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


def _ecm_inputs(
    cfg: PipelineConfig, stage: str, index_id: str
) -> tuple[TimeSeries, list[TimeSeries], TimeSeries]:
    y = _index_series(cfg, stage, index_id)
    xs = _regressors(cfg, stage)
    resid = _read_series(
        cfg.out / "residuals" / f"{index_id}.csv", cfg, stage, id=f"{index_id}_eq_resid"
    )
    return y, xs, resid


def _fit_ecm_for(cfg: PipelineConfig, y: TimeSeries, xs: list[TimeSeries], resid: TimeSeries) -> EcmFit:
    ip = xs[2] if cfg.with_output else None
    return fit_ecm(y, xs[0], xs[1], resid, ip=ip, extra_diff_lags=cfg.ecm_extra_diff_lags)


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def stage_fetch(cfg: PipelineConfig) -> list[Path]:
    manifest = read_manifest(cfg.manifest_path)
    dataset = materialize(manifest, base_dir=cfg.manifest_path.parent)
    written = []
    for entry in manifest.entries:
        s = dataset[entry.id]
        written.append(
            _write_text(_series_dir(cfg) / f"{entry.id}.csv", _series_text(cfg, s))
        )
    report = "\n".join(_provenance_lines(cfg)) + "\n" + dataset.report
    written.append(_write_text(cfg.out / "provenance.txt", report))
    some = dataset[manifest.entries[0].id]
    print(
        f"fetch: {len(manifest.entries)} series -> {_series_dir(cfg)}, "
        f"window {some.start}..{some.end}"
    )
    return written


def stage_ucsv(cfg: PipelineConfig) -> list[Path]:
    infl = _read_series(
        _series_dir(cfg) / f"{cfg.inflation_id}.csv", cfg, "ucsv", id=cfg.inflation_id
    )
    posterior = estimate_ucsv(
        infl,
        UcsvConfig(
            gamma=cfg.ucsv_gamma,
            n_draws=cfg.ucsv_draws,
            burn_in=cfg.ucsv_burn_in,
            seed=cfg.seed,
        ),
    )
    u = uncertainty_series(posterior)
    rows = []
    for t in range(len(infl)):
        rows.append([
            str(infl.start.shift(t)),
            repr(float(infl.values[t])),
            repr(float(posterior.trend.values[t])),
            repr(float(posterior.gap.values[t])),
            repr(float(posterior.sigma_eta.values[t])),
            repr(float(posterior.sigma_eps.values[t])),
        ])
    written = [
        _write_text(_series_dir(cfg) / "U.csv", _series_text(cfg, u)),
        _write_text(
            cfg.out / "ucsv_components.csv",
            _csv_text(cfg, ["date", "observed", "trend", "gap", "sigma_eta", "sigma_eps"], rows),
        ),
    ]
    print(
        f"ucsv: {len(infl)} months of {cfg.inflation_id}, "
        f"mean uncertainty {float(np.mean(u.values)):.4f} "
        f"({posterior.n_retained} retained draws)"
    )
    return written


def stage_unitroot(cfg: PipelineConfig) -> list[Path]:
    sdir = _series_dir(cfg)
    ordered = [cfg.inflation_id, "U"] + ([cfg.output_id] if cfg.with_output else [])
    ordered += list(cfg.indexes)
    rows = []
    for sid in ordered:
        s = _read_series(sdir / f"{sid}.csv", cfg, "unitroot", id=sid)
        d = diff(s)
        adf_l = adf_test(s, spec=cfg.unitroot_spec, max_lags=cfg.max_lags)
        pp_l = pp_test(s, spec=cfg.unitroot_spec, bandwidth=cfg.bandwidth)
        adf_d = adf_test(d, spec=cfg.unitroot_spec, max_lags=cfg.max_lags)
        pp_d = pp_test(d, spec=cfg.unitroot_spec, bandwidth=cfg.bandwidth)
        rows.append([
            sid, len(s),
            f"{adf_l.stat:.4f}", adf_l.lags, adf_l.stars,
            f"{pp_l.stat:.4f}", pp_l.stars,
            f"{adf_d.stat:.4f}", adf_d.lags, adf_d.stars,
            f"{pp_d.stat:.4f}", pp_d.stars,
        ])
    header = [
        "series", "nobs",
        "adf_level", "adf_level_lags", "adf_level_stars",
        "pp_level", "pp_level_stars",
        "adf_diff", "adf_diff_lags", "adf_diff_stars",
        "pp_diff", "pp_diff_stars",
    ]
    written = [_write_text(cfg.out / "unitroot.csv", _csv_text(cfg, header, rows))]
    print(f"unitroot: {len(rows)} series tested (spec {cfg.unitroot_spec})")
    return written


def stage_gh(cfg: PipelineConfig) -> list[Path]:
    xs = _regressors(cfg, "gh")
    test_rows = []
    decision_rows = []
    for index_id in cfg.indexes:
        y = _index_series(cfg, "gh", index_id)
        results = [
            gh_test(y, xs, model, trim=cfg.trim, bandwidth=cfg.bandwidth, max_lags=cfg.max_lags)
            for model in cfg.models
        ]
        for res in results:
            cvs = gh_critical_values(res.model, res.m)
            test_rows.append([
                index_id, res.model, res.m, res.nobs,
                f"{res.adf_stat:.4f}", res.adf_lags, str(res.adf_break),
                _stars_lower(res.adf_stat, cvs, "ADF"),
                f"{res.zt_stat:.4f}", str(res.zt_break),
                _stars_lower(res.zt_stat, cvs, "Zt"),
                f"{res.za_stat:.3f}", str(res.za_break),
                _stars_lower(res.za_stat, cvs, "Za"),
                cvs.provenance,
            ])
        decision = decide(results, cfg.decision_level, cfg.decision_min_statistics)
        chosen_model = chosen_break = chosen_stat = ""
        verdict = "not cointegrated"
        if decision.cointegrated:
            # among the supporting models, report the one whose Zt
            # statistic sits deepest below its own 10 percent critical
            # value; raw statistics are not comparable across models
            # because each model has its own null distribution
            passing = [r for r in results if r.model in decision.passing_models]
            best = min(
                passing,
                key=lambda r: r.zt_stat - gh_critical_values(r.model, r.m).cv("Zt", 10),
            )
            chosen_model = best.model
            chosen_break = str(best.zt_break)
            chosen_stat = f"{best.zt_stat:.4f}"
            verdict = f"cointegrated via {best.model} (break {_fmt_month(best.zt_break)})"
        decision_rows.append(
            [index_id]
            + [decision.rejections[m] for m in cfg.models]
            + [
                str(decision.cointegrated).lower(),
                ";".join(decision.passing_models),
                chosen_model, chosen_break, chosen_stat,
            ]
        )
        print(f"gh: {index_id}: {verdict}")

    test_header = [
        "index", "model", "m", "nobs",
        "adf_stat", "adf_lags", "adf_break", "adf_stars",
        "zt_stat", "zt_break", "zt_stars",
        "za_stat", "za_break", "za_stars",
        "cv_source",
    ]
    decision_header = (
        ["index"]
        + [f"{m}_hits" for m in cfg.models]
        + ["cointegrated", "passing_models", "chosen_model", "chosen_break", "chosen_zt"]
    )
    return [
        _write_text(cfg.out / "gh_tests.csv", _csv_text(cfg, test_header, test_rows)),
        _write_text(cfg.out / "decisions.csv", _csv_text(cfg, decision_header, decision_rows)),
    ]


def stage_fit(cfg: PipelineConfig) -> list[Path]:
    xs = _regressors(cfg, "fit")
    fit_rows = []
    wald_rows = []
    written = []
    n_fit = 0
    for row in _decision_rows(cfg, "fit"):
        if row["cointegrated"] != "true":
            continue
        index_id = row["index"]
        y = _index_series(cfg, "fit", index_id)
        model = row["chosen_model"]
        break_month = MonthIndex.parse(row["chosen_break"])
        fit = fit_break_regression(y, xs, model, break_month)
        for name, b, se, t in zip(fit.names, fit.beta, fit.se, fit.tstats):
            fit_rows.append([
                index_id, model, str(break_month), name,
                f"{b:.6g}", f"{se:.6g}", f"{t:.4f}", _stars_t(t),
                f"{fit.r_squared:.4f}", fit.nobs,
            ])
        shift_terms = [n for n in fit.names if n == "break" or n.endswith("_break")]
        R = np.zeros((len(shift_terms), len(fit.names)))
        for i, name in enumerate(shift_terms):
            R[i, fit.names.index(name)] = 1.0
        wald = wald_test(fit, R, np.zeros(len(shift_terms)))
        wald_rows.append([
            index_id, model, str(break_month), ";".join(shift_terms),
            f"{wald.stat:.4f}", wald.df, f"{wald.pvalue:.4g}", _stars_p(wald.pvalue),
        ])
        written.append(
            _write_text(
                cfg.out / "residuals" / f"{index_id}.csv", _series_text(cfg, fit.resid)
            )
        )
        n_fit += 1

    fit_header = [
        "index", "model", "break", "term",
        "estimate", "se", "tstat", "stars", "r_squared", "nobs",
    ]
    wald_header = [
        "index", "model", "break", "restricted_terms", "stat", "df", "pvalue", "stars",
    ]
    written += [
        _write_text(cfg.out / "longrun_fits.csv", _csv_text(cfg, fit_header, fit_rows)),
        _write_text(cfg.out / "wald_tests.csv", _csv_text(cfg, wald_header, wald_rows)),
    ]
    print(f"fit: {n_fit} long-run equations estimated")
    return written


def stage_ecm(cfg: PipelineConfig) -> list[Path]:
    rows = []
    n_fit = 0
    for row in _decision_rows(cfg, "ecm"):
        if row["cointegrated"] != "true":
            continue
        index_id = row["index"]
        y, xs, resid = _ecm_inputs(cfg, "ecm", index_id)
        fit = _fit_ecm_for(cfg, y, xs, resid)
        for name, b, se, t in zip(fit.names, fit.beta, fit.se, fit.tstats):
            rows.append([
                index_id, fit.dependent, name,
                f"{b:.6g}", f"{se:.6g}", f"{t:.4f}", _stars_t(t),
                f"{fit.r_squared:.4f}", fit.nobs,
            ])
        n_fit += 1
    header = [
        "index", "dependent", "term", "estimate", "se", "tstat", "stars",
        "r_squared", "nobs",
    ]
    written = [_write_text(cfg.out / "ecm_fits.csv", _csv_text(cfg, header, rows))]
    print(f"ecm: {n_fit} error-correction models estimated")
    return written


def stage_var(cfg: PipelineConfig) -> list[Path]:
    xs = _regressors(cfg, "var")
    rows = []
    n_fit = 0
    for row in _decision_rows(cfg, "var"):
        if row["cointegrated"] == "true":
            continue
        index_id = row["index"]
        y = _index_series(cfg, "var", index_id)
        fit = fit_var_diff([y] + xs, p=cfg.var_order)
        for i, eq in enumerate(fit.equation_fits):
            eq_name = f"d_{fit.names[i]}"
            for name, b, se, t in zip(eq.names, eq.beta, eq.se, eq.tstats):
                rows.append([
                    index_id, eq_name, name,
                    f"{b:.6g}", f"{se:.6g}", f"{t:.4f}", _stars_t(t),
                    f"{fit.r_squared[i]:.4f}", fit.nobs,
                    f"{fit.spectral_radius:.4f}", str(fit.stable).lower(),
                ])
        n_fit += 1
    header = [
        "index", "equation", "term", "estimate", "se", "tstat", "stars",
        "r_squared", "nobs", "spectral_radius", "stable",
    ]
    written = [_write_text(cfg.out / "var_fits.csv", _csv_text(cfg, header, rows))]
    print(f"var: {n_fit} first-difference VAR({cfg.var_order}) systems estimated")
    return written


def stage_cusum(cfg: PipelineConfig) -> list[Path]:
    summary_rows = []
    written = []
    n_fit = 0
    for row in _decision_rows(cfg, "cusum"):
        if row["cointegrated"] != "true":
            continue
        index_id = row["index"]
        y, xs, resid = _ecm_inputs(cfg, "cusum", index_id)
        fit = _fit_ecm_for(cfg, y, xs, resid)
        design, dep = fit.ols_fit.X, fit.ols_fit.y
        w = recursive_residuals(dep, design)
        n_rows, k = design.shape
        # regression row j is the month j + drop steps after the window
        # start (one difference plus any extra lags)
        drop = 1 + cfg.ecm_extra_diff_lags
        for kind, path_fn in (("cusum", cusum), ("cusum_sq", cusum_sq)):
            path = path_fn(w, k, n_rows, level=cfg.stability_level)
            point_rows = []
            for j in range(path.r.size):
                month = y.start.shift(drop + int(path.r[j]) - 1)
                point_rows.append([
                    int(path.r[j]), str(month),
                    f"{path.statistics[j]:.6f}",
                    f"{path.lower[j]:.6f}", f"{path.upper[j]:.6f}",
                ])
            written.append(
                _write_text(
                    cfg.out / "stability" / f"{index_id}_{kind}.csv",
                    _csv_text(cfg, ["r", "date", "stat", "lower", "upper"], point_rows),
                )
            )
            breach_month = (
                str(y.start.shift(drop + path.first_breach - 1))
                if path.first_breach is not None
                else ""
            )
            summary_rows.append([
                index_id, kind, cfg.stability_level, n_rows, k,
                str(path.breached).lower(), breach_month,
                f"{path.statistics[-1]:.6f}",
            ])
        n_fit += 1
    header = [
        "index", "test", "level", "nobs", "k", "breached", "first_breach", "end_value",
    ]
    written.append(
        _write_text(cfg.out / "stability.csv", _csv_text(cfg, header, summary_rows))
    )
    print(f"cusum: {n_fit} error-correction models traced")
    return written


_STAGES = {
    "fetch": stage_fetch,
    "ucsv": stage_ucsv,
    "unitroot": stage_unitroot,
    "gh": stage_gh,
    "fit": stage_fit,
    "ecm": stage_ecm,
    "var": stage_var,
    "cusum": stage_cusum,
}
STAGE_ORDER = tuple(_STAGES)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _md_table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join(" --- " for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return lines


def _print_month(text: str) -> str:
    return _fmt_month(MonthIndex.parse(text)) if text else "-"


def _summary_text(cfg: PipelineConfig) -> str:
    """Markdown report assembled from whichever artifacts exist."""
    out = cfg.out
    lines = [
        "# Long-run analysis report",
        "",
        f"- config: {cfg.digest}",
        f"- seed: {cfg.seed}",
        f"- versions: longrun {longrun.__version__}, numpy {np.__version__}, "
        f"scipy {scipy.__version__}",
        "",
    ]

    if (out / "provenance.txt").is_file():
        text = _check_artifact(out / "provenance.txt", cfg, "report")
        body = [ln for ln in text.splitlines() if not ln.startswith("#")]
        lines += ["## Data", ""] + [ln for ln in body if ln] + [""]

    if (out / "ucsv_components.csv").is_file():
        rows = _read_rows(out / "ucsv_components.csv", cfg, "report")
        sigma = np.array([float(r["sigma_eta"]) for r in rows])
        lines += [
            "## Inflation trend and uncertainty",
            "",
            f"Decomposition of {cfg.inflation_id} over "
            f"{_print_month(rows[0]['date'])}..{_print_month(rows[-1]['date'])} "
            f"({len(rows)} months, gamma {cfg.ucsv_gamma}, "
            f"{cfg.ucsv_draws} draws, burn-in {cfg.ucsv_burn_in}).",
            "",
            f"Uncertainty (transitory volatility): mean {sigma.mean():.4f}, "
            f"min {sigma.min():.4f}, max {sigma.max():.4f}.",
            "",
        ]

    if (out / "unitroot.csv").is_file():
        rows = _read_rows(out / "unitroot.csv", cfg, "report")
        table = [
            [
                r["series"],
                r["adf_level"] + r["adf_level_stars"],
                r["pp_level"] + r["pp_level_stars"],
                r["adf_diff"] + r["adf_diff_stars"],
                r["pp_diff"] + r["pp_diff_stars"],
            ]
            for r in rows
        ]
        lines += ["## Unit-root tests", ""]
        lines += _md_table(
            ["series", "ADF level", "PP level", "ADF diff", "PP diff"], table
        )
        lines += [""]

    if (out / "gh_tests.csv").is_file():
        rows = _read_rows(out / "gh_tests.csv", cfg, "report")
        table = [
            [
                r["index"], r["model"],
                r["adf_stat"] + r["adf_stars"], _print_month(r["adf_break"]),
                r["zt_stat"] + r["zt_stars"], _print_month(r["zt_break"]),
                r["za_stat"] + r["za_stars"], _print_month(r["za_break"]),
            ]
            for r in rows
        ]
        lines += ["## Break tests", ""]
        lines += _md_table(
            ["index", "model", "ADF", "break", "Zt", "break", "Za", "break"], table
        )
        if any(r["cv_source"] == "simulated" for r in rows):
            lines += [
                "",
                "Critical values for RST with two or more regressors are "
                "simulation-calibrated; the rest are the published tables.",
            ]
        lines += [""]

    if (out / "decisions.csv").is_file():
        rows = _read_rows(out / "decisions.csv", cfg, "report")
        table = [
            [
                r["index"],
                " ".join(f"{m}:{r[f'{m}_hits']}" for m in cfg.models),
                "yes" if r["cointegrated"] == "true" else "no",
                r["chosen_model"] or "-",
                _print_month(r["chosen_break"]),
            ]
            for r in rows
        ]
        lines += ["## Cointegration decisions", ""]
        lines += _md_table(
            ["index", "rejections", "cointegrated", "model", "break"], table
        )
        lines += [
            "",
            f"A model counts as rejecting when at least "
            f"{cfg.decision_min_statistics} of its three statistics beat the "
            f"{cfg.decision_level} percent critical values.",
            "",
        ]

    if (out / "longrun_fits.csv").is_file():
        rows = _read_rows(out / "longrun_fits.csv", cfg, "report")
        table = [
            [
                r["index"], r["model"], _print_month(r["break"]), r["term"],
                f"{r['estimate']}{r['stars']}", r["se"], r["tstat"],
            ]
            for r in rows
        ]
        lines += ["## Long-run equations", ""]
        lines += _md_table(
            ["index", "model", "break", "term", "estimate", "se", "t"], table
        )
        lines += [""]
        if (out / "wald_tests.csv").is_file():
            wrows = _read_rows(out / "wald_tests.csv", cfg, "report")
            wtable = [
                [
                    r["index"],
                    f"{r['stat']}{r['stars']}", r["df"], r["pvalue"],
                ]
                for r in wrows
            ]
            lines += ["Joint test that every break-shift term is zero:", ""]
            lines += _md_table(["index", "Wald", "df", "p"], wtable)
            lines += [""]

    if (out / "ecm_fits.csv").is_file():
        rows = _read_rows(out / "ecm_fits.csv", cfg, "report")
        table = [
            [
                r["index"], r["term"],
                f"{r['estimate']}{r['stars']}", r["se"], r["tstat"], r["r_squared"],
            ]
            for r in rows
        ]
        lines += ["## Error-correction models", ""]
        lines += _md_table(
            ["index", "term", "estimate", "se", "t", "R2"], table
        )
        lines += [""]

    if (out / "var_fits.csv").is_file():
        rows = _read_rows(out / "var_fits.csv", cfg, "report")
        table = [
            [
                r["index"], r["equation"], r["term"],
                f"{r['estimate']}{r['stars']}", r["se"], r["tstat"],
            ]
            for r in rows
        ]
        lines += [f"## First-difference VAR({cfg.var_order})", ""]
        lines += _md_table(
            ["index", "equation", "term", "estimate", "se", "t"], table
        )
        radii = {r["index"]: (r["spectral_radius"], r["stable"]) for r in rows}
        if radii:
            lines += [""]
            for index_id, (radius, stable) in radii.items():
                state = "stable" if stable == "true" else "unstable"
                lines.append(f"- {index_id}: spectral radius {radius} ({state})")
        lines += [""]

    if (out / "stability.csv").is_file():
        rows = _read_rows(out / "stability.csv", cfg, "report")
        table = [
            [
                r["index"], r["test"],
                "breached" if r["breached"] == "true" else "inside",
                _print_month(r["first_breach"]),
                r["end_value"],
            ]
            for r in rows
        ]
        lines += ["## Stability of the error-correction models", ""]
        lines += _md_table(
            ["index", "test", "band", "first breach", "end value"], table
        )
        lines += [""]

    lines += [
        "---",
        "",
        "Notes: (i) *, **, and *** mark rejection at the 10, 5, and 1 "
        "percent levels; (ii) break months are the last month of the "
        "pre-break regime, printed as YYYYMmm.",
        "",
    ]
    return "\n".join(lines)


def _write_summary(cfg: PipelineConfig) -> Path:
    return _write_text(cfg.out / "summary.md", _summary_text(cfg))


# ---------------------------------------------------------------------------
# stage runner
# ---------------------------------------------------------------------------


def _run_stages(cfg: PipelineConfig, names: list[str]) -> list[Path]:
    """Run stages in order; on failure remove everything written here."""
    written: list[Path] = []
    current = names[0]
    try:
        for current in names:
            written += _STAGES[current](cfg)
            written.append(_write_summary(cfg))
    except Exception as exc:
        for p in set(written):
            p.unlink(missing_ok=True)
        raise StageError(current, exc) from exc
    return written


def run_pipeline(cfg: PipelineConfig) -> list[Path]:
    """Execute every stage in order and return the written artifacts."""
    return _run_stages(cfg, list(STAGE_ORDER))


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _load_config_from_args(args: argparse.Namespace) -> PipelineConfig:
    if not args.config:
        raise ConfigError("--config is required for this command")
    return load_config(
        args.config,
        out=args.out,
        seed=args.seed,
        trim=args.trim,
        with_output=args.with_output,
    )


def _cmd_stage(stage: str, args: argparse.Namespace) -> int:
    cfg = _load_config_from_args(args)
    _run_stages(cfg, [stage])
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    cfg = _load_config_from_args(args)
    written = run_pipeline(cfg)
    print(f"pipeline: {len(written)} artifacts in {cfg.out}")
    return 0


def _apply_transform(s: TimeSeries, transform: str) -> TimeSeries:
    if transform == "log":
        return log_level(s)
    if transform == "yoy":
        return yoy_growth(s)
    return s


def _cmd_ucsv(args: argparse.Namespace) -> int:
    if not args.file:
        return _cmd_stage("ucsv", args)
    s = _apply_transform(load_csv(args.file), args.transform)
    seed = args.seed if args.seed is not None else 0
    posterior = estimate_ucsv(
        s, UcsvConfig(gamma=args.gamma, n_draws=args.draws, burn_in=args.burn_in, seed=seed)
    )
    u = uncertainty_series(posterior)
    print(f"series: {s.id}, {len(s)} months {s.start}..{s.end}, seed {seed}")
    print(
        f"trend:       first {posterior.trend.values[0]:+.4f}  "
        f"last {posterior.trend.values[-1]:+.4f}"
    )
    print(
        f"uncertainty: mean {float(np.mean(u.values)):.4f}  "
        f"min {float(np.min(u.values)):.4f}  max {float(np.max(u.values)):.4f}"
    )
    if args.components:
        header = ["date", "observed", "trend", "gap", "sigma_eta", "sigma_eps"]
        out_lines = [f"# seed: {seed}", f"# gamma: {args.gamma!r}", ",".join(header)]
        for t in range(len(s)):
            out_lines.append(
                f"{s.start.shift(t)},{float(s.values[t])!r},"
                f"{float(posterior.trend.values[t])!r},"
                f"{float(posterior.gap.values[t])!r},"
                f"{float(posterior.sigma_eta.values[t])!r},"
                f"{float(posterior.sigma_eps.values[t])!r}"
            )
        _write_text(Path(args.components), "\n".join(out_lines) + "\n")
        print(f"components -> {args.components}")
    return 0


def _cmd_unitroot(args: argparse.Namespace) -> int:
    if not args.files:
        return _cmd_stage("unitroot", args)
    print(
        f"{'series':<18}{'n':>5}  {'ADF level':>12}  {'PP level':>12}"
        f"  {'ADF diff':>12}  {'PP diff':>12}"
    )
    for file in args.files:
        s = _apply_transform(load_csv(file), args.transform)
        d = diff(s)
        cells = []
        for res in (
            adf_test(s, spec=args.spec),
            pp_test(s, spec=args.spec),
            adf_test(d, spec=args.spec),
            pp_test(d, spec=args.spec),
        ):
            cells.append(f"{res.stat:9.3f}{res.stars:<3}")
        print(f"{s.id:<18}{len(s):>5}  " + "  ".join(cells))
    print("stars: * 10%, ** 5%, *** 1%")
    return 0


def _cmd_gh(args: argparse.Namespace) -> int:
    if not args.files:
        return _cmd_stage("gh", args)
    if len(args.files) < 2:
        raise ConfigError("gh needs a dependent CSV and at least one regressor CSV")
    series = [_apply_transform(load_csv(f), args.transform) for f in args.files]
    aligned = align(series)
    y, xs = aligned[0], aligned[1:]
    trim = _parse_trim(args.trim) if args.trim else DEFAULT_TRIM
    res = gh_test(y, xs, args.model, trim=trim)
    cvs = gh_critical_values(res.model, res.m)
    print(
        f"break test: {y.id} on {', '.join(s.id for s in xs)} "
        f"(model {res.model}, {res.nobs} months)"
    )
    for stat_name, value, brk in (
        ("ADF", res.adf_stat, res.adf_break),
        ("Zt", res.zt_stat, res.zt_break),
        ("Za", res.za_stat, res.za_break),
    ):
        stars = _stars_lower(value, cvs, stat_name)
        cv_text = "  ".join(f"{lvl}%: {cvs.cv(stat_name, lvl):.2f}" for lvl in (10, 5, 1))
        print(
            f"{stat_name:>4} = {value:8.3f}{stars:<3} break {_fmt_month(brk)}   "
            f"(critical values {cv_text}, {cvs.provenance})"
        )
    decision = decide([res], level=args.level, min_statistics=args.min_statistics)
    verdict = "supported" if decision.cointegrated else "not supported"
    print(
        f"cointegration {verdict} at the {args.level} percent level "
        f"({decision.rejections[res.model]} of 3 statistics reject)"
    )
    return 0


def _cmd_simulate_cv(args: argparse.Namespace) -> int:
    trim = _parse_trim(args.trim) if args.trim else DEFAULT_TRIM
    levels = tuple(int(p) for p in args.levels.split(","))
    table = simulate_critical_values(
        args.model, args.m, args.n, args.reps, args.seed, levels=levels, trim=trim
    )
    print(
        f"simulated critical values: model {table.model}, m={table.m}, "
        f"n={table.n}, {table.reps} replications, seed {table.seed}"
    )
    try:
        embedded = gh_critical_values(args.model, args.m)
    except KeyError:
        embedded = None
    print(f"{'level':>6}  {'ADF':>9}  {'Zt':>9}  {'Za':>9}")
    for lvl in levels:
        line = f"{lvl:>5}%  {table.adf[lvl]:>9.4f}  {table.zt[lvl]:>9.4f}  {table.za[lvl]:>9.3f}"
        if embedded is not None and lvl in (1, 5, 10):
            line += (
                f"   embedded ({embedded.provenance}): "
                f"ADF/Zt {embedded.cv('ADF', lvl):.2f}, Za {embedded.cv('Za', lvl):.2f}"
            )
        print(line)
    if args.out_file:
        lines = [
            f"# seed: {table.seed}",
            f"# model: {table.model} m={table.m} n={table.n} reps={table.reps} "
            f"trim={trim[0]!r},{trim[1]!r}",
            "level,adf,zt,za",
        ]
        for lvl in levels:
            lines.append(f"{lvl},{table.adf[lvl]!r},{table.zt[lvl]!r},{table.za[lvl]!r}")
        _write_text(Path(args.out_file), "\n".join(lines) + "\n")
        print(f"table -> {args.out_file}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="pipeline config (TOML)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    common.add_argument("--seed", type=int, metavar="N", help="seed (overrides config)")
    common.add_argument(
        "--with-output", action="store_true",
        help="include the output-growth series as a regressor",
    )
    common.add_argument("--trim", metavar="A,B", help="candidate-break trimming fractions")

    parser = argparse.ArgumentParser(
        prog="longrun",
        description="Long-run equilibrium analysis of monthly series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", parents=[common], help="materialize the dataset manifest")
    p.set_defaults(func=lambda a: _cmd_stage("fetch", a))

    p = sub.add_parser(
        "ucsv", parents=[common],
        help="extract the inflation trend and uncertainty",
    )
    p.add_argument("file", nargs="?", help="standalone: run on one CSV instead of the pipeline")
    p.add_argument("--transform", choices=("none", "log", "yoy"), default="none")
    p.add_argument("--gamma", type=float, default=0.04)
    p.add_argument("--draws", type=int, default=5000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--components", metavar="PATH", help="write the decomposition CSV here")
    p.set_defaults(func=_cmd_ucsv)

    p = sub.add_parser("unitroot", parents=[common], help="ADF and PP tests, levels and differences")
    p.add_argument("files", nargs="*", help="standalone: test these CSVs instead of the pipeline")
    p.add_argument("--transform", choices=("none", "log", "yoy"), default="none")
    p.add_argument("--spec", choices=("c", "ct"), default="c")
    p.set_defaults(func=_cmd_unitroot)

    p = sub.add_parser("gh", parents=[common], help="single-break cointegration tests")
    p.add_argument("files", nargs="*", help="standalone: dependent CSV then regressor CSVs")
    p.add_argument("--model", choices=GH_MODELS, default="LS")
    p.add_argument("--transform", choices=("none", "log", "yoy"), default="none")
    p.add_argument("--level", type=int, choices=(1, 5, 10), default=10)
    p.add_argument("--min-statistics", type=int, choices=(1, 2, 3), default=2)
    p.set_defaults(func=_cmd_gh)

    p = sub.add_parser("fit", parents=[common], help="long-run equations with break dummies")
    p.set_defaults(func=lambda a: _cmd_stage("fit", a))

    p = sub.add_parser("ecm", parents=[common], help="error-correction models")
    p.set_defaults(func=lambda a: _cmd_stage("ecm", a))

    p = sub.add_parser("var", parents=[common], help="first-difference VARs")
    p.set_defaults(func=lambda a: _cmd_stage("var", a))

    p = sub.add_parser("cusum", parents=[common], help="recursive-residual stability paths")
    p.set_defaults(func=lambda a: _cmd_stage("cusum", a))

    p = sub.add_parser("simulate-cv", help="simulate break-test critical values")
    p.add_argument("--model", choices=GH_MODELS, required=True)
    p.add_argument("--m", type=int, default=1, help="number of regressors")
    p.add_argument("--n", type=int, default=160, help="sample length")
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trim", metavar="A,B")
    p.add_argument("--levels", default="1,5,10", help="comma-separated percent levels")
    p.add_argument("--out-file", metavar="PATH")
    p.set_defaults(func=_cmd_simulate_cv)

    p = sub.add_parser("pipeline", parents=[common], help="run every stage in order")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error in {exc}", file=sys.stderr)
        return 1
    except (ConfigError, IngestError, AlignmentError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
