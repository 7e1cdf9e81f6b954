"""Command-line front end: ``evlab <command> [options]``.

Every run writes one JSON report ``{config, results, wall_time, version}``
with sorted keys and floats printed to 17 significant digits, so reports
diff cleanly and re-serialise to the same bytes. ``config`` is the effective
configuration (defaults, then ``--config`` file, then flags) and is enough to
rerun the experiment.

Exit status: 0 success, 2 configuration error, 3 data error, 4 numerical
failure, 1 anything else (for example a failing external compressor).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .calibrate import MIXTURE_CALIBRATOR, calibrated_eprocess, fisher_combine, power_calibrator, verify_calibrator
from .compress import KT, CompressionEProcess, compression_eprocess, external_adapter, kt_log2prob, zlib_adapter
from .core import StoppingRule
from .exceptions import AdapterError, ConfigError, DataError, NumericalError, ReplicationError
from .families import (
    BernoulliFamily,
    BernoulliModel,
    BetaModel,
    BoundedMeanEProcess,
    CompositeNull,
    ConstantEProcess,
    GaussianEProcess,
    GaussianMeanFamily,
    GaussianMeanPlugin,
    GaussianMixtureEProcess,
    GaussianModel,
    Interval,
    KTPlugin,
    LikelihoodRatioEProcess,
    MixtureUniversalEProcess,
    TTestEProcess,
    UniversalInferenceEProcess,
)
from .simlab import (
    ScenarioSpec,
    SimConfig,
    glr_inflation,
    growth_rate,
    mc_stopped_mean,
    p_hacking_replay,
    two_batch_replay,
    two_ones_replay,
    ville_coverage,
)

__all__ = ["main", "run", "ingest", "Dataset", "canonical_json", "parse_spec", "build_model",
           "build_constructor", "EXIT_OK", "EXIT_CONFIG", "EXIT_DATA", "EXIT_NUMERICAL"]

EXIT_OK, EXIT_OTHER, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3, 4
COMMANDS = ("validate", "ville", "growth", "replay", "calibrate", "compress", "glr")
SCENARIOS = {"p-hacking": "stop-when-significant", "stop-when-significant": "stop-when-significant",
             "two-batch": "two-batch-continuation", "two-batch-continuation": "two-batch-continuation",
             "two-ones": "two-ones-in-a-row", "two-ones-in-a-row": "two-ones-in-a-row"}

DEFAULTS = {
    "command": None,
    "scenario": None,
    "model": None,
    "constructor": None,
    "rule": None,
    "seed": 0,
    "reps": 1000,
    "horizon": 1000,
    "alpha": 0.05,
    "threads": 1,
    "input": None,
    "format": None,
    "out": None,
    "table": False,
    "coder": "kt",
    "external_compressor": None,
    "compressor_mode": "bytes",
    "kappas": [0.1, 0.5, 0.9],
    "base": "e",
    "params": {},
}

# defaults that depend on the command
_COMMAND_DEFAULTS = {
    "validate": {"model": "bernoulli:theta=0.5", "constructor": "lr:null=0.5,alt=0.7"},
    "ville": {"model": "bernoulli:theta=0.5", "constructor": "lr:null=0.5,alt=0.7"},
    "growth": {"model": "bernoulli:theta=0.7", "constructor": "lr:null=0.5,alt=0.7"},
}


# canonical JSON ------------------------------------------------------------------

def _format_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = "%.17g" % x
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _encode(obj, out):
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj, key=str)):
            if k:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(",")
            _encode(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, floats as ``%.17g``."""
    out: list[str] = []
    _encode(obj, out)
    return "".join(out)


# data ingestion ------------------------------------------------------------------

@dataclass(frozen=True)
class Dataset:
    """Observations in file order, split by ``batch`` when that column exists."""

    values: np.ndarray
    groups: tuple
    batches: tuple | None


def _parse_x(raw, line):
    if isinstance(raw, bool) or raw is None:
        raise DataError(f"line {line}: x must be a number, got {raw!r}")
    try:
        x = float(raw)
    except (TypeError, ValueError):
        raise DataError(f"line {line}: x is not numeric: {raw!r}") from None
    if not math.isfinite(x):
        raise DataError(f"line {line}: x must be finite, got {raw!r}")
    return x


def _parse_batch(raw, line):
    if isinstance(raw, bool):
        raise DataError(f"line {line}: batch must be an integer, got {raw!r}")
    try:
        b = float(raw)
    except (TypeError, ValueError):
        raise DataError(f"line {line}: batch must be an integer, got {raw!r}") from None
    if not b.is_integer():
        raise DataError(f"line {line}: batch must be an integer, got {raw!r}")
    return int(b)


def _rows_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise DataError("empty file")
    fields = [f.strip() for f in reader.fieldnames]
    if "x" not in fields:
        raise DataError("line 1: header must contain a column named 'x'")
    reader.fieldnames = fields
    for row in reader:
        line = reader.line_num
        if None in row or any(v is None for v in row.values()):
            raise DataError(f"line {line}: expected {len(fields)} fields")
        yield line, row["x"].strip(), (row["batch"].strip() if "batch" in row else None)


def _rows_jsonl(text):
    for line, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {line}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or "x" not in obj:
            raise DataError(f"line {line}: expected an object with field 'x'")
        yield line, obj["x"], obj.get("batch")


def ingest(path, fmt=None) -> Dataset:
    """Read a CSV (column ``x``, optional ``batch``) or JSONL file."""
    path = Path(path)
    fmt = fmt or ("jsonl" if path.suffix.lower() in (".jsonl", ".json", ".ndjson") else "csv")
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"format: unknown input format {fmt!r}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    if not text.strip():
        raise DataError(f"{path}: empty file")
    rows = _rows_csv(text) if fmt == "csv" else _rows_jsonl(text)
    xs, batches = [], []
    for line, raw_x, raw_b in rows:
        xs.append(_parse_x(raw_x, line))
        batches.append(None if raw_b in (None, "") else _parse_batch(raw_b, line))
    if not xs:
        raise DataError(f"{path}: no observations")
    values = np.array(xs)
    values.setflags(write=False)
    has_batch = [b is not None for b in batches]
    if not any(has_batch):
        return Dataset(values, (values,), None)
    if not all(has_batch):
        raise DataError("batch column is missing on some rows")
    order = list(dict.fromkeys(batches))
    labels = np.array(batches)
    groups = tuple(values[labels == b] for b in order)
    return Dataset(values, groups, tuple(order))


# model and constructor specs ------------------------------------------------------

def _coerce(text):
    text = text.strip()
    if ";" in text:
        return [_coerce(v) for v in text.split(";") if v.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_spec(spec, field):
    """``"kind:k=v,k=v"`` (lists as ``a;b``) or a JSON object with a ``kind`` key."""
    if isinstance(spec, dict):
        params = dict(spec)
        kind = params.pop("kind", None)
    elif isinstance(spec, str) and spec.strip().startswith("{"):
        try:
            params = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{field}: invalid JSON ({exc.msg})") from None
        if not isinstance(params, dict):
            raise ConfigError(f"{field}: expected a JSON object")
        kind = params.pop("kind", None)
    elif isinstance(spec, str):
        kind, _, rest = spec.partition(":")
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"{field}: expected key=value, got {item!r}")
            params[key.strip()] = _coerce(value)
    else:
        raise ConfigError(f"{field}: expected a string or object, got {type(spec).__name__}")
    if not kind:
        raise ConfigError(f"{field}: missing kind")
    return str(kind).strip().lower(), params


def _take(params, field, kind, **defaults):
    unknown = set(params) - set(defaults)
    if unknown:
        raise ConfigError(f"{field}: unknown parameter(s) {sorted(unknown)} for {kind!r}")
    return {k: params.get(k, v) for k, v in defaults.items()}


# domains: binary data is also unit-interval data, which is also real data
_DOMAIN_RANK = {"binary": 0, "unit": 1, "real": 2}


def build_model(spec):
    """Sampler from a model spec; returns ``(model, data domain)``."""
    kind, params = parse_spec(spec, "model")
    try:
        if kind == "bernoulli":
            p = _take(params, "model", kind, theta=0.5)
            return BernoulliModel(float(p["theta"])), "binary"
        if kind in ("gaussian", "normal"):
            p = _take(params, "model", kind, mean=0.0, sd=1.0)
            return GaussianModel(float(p["mean"]), float(p["sd"])), "real"
        if kind == "beta":
            p = _take(params, "model", kind, a=1.0, b=1.0)
            return BetaModel(float(p["a"]), float(p["b"])), "unit"
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"model: {exc}") from None
    raise ConfigError(f"model: unknown kind {kind!r} (bernoulli, gaussian, beta)")


def _family_model(family, value, sd):
    if family == "bernoulli":
        return BernoulliModel(float(value))
    if family == "gaussian":
        return GaussianModel(float(value), float(sd))
    raise ConfigError(f"constructor: unknown family {family!r} (bernoulli, gaussian)")


def _family_null(family, null, sd):
    fam = BernoulliFamily() if family == "bernoulli" else GaussianMeanFamily(float(sd))
    if isinstance(null, list):
        if len(null) != 2:
            raise ConfigError("constructor: null interval must be low;high")
        return CompositeNull(fam, Interval(float(null[0]), float(null[1])))
    return CompositeNull(fam, Interval.point(float(null)))


def build_constructor(spec, external=None):
    """E-process constructor from a spec; returns ``(estimator, required data domain)``."""
    kind, params = parse_spec(spec, "constructor")
    try:
        if kind == "constant":
            _take(params, "constructor", kind)
            return ConstantEProcess(), "real"
        if kind == "lr":
            p = _take(params, "constructor", kind, family="bernoulli", null=0.5, alt=0.7, sd=1.0)
            null, alt = _family_model(p["family"], p["null"], p["sd"]), _family_model(p["family"], p["alt"], p["sd"])
            return LikelihoodRatioEProcess(null, alt), "binary" if p["family"] == "bernoulli" else "real"
        if kind == "gaussian":
            p = _take(params, "constructor", kind, lam=0.5, sigma=1.0, center=0.0)
            return GaussianEProcess(float(p["lam"]), float(p["sigma"]), float(p["center"])), "real"
        if kind == "gaussian-mixture":
            p = _take(params, "constructor", kind, sigma=1.0, center=0.0)
            return GaussianMixtureEProcess(sigma=float(p["sigma"]), center=float(p["center"])), "real"
        if kind == "bounded-mean":
            p = _take(params, "constructor", kind, mu=0.5, strategy="agrapa", lam=0.0)
            return BoundedMeanEProcess(float(p["mu"]), str(p["strategy"]), float(p["lam"])), "unit"
        if kind in ("ui", "universal-inference"):
            p = _take(params, "constructor", kind, family="bernoulli", null=0.5, plugin=None, sd=1.0)
            fam = p["family"]
            null = _family_null(fam, p["null"], p["sd"])
            plugin = p["plugin"] or ("kt" if fam == "bernoulli" else "gaussian-mean")
            if plugin == "kt" and fam == "bernoulli":
                plug = KTPlugin()
            elif plugin == "gaussian-mean" and fam == "gaussian":
                plug = GaussianMeanPlugin(float(p["sd"]))
            else:
                raise ConfigError(f"constructor: plugin {plugin!r} does not fit family {fam!r}")
            return UniversalInferenceEProcess(null, plug), "binary" if fam == "bernoulli" else "real"
        if kind in ("mixture-ui", "mixture-universal"):
            p = _take(params, "constructor", kind, family="bernoulli", null=0.5, alts=[0.6, 0.7, 0.8], sd=1.0)
            fam = p["family"]
            alts = p["alts"] if isinstance(p["alts"], list) else [p["alts"]]
            grid = tuple(_family_model(fam, a, p["sd"]) for a in alts)
            return (MixtureUniversalEProcess(_family_null(fam, p["null"], p["sd"]), grid),
                    "binary" if fam == "bernoulli" else "real")
        if kind == "ttest":
            p = _take(params, "constructor", kind, support=[-0.5, 0.5], weights=None, method="quad")
            support = p["support"] if isinstance(p["support"], list) else [p["support"]]
            weights = p["weights"] or [1.0 / len(support)] * len(support)
            weights = weights if isinstance(weights, list) else [weights]
            return TTestEProcess(tuple(map(float, support)), tuple(map(float, weights)), str(p["method"])), "real"
        if kind in ("compression", "compress"):
            p = _take(params, "constructor", kind, coder="kt")
            return CompressionEProcess(_build_coder(p["coder"], external)), "binary"
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"constructor: {exc}") from None
    raise ConfigError(f"constructor: unknown kind {kind!r}")


def _build_coder(name, external=None):
    if name == "kt":
        return "kt"
    if name == "zlib":
        return zlib_adapter()
    if name == "external":
        if external is None:
            raise ConfigError("external_compressor: coder 'external' needs --external-compressor")
        return external
    raise ConfigError(f"coder: unknown coder {name!r} (kt, zlib, external)")


def _check_domains(model_domain, constructor_domain):
    if _DOMAIN_RANK[model_domain] > _DOMAIN_RANK[constructor_domain]:
        raise ConfigError(f"constructor: needs {constructor_domain} data but the model produces {model_domain} data")


def build_rule(spec, horizon):
    if spec is None:
        return StoppingRule.fixed(horizon)
    kind, params = parse_spec(spec, "rule")
    try:
        if kind == "fixed":
            p = _take(params, "rule", kind, n=horizon)
            return StoppingRule.fixed(int(p["n"]))
        if kind == "first-crossing":
            p = _take(params, "rule", kind, threshold=20.0, cap=horizon)
            return StoppingRule.first_crossing(float(p["threshold"]), int(p["cap"]))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"rule: {exc}") from None
    raise ConfigError(f"rule: unknown kind {kind!r} (fixed, first-crossing)")


# commands ---------------------------------------------------------------------------

def _sim_config(cfg):
    try:
        return SimConfig(seed=cfg["seed"], reps=cfg["reps"], horizon=cfg["horizon"],
                         alpha=cfg["alpha"], threads=cfg["threads"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from None


def _report_row(name, report):
    return {"name": name, "estimate": report.estimate, "std_error": report.std_error,
            "reps": report.reps, "seed": report.seed}


def _named(name, report):
    return dict(report.to_dict(), name=name)


def _external(cfg):
    if cfg["external_compressor"] is None:
        return None
    if cfg["compressor_mode"] not in ("bytes", "count"):
        raise ConfigError(f"compressor_mode: expected bytes or count, got {cfg['compressor_mode']!r}")
    return external_adapter(cfg["external_compressor"], cfg["compressor_mode"])


def _model_and_constructor(cfg):
    model, m_dom = build_model(cfg["model"])
    constructor, c_dom = build_constructor(cfg["constructor"], _external(cfg))
    _check_domains(m_dom, c_dom)
    return model, constructor


def _cmd_validate(cfg):
    sim = _sim_config(cfg)
    model, constructor = _model_and_constructor(cfg)
    rule = build_rule(cfg["rule"], sim.horizon)
    try:
        report = mc_stopped_mean(model, constructor, rule, sim)
    except ValueError as exc:
        if isinstance(exc, (ConfigError, DataError)):
            raise
        raise ConfigError(f"rule: {exc}") from None
    return [_named("stopped_mean", report)], [_report_row("stopped_mean", report)]


def _cmd_ville(cfg):
    sim = _sim_config(cfg)
    model, constructor = _model_and_constructor(cfg)
    report = ville_coverage(model, constructor, sim.alpha, sim.horizon, sim)
    return [_named("coverage", report)], [_report_row("coverage", report)]


def _cmd_growth(cfg):
    sim = _sim_config(cfg)
    model, constructor = _model_and_constructor(cfg)
    base = {"e": math.e, "2": 2.0, 2: 2.0}.get(cfg["base"])
    if base is None:
        raise ConfigError(f"base: expected 'e' or 2, got {cfg['base']!r}")
    report = growth_rate(model, constructor, sim.horizon, sim, base=base)
    return [_named("growth_rate", report)], [_report_row("growth_rate", report)]


def _cmd_replay(cfg):
    sim = _sim_config(cfg)
    name = cfg["scenario"]
    if name not in SCENARIOS:
        raise ConfigError(f"scenario: unknown scenario {name!r} ({', '.join(sorted(SCENARIOS))})")
    kind = SCENARIOS[name]
    params = dict(cfg["params"] or {})
    params.setdefault("alpha", sim.alpha)
    try:
        spec = ScenarioSpec(kind, **params)
    except TypeError as exc:
        raise ConfigError(f"params: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from None
    run_fn = {"stop-when-significant": p_hacking_replay, "two-batch-continuation": two_batch_replay,
              "two-ones-in-a-row": two_ones_replay}[kind]
    bundle = run_fn(spec, sim)
    return ([_named(k, r) for k, r in bundle.items()], [_report_row(k, r) for k, r in bundle.items()])


def _cmd_glr(cfg):
    sim = _sim_config(cfg)
    params = dict(cfg["params"] or {})
    unknown = set(params) - {"max_n", "sigma"}
    if unknown:
        raise ConfigError(f"params: unknown parameter(s) {sorted(unknown)} for glr")
    report = glr_inflation(sim, max_n=params.get("max_n"), sigma=float(params.get("sigma", 1.0)))
    return [_named("glr_crossing", report)], [_report_row("glr_crossing", report)]


def _load_input(cfg):
    if cfg["input"] is None:
        raise ConfigError(f"input: command {cfg['command']!r} needs --input")
    return ingest(cfg["input"], cfg["format"])


def _cmd_calibrate(cfg):
    data = _load_input(cfg)
    p = data.values
    if (p <= 0).any() or (p > 1).any():
        raise DataError("p-values must lie in (0, 1]")
    calibrators = [("mixture", MIXTURE_CALIBRATOR)]
    try:
        calibrators += [(f"power-{float(k):g}", power_calibrator(float(k))) for k in cfg["kappas"]]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"kappas: {exc}") from None
    results, rows = [], []
    for name, cal in calibrators:
        check = verify_calibrator(cal)
        e = cal.evaluate(p)
        product = calibrated_eprocess(p, cal)
        results.append({"name": name, "kind": cal.kind, "params": cal.params, "evalues": e.tolist(),
                        "product": product.final, "admissible": check.passed,
                        "monotone": check.monotone, "integral": check.integral})
        rows += [{"name": name, "index": i + 1, "p": float(pi), "e": float(ei)} for i, (pi, ei) in enumerate(zip(p, e))]
    combined = fisher_combine(p)
    results.append({"name": "fisher", "pvalue": combined, "count": int(p.size)})
    rows.append({"name": "fisher", "index": int(p.size), "p": combined, "e": None})
    return results, rows


def _cmd_compress(cfg):
    data = _load_input(cfg)
    bits = data.values
    if not np.all((bits == 0) | (bits == 1)):
        raise DataError("compress needs binary data (0/1)")
    coder = _build_coder(cfg["coder"], _external(cfg))
    coder = KT if coder == "kt" else coder
    trace = compression_eprocess(bits, coder)
    log2_capital = (trace.log_capital / math.log(2.0)).tolist()
    result = {"name": "trace", "coder": coder.name, "length": len(trace),
              "capital": trace.capital.tolist(), "log2_capital": log2_capital,
              "final_capital": trace.final if len(trace) else 1.0,
              "final_log2_capital": log2_capital[-1] if log2_capital else 0.0}
    if coder is KT:
        result["code_length_bits"] = -kt_log2prob(bits)
    rows = [{"name": "trace", "t": t + 1, "bit": int(b), "capital": c, "log2_capital": lc}
            for t, (b, c, lc) in enumerate(zip(bits, trace.capital, log2_capital))]
    return [result], rows


_HANDLERS = {"validate": _cmd_validate, "ville": _cmd_ville, "growth": _cmd_growth, "replay": _cmd_replay,
             "calibrate": _cmd_calibrate, "compress": _cmd_compress, "glr": _cmd_glr}


def effective_config(file_cfg=None, flags=None) -> dict:
    """Defaults, overridden by the config file, overridden by flags (``None`` flags are unset)."""
    cfg = dict(DEFAULTS)
    file_cfg = dict(file_cfg or {})
    unknown = set(file_cfg) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"config: unknown key(s) {sorted(unknown)}")
    cfg.update(file_cfg)
    cfg.update({k: v for k, v in (flags or {}).items() if v is not None})
    if cfg["command"] not in COMMANDS:
        raise ConfigError(f"command: unknown command {cfg['command']!r} ({', '.join(COMMANDS)})")
    for key, value in _COMMAND_DEFAULTS.get(cfg["command"], {}).items():
        if cfg[key] is None:
            cfg[key] = value
    if cfg["command"] == "replay" and cfg["scenario"] is None:
        raise ConfigError("scenario: replay needs a scenario name")
    if not isinstance(cfg["params"], dict):
        raise ConfigError("params: expected an object")
    if cfg["table"] and not cfg["out"]:
        raise ConfigError("table: --table needs --out")
    return cfg


def run(cfg: dict) -> tuple[dict, list]:
    """Execute an effective config; returns ``(report, table rows)``."""
    start = time.perf_counter()
    results, rows = _HANDLERS[cfg["command"]](cfg)
    report = {"config": cfg, "results": results, "wall_time": time.perf_counter() - start,
              "version": __version__}
    return report, rows


def _write_table(rows, path):
    columns = list(dict.fromkeys(k for row in rows for k in row))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_format_float(v) if isinstance(v, float) else v) for k, v in row.items()})
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def build_parser():
    parser = argparse.ArgumentParser(prog="evlab", description="E-value and e-process experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("scenario", nargs="?", default=None,
                        help="replay only: p-hacking, two-batch or two-ones")
    parser.add_argument("--config", help="JSON file with configuration keys")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--reps", type=int)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--out", help="report path (default: stdout)")
    parser.add_argument("--table", action="store_true", default=None,
                        help="also write a CSV table next to the report")
    parser.add_argument("--model", help="e.g. bernoulli:theta=0.5 or a JSON object")
    parser.add_argument("--constructor", help="e.g. lr:null=0.5,alt=0.7 or a JSON object")
    parser.add_argument("--rule", help="fixed:n=100 or first-crossing:threshold=20,cap=1000")
    parser.add_argument("--input", help="CSV or JSONL data file")
    parser.add_argument("--format", choices=("csv", "jsonl"))
    parser.add_argument("--coder", help="kt, zlib or external")
    parser.add_argument("--external-compressor", dest="external_compressor",
                        help="command run per input with the framed bytes on stdin")
    parser.add_argument("--compressor-mode", dest="compressor_mode", choices=("count", "bytes"))
    parser.add_argument("--kappa", dest="kappas", type=float, action="append",
                        help="power calibrator exponent (repeatable)")
    parser.add_argument("--base", help="growth: logarithm base, e or 2")
    parser.add_argument("--param", action="append", default=None, metavar="KEY=VALUE",
                        help="scenario parameter, e.g. max_n=1000 or batch_sizes=50;30")
    return parser


def _params_from_flags(items):
    if items is None:
        return None
    params = {}
    for item in items:
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"params: expected KEY=VALUE, got {item!r}")
        params[key.strip()] = _coerce(value)
    return params


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = {}
        if args.config:
            try:
                file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config: invalid JSON at line {exc.lineno} ({exc.msg})") from None
            if not isinstance(file_cfg, dict):
                raise ConfigError("config: expected a JSON object")
        flags = {k: v for k, v in vars(args).items() if k not in ("config", "param")}
        flags["params"] = _params_from_flags(args.param)
        cfg = effective_config(file_cfg, flags)
        report, rows = run(cfg)
        text = canonical_json(report) + "\n"
        if cfg["out"]:
            Path(cfg["out"]).write_text(text, encoding="utf-8")
            if cfg["table"]:
                _write_table(rows, Path(cfg["out"]).with_suffix(".csv"))
        else:
            sys.stdout.write(text)
    except ConfigError as exc:
        print(f"evlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"evlab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"evlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ReplicationError as exc:
        cause = exc.__cause__
        print(f"evlab: {exc}", file=sys.stderr)
        if isinstance(cause, NumericalError):
            return EXIT_NUMERICAL
        if isinstance(cause, DataError):
            return EXIT_DATA
        return EXIT_OTHER
    except AdapterError as exc:
        print(f"evlab: compressor error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
