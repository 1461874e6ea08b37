"""Command-line surface: reproducible file-in/file-out pipelines.

Every subcommand reads CSV/JSON inputs, writes its results atomically
(temp file + rename) into --out, and drops an ``<command>_config.json``
with the fully resolved configuration next to them. Flag precedence is
flags > --config file > built-in defaults; the CURVEFLAT_SEED
environment variable overrides --seed. Failures print a machine-readable
error JSON and exit 1; argparse usage errors exit 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import date as Date, timedelta
from pathlib import Path

from .exceptions import CurveflatError
from .forecasting import (
    calibrate_to_table,
    forecast_geometric,
    forecast_recursive,
    upper_bound,
)
from .ioutil import atomic_write_text, fmt6, round_half_up
from .logistic import LogisticGrowthCurve
from .network import (
    BUILTIN_GREEK_KNOTS,
    BUILTIN_GREEK_PARTITION,
    KnotSource,
    detect_communities,
    knots_from_partition,
    visibility_graph,
)
from .rates import RateBasis, change_rates, mean_change_rate
from .series import parse_csv, validate
from .splines import SplineRegression
from .svgplot import PlotSeries, PlotStyle, emit_plot

DEFAULTS: dict[str, dict] = {
    "common": {"out": ".", "seed": 0, "input": None},
    "validate": {},
    "rates": {"basis": "cumulative", "literal_ratio": False, "window_start": 19, "n": None},
    "knots": {"source": "detected", "days": 43, "column": "new_cases", "edges_csv": False},
    "fit-spline": {"knots": None, "degree": 3, "column": "all_cases"},
    "forecast": {
        "mode": "geometric",
        "horizon": None,
        "m_bar": None,
        "u0": None,
        "m": None,
        "factor": None,
        "increment": None,
        "start": None,
        "calibrate": None,
        "upper_bound_override": None,
        "start_day_id": None,
        "start_date": None,
    },
    "fit-logistic": {"upper_bound": None, "window_start": None, "window_n": 54},
    "report": {"column": "all_cases"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveflat",
        description="Epidemic-curve change rates, knots, spline fits, forecasts, and logistic flattening",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", nargs="?", default=None, help="series CSV")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out", "-o", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("validate", help="check series invariants")
    common(p)

    p = sub.add_parser("rates", help="per-day change rates and windowed mean")
    common(p)
    p.add_argument("--basis", choices=["cumulative", "increment"], default=None)
    p.add_argument(
        "--literal-ratio",
        action="store_const",
        const=True,
        default=None,
        dest="literal_ratio",
        help="divide the earlier value by the later one",
    )
    p.add_argument("--window-start", type=int, default=None, dest="window_start")
    p.add_argument("--n", type=int, default=None)

    p = sub.add_parser("knots", help="visibility-graph communities and spline knots")
    common(p)
    p.add_argument("--source", choices=["detected", "paper_default"], default=None)
    p.add_argument("--days", type=int, default=None, help="prefix length to analyze")
    p.add_argument("--column", choices=["new_cases", "all_cases"], default=None)
    p.add_argument(
        "--edges-csv",
        action="store_const",
        const=True,
        default=None,
        dest="edges_csv",
        help="also export the edge list",
    )

    p = sub.add_parser("fit-spline", help="regression-spline fit with diagnostics")
    common(p)
    p.add_argument("--knots", default=None, help="knot JSON file or comma-separated list")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--column", choices=["new_cases", "all_cases"], default=None)

    p = sub.add_parser("forecast", help="horizon forecast of cumulative counts")
    common(p)
    p.add_argument("--mode", choices=["eq13", "geometric"], default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--m-bar", type=float, default=None, dest="m_bar")
    p.add_argument("--u0", type=float, default=None)
    p.add_argument("--m", type=float, default=None)
    p.add_argument("--factor", type=float, default=None)
    p.add_argument("--increment", type=float, default=None)
    p.add_argument("--start", type=float, default=None)
    p.add_argument("--calibrate", default=None, help="golden forecast CSV")
    p.add_argument(
        "--upper-bound-override", type=float, default=None, dest="upper_bound_override"
    )
    p.add_argument("--start-day-id", type=int, default=None, dest="start_day_id")
    p.add_argument("--start-date", default=None, dest="start_date")

    p = sub.add_parser("fit-logistic", help="bounded logistic flattening fit")
    common(p)
    p.add_argument("--upper-bound", type=float, default=None, dest="upper_bound")
    p.add_argument("--window-start", type=int, default=None, dest="window_start")
    p.add_argument("--window-n", type=int, default=None, dest="window_n")

    p = sub.add_parser("report", help="SVG plots of the case curve and change rates")
    common(p)
    p.add_argument("--column", choices=["new_cases", "all_cases"], default=None)

    return parser


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[args.command])
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValueError("config file must hold a JSON object")
        for key, value in file_cfg.items():
            if key in cfg:
                cfg[key] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    env_seed = os.environ.get("CURVEFLAT_SEED")
    if env_seed is not None:
        cfg["seed"] = int(env_seed)
    cfg["command"] = args.command
    return cfg


def _load_series(cfg: dict):
    if not cfg.get("input"):
        raise ValueError("an input series CSV is required")
    with open(cfg["input"], encoding="utf-8") as fh:
        return parse_csv(fh.read())


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _cmd_validate(cfg: dict, out: Path) -> list[Path]:
    report = validate(_load_series(cfg))
    payload = {
        "ok": report.ok,
        "issues": [
            {"day_id": i.day_id, "rule": i.rule, "message": i.message}
            for i in report.issues
        ],
    }
    return [atomic_write_text(out / "validate_report.json", _json_text(payload))]


def _cmd_rates(cfg: dict, out: Path) -> list[Path]:
    series = _load_series(cfg)
    basis = (
        RateBasis.CUMULATIVE_RATIO
        if cfg["basis"].startswith("cumulative")
        else RateBasis.INCREMENT_RATIO
    )
    rates = change_rates(series, basis, earlier_over_later=bool(cfg["literal_ratio"]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["day_id", "rate", "defined_flag"])
    for day, rate in zip(rates.day_ids, rates.rates):
        w.writerow([day, "" if rate is None else fmt6(rate), int(rate is not None)])
    written = [atomic_write_text(out / "rates.csv", buf.getvalue())]

    window_start = cfg["window_start"]
    if window_start < rates.day_ids[0] or window_start > rates.day_ids[-1]:
        window_start = rates.day_ids[0]
    mean = mean_change_rate(rates, window_start, cfg["n"])
    payload = {
        "value": mean.value,
        "window_start": mean.window_start,
        "n": mean.window_length,
        "excluded": mean.excluded,
    }
    written.append(atomic_write_text(out / "rates_mean.json", _json_text(payload)))
    return written


def _cmd_knots(cfg: dict, out: Path) -> list[Path]:
    written: list[Path] = []
    if cfg["source"] == "paper_default":
        partition = BUILTIN_GREEK_PARTITION
        knots = BUILTIN_GREEK_KNOTS
        source = KnotSource.PAPER_DEFAULT
        graph = None
    else:
        series = _load_series(cfg)
        values = (
            series.increments if cfg["column"] == "new_cases" else series.cumulative
        )
        values = values[: cfg["days"]]
        graph = visibility_graph(values)
        partition = detect_communities(graph, seed=cfg["seed"])
        knots = knots_from_partition(partition)
        source = KnotSource.DETECTED
    payload = {
        "interior_knots": list(knots.interior_knots),
        "communities": [
            {"id": cid, "members": list(partition.members(cid))}
            for cid in range(partition.community_count)
        ],
        "modularity": partition.modularity,
        "source": source.value,
    }
    written.append(atomic_write_text(out / "knots.json", _json_text(payload)))
    if cfg["edges_csv"]:
        if graph is None:
            raise ValueError("--edges-csv requires --source detected")
        lines = ["source,target"] + [f"{a},{b}" for a, b in sorted(graph.edges)]
        written.append(
            atomic_write_text(out / "knots_edges.csv", "\n".join(lines) + "\n")
        )
    return written


def _parse_knots_option(raw: str | None) -> tuple[float, ...]:
    if raw is None:
        return BUILTIN_GREEK_KNOTS.interior_knots
    path = Path(raw)
    if path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict):
            data = data["interior_knots"]
        return tuple(float(k) for k in data)
    return tuple(float(part) for part in raw.split(",") if part.strip())


def _cmd_fit_spline(cfg: dict, out: Path) -> list[Path]:
    series = _load_series(cfg)
    x = series.day_ids
    y = series.cumulative if cfg["column"] == "all_cases" else series.increments
    knots = _parse_knots_option(cfg["knots"])
    model = SplineRegression(degree=cfg["degree"], knots=knots).fit(x, y)
    payload = {
        "degree": cfg["degree"],
        "knots": list(knots),
        "coefficients": [float(c) for c in model.coef_],
        "r_squared": model.r_squared_,
        "loocv": model.loocv_,
        "sigma2": None if math.isnan(model.sigma2_) else model.sigma2_,
        "hat_trace": float(model.hat_diagonal_.sum()),
    }
    written = [atomic_write_text(out / "spline_model.json", _json_text(payload))]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["day_id", "observed", "fitted", "pointwise_sd"])
    for day, obs, fit, var in zip(
        x, y, model.fitted_values_, model.pointwise_variance_
    ):
        sd = math.sqrt(var) if var == var and var >= 0 else float("nan")
        w.writerow([day, obs, fmt6(fit), fmt6(sd)])
    written.append(atomic_write_text(out / "spline_fit.csv", buf.getvalue()))
    return written


def _read_golden_table(path: str) -> tuple[list[float], int | None, Date | None]:
    """Read a golden forecast CSV; returns (values, first day_id, first date)."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"golden table {path} has no rows")
    cols = {name.strip().lower(): name for name in rows[0]}
    value_col = next(
        (cols[c] for c in ("forecast", "value", "all_cases") if c in cols), None
    )
    if value_col is None:
        raise ValueError("golden table needs a 'forecast' (or 'value') column")
    values = [float(r[value_col]) for r in rows]
    day0 = int(rows[0][cols["day_id"]]) if "day_id" in cols else None
    date0 = None
    if "date" in cols and rows[0][cols["date"]].strip():
        date0 = Date.fromisoformat(rows[0][cols["date"]].strip())
    return values, day0, date0


def _cmd_forecast(cfg: dict, out: Path) -> list[Path]:
    series = None
    if cfg.get("input"):
        series = _load_series(cfg)

    start_day_id = cfg["start_day_id"]
    start_date = (
        Date.fromisoformat(cfg["start_date"]) if cfg["start_date"] else None
    )
    if series is not None:
        last = series.records[-1]
        if cfg["start"] is None:
            cfg["start"] = float(last.all_cases)
        if cfg["increment"] is None:
            cfg["increment"] = float(last.new_cases)
        if start_day_id is None:
            start_day_id = last.day_id
        if start_date is None:
            start_date = last.date

    if cfg["calibrate"]:
        golden, day0, date0 = _read_golden_table(cfg["calibrate"])
        params = calibrate_to_table(golden)
        horizon = cfg["horizon"] if cfg["horizon"] is not None else len(golden)
        # anchor the replay so its first row lands on the golden table's
        # first day
        table = forecast_geometric(
            params.start,
            params.first_increment,
            params.daily_factor,
            horizon,
            start_day_id=(day0 - 1) if day0 is not None else 0,
            start_date=(date0 - timedelta(days=1)) if date0 is not None else None,
        )
    elif cfg["mode"] == "geometric":
        if cfg["start"] is None or cfg["increment"] is None or cfg["factor"] is None:
            raise ValueError(
                "geometric mode needs --start, --increment, and --factor "
                "(or an input series plus --factor, or --calibrate)"
            )
        if cfg["horizon"] is None:
            raise ValueError("--horizon is required")
        table = forecast_geometric(
            cfg["start"],
            cfg["increment"],
            cfg["factor"],
            cfg["horizon"],
            start_day_id=start_day_id or 0,
            start_date=start_date,
        )
    else:
        required = ("start", "m_bar", "m", "u0")
        if any(cfg[name] is None for name in required):
            raise ValueError("eq13 mode needs --start, --m-bar, --m, and --u0")
        if cfg["horizon"] is None:
            raise ValueError("--horizon is required")
        table = forecast_recursive(
            cfg["start"],
            cfg["m_bar"],
            cfg["m"],
            cfg["u0"],
            cfg["horizon"],
            start_day_id=start_day_id or 0,
            start_date=start_date,
        )

    written = [atomic_write_text(out / "forecast.csv", table.to_csv())]
    if cfg["m_bar"] is not None or cfg["upper_bound_override"] is not None:
        bound = upper_bound(
            max(table.values()),
            m_bar=cfg["m_bar"],
            u_pb2_override=cfg["upper_bound_override"],
        )
        written.append(
            atomic_write_text(
                out / "forecast_upper_bound.json", _json_text(bound.to_json_dict())
            )
        )
    return written


def _cmd_fit_logistic(cfg: dict, out: Path) -> list[Path]:
    if cfg["upper_bound"] is None:
        raise ValueError("--upper-bound is required")
    series = _load_series(cfg)
    day_ids = series.day_ids
    totals = series.cumulative
    if cfg["window_start"] is not None:
        lo = cfg["window_start"]
        idx = [i for i, d in enumerate(day_ids) if d >= lo]
        if cfg["window_n"] is not None:
            idx = idx[: cfg["window_n"]]
    else:
        n = cfg["window_n"] or len(day_ids)
        idx = list(range(max(0, len(day_ids) - n), len(day_ids)))
    if not idx:
        raise ValueError("empty fit window")
    t = [day_ids[i] for i in idx]
    y = [totals[i] for i in idx]
    model = LogisticGrowthCurve(upper_bound=cfg["upper_bound"]).fit(t, y)
    payload = {
        "r_squared": model.r_squared_,
        "f": model.f_stat_,
        "df1": model.df1_,
        "df2": model.df2_,
        "constant": model.b0_,
        "b1": model.b1_,
        "upper_bound": cfg["upper_bound"],
        "window_start": t[0],
        "window_n": len(t),
        "statistics_scale": "linearized",
    }
    written = [atomic_write_text(out / "logistic_model.json", _json_text(payload))]
    fitted = model.predict(t)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["day_id", "observed", "fitted"])
    for day, obs, fit in zip(t, y, fitted):
        w.writerow([day, obs, fmt6(float(fit))])
    written.append(atomic_write_text(out / "logistic_fit.csv", buf.getvalue()))
    return written


def _cmd_report(cfg: dict, out: Path) -> list[Path]:
    series = _load_series(cfg)
    days = [float(d) for d in series.day_ids]
    totals = [float(v) for v in series.cumulative]
    cases = emit_plot(
        [PlotSeries(label="cumulative cases", x=tuple(days), y=tuple(totals))],
        PlotStyle(title="Infection curve", x_label="day", y_label="cumulative cases"),
    )
    rates = change_rates(series, RateBasis.CUMULATIVE_RATIO)
    defined = [
        (float(d), float(r))
        for d, r in zip(rates.day_ids, rates.rates)
        if r is not None
    ]
    rates_svg = emit_plot(
        [
            PlotSeries(
                label="change rate",
                x=tuple(p[0] for p in defined),
                y=tuple(p[1] for p in defined),
            )
        ],
        PlotStyle(title="Change rates", x_label="day", y_label="rate"),
    )
    return [
        atomic_write_text(out / "report_cases.svg", cases),
        atomic_write_text(out / "report_rates.svg", rates_svg),
    ]


HANDLERS = {
    "validate": _cmd_validate,
    "rates": _cmd_rates,
    "knots": _cmd_knots,
    "fit-spline": _cmd_fit_spline,
    "forecast": _cmd_forecast,
    "fit-logistic": _cmd_fit_logistic,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args)
        out = Path(cfg["out"])
        written = HANDLERS[args.command](cfg, out)
        config_path = atomic_write_text(
            out / f"{args.command.replace('-', '_')}_config.json", _json_text(cfg)
        )
        print(
            json.dumps(
                {"ok": True, "outputs": [str(p) for p in written + [config_path]]}
            )
        )
        return 0
    except (CurveflatError, ValueError, KeyError, OSError) as exc:
        print(
            json.dumps(
                {"error": {"type": type(exc).__name__, "message": str(exc)}}
            )
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
