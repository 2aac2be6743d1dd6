"""Command-line front end with one subcommand per computation.

Exit status:
    0  success
    1  an audit or verified claim failed
    2  usage or configuration error
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .asymptotics import gdof_map_rows, scaled_channel
from .audit import AuditRegime, run_audit
from .detchannel import verify_fixture
from .errors import RegimeViolation, RelayICError, WynerZivInfeasible
from .model import ChannelParams, etw_split
from .regions import (
    cf_rates_order2,
    cf_region_order1,
    hk_ghf_region,
    max_weighted_sum,
    no_relay_hk_region,
    outer_bound_region,
)
from .strategies import (
    af_rates,
    quantizer_cf_order1,
    quantizer_cf_order2,
    quantizer_cf_tin,
    quantizer_ghf_tin,
    quantizer_ghf_weak,
    tin_baseline,
    tin_cf_rates,
    tin_ghf_rates,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SWEEP_VARIABLES = ("snr_db", "g2", "R0", "alpha", "rho")
STRATEGIES = ("ghf", "cf1", "cf2", "af", "baseline", "outer")
MODE_STRATEGIES = {
    "tin": ("ghf", "cf1", "af", "baseline"),
    "hk": ("ghf", "cf1", "cf2", "baseline", "outer"),
}
SWEEP_COLUMNS = ("value", "strategy", "R1", "R2", "sumRate", "improvementSum")
GDOF_COLUMNS = ("alpha1", "alpha2", "rho", "d_ghf", "d_cf1", "d_cf2", "gain_per_bit", "label")


class UsageError(Exception):
    """Bad flags or configuration; maps to exit status 2."""


def fmt(value: Any) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.9g}"
    return str(value)


def emit_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def emit_json(payload: Any) -> str:
    return json.dumps(_json_safe(payload), indent=2, sort_keys=False) + "\n"


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: top level must be a JSON object")
    return data


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers") from None


def _parse_names(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


# Curves of the reference figure: unit direct gains, half-strength cross gains.
DEFAULT_BASE = {"h11": 1.0, "h21": 0.5, "h12": 0.5, "h22": 1.0, "g1": 0.5, "g2": 0.5, "P1": 10.0, "P2": 10.0, "N": 1.0, "R0": 1.0}


@dataclass
class SweepSpec:
    base: ChannelParams
    variable: str
    values: list[float]
    strategies: list[str]
    mode: str = "tin"
    snr_db: float = 60.0
    alpha: float = 0.5
    rho: float = 0.0

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise UsageError(f"variable must be one of {', '.join(SWEEP_VARIABLES)}")
        if not self.values:
            raise UsageError("values must be nonempty")
        if list(self.values) != sorted(self.values):
            raise UsageError("values must be ascending")
        if not self.strategies:
            raise UsageError("at least one strategy is required")
        if self.mode not in MODE_STRATEGIES:
            raise UsageError(f"mode must be one of {', '.join(MODE_STRATEGIES)}")
        allowed = MODE_STRATEGIES[self.mode]
        bad = [s for s in self.strategies if s not in allowed]
        if bad:
            raise UsageError(f"strategies {', '.join(bad)} not available in mode {self.mode!r} (choose from {', '.join(allowed)})")
        if self.variable == "alpha" and not all(0 < v < 1 for v in self.values):
            raise UsageError("alpha values must lie in (0, 1)")
        if self.variable in ("rho", "R0") and any(v < 0 for v in self.values):
            raise UsageError(f"{self.variable} values must be nonnegative")

    def channel_at(self, value: float) -> ChannelParams:
        b = self.base
        if self.variable == "snr_db":
            return b.with_(N=b.h11**2 * b.P1 / 10 ** (value / 10))
        if self.variable == "g2":
            return b.with_(g2=value)
        if self.variable == "R0":
            return b.with_(R0=value)
        snr = 10 ** (self.snr_db / 10)
        if self.variable == "alpha":
            return scaled_channel(b, value, self.rho, snr)
        return scaled_channel(b, self.alpha, value, snr)


def _best_sum_pair(poly) -> tuple[float, float]:
    _, (r1, r2) = max_weighted_sum(poly, 1.0, 1.0)
    return r1, r2


def _tin_pair(params: ChannelParams, strategy: str) -> tuple[float, float]:
    if strategy == "baseline" or params.R0 == 0:
        return tin_baseline(params)
    if strategy == "ghf":
        r = tin_ghf_rates(params, quantizer_ghf_tin(params).q)
    elif strategy == "cf1":
        r = tin_cf_rates(params, quantizer_cf_tin(params).q)
    else:
        r = af_rates(params)
    return r.r1, r.r2


def _hk_pair(params: ChannelParams, strategy: str) -> tuple[float, float]:
    split = etw_split(params)
    if strategy == "outer":
        return _best_sum_pair(outer_bound_region(params))
    if strategy == "baseline" or params.R0 == 0:
        return _best_sum_pair(no_relay_hk_region(params, split))
    if strategy == "ghf":
        return _best_sum_pair(hk_ghf_region(params, split, quantizer_ghf_weak(params, split).q))
    if strategy == "cf1":
        return _best_sum_pair(cf_region_order1(params, split, quantizer_cf_order1(params, split).q))
    return _best_sum_pair(cf_rates_order2(params, split, quantizer_cf_order2(params, split).q))


def cmd_sweep(spec: SweepSpec) -> list[dict]:
    """One row per (value, strategy), in value order then the requested strategy order."""
    pair_fn: Callable[[ChannelParams, str], tuple[float, float]] = _tin_pair if spec.mode == "tin" else _hk_pair
    rows = []
    for value in spec.values:
        params = spec.channel_at(value)
        b1, b2 = pair_fn(params, "baseline")
        for strategy in spec.strategies:
            try:
                r1, r2 = pair_fn(params, strategy)
            except (RegimeViolation, WynerZivInfeasible):
                r1 = r2 = math.nan
            total = r1 + r2
            rows.append(
                {
                    "value": float(value),
                    "strategy": strategy,
                    "R1": r1,
                    "R2": r2,
                    "sumRate": total,
                    "improvementSum": total - (b1 + b2),
                }
            )
    return rows


def cmd_gap_audit(seed: int, count: int, regime: AuditRegime) -> tuple[dict, list[dict]]:
    result = run_audit(seed, count, regime)
    rows = [
        {
            "index": i,
            "snr_db": 10 * math.log10(s.params.h11**2 * s.params.P1 / s.params.N),
            "R0": s.params.R0,
            "maxR0": s.max_r0,
            "delta": s.gap,
            "loss1": s.loss1,
            "loss2": s.loss2,
            "gainMargin": s.min_gain_margin,
        }
        for i, s in enumerate(result.samples)
    ]
    return result.summary(), rows


def gdof_grid(points: int) -> list[float]:
    """``points`` equally spaced interior values of (0, 1)."""
    return [(i + 1) / (points + 1) for i in range(points)]


def cmd_gdof_map(alphas: Sequence[float], rho: float) -> list[dict]:
    return gdof_map_rows(alphas, rho)


def cmd_det_verify(name: str) -> dict:
    return verify_fixture(name)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")

    parser = argparse.ArgumentParser(prog="relayic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", parents=[common], help="rates of each strategy along one parameter")
    sw.add_argument("--variable", choices=SWEEP_VARIABLES)
    sw.add_argument("--values", help="comma-separated ascending values")
    sw.add_argument("--strategies", help=f"comma-separated subset of {','.join(STRATEGIES)}")
    sw.add_argument("--mode", choices=tuple(MODE_STRATEGIES), help="tin: single message per user; hk: rate splitting")

    ga = sub.add_parser("gap-audit", parents=[common], help="random audit of the 1.95-bit gap")
    ga.add_argument("--count", type=int, help="number of admissible channels (default 1000)")

    gm = sub.add_parser("gdof-map", parents=[common], help="GDoF of each strategy over an alpha grid")
    gm.add_argument("--grid", type=int, help="interior grid points per axis (default 9)")
    gm.add_argument("--rho", type=float, help="relay exponent (default 0.25)")

    dv = sub.add_parser("det-verify", parents=[common], help="check a deterministic-channel example")
    dv.add_argument("fixture", nargs="?", help="fixture name: fig1 or fig2")
    return parser


def _sweep_spec(args: argparse.Namespace, cfg: dict) -> SweepSpec:
    known = {"base", "variable", "values", "strategies", "mode", "snr_db", "alpha", "rho"}
    unknown = set(cfg) - known
    if unknown:
        raise UsageError(f"unknown sweep field(s): {', '.join(sorted(unknown))}")
    try:
        base = ChannelParams.from_dict({**DEFAULT_BASE, **cfg.get("base", {})})
    except RelayICError as exc:
        raise UsageError(f"field base: {exc}") from None
    variable = args.variable or cfg.get("variable", "snr_db")
    values = _parse_floats(args.values, "--values") if args.values else [float(v) for v in cfg.get("values", [0, 10, 20, 30, 40, 50, 60])]
    strategies = _parse_names(args.strategies) if args.strategies is not None else list(cfg.get("strategies", ["ghf", "cf1", "af", "baseline"]))
    return SweepSpec(
        base=base,
        variable=variable,
        values=values,
        strategies=strategies,
        mode=args.mode or cfg.get("mode", "tin"),
        snr_db=float(cfg.get("snr_db", 60.0)),
        alpha=float(cfg.get("alpha", 0.5)),
        rho=float(cfg.get("rho", 0.0)),
    )


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.command == "sweep":
            rows = cmd_sweep(_sweep_spec(args, cfg))
            text = emit_csv(SWEEP_COLUMNS, rows) if args.format == "csv" else emit_json(rows)
            _write(text, args.out)
            return EXIT_OK
        if args.command == "gap-audit":
            count = args.count if args.count is not None else int(cfg.pop("count", 1000))
            if count < 0:
                raise UsageError("--count must be nonnegative")
            try:
                regime = AuditRegime.from_dict(cfg)
            except (TypeError, ValueError) as exc:
                raise UsageError(str(exc)) from None
            summary, rows = cmd_gap_audit(args.seed, count, regime)
            if args.format == "csv":
                cols = ("index", "snr_db", "R0", "maxR0", "delta", "loss1", "loss2", "gainMargin")
                text = emit_csv(cols, rows)
            else:
                text = emit_json(summary)
            _write(text, args.out)
            return EXIT_OK if summary["pass"] else EXIT_FAIL
        if args.command == "gdof-map":
            points = args.grid if args.grid is not None else int(cfg.get("grid", 9))
            rho = args.rho if args.rho is not None else float(cfg.get("rho", 0.25))
            if points < 1 or rho < 0:
                raise UsageError("--grid must be positive and --rho nonnegative")
            alphas = [float(a) for a in cfg["alphas"]] if "alphas" in cfg else gdof_grid(points)
            rows = cmd_gdof_map(alphas, rho)
            text = emit_csv(GDOF_COLUMNS, rows) if args.format == "csv" else emit_json(rows)
            _write(text, args.out)
            return EXIT_OK
        name = args.fixture or cfg.get("fixture")
        if not name:
            raise UsageError("det-verify needs a fixture name")
        try:
            report = cmd_det_verify(name)
        except RelayICError as exc:
            raise UsageError(str(exc)) from None
        _write(emit_json(report), args.out)
        return EXIT_OK if report["pass"] else EXIT_FAIL
    except UsageError as exc:
        print(f"relayic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RelayICError as exc:
        print(f"relayic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
