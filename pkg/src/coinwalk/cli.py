"""Command-line front end: ``coinwalk simulate | asymptote | reproduce``."""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import io as cio
from .channel import dephasing_channel
from .coin import MultiCoinSpec, hadamard_coin, load_coin
from .errors import CoinwalkError, ConfigError, SingularOnSubspace
from .evolve import MomentSeries, simulate_density, simulate_pure
from .kspace import (KGrid, decoherent_asymptotic_slope, dephasing_variance_slope, fit_growth,
                     kspace_moments, multicoin_variance_coefficient, unitary_asymptotic_coefficient)

MAX_DENSITY_STEPS = 400
FIG1_COINS = (1, 2, 3, 4, 5)
FIG2_THETAS = ("pi/16", "pi/8", "3pi/16", "pi/4")

_PI_EXPR = re.compile(r"^\s*(?:([0-9]*\.?[0-9]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$")


def parse_angle(text) -> float:
    """Radians from a number or a multiple of pi such as ``pi/8`` or ``3*pi/16``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_EXPR.match(str(text))
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot read angle {text!r}") from None


def parse_initial(text):
    """``R``, ``L``, ``symmetric`` or comma-separated complex amplitudes (renormalized)."""
    if text is None or isinstance(text, (list, tuple)):
        return text
    text = str(text).strip()
    if text in ("R", "L", "symmetric"):
        return text
    try:
        amps = np.array([complex(tok.strip().replace("i", "j")) for tok in text.split(",")])
    except ValueError:
        raise ConfigError(f"cannot read initial state {text!r}") from None
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ConfigError("initial state is the zero vector")
    return amps / nrm


def parse_window(text):
    if text is None or isinstance(text, (list, tuple)):
        return None if text is None else (int(text[0]), int(text[1]))
    try:
        lo, hi = str(text).split(":")
        return int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"window must look like LO:HI, got {text!r}") from None


@dataclass
class RunConfig:
    mode: str = "unitary"
    coins: int = 1
    theta: float | None = None
    steps: int = 100
    initial: object = "R"
    method: str = "direct"
    out: str | None = None
    format: str | None = None
    kgrid: int | None = None
    window: tuple | None = None
    coin_file: str | None = None
    max_density_steps: int = MAX_DENSITY_STEPS

    def validate(self) -> "RunConfig":
        if self.mode not in ("unitary", "dephasing"):
            raise ConfigError(f"mode must be unitary or dephasing, got {self.mode!r}")
        if self.mode == "dephasing" and self.theta is None:
            raise ConfigError("dephasing mode needs --theta")
        if self.mode == "unitary" and self.theta is not None:
            raise ConfigError("--theta only applies to dephasing mode")
        if int(self.coins) < 1:
            raise ConfigError(f"--coins must be at least 1, got {self.coins}")
        if int(self.steps) < 1:
            raise ConfigError(f"--steps must be at least 1, got {self.steps}")
        if self.method not in ("direct", "kspace", "both"):
            raise ConfigError(f"method must be direct, kspace or both, got {self.method!r}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.coin_file is not None and self.coins != 1:
            raise ConfigError("--coin-file and --coins > 1 cannot be combined")
        self.coins, self.steps = int(self.coins), int(self.steps)
        return self

    @property
    def out_format(self) -> str:
        if self.format:
            return self.format
        if self.out and self.out.endswith(".json"):
            return "json"
        return "csv"

    def echo(self) -> dict:
        d = asdict(self)
        if isinstance(d["initial"], np.ndarray):
            d["initial"] = [[z.real, z.imag] for z in d["initial"]]
        return d

    def walk(self):
        if self.coin_file:
            return load_coin(self.coin_file)
        return hadamard_coin() if self.coins == 1 else MultiCoinSpec(self.coins)

    def channel(self):
        return dephasing_channel(self.theta) if self.mode == "dephasing" else None

    def fit_model(self) -> str:
        return "quadratic" if self.mode == "unitary" else "linear"

    def target(self):
        if self.mode == "unitary" and not self.coin_file:
            return multicoin_variance_coefficient(self.coins)
        if self.mode == "dephasing" and self.theta > 0:
            return dephasing_variance_slope(self.theta)
        return None


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the optional JSON config file, then explicit flags."""
    merged: dict = {}
    if getattr(args, "config", None):
        try:
            merged.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    names = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - names
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    for name in names:
        val = getattr(args, name, None)
        if val is not None:
            merged[name] = val
    if merged.get("theta") is not None:
        merged["theta"] = parse_angle(merged["theta"])
    merged["initial"] = parse_initial(merged.get("initial", "R"))
    merged["window"] = parse_window(merged.get("window"))
    return RunConfig(**merged).validate()


def _discrepancy(a: MomentSeries, b: MomentSeries) -> np.ndarray:
    return np.max(np.abs(np.stack([a.mean - b.mean, a.second_moment - b.second_moment,
                                   a.variance - b.variance])), axis=0)


def run_simulate(cfg: RunConfig) -> dict:
    """Run the configured method(s); returns series, discrepancy and optional fit."""
    walk, channel = cfg.walk(), cfg.channel()
    out: dict = {"config": cfg.echo(), "series": [], "discrepancy": None}
    if cfg.method in ("direct", "both"):
        if cfg.mode == "unitary":
            out["series"].append(simulate_pure(walk, cfg.steps, cfg.initial))
        else:
            if cfg.steps > cfg.max_density_steps:
                raise ConfigError(
                    f"density evolution is capped at {cfg.max_density_steps} steps; "
                    "use --method kspace for longer horizons")
            out["series"].append(simulate_density(walk, channel, cfg.steps, cfg.initial))
    if cfg.method in ("kspace", "both"):
        grid = KGrid(cfg.kgrid) if cfg.kgrid else None
        out["series"].append(kspace_moments(walk, channel, cfg.steps, cfg.initial, grid))
    for s in out["series"]:
        s.validate()
    if cfg.method == "both":
        out["discrepancy"] = _discrepancy(out["series"][0], out["series"][1])
    if cfg.window is not None:
        coef, resid = fit_growth(out["series"][0], cfg.window, cfg.fit_model())
        out["fit"] = {"model": cfg.fit_model(), "window": list(cfg.window), "coefficient": coef,
                      "residual": resid, "target": cfg.target()}
    return out


def run_asymptote(cfg: RunConfig, kgrid: int | None = None) -> dict:
    """Closed-form long-time coefficient plus its numerical wavenumber-space counterpart."""
    walk = cfg.walk()
    grid = KGrid(kgrid or cfg.kgrid) if (kgrid or cfg.kgrid) else None
    if cfg.mode == "unitary":
        est = unitary_asymptotic_coefficient(walk, cfg.initial, grid)
        closed = cfg.target()
        model, order = "unitary-multicoin", "quadratic"
        numeric = est.leading_coefficient
        extra = {"drift": est.meta["drift"], "residual": est.residual}
    else:
        closed = cfg.target()
        model, order = "decoherent-dephasing", "linear"
        try:
            est = decoherent_asymptotic_slope(walk, cfg.channel(), grid)
        except SingularOnSubspace as exc:
            raise SingularOnSubspace(
                f"{exc}; at theta={cfg.theta:g} the long-time linear law breaks down (theta -> 0)") from None
        numeric = est.leading_coefficient
        extra = {"residual": est.residual}
    return {"config": cfg.echo(), "model": model, "order": order,
            "leading_coefficient": closed if closed is not None else numeric,
            "closed_form": closed, "numerical": numeric, **extra}


def run_reproduce(figure: str, outdir: Path, steps: int | None = None) -> dict:
    """Write plot-ready data for one figure and return its summary."""
    outdir.mkdir(parents=True, exist_ok=True)
    rows, curves = [], {}
    if figure == "fig1":
        steps = steps or 100
        for m in FIG1_COINS:
            walk = hadamard_coin() if m == 1 else MultiCoinSpec(m)
            series = simulate_pure(walk, steps)
            series.validate()
            curves[f"M{m}"] = series
            coef, resid = fit_growth(series, None, "quadratic")
            target = multicoin_variance_coefficient(m)
            eig = unitary_asymptotic_coefficient(walk, "R", KGrid(512)).leading_coefficient
            rows.append({"coins": m, "fitted": coef, "fit_residual": resid, "target": target,
                         "eigen_coefficient": eig, "relative_error": abs(coef - target) / target})
    elif figure == "fig2":
        steps = steps or 400
        for label in FIG2_THETAS:
            theta = parse_angle(label)
            ch = dephasing_channel(theta)
            series = kspace_moments(hadamard_coin(), ch, steps)
            series.validate()
            curves[label.replace("/", "_")] = series
            coef, resid = fit_growth(series, None, "linear")
            target = dephasing_variance_slope(theta)
            res = decoherent_asymptotic_slope(hadamard_coin(), ch).leading_coefficient
            rows.append({"theta": label, "theta_rad": theta, "fitted": coef, "fit_residual": resid,
                         "target": target, "resolvent_slope": res,
                         "relative_error": abs(coef - target) / target})
    else:
        raise ConfigError(f"unknown figure {figure!r}; use fig1 or fig2")
    for name, series in curves.items():
        with open(outdir / f"{figure}_{name}.csv", "w", encoding="utf-8") as fh:
            cio.write_series_csv(series, fh)
    names = list(curves)
    t = curves[names[0]].t
    with open(outdir / f"{figure}_variance.csv", "w", encoding="utf-8") as fh:
        cio.write_table_csv(["t", *names],
                            ([int(t[i]), *(float(curves[n].variance[i]) for n in names)]
                             for i in range(len(t))), fh)
    summary = {"figure": figure, "steps": steps, "rows": rows}
    (outdir / f"{figure}_summary.json").write_text(cio.dumps(summary))
    return summary


def _emit(cfg: RunConfig, result: dict, stdout) -> None:
    series = result["series"]
    if cfg.out_format == "json":
        payload = {"config": result["config"], "series": [cio.series_to_dict(s) for s in series]}
        if result["discrepancy"] is not None:
            payload["discrepancy"] = result["discrepancy"]
            payload["max_discrepancy"] = float(np.max(result["discrepancy"]))
        if "fit" in result:
            payload["fit"] = result["fit"]
        text = cio.dumps(payload)
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            stdout.write(text)
        return
    if not cfg.out:
        cio.write_series_csv(series[0], stdout)
        return
    out = Path(cfg.out)
    with open(out, "w", encoding="utf-8") as fh:
        cio.write_series_csv(series[0], fh)
    stem = out.with_suffix("")
    for s in series[1:]:
        with open(f"{stem}.{s.method}.csv", "w", encoding="utf-8") as fh:
            cio.write_series_csv(s, fh)
    meta = {"config": result["config"], "methods": [s.method for s in series],
            "residuals": {s.method: s.residual for s in series}}
    if result["discrepancy"] is not None:
        with open(f"{stem}.discrepancy.csv", "w", encoding="utf-8") as fh:
            cio.write_table_csv(["t", "max_abs_discrepancy"],
                                zip(series[0].t.tolist(), result["discrepancy"].tolist()), fh)
        meta["max_discrepancy"] = float(np.max(result["discrepancy"]))
    if "fit" in result:
        meta["fit"] = result["fit"]
    Path(f"{stem}.meta.json").write_text(cio.dumps(meta))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, "", 2)


def _fail(kind: str, message: str, hint: str, code: int = 1):
    record = {"error": kind, "message": message}
    if hint:
        record["hint"] = hint
    sys.stderr.write(json.dumps(record) + "\n")
    sys.exit(code)


def _run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of run settings; flags override it")
    p.add_argument("--mode", choices=("unitary", "dephasing"))
    p.add_argument("--coins", type=int, help="number of cyclically flipped Hadamard coins (M)")
    p.add_argument("--theta", help="dephasing angle in radians, e.g. 0.39 or pi/8")
    p.add_argument("--steps", type=int, help="horizon t")
    p.add_argument("--initial", help="R, L, symmetric, or comma-separated complex amplitudes")
    p.add_argument("--coin-file", dest="coin_file", help="plain-text coin description")
    p.add_argument("--kgrid", type=int, help="k-grid size (at least 2*steps+1)")
    p.add_argument("--window", help="fit window LO:HI")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"))


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coinwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="moment series by direct evolution, k-space, or both")
    _run_options(p)
    p.add_argument("--method", choices=("direct", "kspace", "both"))
    p.add_argument("--max-density-steps", dest="max_density_steps", type=int)

    p = sub.add_parser("asymptote", help="long-time growth coefficient (closed form and numerical)")
    _run_options(p)

    p = sub.add_parser("reproduce", help="write figure data with target overlays")
    p.add_argument("figure", choices=("fig1", "fig2"))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--steps", type=int)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            summary = run_reproduce(args.figure, Path(args.out), args.steps)
            sys.stdout.write(cio.dumps(summary))
        elif args.command == "simulate":
            cfg = build_config(args)
            _emit(cfg, run_simulate(cfg), sys.stdout)
        else:
            cfg = build_config(args)
            text = cio.dumps(run_asymptote(cfg))
            if cfg.out:
                Path(cfg.out).write_text(text)
            else:
                sys.stdout.write(text)
    except CoinwalkError as exc:
        _fail(type(exc).__name__, str(exc), exc.hint)
    except (ValueError, RuntimeError, OSError) as exc:
        _fail(type(exc).__name__, str(exc), "")
    return 0


if __name__ == "__main__":
    sys.exit(main())
