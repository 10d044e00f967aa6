"""Command-line interface.

Subcommands:
    probe analyze|design|bode   divider analysis, synthesis, frequency sweep
    cal fit|eval|invert         calibration-curve fitting and evaluation
    acq replay|power            frame replay and point power computation
    characterize                power-versus-illuminance fit of a run file

Exit codes: 0 success, 1 runtime/domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

from . import acquisition, calibration, dataset, probe, svgchart
from .errors import PlasmaKitError

__all__ = ["main", "build_parser"]


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _load_config(args) -> acquisition.ChannelConfig:
    """Flags override config-file values override built-in defaults."""
    values = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
    for name in ("probe_ratio", "shunt_ohms", "offset_volts", "adc_bits",
                 "adc_fullscale_volts"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return acquisition.ChannelConfig(**values)


def _network_from_args(args) -> probe.ProbeNetwork:
    return probe.ProbeNetwork.uniform(args.n, args.r1, args.c1, args.r0, args.c0)


def _curve_from_args(args) -> calibration.CalibrationCurve:
    if args.curve:
        return calibration.load_curve(args.curve)
    missing = [f for f in ("a0", "a1", "a2", "a3", "kind")
               if getattr(args, f, None) is None]
    if missing:
        raise PlasmaKitError(
            "supply --curve FILE or all of --a0 --a1 --a2 --a3 --kind "
            f"(missing: {', '.join('--' + m for m in missing)})")
    return calibration.CalibrationCurve(
        args.a0, args.a1, args.a2, args.a3,
        input_kind=calibration.InputKind(args.kind))


# ---------------------------------------------------------------- probe

def _cmd_probe_analyze(args) -> int:
    net = _network_from_args(args)
    exact_c0 = probe.compensation_capacitor(net)
    ratio = probe.dc_attenuation(net)
    _print_json({
        "dc_attenuation": ratio,
        "inverse_ratio": 1.0 / ratio,
        "exact_compensation_c0_farads": exact_c0,
        "actual_c0_farads": net.base.capacitance,
        "is_compensated": probe.is_compensated(net, args.tol),
        "compensation_rel_tol": args.tol,
    })
    return 0


def _cmd_probe_design(args) -> int:
    net = probe.design_probe(args.ratio, args.n, args.r1, args.c1)
    _print_json({
        "n": net.n,
        "r1_ohms": net.ladder[0].resistance,
        "c1_farads": net.ladder[0].capacitance,
        "r0_ohms": net.base.resistance,
        "c0_farads": net.base.capacitance,
        "dc_attenuation": probe.dc_attenuation(net),
    })
    return 0


def _cmd_probe_bode(args) -> int:
    net = _network_from_args(args)
    responses = probe.bode_sweep(net, args.fmin, args.fmax, args.points, args.spacing)
    if args.out and args.out.endswith(".svg"):
        freqs = tuple(r.frequency for r in responses)
        svg = svgchart.render_chart(
            [svgchart.Series(freqs, tuple(r.magnitude for r in responses), "magnitude"),
             svgchart.Series(freqs, tuple(r.phase for r in responses), "phase (rad)")],
            title="Probe frequency response", x_label="frequency (Hz)",
            y_label="gain", x_log=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
        print(f"wrote {args.out}")
    elif args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            probe.write_sweep_csv(responses, fh)
        print(f"wrote {args.out}")
    else:
        probe.write_sweep_csv(responses, sys.stdout)
    return 0


# ------------------------------------------------------------------ cal

def _cmd_cal_fit(args) -> int:
    samples = calibration.read_samples_csv(args.infile)
    kind = calibration.InputKind(args.kind)
    if args.trim:
        curve, kept, trimmed = calibration.trim_refit(samples, kind)
    else:
        curve, kept, trimmed = calibration.fit_log_cubic(samples, kind), samples, 0
    stats = calibration.fit_residuals(curve, kept)
    if args.out:
        calibration.save_curve(curve, args.out)
    if args.plot:
        xs = tuple(s.input for s in samples)
        grid = _log_grid(min(xs), max(xs), 200)
        svg = svgchart.render_chart(
            [svgchart.Series(xs, tuple(s.illuminance for s in samples), "data", style="dots"),
             svgchart.Series(grid, tuple(calibration.lux_from_input(curve, x) for x in grid),
                             "fit")],
            title="Calibration fit", x_label=f"input ({args.kind})",
            y_label="illuminance (lux)", x_log=True, y_log=True)
        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write(svg)
    _print_json({**calibration.curve_to_dict(curve), **stats,
                 "trimmed_count": trimmed})
    return 0


def _cmd_cal_eval(args) -> int:
    curve = _curve_from_args(args)
    lux = calibration.lux_from_input(curve, args.input)
    if not curve.covers(args.input):
        print(f"warning: input {args.input} is outside the fitted range "
              f"{list(curve.input_range)}; extrapolating", file=sys.stderr)
    _print_json({"input": args.input, "kind": curve.input_kind.value, "lux": lux})
    return 0


def _cmd_cal_invert(args) -> int:
    curve = _curve_from_args(args)
    x = calibration.input_from_lux(curve, args.lux)
    if not curve.covers(x):
        print(f"warning: result {x} is outside the fitted range "
              f"{list(curve.input_range)}; extrapolating", file=sys.stderr)
    _print_json({"lux": args.lux, "kind": curve.input_kind.value, "input": x})
    return 0


def _log_grid(lo: float, hi: float, points: int) -> tuple[float, ...]:
    if hi <= lo:
        return (lo,) * points
    a, b = math.log(lo), math.log(hi)
    return tuple(math.exp(a + (b - a) * i / (points - 1)) for i in range(points))


# ------------------------------------------------------------------ acq

def _cmd_acq_power(args) -> int:
    _print_json({"v_volts": args.v, "i_amps": args.i,
                 "p_watts": acquisition.instantaneous_power(args.v, args.i)})
    return 0


def _cmd_acq_replay(args) -> int:
    cfg = _load_config(args)
    curve = calibration.load_curve(args.curve) if args.curve else None
    diagnostics: list = []
    samples = acquisition.replay_stream(args.infile, cfg, curve,
                                        strict=args.strict, diagnostics=diagnostics)
    for err in diagnostics:
        print(f"warning: {err}", file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            acquisition.write_samples_csv(samples, fh)
        print(f"wrote {args.out} ({len(samples)} samples)")
    else:
        acquisition.write_samples_csv(samples, sys.stdout)
    return 0


# -------------------------------------------------------- characterize

def _cmd_characterize(args) -> int:
    run = dataset.load_run(args.infile)
    char = dataset.characterize(run, trim=args.trim, ignition_i_min=args.i_min)
    if args.out:
        dataset.save_characterization(char, args.out)
    if args.plot:
        post = [s for s in run.samples if s.p_watts > 0 and s.lux and s.lux > 0]
        ps = tuple(s.p_watts for s in post)
        grid = _log_grid(char.input_range[0], char.input_range[1], 200)
        svg = svgchart.render_chart(
            [svgchart.Series(ps, tuple(s.lux for s in post), "data", style="dots"),
             svgchart.Series(grid, tuple(calibration.lux_from_input(char.curve, p)
                                         for p in grid), "fit")],
            title="Plasma power vs illuminance", x_label="power (W)",
            y_label="illuminance (lux)", x_log=True, y_log=True)
        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write(svg)
    _print_json(dataset.characterization_to_dict(char))
    return 0


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plasmakit",
        description="Low-cost plasma diagnostics: probe analysis, sensor "
                    "calibration, acquisition replay, characterization.")
    sub = parser.add_subparsers(dest="command", required=True)

    # probe
    p_probe = sub.add_parser("probe", help="RC-ladder high-voltage probe tools")
    probe_sub = p_probe.add_subparsers(dest="subcommand", required=True)

    def add_network_flags(p, with_c0=True):
        p.add_argument("--n", type=int, required=True, help="ladder stage count")
        p.add_argument("--r1", type=float, required=True, help="ladder resistance (ohms)")
        p.add_argument("--c1", type=float, required=True, help="ladder capacitance (farads)")
        if with_c0:
            p.add_argument("--r0", type=float, required=True, help="base resistance (ohms)")
            p.add_argument("--c0", type=float, required=True, help="base capacitance (farads)")

    pa = probe_sub.add_parser("analyze", help="ratio, compensation, verdict")
    add_network_flags(pa)
    pa.add_argument("--tol", type=float, default=0.10,
                    help="relative compensation tolerance (default 0.10)")
    pa.set_defaults(func=_cmd_probe_analyze)

    pd = probe_sub.add_parser("design", help="synthesize a compensated probe")
    pd.add_argument("--ratio", type=float, required=True, help="target DC ratio in (0,1)")
    pd.add_argument("--n", type=int, required=True)
    pd.add_argument("--r1", type=float, required=True)
    pd.add_argument("--c1", type=float, required=True)
    pd.set_defaults(func=_cmd_probe_design)

    pb = probe_sub.add_parser("bode", help="frequency sweep to CSV or SVG")
    add_network_flags(pb)
    pb.add_argument("--fmin", type=float, default=1.0)
    pb.add_argument("--fmax", type=float, default=1e7)
    pb.add_argument("--points", type=int, default=200)
    pb.add_argument("--spacing", choices=["log", "linear"], default="log")
    pb.add_argument("--out", help="output path (.csv or .svg); default stdout CSV")
    pb.set_defaults(func=_cmd_probe_bode)

    # cal
    p_cal = sub.add_parser("cal", help="illuminance calibration curves")
    cal_sub = p_cal.add_subparsers(dest="subcommand", required=True)

    def add_curve_flags(p):
        p.add_argument("--curve", help="curve JSON file")
        p.add_argument("--a0", type=float)
        p.add_argument("--a1", type=float)
        p.add_argument("--a2", type=float)
        p.add_argument("--a3", type=float)
        p.add_argument("--kind", choices=["voltage", "power"])

    cf = cal_sub.add_parser("fit", help="fit a log-cubic curve to samples")
    cf.add_argument("--in", dest="infile", required=True, help="CSV with header input,lux")
    cf.add_argument("--out", help="curve JSON output path")
    cf.add_argument("--kind", choices=["voltage", "power"], default="voltage")
    cf.add_argument("--trim", action="store_true", help="3-sigma trim-and-refit pass")
    cf.add_argument("--plot", help="SVG output path")
    cf.set_defaults(func=_cmd_cal_fit)

    ce = cal_sub.add_parser("eval", help="input -> lux")
    add_curve_flags(ce)
    ce.add_argument("--input", type=float, required=True)
    ce.set_defaults(func=_cmd_cal_eval)

    ci = cal_sub.add_parser("invert", help="lux -> input")
    add_curve_flags(ci)
    ci.add_argument("--lux", type=float, required=True)
    ci.set_defaults(func=_cmd_cal_invert)

    # acq
    p_acq = sub.add_parser("acq", help="acquisition pipeline")
    acq_sub = p_acq.add_subparsers(dest="subcommand", required=True)

    ap = acq_sub.add_parser("power", help="p = v * i")
    ap.add_argument("--v", type=float, required=True, help="needle voltage (V)")
    ap.add_argument("--i", type=float, required=True, help="plasma current (A)")
    ap.set_defaults(func=_cmd_acq_power)

    ar = acq_sub.add_parser("replay", help="convert a frame CSV to samples")
    ar.add_argument("--in", dest="infile", required=True)
    ar.add_argument("--out", help="samples CSV output path; default stdout")
    ar.add_argument("--config", help="ChannelConfig JSON file")
    ar.add_argument("--curve", help="light-sensor curve JSON for the lux column")
    ar.add_argument("--strict", action="store_true", help="abort on first bad row")
    for name in ("probe_ratio", "shunt_ohms", "offset_volts", "adc_fullscale_volts"):
        ar.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    ar.add_argument("--adc-bits", dest="adc_bits", type=int)
    ar.set_defaults(func=_cmd_acq_replay)

    # characterize
    pc = sub.add_parser("characterize", help="power vs illuminance fit of a run")
    pc.add_argument("--in", dest="infile", required=True, help="engineering CSV run file")
    pc.add_argument("--out", help="characterization JSON output path")
    pc.add_argument("--plot", help="scatter + fitted curve SVG output path")
    pc.add_argument("--trim", action="store_true", help="3-sigma trim-and-refit pass")
    pc.add_argument("--i-min", dest="i_min", type=float, default=1e-3,
                    help="ignition current threshold in amps (default 1e-3)")
    pc.set_defaults(func=_cmd_characterize)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PlasmaKitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
