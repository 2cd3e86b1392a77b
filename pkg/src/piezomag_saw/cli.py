"""Command-line entry point: one subcommand per figure family plus ``verify``.

Tabular commands write CSV (a ``#`` provenance line, then a header row);
scalar reports write JSON. Every number is printed with 12 significant
digits, and nothing time- or host-dependent enters the output, so identical
arguments give byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import __version__, coupling, dynamics, quantize, rayleigh
from .acceptance import LEVELS, format_report, run_acceptance
from .materials import MaterialError, format_materials, material_catalog
from .rayleigh import NumericalError

DIGITS = 12

PROFILE_COLUMNS = ("z_over_lambda", "u1_re", "u1_im", "u3_re", "u3_im", "psi_re", "psi_im")
MAP_COLUMNS = ("l_um", "freq_ghz", "b_xprime_zp_ut", "b_z_zp_ut")
SWEEP_COLUMNS = ("axis_value", "g_abs_hz", "qubit_freq_ghz")
DYNAMICS_COLUMNS = ("t_us", "p_a", "p_b", "concurrence",
                    "alpha_a_re", "alpha_a_im", "alpha_b_re", "alpha_b_im")

SYSTEMS = ("fluxonium", "transmon", "magnon", "nv")
SWEEP_AXES = {"area-um2": ("loop_area_s", 1e-12), "distance-um": ("distance_d", 1e-6),
              "width-um": ("lateral_width_l", 1e-6)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _num(x) -> str:
    return f"{x + 0.0:.{DIGITS}g}"  # + 0.0 folds -0 into 0


def _json_value(x):
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, float):
        return float(_num(x)) if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return _json_value(float(x))


def _provenance(args, params: dict) -> str:
    parts = [f"piezomag-saw {__version__}", f"command={args.command}"]
    if getattr(args, "material", None):
        parts.append(f"material={args.material}")
    parts += [f"{k}={_num(v) if isinstance(v, float) else v}" for k, v in params.items()]
    return " ".join(parts)


def _write(args, text: str) -> None:
    if not args.output:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(args.output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, args.output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_table(args, params, columns, rows) -> None:
    if args.format == "json":
        doc = {"provenance": _provenance(args, params), "columns": list(columns),
               "rows": [[_json_value(float(v)) for v in row] for row in rows]}
        _write(args, json.dumps(doc, indent=1) + "\n")
        return
    lines = ["# " + _provenance(args, params), ",".join(columns)]
    lines += [",".join(_num(float(v)) for v in row) for row in rows]
    _write(args, "\n".join(lines) + "\n")


def _emit_record(args, params, record: dict) -> None:
    if args.format == "csv":
        flat = {k: v for k, v in record.items() if not isinstance(v, (dict, str))}
        _emit_table(args, params, list(flat), [list(flat.values())])
        return
    doc = dict(record)
    doc["provenance"] = _provenance(args, params)
    _write(args, json.dumps(_json_value(doc), indent=1) + "\n")


def _catalog(args):
    try:
        return material_catalog(args.material_file or ())
    except OSError as exc:
        raise UsageError(f"cannot read material file: {exc}") from None


def _material(args):
    catalog = _catalog(args)
    if args.material not in catalog:
        raise UsageError(f"unknown material '{args.material}'; known: {', '.join(sorted(catalog))}")
    return catalog[args.material]


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: '{text}'") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive: '{text}'")
    return value


def _grid(text: str):
    """'a:b:n' -> n evenly spaced values from a to b (n = 1 gives [a])."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got '{text}'") from None
    if n < 1 or not (a > 0 and b > 0):
        raise argparse.ArgumentTypeError(f"range needs positive ends and n >= 1: '{text}'")
    if n == 1:
        return [a]
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def _mode_record(mode: rayleigh.RayleighMode) -> dict:
    return {
        "model": "one_way",
        "freq_hz": mode.frequency_hz,
        "k_rad_m": mode.k,
        "omega_rad_s": mode.omega,
        "v_m_s": mode.v,
        "wavelength_m": mode.wavelength,
        "q_alpha": mode.q_alpha,
        "q_beta": mode.q_beta,
        "theta_rad": mode.theta,
        "gamma_abs": mode.gamma_abs,
        "xi_rad": mode.xi,
        "a_coef": mode.a_coef,
        "tau_rad": mode.tau,
        "a3_coef": mode.a3_coef,
        "boundary_residual": mode.residual,
    }


def cmd_mode(args) -> None:
    m = _material(args)
    mode = rayleigh.mode_at_frequency(m, args.freq_ghz * 1e9)
    _emit_record(args, {"freq_ghz": args.freq_ghz}, _mode_record(mode))


def cmd_profile(args) -> None:
    m = _material(args)
    mode = rayleigh.mode_at_frequency(m, args.freq_ghz * 1e9)
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    zs = [args.zmax_wavelengths * i / (args.samples - 1) for i in range(args.samples)]
    u1, u3, psi = quantize.quantized_field_coefficients(
        mode, m, [z * mode.wavelength for z in zs])
    rows = [(z, a.real, a.imag, b.real, b.imag, c.real, c.imag)
            for z, a, b, c in zip(zs, u1, u3, psi)]
    params = {"freq_ghz": args.freq_ghz, "zmax_wavelengths": args.zmax_wavelengths,
              "samples": args.samples, "units": "per_unit_u0_psi_A_per_m"}
    _emit_table(args, params, PROFILE_COLUMNS, rows)


def cmd_zeropoint(args) -> None:
    m = _material(args)
    mode = rayleigh.mode_at_frequency(m, args.freq_ghz * 1e9)
    qm = quantize.normalize_single_phonon(mode, m, args.width_um * 1e-6)
    record = {
        "u0k_m": qm.u0k,
        "b_xprime_zp_t": qm.b_xprime_zp,
        "b_z_zp_t": qm.b_z_zp,
        "u_zp_m": qm.u_zp,
        "energy_per_phonon_j": qm.energy_per_phonon,
        "convention": quantize.CONVENTION,
    }
    _emit_record(args, {"freq_ghz": args.freq_ghz, "width_um": args.width_um}, record)


def cmd_zeropoint_map(args) -> None:
    m = _material(args)
    rows = []
    for f in args.freq_ghz_range:
        mode = rayleigh.mode_at_frequency(m, f * 1e9)
        for w in args.width_um_range:
            qm = quantize.normalize_single_phonon(mode, m, w * 1e-6)
            rows.append((w, f, qm.b_xprime_zp * 1e6, qm.b_z_zp * 1e6))
    rows.sort(key=lambda r: (r[0], r[1]))
    params = {"freq_ghz_range": args.freq_ghz_range_text, "width_um_range": args.width_um_range_text}
    _emit_table(args, params, MAP_COLUMNS, rows)


def _system_spec(args):
    """Qubit spec and mode frequency (Hz or None) from a preset and/or flags."""
    if args.preset:
        preset = coupling.PRESETS[args.preset]
        spec, freq_hz, width = preset.spec, preset.freq_hz, preset.width
        system = {coupling.Fluxonium: "fluxonium", coupling.Transmon: "transmon",
                  coupling.MagnonFilm: "magnon", coupling.DefectCenter: "nv"}[type(spec)]
        if args.system and args.system != system:
            raise UsageError(f"--preset {args.preset} is a {system} preset, not {args.system}")
    else:
        if not args.system:
            raise UsageError("one of --system or --preset is required")
        system, width, freq_hz = args.system, 1e-6, None
        spec = {
            "fluxonium": coupling.Fluxonium(e_c=1e9, e_j=3e9, e_l=1e9, loop_area_s=1000e-12),
            "transmon": coupling.Transmon(e_c=100e6, e_j=10e9, loop_area_s=1000e-12),
            "magnon": coupling.MagnonFilm(gamma_f=30.59e9, spin_s=0.5, n_spins=1, distance_d=0.1e-6),
            "nv": coupling.DefectCenter(gamma_c=28e9, distance_d=0.1e-6),
        }[system]
    overrides = {}
    fields = {
        "ec_ghz": ("e_c", 1e9), "ej_ghz": ("e_j", 1e9), "el_ghz": ("e_l", 1e9),
        "area_um2": ("loop_area_s", 1e-12), "gamma_ghz_t": ("gamma_f" if system == "magnon" else "gamma_c", 1e9),
        "spin": ("spin_s", 1.0), "n_spins": ("n_spins", 1.0), "distance_um": ("distance_d", 1e-6),
    }
    for flag, (name, scale) in fields.items():
        value = getattr(args, flag)
        if value is None:
            continue
        if not hasattr(spec, name):
            raise UsageError(f"--{flag.replace('_', '-')} does not apply to {system}")
        overrides[name] = value * scale
    spec = coupling.replace(spec, **overrides) if overrides else spec
    if args.freq_ghz is not None:
        freq_hz = args.freq_ghz * 1e9
        if system in ("magnon", "nv"):
            spec = coupling.replace(spec, freq=freq_hz)
    if system in ("magnon", "nv") and freq_hz is None and spec.freq is None:
        raise UsageError(f"{system} needs --freq-ghz (the mode and transition frequency)")
    if system in ("magnon", "nv") and freq_hz is None:
        freq_hz = spec.freq
    if args.width_um is not None:
        width = args.width_um * 1e-6
    return system, spec, freq_hz, width


def cmd_couple(args) -> None:
    m = _material(args)
    system, spec, freq_hz, width = _system_spec(args)
    qm = coupling.resonant_mode(m, spec, width, freq_hz)
    res = coupling.couple(qm, spec)
    record = {
        "system": system,
        "order": res.order,
        "g_re_rad_s": res.g.real,
        "g_im_rad_s": res.g.imag,
        "g_abs_hz": res.g_abs_hz,
        "arg_g_rad": math.atan2(res.g.imag, res.g.real),
        "qubit_freq_ghz": res.qubit_freq / coupling.TWO_PI / 1e9,
        "mode_freq_ghz": qm.mode.frequency_hz / 1e9,
        "detuning_rad_s": res.detuning,
        "width_um": width * 1e6,
        "b_xprime_zp_t": qm.b_xprime_zp,
        "b_z_zp_t": qm.b_z_zp,
    }
    if isinstance(spec, coupling.MagnonFilm):
        record["calibrated_n_s"] = coupling.calibrated_spin_count(qm, spec)
    _emit_record(args, {"system": system, "preset": args.preset or "none"}, record)


def cmd_sweep(args) -> None:
    m = _material(args)
    system, spec, freq_hz, width = _system_spec(args)
    axis, scale = SWEEP_AXES[args.axis]
    values = args.values
    if args.log:
        a, b, n = values[0], values[-1], len(values)
        values = [a * (b / a) ** (i / (n - 1)) for i in range(n)] if n > 1 else [a]
    rows = coupling.sweep_coupling(m, spec, width, axis, [v * scale for v in values], freq_hz)
    rows = [(v, g, f) for v, (_, g, f) in zip(values, rows)]
    params = {"system": system, "axis": args.axis, "range": args.values_text,
              "spacing": "log" if args.log else "linear"}
    _emit_table(args, params, SWEEP_COLUMNS, rows)


def _dynamics_problem(args) -> dynamics.DDEProblem:
    explicit = (args.gamma0_mhz, args.delay_us, args.theta_pi)
    if args.preset:
        if any(x is not None for x in explicit):
            raise UsageError("--preset cannot be combined with --gamma0-mhz/--delay-us/--theta-pi")
        p = dynamics.figure_preset(args.preset)
    else:
        if any(x is None for x in explicit):
            raise UsageError("give --preset or all of --gamma0-mhz, --delay-us, --theta-pi")
        p = dynamics.DDEProblem(gamma0=coupling.TWO_PI * args.gamma0_mhz * 1e6,
                                delay_t=args.delay_us * 1e-6, theta_t=args.theta_pi * math.pi,
                                t_max=1e-6)
    changes = {}
    if args.tmax_us is not None:
        changes["t_max"] = args.tmax_us * 1e-6
    if args.dt_ns is not None:
        changes["dt"] = args.dt_ns * 1e-9
    return dynamics.replace(p, **changes) if changes else p


def cmd_dynamics(args) -> None:
    p = _dynamics_problem(args)
    trace = dynamics.integrate(p)
    n = len(trace.times)
    keep = list(range(0, n, args.every))
    if keep[-1] != n - 1:
        keep.append(n - 1)
    p_a, p_b, conc = trace.p_a, trace.p_b, trace.concurrence
    rows = [(trace.times[i] * 1e6, p_a[i], p_b[i], conc[i], trace.alpha_a[i].real,
             trace.alpha_a[i].imag, trace.alpha_b[i].real, trace.alpha_b[i].imag) for i in keep]
    params = {"preset": args.preset or "none", "gamma0_rad_s": p.gamma0, "delay_s": p.delay_t,
              "theta_rad": p.theta_t, "t_max_s": p.t_max, "every": args.every}
    _emit_table(args, params, DYNAMICS_COLUMNS, rows)


def cmd_materials(args) -> None:
    catalog = _catalog(args)
    if args.action == "list":
        _write(args, "".join(f"{name}\n" for name in sorted(catalog)))
        return
    if not args.name:
        raise UsageError("materials show needs a material name")
    if args.name not in catalog:
        raise UsageError(f"unknown material '{args.name}'; known: {', '.join(sorted(catalog))}")
    _write(args, format_materials([catalog[args.name]]))


def cmd_verify(args) -> int:
    m = _material(args)
    results = run_acceptance(args.level, seed=args.seed, material=m)
    report = format_report(results)
    _write(args, report)
    if args.output:
        sys.stdout.write(report)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="write to this file (atomically) instead of stdout")
    common.add_argument("--format", choices=("csv", "json"),
                        help="output format (default: csv for tables, json for reports)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--material", default="terfenol-D", help="material name (default terfenol-D)")
    common.add_argument("--material-file", action="append", metavar="PATH",
                        help="extra material file (repeatable); $PIEZOMAG_SAW_MATERIALS is also read")

    parser = _Parser(prog="piezomag-saw",
                     description="Surface acoustic waves on a piezomagnetic substrate: "
                                 "mode solver, zero-point fields, couplings and delay dynamics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text, columns=None, **kw):
        desc = help_text
        if columns:
            desc += "\n\nCSV columns: " + ",".join(columns)
        return sub.add_parser(name, parents=[common], help=help_text, description=desc,
                              formatter_class=argparse.RawDescriptionHelpFormatter, **kw)

    p = add("mode", "solve the surface mode and print its parameters (JSON)")
    p.add_argument("--freq-ghz", type=_positive, default=10.0)
    p.set_defaults(func=cmd_mode, kind="record")

    p = add("profile", "depth profiles of u1', u3 and psi per unit surface amplitude", PROFILE_COLUMNS)
    p.add_argument("--freq-ghz", type=_positive, default=10.0)
    p.add_argument("--zmax-wavelengths", type=_positive, default=2.0)
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(func=cmd_profile, kind="table")

    p = add("zeropoint", "single-phonon amplitude and zero-point fields (JSON)")
    p.add_argument("--freq-ghz", type=_positive, default=10.0)
    p.add_argument("--width-um", type=_positive, default=1.0)
    p.set_defaults(func=cmd_zeropoint, kind="record")

    p = add("zeropoint-map", "zero-point surface fields over a width x frequency grid", MAP_COLUMNS)
    p.add_argument("--freq-ghz-range", default="1:10:10", metavar="A:B:N")
    p.add_argument("--width-um-range", default="1:100:100", metavar="A:B:N")
    p.set_defaults(func=cmd_zeropoint_map, kind="table")

    for name, help_text, columns in (
            ("couple", "coupling strength of one system to the resonant mode (JSON)", None),
            ("sweep", "coupling strength along one parameter axis", SWEEP_COLUMNS)):
        p = add(name, help_text, columns)
        p.add_argument("--system", choices=SYSTEMS)
        p.add_argument("--preset", choices=sorted(coupling.PRESETS))
        p.add_argument("--width-um", type=_positive, help="lateral width L (default 1)")
        p.add_argument("--freq-ghz", type=_positive,
                       help="mode frequency (default: the qubit transition; required for magnon/nv)")
        p.add_argument("--ec-ghz", type=_positive, help="charging energy E_C/h")
        p.add_argument("--ej-ghz", type=_positive, help="Josephson energy E_J/h")
        p.add_argument("--el-ghz", type=_positive, help="inductive energy E_L/h (fluxonium)")
        p.add_argument("--area-um2", type=float, help="loop area S")
        p.add_argument("--gamma-ghz-t", type=_positive, help="gyromagnetic ratio, GHz/T")
        p.add_argument("--spin", type=_positive, help="spin s per site (magnon)")
        p.add_argument("--n-spins", type=_positive, help="number of spins N (magnon, default 1)")
        p.add_argument("--distance-um", type=float, help="distance d above the surface")
        if name == "sweep":
            p.add_argument("--axis", choices=sorted(SWEEP_AXES), required=True)
            p.add_argument("--range", dest="values", required=True, metavar="A:B:N",
                           help="axis values in the axis units")
            p.add_argument("--log", action="store_true", help="geometric spacing")
            p.set_defaults(func=cmd_sweep, kind="table")
        else:
            p.set_defaults(func=cmd_couple, kind="record")

    p = add("dynamics", "two-qubit populations and concurrence through the delay line",
            DYNAMICS_COLUMNS)
    p.add_argument("--preset", choices=dynamics.PRESET_NAMES)
    p.add_argument("--gamma0-mhz", type=_positive, help="decay rate into the waveguide, Gamma0/2pi")
    p.add_argument("--delay-us", type=float, help="travel time between the qubits")
    p.add_argument("--theta-pi", type=float, help="propagation phase in units of pi")
    p.add_argument("--tmax-us", type=float, help="end time (default 1 us, or the preset's)")
    p.add_argument("--dt-ns", type=_positive, help="step size (default: automatic)")
    p.add_argument("--every", type=int, default=1, help="keep every n-th row (the last row is always kept)")
    p.set_defaults(func=cmd_dynamics, kind="table")

    p = add("materials", "list the material catalog or show one entry")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_materials, kind="text")

    p = add("verify", "run the acceptance suite; exit 1 if any criterion fails")
    p.add_argument("level", nargs="?", choices=LEVELS, default="fast")
    p.set_defaults(func=cmd_verify, kind="text")
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format is None:
            args.format = "json" if args.kind == "record" else "csv"
        if getattr(args, "every", 1) < 1:
            raise UsageError("--every must be at least 1")
        for name in ("freq_ghz_range", "width_um_range", "values"):
            if hasattr(args, name):
                setattr(args, name + "_text", getattr(args, name))
                try:
                    setattr(args, name, _grid(getattr(args, name)))
                except argparse.ArgumentTypeError as exc:
                    raise UsageError(str(exc)) from None
        code = args.func(args)
        return code or 0
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except NumericalError as exc:
        return _fail("numerical", str(exc), 1)
    except (ValueError, KeyError, MaterialError) as exc:
        return _fail("invalid_input", str(exc), 2)
    except OSError as exc:
        return _fail("io", str(exc), 1)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
