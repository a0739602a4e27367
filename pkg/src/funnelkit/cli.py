"""Command-line front end: ``funnelkit point|sweep|figure|convert|validate``.

Exit codes: 0 ok, 1 configuration or parameter error, 2 numerical failure,
3 no photon flux through the monitored mode, 4 validation failure.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .errors import ConfigError, FunnelkitError, NoPhotonFlux, NumericalError, ParameterError, InvalidSpec
from .greens import MODES
from .io import write_point_csv, write_sweep_csv
from .params import (
    BASELINE,
    PRESETS,
    RATE_NAMES,
    PhysicalSpec,
    RateParams,
    cavity_q_factor,
    get_preset,
    q_to_kappa2,
    to_normalized,
    to_physical,
    validate_params,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NO_FLUX, EXIT_VALIDATION = 0, 1, 2, 3, 4
FORMATS = ("csv", "svg")
_SECTION = "funnelkit"
_RATE_KEYS = set(RATE_NAMES) | {"pure_dephasing", "two_gamma_star", "k1", "k2"}
_TEXT_KEYS = {"preset", "mode", "methods", "axis", "axis2", "name"}
_FLOAT_KEYS = {"wavelength_nm", "lifetime_ns", "q"}
CONFIG_KEYS = _RATE_KEYS | _TEXT_KEYS | _FLOAT_KEYS

log = logging.getLogger("funnelkit")


@dataclass
class RunConfig:
    """Resolved inputs of one command invocation."""

    command: str
    params: RateParams | None = None
    physical: PhysicalSpec | None = None
    source: str = "default"
    preset: str = ""
    out: Path = Path(".")
    formats: tuple = ("csv",)
    mode: str = "cavity"
    verbosity: int = 0
    extra: dict = field(default_factory=dict)


def _key_lines(path: Path) -> dict:
    lines = {}
    for number, text in enumerate(path.read_text().splitlines(), start=1):
        key, sep, _ = text.partition("=")
        if sep and not text.lstrip().startswith(("#", ";")):
            lines.setdefault(key.strip().lower(), number)
    return lines


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file into typed values.

    Unknown keys, duplicated keys and non-numeric rates raise
    :class:`ConfigError` naming the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(f"[{_SECTION}]\n{text}", source=str(path))
    except configparser.ParsingError as exc:
        # line numbers are shifted by the synthetic section header
        source = text.splitlines()
        detail = "; ".join(f"{path}:{n - 1}: cannot parse {source[n - 2].strip()!r}" for n, _ in exc.errors)
        raise ConfigError(f"malformed config: {detail}") from exc
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        where = f"{path}:{lineno - 1}" if lineno else str(path)
        raise ConfigError(f"{where}: malformed config ({exc.message.splitlines()[0]})") from exc
    lines = _key_lines(path)
    values = {}
    for key, raw in parser.items(_SECTION):
        where = f"{path}:{lines.get(key, '?')}"
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in _TEXT_KEYS:
            values[key] = raw.strip()
            continue
        try:
            values[key] = float(raw)
        except ValueError:
            raise ConfigError(f"{where}: {key} must be a number, got {raw!r}") from None
    return values


def _inline_rates(args) -> dict:
    return {n: getattr(args, n) for n in RATE_NAMES if getattr(args, n, None) is not None}


def _physical_from(values: dict, args) -> PhysicalSpec | None:
    wavelength = args.wavelength_nm if args.wavelength_nm is not None else values.get("wavelength_nm")
    lifetime = args.lifetime_ns if args.lifetime_ns is not None else values.get("lifetime_ns")
    if wavelength is None and lifetime is None:
        return None
    if wavelength is None:
        raise ConfigError("physical spec needs a wavelength (--wavelength-nm or wavelength_nm)")
    if lifetime is None:
        raise ConfigError("physical spec needs a lifetime (--lifetime-ns or lifetime_ns)")
    return PhysicalSpec(wavelength, lifetime)


def resolve_config(args) -> RunConfig:
    """Combine config file, preset and inline flags into a :class:`RunConfig`.

    At most one of ``--config`` and a parameter preset supplies the base rates;
    inline rate flags override individual values. A config file that sets any
    rate must set all six. With neither source, a figure preset supplies its
    own base rates and otherwise the baseline operating point is used.
    """
    from .sweep import FIGURE_PRESETS, figure_preset

    values = read_config(args.config) if getattr(args, "config", None) else {}
    preset = getattr(args, "preset", None) or values.get("preset") or ""
    file_rates = {k: v for k, v in values.items() if k in _RATE_KEYS}
    if preset and preset not in FIGURE_PRESETS and file_rates:
        raise ConfigError("give rates either through a config file or a preset, not both")

    if preset in PRESETS:
        params, source = get_preset(preset).params, f"preset {preset}"
    elif preset and preset not in FIGURE_PRESETS:
        get_preset(preset)  # raises UnknownPreset with the known names
    elif file_rates:
        params, source = validate_params(file_rates), f"config {args.config}"
    elif preset:
        params, source = figure_preset(preset).base, f"figure {preset}"
    else:
        params, source = BASELINE, "baseline"
    overrides = _inline_rates(args)
    if overrides:
        params = params.with_(**overrides)
        source += " + flags"

    formats = tuple(f.strip() for f in (getattr(args, "format", None) or "csv").split(",") if f.strip())
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ConfigError(f"unknown output format(s) {', '.join(bad)}; choose from {', '.join(FORMATS)}")
    mode = getattr(args, "mode", None) or values.get("mode") or "cavity"
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    out = Path(getattr(args, "out", None) or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc.strerror}") from exc

    return RunConfig(
        command=args.command,
        params=params,
        physical=_physical_from(values, args),
        source=source,
        preset=preset,
        out=out,
        formats=formats,
        mode=mode,
        verbosity=getattr(args, "verbose", 0),
        extra=values,
    )


def _flags_line(params: RateParams) -> str:
    f = params.flags
    return (
        f"regime: emitter-plasmon {'ok' if f.emitter_plasmon else 'NOT weak'}, "
        f"plasmon-cavity {'ok' if f.plasmon_cavity else 'NOT weak'}, "
        f"emitter-cavity {'ok' if f.emitter_cavity else 'NOT weak'}"
    )


def cmd_point(args) -> int:
    from .metrics import compute_point
    from .sweep import evaluate_row

    cfg = resolve_config(args)
    p = cfg.params
    result = compute_point(p, cfg.mode)
    row = evaluate_row(p, (), (), cfg.mode, "both", ("spectral", "quadrature"))
    lines = [
        f"rates ({cfg.source}): " + ", ".join(f"{n}={getattr(p, n):g}" for n in RATE_NAMES),
        f"mode: {cfg.mode}",
        f"numeric:  I = {result.I:.4f}   beta = {result.beta:.4e}   F = {result.F_dB:.2f} dB",
    ]
    if cfg.mode == "cavity" and math.isfinite(row.I_analytic):
        lines.append(f"analytic: I = {row.I_analytic:.4f}   beta = {row.beta_analytic:.4e}   F = {row.F_analytic_dB:.2f} dB")
    lines.append(f"spectral vs quadrature discrepancy: {result.discrepancy:.2e}" + ("  (SUSPECT)" if result.suspect else ""))
    lines.append(_flags_line(p))
    print("\n".join(lines))
    if "csv" in cfg.formats:
        path = write_point_csv(p, row, cfg.out / "point.csv", {"mode": cfg.mode, "source": cfg.source, "version": __version__})
        log.info("wrote %s", path)
    return EXIT_OK


def _sweep_spec(args, cfg: RunConfig):
    from .sweep import FIGURE_PRESETS, Axis, SweepSpec, figure_preset

    if cfg.preset in FIGURE_PRESETS:
        return replace(figure_preset(cfg.preset), base=cfg.params)
    axis_texts = list(getattr(args, "axis", None) or [])
    axis_texts += [cfg.extra[k] for k in ("axis", "axis2") if k in cfg.extra]
    if not axis_texts:
        raise ConfigError("sweep needs --preset <figure> or at least one --axis name:scale:min:max:count")
    methods = getattr(args, "methods", None) or cfg.extra.get("methods") or "both"
    return SweepSpec(cfg.params, tuple(Axis.parse(t) for t in axis_texts), cfg.mode, methods, preset=cfg.preset)


def cmd_sweep(args) -> int:
    from .svg import render_sweep
    from .sweep import run_sweep

    cfg = resolve_config(args)
    spec = _sweep_spec(args, cfg)
    result = run_sweep(spec, getattr(args, "workers", None))
    stem = getattr(args, "name", None) or cfg.extra.get("name") or spec.preset or "sweep"
    written = []
    if "csv" in cfg.formats:
        written.append(write_sweep_csv(result, cfg.out / f"{stem}.csv"))
    if "svg" in cfg.formats:
        written += render_sweep(result, cfg.out / stem)
    failed = sum(bool(r.error) for r in result.rows)
    print(f"{len(result.rows)} rows over {' x '.join(a.describe() for a in spec.axes)}; {failed} with errors")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_figure(args) -> int:
    args.preset = args.figure
    return cmd_sweep(args)


def cmd_convert(args) -> int:
    cfg = resolve_config(args)
    spec = cfg.physical
    if spec is None:
        raise ConfigError("convert needs --wavelength-nm and --lifetime-ns (or wavelength_nm / lifetime_ns in the config)")
    p = cfg.params
    q = args.q if args.q is not None else cfg.extra.get("q")
    kappa2 = q_to_kappa2(spec, q) if q is not None else p.kappa2
    rows = [("Gamma_1", 1.0, spec.gamma1_rad_s)]
    rows += [(n, getattr(p, n), to_physical(spec, getattr(p, n))) for n in RATE_NAMES]
    rows += [(f"input {v:g} rad/s", to_normalized(spec, v), v) for v in args.to_normalized or ()]
    print(f"wavelength {spec.wavelength_nm:g} nm, T1 {spec.lifetime_ns:g} ns, omega {spec.angular_frequency:.6e} rad/s")
    print(f"Gamma_1 = {spec.gamma1_rad_s:.6e} rad/s")
    print(f"{'rate':<22}{'x Gamma_1':>14}{'rad/s':>16}")
    for name, norm, phys in rows:
        print(f"{name:<22}{norm:>14.6g}{phys:>16.6e}")
    qf = cavity_q_factor(spec, kappa2)
    print(f"Q(kappa2 = {kappa2:g} Gamma_1) = {qf:.1f}")
    if "csv" in cfg.formats and args.out:
        path = cfg.out / "conversion.csv"
        with path.open("w") as fh:
            fh.write(f"# wavelength_nm: {spec.wavelength_nm:g}\n# lifetime_ns: {spec.lifetime_ns:g}\n")
            fh.write("rate,normalized,rad_per_s\n")
            for name, norm, phys in rows:
                fh.write(f"{name},{norm:.9g},{phys:.9g}\n")
            fh.write(f"Q,{kappa2:.9g},{qf:.9g}\n")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import CRITERIA, format_report, run_acceptance

    criteria = None
    if args.criteria:
        try:
            criteria = [int(c) for c in args.criteria.split(",")]
        except ValueError:
            raise ConfigError(f"--criteria expects comma-separated numbers, got {args.criteria!r}") from None
        unknown = [c for c in criteria if c not in CRITERIA]
        if unknown:
            raise ConfigError(f"unknown criteria {unknown}; known: {sorted(CRITERIA)}")
    checks = run_acceptance(criteria)
    report = format_report(checks)
    print(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "validation_report.txt").write_text(report + "\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def _add_common(p: argparse.ArgumentParser, rates=True):
    p.add_argument("--config", help="flat key = value file with rates and options")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--format", default="csv", help="comma-separated outputs: csv, svg")
    p.add_argument("--mode", choices=sorted(MODES), help="monitored output mode (default: cavity)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    if rates:
        group = p.add_argument_group("rates in units of Gamma_1")
        group.add_argument("--dephasing", type=float, help="2 gamma*, pure dephasing rate")
        for name in ("g0", "g1", "g2", "kappa1", "kappa2"):
            group.add_argument(f"--{name}", type=float)
    p.add_argument("--wavelength-nm", dest="wavelength_nm", type=float)
    p.add_argument("--lifetime-ns", dest="lifetime_ns", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="funnelkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="figures of merit at one parameter point")
    _add_common(p)
    p.add_argument("--preset", help=f"parameter preset ({', '.join(PRESETS)})")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="1-D or 2-D grid over the rates")
    _add_common(p)
    p.add_argument("--preset", help="figure preset (fig2, fig3a, ...) or parameter preset")
    p.add_argument("--axis", action="append", help="name:scale:min:max:count or name:values:v1,v2 (repeat for 2-D)")
    p.add_argument("--methods", choices=("numeric", "analytic", "both"))
    p.add_argument("--workers", type=int, help="worker processes (default: $FUNNELKIT_THREADS or 1; 0 = all cores)")
    p.add_argument("--name", help="output file stem (default: preset name or 'sweep')")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="shorthand for sweep --preset NAME")
    p.add_argument("figure", help="fig2, fig3a, fig3b, fig4, fig5 or figS3")
    _add_common(p)
    p.add_argument("--workers", type=int)
    p.add_argument("--name")
    p.set_defaults(func=cmd_figure, preset=None, axis=None, methods=None)

    p = sub.add_parser("convert", help="normalized <-> physical rates and cavity Q")
    _add_common(p)
    p.add_argument("--preset", help="parameter preset whose rates are converted")
    p.add_argument("--q", type=float, help="quality factor to convert into kappa2")
    p.add_argument("--to-normalized", dest="to_normalized", type=float, action="append", help="rate in rad/s (repeatable)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--out", help="directory for validation_report.txt")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 1,5,8")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NoPhotonFlux as exc:
        print(f"error: no photon flux: {exc}", file=sys.stderr)
        return EXIT_NO_FLUX
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParameterError, InvalidSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FunnelkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
