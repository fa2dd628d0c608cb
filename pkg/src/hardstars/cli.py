"""Command-line front end tying the solvers into reproducible runs.

Subcommands: build, family, variation-audit, evolve, modes, verify.
A run is described by a RunConfig; ``--config file.json`` overrides any
flag, unknown keys are rejected, and every emitted file carries a header
with the configuration hash so artifacts are traceable and re-runs are
byte-identical.

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, calibration
from .background import (
    BackgroundProfile,
    StarParameters,
    approximate_profile,
    build_star,
    family_scan,
    solve_tov_picard,
    solve_tov_shooting,
)
from .errors import (
    CflViolationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    HardStarError,
    InstabilityError,
)
from .evolution import (
    assemble_coefficients,
    evolve,
    gaussian_pulse,
    reconstruct,
)
from .modes import (
    X1_LIMIT,
    dispersion_roots,
    estimate_period,
    find_modes,
    mode_to_initial_data,
    spherical_j1,
)
from .plotting import render_svg
from .storage import write_profile
from .variation import (
    DEFAULT_AUDIT_SEED,
    audit_perturbations,
    criticality_audit,
    detuned_profile,
    first_variation,
    mass_aspect_bound_ratio,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

FOUR_PI = 4.0 * math.pi

_COMMANDS = ("build", "family", "variation-audit", "evolve", "modes", "verify")

# option keys each command accepts inside RunConfig.options
_OPTION_KEYS = {
    "build": {"basename"},
    "family": {"radii", "r_min", "r_max", "count"},
    "variation-audit": {"profile", "count"},
    "evolve": {"n_chi", "cfl", "duration", "preset", "samples", "snapshots"},
    "modes": {"count", "which", "emit_initial_data", "n_chi"},
    "verify": set(),
}

_CONFIG_KEYS = {
    "command",
    "R",
    "grid_n",
    "solver",
    "picard_tol",
    "picard_max_iter",
    "seed",
    "output_dir",
    "options",
}


@dataclass(frozen=True)
class RunConfig:
    """One fully specified run; serializes to a canonical JSON document."""

    command: str
    R: float = 0.1
    grid_n: int = 2001
    solver: str = "picard"
    picard_tol: float = 1e-12
    picard_max_iter: int = 200
    seed: int = DEFAULT_AUDIT_SEED
    output_dir: str = "."
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in _COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.solver not in ("picard", "shooting"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        extra = set(self.options) - _OPTION_KEYS[self.command]
        if extra:
            raise ConfigError(
                f"unknown option keys for {self.command}: {sorted(extra)}"
            )

    def canonical_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        """Digest of everything that shapes the numbers; where they land is excluded."""
        doc = dataclasses.asdict(self)
        doc.pop("output_dir")
        payload = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def star_parameters(self) -> StarParameters:
        return StarParameters(
            R=self.R,
            grid_n=self.grid_n,
            picard_tol=self.picard_tol,
            picard_max_iter=self.picard_max_iter,
        )

    @staticmethod
    def from_dict(data: dict) -> RunConfig:
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "command" not in data:
            raise ConfigError("configuration must name a command")
        try:
            return RunConfig(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


# ----------------------------------------------------------------- emission


def _fmt(x: float) -> str:
    if x == np.inf:
        return "inf"
    if x == -np.inf:
        return "-inf"
    return format(float(x), ".17g")


def _emit_csv(path: Path, columns: tuple[str, ...], rows, config: RunConfig, kind: str) -> Path:
    header = {
        "config": config.hash,
        "format": f"hardstars-{kind}",
        "version": __version__,
    }
    lines = ["# " + json.dumps(header, sort_keys=True), ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _emit_json(path: Path, payload: dict, config: RunConfig, kind: str) -> Path:
    doc = {
        "config": config.hash,
        "format": f"hardstars-{kind}",
        "version": __version__,
        **payload,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _resolve_output_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    root = os.environ.get("HARDSTARS_OUTPUT_ROOT")
    if root and not out.is_absolute():
        out = Path(root) / out
    out.mkdir(parents=True, exist_ok=True)
    return out


# ----------------------------------------------------------------- commands


def _cmd_build(config: RunConfig, out: Path) -> int:
    star = build_star(config.star_parameters(), solver=config.solver)
    # dots in the radius would be eaten by suffix handling
    default = "profile_R" + f"{config.R:g}".replace(".", "p")
    base = out / str(config.options.get("basename", default))
    csv_path, json_path = write_profile(star, base, extra={"config": config.hash})
    print(f"built R={config.R:g} M={star.M_total:.12g} N={star.N_total:.12g}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return EXIT_OK


def _family_radii(config: RunConfig) -> list[float]:
    opts = config.options
    if "radii" in opts:
        radii = [float(v) for v in opts["radii"]]
        if not radii:
            raise ConfigError("radii list is empty")
        return radii
    r_min = float(opts.get("r_min", 0.02))
    r_max = float(opts.get("r_max", 0.12))
    count = int(opts.get("count", 6))
    if count < 2 or not 0.0 < r_min < r_max:
        raise ConfigError("family scan needs 0 < r_min < r_max and count >= 2")
    return list(np.linspace(r_min, r_max, count))


def _cmd_family(config: RunConfig, out: Path) -> int:
    radii = _family_radii(config)
    solver_fn = solve_tov_picard if config.solver == "picard" else solve_tov_shooting
    rows = family_scan(radii, grid_n=config.grid_n, solver=solver_fn)
    table = []
    for row in rows:
        table.append(
            (
                row.R,
                row.M_total if row.M_total is not None else math.nan,
                row.rho_central if row.rho_central is not None else math.nan,
                row.compactness if row.compactness is not None else math.nan,
            )
        )
    path = _emit_csv(
        out / "family.csv",
        ("R", "M_total", "rho_central", "compactness"),
        table,
        config,
        "family",
    )
    failures = [row for row in rows if row.error is not None]
    for row in failures:
        print(f"R={row.R:g}: {row.error}", file=sys.stderr)
    print(f"wrote {path} ({len(rows) - len(failures)}/{len(rows)} solved)")
    if len(failures) == len(rows):
        raise ConvergenceError("no radius in the scan produced a star")
    return EXIT_OK


def _cmd_variation_audit(config: RunConfig, out: Path) -> int:
    opts = config.options
    if "profile" in opts:
        from .storage import read_profile_csv

        star = read_profile_csv(opts["profile"])
    else:
        star = build_star(config.star_parameters(), solver=config.solver)
    count = int(opts.get("count", 50))
    perts = audit_perturbations(star, count=count, seed=config.seed)
    report = criticality_audit(star, perts)

    rows = [
        {
            "index": k,
            "M_dot": float(report.first_variations[k]),
            "M_ddot": float(report.second_variations[k]),
            "E_var": float(report.energies[k]),
            "ratio": float(report.ratios[k]),
        }
        for k in range(count)
    ]
    payload = {
        "R": star.R,
        "count": count,
        "seed": config.seed,
        "max_abs_M_dot": report.max_abs_first,
        "min_M_ddot": float(np.min(report.second_variations)),
        "ratio_bounds": list(report.ratio_window),
        "perturbations": rows,
    }
    report_path = _emit_json(out / "variation_report.json", payload, config, "variation-report")

    # shell-by-shell mass rate of the first draw (vanishing surface density
    # freezes the total, the interior still moves)
    rdot = perts[0].rdot
    mdot = -FOUR_PI * star.r**2 * (star.rho - 1.0) * rdot
    mdot_path = _emit_csv(
        out / "mdot.csv",
        ("chi", "r", "rdot", "mdot"),
        zip(star.chi, star.r, rdot, mdot),
        config,
        "mass-rate",
    )
    print(
        f"audited {count} perturbations: max|M_dot|={report.max_abs_first:.3e} "
        f"ratio window [{report.ratio_window[0]:.3g}, {report.ratio_window[1]:.3g}]"
    )
    print(f"wrote {report_path}")
    print(f"wrote {mdot_path}")
    return EXIT_OK


def _initial_data(config: RunConfig, star: BackgroundProfile, coeffs):
    preset = str(config.options.get("preset", "gaussian"))
    if preset == "gaussian":
        return gaussian_pulse(coeffs)
    if preset.startswith("mode:"):
        index = int(preset.split(":", 1)[1])
        if index < 1:
            raise ConfigError("mode preset index counts from 1")
        modes = find_modes(star, n_modes=index)
        return mode_to_initial_data(coeffs, modes[index - 1])
    if preset.startswith("file:"):
        path = Path(preset.split(":", 1)[1])
        try:
            lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
        except OSError as exc:
            raise ConfigError(f"cannot read initial data {path}: {exc}") from exc
        if not lines:
            raise ConfigError(f"initial data {path} is empty")
        names = lines[0].split(",")
        if not {"chi", "u", "v"} <= set(names):
            raise ConfigError(f"initial data {path} needs chi,u,v columns")
        try:
            table = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
        except ValueError as exc:
            raise ConfigError(f"bad numeric row in {path}: {exc}") from exc
        cols = {name: table[:, k] for k, name in enumerate(names)}
        u0 = np.interp(coeffs.chi, cols["chi"], cols["u"])
        v0 = np.interp(coeffs.chi, cols["chi"], cols["v"])
        u0[0] = 0.0
        v0[0] = 0.0
        return u0, v0
    raise ConfigError(f"unknown initial-data preset {preset!r}")


def _cmd_evolve(config: RunConfig, out: Path) -> int:
    opts = config.options
    n_chi = int(opts.get("n_chi", 501))
    cfl = float(opts.get("cfl", 0.4))
    duration = float(opts.get("duration", 10.0))  # in units of R
    samples = int(opts.get("samples", 200))
    n_snap = max(2, int(opts.get("snapshots", 5)))
    if duration <= 0.0:
        raise ConfigError("duration must be positive (units of R)")

    star = build_star(config.star_parameters(), solver=config.solver)
    coeffs = assemble_coefficients(star, n_chi=n_chi)
    u, v = _initial_data(config, star, coeffs)

    def snapshot(index: int, t: float, uu: np.ndarray, vv: np.ndarray) -> Path:
        fields = reconstruct(coeffs, uu)
        return _emit_csv(
            out / f"snapshot_{index:03d}.csv",
            ("chi", "r0", "u", "v", "psi1", "omega1", "m1", "rho1"),
            zip(coeffs.chi, coeffs.r0, uu, vv, fields.psi1, fields.omega1, fields.m1, fields.rho1),
            config,
            "snapshot",
        )

    T_total = duration * config.R
    seg_T = T_total / (n_snap - 1)
    seg_samples = max(1, samples // (n_snap - 1))
    times: list[float] = []
    energies: list[float] = []
    norms: dict[str, list[float]] = {"norm": [], "first": [], "second": []}
    residuals: list[float] = []
    snapshot(0, 0.0, u, v)
    offset = 0.0
    for seg in range(1, n_snap):
        res = evolve(coeffs, u, v, T=seg_T, cfl=cfl, samples=seg_samples)
        skip = 1 if times else 0  # segment boundaries appear once
        times.extend(offset + res.times[skip:])
        energies.extend(res.energies[skip:])
        for key in norms:
            norms[key].extend(res.norm_series[key][skip:])
        residuals.extend(res.residuals[skip:])
        u, v = np.array(res.u), np.array(res.v)
        offset += seg_T
        snapshot(seg, offset, u, v)

    energy_path = _emit_csv(
        out / "energy.csv",
        ("phi", "energy", "norm", "first", "second", "constraint_residual"),
        zip(times, energies, norms["norm"], norms["first"], norms["second"], residuals),
        config,
        "energy-history",
    )
    e0 = energies[0]
    svg_path = render_svg(
        [
            ("energy/E0", times, [e / e0 for e in energies]),
            ("norm/N0", times, [n / norms["norm"][0] for n in norms["norm"]]),
            ("first/F0", times, [n / norms["first"][0] for n in norms["first"]]),
            ("second/S0", times, [n / norms["second"][0] for n in norms["second"]]),
        ],
        out / "energy.svg",
        title=f"evolution R={config.R:g} preset={config.options.get('preset', 'gaussian')}",
        xlabel="phi",
        ylabel="relative size",
        ylog=True,
    )
    drift = max(abs(e / e0 - 1.0) for e in energies)
    print(f"evolved to phi={T_total:g} in {len(times)} samples, energy drift {drift:.3e}")
    print(f"wrote {energy_path}")
    print(f"wrote {svg_path}")
    return EXIT_OK


def _cmd_modes(config: RunConfig, out: Path) -> int:
    opts = config.options
    count = int(opts.get("count", 3))
    which = str(opts.get("which", "both"))
    if which not in ("h0", "full", "both"):
        raise ConfigError(f"which must be h0, full, or both, got {which!r}")
    if count < 1:
        raise ConfigError("count must be at least 1")

    # flat-operator eigenvalues under the surface condition of this radius
    R = config.R
    flat = dispersion_roots(count, R=R)
    lam_h0 = [(x / R) ** 2 for x in flat]

    star = None
    modes = []
    if which in ("full", "both"):
        star = build_star(config.star_parameters(), solver=config.solver)
        modes = find_modes(star, n_modes=count)

    columns: tuple[str, ...]
    rows = []
    if which == "h0":
        columns = ("j", "lambda_h0")
        rows = [(j + 1, lam_h0[j]) for j in range(count)]
    elif which == "full":
        columns = ("j", "lambda_full", "boundary_residual")
        rows = [(j + 1, m.eigenvalue, m.defect) for j, m in enumerate(modes)]
    else:
        columns = ("j", "lambda_h0", "lambda_full", "gap", "boundary_residual")
        rows = [
            (j + 1, lam_h0[j], m.eigenvalue, m.eigenvalue - lam_h0[j], m.defect)
            for j, m in enumerate(modes)
        ]
    table_path = _emit_csv(out / "modes.csv", columns, rows, config, "mode-table")
    print(f"wrote {table_path}")

    for j, mode in enumerate(modes, start=1):
        path = _emit_csv(
            out / f"mode_{j}.csv",
            ("r", "h"),
            zip(star.r, mode.h),
            config,
            "eigenfunction",
        )
        print(f"wrote {path}")

    emit_j = opts.get("emit_initial_data")
    if emit_j is not None:
        emit_j = int(emit_j)
        if not 1 <= emit_j <= max(count, len(modes)):
            raise ConfigError(f"emit_initial_data index {emit_j} outside 1..{count}")
        if star is None:
            star = build_star(config.star_parameters(), solver=config.solver)
        if len(modes) < emit_j:
            modes = find_modes(star, n_modes=emit_j)
        n_chi = int(opts.get("n_chi", 501))
        coeffs = assemble_coefficients(star, n_chi=n_chi)
        u0, v0 = mode_to_initial_data(coeffs, modes[emit_j - 1])
        path = _emit_csv(
            out / f"initial_data_mode_{emit_j}.csv",
            ("chi", "u", "v"),
            zip(coeffs.chi, u0, v0),
            config,
            "initial-data",
        )
        print(f"wrote {path}")
    return EXIT_OK


# ------------------------------------------------------------------- verify


class _Checks:
    def __init__(self) -> None:
        self.failures = 0
        self.count = 0

    def record(self, name: str, ok: bool, detail: str) -> None:
        self.count += 1
        if not ok:
            self.failures += 1
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")


def _cmd_verify(config: RunConfig, out: Path) -> int:
    """Re-check the documented invariants of every module on one star."""
    checks = _Checks()
    R = config.R
    params = config.star_parameters()

    star = build_star(params, solver="picard")
    cross = build_star(params, solver="shooting")
    gap = max(
        float(np.max(np.abs(star.m - cross.m))),
        float(np.max(np.abs(star.rho - cross.rho))),
    )
    checks.record(
        "background.dual-route",
        gap <= calibration.BACKGROUND_CROSS_CHECK_TOL,
        f"sup gap {gap:.3e} <= {calibration.BACKGROUND_CROSS_CHECK_TOL:g}",
    )
    checks.record(
        "background.surface-density",
        abs(star.rho[-1] - 1.0) <= 1e-12,
        f"|rho(R)-1| = {abs(star.rho[-1] - 1.0):.3e}",
    )
    mono = bool(
        np.all(np.diff(star.m) >= 0.0)
        and np.all(np.diff(star.rho) <= 1e-15)
        and np.all(star.rho >= 1.0 - 1e-15)
    )
    checks.record("background.monotone-fields", mono, "m rising, rho falling to 1")
    compact = 3.0 * star.M_total / R
    checks.record(
        "background.compactness", compact < 1.0, f"3M/R = {compact:.6f} < 1"
    )
    closure = float(
        np.max(np.abs(np.exp(star.psi[1:] - star.omega[1:]) / (FOUR_PI * star.r[1:] ** 2) - 1.0))
    )
    checks.record(
        "background.metric-closure", closure <= 1e-12, f"e^(psi-omega)/4pi r^2 - 1: {closure:.3e}"
    )
    rho_close, _ = approximate_profile(R, star.r)
    approx_gap = float(np.max(np.abs(star.rho - rho_close)))
    checks.record(
        "background.small-radius-closure",
        approx_gap <= 25.0 * R**4,
        f"sup|rho - closed form| = {approx_gap:.3e} <= 25 R^4",
    )

    perts = audit_perturbations(star, count=12, seed=config.seed)
    report = criticality_audit(star, perts)
    checks.record(
        "variation.criticality",
        report.max_abs_first <= calibration.SOLVED_FIRST_VARIATION_MAX,
        f"max|M_dot| = {report.max_abs_first:.3e}",
    )
    checks.record(
        "variation.coercivity",
        bool(np.all(report.second_variations > 0.0)),
        f"min M_ddot = {float(np.min(report.second_variations)):.4f} > 0",
    )
    lo, hi = calibration.EQUIVALENCE_RATIO_WINDOW
    rlo, rhi = report.ratio_window
    checks.record(
        "variation.equivalence-window",
        lo <= rlo and rhi <= hi,
        f"ratios in [{rlo:.3g}, {rhi:.3g}] within [{lo:g}, {hi:g}]",
    )
    det = detuned_profile(star)
    det_first = min(abs(first_variation(det, p.rdot)) for p in perts)
    det_floor = 0.5 * FOUR_PI * R * R * 0.01
    checks.record(
        "variation.detuned-detection",
        det_first >= det_floor,
        f"min|M_dot| = {det_first:.3e} >= {det_floor:.3e}",
    )
    aspect_ok = True
    aspect_detail = []
    for expo, ceiling in calibration.MASS_ASPECT_RATIO_MAX.items():
        worst = max(
            mass_aspect_bound_ratio(star, p.rdot, expo, squared=True) for p in perts[:6]
        )
        aspect_ok = aspect_ok and worst <= ceiling
        aspect_detail.append(f"e={expo:g}: {worst:.3f}<={ceiling:g}")
    checks.record("variation.mass-aspect", aspect_ok, ", ".join(aspect_detail))

    coeffs = assemble_coefficients(star, n_chi=501)
    u0, v0 = gaussian_pulse(coeffs)
    res = evolve(coeffs, u0, v0, T=5.0 * R, cfl=0.4, samples=50)
    checks.record(
        "evolution.energy-drift",
        res.max_energy_drift <= calibration.ENERGY_DRIFT_MAX,
        f"relative drift {res.max_energy_drift:.3e}",
    )
    growth = float(np.max(res.norm_series["norm"] / res.norm_series["norm"][0]))
    ceiling = calibration.NORM_GROWTH_MAX["gaussian"]
    checks.record(
        "evolution.norm-boundedness",
        growth <= ceiling,
        f"norm growth {growth:.2f} <= {ceiling:g}",
    )
    checks.record(
        "evolution.constraint-residual",
        bool(np.all(np.isfinite(res.residuals))),
        f"max interior residual {float(np.max(res.residuals)):.3e}",
    )

    modes = find_modes(star, n_modes=1)
    x1 = modes[0].x
    if R in calibration.X1_BY_RADIUS:
        pin = calibration.X1_BY_RADIUS[R]
        ok = abs(x1 - pin) <= calibration.X1_REPRODUCTION_TOL
        detail = f"x1 = {x1:.10f} vs pinned {pin:.10f}"
    else:
        ok = X1_LIMIT < x1 < 1.2 * X1_LIMIT
        detail = f"x1 = {x1:.10f} above the small-radius limit {X1_LIMIT:.10f}"
    checks.record("modes.fundamental", ok, detail)
    checks.record(
        "modes.boundary-residual",
        abs(modes[0].defect) <= 1e-10,
        f"defect {modes[0].defect:.3e}",
    )
    if R in calibration.FLAT_SHAPE_DISTANCE_MAX:
        flat = 3.0 * R / x1 * spherical_j1(x1 * star.r / R)
        dist = float(np.max(np.abs(modes[0].h - flat)) / np.max(np.abs(modes[0].h)))
        ceiling = calibration.FLAT_SHAPE_DISTANCE_MAX[R]
        checks.record(
            "modes.flat-shape", dist <= ceiling, f"shape distance {dist:.4f} <= {ceiling:g}"
        )
    um, vm = mode_to_initial_data(coeffs, modes[0])
    resm = evolve(coeffs, um, vm, T=3.0 * modes[0].period, cfl=0.3, samples=5)
    period = estimate_period(resm.probe_times, resm.probe_values)
    rel = abs(period - modes[0].period) / modes[0].period
    checks.record(
        "modes.period-roundtrip",
        rel <= calibration.PERIOD_MATCH_RTOL,
        f"period {period:.8f} vs 2pi/sqrt(lambda) {modes[0].period:.8f} (rel {rel:.2e})",
    )

    print(f"{checks.count} checks, {checks.failures} failures")
    _emit_json(
        out / "verify.json",
        {"R": R, "checks": checks.count, "failures": checks.failures},
        config,
        "verify-summary",
    )
    return EXIT_VERIFY if checks.failures else EXIT_OK


_RUNNERS = {
    "build": _cmd_build,
    "family": _cmd_family,
    "variation-audit": _cmd_variation_audit,
    "evolve": _cmd_evolve,
    "modes": _cmd_modes,
    "verify": _cmd_verify,
}


# ------------------------------------------------------------------ parsing


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--R", type=float, default=0.1, help="surface areal radius")
    sub.add_argument("--grid-n", type=int, default=2001, help="radial grid nodes")
    sub.add_argument(
        "--solver", choices=("picard", "shooting"), default="picard", help="background solver"
    )
    sub.add_argument("--seed", type=int, default=DEFAULT_AUDIT_SEED, help="audit RNG seed")
    sub.add_argument("--output-dir", default=".", help="artifact directory")
    sub.add_argument("--config", default=None, help="JSON config overriding flags")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardstars",
        description="Static hard stars, their mass variations, linear waves, and modes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("build", help="solve one star and write its profile")
    _add_common(p)
    p.add_argument("--basename", default=None, help="output files base name")

    p = subs.add_parser("family", help="scan masses over a range of radii")
    _add_common(p)
    p.add_argument("--radii", default=None, help="comma-separated radii")
    p.add_argument("--r-min", type=float, default=0.02)
    p.add_argument("--r-max", type=float, default=0.12)
    p.add_argument("--count", type=int, default=6)

    p = subs.add_parser("variation-audit", help="first/second variation over random draws")
    _add_common(p)
    p.add_argument("--profile", default=None, help="profile CSV to audit instead of solving")
    p.add_argument("--count", type=int, default=50, help="number of perturbations")

    p = subs.add_parser("evolve", help="run the linear wave equation")
    _add_common(p)
    p.add_argument("--n-chi", type=int, default=501, help="comoving grid nodes")
    p.add_argument("--cfl", type=float, default=0.4)
    p.add_argument("--T", type=float, default=10.0, help="duration in units of R")
    p.add_argument(
        "--preset",
        default="gaussian",
        help="initial data: gaussian, mode:<j>, or file:<csv>",
    )
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--snapshots", type=int, default=5)

    p = subs.add_parser("modes", help="radial eigenmodes by shooting")
    _add_common(p)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--which", choices=("h0", "full", "both"), default="both")
    p.add_argument("--emit-initial-data", type=int, default=None, metavar="J")
    p.add_argument("--n-chi", type=int, default=501)

    p = subs.add_parser("verify", help="re-check module invariants on one star")
    _add_common(p)
    return parser


def _namespace_to_dict(ns: argparse.Namespace) -> dict:
    common = {
        "command": ns.command,
        "R": ns.R,
        "grid_n": ns.grid_n,
        "solver": ns.solver,
        "seed": ns.seed,
        "output_dir": ns.output_dir,
    }
    options: dict = {}
    if ns.command == "build":
        if ns.basename is not None:
            options["basename"] = ns.basename
    elif ns.command == "family":
        if ns.radii is not None:
            options["radii"] = [float(tok) for tok in ns.radii.split(",") if tok]
        else:
            options.update(r_min=ns.r_min, r_max=ns.r_max, count=ns.count)
    elif ns.command == "variation-audit":
        options["count"] = ns.count
        if ns.profile is not None:
            options["profile"] = ns.profile
    elif ns.command == "evolve":
        options.update(
            n_chi=ns.n_chi,
            cfl=ns.cfl,
            duration=ns.T,
            preset=ns.preset,
            samples=ns.samples,
            snapshots=ns.snapshots,
        )
    elif ns.command == "modes":
        options.update(count=ns.count, which=ns.which, n_chi=ns.n_chi)
        if ns.emit_initial_data is not None:
            options["emit_initial_data"] = ns.emit_initial_data
    common["options"] = options
    return common


def build_config(argv: list[str] | None = None) -> RunConfig:
    """Flags plus optional JSON file (the file wins) to one RunConfig."""
    ns = _build_parser().parse_args(argv)
    data = _namespace_to_dict(ns)
    if ns.config is not None:
        overrides = _load_config_file(ns.config)
        if "command" in overrides and overrides["command"] != data["command"]:
            raise ConfigError(
                f"config file names command {overrides['command']!r} "
                f"but {data['command']!r} was invoked"
            )
        file_options = overrides.pop("options", None)
        data.update(overrides)
        if file_options is not None:
            if not isinstance(file_options, dict):
                raise ConfigError("options must be a JSON object")
            data["options"] = {**data["options"], **file_options}
    return RunConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    try:
        config = build_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = _resolve_output_dir(config)
        return _RUNNERS[config.command](config, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, CflViolationError, InstabilityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except HardStarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
