"""Deterministic on-disk formats for solved stars.

A profile is written as a CSV table plus a JSON sidecar.  The CSV carries one
'#'-prefixed provenance line (a JSON object) before the column header, then
the grid columns at 17 significant digits, so a written file is byte-stable
across runs and round-trips to the exact floating-point values.  Infinities
at the centre node serialize as "inf".
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .background import BackgroundProfile, _readonly

CSV_COLUMNS = ("r", "m", "rho", "p", "n", "psi", "omega", "chi", "drdchi", "dpsidchi")


def _fmt(x: float) -> str:
    if x == np.inf:
        return "inf"
    if x == -np.inf:
        return "-inf"
    return format(x, ".17g")


def _config_hash(meta: dict) -> str:
    blob = json.dumps(meta, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def profile_metadata(profile: BackgroundProfile) -> dict:
    profile.require_metric()
    return {
        "R": profile.R,
        "M_total": profile.M_total,
        "N_total": profile.N_total,
        "grid_n": profile.grid_n,
        "rho_central": profile.rho_central,
        "provenance": profile.provenance,
        "version": __version__,
    }


def write_profile_csv(
    profile: BackgroundProfile, path: str | Path, extra: dict | None = None
) -> Path:
    """Write the grid columns; returns the path written.

    ``extra`` entries are merged into the header object (used by callers
    that stamp a run-configuration hash on every artifact).
    """
    profile.require_metric()
    path = Path(path)
    meta = profile_metadata(profile)
    header_obj = {"format": "hardstars-profile", "hash": _config_hash(meta), "version": __version__}
    if extra:
        header_obj.update(extra)
    cols = [getattr(profile, name) for name in CSV_COLUMNS]
    lines = ["# " + json.dumps(header_obj, sort_keys=True), ",".join(CSV_COLUMNS)]
    for i in range(profile.grid_n):
        lines.append(",".join(_fmt(float(c[i])) for c in cols))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_profile_json(
    profile: BackgroundProfile, path: str | Path, extra: dict | None = None
) -> Path:
    """Write the scalar sidecar (radius, totals, provenance)."""
    path = Path(path)
    meta = profile_metadata(profile)
    if extra:
        meta = {**meta, **extra}
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def write_profile(
    profile: BackgroundProfile, base: str | Path, extra: dict | None = None
) -> tuple[Path, Path]:
    """Write <base>.csv and <base>.json."""
    base = Path(base)
    return (
        write_profile_csv(profile, base.with_suffix(".csv"), extra=extra),
        write_profile_json(profile, base.with_suffix(".json"), extra=extra),
    )


def read_profile_csv(path: str | Path) -> BackgroundProfile:
    """Reconstruct a completed profile from a CSV written by this module."""
    path = Path(path)
    rows: list[list[float]] = []
    header: list[str] | None = None
    for line in path.read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            if tuple(header) != CSV_COLUMNS:
                raise ValueError(f"unexpected columns in {path}: {header}")
            continue
        rows.append([float(tok) for tok in line.split(",")])
    if header is None or not rows:
        raise ValueError(f"no data rows in {path}")
    data = {name: np.array([row[j] for row in rows]) for j, name in enumerate(CSV_COLUMNS)}
    r = data["r"]
    grid_n = len(r)
    m_over_r3 = np.empty(grid_n)
    m_over_r3[1:] = data["m"][1:] / r[1:] ** 3
    m_over_r3[0] = (4.0 * np.pi / 3.0) * data["rho"][0]
    return BackgroundProfile(
        R=float(r[-1]),
        grid_n=grid_n,
        r=_readonly(r),
        m=_readonly(data["m"]),
        rho=_readonly(data["rho"]),
        p=_readonly(data["p"]),
        m_over_r3=_readonly(m_over_r3),
        provenance={"solver": "file", "source": str(path)},
        n=_readonly(data["n"]),
        psi=_readonly(data["psi"]),
        omega=_readonly(data["omega"]),
        chi=_readonly(data["chi"]),
        drdchi=_readonly(data["drdchi"]),
        dpsidchi=_readonly(data["dpsidchi"]),
        M_total=float(data["m"][-1]),
        N_total=float(data["chi"][-1]),
    )
