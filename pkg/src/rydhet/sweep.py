"""Parameter sweeps producing deterministic CSV/JSON tables."""

from __future__ import annotations

import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import MHZ, RunConfig
from .errors import NonPerturbativeWarning, NumericalError, RegimeWarning
from .model import AtomSystem, DetectionMode, DriveConfig, ReadoutConfig
from .optimize import PROBE_OMEGA_S
from .readout import (
    conversion_general,
    conversion_high_transmittance,
    dc_power,
    optical_depth_scale,
    peak_to_peak,
)
from .susceptibility import (
    Axis,
    DetuningScenario,
    SusceptibilityDecomposition,
    chi_decompose_closed,
    chi_decompose_numeric,
)

COLUMNS = (
    "omega_L_mhz", "x_mhz", "chi0", "chi1", "kl_chi0", "kl_chi1_omega_s",
    "kappa", "kappa_prime", "p_dc", "p_pp", "gain_db",
)

UNITS = {
    "omega_L_mhz": "2*pi*MHz", "x_mhz": "2*pi*MHz", "chi0": "1", "chi1": "s",
    "kl_chi0": "1", "kl_chi1_omega_s": "1", "kappa": "W*s", "kappa_prime": "W*s",
    "p_dc": "W", "p_pp": "W", "gain_db": "dB",
}


@dataclass
class SweepResult:
    meta: dict
    rows: list = field(default_factory=list)

    @property
    def n_failed(self) -> int:
        return sum(any(isinstance(v, float) and math.isnan(v) for v in r.values()) for r in self.rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        for key in sorted(self.meta):
            out.write(f"# {key}: {json.dumps(self.meta[key], sort_keys=True)}\n")
        out.write(",".join(COLUMNS) + "\n")
        for row in self.rows:
            out.write(",".join(repr(float(row[c])) for c in COLUMNS) + "\n")
        failed = self.n_failed
        if failed:
            out.write(f"# failed_rows: {failed}\n")
        return out.getvalue()

    def to_json(self) -> str:
        rows = [{c: (None if math.isnan(r[c]) else r[c]) for c in COLUMNS} for r in self.rows]
        payload = {"meta": dict(self.meta, failed_rows=self.n_failed), "rows": rows}
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def _numeric_point(args) -> tuple[float, float, bool]:
    atom, drive, axis, x = args
    if drive.omega_s == 0.0:
        drive = drive.replace(omega_s=PROBE_OMEGA_S)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPerturbativeWarning)
        try:
            d = chi_decompose_numeric(atom, drive, DetuningScenario(axis, x))
        except NumericalError:
            return math.nan, math.nan, False
    return float(d.chi0), float(d.chi1), bool(d.perturbative)


def _decompose_series(atom: AtomSystem, drive: DriveConfig, axis: Axis, xs: np.ndarray,
                      method: str, pool) -> tuple[np.ndarray, np.ndarray, int]:
    """chi0, chi1 at every x, plus the count of non-perturbative points."""
    if method == "closed_form":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonPerturbativeWarning)
            d = chi_decompose_closed(atom.idealized(), drive, axis, xs)
        chi0 = np.broadcast_to(d.chi0, xs.shape).astype(float)
        chi1 = np.broadcast_to(d.chi1, xs.shape).astype(float)
        return chi0, chi1, 0 if d.perturbative else len(xs)
    tasks = [(atom, drive, axis, float(x)) for x in xs]
    results = list(pool.map(_numeric_point, tasks)) if pool else [_numeric_point(t) for t in tasks]
    chi0 = np.array([r[0] for r in results])
    chi1 = np.array([r[1] for r in results])
    return chi0, chi1, sum(not r[2] for r in results)


def _readout_columns(chi0, chi1, atom: AtomSystem, readout: ReadoutConfig, omega_s: float):
    kl = optical_depth_scale(atom)
    ok = np.isfinite(chi0) & np.isfinite(chi1)
    d = SusceptibilityDecomposition(np.where(ok, chi0, 0.0), np.where(ok, chi1, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        cols = {
            "chi0": chi0, "chi1": chi1, "kl_chi0": kl * chi0, "kl_chi1_omega_s": kl * chi1 * omega_s,
            "kappa": conversion_general(d, atom, readout),
            "kappa_prime": conversion_high_transmittance(d, atom, readout),
            "p_dc": dc_power(d, atom, readout),
            "p_pp": peak_to_peak(d, atom, readout, omega_s),
        }
    for key in ("kappa", "kappa_prime", "p_dc", "p_pp"):
        cols[key] = np.where(ok, cols[key], np.nan)
    return cols


def _reference_kappa(atom, drive, axis, method, readout) -> float:
    chi0, chi1, _ = _decompose_series(atom, drive, axis, np.zeros(1), method, None)
    d = SusceptibilityDecomposition(chi0, chi1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if readout.detection_mode is DetectionMode.HIGH_TRANSMITTANCE:
            return float(conversion_high_transmittance(d, atom, readout)[0])
        return float(conversion_general(d, atom, readout)[0])


def run_sweep(config: RunConfig, jobs: int = 1) -> SweepResult:
    """Evaluate the configured sweep; output is independent of ``jobs``."""
    atom = config.atom_system()
    readout = config.readout_config()
    axis = Axis(config.sweep.axis)
    xs_mhz = np.linspace(config.sweep.lo_mhz, config.sweep.hi_mhz, config.sweep.n)
    xs = xs_mhz * MHZ
    series = config.sweep.omega_L_series_mhz or [config.drive.omega_L_mhz]
    kappa_key = ("kappa_prime" if readout.detection_mode is DetectionMode.HIGH_TRANSMITTANCE
                 else "kappa")
    rows, resolved_series, nonpert = [], [], 0
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 and config.sweep.method == "numeric" \
        else None
    try:
        for omega_L_mhz in series:
            drive = config.drive_config(omega_L_mhz)
            resolved_series.append(drive.omega_L / MHZ)
            chi0, chi1, bad = _decompose_series(atom, drive, axis, xs, config.sweep.method, pool)
            nonpert += bad
            cols = _readout_columns(chi0, chi1, atom, readout, drive.omega_s)
            k_ref = _reference_kappa(atom, drive, axis, config.sweep.method, readout)
            with np.errstate(divide="ignore", invalid="ignore"):
                gains = 10.0 * np.log10(np.abs(cols[kappa_key]) / abs(k_ref)) if k_ref \
                    else np.full(xs.shape, np.nan)
            for i, x in enumerate(xs_mhz):
                row = {"omega_L_mhz": drive.omega_L / MHZ, "x_mhz": float(x), "gain_db": float(gains[i])}
                row.update({k: float(v[i]) for k, v in cols.items()})
                rows.append(row)
    finally:
        if pool is not None:
            pool.shutdown()
    rows.sort(key=lambda r: (r["x_mhz"], r["omega_L_mhz"]))
    meta = {
        "package": "rydhet",
        "description": config.description,
        "config": config.to_dict(),
        "config_hash": config.digest(),
        "scenario": axis.value,
        "method": config.sweep.method,
        "detection_mode": readout.detection_mode.value,
        "resolved_omega_L_mhz": resolved_series,
        "units": UNITS,
        "gain_reference": f"{kappa_key} at x = 0 with the same omega_L",
        "nonperturbative_points": nonpert,
    }
    return SweepResult(meta=meta, rows=rows)
