"""Command-line front end.

    biphoton <subcommand> --config run.ini [--out DIR] [--format csv|json]

Subcommands: design, jsa, hom, mz, schmidt, timedomain.  Every run writes
``report.json`` to the output directory (also on failure).  Exit status is
0 on success, 2 when a physical precondition fails (type-I crystal,
under-resolved grid, asymmetric state, ...) and 1 on configuration or I/O
errors.  ``BIPHOTON_OUT`` overrides the configured output directory;
``--out`` overrides both.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import schmidt_decompose, time_domain
from .config import RunConfig, load_config
from .dispersion import CrystalConfig, gamma, hessian_mu
from .errors import ConfigError, PhysicsError
from .formatting import fmt, write_csv, write_json
from .interferometry import HOM, MZ, scan
from .jsa import FrequencyGrid, PumpSpectrum, build_jsa, db_limit, default_grid, marginal_spectra, tb_limit
from .phasematch import check_extended_pm, length_window, omega_f, solve_grating_period

log = logging.getLogger("biphoton")

SUBCOMMANDS = ("design", "jsa", "hom", "mz", "schmidt", "timedomain")
OUT_ENV = "BIPHOTON_OUT"
WINDOW_MARGIN = 3.0
MZ_SAMPLES_PER_PERIOD = 50


class Run:
    """State of a single CLI invocation."""

    def __init__(self, rc: RunConfig, subcommand: str, out_dir: Path, data_format: str):
        self.rc = rc
        self.subcommand = subcommand
        self.out = out_dir
        self.data_format = data_format
        self.outputs = []
        self.warnings = []
        self.derived = {}
        self.observables = {}

    # -- shared pieces -------------------------------------------------------

    def crystal(self) -> CrystalConfig:
        cfg = self.rc.crystal()
        if self.rc.period == "solve":
            period = solve_grating_period(cfg)
            cfg = cfg.with_period(period)
        self.derived["grating_period"] = cfg.period
        return cfg

    def pump(self) -> PumpSpectrum:
        return PumpSpectrum(self.rc.omega_p, self.rc.bandwidth)

    def derive(self, cfg: CrystalConfig):
        d = self.derived
        d["omega_p"] = cfg.omega_p
        d["Omega_p"] = self.rc.bandwidth
        d["gamma"] = gamma(cfg)
        d["mu"] = hessian_mu(cfg)
        try:
            d["omega_f"] = omega_f(cfg)
            d["tb_dip_width"] = 4.0 * math.pi / d["omega_f"]
        except PhysicsError:
            d["omega_f"] = None
            d["tb_dip_width"] = None
        d["db_mz_envelope_fwhm"] = 4.0 * math.sqrt(math.log(2.0)) / self.rc.bandwidth
        try:
            window = length_window(cfg, self.rc.bandwidth)
        except PhysicsError:
            d["window"] = None
        else:
            d["window"] = window.to_dict()
            if not window.contains(cfg.length, WINDOW_MARGIN):
                msg = (f"crystal length {cfg.length:g} um is within a factor {WINDOW_MARGIN:g} of the "
                       f"validity window ({window.L_min:.4g}, {window.L_max:.4g}) um")
                self.warnings.append(msg)
                log.warning(msg)

    def grid(self, cfg, pump, limit=None) -> FrequencyGrid:
        auto = default_grid(cfg, pump, limit)
        grid = FrequencyGrid(self.rc.grid_n or auto.n, self.rc.grid_span or auto.span)
        self.derived["grid"] = {"n": grid.n, "span": grid.span, "dnu": grid.dnu,
                                "auto_n": self.rc.grid_n is None, "auto_span": self.rc.grid_span is None}
        return grid

    def jsa_grid(self, cfg, pump):
        limit = {"TB": "cw", "DB": "long"}.get(self.rc.state)
        return build_jsa(cfg, pump, self.grid(cfg, pump, limit),
                         flat_prefactor=self.rc.flat_prefactor, limit=limit)

    def emit(self, name: str, csv_header=None, rows=None, payload=None):
        """Write ``name``.csv or ``name``.json according to the output format."""
        if self.data_format == "csv" and rows is not None:
            path = self.out / f"{name}.csv"
            write_csv(path, csv_header, rows)
        else:
            path = self.out / f"{name}.json"
            write_json(path, payload)
        self.outputs.append(path.name)

    # -- subcommands ---------------------------------------------------------

    def design(self):
        unpoled = self.rc.crystal().with_period(None)
        cfg = self.crystal()
        self.derive(cfg)
        report = check_extended_pm(cfg).to_dict()
        self.observables["phase_match"] = report
        self.observables["unpoled_mismatch"] = unpoled.pump.k0 - unpoled.signal.k0 - unpoled.idler.k0
        table = {
            "grating_period_um": cfg.period,
            "gamma_ps_per_um": self.derived["gamma"],
            "mu_ps2_per_um": self.derived["mu"],
            "L_min_um": (self.derived["window"] or {}).get("L_min"),
            "L_max_um": (self.derived["window"] or {}).get("L_max"),
            "omega_f_rad_per_ps": self.derived["omega_f"],
            "residual_index": report["residual_index"],
            "residual_slowness": report["residual_slowness"],
            "type_ii_gap": report["type_ii_gap"],
        }
        if self.data_format == "csv":
            path = self.out / "design.csv"
            with open(path, "w", newline="\n") as fh:
                fh.write("quantity,value\n")
                for k, v in table.items():
                    if v is not None:
                        fh.write(f"{k},{fmt(v)}\n")
            self.outputs.append(path.name)
        else:
            self.emit("design", payload={**table, "satisfied": report["satisfied"]})

    def jsa(self):
        cfg = self.crystal()
        self.derive(cfg)
        pump = self.pump()
        j = self.jsa_grid(cfg, pump)
        summary = j.summary()
        self.observables["jsa"] = summary
        signal, idler = marginal_spectra(j)
        self.observables["marginal_mismatch"] = float(np.max(np.abs(signal - idler)))
        if self.data_format == "csv":
            self.emit("jsa", ["nu_s", "nu_i", "re", "im"], j.rows())
            self.emit("marginals", ["nu", "signal", "idler"], zip(j.nu, signal, idler))
        else:
            self.emit("jsa", payload={**summary, "nu": j.nu.tolist(),
                                      "signal": signal.tolist(), "idler": idler.tolist()})

    def _scan(self, mode):
        cfg = self.crystal()
        self.derive(cfg)
        pump = self.pump()
        kind = self.rc.state
        if kind == "TB":
            state = tb_limit(cfg)
        elif kind == "DB":
            state = db_limit(cfg, pump, flat_prefactor=self.rc.flat_prefactor)
        else:
            state = self.jsa_grid(cfg, pump)
        tau_min, tau_max, points = self.scan_range(mode, kind, cfg, pump)
        result = scan(state, mode, tau_min, tau_max, points)
        self.observables["scan"] = {"mode": mode, "state_kind": result.state_kind,
                                    "tau_min": tau_min, "tau_max": tau_max, "points": points,
                                    **result.observables()}
        name = "hom" if mode == HOM else "mz"
        if self.data_format == "csv":
            path = self.out / f"{name}.csv"
            result.to_csv(path)
            self.outputs.append(path.name)
        else:
            self.emit(name, payload={**result.header(), "tau": result.tau.tolist(), "P": result.P.tolist()})

    def scan_range(self, mode, kind, cfg, pump):
        rc = self.rc
        period = 2.0 * math.pi / cfg.omega_p
        if rc.tau_min is not None:
            lo, hi = rc.tau_min, rc.tau_max
        elif mode == HOM:
            half = 1.5 * 4.0 * math.pi / omega_f(cfg) if kind != "DB" else 10.0
            lo, hi = -half, half
        elif kind == "TB":
            lo, hi = -2.5 * period, 2.5 * period
        else:
            half = 12.0 / pump.bandwidth
            lo, hi = -half, half
        if rc.points is not None:
            points = rc.points
        elif mode == MZ:
            points = int(math.ceil((hi - lo) / period * MZ_SAMPLES_PER_PERIOD)) + 1
        else:
            points = 1201
        return lo, hi, points

    def hom(self):
        self._scan(HOM)

    def mz(self):
        self._scan(MZ)

    def schmidt(self):
        cfg = self.crystal()
        self.derive(cfg)
        pump = self.pump()
        j = self.jsa_grid(cfg, pump)
        spec = schmidt_decompose(j, min(self.rc.rank_cut, j.grid.n))
        self.observables["schmidt"] = spec.to_dict()
        self.emit("schmidt", ["n", "p_n"], ((n, p) for n, p in enumerate(spec.coefficients)),
                  payload={**spec.to_dict(n_coefficients=spec.coefficients.size)})

    def timedomain(self):
        cfg = self.crystal()
        self.derive(cfg)
        pump = self.pump()
        j = self.jsa_grid(cfg, pump)
        td = time_domain(j)
        self.observables["time_domain"] = td.to_dict()
        self.emit("timedomain", ["t_s", "t_i", "intensity"], td.rows(), payload=td.to_dict())

    # -- driver ----------------------------------------------------------------

    def report(self, status="ok", error=None) -> dict:
        return {
            "tool": "biphoton",
            "version": __version__,
            "subcommand": self.subcommand,
            "status": status,
            "error": error,
            "inputs": self.rc.to_dict(),
            "derived": self.derived,
            "observables": self.observables,
            "warnings": self.warnings,
            "outputs": sorted(set(self.outputs)),
        }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biphoton", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="run configuration file")
    parser.add_argument("--out", help="output directory (overrides $%s and the config)" % OUT_ENV)
    parser.add_argument("--format", choices=("csv", "json"), help="data file format")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for physics errors
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    try:
        rc = load_config(args.config)
    except ConfigError as exc:
        log.error("%s", exc)
        return 1
    out = Path(args.out or os.environ.get(OUT_ENV) or rc.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        log.error("cannot create output directory %s: %s", out, exc.strerror)
        return 1
    run = Run(rc, args.subcommand, out, args.format or rc.format)
    status, error, code = "ok", None, 0
    try:
        getattr(run, args.subcommand)()
    except PhysicsError as exc:
        status, error, code = "physics_error", str(exc), 2
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        status, error, code = "error", str(exc), 1
    if error:
        log.error("%s", error)
    try:
        write_json(out / "report.json", run.report(status, error))
    except OSError as exc:
        log.error("cannot write report: %s", exc.strerror)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
