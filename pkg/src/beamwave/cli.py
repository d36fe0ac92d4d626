"""
Command-line entry point.

    beamwave <command> --config run.json [--verify] [--output-dir DIR]

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 eigen/index mismatch or failed verification.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, continuation, dynamics, stability
from .config import COMMANDS, RunConfig, load_config
from .errors import (BeamwaveError, ConfigError, DegenerateKernel, EigenFailure,
                     IndexMismatch, NoTransitionInRange, StageNonConvergence)
from .grid import make_grid, resample
from .nonlinearity import Nonlinearity
from .params import BeamParameters, NlsParameters
from .profile import residual, solve_beam, solve_nls

log = logging.getLogger("beamwave")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_MISMATCH = 0, 2, 3, 4


class VerificationFailed(BeamwaveError):
    pass


@dataclass
class RunReport:
    config: dict
    manifest: dict = field(default_factory=dict)
    headline: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    status: str = "ok"
    exit_code: int = EXIT_OK
    failure: str = None

    def to_dict(self):
        return {
            "config": self.config,
            "manifest": self.manifest,
            "headline": self.headline,
            "checks": self.checks,
            "status": self.status,
            "exit_code": self.exit_code,
            "failure": self.failure,
        }


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def write_json(path: Path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _nonlinearity(cfg: RunConfig):
    if cfg.equation == "beam-exp":
        return Nonlinearity.exponential()
    return Nonlinearity.polynomial(*cfg.coefficients)


def _beam_params(cfg: RunConfig, c=None):
    gamma = 1.0 if cfg.equation == "beam-exp" else cfg.gamma
    return BeamParameters(cfg.c if c is None else c, gamma, _nonlinearity(cfg))


def _grid(cfg):
    return make_grid(cfg.grid.n_points, cfg.grid.half_length)


def _solve(cfg, grid, c=None, omega=None):
    tol = cfg.tolerances["newton"]
    if cfg.equation == "nls":
        return solve_nls(NlsParameters(cfg.mu, cfg.omega if omega is None else omega), grid, tol)
    return solve_beam(_beam_params(cfg, c), grid, tol)


def verify_residual(wave, tol):
    """Residual of the profile interpolated to a grid twice as fine."""
    fine = resample(wave.profile, wave.grid.refined())
    return float(np.max(np.abs(residual(fine.values, wave.equation, fine.grid)))), tol


class _Runner:
    def __init__(self, cfg: RunConfig, out: Path, verify: bool):
        self.cfg = cfg
        self.out = out
        self.verify = verify
        self.report = RunReport(cfg.to_dict())

    def artifact(self, name, role):
        self.report.manifest[name] = role
        return self.out / name

    def check(self, name, value, limit, ok=None):
        ok = bool(value < limit) if ok is None else bool(ok)
        self.report.checks[name] = {"value": value, "limit": limit, "ok": ok}
        if not ok:
            raise VerificationFailed(f"verification '{name}' failed: {value} vs {limit}")

    def wave_csv(self, wave):
        write_csv(self.artifact("wave.csv", "profile samples (x, phi)"), ["x", "phi"],
                  zip(wave.grid.x, wave.phi))

    # commands -----------------------------------------------------------
    def solve(self):
        cfg = self.cfg
        wave = _solve(cfg, _grid(cfg))
        self.wave_csv(wave)
        h = self.report.headline
        h["residual"] = wave.residual_sup
        h["phi_max"] = float(np.max(wave.phi))
        h["phi_min"] = float(np.min(wave.phi))
        if self.verify:
            res, tol = verify_residual(wave, cfg.tolerances["verify_residual"])
            self.check("residual_refined_grid", res, tol)
        return wave

    def stability(self):
        cfg = self.cfg
        wave = self.solve()
        rep = stability.eigen_linearization(wave, eigen_tol=cfg.tolerances["eigen"])
        order = np.lexsort((rep.eigenvalues.imag, -rep.eigenvalues.real))
        lam = rep.eigenvalues[order]
        verdict = None
        try:
            verdict = stability.index_report(rep)
        finally:
            write_json(self.artifact("spectrum.json", "eigenvalues, counts, vk, verdict"), {
                "eigenvalues": [[float(z.real), float(z.imag)] for z in lam],
                "counts": {"k_r": rep.counts[0], "k_c": rep.counts[1], "k_i_minus": rep.counts[2]},
                "morse_L_plus": rep.morse_L_plus,
                "morse_L_minus": rep.morse_L_minus,
                "vk": rep.vk_value,
                "max_re": rep.max_re,
                "n_L": rep.n_L,
                "n_D": rep.n_D,
                "index_identity_ok": rep.index_identity_ok,
                "internal_modes": [[float(z.real), float(z.imag)] for z in stability.internal_modes(rep)],
                "verdict": None if verdict is None else ("stable" if verdict.stable else "unstable"),
            })
        h = self.report.headline
        h.update(max_re=rep.max_re, vk=rep.vk_value, verdict="stable" if verdict.stable else "unstable")
        if self.verify:
            agree = (rep.vk_value < 0) == (rep.max_re < cfg.tolerances["eigen"])
            self.check("vk_eigen_sign", rep.vk_value, 0.0, ok=agree)
        return rep

    def branch(self, nls=False):
        cfg = self.cfg
        co = cfg.continuation
        grid = _grid(cfg)
        if nls:
            start = _solve(cfg, grid, omega=co.param_start)
        else:
            start = _solve(cfg, grid, c=co.param_start)
        controls = continuation.Controls(ds_min=co.ds_min, ds_max=co.ds_max,
                                         tol=cfg.tolerances["continuation"],
                                         max_points=co.max_points, stop_at_fold=co.stop_at_fold)
        curve = continuation.extend_branch(start, co.param_end, co.ds, controls)
        try:
            continuation.branch_diagnostics(curve, cfg.tolerances["eigen"])
        finally:
            self._branch_csv(curve, nls)
        h = self.report.headline
        h["termination"] = curve.termination.value
        h["points"] = len(curve)
        h["param_reached"] = float(curve.parameters[-1])
        try:
            h["c_star" if not nls else "omega_star"] = continuation.locate_transition(curve)
        except NoTransitionInRange as exc:
            h["transition"] = str(exc)
        try:
            h["eigen_crossing"] = continuation.eigen_transition(curve, cfg.tolerances["eigen"])
        except NoTransitionInRange:
            h["eigen_crossing"] = None
        continuation.check_index_counts(curve)
        if self.verify:
            eig_tol = cfg.tolerances["eigen"]
            bad = [p.parameter for p in curve.points
                   if p.vk_value is not None and (p.vk_value < 0) != (p.max_re_lambda < eig_tol)]
            self.check("vk_eigen_sign_mismatches", len(bad), 1, ok=not bad)
            res = max(verify_residual(p.wave, 0)[0] for p in curve.points)
            self.check("max_residual_refined_grid", res, cfg.tolerances["verify_residual"])
        return curve

    def _branch_csv(self, curve, nls):
        if nls:
            header = ["omega", "norm_phi_sq", "vk", "max_re_lambda"]
            rows = [(p.parameter, p.diag_momentum, p.vk_value, p.max_re_lambda) for p in curve.points]
        else:
            header = ["c", "norm_phi_prime_sq", "c_norm_phi_prime_sq", "vk", "max_re_lambda"]
            rows = [(p.parameter, p.diag_norm, p.diag_momentum, p.vk_value, p.max_re_lambda)
                    for p in curve.points]
        write_csv(self.artifact("branch.csv", "branch table"), header, rows)

    def evolve(self):
        cfg = self.cfg
        ev = cfg.evolution
        wave = self.solve()
        params = wave.params
        if ev.epsilon:
            mode = stability.ranked_mode(wave, ev.mode_index)
            self.report.headline["mode_eigenvalue"] = mode[0]
            init = dynamics.perturbed_wave_initial(wave, mode, ev.epsilon)
        else:
            init = dynamics.perturbed_wave_initial(
                wave, (0.0, np.ones(wave.grid.n_points), np.zeros(wave.grid.n_points)), 0.0)
        try:
            summary = dynamics.evolve(init, ev.T, ev.dt, params, wave_reference=wave,
                                      sample_every=ev.sample_every, inner_tol=cfg.tolerances["inner"],
                                      epsilon=ev.epsilon or None)
        except StageNonConvergence as exc:
            self._evolution_csv(exc.summary)
            raise
        self._evolution_csv(summary)
        h = self.report.headline
        h["termination"] = summary.termination
        h["t_end"] = float(summary.times[-1])
        h["h_drift"] = summary.relative_drift()
        h["max_deviation"] = float(np.nanmax(summary.deviation))
        if summary.growth_fit is not None:
            h["growth_rate"], h["growth_window"] = summary.growth_fit
        if self.verify and summary.termination == "completed":
            self.check("h_drift", h["h_drift"], cfg.tolerances["verify_drift"])
        return summary

    def _evolution_csv(self, summary):
        write_csv(self.artifact("evolution.csv", "time series (t, H, sup|u|, deviation)"),
                  ["t", "hamiltonian", "sup_u", "deviation"], summary.samples)

    def kernel(self):
        cfg = self.cfg
        c = cfg.c
        x = np.linspace(-cfg.kernel_x_max, cfg.kernel_x_max, cfg.kernel_samples)
        cols = [analysis.green_kernel(x, c)] + [analysis.green_kernel_derivative(x, c, j) for j in (1, 2, 3)]
        write_csv(self.artifact("kernel.csv", "Green kernel and derivatives (x, K, K1, K2, K3)"),
                  ["x", "K", "K1", "K2", "K3"], zip(x, *cols))
        fit = analysis.kernel_decay_fit(c)
        h = self.report.headline
        h.update(K0=analysis.green_kernel(0.0, c), decay_rate=fit.rate,
                 decay_rate_theory=analysis.decay_rate(c))
        if self.verify:
            rel = abs(fit.rate / analysis.decay_rate(c) - 1.0)
            self.check("kernel_decay_rate_rel_error", rel, 0.02)

    def variational(self):
        cfg = self.cfg
        grid = _grid(cfg)
        nl = _nonlinearity(cfg)
        res = analysis.variational_maximize(cfg.lambda_, cfg.c, nl, grid, cfg.tolerances["variational"])
        data = {"lambda": res.lambda_, "kappa": res.kappa, "M_lambda": res.objective,
                "el_residual": res.el_residual, "kappa_rayleigh": res.kappa_rayleigh,
                "iterations": res.iterations}
        write_json(self.artifact("variational.json", "lambda, kappa, M_lambda, el_residual"), data)
        self.report.headline.update(kappa=res.kappa, el_residual=res.el_residual, M_lambda=res.objective)
        if self.verify:
            self.check("el_residual", res.el_residual, 1e-6)
            self.check("kappa_consistency", abs(res.kappa - res.kappa_rayleigh) / res.kappa, 1e-6)
        return res


def run(cfg: RunConfig, verify: bool = False) -> RunReport:
    """Execute one configured pipeline and write its artifacts plus ``report.json``."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    runner = _Runner(cfg, out, verify)
    rep = runner.report
    actions = {
        "solve": runner.solve,
        "stability": runner.stability,
        "branch": lambda: runner.branch(nls=False),
        "nls-branch": lambda: runner.branch(nls=True),
        "evolve": runner.evolve,
        "kernel": runner.kernel,
        "variational": runner.variational,
    }
    try:
        actions[cfg.command]()
    except (IndexMismatch, EigenFailure, DegenerateKernel, VerificationFailed) as exc:
        rep.status, rep.exit_code, rep.failure = "failed", EXIT_MISMATCH, f"{type(exc).__name__}: {exc}"
    except BeamwaveError as exc:
        rep.status, rep.exit_code, rep.failure = "failed", EXIT_SOLVER, f"{type(exc).__name__}: {exc}"
    rep.manifest["report.json"] = "run report"
    write_json(out / "report.json", rep.to_dict())
    return rep


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="beamwave", description=__doc__.strip().splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--verify", action="store_true", help="rerun the independent checks")
    parser.add_argument("--output-dir", help="overrides output_dir from the config")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if cfg.command != args.command:
            raise ConfigError(f"command line says '{args.command}' but config says '{cfg.command}'")
    except ConfigError as exc:
        print(f"beamwave: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output_dir:
        cfg.output_dir = args.output_dir
    rep = run(cfg, verify=args.verify)
    if rep.exit_code:
        print(f"beamwave: {rep.failure}", file=sys.stderr)
    else:
        print(json.dumps(_jsonable(rep.headline), sort_keys=True))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
