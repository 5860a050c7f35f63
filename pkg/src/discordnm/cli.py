"""Command-line entry point.

    discordnm --preset example1 --out-dir runs/ex1
    discordnm --config scenario.cfg --log-base 2 --no-plots

Each run writes series.csv (one row per grid time), summary.json (verdict and
integrals), and figures unless plotting is disabled. Exit codes: 0 success,
2 bad configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import scenarios
from .dynamics import TrajectoryOptions, Trajectory, run_hadamard_demo, run_trajectory
from .errors import ConfigError, InvalidStateError, NumericalError
from .scenarios import ScenarioConfig, build_model, build_scenario
from .tolerances import DEFAULT_TOLERANCES
from .witness import WitnessReport, assemble_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _format_cell(value) -> str:
    if value is None:
        return ""
    return format(float(value) + 0.0, ".12g")


def write_series_csv(trajectory: Trajectory, path: str) -> None:
    """Delimited series with 12 significant digits per cell. Optional columns
    appear only when the run recorded them; cells without a defined value
    (for example concurrence on non-qubit pairs) stay empty."""
    columns = ["t", "S_S", "S_A", "delta_SA", "concurrence_SA"]
    fields = ["t", "entropy_system", "entropy_ancilla", "delta", "concurrence_sa"]
    if any(v is not None for v in trajectory.column("discord_s")):
        columns.append("discord_S")
        fields.append("discord_s")
    if any(v is not None for v in trajectory.column("witness_comm")):
        columns.append("witness_comm")
        fields.append("witness_comm")
    lines = [",".join(columns)]
    for sample in trajectory.samples:
        lines.append(",".join(_format_cell(getattr(sample, f)) for f in fields))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _summary_payload(report: WitnessReport, trajectory: Trajectory,
                     figures: list[str]) -> dict:
    return {
        "verdict": report.verdict,
        "p_nm": report.p_nm,
        "p_nm_tilde": report.p_nm_tilde,
        "first_detection_time": report.first_detection_time,
        "tau": report.tau,
        "settings": report.settings,
        "diagnostics": trajectory.diagnostics,
        "series_csv": "series.csv",
        "figures": figures,
    }


def _run_single(cfg: ScenarioConfig, out_dir: str, coupling: float | None = None) -> dict:
    model = build_model(cfg, coupling=coupling)
    options = TrajectoryOptions(
        log_base=cfg.log_base,
        record_discord=cfg.record_discord,
        record_witness=cfg.record_witness,
    )
    if cfg.model == "hadamard-demo":
        trajectory = run_hadamard_demo(cfg.t_end, cfg.dt, options)
    else:
        trajectory = run_trajectory(model, cfg.t_end, cfg.dt, options)

    if cfg.model == "jaynes-cummings" and cfg.jc_truncation_guard:
        _check_truncation(model, cfg, trajectory)

    settings = cfg.describe()
    if coupling is not None:
        settings["coupling"] = coupling
    report = assemble_report(trajectory, cfg.tau,
                             detection_threshold=cfg.detection_threshold,
                             settings=settings)

    os.makedirs(out_dir, exist_ok=True)
    write_series_csv(trajectory, os.path.join(out_dir, "series.csv"))
    figures: list[str] = []
    if cfg.plots:
        from .plotting import render_run_figures
        figures = render_run_figures(trajectory, report, out_dir)
    payload = _summary_payload(report, trajectory, figures)
    _write_atomic(os.path.join(out_dir, "summary.json"),
                  json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return payload


def _check_truncation(model, cfg: ScenarioConfig, trajectory: Trajectory) -> None:
    """Rerun the witness integral with 20 extra Fock levels; a relative shift
    beyond tolerance means the truncation is not converged."""
    from .witness import p_nm_tilde

    tau = cfg.t_end if cfg.tau is None else cfg.tau
    base_value = p_nm_tilde(trajectory.times, trajectory.deltas(), tau)
    bigger = model.with_n_max(model.n_max + 20)
    options = TrajectoryOptions(log_base=cfg.log_base)
    check = run_trajectory(bigger, cfg.t_end, cfg.dt, options)
    check_value = p_nm_tilde(check.times, check.deltas(), tau)
    scale = max(abs(base_value), abs(check_value), 1e-12)
    rel = abs(base_value - check_value) / scale
    trajectory.diagnostics["truncation_guard"] = {
        "n_max_checked": bigger.n_max,
        "p_nm_tilde_rel_change": rel,
    }
    if rel > DEFAULT_TOLERANCES.truncation_guard_rel:
        raise NumericalError(
            f"witness integral shifts by {rel:.2e} when n_max grows to "
            f"{bigger.n_max}; increase jc.n_max"
        )


def run(cfg: ScenarioConfig) -> dict:
    """Execute a scenario (or coupling sweep) and write its artifacts.
    Returns the top-level summary payload."""
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    if cfg.sweep_couplings is None:
        return _run_single(cfg, out_dir)

    entries = []
    for g in cfg.sweep_couplings:
        sub_dir = os.path.join(out_dir, f"coupling_{g:g}")
        payload = _run_single(cfg, sub_dir, coupling=g)
        entries.append({
            "coupling": g,
            "directory": os.path.basename(sub_dir),
            "p_nm": payload["p_nm"],
            "p_nm_tilde": payload["p_nm_tilde"],
            "verdict": payload["verdict"],
        })
    figures = []
    if cfg.plots:
        from .plotting import render_sweep_figure
        figures = [render_sweep_figure([e["coupling"] for e in entries],
                                       [e["p_nm_tilde"] for e in entries],
                                       [e["p_nm"] for e in entries], out_dir)]
    payload = {"sweep": entries, "settings": cfg.describe(), "figures": figures}
    _write_atomic(os.path.join(out_dir, "sweep_summary.json"),
                  json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return payload


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="discordnm",
        description="Witness non-Markovianity of small open-system models "
                    "through entropy gaps and quantum discord.")
    p.add_argument("--preset", choices=sorted(scenarios.PRESET_NAMES),
                   help="start from a named scenario")
    p.add_argument("--config", help="key=value scenario file (overrides preset)")
    p.add_argument("--out-dir", default=None, help="artifact directory (default: out)")
    p.add_argument("--dt", type=float, default=None, help="time step")
    p.add_argument("--t-end", type=float, default=None, help="final time")
    p.add_argument("--tau", type=float, default=None,
                   help="integration horizon for the measures (default: t_end)")
    p.add_argument("--log-base", choices=["2", "e"], default=None,
                   help="entropy log base (default: 2)")
    p.add_argument("--record-discord", action="store_true", default=None,
                   help="optimize discord at every grid point (adds discord_S column)")
    p.add_argument("--record-witness", action="store_true", default=None,
                   help="record the commutator witness column")
    p.add_argument("--n-max", type=int, default=None,
                   help="cavity truncation level for the exchange model")
    p.add_argument("--sweep", default=None,
                   help="comma-separated coupling values to sweep")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        mapping: dict[str, str] = {}
        if args.preset:
            mapping.update(scenarios.load_preset(args.preset))
        if args.config:
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from exc
            mapping.update(scenarios.parse_config_text(text))
        if not mapping:
            raise ConfigError("nothing to run: give --preset and/or --config")

        overrides: dict = {}
        if args.out_dir is not None:
            overrides["out_dir"] = args.out_dir
        if args.dt is not None:
            overrides["dt"] = args.dt
        if args.t_end is not None:
            overrides["t_end"] = args.t_end
        if args.tau is not None:
            overrides["tau"] = args.tau
        if args.log_base is not None:
            overrides["log_base_name"] = args.log_base
        if args.record_discord:
            overrides["record_discord"] = True
        if args.record_witness:
            overrides["record_witness"] = True
        if args.n_max is not None:
            overrides["jc_n_max"] = args.n_max
        if args.sweep is not None:
            parts = [p for p in args.sweep.split(",") if p.strip()]
            if not parts:
                raise ConfigError("--sweep: empty list")
            try:
                overrides["sweep_couplings"] = tuple(float(p) for p in parts)
            except ValueError:
                raise ConfigError(f"--sweep: cannot parse {args.sweep!r}") from None
        if args.no_plots:
            overrides["plots"] = False

        cfg = build_scenario(mapping, overrides)
        payload = run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidStateError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if "sweep" in payload:
        print(f"sweep of {len(payload['sweep'])} couplings written to {cfg.out_dir}")
        for entry in payload["sweep"]:
            print(f"  coupling {entry['coupling']:g}: "
                  f"p_nm_tilde = {entry['p_nm_tilde']:.6g} ({entry['verdict']})")
    else:
        print(f"{payload['verdict']}")
        print(f"p_nm_tilde = {payload['p_nm_tilde']:.6g}"
              + ("" if payload["p_nm"] is None else f", p_nm = {payload['p_nm']:.6g}"))
        print(f"artifacts in {cfg.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
