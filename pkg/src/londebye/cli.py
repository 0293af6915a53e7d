"""Command-line front end: solves, accuracy tables, sweeps, physics checks.

Subcommands
-----------
solve              solve the two-point-source benchmark problem, write the
                   spectral densities as JSON
accuracy           convergence table (lambda_L, n_max, eps1, eps2, M, wall time)
condition-sweep    kappa over a (sigma_l, sigma_m) grid, CSV
biot-savart-check  volume-current reconstruction of the exterior field, JSON
verify             full physics-identity report, JSON

Configuration is a plain ``key = value`` file (``--config``); individual CLI
flags override file values.  Every output embeds or sits next to the fully
resolved configuration so runs are reproducible records.  Exit codes:
0 success, 1 invalid configuration/arguments, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import conditioning, verify
from .debye_core import LondonConfig, solve_scattering
from .fields import (
    ReferenceSources,
    accuracy_errors,
    boundary_data_from_reference,
    default_targets,
)
from .sphgrid import SphereGrid

__all__ = ["RunConfig", "main"]


class CliError(Exception):
    """Invalid configuration or arguments (exit code 1)."""


@dataclass
class RunConfig:
    """Fully resolved parameters of one run (embedded in every output)."""

    command: str = ""
    lambda_L: float = 1.0
    sigma_m: float = 0.0
    sigma_l: float = 0.0
    n_max: int = 40
    n_max_list: list[int] = field(default_factory=lambda: [10, 20, 40])
    lambda_list: list[float] = field(default_factory=lambda: [1.0])
    x_o: list[float] = field(default_factory=lambda: [0.0, 0.0, 2.0])
    x_i: list[float] = field(default_factory=lambda: [0.3, 0.0, 0.0])
    v_o_re: list[float] = field(default_factory=lambda: [1.0, 0.0, 0.0])
    v_o_im: list[float] = field(default_factory=lambda: [0.0, 1.0, 0.0])
    n_interior: int = 10
    n_exterior: int = 10
    sigma_grid_points: int = 21
    sigma_grid_extent: float = 5.0
    quad_order: int = 16
    tail_tol: float = conditioning.DEFAULT_TAIL_TOL
    seed: int = 0
    out: str = ""

    def validate(self) -> None:
        if self.lambda_L <= 0:
            raise CliError(f"lambda must be positive, got {self.lambda_L}")
        if any(l <= 0 for l in self.lambda_list):
            raise CliError(f"all lambda values must be positive, got {self.lambda_list}")
        if self.n_max < 0:
            raise CliError(f"nmax must be nonnegative, got {self.n_max}")
        if any(n < 0 for n in self.n_max_list):
            raise CliError(f"all nmax values must be nonnegative, got {self.n_max_list}")
        if np.linalg.norm(self.x_o) <= 1.0:
            raise CliError(f"x_o must lie outside the unit sphere, got {self.x_o}")
        if np.linalg.norm(self.x_i) >= 1.0:
            raise CliError(f"x_i must lie inside the unit sphere, got {self.x_i}")
        if self.sigma_grid_points < 1:
            raise CliError("sigma_grid_points must be at least 1")
        if self.quad_order < 1:
            raise CliError("quad_order must be at least 1")
        if not (0 < self.tail_tol < 1):
            raise CliError(f"tail_tol must be in (0, 1), got {self.tail_tol}")

    def v_o(self) -> np.ndarray:
        return np.asarray(self.v_o_re, dtype=float) + 1j * np.asarray(
            self.v_o_im, dtype=float
        )

    def sources(self, lambda_L: float | None = None) -> ReferenceSources:
        return ReferenceSources(
            x_o=np.asarray(self.x_o, dtype=float),
            x_i=np.asarray(self.x_i, dtype=float),
            v_o=self.v_o(),
            lambda_L=self.lambda_L if lambda_L is None else lambda_L,
        )

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_LIST_FIELDS = {"n_max_list", "lambda_list", "x_o", "x_i", "v_o_re", "v_o_im"}
_INT_FIELDS = {
    "n_max",
    "n_interior",
    "n_exterior",
    "sigma_grid_points",
    "quad_order",
    "seed",
}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _LIST_FIELDS:
        parts = [p for p in raw.replace(",", " ").split() if p]
        conv = int if key == "n_max_list" else float
        try:
            return [conv(p) for p in parts]
        except ValueError as exc:
            raise CliError(f"config key {key!r}: cannot parse {raw!r}") from exc
    if key in _INT_FIELDS:
        try:
            return int(raw)
        except ValueError as exc:
            raise CliError(f"config key {key!r}: expected integer, got {raw!r}") from exc
    if key in ("out", "command"):
        return raw
    try:
        return float(raw)
    except ValueError as exc:
        raise CliError(f"config key {key!r}: expected number, got {raw!r}") from exc


def load_config_file(path: str) -> dict:
    """Plain ``key = value`` lines; ``#`` comments; lists whitespace/comma split."""
    valid = {f.name for f in dataclasses.fields(RunConfig)}
    out = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{lineno}: expected 'key = value'")
                key, raw = (s.strip() for s in line.split("=", 1))
                if key not in valid:
                    raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
                out[key] = _parse_value(key, raw)
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(cfg, key, value)
    overrides = {
        "lambda_L": args.lambda_L,
        "sigma_m": args.sigma_m,
        "sigma_l": args.sigma_l,
        "n_max": args.nmax,
        "seed": args.seed,
        "out": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.command = args.command
    cfg.validate()
    return cfg


def _write_json(path: str, cfg: RunConfig, payload: dict) -> None:
    doc = {"config": cfg.as_dict(), **payload}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_config_sidecar(out_path: str, cfg: RunConfig) -> None:
    with open(out_path + ".config.json", "w") as fh:
        json.dump(cfg.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_solve(cfg: RunConfig) -> int:
    src = cfg.sources()
    london = LondonConfig(
        lambda_L=cfg.lambda_L,
        n_max=cfg.n_max,
        sigma_m=cfg.sigma_m,
        sigma_l=cfg.sigma_l,
    )
    grid = SphereGrid(cfg.n_max)
    B_in, J_in_n = boundary_data_from_reference(src, grid)
    sol = solve_scattering(london, grid, B_in, J_in_n)
    out = cfg.out or "solution.json"
    _write_json(out, cfg, {"solution": sol.to_json_dict()})
    print(f"solved lambda={cfg.lambda_L} n_max={cfg.n_max}; wrote {out}")
    return 0


def cmd_accuracy(cfg: RunConfig) -> int:
    out = cfg.out or "accuracy.csv"
    rows = []
    header = ("lambda_L", "n_max", "eps1", "eps2", "M", "wall_time_s")
    print(" ".join(f"{h:>12s}" for h in header))
    for lam in cfg.lambda_list:
        src = cfg.sources(lam)
        t_int, t_ext = default_targets(
            cfg.seed, n_interior=cfg.n_interior, n_exterior=cfg.n_exterior
        )
        for n_max in cfg.n_max_list:
            t0 = time.perf_counter()
            london = LondonConfig(
                lambda_L=lam,
                n_max=n_max,
                sigma_m=cfg.sigma_m,
                sigma_l=cfg.sigma_l,
            )
            grid = SphereGrid(n_max)
            B_in, J_in_n = boundary_data_from_reference(src, grid)
            sol = solve_scattering(london, grid, B_in, J_in_n)
            eps1, eps2, M = accuracy_errors(sol, src, t_int, t_ext)
            wall = time.perf_counter() - t0
            rows.append((lam, n_max, eps1, eps2, M, wall))
            print(
                f"{lam:12.4g} {n_max:12d} {eps1:12.4e} {eps2:12.4e} "
                f"{M:12.4e} {wall:12.3f}"
            )
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for lam, n_max, eps1, eps2, M, wall in rows:
            wr.writerow(
                [f"{lam:.17g}", n_max, f"{eps1:.17g}", f"{eps2:.17g}",
                 f"{M:.17g}", f"{wall:.6f}"]
            )
    _write_config_sidecar(out, cfg)
    print(f"wrote {out}")
    return 0


def cmd_condition_sweep(cfg: RunConfig) -> int:
    out = cfg.out or "condition_sweep.csv"
    ext = cfg.sigma_grid_extent
    values = np.linspace(-ext, ext, cfg.sigma_grid_points)
    result = conditioning.sweep(
        cfg.lambda_L,
        sigma_l_values=values,
        sigma_m_values=values,
        tail_tol=cfg.tail_tol,
    )
    conditioning.write_sweep_csv(result, out)
    _write_config_sidecar(out, cfg)
    sl, sm = result.min_location()
    print(
        f"lambda={cfg.lambda_L}: kappa minimum {result.kappa.min():.6g} at "
        f"(sigma_l, sigma_m) = ({sl:g}, {sm:g}); cap degree {result.n_cap}; "
        f"wrote {out}"
    )
    return 0


def cmd_biot_savart(cfg: RunConfig) -> int:
    out = cfg.out or "biot_savart.json"
    sol = verify.current_free_solution(cfg.lambda_L, cfg.n_max, cfg.x_o)
    quad = verify.VolumeQuadrature.build(
        cfg.lambda_L, max(cfg.n_max, 24), order=cfg.quad_order
    )
    check = verify.biot_savart_check(sol, seed=cfg.seed, quad=quad)
    conv = verify.biot_savart_convergence(sol)
    payload = {
        "rel_error": check["rel_error"],
        "quad_nodes": check["quad_nodes"],
        "refinement_orders": list(conv["orders"]),
        "refinement_rel_errors": conv["rel_errors"],
        "refinement_ratios": conv["ratios"],
    }
    _write_json(out, cfg, payload)
    print(
        f"biot-savart rel error {check['rel_error']:.3e}; refinement ratio "
        f"{min(conv['ratios']):.3g}; wrote {out}"
    )
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    out = cfg.out or "verify.json"
    quad = verify.VolumeQuadrature.build(
        cfg.lambda_L, max(cfg.n_max, 24), order=cfg.quad_order
    )
    rows = verify.verification_report(
        lambda_L=cfg.lambda_L, n_max=cfg.n_max, quad=quad
    )
    _write_json(out, cfg, {"checks": rows})
    n_pass = sum(r["pass"] for r in rows)
    for r in rows:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"{status} {r['check']}: {r['value']:.6g} (tol {r['tolerance']:g})")
    print(f"{n_pass}/{len(rows)} checks passed; wrote {out}")
    return 0 if n_pass == len(rows) else 2


_COMMANDS = {
    "solve": cmd_solve,
    "accuracy": cmd_accuracy,
    "condition-sweep": cmd_condition_sweep,
    "biot-savart-check": cmd_biot_savart,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on bad arguments, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="londebye", description=__doc__.split("\n", 1)[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--lambda", dest="lambda_L", type=float, default=None,
                       help="London penetration depth")
        p.add_argument("--sigma-m", dest="sigma_m", type=float, default=None)
        p.add_argument("--sigma-l", dest="sigma_l", type=float, default=None)
        p.add_argument("--nmax", type=int, default=None,
                       help="spherical-harmonic truncation degree")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for random target placement")
        p.add_argument("--config", default=None,
                       help="key = value configuration file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        cfg = resolve_config(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](cfg)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
