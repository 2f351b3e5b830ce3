"""Command line front end.

Subcommands:

  diagram   spin diagram and type classification of one measurement basis
  discord   minimize D / I1 / I2 for a state file or an aligned mixture
  sweep     theta sweep over aligned mixtures, CSV output
  chain     XYZ chain ground state, parity check, reduced-pair measures
  verify    randomized property suites and closed-form cross checks

Exit codes: 0 ok, 1 verification failure, 2 usage, 3 input format,
4 numerical non-convergence.

State files are JSON {"dims": [dA, dB], "matrix": [[re, im], ...]} with the
matrix flattened row-major. Chain spec files are JSON
{"n": 4, "s": 1.0, "b": [...] or scalar, "J": {"x": [[i, j, val], ...], ...}}.
Optimizer config files are JSON with OptimizerConfig fields; n_per_axis is
keyed by family name (spin, type_ii, type_iii, general).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .linalg import DensityMatrix, DimensionError, commutator
from .measurements import (
    MeasurementBasis,
    MeasurementParams,
    diagram_record,
    full_basis,
    spin_diagram,
    type_ii_basis,
    type_iii_basis,
)
from .measures import (
    apply_measurement,
    deficit_given,
    discord_given,
    i2_given,
    measured_frame,
    stationarity_f,
    VON_NEUMANN,
)
from .models import (
    THETA_C,
    XYZChainSpec,
    aligned_mixture,
    d_closed,
    ground_state,
    i2_closed,
    load_state,
    reduce_pair,
    save_state,
    xyz_hamiltonian,
)
from .optimize import (
    MeasurementFamily,
    OptimizerConfig,
    minimize,
    minimize_all_families,
    tangent_gradient,
    _family_unitary,
    _objective_fn,
    family_box,
)
from .spins import composite_parity, spin_dim

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_NOCONV = 4

MEASURES = ("d", "i1", "i2")

SWEEP_COLUMNS = (
    "theta,D,I1,I2,D_family,I1_family,I2_family,alpha,beta,gamma,phi,"
    "D_residual,I1_residual,I2_residual,D_closed,I2_closed"
)


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _fmt(x: float) -> str:
    return "%.12g" % x


def _dump_json(obj, stream=None) -> None:
    json.dump(obj, stream or sys.stdout, indent=2)
    (stream or sys.stdout).write("\n")


# --- optimizer config -------------------------------------------------------


def load_config(path: str | None) -> OptimizerConfig:
    """OptimizerConfig from a JSON file; defaults when path is None."""
    cfg = OptimizerConfig()
    if path is None:
        return cfg
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(OptimizerConfig)}
    for key, value in raw.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        if key == "n_per_axis":
            table = dict(cfg.n_per_axis)
            for name, count in value.items():
                table[MeasurementFamily(name)] = int(count)
            cfg.n_per_axis = table
        elif key in ("max_iters", "polish_iters", "refine_top_k"):
            setattr(cfg, key, int(value))
        else:
            setattr(cfg, key, float(value))
    return cfg


def dump_config(cfg: OptimizerConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["n_per_axis"] = {fam.value: n for fam, n in cfg.n_per_axis.items()}
    return out


# --- shared report plumbing -------------------------------------------------


def _params_dict(p: MeasurementParams) -> dict:
    return {
        "alpha": p.alpha,
        "beta": p.beta,
        "gamma": p.gamma,
        "psi": p.psi,
        "theta_r": p.theta_r,
        "phi_r": p.phi_r,
    }


def _result_dict(r) -> dict:
    return {
        "value": r.value,
        "family": r.family.name,
        "type": r.type.label,
        "parity_preserving": r.type.parity_preserving,
        "params": _params_dict(r.params),
        "residual_norm": r.residual_norm,
        "converged": r.converged,
        "starts": r.starts,
    }


def _measure_report(state, measure, family, cfg):
    """(report dict, converged flag) for one measure of one state."""
    if family == "all":
        comp = minimize_all_families(state, measure, cfg)
        report = {
            "best_family": comp.best_family.name,
            "best": _result_dict(comp.best),
            "families": {
                fam.name: _result_dict(res) for fam, res in comp.results.items()
            },
        }
        ok = all(res.converged for res in comp.results.values())
    else:
        fam = {
            "spin": MeasurementFamily.SPIN,
            "ii": MeasurementFamily.TYPE_II,
            "iii": MeasurementFamily.TYPE_III,
            "general": MeasurementFamily.GENERAL,
        }[family]
        res = minimize(state, measure, fam, cfg)
        report = _result_dict(res)
        ok = res.converged
    return report, ok


# --- diagram ----------------------------------------------------------------


def cmd_diagram(args) -> int:
    try:
        params = MeasurementParams(
            args.alpha, args.beta, args.gamma, args.psi, args.theta_r, args.phi_r
        )
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    _dump_json(diagram_record(full_basis(params)))
    return EXIT_OK


# --- discord ----------------------------------------------------------------


def cmd_discord(args) -> int:
    cfg, err = _config_or_fail(args)
    if cfg is None:
        return err
    if args.dump_config:
        _dump_json(dump_config(cfg))
        return EXIT_OK
    if (args.state is None) == (args.theta is None):
        return _fail(EXIT_USAGE, "need exactly one of a state file or --theta")
    if args.theta is not None:
        if not 0.0 <= args.theta <= math.pi / 2:
            return _fail(EXIT_USAGE, "--theta must lie in [0, pi/2]")
        state = aligned_mixture(args.theta)
        dims = state.rho.dims
        source = f"aligned mixture theta={_fmt(args.theta)}"
    else:
        try:
            state = load_state(args.state)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            return _fail(EXIT_FORMAT, f"cannot read state file: {exc}")
        dims = state.dims
        source = args.state
        if dims[1] != 3:
            return _fail(
                EXIT_FORMAT, f"measured subsystem must have dimension 3, got {dims[1]}"
            )
    measures = MEASURES if args.measure == "all" else (args.measure,)
    report = {"state": source, "dims": list(dims), "results": {}}
    all_ok = True
    for m in measures:
        block, ok = _measure_report(state, m, args.family, cfg)
        report["results"][m] = block
        all_ok = all_ok and ok
    report["converged"] = all_ok
    _dump_json(report)
    return EXIT_OK if all_ok else EXIT_NOCONV


# --- sweep ------------------------------------------------------------------


def cmd_sweep(args) -> int:
    cfg, err = _config_or_fail(args)
    if cfg is None:
        return err
    if args.dump_config:
        _dump_json(dump_config(cfg))
        return EXIT_OK
    if not (0.0 <= args.theta_min < args.theta_max <= math.pi / 2):
        return _fail(EXIT_USAGE, "need 0 <= theta-min < theta-max <= pi/2")
    if args.points < 2:
        return _fail(EXIT_USAGE, "need at least 2 points")
    thetas = np.linspace(args.theta_min, args.theta_max, args.points)
    lines = [SWEEP_COLUMNS]
    all_ok = True
    for theta in thetas:
        comps = {m: minimize_all_families(aligned_mixture(theta), m, cfg) for m in MEASURES}
        all_ok = all_ok and all(
            res.converged for comp in comps.values() for res in comp.results.values()
        )
        # The angle columns track the I1 minimizer: its beta interpolates
        # between the collinear (0) and Y-type (pi/4) values through the
        # parity-breaking window, while alpha is common to all measures.
        p = comps["i1"].best.params
        row = [
            _fmt(theta),
            _fmt(comps["d"].best.value),
            _fmt(comps["i1"].best.value),
            _fmt(comps["i2"].best.value),
            comps["d"].best_family.name,
            comps["i1"].best_family.name,
            comps["i2"].best_family.name,
            _fmt(p.alpha),
            _fmt(p.beta),
            _fmt(p.gamma),
            _fmt(p.psi),
            _fmt(comps["d"].best.residual_norm),
            _fmt(comps["i1"].best.residual_norm),
            _fmt(comps["i2"].best.residual_norm),
            _fmt(d_closed(theta)),
            _fmt(i2_closed(theta)),
        ]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all_ok else EXIT_NOCONV


# --- chain ------------------------------------------------------------------


def _parse_chain_spec(raw: dict) -> XYZChainSpec:
    n = int(raw["n"])
    s = float(raw.get("s", 1.0))
    b = raw.get("b", 0.0)
    fields = tuple(float(x) for x in b) if isinstance(b, (list, tuple)) else (float(b),) * n
    couplings = {
        axis: [(int(i), int(j), float(v)) for i, j, v in triples]
        for axis, triples in dict(raw.get("J", {})).items()
    }
    return XYZChainSpec(n=n, s=s, fields=fields, couplings=couplings)


def cmd_chain(args) -> int:
    cfg, err = _config_or_fail(args)
    if cfg is None:
        return err
    if args.dump_config:
        _dump_json(dump_config(cfg))
        return EXIT_OK
    try:
        with open(args.spec) as fh:
            raw = json.load(fh)
        spec = _parse_chain_spec(raw)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        return _fail(EXIT_FORMAT, f"cannot read chain spec: {exc}")
    if spec.n > args.max_sites:
        return _fail(
            EXIT_USAGE,
            f"chain has {spec.n} sites, cap is {args.max_sites} (raise --max-sites)",
        )
    i, j = args.pair
    if not (0 <= i < spec.n and 0 <= j < spec.n) or i == j:
        return _fail(EXIT_USAGE, f"invalid pair ({i}, {j}) for {spec.n} sites")

    h = xyz_hamiltonian(spec)
    gs = ground_state(h)
    parity = composite_parity([spec.s] * spec.n).matrix
    parity_ok = float(np.abs(commutator(parity, h)).max()) < 1e-10
    sector = float(np.real(gs.vector.conj() @ parity @ gs.vector))

    report = {
        "n": spec.n,
        "s": spec.s,
        "energy": gs.energy,
        "degenerate": gs.degenerate,
        "parity_commutes": parity_ok,
        "parity_expectation": sector,
        "anisotropy": spec.anisotropy(),
        "pair": [i, j],
    }

    d_site = spin_dim(spec.s)
    if d_site != 3:
        report["measures"] = None
        report["note"] = "pair measures need spin-1 sites (d = 3)"
        _dump_json(report)
        return EXIT_OK

    pair_state = reduce_pair(gs.vector, i, j)
    if args.out:
        save_state(args.out, pair_state)
        report["state_file"] = args.out
    all_ok = True
    report["measures"] = {}
    measures = MEASURES if args.measure == "all" else (args.measure,)
    for m in measures:
        block, ok = _measure_report(pair_state, m, args.family, cfg)
        report["measures"][m] = block
        all_ok = all_ok and ok
    report["converged"] = all_ok
    _dump_json(report)
    return EXIT_OK if all_ok else EXIT_NOCONV


# --- verify -----------------------------------------------------------------


def _random_params(rng) -> MeasurementParams:
    return MeasurementParams(
        rng.uniform(0.0, math.pi / 4),
        rng.uniform(0.0, math.pi / 4),
        rng.uniform(-math.pi / 2, math.pi / 2),
        rng.uniform(0.0, 2 * math.pi),
        rng.uniform(0.0, math.pi),
        rng.uniform(0.0, 2 * math.pi),
    )


def _random_state(rng, da: int = 3, db: int = 3) -> DensityMatrix:
    d = da * db
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    mat = g @ g.conj().T
    return DensityMatrix(mat / np.trace(mat).real, (da, db))


def _suite_diagrams(rng, draws: int) -> dict:
    failed = 0
    for _ in range(draws):
        diag = spin_diagram(full_basis(_random_params(rng)))
        v = diag.vectors
        dots = [float(v[a] @ v[b]) for a in range(3) for b in range(a + 1, 3)]
        ok = (
            float(np.linalg.norm(v.sum(axis=0))) < 1e-9
            and abs(float(np.linalg.det(v))) < 1e-9
            and max(dots) <= 1e-9
            and diag.total_length_sq <= 8.0 / 3.0 + 1e-9
        )
        failed += not ok
    return {"name": "diagrams", "draws": draws, "failed": failed, "ok": failed == 0}


def _suite_measures(rng, draws: int) -> dict:
    failed = 0
    grad_checks = max(4, draws // 50)
    for _ in range(draws):
        rho = _random_state(rng)
        q, _ = np.linalg.qr(
            rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        )
        basis = MeasurementBasis(q)
        rho_p = apply_measurement(rho, basis)
        rho_pp = apply_measurement(rho_p, basis)
        res = stationarity_f(rho, basis, VON_NEUMANN)
        frame = measured_frame(res.delta, basis)
        ok = (
            discord_given(rho, basis).value >= -1e-11
            and deficit_given(rho, basis, VON_NEUMANN).value >= -1e-11
            and i2_given(rho, basis).value >= -1e-11
            and float(np.abs(rho_pp.matrix - rho_p.matrix).max()) < 1e-12
            and float(np.abs(res.delta + res.delta.conj().T).max()) < 1e-10
            and float(np.abs(np.diag(frame)).max()) < 1e-10
        )
        failed += not ok
    for _ in range(grad_checks):
        rho = _random_state(rng)
        lo, hi, _ = family_box(MeasurementFamily.GENERAL)
        x = np.array([rng.uniform(a + 0.05, b - 0.05) for a, b in zip(lo, hi)])
        for m in MEASURES:
            g, _ = tangent_gradient(rho, m, MeasurementFamily.GENERAL, x)
            obj = _objective_fn(rho, m)
            h = 1e-6
            for k in range(6):
                xp, xm = x.copy(), x.copy()
                xp[k] += h
                xm[k] -= h
                fd = (
                    obj(_family_unitary(MeasurementFamily.GENERAL, xp))
                    - obj(_family_unitary(MeasurementFamily.GENERAL, xm))
                ) / (2 * h)
                failed += not abs(fd - g[k]) < 1e-5
    return {"name": "measures", "draws": draws, "failed": failed, "ok": failed == 0}


def _suite_parity(rng, draws: int) -> dict:
    failed = 0
    parity = composite_parity([1.0, 1.0]).matrix
    proj_even = (np.eye(9) + parity) / 2
    proj_odd = (np.eye(9) - parity) / 2
    for k in range(draws):
        raw = _random_state(rng).matrix
        sym = proj_even @ raw @ proj_even + proj_odd @ raw @ proj_odd
        rho = DensityMatrix(sym / np.trace(sym).real, (3, 3))
        if k % 2 == 0:
            basis = type_ii_basis(rng.uniform(0, math.pi / 4), rng.uniform(0, math.pi))
        else:
            basis = type_iii_basis(
                rng.uniform(0, math.pi / 4),
                rng.uniform(-math.pi / 2, math.pi / 2),
                rng.uniform(0, math.pi),
            )
        rho_p = apply_measurement(rho, basis)
        commut = float(np.abs(commutator(parity, rho_p.matrix)).max())
        failed += not commut < 1e-10
    return {"name": "parity", "draws": draws, "failed": failed, "ok": failed == 0}


def _suite_closedforms(cfg: OptimizerConfig, points: int) -> dict:
    thetas = np.linspace(0.02 * math.pi, 0.48 * math.pi, points)
    errata = []
    worst = 0.0
    for theta in thetas:
        state = aligned_mixture(theta)
        for m, closed in (("d", d_closed(theta)), ("i2", i2_closed(theta))):
            numeric = minimize_all_families(state, m, cfg).best.value
            diff = abs(numeric - closed)
            worst = max(worst, diff)
            if diff > 1e-6:
                errata.append(
                    {"theta": theta, "measure": m, "closed": closed, "numeric": numeric}
                )
    return {
        "name": "closedforms",
        "points": points,
        "max_discrepancy": worst,
        "errata": errata,
        "ok": not errata,
    }


def cmd_verify(args) -> int:
    cfg, err = _config_or_fail(args)
    if cfg is None:
        return err
    rng = np.random.default_rng(args.seed)
    suites = []
    if args.suite in ("all", "diagrams"):
        suites.append(_suite_diagrams(rng, args.draws))
    if args.suite in ("all", "measures"):
        suites.append(_suite_measures(rng, max(10, args.draws // 5)))
    if args.suite in ("all", "parity"):
        suites.append(_suite_parity(rng, args.draws))
    if args.suite in ("all", "closedforms"):
        suites.append(_suite_closedforms(cfg, args.points))
    report = {"suites": suites, "ok": all(s["ok"] for s in suites)}
    for s in suites:
        status = "pass" if s["ok"] else "FAIL"
        print(f"{s['name']}: {status}", file=sys.stderr)
    _dump_json(report)
    return EXIT_OK if report["ok"] else EXIT_VERIFY


# --- parser -----------------------------------------------------------------


def _config_or_fail(args):
    try:
        return load_config(getattr(args, "config", None)), EXIT_OK
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        return None, _fail(EXIT_FORMAT, f"cannot read config: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-discord",
        description="Discord-like correlation measures under qutrit projective measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagram", help="spin diagram of one measurement basis")
    for name in ("alpha", "beta", "gamma", "psi", "theta-r", "phi-r"):
        p.add_argument(f"--{name}", type=float, default=0.0)
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("discord", help="minimize measures for one state")
    p.add_argument("state", nargs="?", help="state file (JSON)")
    p.add_argument("--theta", type=float, help="aligned mixture angle instead of a file")
    _common_opt_flags(p)
    p.set_defaults(func=cmd_discord)

    p = sub.add_parser("sweep", help="theta sweep over aligned mixtures (CSV)")
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=math.pi / 2)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--out", help="CSV path (stdout when absent)")
    p.add_argument("--config", help="optimizer config file (JSON)")
    p.add_argument(
        "--dump-config", action="store_true", help="print the effective config and exit"
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("chain", help="XYZ chain ground state and pair measures")
    p.add_argument("spec", help="chain spec file (JSON)")
    p.add_argument("--pair", type=int, nargs=2, default=(0, 1), metavar=("I", "J"))
    p.add_argument("--out", help="write the reduced pair as a state file")
    p.add_argument("--max-sites", type=int, default=6)
    _common_opt_flags(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify", help="randomized property suites")
    p.add_argument(
        "--suite",
        choices=("all", "diagrams", "measures", "parity", "closedforms"),
        default="all",
    )
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--points", type=int, default=25, help="closed-form grid size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.set_defaults(func=cmd_verify)

    return parser


def _common_opt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", choices=("d", "i1", "i2", "all"), default="all")
    p.add_argument(
        "--family", choices=("spin", "ii", "iii", "general", "all"), default="all"
    )
    p.add_argument("--config", help="optimizer config file (JSON)")
    p.add_argument(
        "--dump-config", action="store_true", help="print the effective config and exit"
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
