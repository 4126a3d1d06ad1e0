"""Batch command line front end.

Subcommands: ``classify``, ``checkcp``, ``design``, ``collide``, ``evolve``,
``entangle``. Inputs are JSON (file path or inline string via ``--input``),
outputs are JSON or CSV written to ``--output`` or standard output. All
numeric output is printed with 12 significant digits and carries no
timestamps, so identical invocations produce byte-identical files.

Validation failures exit with status 2 and a machine-readable error object
``{"error": <code>, "message": ...}`` on standard error, with codes
``malformed_json``, ``schema_violation`` and ``physics_violation``.

See SCHEMAS.md for the input schemas and one worked example per command.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import channels, collisions, entanglement, lindblad
from .linalg import DEFAULT_TOL, PhysicsError
from .serialize import (
    SchemaError,
    channel_from_json,
    collision_spec_from_json,
    collision_spec_to_json,
    complex_matrix_to_json,
    density_from_json,
    params_from_json,
)


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _round_floats(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _emit_json(path: str | None, obj) -> None:
    _write(path, json.dumps(_round_floats(obj), sort_keys=True, indent=2) + "\n")


def _emit_csv(path: str | None, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _write(path, "\n".join(lines) + "\n")


def _load_input(arg: str | None, what: str):
    if arg is None:
        raise SchemaError(f"--input is required for this command ({what})")
    if os.path.exists(arg):
        with open(arg) as fh:
            return json.load(fh)
    stripped = arg.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return json.loads(arg)
    raise SchemaError(f"input file not found: {arg}")


def _parse_tgrid(text: str) -> np.ndarray:
    try:
        t0, t1, steps = text.split(":")
        t0, t1, steps = float(t0), float(t1), int(steps)
    except ValueError:
        raise SchemaError(f"--tgrid must be 't0:t1:steps', got {text!r}") from None
    if steps < 1 or t1 < t0:
        raise SchemaError("--tgrid needs steps >= 1 and t1 >= t0")
    return np.linspace(t0, t1, steps + 1)


def _cmd_classify(args) -> None:
    data = _load_input(args.input, "channel JSON")
    e, basis = channel_from_json(data)
    e = channels.to_computational(e, basis)
    ok, wmin = channels.is_completely_positive(e, tol=args.tol)
    if not ok:
        raise PhysicsError(f"channel is not completely positive (Choi eigenvalue {wmin:.3e})")
    result = channels.classify_decoherence(e, tol=args.tol)
    if result is None:
        _emit_json(args.output, {"decoherence": False})
        return
    found_basis, p = result
    _emit_json(
        args.output,
        {
            "decoherence": True,
            "lambda": p.lam,
            "phi": p.phi,
            "axis": [float(x) for x in found_basis.axis()],
            "basis": complex_matrix_to_json(found_basis.w),
        },
    )


def _cmd_checkcp(args) -> None:
    e, basis = channel_from_json(_load_input(args.input, "channel JSON"))
    ok, wmin = channels.is_completely_positive(e, basis, tol=args.tol)
    out = {"completely_positive": bool(ok), "min_choi_eigenvalue": wmin}
    t = np.asarray(e)[1:, 1:]
    if channels.is_unital(e, args.tol) and np.abs(t - np.diag(np.diag(t))).max() <= args.tol:
        out["tetrahedron"] = channels.tetrahedron_contains(np.diag(t), args.tol)
    _emit_json(args.output, out)


def _cmd_design(args) -> None:
    p = params_from_json(_load_input(args.input, "parameters JSON"))
    spec = collisions.design_collision(p)
    x = collisions.x_operator(spec)
    out = collision_spec_to_json(spec)
    out["achieved"] = {"lambda": x.lam, "phi": x.phi}
    _emit_json(args.output, out)


def _cmd_collide(args) -> None:
    data = _load_input(args.input, "collide JSON")
    if not isinstance(data, dict) or "spec" not in data or "rho" not in data:
        raise SchemaError("collide input needs keys 'spec' and 'rho'")
    spec = collision_spec_from_json(data["spec"])
    rho0 = density_from_json(data["rho"])
    traj = collisions.simulate_collisions(spec, rho0, args.nmax)
    rows = []
    for k, rho in enumerate(traj):
        r = channels.to_bloch(rho, spec.basis, tol=1e-7)
        rows.append((k, r[0], r[1], r[2], lindblad.purity(rho)))
    _emit_csv(args.output, ["n", "r_x", "r_y", "r_z", "purity"], rows)


def _mesh_points(step_deg: float = 1.0) -> np.ndarray:
    thetas = np.deg2rad(np.arange(0.0, 180.0 + step_deg / 2, step_deg))
    phis = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    return thetas, phis


def _cmd_evolve(args) -> None:
    data = _load_input(args.input, "evolve JSON")
    if not isinstance(data, dict) or "channel" not in data:
        raise SchemaError("evolve input needs key 'channel'")
    e, basis = channel_from_json(data["channel"])
    result = channels.classify_decoherence(
        channels.to_computational(e, basis), tol=args.tol
    )
    if "decoherence" in data["channel"]:
        p = params_from_json(
            {k: data["channel"]["decoherence"][k]
             for k in ("lambda", "phi") if k in data["channel"]["decoherence"]}
        )
    elif result is not None:
        basis, p = result
    else:
        raise PhysicsError("transfer matrix is not a decoherence channel; "
                           "pass explicit decoherence parameters instead")
    g = lindblad.generator_from_params(p, tau=args.tau)
    t_grid = _parse_tgrid(args.tgrid)

    if args.mesh:
        thetas, phis = _mesh_points()
        rows = []
        for t in t_grid:
            e_t = channels.interpolate(p, float(t), args.tau)
            tm = e_t[1:, 1:]
            for th in thetas:
                for ph in phis:
                    r = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
                    img = tm @ r
                    rows.append((t, np.rad2deg(th), np.rad2deg(ph), img[0], img[1], img[2]))
        _emit_csv(args.output,
                  ["t", "theta_deg", "phi_deg", "r_x", "r_y", "r_z"], rows)
        return

    if "rho" not in data:
        raise SchemaError("evolve input needs key 'rho' (or pass --mesh)")
    rho0 = density_from_json(data["rho"])
    rows = lindblad.trajectory_rows(g, rho0, t_grid, basis, tol=1e-7)
    _emit_csv(args.output, ["t", "r_x", "r_y", "r_z", "purity"], rows)


def _cmd_entangle(args) -> None:
    if not 0.0 <= args.overlap2 <= 1.0:
        raise PhysicsError(f"--overlap2 {args.overlap2} outside [0, 1]")
    if not 0.0 <= args.alpha2 <= 1.0:
        raise PhysicsError(f"--alpha2 {args.alpha2} outside [0, 1]")
    if args.nmax < 1:
        raise SchemaError("--nmax must be >= 1")
    alpha = np.sqrt(args.alpha2)
    beta = np.sqrt(1.0 - args.alpha2)
    overlap = np.sqrt(args.overlap2)
    rows = []
    for n in range(1, args.nmax + 1):
        rep = entanglement.analytic_tangles(overlap, alpha, beta, n)
        rows.append((n, rep.tau0, rep.tau_k[0], rep.tau_0k[0], rep.sum_tau_0k, rep.delta))
    _emit_csv(args.output, ["n", "tau0", "tauk", "tau0k", "sum_tau0k", "delta"], rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoh",
        description="Qubit decoherence channels: classification, collision models, "
                    "master equations, entanglement reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", help="path to a JSON file, or inline JSON")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None,
                       help="output format (fixed per command; flag kept for scripts)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="numerical tolerance (default 1e-9)")

    p = sub.add_parser("classify", help="decide whether a channel is a decoherence channel")
    common(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("checkcp", help="complete-positivity check with Choi witness")
    common(p)
    p.set_defaults(fn=_cmd_checkcp)

    p = sub.add_parser("design", help="collision realizing given decoherence parameters")
    common(p)
    p.set_defaults(fn=_cmd_design)

    p = sub.add_parser("collide", help="simulate repeated collisions")
    common(p)
    p.add_argument("--nmax", type=int, default=10, help="number of collisions")
    p.set_defaults(fn=_cmd_collide)

    p = sub.add_parser("evolve", help="integrate the master equation")
    common(p)
    p.add_argument("--tau", type=float, default=1.0, help="time scale (default 1)")
    p.add_argument("--tgrid", default="0:10:100", help="time grid t0:t1:steps")
    p.add_argument("--mesh", action="store_true",
                   help="emit the image of a 1-degree Bloch sphere mesh instead of one trajectory")
    p.set_defaults(fn=_cmd_evolve)

    p = sub.add_parser("entangle", help="closed-form entanglement curves vs collision count")
    common(p, needs_input=False)
    p.add_argument("--overlap2", type=float, required=True,
                   help="squared overlap of the two conditional reservoir states")
    p.add_argument("--alpha2", type=float, default=0.5,
                   help="population of the first basis state (default 0.5)")
    p.add_argument("--nmax", type=int, default=30, help="largest collision count")
    p.set_defaults(fn=_cmd_entangle)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except json.JSONDecodeError as exc:
        _fail("malformed_json", str(exc))
        return 2
    except SchemaError as exc:
        _fail("schema_violation", str(exc))
        return 2
    except PhysicsError as exc:
        _fail("physics_violation", str(exc))
        return 2
    return 0


def _fail(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
