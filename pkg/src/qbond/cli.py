"""Command-line interface.

One binary, five subcommands (binding, jc, well, synth, simulate), all
sharing the same calling shape:

    qbond <mode> --in problem.json --out outdir [--tol X] [--format json|csv]

The problem file is {"mode": <mode>, "payload": {...}}; the mode in the
file must match the subcommand. Outputs are deterministic files with
fixed names. Exit codes: 0 on success, 2 on validation errors (bad
schema, unphysical input), 3 on numerical failure (non-convergence).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import binding as binding_mod
from . import jaynes_cummings as jc_mod
from . import pulse_synthesis as synth_mod
from . import propagation as prop_mod
from . import serialization as ser
from . import tunneling_well as well_mod
from .constants import ANGSTROM_M, ELECTRON_MASS_KG, ELECTRON_VOLT_J, NANOMETER_M, joule_to_ev
from .errors import NumericalError, ValidationError

TOL_ENV_VAR = "QBOND_TOL"

LENGTH_UNITS = {"m": 1.0, "nm": NANOMETER_M, "angstrom": ANGSTROM_M}
ENERGY_UNITS = {"J": 1.0, "eV": ELECTRON_VOLT_J}
MASS_UNITS = {"kg": 1.0, "m_e": ELECTRON_MASS_KG}


def _quantity(obj, units: dict, what: str) -> float:
    ser.require_keys(obj, {"value", "unit"}, what=what)
    unit = obj["unit"]
    if unit not in units:
        raise ValidationError(f"{what}: unknown unit {unit!r}, expected one of {sorted(units)}")
    return float(obj["value"]) * units[unit]


def _load_problem(path: str, mode: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read problem file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"problem file {path} is not valid JSON: {exc}") from exc
    ser.require_keys(doc, {"mode", "payload"}, what="problem file")
    if doc["mode"] != mode:
        raise ValidationError(f"problem file mode {doc['mode']!r} does not match subcommand {mode!r}")
    return doc["payload"]


def _write(outdir: str, name: str, content) -> str:
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(content, str):
            fh.write(content)
        else:
            json.dump(content, fh, indent=2)
            fh.write("\n")
    return path


def run_binding(payload: dict, args) -> list[str]:
    ser.require_keys(payload, {"rho0", "h_free", "h_int"}, what="binding payload")
    rho0 = ser.matrix_from_json(payload["rho0"], what="rho0")
    h_free = ser.matrix_from_json(payload["h_free"], what="h_free")
    h_int = ser.matrix_from_json(payload["h_int"], what="h_int")
    kwargs = {"atol": args.tol} if args.tol is not None else {}
    report = binding_mod.binding_energy(rho0, h_free, h_int, **kwargs)
    written = [_write(args.out, "binding_report.json", ser.binding_report_to_json(report))]
    if args.format == "csv":
        from .operators import hermitian_eigendecomposition

        spec = hermitian_eigendecomposition(h_free)
        pops = np.real(np.diag(spec.eigenvectors.conj().T @ report.passive_state @ spec.eigenvectors))
        lines = ["level,energy,population"]
        for k, (e, p) in enumerate(zip(spec.eigenvalues, pops), start=1):
            lines.append(f"{k},{float(e)!r},{float(p)!r}")
        written.append(_write(args.out, "binding_levels.csv", "\n".join(lines) + "\n"))
    return written


def run_jc(payload: dict, args) -> list[str]:
    ser.require_keys(
        payload,
        {"omega_a", "omega_b", "g", "initial"},
        optional={"path_length", "velocity"},
        what="jc payload",
    )
    params = jc_mod.JCParams(
        omega_a=float(payload["omega_a"]),
        omega_b=float(payload["omega_b"]),
        g=float(payload["g"]),
    )
    basis = jc_mod.dressed_states(params)
    report = jc_mod.jc_binding_energy(params, str(payload["initial"]))
    doc = {
        "params": {"omega_a": params.omega_a, "omega_b": params.omega_b, "g": params.g},
        "initial": payload["initial"],
        "mixing_angle": basis.mixing_angle,
        "printed_formula_mixing_angle": jc_mod.printed_mixing_angle(params),
        "dressed": [
            {"label": lab, "energy": float(e)} for lab, e in zip(basis.labels, basis.energies)
        ],
        "dressed_vectors": ser.matrix_to_json(basis.vectors),
        "binding": ser.binding_report_to_json(report),
    }
    if ("path_length" in payload) != ("velocity" in payload):
        raise ValidationError("path_length and velocity must be given together")
    if "path_length" in payload:
        flight = jc_mod.flight_phase(
            params, float(payload["path_length"]), float(payload["velocity"])
        )
        doc["flight"] = {
            "flight_time": flight.flight_time,
            "accumulated_angle": flight.accumulated_angle,
            "dissociates": flight.dissociates,
        }
    written = [_write(args.out, "jc_report.json", doc)]
    if args.format == "csv":
        lines = ["label,energy"]
        for lab, e in zip(basis.labels, basis.energies):
            lines.append(f"{lab},{float(e)!r}")
        written.append(_write(args.out, "jc_levels.csv", "\n".join(lines) + "\n"))
    return written


def run_well(payload: dict, args) -> list[str]:
    ser.require_keys(
        payload, {"a", "b", "v0", "v0_prime"}, optional={"mass"}, what="well payload"
    )
    geometry = well_mod.WellGeometry(
        well_width=_quantity(payload["a"], LENGTH_UNITS, "a"),
        barrier_end=_quantity(payload["b"], LENGTH_UNITS, "b"),
        barrier_height=_quantity(payload["v0"], ENERGY_UNITS, "v0"),
        plateau_height=_quantity(payload["v0_prime"], ENERGY_UNITS, "v0_prime"),
        mass=_quantity(payload["mass"], MASS_UNITS, "mass") if "mass" in payload else ELECTRON_MASS_KG,
    )
    energies = well_mod.bound_state_energies(geometry)
    states = well_mod.classify_levels(geometry, energies)
    rows = []
    levels_doc = []
    for s in states:
        entry = {"n": s.index, "E_eV": joule_to_ev(s.energy), "kind": s.kind}
        if s.kind == well_mod.KIND_TUNNELING:
            p = well_mod.wkb_transmission(geometry, s.energy)
            est = well_mod.tunneling_time(geometry, s.energy, p)
            entry["P"] = p
            entry["tau_s"] = est.tunneling_time
        else:
            entry["P"] = None
            entry["tau_s"] = None
        rows.append(entry)
        levels_doc.append(
            {
                "n": s.index,
                "energy_J": s.energy,
                "energy_eV": joule_to_ev(s.energy),
                "kind": s.kind,
                "transmission": entry["P"],
                "tunneling_time_s": None
                if entry["tau_s"] is None or math.isinf(entry["tau_s"])
                else entry["tau_s"],
            }
        )
    doc = {
        "geometry": {
            "well_width_m": geometry.well_width,
            "barrier_end_m": geometry.barrier_end,
            "barrier_height_eV": joule_to_ev(geometry.barrier_height),
            "plateau_height_eV": joule_to_ev(geometry.plateau_height),
            "mass_kg": geometry.mass,
        },
        "level_count": len(states),
        "tunneling_count": sum(1 for s in states if s.kind == well_mod.KIND_TUNNELING),
        "levels": levels_doc,
    }
    written = [_write(args.out, "well_levels.csv", ser.well_levels_csv(rows))]
    if args.format == "json":
        written.append(_write(args.out, "well_report.json", doc))
    return written


def _constraints_from_payload(obj) -> synth_mod.PulseConstraints:
    ser.require_keys(
        obj,
        {"amplitude_max"},
        optional={"amplitude_min", "slew_max", "slew_min"},
        what="constraints",
    )
    return synth_mod.PulseConstraints(
        amplitude_max=float(obj["amplitude_max"]),
        amplitude_min=float(obj.get("amplitude_min", 0.0)),
        slew_max=float(obj.get("slew_max", 1.0)),
        slew_min=float(obj.get("slew_min", -1.0)),
    )


def _dipoles_from_payload(obj):
    if obj is None:
        return None
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, dict):
        return {int(k): float(v) for k, v in obj.items()}
    raise ValidationError(f"dipoles must be a number or a mapping, got {type(obj).__name__}")


def run_synth(payload: dict, args) -> list[str]:
    ser.require_keys(payload, {"target", "constraints"}, optional={"dipoles"}, what="synth payload")
    target = ser.matrix_from_json(payload["target"], what="target")
    constraints = _constraints_from_payload(payload["constraints"])
    dipoles = _dipoles_from_payload(payload.get("dipoles"))
    kwargs = {"unitary_atol": args.tol} if args.tol is not None else {}
    sched = synth_mod.schedule(target, constraints, dipoles=dipoles, **kwargs)
    return [
        _write(args.out, "schedule.json", ser.schedule_to_json(sched)),
        _write(args.out, "envelope.csv", ser.envelope_csv(sched)),
    ]


def run_simulate(payload: dict, args) -> list[str]:
    ser.require_keys(
        payload,
        {"schedule"},
        optional={"target", "rho0", "dipoles", "steps_per_segment"},
        what="simulate payload",
    )
    sched = ser.schedule_from_json(payload["schedule"])
    target = ser.matrix_from_json(payload["target"], what="target") if "target" in payload else None
    rho0 = ser.matrix_from_json(payload["rho0"], what="rho0") if "rho0" in payload else None
    dipoles = _dipoles_from_payload(payload.get("dipoles"))
    steps = int(payload.get("steps_per_segment", prop_mod.STEPS_PER_SEGMENT))
    result = prop_mod.simulate_schedule(
        sched, dipoles=dipoles, target=target, rho0=rho0, steps_per_segment=steps
    )
    u = result.final_unitary
    drift = float(np.abs(u @ u.conj().T - np.eye(sched.dimension)).max())
    doc = {
        "total_time": sched.total_time,
        "pulse_count": len(sched.pulses),
        "unitarity_drift": drift,
        "final_unitary": ser.matrix_to_json(u),
        "fidelity_to_target": result.fidelity_to_target,
    }
    written = [_write(args.out, "simulate_report.json", doc)]
    if rho0 is not None and result.state_trajectory:
        written.append(
            _write(
                args.out,
                "trajectory.csv",
                ser.trajectory_csv(result.times, result.state_trajectory, result.energy_trajectory),
            )
        )
    return written


RUNNERS = {
    "binding": run_binding,
    "jc": run_jc,
    "well": run_well,
    "synth": run_synth,
    "simulate": run_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbond",
        description="Binding energies of bipartite quantum systems and minimum-time pulse schedules.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    env_tol = os.environ.get(TOL_ENV_VAR)
    for mode, helptext in [
        ("binding", "binding energy and passive endpoint of a state"),
        ("jc", "dressed states and binding energy of the atom-field example"),
        ("well", "bound levels and tunneling estimates for a step well"),
        ("synth", "decompose a target unitary into shaped pulses"),
        ("simulate", "propagate a shaped schedule and report fidelity"),
    ]:
        p = sub.add_parser(mode, help=helptext)
        p.add_argument("--in", dest="infile", required=True, help="problem JSON file")
        p.add_argument("--out", dest="out", default=".", help="output directory")
        p.add_argument(
            "--tol",
            type=float,
            default=float(env_tol) if env_tol else None,
            help=f"validation tolerance override (default from ${TOL_ENV_VAR} when set)",
        )
        p.add_argument("--format", choices=("json", "csv"), default="json", help="output flavor")
        p.add_argument(
            "--seed", type=int, default=0, help="reserved for randomized helpers; unused here"
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = _load_problem(args.infile, args.mode)
        written = RUNNERS[args.mode](payload, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
