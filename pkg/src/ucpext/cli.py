"""Scenario runner: every toolkit operation as a command with JSON reports.

A scenario file is a JSON object

    {"command": "...", "system": ..., "dynamics": ..., "options": {...}}

dispatched to the corresponding library operation.  Reports echo the command,
carry a status (ok / failed / invalid-input), command-specific results, and
provenance (tool version, seed, resolved options).  Reports are deterministic
given the seed; JSON output carries full float precision, text output renders
residuals to three significant digits.

Exit codes: 0 = ok, 1 = mathematical failure (infeasible, diverged, invalid
certificate), 2 = malformed input (schema violation, unknown command).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, catalog, dynamics, extension, maps, serialize
from .dynamics import SubsystemGenerator
from .errors import (ExtensionInfeasible, GroupExtensionError, InputError,
                     NumericalError, ResolventFamilyError)
from .extension import ExtensionOptions, ExtensionProblem
from .serialize import CHOI_CONVENTION

COMMANDS = (
    "check-cp", "check-ccp", "validate", "evolve", "resolvent", "identities",
    "extend-map", "extend-generator", "extend-resolvent-family", "extend-group",
    "extend-discrete", "rigidity-probe", "demo-rebit",
)

_OPTION_KEYS = {
    "tol", "max_iter", "seed", "omega", "grid", "times", "lambdas", "starts",
    "start_scale", "time", "horizon", "panels", "omega_param", "delta_param",
    "g2_prefactor",
}

_SCHEMA_DIR = Path(__file__).resolve().parent / "schemas"


def load_scenario_schema() -> dict:
    return json.loads((_SCHEMA_DIR / "scenario.schema.json").read_text())


def validate_scenario(scenario) -> None:
    """Schema check; raises InputError with a machine-readable message."""
    import jsonschema

    try:
        jsonschema.validate(scenario, load_scenario_schema())
    except jsonschema.ValidationError as exc:
        raise InputError(f"scenario schema violation: {exc.message}") from None
    unknown = set(scenario.get("options", {})) - _OPTION_KEYS
    if unknown:
        raise InputError(f"unknown option keys: {sorted(unknown)}")


# ---------------------------------------------------------------------------
# Scenario object resolution
# ---------------------------------------------------------------------------

def _resolve_system(scenario):
    if "system" not in scenario:
        raise InputError("this command requires a 'system' field")
    return serialize.system_from_json(scenario["system"])


def _resolve_generator(scenario, options):
    """A full-algebra generator from a catalog name or a generator spec."""
    dyn = scenario.get("dynamics")
    if dyn is None:
        raise InputError("this command requires a 'dynamics' field")
    if isinstance(dyn, str):
        if dyn == "g1":
            return catalog.g1(float(options.get("delta_param", 1.0)))
        if dyn == "g2":
            return catalog.g2(float(options.get("delta_param", 1.0)),
                              prefactor=options.get("g2_prefactor", "derived"))
        if dyn == "rotation_extension":
            return catalog.rotation_extension_generator(float(options.get("omega_param", 1.0)))
        raise InputError(f"unknown generator name {dyn!r}")
    return serialize.generator_from_json(dyn)


def _resolve_subsystem_generator(scenario, system, options) -> SubsystemGenerator:
    """A generator on V: catalog subsystem dynamics, or a full generator restricted."""
    dyn = scenario.get("dynamics")
    if dyn is None:
        raise InputError("this command requires a 'dynamics' field")
    if isinstance(dyn, str) and dyn == "rebit_rotation":
        return catalog.rebit_rotation(float(options.get("omega_param", 1.0)))
    if isinstance(dyn, str) and dyn == "rebit_dissipative":
        return catalog.rebit_dissipative(float(options.get("delta_param", 1.0)))
    gen = _resolve_generator(scenario, options)
    if gen.d != system.dim:
        raise InputError("generator dimension does not match the system")
    images = [gen.op.apply(v) for v in system.basis]
    return SubsystemGenerator.from_action(system, images)


def _resolve_map(scenario, system, options):
    """Basis images of a UCP map on V: an evolved generator or an explicit map."""
    dyn = scenario.get("dynamics")
    if isinstance(dyn, dict) and dyn.get("kind") == "choi" and "time" not in options:
        phi = serialize.superop_from_json(dyn["super"])
        if phi.d != system.dim:
            raise InputError("map dimension does not match the system")
        return [phi.apply(v) for v in system.basis]
    t = float(options.get("time", 1.0))
    if isinstance(dyn, str) and dyn in ("rebit_rotation", "rebit_dissipative"):
        sub = _resolve_subsystem_generator(scenario, system, options)
        return dynamics.subsystem_evolve_images(sub, t)
    gen = _resolve_generator(scenario, options)
    step = dynamics.evolve(gen, t)
    return [step.apply(v) for v in system.basis]


def _extension_options(options) -> ExtensionOptions:
    seed = options.get("seed")
    return ExtensionOptions(
        tol=float(options.get("tol", 1e-8)),
        max_iter=int(options.get("max_iter", 200_000)),
        seed=None if seed is None else int(seed),
        start="deterministic" if seed is None else "random",
        start_scale=float(options.get("start_scale", 1.0)),
    )


def _report_superop(phi) -> dict:
    return serialize.superop_to_json(phi, tagged=True)


# ---------------------------------------------------------------------------
# Command handlers: each returns (status, results)
# ---------------------------------------------------------------------------

def _cmd_check_cp(scenario, options):
    dyn = scenario.get("dynamics")
    if isinstance(dyn, dict) and dyn.get("kind") == "choi" and "time" not in options:
        phi = serialize.superop_from_json(dyn["super"])
    else:
        gen = _resolve_generator(scenario, options)
        phi = dynamics.evolve(gen, float(options.get("time", 1.0)))
    tol = float(options.get("tol", 1e-8))
    report = maps.is_completely_positive(phi, tol)
    results = {
        "is_cp": report.is_cp,
        "is_unital": maps.is_unital(phi, tol),
        "is_ucp": maps.is_ucp(phi, tol),
        "min_choi_eigenvalue": report.min_choi_eigenvalue,
        "map": _report_superop(phi),
    }
    if report.witness is not None:
        results["witness"] = {
            "level": report.witness.level,
            "matrix": serialize.matrix_to_json(report.witness.matrix),
        }
    return "ok", results


def _cmd_check_ccp(scenario, options):
    gen = _resolve_generator(scenario, options)
    certs = gen.certificates
    return "ok", {
        "hermiticity_preserving": certs.hermiticity_preserving,
        "unital_kernel": certs.unital_kernel,
        "ccp": certs.ccp,
        "certified": certs.certified,
        "group_certificate": dynamics.has_group_certificate(gen),
        "spectral_bound": dynamics.spectral_bound(gen) if certs.hermiticity_preserving else None,
    }


def _cmd_validate(scenario, options):
    system = _resolve_system(scenario)
    sub = _resolve_subsystem_generator(scenario, system, options)
    tol = float(options.get("tol", 1e-8))
    verdict = dynamics.validate_subsystem_semigroup(
        sub,
        sample_ts=tuple(options.get("times", (0.5, 1.5))),
        sample_lambdas=tuple(options.get("lambdas", (1.0, 4.0))),
        tol=tol,
        max_iter=int(options.get("max_iter", 50_000)),
    )
    results = {"valid": verdict.valid, "message": verdict.message,
               "checks": list(verdict.checks)}
    return ("ok" if verdict.valid else "failed"), results


def _cmd_evolve(scenario, options):
    gen = _resolve_generator(scenario, options)
    times = [float(t) for t in options.get("times", (1.0,))]
    tol = float(options.get("tol", 1e-8))
    entries = []
    ok = True
    for t in times:
        phi = dynamics.evolve(gen, t)
        ucp = maps.is_ucp(phi, tol)
        ok = ok and (ucp or not gen.certificates.certified)
        entries.append({"t": t, "is_ucp": ucp, "map": _report_superop(phi)})
    return ("ok" if ok else "failed"), {"evolutions": entries,
                                        "certified": gen.certificates.certified}


def _cmd_resolvent(scenario, options):
    gen = _resolve_generator(scenario, options)
    lambdas = [float(x) for x in options.get("lambdas", (1.0,))]
    tol = float(options.get("tol", 1e-8))
    entries = []
    ok = True
    for lam in lambdas:
        scaled = lam * dynamics.resolvent(gen, lam)
        ucp = maps.is_ucp(scaled, tol)
        ok = ok and (ucp or not gen.certificates.certified)
        entries.append({"lambda": lam, "scaled_is_ucp": ucp,
                        "scaled_map": _report_superop(scaled)})
    return ("ok" if ok else "failed"), {"resolvents": entries,
                                        "certified": gen.certificates.certified}


def _cmd_identities(scenario, options):
    gen = _resolve_generator(scenario, options)
    grid = [float(x) for x in options.get("grid", np.linspace(0.5, 4.0, 5))]
    tol = float(options.get("tol", 1e-9))
    hilbert = []
    worst = 0.0
    for lam in grid:
        for mu in grid:
            if lam == mu:
                continue
            r = dynamics.hilbert_identity_residual(gen, lam, mu)
            worst = max(worst, r)
            hilbert.append({"lambda": lam, "mu": mu, "residual": r})
    laplace = []
    laplace_tol = 1e-6
    laplace_worst = 0.0
    for lam in [float(x) for x in options.get("lambdas", (0.5, 1.0, 2.0))]:
        approx, bound = dynamics.laplace_resolvent(
            gen, lam, panels=int(options.get("panels", 400)))
        err = approx.distance(dynamics.resolvent(gen, lam))
        laplace_worst = max(laplace_worst, err)
        laplace.append({"lambda": lam, "quadrature_error": err,
                        "truncation_bound": bound})
    ok = worst <= tol and laplace_worst <= laplace_tol
    return ("ok" if ok else "failed"), {
        "hilbert": hilbert, "hilbert_worst": worst, "hilbert_tol": tol,
        "laplace": laplace, "laplace_worst": laplace_worst, "laplace_tol": laplace_tol,
    }


def _extension_report_json(report) -> dict:
    return {
        "iterations": report.iterations,
        "cone_residual": report.cone_residual,
        "affine_residual": report.affine_residual,
        "restriction_error": report.restriction_error,
        "converged": report.converged,
    }


def _cmd_extend_map(scenario, options):
    system = _resolve_system(scenario)
    images = _resolve_map(scenario, system, options)
    problem = ExtensionProblem.for_map(system, images, _extension_options(options))
    phi, report = extension.extend_ucp_map(problem)
    results = {"report": _extension_report_json(report), "map": _report_superop(phi)}
    return ("ok" if report.converged else "failed"), results


def _cmd_extend_generator(scenario, options):
    system = _resolve_system(scenario)
    sub = _resolve_subsystem_generator(scenario, system, options)
    problem = ExtensionProblem.for_generator(system, sub, _extension_options(options))
    gen, report = extension.extend_generator(problem)
    results = {
        "report": _extension_report_json(report),
        "generator": serialize.generator_to_json(gen),
        "certificates": {
            "hermiticity_preserving": gen.certificates.hermiticity_preserving,
            "unital_kernel": gen.certificates.unital_kernel,
            "ccp": gen.certificates.ccp,
        },
    }
    status = "ok" if (report.converged and gen.certificates.certified) else "failed"
    return status, results


def _cmd_extend_resolvent_family(scenario, options):
    system = _resolve_system(scenario)
    sub = _resolve_subsystem_generator(scenario, system, options)
    problem = ExtensionProblem.for_generator(system, sub, _extension_options(options))
    omega = float(options.get("omega", 4.0))
    grid = options.get("grid")
    gen, family, report = extension.extend_via_resolvent_family(
        problem, omega, grid=None if grid is None else [float(g) for g in grid])
    results = {
        "report": _extension_report_json(report),
        "generator": serialize.generator_to_json(gen),
        "omega": family.omega,
        "grid": list(family.grid),
        "family": [{"lambda": lam, "map": _report_superop(f)} for lam, f in family.members],
    }
    return "ok", results


def _cmd_extend_group(scenario, options):
    system = _resolve_system(scenario)
    sub = _resolve_subsystem_generator(scenario, system, options)
    problem = ExtensionProblem.for_generator(system, sub, _extension_options(options))
    gen, report = extension.extend_group(
        problem,
        n_starts=int(options.get("starts", 8)),
        seed=int(options.get("seed", 0)),
    )
    results = {
        "report": _extension_report_json(report.extension),
        "generator": serialize.generator_to_json(gen),
        "inverse_residual": report.inverse_residual,
        "uniqueness_spread": report.uniqueness_spread,
        "multiplicativity_residual": report.multiplicativity_residual,
        "n_starts": report.n_starts,
    }
    return "ok", results


def _cmd_extend_discrete(scenario, options):
    system = _resolve_system(scenario)
    images = _resolve_map(scenario, system, options)
    horizon = int(options.get("horizon", 4))
    powers = extension.extend_discrete(system, images, horizon, _extension_options(options))
    return "ok", {"horizon": horizon,
                  "powers": [_report_superop(p) for p in powers]}


def _cmd_rigidity_probe(scenario, options):
    system = _resolve_system(scenario)
    report = extension.rigidity_probe(
        system,
        n_starts=int(options.get("starts", 8)),
        seed=int(options.get("seed", 0)),
        tol=float(options.get("tol", 1e-8)),
        max_iter=int(options.get("max_iter", 200_000)),
    )
    results = {
        "all_identity": report.all_identity,
        "max_pairwise_distance": report.max_pairwise_distance,
        "max_distance_to_identity": report.max_distance_to_identity,
        "identity_threshold": report.identity_threshold,
        "n_converged": report.n_converged,
        "n_runs": report.n_runs,
    }
    return "ok", results


def _cmd_demo_rebit(scenario, options):
    delta = float(options.get("delta_param", 1.0))
    omega = float(options.get("omega_param", 1.0))
    prefactor = options.get("g2_prefactor", "derived")
    tol = float(options.get("tol", 1e-8))
    checks = []

    def record(name, passed, **details):
        entry = {"name": name, "passed": bool(passed)}
        entry.update(details)
        checks.append(entry)

    # Four-case catalog of systems inside M_2.
    cases = catalog.four_case_catalog()
    expected = [(1, True), (2, True), (4, False), (4, False)]
    case_info = [{"span_dim": len(s), "envelope": e.name, "envelope_dim": e.dim,
                  "commutative": e.commutative} for s, e in cases]
    record("four-case-catalog",
           [(e.dim, e.commutative) for _, e in cases] == expected,
           cases=case_info)

    # Rebit cone on the integer grid: a*I + b*X + c*Z positive iff b^2+c^2 <= a^2.
    p = catalog.pauli_basis()
    rebit = catalog.rebit_system()
    from .systems import LevelElement, is_positive_element
    grid_ok = True
    for a in (-2, -1, 0, 1, 2):
        for b in (-2, -1, 0, 1, 2):
            for c in (-2, -1, 0, 1, 2):
                el = LevelElement(level=1, matrix=a * p.I + b * p.X + c * p.Z)
                got = is_positive_element(rebit, el, tol)
                want = (b * b + c * c <= a * a) and a >= 0
                grid_ok = grid_ok and (got == want)
    record("rebit-cone-grid", grid_ok, grid="{0,+-1,+-2}^3")

    # Rotation group: unique extension equals the commutator generator.
    rot = catalog.rebit_rotation(omega)
    truth = catalog.rotation_extension_generator(omega)
    try:
        gen, group_report = extension.extend_group(
            ExtensionProblem.for_generator(rebit, rot),
            n_starts=int(options.get("starts", 8)),
            seed=int(options.get("seed", 0)))
        rot_err = gen.op.distance(truth.op)
        record("rotation-extension-unique", rot_err <= 1e-6,
               distance_to_commutator_generator=rot_err,
               uniqueness_spread=group_report.uniqueness_spread,
               inverse_residual=group_report.inverse_residual)
    except GroupExtensionError as exc:
        record("rotation-extension-unique", False, error=str(exc))

    # Dissipative semigroup: extension exists but is not unique.
    diss = catalog.rebit_dissipative(delta)
    seeds = range(int(options.get("starts", 8)))
    y_images = []
    all_converged = True
    for s in seeds:
        opts = ExtensionOptions(tol=tol, seed=int(s), start="random")
        gen_s, rep_s = extension.extend_generator(
            ExtensionProblem.for_generator(rebit, diss, opts))
        all_converged = all_converged and rep_s.converged and gen_s.certificates.certified
        y_images.append(gen_s.op.apply(p.Y))
    spread = max((float(np.linalg.norm(u - v))
                  for i, u in enumerate(y_images) for v in y_images[i + 1:]),
                 default=0.0)
    record("dissipative-extension-not-unique", all_converged and spread >= 1e-3,
           all_converged=all_converged, max_spread_on_Y=spread)

    # The two named dissipative generators: same rebit action, different on Y.
    gen1 = catalog.g1(delta)
    gen2 = catalog.g2(delta, prefactor=prefactor)
    same_on_rebit = max(
        float(np.linalg.norm(gen1.op.apply(v) - diss.apply(v))) for v in rebit.basis)
    record("g1-restricts-to-dissipation", same_on_rebit <= 1e-12,
           restriction_error=same_on_rebit)
    g2_restriction = max(
        float(np.linalg.norm(gen2.op.apply(v) - diss.apply(v))) for v in rebit.basis)
    g2_x_coeff = float(np.real(np.trace(p.X.conj().T @ gen2.op.apply(p.X)) / 2.0))
    record("g2-restricts-to-dissipation", g2_restriction <= 1e-12,
           restriction_error=g2_restriction, prefactor=prefactor,
           action_on_X_coefficient=g2_x_coeff, expected_coefficient=-delta)
    y1 = float(np.real(np.trace(p.Y.conj().T @ gen1.op.apply(p.Y)) / 2.0))
    y2 = float(np.real(np.trace(p.Y.conj().T @ gen2.op.apply(p.Y)) / 2.0))
    record("g1-g2-differ-on-Y",
           abs(y1 + 2.0 * delta) <= 1e-12 and abs(y2 + delta) <= 1e-12,
           g1_Y_coefficient=y1, g2_Y_coefficient=y2)
    t_probe = 1.0
    diff = dynamics.evolve(gen1, t_probe).distance(dynamics.evolve(gen2, t_probe))
    record("evolutions-differ", diff > 0.1, frobenius_difference=diff, t=t_probe)

    failed = [c["name"] for c in checks if not c["passed"]]
    status = "ok" if not failed else "failed"
    return status, {"delta": delta, "omega": omega, "g2_prefactor": prefactor,
                    "checks": checks, "failed_checks": failed}


_HANDLERS = {
    "check-cp": _cmd_check_cp,
    "check-ccp": _cmd_check_ccp,
    "validate": _cmd_validate,
    "evolve": _cmd_evolve,
    "resolvent": _cmd_resolvent,
    "identities": _cmd_identities,
    "extend-map": _cmd_extend_map,
    "extend-generator": _cmd_extend_generator,
    "extend-resolvent-family": _cmd_extend_resolvent_family,
    "extend-group": _cmd_extend_group,
    "extend-discrete": _cmd_extend_discrete,
    "rigidity-probe": _cmd_rigidity_probe,
    "demo-rebit": _cmd_demo_rebit,
}


# ---------------------------------------------------------------------------
# Report assembly and rendering
# ---------------------------------------------------------------------------

def run_scenario(scenario: dict) -> dict:
    """Execute one scenario dict and return the full report."""
    options = dict(scenario.get("options", {}))
    command = scenario.get("command")
    provenance = {
        "tool": "ucpext",
        "version": __version__,
        "seed": options.get("seed"),
        "options": options,
        "choi_convention": CHOI_CONVENTION,
    }
    base = {"command": command, "provenance": provenance}
    try:
        validate_scenario(scenario)
        handler = _HANDLERS[command]
        status, results = handler(scenario, options)
        base.update(status=status, results=results)
    except InputError as exc:
        base.update(status="invalid-input", results={},
                    error={"type": "input", "message": str(exc)})
    except (NumericalError, ExtensionInfeasible, GroupExtensionError) as exc:
        base.update(status="failed", results={},
                    error={"type": type(exc).__name__, "message": str(exc)})
    except ResolventFamilyError as exc:
        base.update(status="failed", results={},
                    error={"type": "ResolventFamilyError", "message": str(exc),
                           "advice": exc.advice,
                           "attempts": [{"omega": a.get("omega"),
                                         "failure": a.get("failure")}
                                        for a in exc.attempts]})
    return base


_EXIT_BY_STATUS = {"ok": 0, "failed": 1, "invalid-input": 2}


def _render_text(report: dict) -> str:
    def fmt(value, indent=0):
        pad = "  " * indent
        lines = []
        if isinstance(value, dict):
            for key, val in value.items():
                if isinstance(val, (dict, list)):
                    lines.append(f"{pad}{key}:")
                    lines.extend(fmt(val, indent + 1))
                else:
                    lines.append(f"{pad}{key}: {_fmt_scalar(val)}")
        elif isinstance(value, list):
            if len(value) > 8:
                lines.append(f"{pad}[{len(value)} entries]")
            else:
                for item in value:
                    if isinstance(item, (dict, list)):
                        lines.append(f"{pad}-")
                        lines.extend(fmt(item, indent + 1))
                    else:
                        lines.append(f"{pad}- {_fmt_scalar(item)}")
        return lines

    head = [f"command: {report['command']}", f"status: {report['status']}"]
    body = fmt({k: v for k, v in report.items() if k not in ("command", "status")})
    return "\n".join(head + body)


def _fmt_scalar(value):
    if isinstance(value, float):
        return f"{value:.3e}"
    return value


def _emit(report, mode: str) -> None:
    if mode == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        print(_render_text(report))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucpext",
        description="Operator-system semigroup toolkit: scenario runner.")
    sub = parser.add_subparsers(dest="mode", required=True)

    runp = sub.add_parser("run", help="run one scenario file (or several with --batch)")
    runp.add_argument("scenario", nargs="+", help="scenario JSON file(s)")
    runp.add_argument("--batch", action="store_true",
                      help="run all given scenarios, each isolated; exit with the worst code")
    runp.add_argument("--tol", type=float, default=None)
    runp.add_argument("--max-iter", type=int, default=None)
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--omega", type=float, default=None)
    runp.add_argument("--starts", type=int, default=None)
    runp.add_argument("--report", choices=("json", "text"), default="json")

    demo = sub.add_parser("demo-rebit", help="run the full rebit demonstration")
    demo.add_argument("--delta", type=float, default=1.0)
    demo.add_argument("--omega-param", type=float, default=1.0)
    demo.add_argument("--g2-prefactor", choices=("derived", "paper"), default="derived")
    demo.add_argument("--starts", type=int, default=8)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--report", choices=("json", "text"), default="json")
    return parser


def _apply_flag_overrides(scenario: dict, args) -> dict:
    scenario = dict(scenario)
    options = dict(scenario.get("options", {}))
    for flag, key in (("tol", "tol"), ("max_iter", "max_iter"), ("seed", "seed"),
                      ("omega", "omega"), ("starts", "starts")):
        value = getattr(args, flag, None)
        if value is not None:
            options[key] = value
    scenario["options"] = options
    return scenario


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.mode == "demo-rebit":
        scenario = {"command": "demo-rebit",
                    "options": {"delta_param": args.delta,
                                "omega_param": args.omega_param,
                                "g2_prefactor": args.g2_prefactor,
                                "starts": args.starts,
                                "seed": args.seed}}
        report = run_scenario(scenario)
        _emit(report, args.report)
        return _EXIT_BY_STATUS[report["status"]]

    paths = args.scenario
    if len(paths) > 1 and not args.batch:
        print(json.dumps({"status": "invalid-input",
                          "error": {"type": "input",
                                    "message": "multiple scenarios require --batch"}}))
        return 2
    worst = 0
    for path in paths:
        try:
            scenario = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            report = {"command": None, "status": "invalid-input", "results": {},
                      "error": {"type": "input",
                                "message": f"cannot parse scenario {path}: {exc}"}}
            _emit(report, args.report)
            worst = max(worst, 2)
            continue
        if not isinstance(scenario, dict):
            scenario = {"command": None}
        report = run_scenario(_apply_flag_overrides(scenario, args))
        _emit(report, args.report)
        worst = max(worst, _EXIT_BY_STATUS[report["status"]])
    return worst


if __name__ == "__main__":
    sys.exit(main())
