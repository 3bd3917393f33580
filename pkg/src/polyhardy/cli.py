"""Command-line driver.

    polyhardy run SCENARIO.json [--output report.json] [flags]
    polyhardy compare A.json B.json [flags]
    polyhardy selftest [--random K] [flags]

Exit codes: 0 all checks pass, 1 input or capacity error, 2 a verdict
failed, 3 a certificate came back indeterminate.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .blh import (
    MatrixPolynomial,
    extract_phi,
    extract_phi_via_theta,
    extract_theta,
    is_isometric_multiplier,
    kappa_polynomial,
    shift_purity_diagnostic,
    verify_intertwining,
    wold_multiplication_consistency,
)
from .classify import coincide, doubly_commuting_classification
from .errors import (
    CapacityError,
    DegenerateInputError,
    FlaggedWanderingError,
    GradeError,
    NotInvariantError,
    NotIsometricError,
    PipelineError,
    PolynomialParseError,
    ToolkitError,
)
from .grading import Grade
from .operators import model_tuple
from .parsing import parse_polynomial
from .reporting import canonical_json
from .scenarios import (
    DEFAULT_PIPELINE,
    Scenario,
    builtin_corpus,
    load_scenario,
    scenario_to_json,
)
from .subspace import (
    DEFAULT_MARGIN,
    build_from_theta,
    check_invariant,
    max_principal_angle_sine,
    orbit_span,
    wandering_subspace,
    wold_reconstruction,
)

DEFAULT_MAX_DIM = 20000
ANGLE_TOL = 1e-8

_STEP_REQUIRES = {
    "orbit": None,
    "wandering": "orbit",
    "extract": "wandering",
    "verify": "extract",
    "classify": "extract",
}


def _validate_pipeline(steps: tuple[str, ...]) -> None:
    seen: set[str] = set()
    for step in steps:
        if step not in _STEP_REQUIRES:
            raise PipelineError(f"unknown pipeline step '{step}'")
        required = _STEP_REQUIRES[step]
        if required is not None and required not in seen:
            raise PipelineError(f"step '{step}' requires step '{required}'")
        seen.add(step)


def _guard_dims(grade: Grade, margin: int, max_dim: int) -> None:
    working = Grade(
        grade.n,
        grade.outer_cap + margin,
        grade.inner_cap + margin,
        grade.coeff_dim,
        grade.safe_margin,
    )
    wold_caps = (grade.outer_cap - 1) + grade.n * (grade.inner_cap - 1) + 1
    wold = Grade(grade.n, wold_caps, wold_caps, grade.coeff_dim, grade.safe_margin)
    rebuild = Grade(
        grade.n,
        grade.outer_cap + grade.n * grade.inner_cap,
        grade.inner_cap,
        grade.coeff_dim,
        grade.safe_margin,
    )
    for name, g in [
        ("target", grade),
        ("working", working),
        ("wold", wold),
        ("rebuild", rebuild),
    ]:
        if g.dim > max_dim:
            raise CapacityError(
                f"{name} grade needs ambient dimension {g.dim} > limit {max_dim}"
            )


def run_pipeline(
    scenario: Scenario,
    tolerance: float = 1e-10,
    margin: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
    stability: bool = True,
) -> dict:
    """Run the scenario's pipeline and return the full report dict."""
    start = time.monotonic()
    steps = tuple(scenario.pipeline) or DEFAULT_PIPELINE
    _validate_pipeline(steps)
    grade = scenario.grade
    if grade.outer_cap <= grade.safe_margin:
        raise DegenerateInputError(
            "outer cap does not exceed the safe margin; the trusted range is empty"
        )
    used_margin = scenario.option("margin", DEFAULT_MARGIN) if margin is None else margin
    used_margin = int(used_margin)
    force = bool(scenario.option("force", False))
    _guard_dims(grade, used_margin, max_dim)
    generators = [parse_polynomial(text, grade) for text in scenario.generators]
    trusted = grade.outer_cap - grade.safe_margin

    report: dict = {
        "label": scenario.label,
        "grade": scenario_to_json(scenario)["grade"],
        "generators": list(scenario.generators),
        "pipeline": list(steps),
        "options": {"margin": used_margin, "force": force, "tolerance": tolerance},
        "steps": {},
    }
    verdicts: dict[str, bool] = {}

    s = w = theta = None
    phis: list = []
    if "orbit" in steps:
        s = orbit_span(generators, grade, used_margin, labels=(scenario.label,))
        orbit_info = {
            "dim": s.dim,
            "n_safe_columns": s.n_certified,
            "working_caps": list(s.provenance.working_caps),
        }
        if stability:
            probe = orbit_span(generators, grade, used_margin + 1)
            orbit_info["stable"] = probe.dim == s.dim
            orbit_info["probe_margin"] = used_margin + 1
            report.setdefault("flags", {})["margin_stable"] = probe.dim == s.dim
        report["steps"]["orbit"] = orbit_info

    if "wandering" in steps:
        w = wandering_subspace(s)
        report["steps"]["wandering"] = {
            "dim": w.dim,
            "certified": w.n_certified,
            "flagged": w.n_flagged,
        }

    if "extract" in steps:
        theta = extract_theta(s, w, force=force)
        phis = [extract_phi(s, w, axis, force=force) for axis in range(grade.n)]
        via = [extract_phi_via_theta(s, w, axis, force=force) for axis in range(grade.n)]
        agreement = 0.0
        nc = w.n_certified
        for direct, indirect in zip(phis, via):
            for cd, ci in zip(direct.coeffs, indirect.coeffs):
                diff = abs(cd[:nc, :nc] - ci[:nc, :nc]).max() if nc else 0.0
                agreement = max(agreement, float(diff))
        report["steps"]["extract"] = {
            "theta_degree": theta.degree,
            "theta": theta,
            "phi": phis,
            "phi_route_agreement": agreement,
            "n_certified": nc,
        }
        verdicts["phi_routes_agree"] = agreement < max(tolerance, 1e-10)

    if "verify" in steps:
        inv = check_invariant(s, model_tuple(grade), tolerance=tolerance)
        verdicts["joint_invariant"] = inv.verdict
        intertwine = [
            verify_intertwining(
                kappa_polynomial(grade, axis),
                theta,
                phis[axis],
                trusted,
                n_certified=w.n_certified,
                tolerance=tolerance,
            )
            for axis in range(grade.n)
        ]
        verdicts["intertwining"] = all(r.verdict for r in intertwine)
        iso = is_isometric_multiplier(theta, w.n_certified, tolerance=tolerance)
        verdicts["isometry"] = iso.verdict
        wold = wold_reconstruction(s, tolerance=tolerance)
        verdicts["wold"] = wold.verdict
        rebuilt = build_from_theta(theta, grade)
        angle = max_principal_angle_sine(rebuilt, s)
        rebuilt_inv = check_invariant(rebuilt, [model_tuple(grade)[0]], tolerance)
        complete = rebuilt.dim == s.dim
        rebuild_info = {
            "original_dim": s.dim,
            "rebuilt_dim": rebuilt.dim,
            "max_angle_sine": angle,
            "outer_invariance": rebuilt_inv.residuals[0],
            "complete": complete,
        }
        verdicts["rebuild_angles"] = angle < ANGLE_TOL
        verdicts["rebuild_outer_invariant"] = rebuilt_inv.verdict
        if complete:
            joint = check_invariant(rebuilt, model_tuple(grade), tolerance)
            rebuild_info["joint_invariance"] = max(joint.residuals)
            verdicts["rebuild_joint_invariant"] = joint.verdict
        else:
            rebuild_info["joint_invariance"] = None
            rebuild_info["note"] = (
                "capped wandering vectors do not generate the capped slice under "
                "the outer shift; joint comparison skipped"
            )
        consistency = [
            wold_multiplication_consistency(s, w, phis[axis], axis, tolerance=tolerance)
            for axis in range(grade.n)
        ]
        verdicts["wold_multiplication"] = all(c.verdict for c in consistency)
        report["steps"]["verify"] = {
            "invariance": inv,
            "intertwining": intertwine,
            "isometry": iso,
            "wold": wold,
            "rebuild": rebuild_info,
            "wold_multiplication": consistency,
        }

    if "classify" in steps:
        classification = doubly_commuting_classification(
            s, phis, w.n_certified, tolerance=max(tolerance, 1e-10)
        )
        classify_info = {"doubly_commuting": classification}
        if scenario.option("purity", False):
            classify_info["purity"] = shift_purity_diagnostic(phis[0])
        report["steps"]["classify"] = classify_info
        verdicts["classification_consistent"] = classification.equivalence_holds

    verdicts["all"] = all(verdicts.values())
    report["verdicts"] = verdicts
    report["timing"] = {"seconds": round(time.monotonic() - start, 3)}
    return report


def _emit(report: dict, output: str | None, quiet: bool) -> None:
    text = canonical_json(report)
    if output:
        Path(output).write_text(text)
        if not quiet:
            print(f"report written to {output}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    report = run_pipeline(
        scenario,
        tolerance=args.tolerance,
        margin=args.margin,
        max_dim=args.max_dim,
        stability=not args.no_stability,
    )
    _emit(report, args.output, args.quiet)
    return 0 if report["verdicts"]["all"] else 2


def _certified_phis(
    scenario: Scenario, margin_override: int | None, max_dim: int
) -> tuple[str, list[MatrixPolynomial], int, int]:
    grade = scenario.grade
    if grade.outer_cap <= grade.safe_margin:
        raise DegenerateInputError(
            "outer cap does not exceed the safe margin; the trusted range is empty"
        )
    used_margin = int(
        scenario.option("margin", DEFAULT_MARGIN)
        if margin_override is None
        else margin_override
    )
    _guard_dims(grade, used_margin, max_dim)
    generators = [parse_polynomial(t, grade) for t in scenario.generators]
    s = orbit_span(generators, grade, used_margin)
    w = wandering_subspace(s)
    force = bool(scenario.option("force", True))
    phis = [extract_phi(s, w, axis, force=force) for axis in range(grade.n)]
    nc = w.n_certified
    cert_phis = [
        MatrixPolynomial(tuple(c[:nc, :nc] for c in phi.coeffs)) for phi in phis
    ]
    return scenario.label, cert_phis, grade.outer_cap - grade.safe_margin, nc


def _cmd_compare(args: argparse.Namespace) -> int:
    results = [
        _certified_phis(load_scenario(path), args.margin, args.max_dim)
        for path in (args.scenario_a, args.scenario_b)
    ]
    (label_a, phis_a, trusted_a, nc_a), (label_b, phis_b, trusted_b, nc_b) = results
    if len(phis_a) != len(phis_b):
        print("scenarios have different inner-variable counts", file=sys.stderr)
        return 1
    cert = coincide(phis_a, phis_b, min(trusted_a, trusted_b))
    out = {
        "scenario_a": label_a,
        "scenario_b": label_b,
        "certified_dims": [nc_a, nc_b],
        "certificate": cert,
    }
    _emit(out, args.output, args.quiet)
    if cert.verdict == "coincide":
        return 0
    if cert.verdict == "distinct":
        return 2
    return 3


def _cmd_selftest(args: argparse.Namespace) -> int:
    scenarios = builtin_corpus(random_count=args.random)
    failures = 0
    for scenario in scenarios:
        try:
            report = run_pipeline(
                scenario,
                tolerance=args.tolerance,
                max_dim=args.max_dim,
                stability=not args.no_stability,
            )
            ok = report["verdicts"]["all"]
        except ToolkitError as exc:
            ok = False
            if not args.quiet:
                print(f"FAIL {scenario.label}: {exc}", file=sys.stderr)
        if not args.quiet:
            print(f"{'PASS' if ok else 'FAIL'} {scenario.label}")
        failures += 0 if ok else 1
    if not args.quiet:
        print(f"{len(scenarios) - failures}/{len(scenarios)} scenarios passed")
    return 0 if failures == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyhardy",
        description="capped invariant-subspace toolkit for vector Hardy spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tolerance", type=float, default=1e-10)
        p.add_argument("--margin", type=int, default=None)
        p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--no-stability", action="store_true")
        p.add_argument("--output", type=str, default=None)

    p_run = sub.add_parser("run", help="run a scenario pipeline")
    p_run.add_argument("scenario")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="coincidence certificate for two scenarios")
    p_cmp.add_argument("scenario_a")
    p_cmp.add_argument("scenario_b")
    common(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_self = sub.add_parser("selftest", help="run the bundled corpus")
    p_self.add_argument("--random", type=int, default=2)
    common(p_self)
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        PolynomialParseError,
        GradeError,
        DegenerateInputError,
        CapacityError,
        PipelineError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NotInvariantError, NotIsometricError, FlaggedWanderingError) as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
