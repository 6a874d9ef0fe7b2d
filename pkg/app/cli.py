# cli.py
"""
Command-line front end.

    python -m app.cli analyze  --input pvalues.csv --procedure bh --alpha 0.05 --out results/
    python -m app.cli sweep-k  --input pvalues.csv --k-min 1 --k-max 200 --svg
    python -m app.cli bounds   --procedure bh --m 1000 --m0 900 --k 20
    python -m app.cli bounds   --procedure sp-k --m 1000 --k 20 --bound sp-bi sp-dependence
    python -m app.cli simulate --scenario extreme_dependence --m 100 --m0 90 --procedure adaptive-bh --clamp natural

Exit codes: 0 success, 2 invalid input or parameters, 3 a bound is not
applicable and --strict was given.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .config import settings
from .schemas.analysis_schemas import PROCEDURE_IDS, BoundsRequest, ProcedureParams, SimulationRequest
from .schemas.bound_schemas import BoundReport
from .schemas.simulation_schemas import Scenario
from .services.analysis_service import run_analysis, run_bounds, run_simulation
from .services.estimator_service import sarkar_heller_lambda
from .services.export_service import get_export_service
from .services.procedure_service import sweep_k
from .services.pvalue_loader import load_pvalues

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_APPLICABLE = 3

SARKAR_HELLER = "sarkar-heller"


def _parameter_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--alpha", type=float, default=settings.DEFAULT_ALPHA, help="Nominal FDR level")
    parent.add_argument("--lambda", dest="lam", default=None,
                        help=f"Cap / Storey tuning parameter in (0, 1], or '{SARKAR_HELLER}' for alpha/(1+alpha)")
    parent.add_argument("--k", type=int, default=None, help="Truncation level (default m)")
    parent.add_argument("--kappa", type=int, default=None, help="Early-stop level of es-k (default min(k, m-1))")
    parent.add_argument("--C", dest="C", type=float, default=None, help="Lower clamp m0_hat >= C m")
    parent.add_argument("--delta", type=float, default=None, help="Upper clamp m0_hat <= m / delta")
    parent.add_argument("--clamp", choices=["sparsity", "natural"], default="sparsity",
                        help="sparsity: clamp to [C m, m/delta]; natural: plain Storey range")
    parent.add_argument("--correction", choices=["none", "bi", "dependence"], default="none",
                        help="Divide the schedule by Ck*Dk for this regime")
    parent.add_argument("--mode", choices=["su", "sd"], default="su", help="Step-up or step-down")
    parent.add_argument("--out", default=settings.OUTPUT_DIR, help="Output directory")
    parent.add_argument("--strict", action="store_true", help="Exit 3 when a reported bound is not applicable")
    parent.add_argument("--log-level", default=settings.LOG_LEVEL)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _parameter_parser()
    parser = argparse.ArgumentParser(
        prog="depcorr",
        description="Dependence-corrected step-up / step-down multiple tests, FDR bounds and Monte-Carlo checks",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    analyze = verbs.add_parser("analyze", parents=[parent], help="Apply a procedure to a p-value file")
    analyze.add_argument("--input", required=True, help="CSV with one p-value per line or a p-value column")
    analyze.add_argument("--column", default=None, help="Column name or 1-based position")
    analyze.add_argument("--procedure", choices=PROCEDURE_IDS, default="bh")
    analyze.add_argument("--m0", type=int, default=None, help="Null count used for the reported bounds (default m)")

    sweep = verbs.add_parser("sweep-k", parents=[parent], help="Number of rejections of BH(k) and ES(k) against k")
    sweep.add_argument("--input", required=True)
    sweep.add_argument("--column", default=None)
    sweep.add_argument("--k-min", type=int, default=1)
    sweep.add_argument("--k-max", type=int, default=None)
    sweep.add_argument("--svg", action="store_true", help="Also write sweep.svg")

    bounds = verbs.add_parser("bounds", parents=[parent], help="FDR bounds of a procedure at (m, m0)")
    bounds.add_argument("--procedure", choices=PROCEDURE_IDS, default="bh")
    bounds.add_argument("--m", type=int, required=True)
    bounds.add_argument("--m0", type=int, default=None)
    bounds.add_argument("--bound", nargs="+", default=None, metavar="ID",
                        help="Only these bounds (e.g. det-dependence marginal); default all of the procedure")

    simulate = verbs.add_parser("simulate", parents=[parent], help="Monte-Carlo FDR / FWER / power")
    simulate.add_argument("--procedure", choices=PROCEDURE_IDS, nargs="+", default=["bh"])
    simulate.add_argument("--scenario", choices=["BI", "extreme_dependence", "equicorrelated"], default="BI")
    simulate.add_argument("--m", type=int, required=True)
    simulate.add_argument("--m0", type=int, required=True)
    simulate.add_argument("--effect", type=float, default=None, help="Beta shape (BI) or mean shift (equicorrelated)")
    simulate.add_argument("--rho", type=float, default=0.0)
    simulate.add_argument("--reps", type=int, default=settings.MC_REPLICATIONS)
    simulate.add_argument("--seed", type=int, default=settings.MC_SEED)
    simulate.add_argument("--workers", type=int, default=settings.MC_WORKERS)
    return parser


def _resolve_lambda(args: argparse.Namespace) -> Optional[float]:
    if args.lam is None:
        return None
    if str(args.lam).strip().lower() == SARKAR_HELLER:
        return sarkar_heller_lambda(args.alpha)
    try:
        return float(args.lam)
    except ValueError:
        raise ValueError(f"--lambda must be a number or '{SARKAR_HELLER}', got {args.lam!r}")


def _params(args: argparse.Namespace, procedure: str) -> Dict:
    return {
        "procedure": procedure,
        "alpha": args.alpha,
        "lam": _resolve_lambda(args),
        "k": args.k,
        "kappa": args.kappa,
        "C": args.C,
        "delta": args.delta,
        "clamp": args.clamp,
        "correction": args.correction,
        "mode": args.mode,
    }


def _not_applicable(reports: List[BoundReport]) -> List[str]:
    return [report.source for report in reports if not report.applicable]


def _strict_exit(args: argparse.Namespace, failing: List[str]) -> int:
    if failing and args.strict:
        logger.error(f"Bounds not applicable: {', '.join(failing)}")
        return EXIT_NOT_APPLICABLE
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    exporter = get_export_service()
    p = load_pvalues(args.input, args.column)
    params = ProcedureParams(**_params(args, args.procedure))
    analysis = run_analysis(p, params, args.m0)
    exporter.export_rejections(p, analysis, args.out)
    exporter.export_summary(analysis, params.model_dump(), args.out)
    print(f"{analysis.procedure}: R={analysis.R} of m={analysis.m} (threshold {analysis.threshold!r})")
    return _strict_exit(args, _not_applicable(analysis.bounds))


def cmd_sweep_k(args: argparse.Namespace) -> int:
    exporter = get_export_service()
    p = load_pvalues(args.input, args.column)
    result = sweep_k(p, args.alpha, args.k_min, args.k_max)
    exporter.export_sweep_csv(result, args.out)
    if args.svg:
        exporter.export_sweep_svg(result, args.out)
    print(f"m={result.m}: R_BY={result.R_BY}, R_Bonferroni={result.R_Bonferroni}, "
          f"R_BH(k_max)={result.rows[-1].R_BHk}")
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    request = BoundsRequest(m=args.m, m0=args.m0, bound=args.bound, **_params(args, args.procedure))
    response = run_bounds(request)
    get_export_service().export_bounds(response.bounds, args.out)
    for report in response.bounds:
        flag = "" if report.applicable else "  (not applicable)"
        print(f"{report.source}: {report.value!r}{flag}")
    return _strict_exit(args, _not_applicable(response.bounds))


def cmd_simulate(args: argparse.Namespace) -> int:
    lam = _resolve_lambda(args)
    scenario = Scenario(
        model=args.scenario,
        m=args.m,
        m0=args.m0,
        effect=args.effect,
        rho=args.rho,
        lam=lam if lam is not None and lam < 1 else None,
        replications=args.reps,
        seed=args.seed,
    )
    request = SimulationRequest(
        scenario=scenario,
        procedures=[ProcedureParams(**_params(args, name)) for name in args.procedure],
    )
    response = run_simulation(request, workers=args.workers)
    get_export_service().export_simulation(response.rows, args.out)
    for row in response.rows:
        print(f"{row.scenario} {row.procedure}: FDR={row.fdr_hat:.5f} level {row.nominal_level:.4g} "
              f"[{row.level_verdict}], bound {row.bound_source} [{row.bound_verdict}]")
    failing = [row.procedure for row in response.rows if row.bound_source is not None and row.bound_verdict == "N/A"]
    return _strict_exit(args, failing)


COMMANDS = {
    "analyze": cmd_analyze,
    "sweep-k": cmd_sweep_k,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.verb](args)
    except ValueError as e:
        # MultipleTestingError and pydantic ValidationError are both ValueErrors
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
