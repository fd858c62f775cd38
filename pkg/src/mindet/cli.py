"""Command-line front end: ``mindet {generate,verify,moments,reference,discrete}``.

Exit codes: 0 pass, 1 verdict fail, 2 numerical budget exceeded, 64 usage or
validation error.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .discrete import discrete_moments, default_basis, expand, lobe_expansion
from .errors import NumericalBudgetError, ValidationError
from .export import beta_label, formats_for, write_json, write_table
from .moments import moments_operator_path, moments_r_domain, verify_m_indeterminate
from .reference import HeydeParams, heyde_table
from .xform import lobe_transforms

log = logging.getLogger("mindet")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_PI_TERM = re.compile(r"^([+-]?)(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$")


def _number(tok: str) -> float:
    """A float, or a multiple of pi such as ``pi``, ``-pi/2``, ``3pi/4``, ``0.5*pi``."""
    t = tok.strip().lower()
    m = _PI_TERM.match(t)
    if m:
        sign, mult, den = m.groups()
        val = (float(mult) if mult else 1.0) * math.pi / (float(den) if den else 1.0)
        return -val if sign == "-" else val
    return float(t)


def _float_list(text: str) -> list[float]:
    out = []
    for tok in text.replace(",", " ").split():
        try:
            out.append(_number(tok))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from exc
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--operator", action="append",
                        help="operator name (repeatable): momentum, position_plus_momentum, scale, constant_force")
    common.add_argument("--beta", type=_float_list, help="comma-separated phases, e.g. '0,pi/2,pi'")
    common.add_argument("--nmax", type=int,
                        help="highest moment order (discrete: highest retained eigenindex)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json", "both"))
    common.add_argument("--tol-moments", type=float)
    common.add_argument("--tol-cross", type=float)
    common.add_argument("--tol-density", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mindet", description="Moment-indeterminate densities from disjoint-support superpositions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("generate", parents=[common], help="write sampled densities per (operator, beta)")
    sub.add_parser("verify", parents=[common], help="check beta-invariance of moments and beta-dependence of densities")
    sub.add_parser("moments", parents=[common], help="dual-path moment tables")
    ref = sub.add_parser("reference", parents=[common], help="Heyde/log-normal moment table")
    ref.add_argument("--epsilon", type=_float_list)
    ref.add_argument("--k", type=_int_list)
    disc = sub.add_parser("discrete", parents=[common], help="oscillator-basis PMFs and moment spread")
    disc.add_argument("--single-lobe", action="store_true", help="drop the second seed (beta-constant fixture)")
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {}
    if args.operator:
        overrides["operators"] = args.operator
    if args.beta is not None:
        overrides["betas"] = args.beta
    if args.nmax is not None:
        key = {"discrete": "discrete_n_max", "reference": "reference_n_max"}.get(args.command, "n_max")
        overrides[key] = args.nmax
    if args.out is not None:
        overrides["out"] = args.out
    if args.format is not None:
        overrides["format"] = args.format
    for name in ("tol_moments", "tol_cross", "tol_density"):
        if getattr(args, name) is not None:
            overrides[name] = getattr(args, name)
    if getattr(args, "epsilon", None) is not None:
        overrides["epsilons"] = args.epsilon
    if getattr(args, "k", None) is not None:
        overrides["ks"] = args.k
    if getattr(args, "single_lobe", False):
        overrides["single_lobe"] = True
    d = cfg.to_dict()
    d.update(overrides)
    return RunConfig.from_dict(d)


def provenance(cfg: RunConfig, **extra) -> dict:
    return {
        "tool": f"mindet {__version__}",
        "config_sha256": cfg.digest(),
        "parameters": {k: v for k, v in cfg.to_dict().items() if k not in ("out", "format")},
        "tolerances": {k: v for k, v in cfg.to_dict().items() if k.startswith("tol_") or k.endswith("budget")},
        **extra,
    }


def _lobes(cfg: RunConfig, op):
    return lobe_transforms(cfg.state(0.0), op, cfg.grid(op))


def cmd_generate(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    bad = []
    for name in cfg.operators:
        op = cfg.operator(name)
        lobes = _lobes(cfg, op)
        for beta in cfg.betas:
            dens = lobes.density(beta)
            mass_err = abs(dens.total_mass - 1.0)
            if mass_err > cfg.tol_mass:
                bad.append(f"{name} beta={beta:.6g}: mass error {mass_err:.3e}")
            prov = provenance(cfg, operator=op.to_dict(), beta=beta, grid=dens.grid.to_dict(),
                              integral=dens.integral, tail_mass_estimate=dens.tail_mass_estimate,
                              total_mass=dens.total_mass, amplitude_error=dens.amplitude_error)
            rows = zip(dens.grid.values, dens.values)
            write_table(out, f"density_{name}_{beta_label(beta)}", ("r", "density"), rows, prov, cfg.format)
            log.info("wrote density %s beta=%s (mass %.15g)", name, beta_label(beta), dens.total_mass)
    if bad:
        raise NumericalBudgetError("normalization outside tolerance: " + "; ".join(bad))
    return EXIT_PASS


def _discrete_report(cfg: RunConfig) -> dict:
    base = cfg.state(0.0)
    basis = default_basis(base, cfg.discrete_n_max)
    lobes = lobe_expansion(base, basis)
    pmfs = {b: expand(cfg.state(b), basis, budget=cfg.truncation_budget, lobes=lobes) for b in cfg.betas}
    reports = {b: discrete_moments(p, 4) for b, p in pmfs.items()}
    table = np.array([reports[b].moments for b in cfg.betas])
    spread = table.max(axis=0) - table.min(axis=0)
    rel = spread / np.abs(table).max(axis=0)
    dp = max((float(np.max(np.abs(pmfs[a].probs - pmfs[b].probs))) for a, b in itertools.combinations(cfg.betas, 2)),
             default=0.0)
    reasons = []
    captured = min(p.captured_mass for p in pmfs.values())
    if captured < 1.0 - cfg.truncation_budget:
        reasons.append(f"captured mass {captured:.12g} below 1 - {cfg.truncation_budget:.1e}")
    if not np.all(rel <= cfg.tol_discrete_spread):
        reasons.append(f"discrete moment spread {rel.max():.3e} above {cfg.tol_discrete_spread:.1e}")
    if len(cfg.betas) > 1 and not dp >= cfg.tol_pmf_difference:
        reasons.append(f"PMFs indistinguishable: max difference {dp:.3e} below {cfg.tol_pmf_difference:.1e}")
    return {
        "pmfs": pmfs, "reports": reports, "spread": spread, "relative_spread": rel, "max_pmf_difference": dp,
        "summary": {
            "operator": basis.operator.to_dict(), "basis": basis.to_dict(), "betas": cfg.betas,
            "captured_mass_min": captured, "moments": reports[cfg.betas[0]].moments,
            "error_estimates": reports[cfg.betas[0]].abs_error_estimates,
            "max_moment_spread": spread, "relative_moment_spread": rel, "max_pmf_difference": dp,
            "verdict": "fail" if reasons else "pass", "reasons": reasons,
        },
    }


def cmd_verify(cfg: RunConfig) -> int:
    if len(cfg.betas) < 2:
        raise ValidationError("verify needs at least two betas")
    psi1, psi2 = cfg.seeds()
    tol = cfg.tolerances()
    results = []
    ok = True
    for name in cfg.operators:
        op = cfg.operator(name)
        rep = verify_m_indeterminate(psi1, psi2, op, cfg.betas, cfg.n_max, tol, grid=cfg.grid(op)).to_dict()
        worst = max(rep["mass_errors"])
        if worst > cfg.tol_mass:
            rep["verdict"] = "fail"
            rep["reasons"].append(f"mass error {worst:.3e} above {cfg.tol_mass:.1e}")
        ok &= rep["verdict"] == "pass"
        results.append(rep)
        print(f"{name:24s} {rep['verdict']:4s}  spread {max(rep['relative_moment_spread']):.2e}  "
              f"L1 {rep['density_l1_spread']:.4f}  cross {rep['cross_term_max']:.1e}"
              + "".join(f"\n    {r}" for r in rep["reasons"]))
    disc = _discrete_report(cfg)["summary"]
    ok &= disc["verdict"] == "pass"
    print(f"{'discrete (oscillator)':24s} {disc['verdict']:4s}  spread {max(disc['relative_moment_spread']):.2e}  "
          f"max dP {disc['max_pmf_difference']:.4f}" + "".join(f"\n    {r}" for r in disc["reasons"]))
    report = {"provenance": provenance(cfg), "continuous": results, "discrete": disc,
              "verdict": "pass" if ok else "fail"}
    write_json(Path(cfg.out) / "verify_report.json", report)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_moments(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    multi = len(cfg.betas) > 1
    for name in cfg.operators:
        op = cfg.operator(name)
        op_reports = {b: moments_operator_path(cfg.state(b), op, cfg.n_max) for b in cfg.betas}
        lobes = _lobes(cfg, op)
        n_r = min(cfg.n_max, cfg.n_max_r)
        r_reports = {b: moments_r_domain(lobes.density(b), n_r, tail_budget=cfg.tail_budget) for b in cfg.betas}
        table = np.array([op_reports[b].moments for b in cfg.betas])
        spread = table.max(axis=0) - table.min(axis=0)
        rel = spread / (1.0 + np.abs(table).max(axis=0))
        header = ["beta", "n", "operator_path", "operator_path_error", "r_domain", "r_domain_error", "difference",
                  "agree"]
        if multi:
            header += ["beta_spread", "beta_spread_relative"]
        rows = []
        for b in cfg.betas:
            a, r = op_reports[b], r_reports[b]
            for n in range(cfg.n_max + 1):
                row = [b, n, a.moments[n], a.abs_error_estimates[n]]
                if n <= n_r:
                    diff = r.moments[n] - a.moments[n]
                    row += [r.moments[n], r.abs_error_estimates[n], diff,
                            bool(abs(diff) <= a.abs_error_estimates[n] + r.abs_error_estimates[n])]
                else:
                    row += ["", "", "", ""]
                if multi:
                    row += [spread[n], rel[n]]
                rows.append(row)
        prov = provenance(cfg, operator=op.to_dict(), grid=lobes.grid.to_dict())
        write_table(out, f"moments_{name}", header, rows, prov, cfg.format)
        log.info("wrote moments %s", name)
    return EXIT_PASS


def cmd_reference(cfg: RunConfig) -> int:
    for eps, k in itertools.product(cfg.epsilons, cfg.ks):
        HeydeParams(eps, k)
    rows_in = heyde_table(cfg.reference_n_max, cfg.epsilons, cfg.ks)
    header = ["n", "epsilon", "k", "numeric", "exact", "relative_error", "pass"]
    rows = []
    ok = True
    for row in rows_in:
        good = row["rel_error"] <= cfg.tol_reference
        ok &= good
        rows.append([row["n"], row["epsilon"], row["k"], row["numeric"], row["exact"], row["rel_error"], good])
    write_table(Path(cfg.out), "reference_heyde", header, rows, provenance(cfg), cfg.format)
    print(f"reference: {sum(r[-1] for r in rows)}/{len(rows)} rows within {cfg.tol_reference:.0e}")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_discrete(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    res = _discrete_report(cfg)
    summ = res["summary"]
    for b, pmf in res["pmfs"].items():
        prov = provenance(cfg, basis=pmf.basis.to_dict(), beta=b, captured_mass=pmf.captured_mass,
                          missing_mass=pmf.missing_mass, coefficient_error=pmf.coeff_error)
        rows = zip(range(len(pmf.probs)), pmf.eigenvalues, pmf.probs)
        write_table(out, f"pmf_{beta_label(b)}", ("n", "eigenvalue", "probability"), rows, prov, cfg.format)
    header = ["m"] + [f"moment_beta_{beta_label(b)}" for b in cfg.betas] + ["error_estimate", "spread",
                                                                           "relative_spread", "pass"]
    rows = []
    for m in range(len(res["spread"])):
        errs = max(res["reports"][b].abs_error_estimates[m] for b in cfg.betas)
        rows.append([m] + [res["reports"][b].moments[m] for b in cfg.betas]
                    + [errs, res["spread"][m], res["relative_spread"][m],
                       bool(res["relative_spread"][m] <= cfg.tol_discrete_spread)])
    write_table(out, "discrete_moments", header, rows,
                provenance(cfg, max_pmf_difference=summ["max_pmf_difference"], verdict=summ["verdict"]), cfg.format)
    print(f"discrete: {summ['verdict']}" + "".join(f"\n    {r}" for r in summ["reasons"]))
    return EXIT_PASS if summ["verdict"] == "pass" else EXIT_FAIL


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "moments": cmd_moments,
    "reference": cmd_reference,
    "discrete": cmd_discrete,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"mindet: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalBudgetError as exc:
        print(f"mindet: numerical budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"mindet: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
