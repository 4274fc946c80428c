"""Batch front end: reproducible experiments over descriptors and sequences.

Subcommands: classify, spectrum, growth, verify, report.  Config is JSON;
curve outputs are CSV and scalar outputs JSON, with sorted keys and repr
floats so identical configs produce byte-identical files.  Exit codes:
0 ok, 1 check failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, growth, hamburger, spectrum
from ._kernels import BACKEND
from .classify import Regime, berezanskii_test, carleman_test, classify, wouk_test
from .params import (
    JacobiSequence,
    PowerAsymptotics,
    descriptor_from_json,
    descriptor_to_json,
    exceptional_parameters,
    materialize,
    sequence_from_csv,
)
from .recurrence import norm_exponent, solve_at_zero, wronskian_residual
from .verify import run_all_checks, write_junit

_GUARD_NOTE = (
    "index-0 values are evaluated at m = max(n, 1); the asymptotic family "
    "does not constrain rho_0, q_0"
)
_BOUNDARY_NOTE = (
    "case boundaries use exact rational comparisons; equality of derived "
    "quantities is granted within 1e-12 relative and flagged as near-boundary"
)


@dataclasses.dataclass
class ExperimentConfig:
    descriptor: Optional[PowerAsymptotics]
    sequence_file: Optional[str]
    Ns: list
    r_min: float
    r_max: float
    r_points: int
    window: Optional[tuple]
    rays: int
    scan_points: int
    eig_tol: Optional[float]
    out: Optional[str]
    raw_bytes: bytes

    def r_grid(self) -> np.ndarray:
        return np.geomspace(self.r_min, self.r_max, self.r_points)

    def sequence(self, N: Optional[int] = None) -> JacobiSequence:
        N = N or max(self.Ns)
        if self.descriptor is not None:
            return materialize(self.descriptor, N)
        seq = sequence_from_csv(self.sequence_file)
        if len(seq) < N:
            raise ValueError(
                f"sequence file has {len(seq)} rows but N = {N} was requested"
            )
        return seq


def _git_blob_sha1(content: bytes) -> str:
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(content))
    h.update(content)
    return h.hexdigest()


def load_config(path: str, seed: Optional[int] = None) -> ExperimentConfig:
    raw = Path(path).read_bytes()
    obj = json.loads(raw)
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    if ("descriptor" in obj) == ("sequence_file" in obj):
        raise ValueError("config needs exactly one of 'descriptor', 'sequence_file'")
    descriptor = None
    if "descriptor" in obj:
        descriptor = descriptor_from_json(obj["descriptor"])
        if seed is not None:
            remainder = dataclasses.replace(descriptor.remainder, seed=seed)
            descriptor = dataclasses.replace(descriptor, remainder=remainder)
    Ns = [int(n) for n in obj.get("N", [500, 1000, 2000])]
    if len(Ns) < 1 or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("N values must be strictly increasing")
    rg = obj.get("r_grid", {})
    r_min = float(rg.get("r_min", 10.0))
    r_max = float(rg.get("r_max", 1e4))
    r_points = int(rg.get("points", 20))
    if not (0 < r_min < r_max) or r_points < 8:
        raise ValueError("need 0 < r_min < r_max and at least 8 grid points")
    window = obj.get("window")
    if window is not None:
        window = (int(window[0]), int(window[1]))
    tol = obj.get("tolerances", {})
    return ExperimentConfig(
        descriptor=descriptor,
        sequence_file=obj.get("sequence_file"),
        Ns=Ns,
        r_min=r_min,
        r_max=r_max,
        r_points=r_points,
        window=window,
        rays=int(obj.get("rays", 16)),
        scan_points=int(obj.get("scan_points", 8192)),
        eig_tol=tol.get("eig_tol"),
        out=obj.get("out"),
        raw_bytes=raw,
    )


def _report_envelope(cfg: ExperimentConfig) -> dict:
    env = {
        "tool": {"name": "jacobispec", "version": __version__, "backend": BACKEND},
        "inputs": {"config_sha1": _git_blob_sha1(cfg.raw_bytes)},
        "notes": [_GUARD_NOTE, _BOUNDARY_NOTE],
    }
    if cfg.descriptor is not None:
        env["descriptor"] = descriptor_to_json(cfg.descriptor)
    else:
        env["sequence_file"] = cfg.sequence_file
        env["inputs"]["sequence_sha1"] = _git_blob_sha1(
            Path(cfg.sequence_file).read_bytes()
        )
    return env


def _write_json(obj: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_counting_csv(path: Path, rs, counts) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "count"])
        for r, c in zip(rs, counts):
            w.writerow([repr(float(r)), c])


def _exponent_str(exp) -> str:
    if exp is None:
        return "n/a"
    if isinstance(exp, tuple):
        return f"[{exp[0]:.6g}, {exp[1]:.6g}]"
    return f"{exp:.6g}"


def cmd_classify(cfg: ExperimentConfig, out: Path, jobs: int) -> int:
    report = _report_envelope(cfg)
    seq = cfg.sequence(max(cfg.Ns))
    criteria = [wouk_test(seq), carleman_test(seq), berezanskii_test(seq)]
    report["criteria"] = [c.to_json() for c in criteria]
    if cfg.descriptor is not None:
        cls = classify(cfg.descriptor)
        report["classification"] = cls.to_json()
        if cls.regime is Regime.UNDETERMINED:
            print(f"Undetermined: {cls.notes[0]}")
        else:
            print(
                f"{cls.case_label}: {cls.regime.value}, exponent "
                f"{_exponent_str(cls.predicted_exponent)}"
            )
            if cls.density_lower is not None:
                upper = (
                    f"{cls.density_upper:.6g}"
                    if cls.density_upper is not None
                    else "n/a"
                )
                print(f"  upper-density bounds: [{cls.density_lower:.6g}, {upper}]")
    else:
        print("external sequence: criterion verdicts only (no family labels)")
    for c in criteria:
        print(f"  {c.name}: {c.conclusion.value} ({c.evidence})")
    _write_json(report, out / "classification.json")
    return 0


def cmd_spectrum(cfg: ExperimentConfig, out: Path, jobs: int) -> int:
    report = _report_envelope(cfg)
    seq = cfg.sequence(max(cfg.Ns))
    rs = cfg.r_grid()

    def solve_one(N):
        ev = spectrum.eigenvalues_in(
            seq, N, (-cfg.r_max, cfg.r_max), tol=cfg.eig_tol
        )
        return N, ev

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        solved = dict(pool.map(solve_one, cfg.Ns))
    per_n = {}
    for N in cfg.Ns:
        ev = solved[N]
        spec = spectrum.TruncatedSpectrum(
            N=N, eigenvalues=ev, tol=cfg.eig_tol or 1e-10 * cfg.r_max
        )
        spec.to_csv(out / f"eigenvalues_N{N}.csv")
        counts = [spectrum.counting_function(spec, r) for r in rs]
        _write_counting_csv(out / f"counting_N{N}.csv", rs, counts)
        per_n[str(N)] = {"count_in_window": int(ev.size), "counts": counts}
    stabilization = []
    for r in rs:
        counts, stable = spectrum.stabilized_counting(seq, float(r), cfg.Ns)
        stabilization.append({"r": float(r), "counts": counts, "stabilized": stable})
    report["window"] = [-cfg.r_max, cfg.r_max]
    report["per_N"] = per_n
    report["stabilization"] = stabilization
    _write_json(report, out / "spectrum_report.json")
    stable_count = sum(s["stabilized"] for s in stabilization)
    print(
        f"spectrum: {len(cfg.Ns)} truncations, counts stabilized at "
        f"{stable_count}/{len(rs)} radii"
    )
    return 0


def cmd_growth(cfg: ExperimentConfig, out: Path, jobs: int) -> int:
    report = _report_envelope(cfg)
    N = max(cfg.Ns)
    seq = cfg.sequence(N)
    sol = solve_at_zero(seq)
    report["wronskian_residual"] = wronskian_residual(sol, seq)
    window = cfg.window or (max(2, N // 50), N)
    decay = norm_exponent(sol, window)
    report["decay_fit"] = decay.to_json()

    # route 1: power-series coefficients
    logc = growth.leading_coefficient_logs(seq)
    coeff_route = {}
    try:
        order_c, type_c = growth.order_type_from_coefficients(logc)
        coeff_route = {"order": order_c, "type_at_order": type_c}
    except ValueError as exc:
        coeff_route = {"error": str(exc)}
    report["coefficient_route"] = coeff_route

    # route 2: max modulus on rays
    rs = cfg.r_grid()
    evaluator = growth.b_log_max_modulus(sol, N, rays=cfg.rays)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        logM = list(pool.map(evaluator, rs))
    _write_counting_csv(out / "log_max_modulus.csv", rs, logM)
    order_m, type_m = growth.order_type_from_max_modulus(
        lambda r, _c=dict(zip(rs.tolist(), logM)): _c[float(r)], rs
    )
    report["max_modulus_route"] = {"order": order_m, "type_at_order": type_m}

    # route 3: zeros of B
    zeros = growth.scan_b_zeros(sol, N, cfg.r_max, grid=cfg.scan_points)
    np.savetxt(out / "b_zeros.csv", zeros, header="zero", comments="", fmt="%.17g")
    mods = np.sort(np.abs(zeros))
    zero_route = {"count": int(zeros.size)}
    exponent_fit = None
    if mods.size >= 32:
        exponent_fit = growth.convergence_exponent_from_zeros(mods)
        zero_route["convergence_exponent"] = exponent_fit.slope
        zero_route["stderr"] = exponent_fit.stderr
    report["zero_route"] = zero_route

    predicted = None
    if cfg.descriptor is not None:
        cls = classify(cfg.descriptor)
        report["classification"] = cls.to_json()
        predicted = cls
        beta1 = cfg.descriptor.beta1
        if beta1 > 1 and mods.size >= 32:
            zero_route["upper_density"] = growth.upper_density(mods, beta1)
        if cls.case_label == "T1(ii)" and cls.regime is Regime.LCC:
            gaps = growth.majorant_bound_gap(
                sol, seq, 1j * np.geomspace(cfg.r_min, cfg.r_max, 8), N
            )
            report["majorant_gap"] = {
                "max": float(np.max(gaps)),
                "values": [float(g) for g in gaps],
            }
    exc = cfg.descriptor is not None and exceptional_parameters(cfg.descriptor)[0]
    if exc:
        data = hamburger.lengths_angles(sol, seq)
        deltas = hamburger.delta_exponents(
            data, (max(1, window[0]), min(window[1], N - 1))
        )
        report["delta_exponents"] = deltas.to_json()

    estimate = growth.GrowthEstimate(
        order=order_m,
        type_at_order=type_m,
        convergence_exponent=(
            exponent_fit.slope if exponent_fit is not None else float("nan")
        ),
        upper_density=zero_route.get("upper_density", float("nan")),
        diagnostics={
            "coefficient_route": coeff_route,
            "decay_fit": decay.to_json(),
            "zero_fit": exponent_fit.to_json() if exponent_fit else None,
        },
    )
    report["growth_estimate"] = estimate.to_json()
    _write_json(report, out / "growth_report.json")
    print(f"growth: coefficient route {coeff_route}")
    print(
        f"        max-modulus route order {order_m:.4f}, type {type_m:.4f}; "
        f"{zeros.size} zeros found"
    )
    if predicted is not None and predicted.predicted_exponent is not None:
        print(
            f"        predicted exponent {_exponent_str(predicted.predicted_exponent)}"
        )
    return 0


def cmd_verify(cfg: Optional[ExperimentConfig], out: Path, jobs: int) -> int:
    results = run_all_checks()
    for r in results:
        print(r.line())
    out.mkdir(parents=True, exist_ok=True)
    write_junit(results, out / "verify.xml")
    failed = [r for r in results if not r.passed]
    print(
        f"{len(results) - len(failed)}/{len(results)} checks passed; "
        f"JUnit report at {out / 'verify.xml'}"
    )
    return 1 if failed else 0


def cmd_report(cfg: ExperimentConfig, out: Path, jobs: int) -> int:
    rc = cmd_classify(cfg, out, jobs)
    rc = max(rc, cmd_spectrum(cfg, out, jobs))
    rc = max(rc, cmd_growth(cfg, out, jobs))
    combined = {}
    for name in ("classification", "spectrum_report", "growth_report"):
        path = out / f"{name}.json"
        if path.exists():
            combined[name] = json.loads(path.read_text())
    _write_json(combined, out / "report.json")
    print(f"combined report at {out / 'report.json'}")
    return rc


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="jacobispec",
        description="classify Jacobi matrices with power-asymptotic parameters "
        "and verify the predicted spectral density at desk scale",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("classify", "family classification plus classical criterion verdicts"),
        ("spectrum", "truncation eigenvalues and counting curves"),
        ("growth", "order/type/exponent/density estimates from three routes"),
        ("verify", "run the full verification suite (JUnit XML output)"),
        ("report", "classify + spectrum + growth in one combined report"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=name != "verify", help="JSON config path")
        p.add_argument("--out", help="output directory (default: config 'out' or '.')")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        p.add_argument("--seed", type=int, help="override the remainder seed")
    args = parser.parse_args(argv)

    cfg = None
    if args.config:
        try:
            cfg = load_config(args.config, seed=args.seed)
        except json.JSONDecodeError as exc:
            print(f"error: malformed config JSON: {exc}", file=sys.stderr)
            return 2
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    out = Path(args.out or (cfg.out if cfg and cfg.out else "."))
    out.mkdir(parents=True, exist_ok=True)

    commands = {
        "classify": cmd_classify,
        "spectrum": cmd_spectrum,
        "growth": cmd_growth,
        "verify": cmd_verify,
        "report": cmd_report,
    }
    try:
        return commands[args.command](cfg, out, args.jobs)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
