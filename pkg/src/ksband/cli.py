"""Command line entry point: ``ksband <subcommand> [--config PATH] [--out DIR] ...``.

Every subcommand writes only inside its output directory and finishes by
atomically placing ``manifest.json`` there; a directory without a manifest
is an interrupted run.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bessel import bessel_i_eval
from .config import RunConfig, config_hash, load_config, serialize_config
from .diagnostics import (SWEEP_COLUMNS, analyze_window, band_from_tail, default_tail_range, dump_json,
                          gamma_sweep, write_table_csv)
from .errors import BlowUpError, ConfigError, FormatError, KsbandError
from .field import Grid, SpectralField, read_checkpoint, write_coeff_csv
from .integrator import integrate
from .lemmas import (ITEM1_BOUND, _GramSums, item1_integral_numeric, l1_sup_inequality_check, lemma1_oracle,
                     lemma2_partial_sum, lemma2_uniformity_scan, proof_chain)
from .symbols import certify_dissipation, fit_dissipation_order, write_symbol_csv

log = logging.getLogger("ksband")

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 2, 3, 4


@dataclass
class RunManifest:
    subcommand: str
    run_id: str
    config_hash: str
    version: str
    started: float
    config: str = ""
    finished: float = math.nan
    outcome: str = "error"
    files: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out: Path, manifest: RunManifest) -> Path:
    """Checksum every file under ``out`` and write the manifest via rename."""
    manifest.finished = time.time()
    inventory = {}
    for p in sorted(out.rglob("*")):
        if p.is_file() and p.name not in ("manifest.json", "manifest.json.tmp"):
            inventory[p.relative_to(out).as_posix()] = sha256_file(p)
    manifest.files = inventory
    tmp = out / "manifest.json.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    final = out / "manifest.json"
    os.replace(tmp, final)
    return final


# -- subcommands -----------------------------------------------------------------
# Each returns (outcome, extra manifest fields, exit code).


def cmd_simulate(cfg: RunConfig, out: Path, args, meta: dict):
    formats = set(cfg.output.formats)
    try:
        series, state, _ = integrate(cfg, out)
    except BlowUpError as exc:
        log.warning("%s", exc)
        if exc.partial is not None and "csv" in formats:
            exc.partial.write_csv(out / "series.csv")
        return "blow_up", {"t": exc.t, "mode": list(exc.mode), "amplitude": exc.amplitude}, EXIT_BLOWUP
    if cfg.integrator.T == 0:
        return "completed", {"t": 0.0, "step_count": 0}, EXIT_OK
    if "csv" in formats:
        series.write_csv(out / "series.csv")
        write_coeff_csv(out / "final_coeffs.csv", state.u)
    if "json" in formats and series.snapshots:
        dg = cfg.diagnostics
        rep = analyze_window(series.snapshots, dg.weight, dg.s_max, dg.s_count, dg.fit_s_min, dg.fit_s_max,
                             dg.k_min, (series.window_start, series.T), provenance=meta)
        d = rep.as_dict()
        d["window_sup_norm_l2"] = series.window_sup("norm_l2")
        dump_json(out / "report.json", d)
        log.info("beta_tail=%.6g beta_lemma1=%.6g (index units, q=%.6g)", rep.beta_tail, rep.beta_lemma1, rep.q)
    return "completed", {"t": state.t, "step_count": state.step_count}, EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path, args, meta: dict):
    rows = gamma_sweep(cfg, cfg.sweep.gammas, args.workers, out)
    write_table_csv(out / "sweep.csv", rows, SWEEP_COLUMNS)
    dump_json(out / "sweep.json", {"provenance": meta, "rows": rows})
    for r in rows:
        log.info("gamma=%g beta_tail=%.6g blow_up=%s", r["gamma"], r["beta_tail"], r["blow_up"])
    return "completed", {"n_runs": len(rows), "n_blow_up": sum(r["blow_up"] for r in rows)}, EXIT_OK


def cmd_verify_lemmas(cfg: RunConfig, out: Path, args, meta: dict):
    K, M = args.k_max, args.cutoff
    gram = _GramSums(K, M)
    scans = [lemma2_uniformity_scan(i, K, M, gram) for i in (1, 2, 3, 4)]
    examples = [lemma2_partial_sum(3, 1, 1, 1), lemma2_partial_sum(1, 2, 0, M), lemma2_partial_sum(2, 10, 10, M)]
    chains = {str(i): proof_chain(i, 10, 10, min(M, 2000)) for i in (1, 2, 3, 4)}
    oracles = [lemma1_oracle(a) for a in (0.2, 0.5, 1.0, 5.0, 20.0)]
    rng = np.random.default_rng(cfg.integrator.seed)
    ineq = []
    for d, lam in ((1, 1.5), (2, 2.5)):
        g = Grid(d, 16)
        c = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        f = SpectralField(g, c).symmetrized()
        for n in (0, 1, 2):
            lhs, rhs, ok = l1_sup_inequality_check(f, n, lam)
            ineq.append({"d": d, "n": n, "lambda": lam, "lhs": lhs, "rhs": rhs, "holds": ok})
    integral = item1_integral_numeric()
    report = {
        "provenance": meta,
        "item1_integral": {"numeric": integral, "closed_form": 4 * math.pi, "bound": ITEM1_BOUND},
        "uniformity": [s.as_dict() for s in scans],
        "examples": [e.as_dict() for e in examples],
        "proof_chains": chains,
        "lemma1_oracle": [o.as_dict() for o in oracles],
        "l1_sup_inequality": ineq,
    }
    ok = (all(s.within_bound for s in scans) and all(o.passed for o in oracles)
          and all(r["holds"] for r in ineq) and abs(integral - 4 * math.pi) < 1e-8)
    report["all_passed"] = ok
    dump_json(out / "lemmas.json", report)
    write_table_csv(out / "uniformity.csv", [s.as_dict() for s in scans],
                    ["item", "K_max", "cutoff", "sup", "sup_with_tail", "bound", "within_bound"])
    write_table_csv(out / "lemma1_oracle.csv", [o.as_dict() for o in oracles],
                    ["a", "M", "n", "beta_expected", "beta_tail", "hypothesis_holds", "passed"])
    log.info("lemma checks %s", "passed" if ok else "FAILED")
    return "completed", {"all_passed": ok}, EXIT_OK


def cmd_certify(cfg: RunConfig, out: Path, args, meta: dict):
    spec = cfg.make_symbol()
    K = args.K
    fitted = None
    if args.gamma is None or args.c1 is None or args.mu is None:
        gamma, c1, mu = fit_dissipation_order(spec, K, cfg.grid.d)
        fitted = {"gamma": gamma, "c1": c1, "mu": mu}
    gamma = args.gamma if args.gamma is not None else fitted["gamma"]
    c1 = args.c1 if args.c1 is not None else fitted["c1"]
    mu = args.mu if args.mu is not None else fitted["mu"]
    cert = certify_dissipation(spec, c1, gamma, mu, K, cfg.grid.d)
    dump_json(out / "certificate.json", {"provenance": meta, "fitted": fitted, "certificate": cert.as_dict()})
    if "csv" in cfg.output.formats:
        write_symbol_csv(out / "symbol.csv", spec, cfg.make_grid())
    log.info("certificate verified=%s (gamma=%.6g c1=%.6g mu=%.6g)", cert.verified, gamma, c1, mu)
    return "completed", {"verified": cert.verified}, EXIT_OK


def cmd_bessel(cfg: RunConfig, out: Path, args, meta: dict):
    xs = [float(x) for x in args.x.split(",")]
    rows = []
    for x in xs:
        for n in range(args.n_max + 1):
            e = bessel_i_eval(n, x)
            rows.append({"n": n, "x": x, "value": e.value, "method": e.method})
    write_table_csv(out / "bessel.csv", rows, ["n", "x", "value", "method"])
    return "completed", {"rows": len(rows)}, EXIT_OK


def cmd_estimate_band(cfg: RunConfig, out: Path, args, meta: dict):
    f = read_checkpoint(args.checkpoint)
    lo, hi = (args.k_min, f.grid.kmax) if args.k_min else default_tail_range(f)
    est = band_from_tail(f, lo, hi)
    dg = cfg.diagnostics
    rep = analyze_window(f, dg.weight, dg.s_max, dg.s_count, dg.fit_s_min, dg.fit_s_max, args.k_min or dg.k_min,
                         provenance=meta)
    d = rep.as_dict()
    d["checkpoint"] = str(args.checkpoint)
    d["checkpoint_sha256"] = sha256_file(args.checkpoint)
    d["beta_tail"] = est.beta_index
    d["beta_tail_physical"] = est.beta_physical
    dump_json(out / "band.json", d)
    log.info("beta_tail=%.6g (index units)", est.beta_index)
    return "completed", {"beta_tail": est.beta_index}, EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep-gamma": cmd_sweep,
    "verify-lemmas": cmd_verify_lemmas,
    "certify-symbol": cmd_certify,
    "bessel-table": cmd_bessel,
    "estimate-band": cmd_estimate_band,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration (defaults apply when omitted)")
    common.add_argument("--out", type=Path, help="output directory (overrides output.directory)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--seed", type=int, help="override integrator.seed")
    common.add_argument("--quiet", action="store_true", help="only print warnings and errors")

    p = argparse.ArgumentParser(prog="ksband", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate one trajectory")
    sub.add_parser("sweep-gamma", parents=[common], help="GeneralizedGamma runs over sweep.gammas")
    s = sub.add_parser("verify-lemmas", parents=[common], help="series bounds and extension criterion checks")
    s.add_argument("--k-max", type=int, default=100)
    s.add_argument("--cutoff", type=int, default=10_000)
    s = sub.add_parser("certify-symbol", parents=[common], help="check Re lambda_k >= c1|k|^gamma - mu")
    s.add_argument("--K", type=int, default=64)
    s.add_argument("--c1", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--mu", type=float)
    s = sub.add_parser("bessel-table", parents=[common], help="tabulate I_n(x)")
    s.add_argument("--n-max", type=int, default=10)
    s.add_argument("--x", default="0.5,1,5,20,100")
    s = sub.add_parser("estimate-band", parents=[common], help="band estimate for a checkpoint file")
    s.add_argument("checkpoint", type=Path)
    s.add_argument("--k-min", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg = cfg.replace(integrator={"seed": args.seed})
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", ["--workers must be >= 1"])
    except ConfigError as exc:
        for prob in exc.problems or [str(exc)]:
            print(f"config error: {prob}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    out = args.out if args.out is not None else Path(cfg.output.directory)
    chash = config_hash(cfg)
    manifest = RunManifest(args.command, uuid.uuid4().hex, chash, __version__, time.time(), serialize_config(cfg))
    meta = {"config_hash": chash, "run_id": manifest.run_id, "version": __version__}
    try:
        out.mkdir(parents=True, exist_ok=True)
        outcome, extra, code = COMMANDS[args.command](cfg, out, args, meta)
    except ConfigError as exc:
        for prob in exc.problems or [str(exc)]:
            print(f"config error: {prob}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, FormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        code, outcome, extra = EXIT_IO, "error", {"error": str(exc)}
    except KsbandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code, outcome, extra = EXIT_CONFIG, "error", {"error": str(exc)}
    manifest.outcome, manifest.extra = outcome, extra
    try:
        write_manifest(out, manifest)
    except OSError as exc:
        print(f"I/O error writing manifest: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
