"""
Command-line front end.

    bbdfs symmetrize --hamiltonian hnn:4 --sequence mqe16_qx
    bbdfs analyze    --hamiltonian hnn:6 --sequence mqe8
    bbdfs verify     --sequence collective14 --n 3 --assert
    bbdfs dfs        --collective 4
    bbdfs sweep      --sequence collective6 --n 4 --seeds 5 --csv sweep.csv

Defaults for ``--seed``, ``--bath-dim``, ``--cap-dim`` and ``--tau`` can be
set with the environment variables ``BB_SEED``, ``BB_BATH_DIM``,
``BB_CAP_DIM`` and ``BB_TAU``.  Exit codes: 0 ok, 2 invalid input, 3 dense
dimension cap exceeded, 4 ``--assert`` failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import groups
from .bath import (
    SBHamiltonian,
    build_bilinear_nn,
    build_hnn,
    build_linear,
    hamiltonian_from_json,
    hamiltonian_to_json,
    restrict_mqe_example,
)
from .numeric import (
    DEFAULT_CAP,
    BathModel,
    DimensionCapError,
    block_dfs_basis,
    collective_dfs_basis,
    effective_error,
    fit_slope,
    leakage,
)
from .sequences import (
    CycleClosureError,
    Evolve,
    Sequence,
    average_hamiltonian,
    seq_collective14_block3,
    seq_collective6,
    seq_collective_block8,
    seq_full_elim16,
    seq_linear_elim4,
    seq_mqe16_qx,
    seq_mqe8,
    sequence_from_json,
)

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_ASSERT = 0, 2, 3, 4
SLOPE_WINDOW = (1.8, 2.2)
DEFAULT_SEED = 1234
DEFAULT_TAUS = (1e-1, 10**-1.5, 1e-2, 10**-2.5, 1e-3)
LEAKAGE_FLOOR = 1e-24

HAMILTONIANS = {
    "linear": build_linear,
    "bilinear": build_bilinear_nn,
    "hnn": build_hnn,
    "hnn_periodic": lambda n: build_hnn(n, periodic=True),
    "zz_chain": lambda n: restrict_mqe_example("zz_chain", n),
    "pairwise_isotropic": lambda n: restrict_mqe_example("pairwise_isotropic", n),
}


def _collective14(n: int) -> Sequence:
    if n != 3:
        raise ValueError("collective14 is a 3-qubit scheme")
    return seq_collective14_block3()


# name -> (builder, target Hamiltonian builder)
SEQUENCES = {
    "linear_elim4": (seq_linear_elim4, build_linear),
    "mqe8": (seq_mqe8, build_hnn),
    "mqe16_qx": (seq_mqe16_qx, build_hnn),
    "full_elim16": (seq_full_elim16, build_hnn),
    "collective6": (seq_collective6, build_linear),
    "collective14": (_collective14, build_linear),
    "collective14_block3": (_collective14, build_linear),
    "collective_block8": (seq_collective_block8, build_linear),
}


class AssertionFailed(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    hamiltonian: str | None = None
    sequence: str | None = None
    n: int | None = None
    taus: tuple[float, ...] = DEFAULT_TAUS
    bath_dim: int = 2
    seed: int = DEFAULT_SEED
    seeds: int = 1
    cap_dim: int = DEFAULT_CAP
    out: str | None = None
    csv_path: str | None = None
    check: bool = False
    collective: list[int] = field(default_factory=list)
    n_cycles: int = 1
    jobs: int = 1


# input resolution ----------------------------------------------------------------


def _split_builder(text: str) -> tuple[str, int | None]:
    name, _, arg = text.partition(":")
    if not arg:
        return name, None
    try:
        return name, int(arg)
    except ValueError:
        raise ValueError(f"bad qubit count in {text!r}") from None


def load_hamiltonian(source: str) -> SBHamiltonian:
    if source.endswith(".json") or Path(source).is_file():
        return hamiltonian_from_json(json.loads(Path(source).read_text()))
    name, n = _split_builder(source)
    if name not in HAMILTONIANS:
        raise ValueError(f"unknown Hamiltonian builder {name!r}; choose from {sorted(HAMILTONIANS)}")
    if n is None:
        raise ValueError(f"Hamiltonian builder needs a qubit count, e.g. {name}:4")
    return HAMILTONIANS[name](n)


def load_sequence(source: str, n: int | None) -> Sequence:
    if source.endswith(".json") or Path(source).is_file():
        return sequence_from_json(json.loads(Path(source).read_text()), n)
    name, n_explicit = _split_builder(source)
    if name not in SEQUENCES:
        raise ValueError(f"unknown sequence {name!r}; choose from {sorted(SEQUENCES)}")
    n = n_explicit or n
    if n is None:
        n = 3 if name.startswith("collective14") else None
    if n is None:
        raise ValueError(f"sequence {name} needs a qubit count (--n, {name}:N or a Hamiltonian)")
    return SEQUENCES[name][0](n)


def resolve(cfg: RunConfig) -> tuple[SBHamiltonian | None, Sequence | None]:
    h = load_hamiltonian(cfg.hamiltonian) if cfg.hamiltonian else None
    seq = None
    if cfg.sequence:
        seq = load_sequence(cfg.sequence, h.n_qubits if h is not None else cfg.n)
        if h is None:
            target = SEQUENCES.get(_split_builder(cfg.sequence)[0])
            if target is None:
                raise ValueError("custom sequences need an explicit --hamiltonian")
            h = target[1](seq.n_qubits)
    return h, seq


# reports -------------------------------------------------------------------------


def _sequence_report(seq: Sequence) -> dict:
    return {
        "name": seq.name,
        "notation": seq.notation(),
        "n_pulses": seq.n_pulses,
        "n_segments": seq.n_segments,
        "total_weight": str(seq.total_weight),
    }


def _hamiltonian_summary(h: SBHamiltonian) -> dict:
    return {
        "n_qubits": h.n_qubits,
        "n_terms": len(h),
        "coupling_order": h.coupling_order,
        "interaction_range": h.interaction_range,
    }


def _symmetrized(cfg: RunConfig) -> tuple[SBHamiltonian, Sequence | None, SBHamiltonian]:
    h, seq = resolve(cfg)
    if h is None:
        raise ValueError("need --hamiltonian or --sequence")
    hbar = average_hamiltonian(seq, h) if seq is not None else h
    return h, seq, hbar


def _collective_terms(h: SBHamiltonian) -> list[dict]:
    """Weight-1 survivors sharing an axis and a bath vector, i.e. ``(sum_i sigma_i^a) (x) B``."""
    found: dict[tuple, list[int]] = {}
    for t in h.terms:
        if t.system.weight == 1 and t.system.phase == 0:
            (q,) = t.system.support
            key = (t.system.letter(q), tuple(sorted(t.bath.to_json().items())))
            found.setdefault(key, []).append(q)
    return [
        {"axis": axis, "qubits": sorted(qs), "bath": dict(bath)}
        for (axis, bath), qs in sorted(found.items())
        if len(qs) > 1
    ]


def cmd_symmetrize(cfg: RunConfig) -> dict:
    h, seq, hbar = _symmetrized(cfg)
    if seq is None:
        raise ValueError("symmetrize needs --sequence")
    surviving = {t.system.key() for t in hbar.terms}
    return {
        "command": "symmetrize",
        "hamiltonian": _hamiltonian_summary(h),
        "sequence": _sequence_report(seq),
        "survivors": [t.system.label() for t in hbar.terms],
        "eliminated_terms": sum(t.system.key() not in surviving for t in h.terms),
        "collective_terms": _collective_terms(hbar),
        "average_hamiltonian": hamiltonian_to_json(hbar),
        "exponent_hamiltonian": hamiltonian_to_json(hbar.scale(seq.total_weight)),
    }


def cmd_analyze(cfg: RunConfig) -> dict:
    h, seq, hbar = _symmetrized(cfg)
    report = {"command": "analyze", "group": groups.from_hamiltonian(hbar).report()}
    if seq is not None:
        report["sequence"] = _sequence_report(seq)
    return report


def cmd_dfs(cfg: RunConfig) -> dict:
    report: dict = {"command": "dfs"}
    if cfg.collective:
        out = []
        for n in cfg.collective:
            d = collective_dfs_basis(n)
            out.append({
                "n_qubits": n,
                "dimension": d.dimension,
                "spin_sectors": {str(s): m for s, m in d.sectors.items()},
            })
        report["collective"] = out
    if cfg.hamiltonian or cfg.sequence:
        _, _, hbar = _symmetrized(cfg)
        g = groups.from_hamiltonian(hbar)
        entry = g.report()
        if entry["abelian"]:
            entry["dfs_dimension"] = groups.dfs_dimension(g)
        report["mqe"] = entry
    if len(report) == 1:
        raise ValueError("dfs needs --collective N and/or --hamiltonian/--sequence")
    return report


def _classify(slope: float | None) -> bool:
    return slope is None or SLOPE_WINDOW[0] <= slope <= SLOPE_WINDOW[1]


def cmd_verify(cfg: RunConfig) -> dict:
    h, seq = resolve(cfg)
    if seq is None or h is None:
        raise ValueError("verify needs --sequence")
    bm = BathModel.random(h.labels(), cfg.bath_dim, cfg.seed)
    sweep = effective_error(seq, h, bm, cfg.taus, cfg.cap_dim)
    ok = _classify(sweep.slope)
    report = {
        "command": "verify",
        "sequence": _sequence_report(seq),
        "hamiltonian": _hamiltonian_summary(h),
        "seed": cfg.seed,
        "bath_dim": cfg.bath_dim,
        "slope_window": list(SLOPE_WINDOW),
        "passed": ok,
        **sweep.to_json(),
    }
    if cfg.check and not ok:
        raise AssertionFailed(f"slope {sweep.slope} outside {SLOPE_WINDOW}", report)
    return report


def _leakage_subspace(seq: Sequence):
    n = seq.n_qubits
    if seq.name.startswith("collective14"):
        return collective_dfs_basis(3).sector_basis(0.5)
    if seq.name == "collective6" and n % 4 == 0:
        return block_dfs_basis(n, 4)
    if seq.name == "collective_block8" and n % 8 == 0:
        return block_dfs_basis(n, 8)
    return None


def _sweep_job(args):
    cfg, h, seq, seed = args
    bm = BathModel.random(h.labels(), cfg.bath_dim, seed)
    sweep = effective_error(seq, h, bm, cfg.taus, cfg.cap_dim)
    basis = _leakage_subspace(seq)
    rows, sym, unsym = [], [], []
    free = Sequence("free", seq.n_qubits, [Evolve(seq.total_weight)]) if basis is not None else None
    for tau, err in zip(sweep.taus, sweep.errors):
        ls = lu = None
        if basis is not None:
            ls = leakage(seq, h, bm, tau, cfg.n_cycles, basis, cap=cfg.cap_dim)
            lu = leakage(free, h, bm, tau, cfg.n_cycles, basis, cap=cfg.cap_dim)
            sym.append(ls)
            unsym.append(lu)
        rows.append((tau, err, ls, lu, seed))
    summary = {"seed": seed, "norm_error_slope": sweep.slope, "classification": sweep.classification}
    if basis is not None:
        summary["leakage_sym_slope"] = fit_slope(sweep.taus, sym, LEAKAGE_FLOOR)
        summary["leakage_unsym_slope"] = fit_slope(sweep.taus, unsym, LEAKAGE_FLOOR)
    return rows, summary


def _fmt(v) -> str:
    return "" if v is None else repr(v)


def cmd_sweep(cfg: RunConfig) -> dict:
    h, seq = resolve(cfg)
    if seq is None or h is None:
        raise ValueError("sweep needs --sequence")
    # job i uses seed = base_seed + i
    jobs = [(cfg, h, seq, cfg.seed + i) for i in range(cfg.seeds)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tau", "norm_error", "leakage_sym", "leakage_unsym", "seed"])
    for rows, _ in results:
        for tau, err, ls, lu, seed in rows:
            writer.writerow([_fmt(tau), _fmt(err), _fmt(ls), _fmt(lu), seed])
    csv_path = cfg.csv_path or "sweep.csv"
    Path(csv_path).write_text(buf.getvalue())
    summaries = [s for _, s in results]
    report = {
        "command": "sweep",
        "sequence": _sequence_report(seq),
        "hamiltonian": _hamiltonian_summary(h),
        "bath_dim": cfg.bath_dim,
        "csv": csv_path,
        "replicas": summaries,
        "all_slopes_in_window": all(_classify(s["norm_error_slope"]) for s in summaries),
    }
    if cfg.check and not report["all_slopes_in_window"]:
        raise AssertionFailed("norm-error slope outside window", report)
    return report


COMMANDS = {
    "symmetrize": cmd_symmetrize,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "dfs": cmd_dfs,
    "sweep": cmd_sweep,
}


# argument parsing ----------------------------------------------------------------


def _env(name: str, default):
    return os.environ.get(f"BB_{name}", default)


def _taus(text: str) -> tuple[float, ...]:
    vals = tuple(float(t) for t in text.replace(",", " ").split())
    if any(not math.isfinite(v) or v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("tau values must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbdfs", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    env_taus = _env("TAU", None)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--hamiltonian", help="builder name:N (linear, bilinear, hnn, ...) or JSON path")
        p.add_argument("--sequence", help="built-in name[:N] or JSON path")
        p.add_argument("--n", type=int, help="qubit count when no Hamiltonian is given")
        p.add_argument("--tau", type=_taus,
                       default=_taus(env_taus) if env_taus else DEFAULT_TAUS,
                       help="descending tau values, comma separated")
        p.add_argument("--bath-dim", type=int, default=int(_env("BATH_DIM", 2)))
        p.add_argument("--seed", type=int, default=int(_env("SEED", DEFAULT_SEED)))
        p.add_argument("--cap-dim", type=int, default=int(_env("CAP_DIM", DEFAULT_CAP)))
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--assert", dest="check", action="store_true",
                       help="exit 4 when the verification criterion fails")
        if name == "dfs":
            p.add_argument("--collective", type=int, action="append", default=[],
                           help="qubit count for the collective DFS (repeatable)")
        if name == "sweep":
            p.add_argument("--seeds", type=int, default=1, help="number of bath replicas")
            p.add_argument("--csv", dest="csv_path", help="CSV output path (default sweep.csv)")
            p.add_argument("--cycles", dest="n_cycles", type=int, default=1)
            p.add_argument("--jobs", type=int, default=1)
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        hamiltonian=ns.hamiltonian,
        sequence=ns.sequence,
        n=ns.n,
        taus=tuple(ns.tau),
        bath_dim=ns.bath_dim,
        seed=ns.seed,
        seeds=getattr(ns, "seeds", 1),
        cap_dim=ns.cap_dim,
        out=ns.out,
        csv_path=getattr(ns, "csv_path", None),
        check=ns.check,
        collective=getattr(ns, "collective", []),
        n_cycles=getattr(ns, "n_cycles", 1),
        jobs=getattr(ns, "jobs", 1),
    )


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _error(code: str, message: str, extra: dict | None = None) -> dict:
    err = {"code": code, "message": message}
    if extra:
        err["report"] = extra
    return {"error": err}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns ``(exit_code, report)`` and never raises on bad input."""
    try:
        return EXIT_OK, COMMANDS[cfg.command](cfg)
    except CycleClosureError as exc:
        return EXIT_INVALID, _error("cycle_closure", str(exc))
    except DimensionCapError as exc:
        return EXIT_CAP, _error("numeric_cap", str(exc))
    except AssertionFailed as exc:
        return EXIT_ASSERT, _error("assertion", exc.args[0], exc.args[1])
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        return EXIT_INVALID, _error("validation", str(exc))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    code, report = run(_config(ns))
    if code in (EXIT_OK, EXIT_ASSERT):
        _emit(report, ns.out)
    else:
        _emit(report, None)
    return code


if __name__ == "__main__":
    sys.exit(main())
