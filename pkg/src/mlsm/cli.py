"""Command-line entry point ``mlsm``.

Exit codes: 0 when the answer is positive (holds / found), 1 when it is
negative, 2 for usage or data errors.  Results go to stdout, one per
line; diagnostics and ``--verbose`` prose go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .check import analyze
from .core import (
    RANDOM_MODES,
    Concept,
    Matching,
    MatchingError,
    MultiLayerProfile,
    ParseError,
    ProfileError,
    format_matching,
    format_profile,
    parse_matching,
    parse_profile,
    random_profile,
)
from .fixtures import fixture_names, load_fixture
from .solve import METHODS, CapExceeded, PreconditionError, enumerate_stable, solve

CSV_COLUMNS = (
    "concept", "alpha", "n", "layers", "mode", "samples", "seed",
    "existence_count", "existence_rate", "mean_runtime_s",
)


class UsageError(Exception):
    pass


# -- experiment harness -------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    layers: int
    alpha: int
    concept: str
    mode: str = "general"
    samples: int = 1000
    seed: int = 0
    method: str = "auto"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.n < 1 or self.layers < 1:
            raise ValueError("n and layers must be >= 1")
        if not 1 <= self.alpha <= self.layers:
            raise ValueError(f"alpha must lie in 1..{self.layers}")
        if self.mode not in RANDOM_MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(RANDOM_MODES)}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        Concept.parse(self.concept)


@dataclass(frozen=True)
class ExperimentRow:
    config: ExperimentConfig
    existence_count: int
    mean_runtime_s: Optional[float] = None

    @property
    def existence_rate(self) -> float:
        return self.existence_count / self.config.samples

    def as_dict(self) -> dict:
        c = self.config
        return {
            "concept": Concept.parse(c.concept).value,
            "alpha": c.alpha,
            "n": c.n,
            "layers": c.layers,
            "mode": c.mode,
            "samples": c.samples,
            "seed": c.seed,
            "existence_count": self.existence_count,
            "existence_rate": f"{self.existence_rate:.6f}",
            "mean_runtime_s": "" if self.mean_runtime_s is None else f"{self.mean_runtime_s:.6g}",
        }


def sample_seed(master: int, index: int) -> int:
    """Sub-seed for one sample; depends only on (master, index)."""
    return int(np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1, dtype=np.uint64)[0])


def _run_samples(args: Tuple[dict, int, int]) -> Tuple[int, float]:
    cfg_dict, start, stop = args
    cfg = ExperimentConfig(**cfg_dict)
    concept = Concept.parse(cfg.concept)
    found, elapsed = 0, 0.0
    for k in range(start, stop):
        profile = random_profile(cfg.n, cfg.layers, cfg.mode, sample_seed(cfg.seed, k))
        t0 = time.perf_counter()
        rep = solve(profile, concept, cfg.alpha, method=cfg.method)
        elapsed += time.perf_counter() - t0
        found += rep.found
    return found, elapsed


def run_experiment(config: ExperimentConfig, workers: int = 1, timing: bool = False) -> List[ExperimentRow]:
    """Existence count of stable matchings over random profiles.

    The count is independent of ``workers``.  Runtime is only reported
    with ``timing``, since wall-clock figures would break byte-identical
    output across runs.
    """
    workers = max(1, workers)
    chunks = max(1, min(workers * 4, config.samples))
    bounds = [config.samples * i // chunks for i in range(chunks + 1)]
    jobs = [(asdict(config), bounds[i], bounds[i + 1]) for i in range(chunks)]
    if workers == 1:
        parts = [_run_samples(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_samples, jobs))
    found = sum(p[0] for p in parts)
    elapsed = sum(p[1] for p in parts)
    return [ExperimentRow(config, found, elapsed / config.samples if timing else None)]


def rows_to_csv(rows: Sequence[ExperimentRow], header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    if header:
        w.writeheader()
    for r in rows:
        w.writerow(r.as_dict())
    return buf.getvalue()


# -- input helpers ----------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{path}: no such file or fixture")
    return p.read_text(encoding="utf-8")


def load_profile_arg(arg: str) -> Tuple[MultiLayerProfile, dict]:
    """A fixture name or a profile file; returns the profile and any named
    matchings that come with it."""
    if arg in fixture_names():
        fx = load_fixture(arg)
        return fx.profile, dict(fx.matchings)
    try:
        return parse_profile(_read(arg)), {}
    except (ParseError, ProfileError) as exc:
        raise type(exc)(f"{arg}: {exc}") from None


def load_matching_arg(arg: str, profile: MultiLayerProfile, named: dict) -> Matching:
    if arg in named:
        return named[arg]
    if Path(arg).is_file() or arg == "-":
        try:
            return parse_matching(_read(arg), profile.n)
        except ParseError as exc:
            raise ParseError(f"{arg}: {exc}") from None
    try:
        vec = [int(t) for t in arg.replace(",", " ").split()]
    except ValueError:
        known = ", ".join(sorted(named)) or "none"
        raise UsageError(f"{arg!r} is neither a matching name (known: {known}), a file, nor a vector like 2,1,3") from None
    m = Matching.from_vector(vec)
    if m.n != profile.n:
        raise UsageError(f"matching covers {m.n} agents, profile has {profile.n}")
    return m


def _emit_profile(profile: MultiLayerProfile, alpha: Optional[int] = None) -> None:
    if alpha is not None:
        sys.stdout.write(f"# alpha {alpha}\n")
    sys.stdout.write(format_profile(profile))


# -- commands ---------------------------------------------------------------------


def _verbose(args, msg: str) -> None:
    if args.verbose:
        print(msg, file=sys.stderr)


def cmd_check(args) -> int:
    profile, named = load_profile_arg(args.profile)
    m = load_matching_arg(args.matching, profile, named)
    v = analyze(profile, m).verdict(Concept.parse(args.concept), args.alpha)
    print("holds" if v.holds else "fails")
    if v.witness is not None:
        u, w = v.witness.pair
        _verbose(args, f"witness pair u{u} w{w}, layers {sorted(v.witness.layers)}"
                 + (f", w-side layers {sorted(v.witness.w_layers)}" if v.witness.w_layers is not None else ""))
    if v.certificate is not None:
        _verbose(args, f"stable in layers {sorted(v.certificate)}")
    return 0 if v.holds else 1


def cmd_solve(args) -> int:
    profile, _ = load_profile_arg(args.profile)
    rep = solve(profile, Concept.parse(args.concept), args.alpha, method=args.method)
    _verbose(args, f"method {rep.method}, work {rep.work}")
    if rep.result is None:
        print("none")
        return 1
    sys.stdout.write(format_matching(rep.result))
    return 0


def cmd_enumerate(args) -> int:
    profile, _ = load_profile_arg(args.profile)
    found = enumerate_stable(profile, Concept.parse(args.concept), args.alpha, limit=args.limit)
    for m in found:
        sys.stdout.write(format_matching(m))
    _verbose(args, f"{len(found)} matching(s)")
    return 0 if found else 1


def cmd_reduce(args) -> int:
    from . import reduce as R

    kind = args.kind
    if kind == "sat2global":
        cnf = R.parse_dimacs(_read(args.inputs[0]))
        if not R.is_restricted(cnf):
            if not args.restrict:
                raise UsageError("formula is not in restricted form; pass --restrict to convert it")
            cnf = R.restrict_3sat(cnf)
        alpha = args.alpha or 2
        profile, _ = R.sat_to_global(cnf, alpha, args.layers or alpha)
        _emit_profile(profile, alpha)
    elif kind in ("smti2individual", "smti2pair"):
        inst = R.parse_smti(_read(args.inputs[0]))
        if kind == "smti2individual":
            layers = args.layers or 4
            alpha = args.alpha or 2
            profile, _ = R.smti_to_individual(inst, layers, alpha)
        else:
            layers = args.layers or 5
            alpha = layers // 2 + 1
            if args.alpha not in (None, alpha):
                raise UsageError(f"smti2pair fixes alpha = layers // 2 + 1 = {alpha}")
            profile, _ = R.smti_to_pair_odd(inst, layers)
        _emit_profile(profile, alpha)
    elif kind == "is2global":
        if args.k is None:
            raise UsageError("is2global needs --k")
        profile, _, alpha = R.independent_set_to_global(R.parse_graph(_read(args.inputs[0])), args.k)
        _emit_profile(profile, alpha)
    elif kind == "gi2individual":
        if len(args.inputs) != 2:
            raise UsageError("gi2individual needs two graph files")
        g, h = (R.parse_graph(_read(p)) for p in args.inputs)
        profile, alpha = R.gi_to_uniform(g, h)
        _emit_profile(profile, alpha)
    else:
        raise UsageError(f"unknown reduction {kind!r}")
    if kind != "gi2individual" and len(args.inputs) != 1:
        raise UsageError(f"{kind} takes one input file")
    return 0


def cmd_gen(args) -> int:
    from . import reduce as R

    ds = [d for p in args.inputs for d in R.parse_digraphs(_read(p))]
    if len(ds) != 2:
        raise UsageError(f"gen mcgarvey needs exactly two digraphs, got {len(ds)}")
    profile, alpha = R.mcgarvey(ds[0], ds[1])
    _emit_profile(profile, alpha)
    return 0


def cmd_induce(args) -> int:
    from . import reduce as R

    profile, _ = load_profile_arg(args.profile)
    g, h = R.induce_digraphs(profile, args.alpha)
    sys.stdout.write(R.format_digraph(g))
    sys.stdout.write(R.format_digraph(h))
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(args.n, args.layers, args.alpha, args.concept, args.mode, args.samples, args.seed, args.method)
    rows = run_experiment(cfg, workers=args.workers, timing=args.timing)
    text = rows_to_csv(rows)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    _verbose(args, f"existence rate {rows[0].existence_rate:.4f} over {cfg.samples} samples")
    return 0 if rows[0].existence_count else 1


# -- parser -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mlsm", description="Multi-layer stable marriage: check, solve, enumerate and reduce.")
    p.add_argument("--verbose", action="store_true", help="human-readable details on stderr")
    p.add_argument("--brute-cap", type=int, metavar="N", help="raise the enumeration cap (agents per side); costs n! in the worst case")
    # --verbose is accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    def stability(sp):
        sp.add_argument("--concept", required=True, choices=[c.value for c in Concept])
        sp.add_argument("--alpha", type=int, required=True)

    sp = command("check", help="test one matching")
    stability(sp)
    sp.add_argument("profile", help="profile file or fixture name")
    sp.add_argument("matching", help="matching file, fixture matching name, or vector like 2,1,3")
    sp.set_defaults(func=cmd_check)

    sp = command("solve", help="find one stable matching")
    stability(sp)
    sp.add_argument("--method", default="auto", choices=METHODS)
    sp.add_argument("profile")
    sp.set_defaults(func=cmd_solve)

    sp = command("enumerate", help="list all stable matchings (brute force)")
    stability(sp)
    sp.add_argument("--limit", type=int)
    sp.add_argument("profile")
    sp.set_defaults(func=cmd_enumerate)

    sp = command("reduce", help="emit a profile from a source instance")
    sp.add_argument("kind", choices=["sat2global", "smti2individual", "smti2pair", "is2global", "gi2individual"])
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--alpha", type=int)
    sp.add_argument("--layers", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--restrict", action="store_true", help="convert a plain 3-CNF to the restricted form first")
    sp.set_defaults(func=cmd_reduce)

    sp = command("gen", help="generate profiles from digraphs")
    sp.add_argument("what", choices=["mcgarvey"])
    sp.add_argument("inputs", nargs="+", help="one file with two digraphs, or two files")
    sp.set_defaults(func=cmd_gen)

    sp = command("induce", help="induced digraphs of a uniform profile")
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("profile")
    sp.set_defaults(func=cmd_induce)

    sp = command("experiment", help="existence rate over random profiles (CSV)")
    sp.add_argument("--concept", required=True, choices=[c.value for c in Concept])
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--layers", type=int, required=True)
    sp.add_argument("--mode", default="general", choices=RANDOM_MODES)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", default="auto", choices=METHODS)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--timing", action="store_true", help="fill mean_runtime_s (output is then not reproducible)")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_experiment)
    return p


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    saved = os.environ.get("MLSM_BRUTE_CAP")
    if args.brute_cap is not None:
        if args.brute_cap < 1:
            print("mlsm: --brute-cap must be >= 1", file=sys.stderr)
            return 2
        os.environ["MLSM_BRUTE_CAP"] = str(args.brute_cap)
    try:
        return args.func(args)
    except (UsageError, ParseError, ProfileError, MatchingError, PreconditionError, CapExceeded, ValueError, KeyError) as exc:
        print(f"mlsm {args.command}: {exc}", file=sys.stderr)
        return 2
    finally:
        if saved is None:
            os.environ.pop("MLSM_BRUTE_CAP", None)
        else:
            os.environ["MLSM_BRUTE_CAP"] = saved


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
