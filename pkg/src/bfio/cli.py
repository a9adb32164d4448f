"""Command-line interface: apply, bench, oracle and probe."""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import amplitude as amp_mod
from .butterfly import Plan, PlanConfig, apply
from .lowrank import (SOURCE, TARGET, PairContext, complementary_pairs, empirical_rank,
                      interpolation_error)
from .oracle import DEFAULT_SAMPLES, append_csv, benchmark, direct_full
from .phase import PHASES, get_phase
from .vecio import FREQUENCY, SPATIAL, VectorFormatError, read_vector, write_vector

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# config-file keys and their parsers
CONFIG_KEYS = {
    "n": str, "q": str, "phase": str, "amp": str, "amp_eps": float, "seed": int,
    "input": str, "output": str, "csv": str, "check_samples": int, "threads": int,
    "real_input": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "force_direct": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "start_level": int, "end_level": int, "pair_offset": int, "trials": int,
}


class CliError(Exception):
    pass


def load_config(path) -> dict:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as e:
        raise CliError(f"cannot read config {path}: {e.strerror}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{num}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise CliError(f"{path}:{num}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](val)
        except ValueError:
            raise CliError(f"{path}:{num}: bad value for {key}: {val!r}") from None
    return out


def _int_list(text) -> list[int]:
    try:
        vals = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected a comma-separated integer list, got {text!r}") from None
    if not vals:
        raise CliError("empty list")
    return vals


def _single(text, name) -> int:
    vals = _int_list(text)
    if len(vals) != 1:
        raise CliError(f"--{name} takes a single value for this command")
    return vals[0]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--n", help="grid size (comma-separated list for bench)")
    common.add_argument("--q", help="Chebyshev points per dimension (list for bench)")
    common.add_argument("--phase", choices=sorted(PHASES))
    common.add_argument("--amp", choices=amp_mod.AMPLITUDES)
    common.add_argument("--amp-eps", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--input")
    common.add_argument("--output")
    common.add_argument("--csv")
    common.add_argument("--check-samples", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--real-input", action="store_true", default=None)
    common.add_argument("--force-direct", action="store_true", default=None)
    common.add_argument("--start-level", type=int)
    common.add_argument("--end-level", type=int)
    common.add_argument("--pair-offset", type=int,
                        help="pair boxes with level(A)+level(B) = L + g (default 0)")
    common.add_argument("--trials", type=int)

    p = argparse.ArgumentParser(prog="bfio", description="Butterfly evaluation of 2-D Fourier integral operators.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("apply", parents=[common], help="fast apply to a frequency-domain vector file")
    sub.add_parser("bench", parents=[common], help="accuracy and timing over N x q")
    sub.add_parser("oracle", parents=[common], help="direct summation to a spatial vector file")
    sub.add_parser("probe", parents=[common], help="rank and interpolation-error sweeps")
    return p


DEFAULTS = {
    "n": "64", "q": "7", "phase": "ellipse", "amp": "none", "amp_eps": 1e-7, "seed": 0,
    "input": None, "output": None, "csv": None, "check_samples": DEFAULT_SAMPLES, "threads": 1,
    "real_input": False, "force_direct": False, "start_level": None, "end_level": None,
    "pair_offset": 0, "trials": 1,
}


def resolve(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if ns.config:
        cfg.update(load_config(ns.config))
    for key in DEFAULTS:
        val = getattr(ns, key, None)
        if val is not None:
            cfg[key] = val
    cfg["command"] = ns.command
    return cfg


def _plan(cfg, N, q) -> Plan:
    return Plan(PlanConfig(N=N, q=q, phase=get_phase(cfg["phase"]), start_level=cfg["start_level"],
                           end_level=cfg["end_level"], pair_offset=cfg["pair_offset"],
                           workers=cfg["threads"]))


def _amplitude(cfg, N):
    """(separated amplitude or None, exact callable or None)."""
    if cfg["amp"] == "none":
        return None, None
    ap, am = amp_mod.build_circle(N, cfg["amp_eps"], cfg["seed"])
    return amp_mod.combine(ap, am), amp_mod.circle_amplitude_sum


def _read_input(cfg, N) -> np.ndarray:
    path = cfg["input"]
    if not path:
        raise CliError("--input is required")
    if not os.path.exists(path):
        raise CliError(f"input file not found: {path}")
    f, fn, domain = read_vector(path)
    if fn != N:
        raise CliError(f"N mismatch: --n {N} but {path} holds N={fn}")
    if domain != FREQUENCY:
        raise CliError(f"{path} is not a frequency-domain vector")
    return f


def cmd_apply(cfg) -> int:
    N, q = _single(cfg["n"], "n"), _single(cfg["q"], "q")
    f = _read_input(cfg, N)
    if not cfg["output"]:
        raise CliError("--output is required")
    pl = _plan(cfg, N, q)
    sep, _ = _amplitude(cfg, N)
    t0 = time.perf_counter()
    u = apply(pl, f) if sep is None else amp_mod.apply_with_amplitude(pl, sep, f)
    dt = time.perf_counter() - t0
    write_vector(cfg["output"], u, N, SPATIAL)
    extra = "" if sep is None else f" s={sep.s}"
    print(f"apply N={N} q={q} phase={cfg['phase']} amp={cfg['amp']}{extra} time={dt:.3f}s -> {cfg['output']}")
    return EXIT_OK


def cmd_oracle(cfg) -> int:
    N = _single(cfg["n"], "n")
    f = _read_input(cfg, N)
    if not cfg["output"]:
        raise CliError("--output is required")
    _, exact = _amplitude(cfg, N)
    phase = get_phase(cfg["phase"])
    t0 = time.perf_counter()
    try:
        u = direct_full(phase, N, f, exact, force=bool(cfg["force_direct"]))
    except ValueError as e:
        raise CliError(str(e)) from None
    write_vector(cfg["output"], u, N, SPATIAL)
    print(f"oracle N={N} phase={cfg['phase']} amp={cfg['amp']} time={time.perf_counter() - t0:.3f}s -> {cfg['output']}")
    return EXIT_OK


def cmd_bench(cfg) -> int:
    Ns, qs = _int_list(cfg["n"]), _int_list(cfg["q"])
    reports, failed = [], 0
    print(f"{'(N,q)':>10} {'Ta(sec)':>10} {'Td(sec)':>10} {'Td/Ta':>10} {'eps_a':>10}")
    for N in Ns:
        for q in qs:
            try:
                pl = _plan(cfg, N, q)
                sep, exact = _amplitude(cfg, N)
                r = benchmark(pl, trials=cfg["trials"], seed=cfg["seed"], samples=cfg["check_samples"],
                              amp=sep, amp_exact=exact, amp_name=cfg["amp"], real_input=cfg["real_input"])
            except (ValueError, RuntimeError, MemoryError) as e:
                failed += 1
                print(f"{f'({N},{q})':>10} failed: {e}")
                continue
            reports.append(r)
            print(f"{f'({N},{q})':>10} {r.wall_time_fast:10.3g} {r.extrapolated_direct_total:10.3g} "
                  f"{r.speedup:10.3g} {r.relative_error:10.3g}")
            if cfg["csv"]:
                append_csv(cfg["csv"], [r])
    return EXIT_FAIL if failed else EXIT_OK


def cmd_probe(cfg) -> int:
    N, q = _single(cfg["n"], "n"), _single(cfg["q"], "q")
    if N < 4 or N & (N - 1):
        raise CliError(f"N must be a power of two >= 4, got {N}")
    L = int(round(math.log2(N)))
    phase = get_phase(cfg["phase"])
    half = 1.0 / math.sqrt(N)
    print(f"{'lvl(A)':>6} {'lvl(B)':>6} {'side':>7} {'rank(1e-6)':>10} {'interp_err':>10}")
    for la in range(L + 1):
        lb = L - la
        pairs = complementary_pairs(N, la, 4, cfg["seed"])
        for side in (SOURCE, TARGET):
            if (side == SOURCE and 2.0 ** -lb > half * (1 + 1e-12)) or \
               (side == TARGET and 2.0 ** -la > half * (1 + 1e-12)):
                continue
            ranks, errs = [], []
            for A, B in pairs:
                ctx = PairContext(A, B, N, q, side)
                ranks.append(empirical_rank(ctx, phase, 1e-6, m=12))
                errs.append(interpolation_error(ctx, phase, 32, cfg["seed"]))
            print(f"{la:>6} {lb:>6} {side:>7} {max(ranks):>10} {max(errs):>10.3g}")
    return EXIT_OK


COMMANDS = {"apply": cmd_apply, "bench": cmd_bench, "oracle": cmd_oracle, "probe": cmd_probe}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve(ns)
        return COMMANDS[cfg["command"]](cfg)
    except (CliError, VectorFormatError, OSError) as e:
        print(f"bfio: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"bfio: invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
