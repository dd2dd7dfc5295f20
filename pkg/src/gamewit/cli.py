"""Command-line entry point.

Exit codes: 0 ok, 1 property failure, 2 input error, 3 cap exceeded.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .calculus import check_proof, count_rule, print_proof, read_proof
from .canonical import CanonicalError, canonicalize, is_canonical, pipeline_formula
from .extract import extract_strategy
from .games import (BoundViolation, ConstFalsifier, MinimaxFalsifier, RandomFalsifier,
                    ScriptFalsifier, StrategyError, TableFalsifier, align_strategy, game_shape,
                    minimax_counterexample, play_tree_exploration, print_strategy,
                    read_strategy, unbounded_to_bounded)
from .semantics import (Board, CapExceeded, check_universal_axioms, enumerate_structures,
                        read_structure)
from .sexpr import ParseError, parse_formula_file, print_formula
from .syntax import alpha_equal, subst
from .transforms import desugar_to_imp, imp_translate, main_var, prenex_shape

OK, FAIL, INPUT, CAP = 0, 1, 2, 3
DEFAULT_ENUM_CAP = 10 ** 6
DEFAULT_MINIMAX_CAP = 10 ** 6


class InputError(Exception):
    pass


class Out:
    """Collects key/value results and free text; prints in the chosen format."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def kv(self, key: str, value):
        if self.fmt == "kv":
            print(f"{key}={value}", file=self.stream)
        else:
            print(f"{key}: {value}", file=self.stream)

    def text(self, line: str):
        if self.fmt == "text":
            print(line, file=self.stream)


def warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


# ------------------------------------------------------------ loading

def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def load_formula(path):
    try:
        return parse_formula_file(_read(path))
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None


def load_proof(path):
    try:
        return read_proof(_read(path))
    except (ParseError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def load_strategy(path, sig, x):
    try:
        st = read_strategy(_read(path), sig)
    except (ParseError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None
    return align_strategy(st, x)


def load_board(path, sig, n0=None) -> Board:
    try:
        s, n0_file = read_structure(_read(path), sig)
    except (ParseError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None
    n0 = n0_file if n0 is None else n0
    if n0 is None:
        raise InputError(f"{path}: no n0 line and no --n0 given")
    try:
        return Board(s, n0)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


def load_boards(directory, sig, n0=None) -> list:
    d = Path(directory)
    if not d.is_dir():
        raise InputError(f"{directory}: not a directory")
    files = sorted(d.glob("*.board"))
    if not files:
        raise InputError(f"{directory}: no *.board files")
    return [(f.name, load_board(f, sig, n0)) for f in files]


def enumerated_boards(sig, domain: int, axioms, cap: int) -> list:
    out = []
    for i, s in enumerate(enumerate_structures(sig, domain, axioms, cap)):
        for n0 in range(domain):
            out.append((f"model{i}:n0={n0}", Board(s, n0)))
    return out


def _game(f, unbounded: bool):
    """(shape, bounded flag) for the game of the formula f."""
    try:
        shape = game_shape(f, bounded=not unbounded)
    except ValueError as e:
        raise InputError(f"formula is not prenex: {e}") from None
    return shape, not unbounded


# ---------------------------------------------------------- verifying

def _verify_boards(boards, shape, strat, bounded, cap, jobs, out: Out, list_passes=True) -> int:
    def one(item):
        name, b = item
        try:
            return name, minimax_counterexample(b, shape, strat, bounded, cap)
        except BoundViolation as e:
            return name, str(e)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        results = list(ex.map(one, boards))
    failed = 0
    for name, cex in results:
        if cex is None:
            if list_passes:
                out.text(f"PASS {name}")
        elif isinstance(cex, str):
            failed += 1
            out.text(f"FAIL {name} {cex}")
            out.kv(f"bound_violation.{name}", cex.replace(" ", "_"))
        else:
            failed += 1
            out.text(f"FAIL {name} replies {' '.join(map(str, cex))}")
            out.kv(f"counterexample.{name}", " ".join(map(str, cex)))
    out.kv("boards", len(results))
    out.kv("failed", failed)
    return OK if failed == 0 else FAIL


def _board_source(args, sig, axioms, out: Out):
    if args.boards:
        boards = load_boards(args.boards, sig, args.n0)
        keep = []
        for name, b in boards:
            if check_universal_axioms(b.structure, axioms):
                keep.append((name, b))
            else:
                warn(f"{name} violates the axioms; skipped")
                out.kv(f"skipped.{name}", "axioms")
        return keep
    if args.domain is None:
        raise InputError("give --boards DIR or --domain D")
    return enumerated_boards(sig, args.domain, axioms, args.enum_cap)


def _truncate(strat, rounds):
    if rounds is None or rounds >= strat.length:
        return strat
    return type(strat)(strat.x, strat.d, strat.moves[:rounds])


# ------------------------------------------------------------ commands

def cmd_check(args, out: Out) -> int:
    _, t = load_proof(args.proof)
    v = check_proof(t)
    if v is not None:
        out.kv("status", "invalid")
        out.kv("violation", str(v))
        return FAIL
    out.kv("status", "ok")
    out.kv("nodes", sum(1 for _ in t.nodes()))
    out.kv("rexall", count_rule(t, "Rexall"))
    try:
        phi = pipeline_formula(t)
        ok, why = is_canonical(t, phi)
        out.kv("canonical", "yes" if ok else "no")
        if not ok:
            out.text(f"not canonical: {why}")
    except CanonicalError as e:
        out.kv("canonical", "n/a")
        out.text(f"root is not of pipeline shape: {e}")
    return OK


def _checked_proof(path):
    sig, t = load_proof(path)
    v = check_proof(t)
    if v is not None:
        raise InputError(f"{path}: proof check failed {v}")
    return sig, t


def _write(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(path).write_text(text)
        except OSError as e:
            raise InputError(f"{path}: {e.strerror}") from None


def cmd_canonicalize(args, out: Out) -> int:
    sig, t = _checked_proof(args.proof)
    try:
        c = canonicalize(t)
    except CanonicalError as e:
        raise InputError(str(e)) from None
    _write(print_proof(c, sig), args.output)
    if args.output not in (None, "-"):
        out.kv("status", "ok")
        out.kv("rexall", count_rule(c, "Rexall"))
    return OK


def _match_formula(f, phi):
    """Check the formula file agrees with the proof's root formula; returns
    the (possibly bounded) game formula with x renamed to the proof's x."""
    x = main_var(phi)
    f = subst(f, {main_var(f): x})
    try:
        shape = prenex_shape(f)
    except ValueError as e:
        raise InputError(f"formula is not prenex: {e}") from None
    expected = desugar_to_imp(imp_translate(shape.formula()))
    if not (alpha_equal(expected, phi) or alpha_equal(desugar_to_imp(f), phi)):
        raise InputError("formula file does not match the proof's root formula "
                         f"{print_formula(phi)}")
    return f


def cmd_extract(args, out: Out) -> int:
    sig, t = _checked_proof(args.proof)
    try:
        phi = pipeline_formula(t)
    except CanonicalError as e:
        raise InputError(str(e)) from None
    if args.canonicalize:
        t = canonicalize(t)
    ok, why = is_canonical(t, phi)
    if not ok:
        out.kv("status", "not-canonical")
        out.text(why)
        return FAIL
    st = extract_strategy(t, phi)
    if args.formula:
        _, f = load_formula(args.formula)
        f = _match_formula(f, phi)
        if prenex_shape(f).bounded:
            st = unbounded_to_bounded(st, f)
    _write(print_strategy(st), args.output)
    if args.output not in (None, "-"):
        out.kv("status", "ok")
        out.kv("moves", st.length)
    return OK


def _falsifier(spec: str, strat, shape, bounded, seed):
    kind, _, arg = spec.partition(":")
    try:
        if kind == "minimax":
            return MinimaxFalsifier(strat, shape, bounded)
        if kind == "const":
            return ConstFalsifier(int(arg or 0))
        if kind == "script":
            text = _read(arg) if Path(arg).is_file() else arg
            return ScriptFalsifier([int(v) for v in text.replace(",", " ").split()])
        if kind == "table":
            return TableFalsifier(_read_table(arg))
        if kind == "random":
            s = int(arg) if arg else seed
            if s is None:
                raise InputError("random falsifier needs a seed (random:S or --seed S)")
            return RandomFalsifier(s)
    except ValueError:
        raise InputError(f"bad falsifier argument {spec!r}") from None
    raise InputError(f"unknown falsifier {spec!r}")


def _read_table(path) -> dict:
    """Lines 'SNAPSHOT MOVE -> REPLY'; SNAPSHOT is the tree snapshot
    (p:m:n;... , '-' for the bare root) or '*' for any tree."""
    table = {}
    for i, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 4 or line[2] != "->":
            raise InputError(f"{path}:{i}: expected 'SNAPSHOT MOVE -> REPLY'")
        snap = "" if line[0] == "-" else line[0]
        try:
            table[snap, int(line[1])] = int(line[3])
        except ValueError:
            raise InputError(f"{path}:{i}: move and reply must be integers") from None
    return table


def cmd_play(args, out: Out) -> int:
    sig, f = load_formula(args.formula)
    x = main_var(f)
    board = load_board(args.board, sig, args.n0)
    strat = _truncate(load_strategy(args.strategy, sig, x), args.rounds)
    shape, bounded = _game(f, args.unbounded)
    fal = _falsifier(args.falsifier, strat, shape, bounded, args.seed)
    try:
        tree, won, rounds, log = play_tree_exploration(board, shape, strat, fal, None, bounded)
    except BoundViolation as e:
        out.kv("result", "bound-violation")
        out.text(str(e))
        return FAIL
    for line in log:
        out.text(line)
    out.text(tree.render())
    out.kv("result", "win" if won else "loss")
    out.kv("rounds", rounds)
    out.kv("tree", tree.snapshot() or "-")
    return OK if won else FAIL


def cmd_verify(args, out: Out) -> int:
    sig, f = load_formula(args.formula)
    x = main_var(f)
    strat = _truncate(load_strategy(args.strategy, sig, x), args.rounds)
    shape, bounded = _game(f, args.unbounded)
    axioms = ()
    if args.axioms:
        axioms = tuple(load_formula(p)[1] for p in args.axioms)
    boards = _board_source(args, sig, axioms, out)
    return _verify_boards(boards, shape, strat, bounded, args.minimax_cap, args.jobs, out,
                          bool(args.boards) or args.verbose)


def cmd_pipeline(args, out: Out) -> int:
    sig, t = load_proof(args.proof)
    v = check_proof(t)
    if v is not None:
        out.kv("stage", "check")
        out.kv("violation", str(v))
        return INPUT
    out.text("check: ok")
    try:
        phi = pipeline_formula(t)
        c = canonicalize(t)
    except CanonicalError as e:
        out.kv("stage", "canonicalize")
        out.text(str(e))
        return INPUT
    out.text(f"canonicalize: ok ({count_rule(c, 'Rexall')} R∃∀ steps)")
    st = extract_strategy(c, phi)
    out.text("extract: " + " ; ".join(f"{mv.p}@{mv.r}" for mv in st.moves))
    axioms = tuple(g for _, g in t.seq.ant)
    fsig, f = load_formula(args.formula) if args.formula else (sig, phi)
    if args.formula:
        f = _match_formula(f, phi)
    shape, bounded = _game(f, unbounded=False)
    if shape.bounded:
        st = unbounded_to_bounded(st, f)
    else:
        shape, bounded = _game(phi, unbounded=True)
    if args.output:
        _write(print_strategy(st), args.output)
    out.kv("strategy.moves", st.length)
    boards = _board_source(args, sig, axioms, out)
    return _verify_boards(boards, shape, st, bounded, args.minimax_cap, args.jobs, out,
                          bool(args.boards) or args.verbose)


# ------------------------------------------------------------ nw lab

def cmd_design(args, out: Out) -> int:
    from .nwlab import Design, make_design, verify_design
    if args.family:
        d = _read_family(args.family)
    else:
        try:
            d = make_design(args.q, args.deg)
        except ValueError as e:
            raise InputError(str(e)) from None
    out.kv("m", d.m)
    out.kv("l", d.l)
    out.kv("a", d.a)
    out.kv("sets", len(d))
    if args.list:
        for i, s in enumerate(d.sets):
            out.text(f"{i}: {' '.join(map(str, s))}")
    if not args.verify and not args.family:
        return OK
    bad = verify_design(d)
    assert isinstance(d, Design)
    if bad is None:
        out.kv("design", "ok")
        return OK
    out.kv("design", "violation")
    out.kv("pair", f"{bad[0]} {bad[1]}")
    return FAIL


def _read_family(path):
    from .nwlab import Design
    rows = [ln.split("#", 1)[0].split() for ln in _read(path).splitlines()]
    rows = [r for r in rows if r]
    try:
        m, l, a = (int(v) for v in rows[0])
        sets = tuple(tuple(sorted(int(v) for v in r)) for r in rows[1:])
    except (ValueError, IndexError):
        raise InputError(f"{path}: expected 'm l a' then one set per line") from None
    return Design(m, l, a, sets)


def _read_ints(path) -> list:
    try:
        return [int(tok, 0) for tok in _read(path).replace(",", " ").split()]
    except ValueError:
        raise InputError(f"{path}: expected whitespace-separated integers") from None


def cmd_counting(args, out: Out) -> int:
    from .nwlab import density, find_good_restriction, restrict
    S = set(_read_ints(args.S))
    T = set(_read_ints(args.T))
    if args.m is None:
        args.m = max(max(S | T, default=0).bit_length(), args.m1)
    if not 0 <= args.m1 <= args.m:
        raise InputError("need 0 <= m1 <= m")
    if any(not 0 <= w < 1 << args.m for w in S | T):
        raise InputError(f"elements must be below 2^{args.m}")
    try:
        a = find_good_restriction(S, T, args.m1, args.m)
    except ValueError as e:
        raise InputError(str(e)) from None
    m2 = args.m - args.m1
    Sa = restrict(S, a, args.m1, args.m)
    Ta = restrict(T, a, args.m1, args.m)
    out.kv("a", format(a, f"0{args.m1}b") if args.m1 else "")
    out.kv("S_a", len(Sa))
    out.kv("T_a", len(Ta))
    out.kv("density.S", density(S, args.m))
    out.kv("density.S_a", density(Sa, m2))
    out.kv("ratio", Fraction(len(Ta), len(Sa)))
    return OK


def _function(spec: str, arity):
    from .nwlab import (choose_b, maj_table, parity_table, rmaj_eval, table_from_hex,
                        table_of, tribes_eval)
    name, _, k = spec.partition(":")
    if k and not Path(spec).exists():
        try:
            k = int(k)
        except ValueError:
            raise InputError(f"bad arity in {spec!r}") from None
        if k < 1 or (name != "rmaj" and k > 24) or (name == "rmaj" and k > 3):
            raise InputError(f"arity out of range in {spec!r}")
        if name == "parity":
            return parity_table(k)
        if name == "maj":
            return maj_table(k)
        if name == "tribes":
            b = choose_b(k)
            return table_of(lambda bs: tribes_eval(k, b, bs), k)
        if name == "rmaj":
            return table_of(lambda bs: rmaj_eval(k, bs), 3 ** k)
        raise InputError(f"unknown function {name!r}")
    try:
        return table_from_hex(_read(spec), arity)
    except ValueError:
        raise InputError(f"{spec}: expected a hex truth table") from None


def _fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad number {text!r}") from None
    return v


def _mc_mode(mode: str, seed):
    parts = mode.split(":")
    if parts[0] != "mc" or len(parts) not in (2, 3):
        raise InputError(f"mode must be exact or mc:N:SEED, not {mode!r}")
    try:
        samples = int(parts[1])
        seed = int(parts[2]) if len(parts) == 3 else seed
    except ValueError:
        raise InputError(f"bad mode {mode!r}") from None
    if seed is None:
        raise InputError("Monte Carlo mode needs a seed (mc:N:SEED or --seed)")
    if samples <= 0:
        raise InputError("sample count must be positive")
    return samples, seed


def cmd_noise(args, out: Out) -> int:
    from .nwlab import (delta_random, expbias_bound_check, noise_stability, table_arity)
    C = _function(args.function, args.arity)
    k = table_arity(C)
    delta = _fraction(args.delta)
    if not 0 <= delta <= Fraction(1, 2):
        raise InputError("delta must lie in [0, 1/2]")
    out.kv("k", k)
    out.kv("delta", delta)
    if args.mode == "exact":
        ns = noise_stability(C, delta)
        out.kv("noise_stability", ns)
        out.kv("noise_stability.float", f"{float(ns):.12g}")
    else:
        samples, seed = _mc_mode(args.mode, args.seed)
        est, se = noise_stability(C, delta, "mc", samples, seed)
        out.kv("noise_stability.estimate", f"{est:.6g}")
        out.kv("noise_stability.stderr", f"{se:.3g}")
    if args.bound_n is not None:
        try:
            g = delta_random(args.bound_n, delta, seed=args.seed)
        except ValueError as e:
            raise InputError(str(e)) from None
        lhs, rhs, holds = expbias_bound_check(C, g, delta)
        out.kv("expbias", lhs)
        out.kv("sqrt_noise_stability", f"{rhs:.12g}")
        out.kv("bound", "holds" if holds else "fails")
        return OK if holds else FAIL
    return OK


# ------------------------------------------------------------ corpus

def cmd_corpus(args, out: Out) -> int:
    from .corpus import CORPUS_NAMES, write_corpus
    if args.list or args.name is None:
        for n in CORPUS_NAMES:
            out.text(n)
        return OK if args.list else INPUT
    if args.name not in CORPUS_NAMES:
        print(f"error: unknown corpus entry {args.name!r}; choose from "
              f"{', '.join(CORPUS_NAMES)}", file=sys.stderr)
        return INPUT
    target = Path(args.output)
    try:
        target.mkdir(parents=True, exist_ok=True)
        files = write_corpus(args.name, target)
    except OSError as e:
        raise InputError(f"{target}: {e.strerror}") from None
    for f in files:
        out.text(str(f))
    out.kv("files", len(files))
    return OK


# ------------------------------------------------------------ parser

def _fmt(prog):
    return argparse.HelpFormatter(prog, width=88)


def _global_opts(p, defaults: bool):
    """Global flags; subcommands repeat them without defaults so that
    either position works."""
    def dflt(v):
        return v if defaults else argparse.SUPPRESS
    p.add_argument("--format", choices=("text", "kv"), default=dflt("text"),
                   help="output style (default: text)")
    p.add_argument("--jobs", type=int, default=dflt(os.cpu_count() or 1),
                   help="worker threads for board verification")
    p.add_argument("--seed", type=int, default=dflt(None), help="seed for randomized modes")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gamewit", formatter_class=_fmt,
        description="Check proofs, extract truthifier strategies and verify them on finite boards.",
        epilog="exit codes: 0 ok, 1 property failure, 2 input error, 3 cap exceeded")
    p.add_argument("--version", action="version", version=f"gamewit {__version__}")
    _global_opts(p, defaults=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_opts(common, defaults=False)
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_, formatter_class=_fmt,
                            parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    def boards_opts(sp):
        sp.add_argument("--boards", metavar="DIR", help="directory of *.board structure files")
        sp.add_argument("--domain", type=int, metavar="D",
                        help="enumerate every structure on D elements instead")
        sp.add_argument("--n0", type=int, help="starting value of x when a board lacks one")
        sp.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP,
                        help="maximum number of candidate structures")
        sp.add_argument("-v", "--verbose", action="store_true",
                        help="list passing boards when enumerating")
        sp.add_argument("--minimax-cap", type=int, default=DEFAULT_MINIMAX_CAP,
                        help="maximum number of falsifier reply sequences per board")

    sp = add("check", cmd_check, "check every rule application of a proof")
    sp.add_argument("proof")

    sp = add("canonicalize", cmd_canonicalize, "rewrite a proof into canonical form")
    sp.add_argument("proof")
    sp.add_argument("-o", "--output", help="output proof file (default: stdout)")

    sp = add("extract", cmd_extract, "extract a truthifier strategy from a canonical proof")
    sp.add_argument("proof")
    sp.add_argument("--formula", help="bounded formula file; converts the strategy for its game")
    sp.add_argument("--canonicalize", action="store_true", help="canonicalize first")
    sp.add_argument("-o", "--output", help="output strategy file (default: stdout)")

    sp = add("play", cmd_play, "play one game on a board and print the transcript")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--board", required=True)
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--falsifier", default="minimax",
                    help="minimax, table:FILE, script:FILE (or script:N,N,...), const:N, random[:SEED]")
    sp.add_argument("--rounds", type=int, help="play at most this many rounds")
    sp.add_argument("--n0", type=int, help="starting value of x (overrides the board)")
    sp.add_argument("--unbounded", action="store_true",
                    help="play the guarded game: any domain element is a legal move")

    sp = add("verify", cmd_verify, "check a strategy wins on every board against every falsifier")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--axioms", nargs="*", default=(), metavar="FILE",
                    help="formula files with universal axioms (for --domain)")
    sp.add_argument("--rounds", type=int, help="the strategy must win within this many rounds")
    sp.add_argument("--unbounded", action="store_true", help="play the guarded game")
    boards_opts(sp)

    sp = add("pipeline", cmd_pipeline, "check, canonicalize, extract and verify in one go")
    sp.add_argument("proof")
    sp.add_argument("--formula", help="formula file for the game (default: the proof's root)")
    sp.add_argument("-o", "--output", help="also write the strategy here")
    boards_opts(sp)

    sp = add("design", cmd_design, "build and verify a combinatorial design")
    sp.add_argument("--q", type=int, default=5, help="prime field size (default: 5)")
    sp.add_argument("--deg", type=int, default=1, help="polynomial degree (default: 1)")
    sp.add_argument("--verify", action="store_true", help="check pairwise intersections")
    sp.add_argument("--family", help="verify this set family file instead ('m l a' header)")
    sp.add_argument("--list", action="store_true", help="print the sets")

    sp = add("counting", cmd_counting, "find a prefix restriction keeping T dense in S")
    sp.add_argument("--S", required=True, metavar="FILE", help="integers in S")
    sp.add_argument("--T", required=True, metavar="FILE", help="integers in T")
    sp.add_argument("--m", type=int, help="bit length of elements (default: smallest that fits)")
    sp.add_argument("--m1", type=int, required=True, help="prefix length")

    sp = add("noise", cmd_noise, "noise stability of a boolean function")
    sp.add_argument("--fn", required=True, dest="function",
                    help="hex truth table file, or parity:K, maj:K, tribes:K, rmaj:R")
    sp.add_argument("--arity", type=int, help="arity of a hex table")
    sp.add_argument("--delta", default="1/4", help="noise rate, e.g. 1/8")
    sp.add_argument("--mode", default="exact", help="exact, or mc:N:SEED for N seeded samples")
    sp.add_argument("--bound-n", type=int, metavar="N",
                    help="also check the bias bound for a delta-random g on N inputs")

    sp = add("corpus", cmd_corpus, "write a built-in example to disk")
    sp.add_argument("name", nargs="?")
    sp.add_argument("-o", "--output", default=".", help="target directory")
    sp.add_argument("--list", action="store_true", help="list the examples")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Out(args.format)
    try:
        return args.fn(args, out)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return CAP
    except ImportError:
        raise
    except Exception as e:
        from .nwlab import SizeCap
        if isinstance(e, SizeCap):
            print(f"cap exceeded: {e}", file=sys.stderr)
            return CAP
        if isinstance(e, (StrategyError, BoundViolation)):
            print(f"strategy error: {e}", file=sys.stderr)
            return FAIL
        if isinstance(e, (ParseError, ValueError, CanonicalError)):
            print(f"error: {e}", file=sys.stderr)
            return INPUT
        raise


if __name__ == "__main__":
    sys.exit(main())
