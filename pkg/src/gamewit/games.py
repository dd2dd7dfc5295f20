"""Evaluation games, tree exploration games and sequential games.

Round i of a game for an alternating prenex formula: the truthifier picks
y_i, the falsifier answers x_i.  In bounded mode moves must respect the
quantifier bounds under the board's leq table; in unbounded mode the bounds
are ignored and wins are judged on the guarded (imp-translated) matrix.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .semantics import Board, CapExceeded, eval_formula, eval_term, quant_range
from .syntax import ZERO, FreshIds, Ite, Var, leq, subst, term_vars
from .transforms import PrenexShape, imp_translate, prenex_shape

DEFAULT_MINIMAX_CAP = 10 ** 6


class BoundViolation(RuntimeError):
    """The truthifier made an out-of-bound move (a strategy bug, not a loss)."""


class StrategyError(ValueError):
    pass


def game_shape(formula, bounded: bool = True) -> PrenexShape:
    """Shape on which games are played; unbounded mode moves guards into the matrix."""
    shape = prenex_shape(formula)
    if bounded:
        return shape
    return prenex_shape(imp_translate(shape.formula()))


# ----------------------------------------------------------- game trees

@dataclass(frozen=True)
class GameTree:
    """Nodes 1..size in creation order; node 1 is the root.

    parents[i-2] and labels[i-2] describe node i.  A label is (m, n); n is
    None when the falsifier had no valid reply (the node is then won).
    """
    parents: tuple = ()
    labels: tuple = ()

    @property
    def size(self) -> int:
        return 1 + len(self.parents)

    def parent(self, i: int) -> int | None:
        return None if i == 1 else self.parents[i - 2]

    def path(self, i: int) -> list:
        """Edge labels from the root down to node i."""
        out = []
        while i != 1:
            out.append(self.labels[i - 2])
            i = self.parents[i - 2]
        return out[::-1]

    def path_nodes(self, i: int) -> list:
        out = [i]
        while i != 1:
            i = self.parents[i - 2]
            out.append(i)
        return out[::-1]

    def depth(self, i: int) -> int:
        return len(self.path(i))

    def add(self, parent: int, m: int, n) -> "GameTree":
        if not 1 <= parent <= self.size:
            raise StrategyError(f"node {parent} does not exist")
        return GameTree(self.parents + (parent,), self.labels + ((m, n),))

    def snapshot(self) -> str:
        return ";".join(f"{p}:{m}:{n}" for p, (m, n) in zip(self.parents, self.labels))

    def render(self) -> str:
        lines = ["(1)"]

        def go(i, ind):
            for j in range(2, self.size + 1):
                if self.parents[j - 2] == i:
                    m, n = self.labels[j - 2]
                    lines.append("  " * ind + f"({j}) via ({m}, {'-' if n is None else n})")
                    go(j, ind + 1)
        go(1, 1)
        return "\n".join(lines)


def _env(shape: PrenexShape, x: Var, n0: int, labels) -> dict:
    env = {x: n0}
    for j, (m, n) in enumerate(labels, 1):
        env[shape.exists_item(j).var] = m
        if n is not None:
            env[shape.forall_item(j).var] = n
    return env


def node_wins(board: Board, shape: PrenexShape, x: Var, labels) -> bool:
    if any(n is None for _, n in labels):
        return True
    if len(labels) != shape.k:
        return False
    return eval_formula(board.structure, shape.matrix, _env(shape, x, board.n0, labels))


def truthifier_range(board, shape, x, labels, bounded):
    if not bounded:
        return None
    q = shape.exists_item(len(labels) + 1)
    return None if q.bound is None else quant_range(board.structure, q.bound, _env(shape, x, board.n0, labels))


def falsifier_range(board, shape, x, labels, m, bounded):
    """Valid replies after the truthifier played m (None = whole domain)."""
    if not bounded:
        return None
    j = len(labels) + 1
    q = shape.forall_item(j)
    if q.bound is None:
        return None
    env = _env(shape, x, board.n0, labels)
    env[shape.exists_item(j).var] = m
    return quant_range(board.structure, q.bound, env)


def _check_move(board, shape, x, labels, m, bounded):
    rng = truthifier_range(board, shape, x, labels, bounded)
    if rng is not None and m not in rng:
        raise BoundViolation(f"truthifier move {m} violates the bound in round {len(labels) + 1}")


# ----------------------------------------------------------- falsifiers

@dataclass
class Situation:
    """What a falsifier sees when answering."""
    board: Board
    tree: GameTree | None
    node: int | None           # node being extended (tree games)
    path_moves: tuple          # truthifier moves on the root-to-new-node path
    move: int
    valid: list | None         # valid replies, None = all of the domain


def _clamp(reply: int, s: Situation) -> int | None:
    if s.valid is None:
        return reply if 0 <= reply < s.board.structure.d else 0
    if not s.valid:
        return None
    if reply in s.valid:
        return reply
    return 0 if 0 in s.valid else s.valid[0]


class Falsifier:
    oblivious = False

    def choose(self, s: Situation) -> int:
        raise NotImplementedError

    def reply(self, s: Situation):
        """Answer clamped into the valid range; None if no valid reply exists."""
        if s.valid is not None and not s.valid:
            return None
        return _clamp(self.choose(s), s)


class ConstFalsifier(Falsifier):
    oblivious = True

    def __init__(self, c: int = 0):
        self.c = c

    def choose(self, s):
        return self.c


class ScriptFalsifier(Falsifier):
    """Replies from a fixed list, in order; 0 once exhausted."""

    def __init__(self, replies: Sequence[int]):
        self.replies = list(replies)
        self.i = 0

    def choose(self, s):
        r = self.replies[self.i] if self.i < len(self.replies) else 0
        self.i += 1
        return r


class ObliviousFalsifier(Falsifier):
    """Reply depends only on the truthifier moves along the current path.

    `table` maps tuples (m_1, ..., m_j) to replies; `fn` is an alternative
    callable with the same argument.
    """
    oblivious = True

    def __init__(self, table: dict | None = None, fn: Callable | None = None, default: int = 0):
        self.table = table or {}
        self.fn = fn
        self.default = default

    def choose(self, s):
        if self.fn is not None:
            return self.fn(s.path_moves)
        return self.table.get(tuple(s.path_moves), self.default)


class TableFalsifier(Falsifier):
    """Reply keyed by (tree snapshot, truthifier move); '*' matches any tree."""

    def __init__(self, table: dict, default: int = 0):
        self.table = table
        self.default = default

    def choose(self, s):
        snap = s.tree.snapshot() if s.tree is not None else ""
        for key in ((snap, s.move), ("*", s.move)):
            if key in self.table:
                return self.table[key]
        return self.default


class RandomFalsifier(Falsifier):
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def choose(self, s):
        pool = s.valid if s.valid is not None else range(s.board.structure.d)
        return self.rng.choice(list(pool)) if pool else 0


def all_oblivious_falsifiers(d: int, k: int):
    """Every oblivious falsifier on a d-element domain for k rounds, as a
    table from truthifier move paths (m_1..m_j), j <= k, to replies.

    Out-of-range entries are clamped at play time, so some tables coincide
    in bounded games; the enumeration is still exhaustive.
    """
    keys = [p for j in range(1, k + 1) for p in itertools.product(range(d), repeat=j)]
    for vals in itertools.product(range(d), repeat=len(keys)):
        yield _FixedOblivious(dict(zip(keys, vals)))


class _FixedOblivious(Falsifier):
    oblivious = True

    def __init__(self, table):
        self.table = table

    def reply(self, s):
        if s.valid is not None and not s.valid:
            return None
        r = self.table.get(tuple(s.path_moves), 0)
        return _clamp(0 if r is None else r, s)

    def __repr__(self):
        return f"Oblivious({self.table})"


# ------------------------------------------------------------ strategies

@dataclass(frozen=True)
class Move:
    p: object      # term
    r: int         # node to extend
    own: Var       # names the value this move takes
    reply: Var     # names the falsifier's answer


@dataclass(frozen=True)
class LStrategy:
    """A tree exploration strategy <p_1, r_1, ..., p_l, r_l>.

    p_i may mention x and the own/reply variables of rounds before i.
    """
    x: Var
    d: int
    moves: tuple = ()

    def __post_init__(self):
        seen = {self.x}
        for i, mv in enumerate(self.moves, 1):
            if not 1 <= mv.r < self.d + i:
                raise StrategyError(f"move {i}: node index {mv.r} outside 1..{self.d + i - 1}")
            stray = term_vars(mv.p) - seen
            if stray:
                raise StrategyError(f"move {i}: term mentions {sorted(map(str, stray))} not yet known")
            seen |= {mv.own, mv.reply}

    @property
    def length(self) -> int:
        return len(self.moves)

    def pairs(self) -> list:
        return [(mv.p, mv.r) for mv in self.moves]

    def __str__(self) -> str:
        return "⟨" + "; ".join(f"{mv.p}, {mv.r}" for mv in self.moves) + "⟩"


def make_lstrategy(x: Var, pairs, replies=None, d: int = 1) -> LStrategy:
    """Build a strategy from (term, node) pairs; replies name the answers."""
    fresh = FreshIds.above(x, [p for p, _ in pairs], list(replies or []))
    moves = []
    for i, (p, r) in enumerate(pairs):
        rep = replies[i] if replies is not None else fresh.var("n")
        moves.append(Move(p, r, fresh.var("m"), rep))
    return LStrategy(x, d, tuple(moves))


@dataclass(frozen=True)
class AncillaryStrategy:
    """Evaluation-game strategy: p_i over x, earlier own/reply variables and
    the ancillary slots."""
    x: Var
    terms: tuple
    own: tuple
    replies: tuple
    anc: tuple = ()

    def __post_init__(self):
        if not (len(self.terms) == len(self.own) == len(self.replies)):
            raise StrategyError("terms, own and reply variables must align")
        seen = {self.x, *self.anc}
        for i, p in enumerate(self.terms):
            stray = term_vars(p) - seen
            if stray:
                raise StrategyError(f"round {i + 1}: term mentions {sorted(map(str, stray))}")
            seen |= {self.own[i], self.replies[i]}


# ------------------------------------------------------------- playing

def _eval_move(board, term, env):
    return eval_term(board.structure, term, env)


def play_evaluation(board: Board, shape: PrenexShape, strat: AncillaryStrategy, anc=(),
                    falsifier: Falsifier | None = None, bounded: bool = True):
    """Play one evaluation game.  Returns (transcript, truthifier wins)."""
    falsifier = falsifier or ConstFalsifier(0)
    if len(strat.terms) < shape.k:
        raise StrategyError("strategy has fewer terms than rounds")
    if len(anc) != len(strat.anc):
        raise StrategyError("ancillary arity mismatch")
    env = {strat.x: board.n0, **dict(zip(strat.anc, anc))}
    labels = []
    for i in range(shape.k):
        m = _eval_move(board, strat.terms[i], env)
        _check_move(board, shape, strat.x, labels, m, bounded)
        valid = falsifier_range(board, shape, strat.x, labels, m, bounded)
        s = Situation(board, None, None, tuple(mm for mm, _ in labels) + (m,), m, valid)
        n = falsifier.reply(s)
        labels.append((m, n))
        env[strat.own[i]] = m
        if n is None:
            break
        env[strat.replies[i]] = n
    return labels, node_wins(board, shape, strat.x, labels)


def play_tree_exploration(board: Board, shape: PrenexShape, strat: LStrategy,
                          falsifier: Falsifier | None = None, start: GameTree | None = None,
                          bounded: bool = True):
    """Returns (final tree, won, rounds used, log lines)."""
    falsifier = falsifier or ConstFalsifier(0)
    tree = start or GameTree()
    if tree.size != strat.d:
        raise StrategyError(f"strategy expects {strat.d} initial nodes, tree has {tree.size}")
    x = strat.x
    log = []
    for i in range(1, tree.size + 1):
        if node_wins(board, shape, x, tree.path(i)):
            return tree, True, 0, log
    env = {x: board.n0}
    for i, mv in enumerate(strat.moves, 1):
        labels = tree.path(mv.r)
        if len(labels) >= shape.k or any(n is None for _, n in labels):
            raise StrategyError(f"round {i}: node {mv.r} cannot be extended")
        m = _eval_move(board, mv.p, env)
        _check_move(board, shape, x, labels, m, bounded)
        valid = falsifier_range(board, shape, x, labels, m, bounded)
        s = Situation(board, tree, mv.r, tuple(mm for mm, _ in labels) + (m,), m, valid)
        n = falsifier.reply(s)
        tree = tree.add(mv.r, m, n)
        env[mv.own] = m
        env[mv.reply] = 0 if n is None else n
        log.append(f"round {i}: node {mv.r}, truthifier {m}, falsifier {'-' if n is None else n}")
        if node_wins(board, shape, x, labels + [(m, n)]):
            return tree, True, i, log
    return tree, False, strat.length, log


def minimax_counterexample(board: Board, shape: PrenexShape, strat: LStrategy,
                           bounded: bool = True, cap: int = DEFAULT_MINIMAX_CAP,
                           start: GameTree | None = None):
    """A falsifier reply sequence beating the strategy, or None if it always wins."""
    d = board.structure.d
    if d ** strat.length > cap:
        raise CapExceeded(f"{d}^{strat.length} reply sequences exceed cap {cap}")
    tree0 = start or GameTree()
    x = strat.x
    for i in range(1, tree0.size + 1):
        if node_wins(board, shape, x, tree0.path(i)):
            return None

    def go(i, tree, env, replies):
        if i > strat.length:
            return list(replies)
        mv = strat.moves[i - 1]
        labels = tree.path(mv.r)
        if len(labels) >= shape.k or any(n is None for _, n in labels):
            raise StrategyError(f"round {i}: node {mv.r} cannot be extended")
        m = _eval_move(board, mv.p, env)
        _check_move(board, shape, x, labels, m, bounded)
        valid = falsifier_range(board, shape, x, labels, m, bounded)
        if valid is not None and not valid:
            return None          # vacuous win
        for n in (range(d) if valid is None else valid):
            if node_wins(board, shape, x, labels + [(m, n)]):
                continue
            env2 = {**env, mv.own: m, mv.reply: n}
            res = go(i + 1, tree.add(mv.r, m, n), env2, replies + [n])
            if res is not None:
                return res
        return None

    return go(1, tree0, {x: board.n0}, [])


def minimax_check(board: Board, shape: PrenexShape, strat: LStrategy, bounded: bool = True,
                  cap: int = DEFAULT_MINIMAX_CAP, start: GameTree | None = None) -> bool:
    """True iff the strategy wins against every falsifier reply sequence."""
    return minimax_counterexample(board, shape, strat, bounded, cap, start) is None


class MinimaxFalsifier(Falsifier):
    """Adversary that looks ahead against a known strategy and picks a reply
    that still lets it beat the remaining rounds, when one exists."""

    def __init__(self, strat: LStrategy, shape: PrenexShape, bounded: bool = True):
        self.strat, self.shape, self.bounded = strat, shape, bounded
        self.round = 0
        self.env = None

    def reply(self, s):
        if s.valid is not None and not s.valid:
            return None
        x = self.strat.x
        if self.env is None:
            self.env = {x: s.board.n0}
        self.round += 1
        mv = self.strat.moves[self.round - 1]
        labels = s.tree.path(mv.r)
        options = list(range(s.board.structure.d)) if s.valid is None else s.valid
        best = options[0]
        for n in options:
            if node_wins(s.board, self.shape, x, labels + [(s.move, n)]):
                continue
            env = {**self.env, mv.own: s.move, mv.reply: n}
            if _suffix_loses(s.board, self.shape, x, self.strat.moves[self.round:],
                             s.tree.add(mv.r, s.move, n), env, self.bounded):
                best = n
                break
        self.env = {**self.env, mv.own: s.move, mv.reply: best}
        return best


def _suffix_loses(board, shape, x, moves, tree, env, bounded) -> bool:
    """True if some reply sequence keeps the remaining moves from winning."""
    if not moves:
        return True
    mv = moves[0]
    labels = tree.path(mv.r)
    if len(labels) >= shape.k or any(n is None for _, n in labels):
        return True
    m = eval_term(board.structure, mv.p, env)
    rng = truthifier_range(board, shape, x, labels, bounded)
    if rng is not None and m not in rng:
        return True
    valid = falsifier_range(board, shape, x, labels, m, bounded)
    if valid is not None and not valid:
        return False
    for n in (range(board.structure.d) if valid is None else valid):
        if node_wins(board, shape, x, labels + [(m, n)]):
            continue
        if _suffix_loses(board, shape, x, moves[1:], tree.add(mv.r, m, n),
                         {**env, mv.own: m, mv.reply: n}, bounded):
            return True
    return False


# ---------------------------------------------------------- sequential

def play_sequential(board: Board, shape: PrenexShape, strategies, falsifier: Falsifier,
                    bounded: bool = True):
    """Play the games in order, feeding earlier transcripts forward.

    Returns (1-based index of the first game won or None, transcripts).
    """
    transcripts = []
    first = None
    for idx, st in enumerate(strategies, 1):
        anc = []
        for tr in transcripts:
            for m, n in _pad(tr, shape.k):
                anc += [m, 0 if n is None else n]
        tr, won = play_evaluation(board, shape, st, tuple(anc), falsifier, bounded)
        transcripts.append(tr)
        if won and first is None:
            first = idx
            break
    return first, transcripts


def _pad(tr, k):
    return list(tr) + [(0, 0)] * (k - len(tr))


# ------------------------------------------------- unbounded -> bounded

def unbounded_to_bounded(strat: LStrategy, psi) -> LStrategy:
    """Convert a strategy for the guarded game of psi into one for psi's
    bounded game that never moves out of bounds.

    Each round reconstructs what the original strategy would have seen,
    replacing the falsifier's answers below invalid moves by 0, and plays
    the original move when it is valid and 0 otherwise.
    """
    shape = psi if isinstance(psi, PrenexShape) else prenex_shape(psi)
    if strat.d != 1:
        raise StrategyError("conversion is defined for strategies starting at the root")
    parents = {}
    depth = {1: 0}
    creator = {}
    hat = {}                       # own/reply var -> reconstructed term
    moves = []
    for i, mv in enumerate(strat.moves, 1):
        node = 1 + i
        parents[node] = mv.r
        depth[node] = depth[mv.r] + 1
        creator[node] = i
        if depth[node] > shape.k:
            raise StrategyError(f"round {i} extends a leaf")
        m_hat = subst(mv.p, hat) if hat else mv.p
        # actual variables along the path to the extended node
        path = []
        v = mv.r
        while v != 1:
            path.append(creator[v])
            v = parents[v]
        path.reverse()
        ren = {}
        for lvl, j in enumerate(path, 1):
            ren[shape.exists_item(lvl).var] = strat.moves[j - 1].own
            ren[shape.forall_item(lvl).var] = strat.moves[j - 1].reply
        q = shape.exists_item(depth[node])
        if q.bound is None:
            p_new = m_hat
            reply_hat = mv.reply
        else:
            bound = subst(q.bound, ren)
            valid = leq(m_hat, bound)
            p_new = Ite(valid, m_hat, ZERO)
            reply_hat = Ite(valid, mv.reply, ZERO)
        hat[mv.own] = m_hat
        hat[mv.reply] = reply_hat
        moves.append(Move(p_new, mv.r, mv.own, mv.reply))
    return LStrategy(strat.x, 1, tuple(moves))



# ----------------------------------------------------------- files

def print_strategy(strat: LStrategy) -> str:
    """(strategy (d 1) (x VAR) (moves (p TERM) (r INT) (own VAR) (reply VAR) ...))"""
    from .sexpr import print_term
    lines = [f"(strategy (d {strat.d}) (x {print_term(strat.x)})", "  (moves"]
    for mv in strat.moves:
        lines.append(f"    (p {print_term(mv.p)}) (r {mv.r}) (own {print_term(mv.own)}) "
                     f"(reply {print_term(mv.reply)})")
    lines[-1] += "))"
    if not strat.moves:
        lines[-1] = "  (moves))"
    return "\n".join(lines) + "\n"


def read_strategy(text: str, sig=None) -> LStrategy:
    """Parse a strategy file.  (own V) and (reply V) are optional per move;
    missing ones get fresh variables.  (x V) defaults to the variable x."""
    from .sexpr import ParseError, Reader, read_one
    sx = read_one(text)
    if sx.is_atom or not sx.value or sx.value[0].value != "strategy":
        raise ParseError("expected (strategy ...)", sx.line, sx.col)
    rd = Reader(sig, text)
    d, x, raw = 1, None, []
    for item in sx.value[1:]:
        if item.is_atom or not item.value:
            raise ParseError("expected a (key ...) entry", item.line, item.col)
        key = item.value[0].value
        args = item.value[1:]
        if key == "d":
            d = int(args[0].value)
        elif key == "x":
            x = rd.var(args[0])
        elif key == "moves":
            cur = None
            for a in args:
                if a.is_atom or len(a.value) != 2:
                    raise ParseError("move entries are (p T), (r N), (own V), (reply V)", a.line, a.col)
                k = a.value[0].value
                if k == "p":
                    cur = {"p": a.value[1]}
                    raw.append(cur)
                elif cur is None:
                    raise ParseError(f"({k} ...) before any (p ...)", a.line, a.col)
                elif k == "r":
                    try:
                        cur["r"] = int(a.value[1].value)
                    except (TypeError, ValueError):
                        raise ParseError("node index must be an integer", a.line, a.col) from None
                elif k in ("own", "reply", "z"):
                    cur["reply" if k == "z" else k] = a.value[1]
                else:
                    raise ParseError(f"unknown move entry {k}", a.line, a.col)
        else:
            raise ParseError(f"unknown strategy entry {key}", item.line, item.col)
    if x is None:
        x = rd._named("x")
    vars_ = {}
    for mv in raw:
        if "r" not in mv:
            raise ParseError("move without (r N)")
        for k in ("own", "reply"):
            if k in mv:
                vars_[id(mv), k] = rd.var(mv[k])
    terms = [rd.term(mv["p"]) for mv in raw]
    fresh = FreshIds.above(x, *terms, *vars_.values())
    moves = []
    for mv, p in zip(raw, terms):
        own = vars_.get((id(mv), "own")) or fresh.var("m")
        rep = vars_.get((id(mv), "reply")) or fresh.var("z")
        moves.append(Move(p, mv["r"], own, rep))
    return LStrategy(x, d, tuple(moves))


def align_strategy(strat: LStrategy, x: Var) -> LStrategy:
    """Rename the strategy's main variable to x (files parsed separately
    give the same name different ids)."""
    if strat.x == x:
        return strat
    fresh = FreshIds.above(x, *[mv.p for mv in strat.moves])
    m = {strat.x: x}
    moves = []
    for mv in strat.moves:
        own, rep = mv.own, mv.reply
        if own == x:
            m[own] = fresh.var(own.name)
            own = m[own]
        if rep == x:
            m[rep] = fresh.var(rep.name)
            rep = m[rep]
        moves.append(Move(subst(mv.p, m), mv.r, own, rep))
    return LStrategy(x, strat.d, tuple(moves))
