"""Strategies from proofs.

Two routes produce tree exploration strategies: the translation of a
canonical proof into partial game trees (one R∃∀ = one new node), and the
Herbrand route from a strong ∨-expansion plus witnessing terms.  Strategies
can then be unrolled into sequential evaluation games, and terms mentioning
Herbrand functions can be compiled into auxiliary games plus a reader term.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .calculus import ProofNode, count_rule
from .canonical import CanonicalError, is_canonical, pipeline_formula
from .games import AncillaryStrategy, LStrategy, Move, StrategyError
from .semantics import enumerate_structures, eval_formula
from .sexpr import Signature
from .syntax import (ZERO, App, FreshIds, Ite, Or, Quant, Var, alpha_key,
                     free_vars, leq, subst, term_vars)
from .transforms import PrenexShape, main_var, prenex_shape


# ------------------------------------------------- L-term game trees

@dataclass(frozen=True)
class LTermGameTree:
    """Node 1 is the root; node i+2 hangs below parents[i] via labels[i] = (q, z)."""
    parents: tuple = ()
    labels: tuple = ()

    @property
    def size(self) -> int:
        return 1 + len(self.parents)

    def add(self, parent: int, q, z: Var) -> "LTermGameTree":
        return LTermGameTree(self.parents + (parent,), self.labels + ((q, z),))

    def edges(self) -> list:
        """[(parent, child, q, z)] in creation order."""
        return [(p, i + 2, q, z) for i, (p, (q, z)) in enumerate(zip(self.parents, self.labels))]

    def check(self, params: set):
        """Assert distinct z's and FV(q_i) within params and earlier z's."""
        seen = set(params)
        zs = set()
        for p, i, q, z in self.edges():
            if not 1 <= p < i:
                raise AssertionError(f"node {i}: parent {p} is not earlier")
            stray = term_vars(q) - seen
            if stray:
                raise AssertionError(f"node {i}: term {q} mentions {sorted(map(str, stray))}")
            if z in zs or z in params:
                raise AssertionError(f"node {i}: variable {z} reused")
            zs.add(z)
            seen.add(z)

    def __str__(self) -> str:
        return "; ".join(f"{p}->{i} ({q}, {z})" for p, i, q, z in self.edges()) or "(root only)"


def _carry(occmap: dict, seq) -> dict:
    ids = {o for o, _ in seq.suc}
    return {o: v for o, v in occmap.items() if o in ids}


def _active(node: ProofNode) -> int:
    new = {o for o, _ in node.children[0].seq.suc} - {o for o, _ in node.seq.suc}
    if len(new) != 1:
        raise CanonicalError("R∃∀ premise must add exactly one succedent occurrence")
    return next(iter(new))


def _root_map(t: ProofNode) -> dict:
    return {t.seq.suc[0][0]: 1}


def _require_canonical(t: ProofNode, phi):
    if phi is None:
        phi = pipeline_formula(t)
    ok, why = is_canonical(t, phi)
    if not ok:
        raise CanonicalError(f"proof is not canonical: {why}")
    return phi


def pgt_of(t: ProofNode, phi=None) -> dict:
    """Partial game tree of every sequent: {node path: (tree, {occ: tree node})}.

    The occurrence map is the Sub(φ) bookkeeping: exactly the succedent
    occurrences that are slice instances of φ, each mapped to its node.
    """
    phi = _require_canonical(t, phi)
    params = {main_var(phi)} | t.seq.free_vars()
    out = {}

    def go(n: ProofNode, path, tree: LTermGameTree, occmap: dict):
        tree.check(params)
        if sorted(occmap.values()) != list(range(1, tree.size + 1)):
            raise AssertionError(f"at {path}: nodes and Sub(φ) occurrences are not in bijection")
        out[path] = (tree, dict(occmap))
        for i, c in enumerate(n.children):
            m = _carry(occmap, c.seq)
            tr = tree
            if n.rule.tag == "Rexall":
                v = occmap.get(n.rule.principal)
                if v is None:
                    raise CanonicalError(f"R∃∀ at {path} acts on a formula outside Sub(φ)")
                tr = tree.add(v, n.rule.term, n.rule.fresh)
                m[_active(n)] = tr.size
            go(c, path + (i,), tr, m)

    go(t, (), LTermGameTree(), _root_map(t))
    return out


def extract_strategy(t: ProofNode, phi=None) -> LStrategy:
    """The tree exploration strategy read off a canonical proof."""
    phi = _require_canonical(t, phi)
    x = main_var(phi)
    fresh = FreshIds.above(*t.formulas(), x)

    def go(n: ProofNode, d: int, occmap: dict) -> list:
        tag = n.rule.tag
        if tag in ("Ax", "Lbot"):
            return []
        if tag in ("Lall", "Rimpc"):
            c = n.children[0]
            return go(c, d, _carry(occmap, c.seq))
        if tag == "Rexall":
            v = occmap.get(n.rule.principal)
            if v is None:
                raise CanonicalError("R∃∀ acts on a formula outside Sub(φ)")
            c = n.children[0]
            m = _carry(occmap, c.seq)
            m[_active(n)] = d + 1
            return [Move(n.rule.term, v, fresh.var("m"), n.rule.fresh)] + go(c, d + 1, m)
        if tag == "Limp":
            left, right = n.children
            t1 = go(left, d, _carry(occmap, left.seq))
            t2 = go(right, d, _carry(occmap, right.seq))
            return t1 + _rebase(t2, d, len(t1), t1, fresh)
        raise CanonicalError(f"rule {tag} cannot occur in a canonical proof")

    moves = go(t, 1, _root_map(t))
    st = LStrategy(x, 1, tuple(moves))
    assert st.length <= count_rule(t, "Rexall")
    return st


def _rebase(moves: list, d: int, shift: int, before: list, fresh: FreshIds) -> list:
    """Shift node indices created by `moves` past `shift` earlier rounds and
    rename variables that clash with those rounds."""
    taken = {mv.own for mv in before} | {mv.reply for mv in before}
    ren = {}
    out = []
    for mv in moves:
        own = fresh.var(mv.own.name) if mv.own in taken else mv.own
        rep = fresh.var(mv.reply.name) if mv.reply in taken else mv.reply
        p = subst(mv.p, ren) if ren else mv.p
        if own != mv.own:
            ren[mv.own] = own
        if rep != mv.reply:
            ren[mv.reply] = rep
        out.append(Move(p, mv.r + shift if mv.r > d else mv.r, own, rep))
    return out


# ------------------------------------------------------ Herbrand route

@dataclass(frozen=True)
class QuantifierTree:
    """Existential quantifiers of a strong ∨-expansion, in prenex order.

    parents[i] is the index (1-based) of the enclosing existential of node
    i+1, or 0 for a top-level one.  pairs[i] = (∃ variable, ∀ variable).
    """
    parents: tuple
    pairs: tuple = ()

    def depth(self, i: int) -> int:
        d = 0
        while i:
            i = self.parents[i - 1]
            d += 1
        return d

    def check(self, k: int):
        for i, p in enumerate(self.parents, 1):
            if not 0 <= p < i:
                raise StrategyError(f"quantifier {i}: parent {p} must come earlier")
        kids = set(self.parents)
        for i in range(1, len(self.parents) + 1):
            if i not in kids and self.depth(i) != k:
                raise StrategyError(f"leaf {i} sits at level {self.depth(i)}, not {k}")


def quantifier_tree(f) -> QuantifierTree:
    """Read the ∃-tree off an NNF formula whose quantifiers come in ∃∀ pairs."""
    parents, pairs = [], []

    def go(g, parent):
        if isinstance(g, Quant):
            if g.kind == "exists":
                body = g.body
                if not (isinstance(body, Quant) and body.kind == "forall"):
                    raise StrategyError("each ∃ must be followed by a ∀")
                parents.append(parent)
                pairs.append((g.var, body.var))
                go(body.body, len(parents))
            else:
                raise StrategyError("stray ∀ outside an ∃∀ pair")
        elif isinstance(g, Or) or hasattr(g, "left"):
            go(g.left, parent)
            go(g.right, parent)
        elif hasattr(g, "body"):
            go(g.body, parent)

    go(f, 0)
    return QuantifierTree(tuple(parents), tuple(pairs))


def herbrand_extract(phi, qtree: QuantifierTree | tuple, witnesses, replies=None) -> LStrategy:
    """Strategy replaying the quantifier tree: round i plays t_i below the
    node of its parent quantifier (the root for top-level ones)."""
    shape = phi if isinstance(phi, PrenexShape) else prenex_shape(phi)
    x = main_var(shape.formula())
    if not isinstance(qtree, QuantifierTree):
        qtree = QuantifierTree(tuple(qtree))
    qtree.check(shape.k)
    n = len(qtree.parents)
    if len(witnesses) != n:
        raise StrategyError(f"{n} quantifiers but {len(witnesses)} witnesses")
    if replies is None:
        replies = [p[1] for p in qtree.pairs] if qtree.pairs else None
    fresh = FreshIds.above(x, *witnesses, *(replies or []))
    replies = list(replies) if replies is not None else [fresh.var("z") for _ in range(n)]
    allowed = {x}
    moves = []
    for i, (t, par) in enumerate(zip(witnesses, qtree.parents)):
        stray = term_vars(t) - allowed
        if stray:
            raise StrategyError(f"witness {i + 1} mentions {sorted(map(str, stray))}")
        moves.append(Move(t, 1 if par == 0 else par + 1, fresh.var("m"), replies[i]))
        allowed.add(replies[i])
    return LStrategy(x, 1, tuple(moves))


def witnessed_disjunction(f_exp, witnesses):
    """Quantifier-free matrix of the expansion with ∃ variables replaced by
    the witnesses (∀ variables left free)."""
    qt = quantifier_tree(f_exp)
    m = {ev: t for (ev, _), t in zip(qt.pairs, witnesses)}

    def strip(g):
        if isinstance(g, Quant):
            return strip(g.body)
        if hasattr(g, "left"):
            return type(g)(strip(g.left), strip(g.right))
        if hasattr(g, "body"):
            return type(g)(strip(g.body))
        return g
    return subst(strip(f_exp), m)


def valid_on_small(f, sig: Signature, axioms=(), max_d: int = 2) -> bool:
    fv = sorted(free_vars(f), key=lambda v: v.id)
    for d in range(1, max_d + 1):
        for s in enumerate_structures(sig, d, axioms):
            for vals in itertools.product(range(d), repeat=len(fv)):
                if not eval_formula(s, f, dict(zip(fv, vals))):
                    return False
    return True


def find_witnesses(f_exp, sig: Signature, axioms=(), x: Var | None = None, max_d: int = 2,
                   extra_terms=()):
    """Brute-force search for a witnessing substitution of a strong ∨-expansion.

    Candidates for the i-th existential: the ∀ variables of earlier
    quantifiers (latest first), 0, 1, x, and `extra_terms` whose variables are in range.  Validity is
    checked on every structure with at most max_d elements.  Returns the
    quantifier tree and the witnesses, or None.
    """
    qt = quantifier_tree(f_exp)
    x = x if x is not None else main_var(f_exp)
    cands = []
    allowed = {x}
    for _, uv in qt.pairs:
        # earlier universal variables first: witnesses that copy the
        # falsifier's answer are the ones valid beyond small domains
        base = sorted(allowed - {x}, key=lambda v: -v.id) + [ZERO, App("1", ()), x]
        base += [t for t in extra_terms if term_vars(t) <= allowed]
        seen, uniq = set(), []
        for t in base:
            if alpha_key(t) not in seen:
                seen.add(alpha_key(t))
                uniq.append(t)
        cands.append(uniq)
        allowed = allowed | {uv}
    for combo in itertools.product(*cands):
        if valid_on_small(witnessed_disjunction(f_exp, combo), sig, axioms, max_d):
            return qt, list(combo)
    return None


# ------------------------------------------------- tree -> sequential

def _anc_layout(games: int, k: int, fresh: FreshIds):
    """Ancillary variables per earlier game: ms[j][l], ns[j][l] (0-based)."""
    ms = [[fresh.var("a") for _ in range(k)] for _ in range(games)]
    ns = [[fresh.var("b") for _ in range(k)] for _ in range(games)]
    flat = []
    for j in range(games):
        for l in range(k):
            flat += [ms[j][l], ns[j][l]]
    return ms, ns, flat


def tree_to_sequential(strat: LStrategy, phi) -> list:
    """One evaluation-game strategy per round of the tree strategy.

    Game i walks down to the node extended in round i, replaying the moves
    recorded in the transcripts of the games that created those nodes, plays
    round i's term with earlier replies read from those transcripts, then
    pads with 0.
    """
    shape = phi if isinstance(phi, PrenexShape) else prenex_shape(phi)
    k = shape.k
    if strat.d != 1:
        raise StrategyError("sequential translation needs a strategy starting at the root")
    fresh = FreshIds.above(strat.x, *[mv.p for mv in strat.moves],
                           *[mv.own for mv in strat.moves], *[mv.reply for mv in strat.moves])
    l = strat.length
    ms, ns, flat = _anc_layout(l, k, fresh)
    creator = {}                      # tree node -> round that made it
    depth = {1: 0}
    parent = {}
    for i, mv in enumerate(strat.moves, 1):
        creator[1 + i] = i
        parent[1 + i] = mv.r
        depth[1 + i] = depth[mv.r] + 1
        if depth[1 + i] > k:
            raise StrategyError(f"round {i} extends a leaf")
    out = []
    for i, mv in enumerate(strat.moves, 1):
        path = []
        v = mv.r
        while v != 1:
            path.append(creator[v])
            v = parent[v]
        path.reverse()
        sigma = {}
        for j in range(1, i):
            lv = depth[1 + j] - 1
            sigma[strat.moves[j - 1].own] = ms[j - 1][lv]
            sigma[strat.moves[j - 1].reply] = ns[j - 1][lv]
        terms = [ms[j - 1][lv] for lv, j in enumerate(path)]
        terms.append(subst(mv.p, sigma) if sigma else mv.p)
        terms += [ZERO] * (k - len(terms))
        own = tuple(fresh.var("m") for _ in range(k))
        rep = tuple(fresh.var("n") for _ in range(k))
        out.append(AncillaryStrategy(strat.x, tuple(terms), own, rep,
                                     tuple(flat[:2 * k * (i - 1)])))
    return out


# ------------------------------------------------------ oracle terms

def compile_oracle_terms(q, phi, oracles=None, bounded: bool = False):
    """Turn a term using Herbrand functions into auxiliary games and a reader.

    `oracles` maps each Herbrand symbol to its level j (it takes x and the
    first j existential values); by default f1..fk.  Returns
    (strategies, reader, anc_vars): playing the strategies with
    play_sequential feeds every transcript forward, and evaluating `reader`
    with anc_vars bound to the flattened transcripts gives the value of q
    with f_j read as the falsifier's round-j reply.
    """
    shape = phi if isinstance(phi, PrenexShape) else prenex_shape(phi)
    k = shape.k
    x = main_var(shape.formula())
    if oracles is None:
        oracles = {f"f{j}": j for j in range(1, k + 1)}
    calls = []                               # (key, name, level, args)
    index = {}

    def collect(t):
        if isinstance(t, App):
            for a in t.args:
                collect(a)
            if t.fn in oracles:
                j = oracles[t.fn]
                if len(t.args) != j + 1:
                    raise StrategyError(f"{t.fn} takes {j + 1} arguments, got {len(t.args)}")
                if t.args[0] != x:
                    raise StrategyError(f"first argument of {t.fn} must be {x}")
                key = alpha_key(t)
                if key not in index:
                    index[key] = len(calls)
                    calls.append(t)
        elif isinstance(t, Ite):
            raise StrategyError("if-then-else inside oracle terms is not supported")

    collect(q)
    fresh = FreshIds.above(q, x, shape.formula())
    g = len(calls)
    ms, ns, flat = _anc_layout(g, k, fresh)

    def read(t):
        """Replace oracle calls by the reply slot of their game."""
        if isinstance(t, App):
            key = alpha_key(t)
            if t.fn in oracles and key in index:
                return ns[index[key]][oracles[t.fn] - 1]
            return App(t.fn, tuple(read(a) for a in t.args))
        return t

    strategies = []
    for gi, call in enumerate(calls):
        j = oracles[call.fn]
        own = tuple(fresh.var("m") for _ in range(k))
        rep = tuple(fresh.var("n") for _ in range(k))
        terms = []
        anc_here = set(flat[:2 * k * gi])
        for lv, a in enumerate(call.args[1:]):
            s = read(a)
            stray = term_vars(s) - anc_here - {x}
            if stray:
                s = subst(s, {v: ZERO for v in stray})
            if bounded:
                q_item = shape.exists_item(lv + 1)
                if q_item.bound is not None:
                    env = {shape.exists_item(i + 1).var: own[i] for i in range(lv)}
                    env.update({shape.forall_item(i + 1).var: rep[i] for i in range(lv)})
                    s = Ite(leq(s, subst(q_item.bound, env)), s, ZERO)
            terms.append(s)
        terms += [ZERO] * (k - j)
        strategies.append(AncillaryStrategy(x, tuple(terms), own, rep, tuple(flat[:2 * k * gi])))
    return strategies, read(q), flat
