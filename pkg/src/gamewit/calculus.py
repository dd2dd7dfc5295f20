"""G3c sequent calculus with the R->c and R-exists-forall variants.

Sequents carry occurrence ids.  Side formulas and Kleene copies keep their
id from conclusion to premise; active formulas get ids not used in the
conclusion.  This makes "the same occurrence" a mechanical notion.
"""
from __future__ import annotations

import itertools
import threading
from collections import Counter
from dataclasses import dataclass

from .sexpr import (ParseError, Reader, Signature, Sx, parse_signature,
                    print_formula, print_signature, print_term, read_sexprs)
from .syntax import (App, Atom, Bot, FreshIds, Imp, Quant, Var, alpha_equal,
                     alpha_key, free_vars, subst, substitute, subterms,
                     term_vars)

TAGS = ("Ax", "Lbot", "Limp", "Rimp", "Lall", "Lex", "Rall", "Rex", "Rimpc", "Rexall")
TAG_ALIASES = {"L⊥": "Lbot", "L→": "Limp", "R→": "Rimp", "L∀": "Lall", "L∃": "Lex",
               "R∀": "Rall", "R∃": "Rex", "R→c": "Rimpc", "R∃∀": "Rexall"}
NEEDS_TERM = {"Lall", "Rex", "Rexall"}
NEEDS_FRESH = {"Lex", "Rall", "Rexall"}
LEFT_RULES = {"Lbot", "Limp", "Lall", "Lex"}


def norm_tag(tag: str) -> str:
    tag = TAG_ALIASES.get(tag, tag)
    if tag not in TAGS:
        raise ValueError(f"unknown rule tag {tag!r}")
    return tag


# ------------------------------------------------------------- sequents

@dataclass(frozen=True)
class Sequent:
    ant: tuple = ()     # ((occ, formula), ...)
    suc: tuple = ()

    def __post_init__(self):
        ids = [o for o, _ in self.ant] + [o for o, _ in self.suc]
        if len(ids) != len(set(ids)):
            raise ValueError("occurrence ids must be unique within a sequent")

    @classmethod
    def of(cls, ant=(), suc=(), start: int = 1) -> "Sequent":
        """Number formulas consecutively from `start`."""
        c = itertools.count(start)
        return cls(tuple((next(c), f) for f in ant), tuple((next(c), f) for f in suc))

    def side(self, name: str) -> tuple:
        return self.ant if name == "ant" else self.suc

    def lookup(self, occ: int):
        for side in ("ant", "suc"):
            for o, f in self.side(side):
                if o == occ:
                    return side, f
        return None

    def ids(self) -> set:
        return {o for o, _ in self.ant} | {o for o, _ in self.suc}

    def formulas(self) -> list:
        return [f for _, f in self.ant] + [f for _, f in self.suc]

    def free_vars(self) -> set:
        out = set()
        for f in self.formulas():
            free_vars(f, out)
        return out

    def same_as(self, other: "Sequent") -> bool:
        """Multiset equality up to renaming of bound variables."""
        def ms(side):
            return Counter(alpha_key(f) for _, f in side)
        return ms(self.ant) == ms(other.ant) and ms(self.suc) == ms(other.suc)

    def map_formulas(self, fn) -> "Sequent":
        return Sequent(tuple((o, fn(f)) for o, f in self.ant),
                       tuple((o, fn(f)) for o, f in self.suc))

    def __str__(self) -> str:
        a = ", ".join(str(f) for _, f in self.ant)
        s = ", ".join(str(f) for _, f in self.suc)
        return f"{a} ⇒ {s}"


@dataclass(frozen=True)
class RuleApp:
    tag: str
    principal: int | None = None
    partner: int | None = None      # Ax: the antecedent occurrence
    term: object = None
    fresh: Var | None = None

    def __post_init__(self):
        object.__setattr__(self, "tag", norm_tag(self.tag))


@dataclass(frozen=True)
class ProofNode:
    seq: Sequent
    rule: RuleApp
    children: tuple = ()

    def nodes(self):
        """Pre-order traversal yielding (path, node)."""
        stack = [((), self)]
        while stack:
            path, n = stack.pop()
            yield path, n
            for i in reversed(range(len(n.children))):
                stack.append((path + (i,), n.children[i]))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)

    def at(self, path) -> "ProofNode":
        n = self
        for i in path:
            n = n.children[i]
        return n

    def all_occ_ids(self) -> set:
        out = set()
        for _, n in self.nodes():
            out |= n.seq.ids()
        return out

    def formulas(self) -> list:
        out = []
        for _, n in self.nodes():
            out.extend(n.seq.formulas())
            if n.rule.term is not None:
                out.append(n.rule.term)
            if n.rule.fresh is not None:
                out.append(n.rule.fresh)
        return out

    def proper_vars(self) -> set:
        return {n.rule.fresh for _, n in self.nodes() if n.rule.fresh is not None}


ProofTree = ProofNode


@dataclass(frozen=True)
class Violation:
    reason: str
    path: tuple = ()

    def __str__(self) -> str:
        where = "root" if not self.path else "/".join(map(str, self.path))
        return f"at {where}: {self.reason}"


class ProofError(ValueError):
    pass


# ------------------------------------------------------- rule schemas

def _actives(conc: Sequent, app: RuleApp):
    """Expected shape of the premises for a rule application.

    Returns a list with, per premise, (removed occurrence ids, list of
    (side, formula) actives).  Raises ProofError on a broken side condition.
    """
    tag = app.tag
    for need, present in (("term", app.term is not None), ("fresh", app.fresh is not None)):
        wanted = tag in (NEEDS_TERM if need == "term" else NEEDS_FRESH)
        if wanted != present:
            raise ProofError(f"{tag} {'requires' if wanted else 'does not take'} a {need}")
    if tag == "Ax":
        if app.principal is None or app.partner is None:
            raise ProofError("Ax records a succedent and an antecedent occurrence")
        s = conc.lookup(app.principal)
        a = conc.lookup(app.partner)
        if s is None or a is None:
            raise ProofError("occurrence id does not resolve")
        if s[0] != "suc" or a[0] != "ant":
            raise ProofError("Ax pairs an antecedent occurrence with a succedent occurrence")
        if not isinstance(s[1], Atom):
            raise ProofError("non-atomic: Ax principal must be an atomic predicate")
        if not alpha_equal(s[1], a[1]):
            raise ProofError("Ax occurrences are different formulas")
        return []
    if app.principal is None:
        raise ProofError(f"{tag} needs a principal occurrence")
    found = conc.lookup(app.principal)
    if found is None:
        raise ProofError("principal occurrence id does not resolve")
    side, f = found
    want_side = "ant" if tag in LEFT_RULES else "suc"
    if side != want_side:
        raise ProofError(f"{tag} principal must be in the {'antecedent' if want_side == 'ant' else 'succedent'}")
    p = app.principal
    if tag == "Lbot":
        if not isinstance(f, Bot):
            raise ProofError("L⊥ principal is not ⊥")
        return []
    if tag in ("Limp", "Rimp", "Rimpc"):
        if not isinstance(f, Imp):
            raise ProofError(f"{tag} principal is not an implication")
        if tag == "Limp":
            return [({p}, [("suc", f.left)]), ({p}, [("ant", f.right)])]
        removed = {p} if tag == "Rimp" else set()
        return [(removed, [("ant", f.left), ("suc", f.right)])]
    if not isinstance(f, Quant):
        raise ProofError(f"{tag} principal is not quantified")
    if f.bound is not None:
        raise ProofError("bounded quantifiers are outside the calculus; translate them first")
    kind = {"Lall": "forall", "Lex": "exists", "Rall": "forall", "Rex": "exists",
            "Rexall": "exists"}[tag]
    if f.kind != kind:
        raise ProofError(f"{tag} principal is not {'universal' if kind == 'forall' else 'existential'}")
    conc_fv = conc.free_vars()
    if tag in NEEDS_FRESH:
        if not isinstance(app.fresh, Var):
            raise ProofError("proper variable must be a variable")
        if app.fresh in conc_fv:
            raise ProofError(f"freshness: proper variable {app.fresh} occurs free in the conclusion")
    if tag == "Lall":
        return [(set(), [("ant", substitute(f.body, f.var, app.term))])]
    if tag == "Rex":
        return [(set(), [("suc", substitute(f.body, f.var, app.term))])]
    if tag == "Lex":
        return [({p}, [("ant", substitute(f.body, f.var, app.fresh))])]
    if tag == "Rall":
        return [({p}, [("suc", substitute(f.body, f.var, app.fresh))])]
    # Rexall: exists y forall x alpha
    inner = f.body
    if not (isinstance(inner, Quant) and inner.kind == "forall" and inner.bound is None):
        raise ProofError("R∃∀ principal must have the shape ∃y∀x α")
    if app.fresh in term_vars(app.term):
        raise ProofError(f"freshness: proper variable {app.fresh} occurs in the witness term")
    inst = substitute(inner, f.var, app.term)
    return [(set(), [("suc", substitute(inst.body, inst.var, app.fresh))])]


def check_rule(conc: Sequent, app: RuleApp, premises) -> Violation | None:
    try:
        expected = _actives(conc, app)
    except ProofError as e:
        return Violation(str(e))
    premises = list(premises)
    if len(premises) != len(expected):
        return Violation(f"{app.tag} expects {len(expected)} premise(s), got {len(premises)}")
    conc_ids = conc.ids()
    for k, (prem, (removed, actives)) in enumerate(zip(premises, expected)):
        where = f"premise {k + 1}: " if len(expected) > 1 else ""
        for side in ("ant", "suc"):
            here = dict(prem.side(side))
            for o, f in conc.side(side):
                if o in removed:
                    if o in here:
                        return Violation(where + f"principal occurrence {o} must not persist")
                    continue
                if o not in here:
                    what = "Kleene copy" if o == app.principal else "side formula"
                    return Violation(where + f"missing {what} (occurrence {o})")
                if not alpha_equal(here[o], f):
                    return Violation(where + f"side formula {o} changed")
        new = [(side, o, f) for side in ("ant", "suc") for o, f in prem.side(side)
               if o not in conc_ids or o in removed]
        for side, o, _ in new:
            if o in conc_ids:
                return Violation(where + f"active formula reuses occurrence id {o}")
        want = Counter((side, alpha_key(f)) for side, f in actives)
        got = Counter((side, alpha_key(f)) for side, _, f in new)
        if want != got:
            return Violation(where + "active formulas do not match the rule schema")
    return None


def check_proof(t: ProofNode) -> Violation | None:
    """First violation in post-order (leftmost-deepest first), or None."""
    def go(n, path):
        for i, c in enumerate(n.children):
            v = go(c, path + (i,))
            if v is not None:
                return v
        v = check_rule(n.seq, n.rule, [c.seq for c in n.children])
        return None if v is None else Violation(v.reason, path)
    return go(t, ())


def count_rule(t: ProofNode, tag: str) -> int:
    tag = norm_tag(tag)
    return sum(1 for _, n in t.nodes() if n.rule.tag == tag)


# ------------------------------------------------------ applying rules

class OccIds:
    """Monotone source of occurrence ids."""

    def __init__(self, start: int = 1):
        self._it = itertools.count(start)
        self._lock = threading.Lock()

    def __call__(self) -> int:
        with self._lock:
            return next(self._it)


def apply_rule(conc: Sequent, app: RuleApp, occ: OccIds) -> list:
    """Premises produced by a rule application (checked against the schema)."""
    expected = _actives(conc, app)
    out = []
    for removed, actives in expected:
        ant = [(o, f) for o, f in conc.ant if o not in removed]
        suc = [(o, f) for o, f in conc.suc if o not in removed]
        for side, f in actives:
            (ant if side == "ant" else suc).append((occ(), f))
        out.append(Sequent(tuple(ant), tuple(suc)))
    return out


def find_occ(seq: Sequent, side: str, pred) -> int:
    """Occurrence id of the first formula on a side matching pred (or equal)."""
    for o, f in seq.side(side):
        if (pred(f) if callable(pred) else alpha_equal(f, pred)):
            return o
    raise LookupError(f"no matching formula in {side}")


class Builder:
    """Incremental top-down construction of proof trees by hand."""

    def __init__(self, start_occ: int = 1000, fresh: FreshIds | None = None):
        self.occ = OccIds(start_occ)
        self.fresh = fresh

    def step(self, seq: Sequent, tag: str, principal=None, term=None, fresh=None,
             partner=None, side=None):
        """Apply a rule; principal may be an occurrence id or a formula."""
        tag = norm_tag(tag)
        side = side or ("ant" if tag in LEFT_RULES else "suc")
        if principal is not None and not isinstance(principal, int):
            principal = find_occ(seq, side, principal)
        if partner is not None and not isinstance(partner, int):
            partner = find_occ(seq, "ant", partner)
        app = RuleApp(tag, principal, partner, term, fresh)
        return app, apply_rule(seq, app, self.occ)

    def ax(self, seq: Sequent, atom=None) -> ProofNode:
        for so, s in seq.suc:
            if isinstance(s, Atom) and (atom is None or alpha_equal(atom, s)):
                for ao, a in seq.ant:
                    if alpha_equal(a, s):
                        return ProofNode(seq, RuleApp("Ax", so, ao))
        raise LookupError("no axiom pair in sequent")

    def lbot(self, seq: Sequent) -> ProofNode:
        return ProofNode(seq, RuleApp("Lbot", find_occ(seq, "ant", Bot())))


# ---------------------------------------------------------------- search

class NotFound(LookupError):
    pass


@dataclass
class _SearchCtx:
    fresh: FreshIds
    occ: OccIds
    pool: tuple
    funcs: dict
    height: int
    budget_nodes: int
    nodes: int = 0


def _candidate_terms(seq: Sequent, ctx: _SearchCtx) -> list:
    fv = sorted(seq.free_vars(), key=lambda v: v.id)
    fvs = set(fv)
    out: list = []

    def add(t):
        if t not in out:
            out.append(t)

    for t in ctx.pool:
        missing = sorted(term_vars(t) - fvs, key=lambda v: v.id)
        if not missing:
            add(t)
            continue
        for combo in itertools.product(fv or [App("0")], repeat=len(missing)):
            add(subst(t, dict(zip(missing, combo))))
    for f in seq.formulas():
        for t in subterms(f):
            if isinstance(t, App) and term_vars(t) <= fvs:
                add(t)
    for v in fv:
        add(v)
    add(App("0"))
    layer = list(out)
    for _ in range(ctx.height):
        nxt = []
        for fn, ar in sorted(ctx.funcs.items()):
            if ar == 0:
                continue
            for args in itertools.product(layer, repeat=ar):
                t = App(fn, args)
                if t not in out:
                    out.append(t)
                    nxt.append(t)
        layer = nxt
    return out


def _has(seq_side, f) -> bool:
    k = alpha_key(f)
    return any(alpha_key(g) == k for _, g in seq_side)


def _prove(seq: Sequent, budget: int, insts: int, ctx: _SearchCtx,
           used: frozenset = frozenset()):
    """budget: rule applications left on this branch; insts: quantifier
    instantiations left on this branch."""
    if budget <= 0:
        return None
    ctx.nodes += 1
    if ctx.nodes > ctx.budget_nodes:
        raise NotFound("search node budget exhausted")
    for o, f in seq.ant:
        if isinstance(f, Bot):
            return ProofNode(seq, RuleApp("Lbot", o))
    ant_keys = {}
    for o, f in seq.ant:
        if isinstance(f, Atom):
            ant_keys.setdefault(alpha_key(f), o)
    for so, s in seq.suc:
        if isinstance(s, Atom) and alpha_key(s) in ant_keys:
            return ProofNode(seq, RuleApp("Ax", so, ant_keys[alpha_key(s)]))
    if budget == 1:
        return None

    def single(app, used=used, insts=insts):
        (prem,) = apply_rule(seq, app, ctx.occ)
        child = _prove(prem, budget - 1, insts, ctx, used)
        return None if child is None else ProofNode(seq, app, (child,))

    # invertible rules, applied eagerly without backtracking
    for o, f in reversed(seq.suc):
        if isinstance(f, Imp):
            return single(RuleApp("Rimp", o))
        if isinstance(f, Quant) and f.kind == "forall" and f.bound is None:
            return single(RuleApp("Rall", o, fresh=ctx.fresh.var(f.var.name)))
    for o, f in seq.ant:
        if isinstance(f, Imp):
            app = RuleApp("Limp", o)
            kids = []
            for p in apply_rule(seq, app, ctx.occ):
                c = _prove(p, budget - 1, insts, ctx, used)
                if c is None:
                    return None
                kids.append(c)
            return ProofNode(seq, app, tuple(kids))
        if isinstance(f, Quant) and f.kind == "exists" and f.bound is None:
            return single(RuleApp("Lex", o, fresh=ctx.fresh.var(f.var.name)))
    if budget == 2 or insts <= 0:
        return None
    cands = _candidate_terms(seq, ctx)
    quants = [("Rex", o, f) for o, f in reversed(seq.suc)
              if isinstance(f, Quant) and f.kind == "exists" and f.bound is None]
    quants += [("Lall", o, f) for o, f in seq.ant
               if isinstance(f, Quant) and f.kind == "forall" and f.bound is None]
    present = {side: {alpha_key(f) for _, f in seq.side(side)} for side in ("ant", "suc")}
    for tag, o, f in quants:
        for t in cands:
            # an instance already made on this branch never helps again
            mark = (o, alpha_key(t))
            if mark in used:
                continue
            inst = substitute(f.body, f.var, t)
            if alpha_key(inst) in present["suc" if tag == "Rex" else "ant"]:
                continue
            res = single(RuleApp(tag, o, term=t), used | {mark}, insts - 1)
            if res is not None:
                return res
    return None


def proof_search(goal: Sequent, depth: int, term_pool=(), sig: Signature | None = None,
                 height: int = 0, node_budget: int = 2_000_000) -> ProofNode:
    """Iterative-deepening search for a G3c proof of `goal`.

    `depth` bounds the number of rule applications on each branch; the
    deepening runs over the number of quantifier instantiations per branch.
    Witness terms come from `term_pool` (free variables not in scope are
    instantiated by the sequent's free variables), ground subterms of the
    sequent, its free variables and 0, optionally closed under the
    signature's functions `height` times.
    """
    funcs = dict(sig.user_funcs) if sig is not None else {}
    ctx = _SearchCtx(FreshIds.above(goal.formulas(), list(term_pool)),
                     OccIds(max(goal.ids(), default=0) + 1),
                     tuple(term_pool), funcs, height, node_budget)
    for k in range(0, depth + 1):
        res = _prove(goal, depth, k, ctx)
        if res is not None:
            assert check_proof(res) is None, "search produced an unchecked proof"
            return res
    raise NotFound(f"no proof within depth {depth}")


# ---------------------------------------------------------- proof files

def _print_seq(seq: Sequent) -> str:
    a = " ".join(f"({o} {print_formula(f)})" for o, f in seq.ant)
    s = " ".join(f"({o} {print_formula(f)})" for o, f in seq.suc)
    return f"(seq (ant{' ' + a if a else ''}) (suc{' ' + s if s else ''}))"


def _print_rule(r: RuleApp) -> str:
    parts = [f"(rule {r.tag}"]
    if r.principal is not None:
        parts.append(f":principal {r.principal}")
    if r.partner is not None:
        parts.append(f":partner {r.partner}")
    if r.term is not None:
        parts.append(f":term {print_term(r.term)}")
    if r.fresh is not None:
        parts.append(f":fresh {print_term(r.fresh)}")
    return " ".join(parts) + ")"


def print_proof(t: ProofNode, sig: Signature | None = None) -> str:
    lines = []

    def go(n, ind):
        pad = "  " * ind
        lines.append(f"{pad}(node {_print_seq(n.seq)}")
        lines.append(f"{pad}  {_print_rule(n.rule)}")
        if n.children:
            lines.append(f"{pad}  (children")
            for c in n.children:
                go(c, ind + 2)
            lines[-1] += ")"
        else:
            lines.append(f"{pad}  (children)")
        lines[-1] += ")"

    go(t, 1)
    head = "(proof" if sig is None else f"(proof\n  {print_signature(sig)}"
    return head + "\n" + "\n".join(lines) + ")\n"


def _expect_head(sx: Sx, name: str) -> list:
    if sx.is_atom or not sx.value or not sx.value[0].is_atom or sx.value[0].value != name:
        raise ParseError(f"expected ({name} ...)", sx.line, sx.col)
    return sx.value[1:]


def _read_seq(sx: Sx, rd: Reader) -> Sequent:
    parts = _expect_head(sx, "seq")
    if len(parts) != 2:
        raise ParseError("seq has (ant ...) and (suc ...)", sx.line, sx.col)
    sides = []
    for part, name in zip(parts, ("ant", "suc")):
        entries = []
        for e in _expect_head(part, name):
            if e.is_atom or len(e.value) != 2 or not e.value[0].is_atom:
                raise ParseError("sequent entries are (OCC FORMULA)", e.line, e.col)
            try:
                o = int(e.value[0].value)
            except ValueError:
                raise ParseError("occurrence id must be an integer", e.line, e.col) from None
            entries.append((o, rd.formula(e.value[1])))
        sides.append(tuple(entries))
    try:
        return Sequent(*sides)
    except ValueError as e:
        raise ParseError(str(e), sx.line, sx.col) from None


def _read_rule(sx: Sx, rd: Reader) -> RuleApp:
    parts = _expect_head(sx, "rule")
    if not parts or not parts[0].is_atom:
        raise ParseError("rule needs a tag", sx.line, sx.col)
    try:
        tag = norm_tag(parts[0].value)
    except ValueError as e:
        raise ParseError(str(e), parts[0].line, parts[0].col) from None
    kw = {}
    rest = parts[1:]
    if len(rest) % 2:
        raise ParseError("rule keywords come in :key value pairs", sx.line, sx.col)
    for key, val in zip(rest[::2], rest[1::2]):
        if not key.is_atom or not key.value.startswith(":"):
            raise ParseError("expected :keyword", key.line, key.col)
        k = key.value[1:]
        if k in ("principal", "partner"):
            try:
                kw[k] = int(val.value)
            except (TypeError, ValueError):
                raise ParseError(f":{k} takes an integer", val.line, val.col) from None
        elif k == "term":
            kw[k] = rd.term(val)
        elif k == "fresh":
            kw[k] = rd.var(val)
        else:
            raise ParseError(f"unknown rule keyword :{k}", key.line, key.col)
    return RuleApp(tag, kw.get("principal"), kw.get("partner"), kw.get("term"), kw.get("fresh"))


def _read_node(sx: Sx, rd: Reader) -> ProofNode:
    parts = _expect_head(sx, "node")
    if len(parts) != 3:
        raise ParseError("node has (seq ...) (rule ...) (children ...)", sx.line, sx.col)
    seq = _read_seq(parts[0], rd)
    rule = _read_rule(parts[1], rd)
    kids = tuple(_read_node(c, rd) for c in _expect_head(parts[2], "children"))
    return ProofNode(seq, rule, kids)


def read_proof(text: str):
    """Parse a proof file.  Returns (signature, proof)."""
    items = read_sexprs(text)
    if len(items) != 1:
        raise ParseError(f"expected one proof, found {len(items)} expressions")
    top = items[0]
    sig = Signature(open_=True)
    if not top.is_atom and top.value and top.value[0].is_atom and top.value[0].value == "proof":
        body = top.value[1:]
        if body and not body[0].is_atom and body[0].value and body[0].value[0].value == "signature":
            sig = parse_signature(body[0], open_=True)
            body = body[1:]
        if len(body) != 1:
            raise ParseError("proof holds exactly one root node", top.line, top.col)
        top = body[0]
    rd = Reader(sig, text)
    return sig.closed(), _read_node(top, rd)
