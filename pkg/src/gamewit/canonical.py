"""Normalisation of G3c proofs into canonical proofs.

Pipeline: make occurrence ids and proper variables path-unique, absorb R->
into R->c, limit every R-forall, pair R-exists with the R-forall above it
into R-exists-forall, and ground stray free variables to 0.
"""
from __future__ import annotations

from dataclasses import replace

from .calculus import (ProofNode, RuleApp, Sequent, check_proof, count_rule)
from .syntax import (ZERO, FreshIds, Quant, Var, all_vars, subst,
                     substitute, term_vars, is_quantifier_free, alpha_key)
from .transforms import is_alternating, main_var, phi_slice, uses_only_imp
from .semantics import is_universal


class CanonicalError(ValueError):
    pass


ALLOWED = {"Ax", "Lbot", "Limp", "Lall", "Rimpc", "Rexall"}


def _need_checked(t: ProofNode):
    v = check_proof(t)
    if v is not None:
        raise CanonicalError(f"input proof does not check: {v}")


def _tree_fresh(t: ProofNode) -> FreshIds:
    return FreshIds.above(t.formulas())


def _max_occ(t: ProofNode) -> int:
    return max(t.all_occ_ids(), default=0)


# ------------------------------------------------------- tree mapping

def subst_tree(t: ProofNode, m: dict) -> ProofNode:
    """Substitute free variables throughout a proof.

    A rule whose proper variable is substituted shields its premises: the
    occurrences above it belong to that rule, not to the outer variable.
    """
    seq = t.seq.map_formulas(lambda f: subst(f, m))
    r = t.rule
    rule = r if r.term is None else replace(r, term=subst(r.term, m))
    inner = m
    if r.fresh is not None and r.fresh in m:
        inner = {k: v for k, v in m.items() if k != r.fresh}
    kids = t.children if not inner else tuple(subst_tree(c, inner) for c in t.children)
    return ProofNode(seq, rule, kids)


def beta_substitute(t: ProofNode, v: Var, s) -> ProofNode:
    """Replace the free variable v by the term s throughout the proof."""
    fv_s = term_vars(s)
    if v in fv_s:
        raise CanonicalError(f"term contains the substituted variable {v}")
    proper = t.proper_vars()
    clash = fv_s & proper
    if clash:
        raise CanonicalError(f"term mentions proper variable {sorted(map(str, clash))[0]} of the proof")
    if v in proper:
        raise CanonicalError(f"{v} is a proper variable of the proof")
    return subst_tree(t, {v: s})


def _rename_occ(t: ProofNode, old: int, new: int, fn=None) -> ProofNode:
    """Rename occurrence id old to new everywhere (optionally mapping its formula)."""
    def side(items):
        return tuple((new if o == old else o, (fn(f) if (fn and o == old) else f)) for o, f in items)
    seq = Sequent(side(t.seq.ant), side(t.seq.suc))
    r = t.rule
    rule = replace(r, principal=new if r.principal == old else r.principal,
                   partner=new if r.partner == old else r.partner)
    return ProofNode(seq, rule, tuple(_rename_occ(c, old, new, fn) for c in t.children))


# ------------------------------------------------- path-unique naming

def make_path_unique(t: ProofNode) -> ProofNode:
    """Rename occurrence ids and proper variables that could collide.

    Afterwards no active formula reuses an id seen on its root path, and no
    proper variable occurs free anywhere on the path below its rule.  Trees
    already satisfying this are returned unchanged.
    """
    fresh = _tree_fresh(t)
    counter = [_max_occ(t) + 1]

    def go(n: ProofNode, seen_ids: set, seen_vars: set) -> ProofNode:
        seen_ids = seen_ids | n.seq.ids()
        seen_vars = seen_vars | n.seq.free_vars()
        r = n.rule
        if r.term is not None:
            seen_vars = seen_vars | term_vars(r.term)
        kids = list(n.children)
        if r.fresh is not None and r.fresh in seen_vars:
            nv = fresh.var(r.fresh.name)
            kids = [subst_tree(c, {r.fresh: nv}) for c in kids]
            r = replace(r, fresh=nv)
        out = []
        for c in kids:
            for o in sorted(c.seq.ids() - n.seq.ids()):
                if o in seen_ids:
                    c = _rename_occ(c, o, counter[0])
                    counter[0] += 1
            out.append(go(c, seen_ids, seen_vars))
        return ProofNode(n.seq, r, tuple(out))

    return go(t, set(), set())


# -------------------------------------------------------- absorb R->

def absorb_r_imp(t: ProofNode) -> ProofNode:
    """Turn every R-> into R->c by keeping a copy of its principal above."""
    _need_checked(t)
    if count_rule(t, "Rimp") == 0:
        return t
    t = make_path_unique(t)

    def go(n: ProofNode, extra: tuple) -> ProofNode:
        seq = Sequent(n.seq.ant, n.seq.suc + extra)
        r = n.rule
        if r.tag == "Rimp":
            f = n.seq.lookup(r.principal)[1]
            kids = tuple(go(c, extra + ((r.principal, f),)) for c in n.children)
            return ProofNode(seq, replace(r, tag="Rimpc"), kids)
        return ProofNode(seq, r, tuple(go(c, extra) for c in n.children))

    out = go(t, ())
    assert check_proof(out) is None
    return out


# ----------------------------------------------------- limited R-forall

def _parent_map(t: ProofNode) -> dict:
    out = {}
    for path, n in t.nodes():
        for i in range(len(n.children)):
            out[path + (i,)] = path
    return out


def _is_limited(t: ProofNode, path: tuple) -> bool:
    n = t.at(path)
    if n.rule.tag != "Rall" or not path:
        return False
    parent = t.at(path[:-1])
    return parent.rule.tag == "Rex" and n.rule.principal not in parent.seq.ids()


def unlimited_r_alls(t: ProofNode) -> list:
    return [p for p, n in t.nodes() if n.rule.tag == "Rall" and not _is_limited(t, p)]


def _creator(t: ProofNode, path: tuple, occ: int):
    """Path of the ancestor R-exists whose premise introduced occurrence occ."""
    for k in range(len(path) - 1, -1, -1):
        anc = t.at(path[:k])
        if occ in anc.seq.ids():
            continue
        if anc.rule.tag == "Rex":
            return path[:k]
        break
    raise CanonicalError("an R∀ principal does not stem from an R∃ (input is not of pipeline shape)")


def _replace_at(t: ProofNode, path: tuple, new: ProofNode) -> ProofNode:
    if not path:
        return new
    kids = list(t.children)
    kids[path[0]] = _replace_at(kids[path[0]], path[1:], new)
    return ProofNode(t.seq, t.rule, tuple(kids))


def limit_universals(t: ProofNode) -> ProofNode:
    """Make every R-forall directly follow the R-exists creating its principal."""
    _need_checked(t)
    if count_rule(t, "Rimp"):
        raise CanonicalError("limit_universals expects a proof without R→")
    if not unlimited_r_alls(t):
        return t
    t = make_path_unique(t)
    while True:
        bad = unlimited_r_alls(t)
        if not bad:
            break
        before = (len(bad), t.size())
        # farthest from the root first, ties broken left-first
        x_path = min(bad, key=lambda p: (-len(p), p))
        occ = t.at(x_path).rule.principal
        y_path = _creator(t, x_path, occ)
        t = _limit_one(t, y_path, occ)
        after = (len(unlimited_r_alls(t)), t.size())
        assert after < before, "limit_universals failed to make progress"
    assert check_proof(t) is None
    return t


def _limit_one(t: ProofNode, y_path: tuple, occ: int) -> ProofNode:
    fresh = _tree_fresh(t)
    y = t.at(y_path)
    prem = y.children[0]
    forall_f = prem.seq.lookup(occ)[1]
    z = fresh.var(forall_f.var.name)
    inst = substitute(forall_f.body, forall_f.var, z)
    new_occ = _max_occ(t) + 1

    def reroute(n: ProofNode) -> ProofNode:
        r = n.rule
        if r.tag == "Rall" and r.principal == occ:
            (child,) = n.children
            active = (child.seq.ids() - n.seq.ids()).pop()
            child = beta_substitute(child, r.fresh, z)
            return _rename_occ(child, active, new_occ)
        def side(items):
            return tuple((new_occ, inst) if o == occ else (o, f) for o, f in items)
        seq = Sequent(side(n.seq.ant), side(n.seq.suc))
        return ProofNode(seq, r, tuple(reroute(c) for c in n.children))

    x_new = ProofNode(prem.seq, RuleApp("Rall", occ, fresh=z), (reroute(prem),))
    return _replace_at(t, y_path, ProofNode(y.seq, y.rule, (x_new,)))


# ------------------------------------------------ pairing and grounding

def pair_exists_forall(t: ProofNode) -> ProofNode:
    """Give every R-exists a limited R-forall and merge each pair into R-exists-forall."""
    _need_checked(t)
    if count_rule(t, "Rex") == 0:
        return t
    if unlimited_r_alls(t):
        raise CanonicalError("pairing needs every R∀ limited; run limit_universals first")
    t = make_path_unique(t)
    # dummy limited R-forall above each unpaired R-exists
    while True:
        target = None
        for path, n in t.nodes():
            if n.rule.tag == "Rex":
                c = n.children[0]
                act = (c.seq.ids() - n.seq.ids()).pop()
                if not (c.rule.tag == "Rall" and c.rule.principal == act):
                    target = (path, act)
                    break
        if target is None:
            break
        path, act = target
        f = t.at(path).children[0].seq.lookup(act)[1]
        if not (isinstance(f, Quant) and f.kind == "forall" and f.bound is None):
            raise CanonicalError("R∃ instance is not universal (formula is not alternating)")
        t = _limit_one(t, path, act)

    def merge(n: ProofNode) -> ProofNode:
        if n.rule.tag == "Rex":
            x = n.children[0]
            (above,) = x.children
            app = RuleApp("Rexall", n.rule.principal, term=n.rule.term, fresh=x.rule.fresh)
            return ProofNode(n.seq, app, (merge(above),))
        return ProofNode(n.seq, n.rule, tuple(merge(c) for c in n.children))

    out = merge(t)
    assert check_proof(out) is None
    return out


def ground_stray(t: ProofNode, x: Var | None = None) -> ProofNode:
    """Substitute 0 for free variables that no R-exists-forall introduced."""
    _need_checked(t)
    t = make_path_unique(t)
    root_scope = set(t.seq.free_vars())
    if x is not None:
        root_scope.add(x)

    def go(n: ProofNode, scope: set) -> ProofNode:
        r = n.rule
        kids = list(n.children)
        if r.term is not None:
            stray = sorted(term_vars(r.term) - scope, key=lambda v: v.id)
            if stray:
                m = {v: ZERO for v in stray}
                r = replace(r, term=subst(r.term, m))
                kids = [subst_tree(c, m) for c in kids]
        inner = scope | {r.fresh} if r.tag == "Rexall" else scope
        return ProofNode(n.seq, r, tuple(go(c, inner) for c in kids))

    out = go(t, root_scope)
    assert check_proof(out) is None
    return out


# ------------------------------------------------------------ canonical

def pipeline_formula(t: ProofNode):
    """Check the root is Γ ⇒ φ with Γ universal and φ alternating; return φ."""
    if len(t.seq.suc) != 1:
        raise CanonicalError("root succedent must hold exactly one formula φ(x)")
    phi = t.seq.suc[0][1]
    if not (uses_only_imp(phi) and is_alternating(phi)):
        raise CanonicalError("φ must be an alternating prenex formula over → and ⊥")
    if any(q.bound is not None for q in _prefix(phi)):
        raise CanonicalError("φ must be implicitly bounded (translate bounded quantifiers first)")
    for _, g in t.seq.ant:
        if not is_universal(g):
            raise CanonicalError(f"antecedent formula is not universal: {g}")
    return phi


def _prefix(f):
    out = []
    while isinstance(f, Quant):
        out.append(f)
        f = f.body
    return out


def canonicalize(t: ProofNode) -> ProofNode:
    phi = pipeline_formula(t)
    _need_checked(t)
    if count_rule(t, "Lex"):
        raise CanonicalError("proof uses L∃, which cannot occur above a universal antecedent")
    out = ground_stray(pair_exists_forall(limit_universals(absorb_r_imp(t))), main_var(phi))
    ok, why = is_canonical(out, phi)
    assert ok, why
    return out


# ------------------------------------------------------- canonical test

def match_formula(pat, tgt, pvars: set, binding: dict | None = None):
    """Find a substitution for pvars making pat equal to tgt (up to bound renaming)."""
    binding = {} if binding is None else binding
    return binding if _match(pat, tgt, pvars, binding, {}, {}) else None


def _match(p, t, pvars, b, envp, envt) -> bool:
    from .syntax import Atom, Bot, BINARY, Not, App, Ite
    if isinstance(p, Var):
        if p in envp:
            return isinstance(t, Var) and envt.get(t) == envp[p]
        if p in pvars:
            if any(v in envt for v in all_vars(t)):
                return False
            if p in b:
                return alpha_key(b[p]) == alpha_key(t)
            b[p] = t
            return True
        return isinstance(t, Var) and t == p and t not in envt
    if type(p) is not type(t):
        return False
    if isinstance(p, App):
        return p.fn == t.fn and len(p.args) == len(t.args) and all(
            _match(a, c, pvars, b, envp, envt) for a, c in zip(p.args, t.args))
    if isinstance(p, Atom):
        return p.rel == t.rel and len(p.args) == len(t.args) and all(
            _match(a, c, pvars, b, envp, envt) for a, c in zip(p.args, t.args))
    if isinstance(p, Bot):
        return True
    if isinstance(p, BINARY):
        return _match(p.left, t.left, pvars, b, envp, envt) and _match(p.right, t.right, pvars, b, envp, envt)
    if isinstance(p, Not):
        return _match(p.body, t.body, pvars, b, envp, envt)
    if isinstance(p, Ite):
        return all(_match(a, c, pvars, b, envp, envt) for a, c in
                   ((p.cond, t.cond), (p.then, t.then), (p.other, t.other)))
    if p.kind != t.kind or (p.bound is None) != (t.bound is None):
        return False
    if p.bound is not None and not _match(p.bound, t.bound, pvars, b, envp, envt):
        return False
    depth = len(envp)
    return _match(p.body, t.body, pvars, b, {**envp, p.var: depth}, {**envt, t.var: depth})


def slices(phi):
    """[(i, phi[i], freed vars)] for i = 0..k."""
    k = len(_prefix(phi)) // 2
    return [(i,) + tuple(phi_slice(phi, i, with_vars=True)) for i in range(k + 1)]


def slice_index(f, sl) -> int | None:
    for i, pat, freed in sl:
        if match_formula(pat, f, set(freed)) is not None:
            return i
    return None


def is_canonical(t: ProofNode, phi=None):
    """(True, None) or (False, 'property N: reason at path')."""
    if phi is None:
        phi = t.seq.suc[0][1] if t.seq.suc else None
    x = main_var(phi)
    sl = slices(phi)
    scope0 = set(t.seq.free_vars()) | {x}

    def go(n: ProofNode, path, scope):
        if n.rule.tag not in ALLOWED:
            return f"property 1: rule {n.rule.tag} at {path}"
        for _, f in n.seq.ant:
            if not is_universal(f):
                return f"property 2: antecedent formula {f} is not universal at {path}"
        for _, f in n.seq.suc:
            if not is_quantifier_free(f) and slice_index(f, sl) is None:
                return f"property 2: succedent formula {f} is neither quantifier-free nor a slice instance at {path}"
        loose = n.seq.free_vars() - scope
        if n.rule.term is not None:
            loose |= term_vars(n.rule.term) - scope
        if loose:
            v = min(loose, key=lambda v: v.id)
            return f"property 3: free variable {v} not introduced by R∃∀ at {path}"
        inner = scope | {n.rule.fresh} if n.rule.tag == "Rexall" else scope
        for i, c in enumerate(n.children):
            why = go(c, path + (i,), inner)
            if why:
                return why
        return None

    why = go(t, (), scope0)
    return (why is None), why
