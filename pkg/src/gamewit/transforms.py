"""Normal forms and translations between connective fragments."""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import (ZERO, And, App, Atom, Bot, FreshIds, Imp, Not, Or, Quant,
                     Var, at_path, free_vars, is_quantifier_free, leq,
                     rename_bound, replace_at, subst)


class NotPrenex(ValueError):
    pass


# ---------------------------------------------------------- prenex shape

@dataclass(frozen=True)
class QItem:
    kind: str           # 'exists' | 'forall'
    var: Var
    bound: object = None


@dataclass(frozen=True)
class PrenexShape:
    """Quantifier prefix plus quantifier-free matrix.

    After `prenex_shape(..., pad=True)` the prefix strictly alternates
    exists/forall, starts with exists and ends with forall.
    """
    prefix: tuple
    matrix: object

    @property
    def k(self) -> int:
        return len(self.prefix) // 2

    @property
    def bounded(self) -> bool:
        return any(q.bound is not None for q in self.prefix)

    def exists_item(self, i: int) -> QItem:
        """1-based round i: the truthifier's quantifier."""
        return self.prefix[2 * (i - 1)]

    def forall_item(self, i: int) -> QItem:
        return self.prefix[2 * (i - 1) + 1]

    def formula(self):
        f = self.matrix
        for q in reversed(self.prefix):
            f = Quant(q.kind, q.var, f, q.bound)
        return f


def split_prefix(f):
    items = []
    while isinstance(f, Quant):
        items.append(QItem(f.kind, f.var, f.bound))
        f = f.body
    return items, f


def prenex_shape(f, pad: bool = True, fresh: FreshIds | None = None) -> PrenexShape:
    items, matrix = split_prefix(f)
    if not is_quantifier_free(matrix):
        raise NotPrenex("formula is not in prenex form")
    if not pad:
        return PrenexShape(tuple(items), matrix)
    fresh = fresh or FreshIds.above(f)
    any_bounded = any(q.bound is not None for q in items)
    out = []
    for q in items:
        want = "exists" if len(out) % 2 == 0 else "forall"
        if q.kind != want:
            out.append(_dummy(want, fresh, any_bounded))
        out.append(q)
    if len(out) % 2:
        out.append(_dummy("forall", fresh, any_bounded))
    return PrenexShape(tuple(out), matrix)


def _dummy(kind, fresh, bounded) -> QItem:
    return QItem(kind, fresh.var("w"), ZERO if bounded else None)


def is_alternating(f) -> bool:
    items, matrix = split_prefix(f)
    if not is_quantifier_free(matrix) or len(items) % 2:
        return False
    return all(q.kind == ("exists" if i % 2 == 0 else "forall")
               for i, q in enumerate(items))


def main_var(f) -> Var:
    """The distinguished free variable x of a formula phi(x)."""
    fv = sorted(free_vars(f), key=lambda v: v.id)
    if len(fv) > 1:
        raise ValueError(f"expected at most one free variable, found {[str(v) for v in fv]}")
    if fv:
        return fv[0]
    return Var("x", 0)


# ------------------------------------------------------------ imp / desugar

def imp_translate(f):
    """Move bounded-quantifier guards of a prenex formula into the matrix."""
    items, matrix = split_prefix(f)
    if not is_quantifier_free(matrix):
        raise NotPrenex("imp_translate needs a prenex formula")
    body = matrix
    for q in reversed(items):
        if q.bound is not None:
            guard = leq(q.var, q.bound)
            body = Or(Not(guard), body) if q.kind == "forall" else And(guard, body)
    for q in reversed(items):
        body = Quant(q.kind, q.var, body)
    return body


def desugar_to_imp(f):
    """Rewrite and/or/not into implication and falsum."""
    if isinstance(f, (Atom, Bot)):
        return f
    if isinstance(f, Imp):
        return Imp(desugar_to_imp(f.left), desugar_to_imp(f.right))
    if isinstance(f, Not):
        return Imp(desugar_to_imp(f.body), Bot())
    if isinstance(f, And):
        return Imp(Imp(desugar_to_imp(f.left), Imp(desugar_to_imp(f.right), Bot())), Bot())
    if isinstance(f, Or):
        if isinstance(f.left, Not):
            # not C or B reads directly as C -> B
            return Imp(desugar_to_imp(f.left.body), desugar_to_imp(f.right))
        return Imp(Imp(desugar_to_imp(f.left), Bot()), desugar_to_imp(f.right))
    return Quant(f.kind, f.var, desugar_to_imp(f.body), f.bound)


def uses_only_imp(f) -> bool:
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, Imp):
        return uses_only_imp(f.left) and uses_only_imp(f.right)
    if isinstance(f, Quant):
        return uses_only_imp(f.body)
    return False


# ------------------------------------------------------------------ NNF

def to_nnf(f, positive: bool = True):
    if isinstance(f, (Atom, Bot)):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return to_nnf(f.body, not positive)
    if isinstance(f, Imp):
        if positive:
            return Or(to_nnf(f.left, False), to_nnf(f.right, True))
        return And(to_nnf(f.left, True), to_nnf(f.right, False))
    if isinstance(f, And):
        cls = And if positive else Or
        return cls(to_nnf(f.left, positive), to_nnf(f.right, positive))
    if isinstance(f, Or):
        cls = Or if positive else And
        return cls(to_nnf(f.left, positive), to_nnf(f.right, positive))
    kind = f.kind if positive else ("exists" if f.kind == "forall" else "forall")
    return Quant(kind, f.var, to_nnf(f.body, positive), f.bound)


def is_nnf(f) -> bool:
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, Not):
        return isinstance(f.body, (Atom, Bot))
    if isinstance(f, (And, Or)):
        return is_nnf(f.left) and is_nnf(f.right)
    if isinstance(f, Quant):
        return is_nnf(f.body)
    return False


# --------------------------------------------------------------- prenex

def _unbound(f):
    """Replace bounded quantifiers by guarded unbounded ones (NNF-preserving)."""
    if isinstance(f, (Atom, Bot, Not)):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(_unbound(f.left), _unbound(f.right))
    body = _unbound(f.body)
    if f.bound is not None:
        g = leq(f.var, f.bound)
        body = And(g, body) if f.kind == "exists" else Or(Not(g), body)
    return Quant(f.kind, f.var, body)


def to_prenex(f, fresh: FreshIds | None = None):
    """Prenex form of an NNF formula.

    Bounded quantifiers are first turned into guarded unbounded ones, since
    pulling a bounded quantifier across a connective is unsound when its
    range is empty.
    """
    if not is_nnf(f):
        raise ValueError("to_prenex expects an NNF formula")
    fresh = fresh or FreshIds.above(f)
    items, matrix = _prenex(_unbound(f), fresh)
    return PrenexShape(tuple(items), matrix).formula()


def _prenex(f, fresh):
    if isinstance(f, (Atom, Bot, Not)):
        return [], f
    if isinstance(f, Quant):
        items, m = _prenex(f.body, fresh)
        return [QItem(f.kind, f.var)] + items, m
    pa, ma = _prenex(f.left, fresh)
    pb, mb = _prenex(f.right, fresh)
    # prefix of the left side scopes over the right matrix and vice versa
    fa = free_vars(PrenexShape(tuple(pa), ma).formula())
    fb = free_vars(PrenexShape(tuple(pb), mb).formula())
    taken = set(fa) | set(fb)
    pa, ma = _rename_clashes(pa, ma, fb | {q.var for q in pb}, taken, fresh)
    taken |= {q.var for q in pa}
    pb, mb = _rename_clashes(pb, mb, fa | {q.var for q in pa}, taken, fresh)
    return pa + pb, type(f)(ma, mb)


def _rename_clashes(items, matrix, avoid, taken, fresh):
    out = []
    ren = {}
    for q in items:
        if q.var in avoid:
            nv = fresh.var(q.var.name)
            ren[q.var] = nv
            out.append(QItem(q.kind, nv))
        else:
            out.append(q)
    return out, subst(matrix, ren) if ren else matrix


# -------------------------------------------------------- or-expansion

def strong_or_expand(f, path=(), strong: bool = True, fresh: FreshIds | None = None):
    """Replace the subformula at `path` by a disjunction of two copies."""
    path = tuple(path)
    sub = at_path(f, path)
    if strong and not (isinstance(sub, Quant) and sub.kind == "exists"):
        raise ValueError("strong expansion needs an existential subformula")
    fresh = fresh or FreshIds.above(f)
    return replace_at(f, path, Or(sub, rename_bound(sub, fresh)))


# ------------------------------------------------------------ slicing

def phi_slice(f, i: int, with_vars: bool = False, fresh: FreshIds | None = None):
    """Strip the first i exists/forall pairs, freeing their variables.

    With ``with_vars`` returns (formula, freed variables in prefix order).
    """
    if not is_alternating(f):
        raise NotPrenex("phi_slice needs an alternating prenex formula")
    items, matrix = split_prefix(f)
    k = len(items) // 2
    if not 0 <= i <= k:
        raise IndexError(f"slice index {i} out of range 0..{k}")
    if i == 0:
        return (f, []) if with_vars else f
    fresh = fresh or FreshIds.above(f)
    freed = [fresh.var(q.var.name) for q in items[:2 * i]]
    ren = {q.var: v for q, v in zip(items[:2 * i], freed)}
    rest = PrenexShape(tuple(items[2 * i:]), matrix).formula()
    out = subst(rest, ren)
    return (out, freed) if with_vars else out


# ------------------------------------------------------------ herbrand

def herbrandize(f, x: tuple | Var | None = None, sig=None, fresh=None):
    """Herbrand normal form: universals become functions of the prior
    existentials (and of x).

    Returns (formula, list of (symbol name, arity)).
    """
    if any(q.bound is not None for q in split_prefix(f)[0]):
        f = imp_translate(f)
    shape = prenex_shape(f, pad=True, fresh=fresh)
    if x is None:
        xs = tuple(sorted(free_vars(f), key=lambda v: v.id))
    elif isinstance(x, Var):
        xs = (x,)
    else:
        xs = tuple(x)
    used = set(sig.funcs) | set(sig.rels) if sig is not None else set()
    names = []
    ys = []
    ren = {}
    for j in range(1, shape.k + 1):
        ys.append(shape.exists_item(j).var)
        name = f"f{j}"
        while name in used:
            name += "'"
        used.add(name)
        args = xs + tuple(ys)
        names.append((name, len(args)))
        ren[shape.forall_item(j).var] = App(name, args)
    body = subst(shape.matrix, ren)
    for y in reversed(ys):
        body = Quant("exists", y, body)
    return body, names
