"""Built-in examples: the prime-interval game, the two-witness proof, the
drinker formula, a proof with an unlimited R∀, a two-branch L→ proof, and a
generated family of proofs found by search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .calculus import Builder, NotFound, ProofNode, Sequent, proof_search
from .games import make_lstrategy
from .semantics import Board, make_structure
from .sexpr import Reader, Signature, read_one
from .syntax import Var, free_vars
from .transforms import desugar_to_imp, main_var


@dataclass(frozen=True)
class ProofCase:
    name: str
    sig: Signature
    axioms: tuple
    phi: object
    proof: ProofNode

    @property
    def x(self) -> Var:
        return main_var(self.phi)


def _reader(sig):
    return Reader(sig)


def _f(rd, text):
    return rd.formula(read_one(text))


def _t(rd, text):
    return rd.term(read_one(text))


# ------------------------------------------------ prime interval game

FIG1_SIG = Signature({"dbl": 1, "pred": 1, "four": 0, "five": 0}, {"ndiv": 2})
FIG1_FORMULA = ("(exists (<= y (dbl x)) (forall (<= z (pred y)) "
                "(and (leq x y) (or (= z 1) (ndiv z y)))))")
FIG1_DOMAIN = 13


def fig1():
    """(signature, formula, board, strategy <4, root; 5, root>, falsifier script)."""
    rd = _reader(FIG1_SIG)
    f = _f(rd, FIG1_FORMULA)
    s = make_structure(
        FIG1_DOMAIN,
        {"dbl": lambda a: min(2 * a, FIG1_DOMAIN - 1), "pred": lambda a: max(a - 1, 0),
         "four": lambda: 4, "five": lambda: 5},
        {"ndiv": lambda z, y: not (z != 0 and y % z == 0)},
        FIG1_SIG)
    x = main_var(f)
    st = make_lstrategy(x, [(_t(rd, "(four)"), 1), (_t(rd, "(five)"), 1)])
    return FIG1_SIG, f, Board(s, 3), st, [2, 3]


# ------------------------------------------------ two-witness proof

FIG2_SIG = Signature({"f": 1, "g": 2}, {"P": 2, "Q": 2})
FIG2_AXIOM = "(forall x (forall z (imp (Q (f x) z) (P x (g x z)))))"
FIG2_PHI = "(exists y (forall z (imp (Q y z) (P x y))))"


def fig2() -> ProofCase:
    """The canonical proof with two R∃∀ steps, built rule by rule."""
    rd = Reader(FIG2_SIG, "x?1 z?2 z?3")
    x, z1, z2 = Var("x", 1), Var("z", 2), Var("z", 3)
    rd.names["x"] = x
    ax = _f(rd, "(forall u (forall v (imp (Q (f u) v) (P u (g u v)))))")
    phi = _f(rd, "(exists y (forall w (imp (Q y w) (P x?1 y))))")
    fx = _t(rd, "(f x?1)")
    gxz = _t(rd, "(g x?1 z?2)")
    b = Builder(start_occ=10)
    root = Sequent.of([ax], [phi])
    a1, (s1,) = b.step(root, "Rexall", phi, fx, z1)
    imp1 = _f(rd, "(imp (Q (f x?1) z?2) (P x?1 (f x?1)))")
    a2, (s2,) = b.step(s1, "Rimpc", imp1)
    a3, (s3,) = b.step(s2, "Lall", ax, x)
    a4, (s4,) = b.step(s3, "Lall", _f(rd, "(forall v (imp (Q (f x?1) v) (P x?1 (g x?1 v))))"), z1)
    a5, (left, right) = b.step(s4, "Limp", _f(rd, "(imp (Q (f x?1) z?2) (P x?1 (g x?1 z?2)))"))
    leaf_l = b.ax(left, _f(rd, "(Q (f x?1) z?2)"))
    a6, (s6,) = b.step(right, "Rexall", phi, gxz, z2)
    a7, (s7,) = b.step(s6, "Rimpc", _f(rd, "(imp (Q (g x?1 z?2) z?3) (P x?1 (g x?1 z?2)))"))
    leaf_r = b.ax(s7, _f(rd, "(P x?1 (g x?1 z?2))"))
    n6 = ProofNode(s6, a7, (leaf_r,))
    n_right = ProofNode(right, a6, (n6,))
    n4 = ProofNode(s4, a5, (leaf_l, n_right))
    n3 = ProofNode(s3, a4, (n4,))
    n2 = ProofNode(s2, a3, (n3,))
    n1 = ProofNode(s1, a2, (n2,))
    proof = ProofNode(root, a1, (n1,))
    return ProofCase("fig2", FIG2_SIG, (ax,), phi, proof)


def fig2_unlimited() -> ProofCase:
    """Same end-sequent; the first universal step is separated from its
    existential step by an L∀, so it is unlimited."""
    rd = Reader(FIG2_SIG, "x?1 z?2 z?3")
    x, z1, z2 = Var("x", 1), Var("z", 2), Var("z", 3)
    ax = _f(rd, "(forall u (forall v (imp (Q (f u) v) (P u (g u v)))))")
    phi = _f(rd, "(exists y (forall w (imp (Q y w) (P x?1 y))))")
    b = Builder(start_occ=10)
    root = Sequent.of([ax], [phi])
    a1, (s1,) = b.step(root, "Rex", phi, _t(rd, "(f x?1)"))
    a2, (s2,) = b.step(s1, "Lall", ax, x)
    a3, (s3,) = b.step(s2, "Rall", _f(rd, "(forall w (imp (Q (f x?1) w) (P x?1 (f x?1))))"), fresh=z1)
    a4, (s4,) = b.step(s3, "Rimp", _f(rd, "(imp (Q (f x?1) z?2) (P x?1 (f x?1)))"))
    a5, (s5,) = b.step(s4, "Lall", _f(rd, "(forall v (imp (Q (f x?1) v) (P x?1 (g x?1 v))))"), z1)
    a6, (left, right) = b.step(s5, "Limp", _f(rd, "(imp (Q (f x?1) z?2) (P x?1 (g x?1 z?2)))"))
    leaf_l = b.ax(left)
    a7, (r1,) = b.step(right, "Rex", phi, _t(rd, "(g x?1 z?2)"))
    a8, (r2,) = b.step(r1, "Rall", _f(rd, "(forall w (imp (Q (g x?1 z?2) w) (P x?1 (g x?1 z?2))))"),
                       fresh=z2)
    a9, (r3,) = b.step(r2, "Rimpc", _f(rd, "(imp (Q (g x?1 z?2) z?3) (P x?1 (g x?1 z?2)))"))
    leaf_r = b.ax(r3, _f(rd, "(P x?1 (g x?1 z?2))"))
    right_n = ProofNode(right, a7, (ProofNode(r1, a8, (ProofNode(r2, a9, (leaf_r,)),)),))
    n5 = ProofNode(s5, a6, (leaf_l, right_n))
    proof = ProofNode(root, a1, (ProofNode(s1, a2, (ProofNode(s2, a3, (ProofNode(
        s3, a4, (ProofNode(s4, a5, (n5,)),)),)),)),))
    return ProofCase("fig2-unlimited", FIG2_SIG, (ax,), phi, proof)


# ---------------------------------------------------------- drinker

DRINKER_SIG = Signature({}, {"P": 1})
DRINKER_NNF = "(exists y (forall z (or (not (P y)) (P z))))"


def drinker_nnf():
    rd = _reader(DRINKER_SIG)
    return _f(rd, DRINKER_NNF)


@lru_cache(maxsize=None)
def drinker() -> ProofCase:
    """The drinker formula over → with a proof found by search."""
    phi = desugar_to_imp(drinker_nnf())
    proof = proof_search(Sequent.of([], [phi]), 12, (), DRINKER_SIG)
    return ProofCase("drinker", DRINKER_SIG, (), phi, proof)


# ------------------------------------------------------ two branches

BRANCH_SIG = Signature({"f": 1, "g": 1}, {"P": 1, "Q": 2})


def branching() -> ProofCase:
    """Γ says P(f(u)) or P(g(u)); each L→ branch needs its own R∃∀."""
    rd = Reader(BRANCH_SIG, "z?2 z?3")
    z1, z2 = Var("z", 2), Var("z", 3)
    ax = _f(rd, "(forall u (imp (imp (P (f u)) (bot)) (P (g u))))")
    phi = _f(rd, "(exists y (forall w (imp (Q y w) (P y))))")
    b = Builder(start_occ=10)
    root = Sequent.of([ax], [phi])
    a1, (s1,) = b.step(root, "Lall", ax, _t(rd, "0"))
    a2, (left, right) = b.step(s1, "Limp", _f(rd, "(imp (imp (P (f 0)) (bot)) (P (g 0)))"))
    a3, (l1,) = b.step(left, "Rimpc", _f(rd, "(imp (P (f 0)) (bot))"))
    a4, (l2,) = b.step(l1, "Rexall", phi, _t(rd, "(f 0)"), z1)
    a5, (l3,) = b.step(l2, "Rimpc", _f(rd, "(imp (Q (f 0) z?2) (P (f 0)))"))
    leaf_l = b.ax(l3, _f(rd, "(P (f 0))"))
    a6, (r1,) = b.step(right, "Rexall", phi, _t(rd, "(g 0)"), z2)
    a7, (r2,) = b.step(r1, "Rimpc", _f(rd, "(imp (Q (g 0) z?3) (P (g 0)))"))
    leaf_r = b.ax(r2, _f(rd, "(P (g 0))"))
    ln = ProofNode(left, a3, (ProofNode(l1, a4, (ProofNode(l2, a5, (leaf_l,)),)),))
    rn = ProofNode(right, a6, (ProofNode(r1, a7, (leaf_r,)),))
    proof = ProofNode(root, a1, (ProofNode(s1, a2, (ln, rn)),))
    return ProofCase("branching", BRANCH_SIG, (ax,), phi, proof)


# ------------------------------------------------- generated family

# (name, signature, axioms, goal formula); each is searched at depth 12.
_TEMPLATES = [
    ("drinker-dual", ({}, {"P": 1}), [], "(exists y (forall z (imp (P z) (P y))))"),
    ("drinker-rel", ({}, {"R": 2}), [], "(exists y (forall z (imp (R x y) (R x z))))"),
    ("witness-h", ({"h": 1}, {"P": 1, "Q": 2}), ["(forall u (P (h u)))"],
     "(exists y (forall z (imp (Q y z) (P y))))"),
    ("witness-hh", ({"h": 1}, {"P": 1, "Q": 2}), ["(forall u (P (h (h u))))"],
     "(exists y (forall z (imp (Q y z) (P y))))"),
    ("witness-x", ({}, {"P": 2}), ["(forall u (P u u))"],
     "(exists y (forall z (imp (P z z) (P x y))))"),
    ("two-level", ({"f": 1}, {"R": 2}), ["(forall u (R u (f u)))"],
     "(exists y (forall z (exists v (forall w (imp (R y z) (R z v))))))"),
    ("two-level-x", ({"f": 1}, {"R": 2}), ["(forall u (R u (f u)))"],
     "(exists y (forall z (exists v (forall w (R x (f x))))))"),
    ("fig2-f", ({"f": 1, "g": 2}, {"P": 2, "Q": 2}),
     ["(forall u (forall v (imp (Q (f u) v) (P u (g u v)))))"],
     "(exists y (forall z (imp (Q y z) (P x y))))"),
    ("fig2-h", ({"h": 1, "k": 2}, {"P": 2, "Q": 2}),
     ["(forall u (forall v (imp (Q (h u) v) (P u (k u v)))))"],
     "(exists y (forall z (imp (Q y z) (P x y))))"),
    ("fig2-unary", ({"f": 1, "g": 1}, {"P": 2, "Q": 2}),
     ["(forall u (forall v (imp (Q (f u) v) (P u (g v)))))"],
     "(exists y (forall z (imp (Q y z) (P x y))))"),
    ("or-branch", ({"f": 1, "g": 1}, {"P": 1, "Q": 2}),
     ["(forall u (imp (imp (P (f u)) (bot)) (P (g u))))"],
     "(exists y (forall z (imp (Q y z) (P y))))"),
    ("or-branch-2", ({"f": 1, "g": 1}, {"P": 1}),
     ["(forall u (imp (imp (P (f u)) (bot)) (P (g u))))"],
     "(exists y (forall z (imp (imp (P y) (bot)) (P z))))"),
    ("chain", ({"s": 1}, {"L": 2}), ["(forall u (L u (s u)))"],
     "(exists y (forall z (L x y)))"),
    ("chain-2", ({"s": 1}, {"L": 2}),
     ["(forall u (L u (s u)))", "(forall u (forall v (imp (L u v) (L u (s v)))))"],
     "(exists y (forall z (L x y)))"),
    ("trans", ({"s": 1}, {"L": 2}),
     ["(forall u (L u (s u)))", "(forall u (forall v (forall w (imp (L u v) (imp (L v w) (L u w))))))"],
     "(exists y (forall z (L x y)))"),
    ("counter", ({}, {"P": 1, "Q": 1}), ["(forall u (imp (P u) (Q u)))"],
     "(exists y (forall z (imp (P y) (Q y))))"),
    ("counter-2", ({}, {"P": 1, "Q": 1}), ["(forall u (imp (P u) (Q u)))"],
     "(exists y (forall z (imp (P z) (Q z))))"),
    ("bot-left", ({}, {"P": 1}), ["(forall u (imp (P u) (bot)))"],
     "(exists y (forall z (imp (P y) (P z))))"),
    ("const", ({"c": 0}, {"P": 1, "Q": 2}), ["(P (c))"],
     "(exists y (forall z (imp (Q z y) (P y))))"),
    ("pair", ({"f": 1}, {"R": 2}), ["(forall u (R u (f u)))", "(forall u (R (f u) u))"],
     "(exists y (forall z (imp (R z y) (R y x))))"),
    ("two-level-2", ({}, {"P": 1}), [],
     "(exists y (forall z (exists v (forall w (imp (P y) (imp (P z) (P v)))))))"),
    ("two-level-3", ({"f": 1}, {"R": 2}), ["(forall u (R u (f u)))"],
     "(exists y (forall z (exists v (forall w (R z v)))))"),
    ("two-branch-x", ({"f": 1}, {"P": 1, "Q": 1}),
     ["(forall u (imp (imp (P u) (bot)) (Q u)))"],
     "(exists y (forall z (imp (imp (P x) (bot)) (Q y))))"),
    ("nested-imp", ({}, {"P": 1, "Q": 1}), ["(forall u (imp (P u) (imp (Q u) (bot))))"],
     "(exists y (forall z (imp (P y) (imp (Q y) (P z)))))"),
]


def template_names() -> list:
    return [t[0] for t in _TEMPLATES]


def build_case(name: str, depth: int = 12) -> ProofCase:
    for nm, (funcs, rels), axioms, goal in _TEMPLATES:
        if nm == name:
            sig = Signature(dict(funcs), dict(rels))
            rd = Reader(sig)
            x = rd._named("x")
            axs = tuple(_f(rd, a) for a in axioms)
            phi = _f(rd, goal)
            if free_vars(phi) - {x}:
                raise ValueError(f"{name}: goal has free variables besides x")
            proof = proof_search(Sequent.of(list(axs), [phi]), depth, (), sig)
            return ProofCase(name, sig, axs, phi, proof)
    raise KeyError(name)


@lru_cache(maxsize=None)
def generated() -> tuple:
    """Every template whose goal the search proves (all of them, by test)."""
    out = []
    for name in template_names():
        try:
            out.append(build_case(name))
        except NotFound:
            continue
    return tuple(out)


def all_cases() -> tuple:
    return (fig2(), fig2_unlimited(), branching(), drinker()) + generated()


CORPUS_NAMES = ("fig1", "fig2", "fig2-unlimited", "branching", "drinker", "generated")


# ------------------------------------------------------------- writing

def _formula_file(sig, f) -> str:
    from .sexpr import print_formula_file
    return print_formula_file(sig, f)


def _proof_files(case: ProofCase, out: Path, stem: str) -> list:
    from .calculus import print_proof
    p = out / f"{stem}.proof"
    p.write_text(print_proof(case.proof, case.sig))
    f = out / f"{stem}.formula"
    f.write_text(_formula_file(case.sig, case.phi))
    return [p, f]


def _sample_boards(case: ProofCase, out: Path, models: int = 4) -> list:
    """A few boards satisfying the axioms plus one that violates them."""
    from .semantics import check_universal_axioms, enumerate_structures, write_structure
    bdir = out / "boards"
    bdir.mkdir(exist_ok=True)
    files = []
    for i, s in enumerate(itertools.islice(enumerate_structures(case.sig, 2, case.axioms), models)):
        fp = bdir / f"model{i}.board"
        fp.write_text(write_structure(s, i % 2))
        files.append(fp)
    for s in enumerate_structures(case.sig, 2):
        if not check_universal_axioms(s, case.axioms):
            fp = bdir / "violates-axioms.board"
            fp.write_text("# does not satisfy the axioms\n" + write_structure(s, 0))
            files.append(fp)
            break
    return files


def drinker_witness():
    """(expansion, quantifier tree, witnesses) for the drinker formula,
    checked valid on every structure with at most three elements."""
    from .extract import find_witnesses
    from .transforms import strong_or_expand
    f_exp = strong_or_expand(drinker_nnf())
    found = find_witnesses(f_exp, DRINKER_SIG, max_d=3)
    assert found is not None
    return f_exp, found[0], found[1]


def write_corpus(name: str, out: Path) -> list:
    """Write the named example under `out`; returns the files written, in order."""
    from .games import print_strategy
    from .semantics import write_structure
    from .sexpr import print_formula, print_term
    out = Path(out)
    if name == "fig1":
        sig, f, board, strat, script = fig1()
        files = [out / "fig1.formula", out / "fig1.board", out / "fig1.strategy",
                 out / "fig1.script"]
        files[0].write_text(_formula_file(sig, f))
        files[1].write_text(write_structure(board.structure, board.n0))
        files[2].write_text(print_strategy(strat))
        files[3].write_text(" ".join(map(str, script)) + "\n")
        return files
    if name == "fig2":
        case = fig2()
        return _proof_files(case, out, "fig2") + _sample_boards(case, out)
    if name == "fig2-unlimited":
        return _proof_files(fig2_unlimited(), out, "fig2-unlimited")
    if name == "branching":
        return _proof_files(branching(), out, "branching")
    if name == "drinker":
        files = _proof_files(drinker(), out, "drinker")
        nnf = out / "drinker-nnf.formula"
        nnf.write_text(_formula_file(DRINKER_SIG, drinker_nnf()))
        f_exp, qt, ws = drinker_witness()
        wit = out / "drinker.witness"
        wit.write_text(f"(witness\n  (expansion {print_formula(f_exp)})\n"
                       f"  (parents {' '.join(map(str, qt.parents))})\n"
                       f"  (terms {' '.join(print_term(t) for t in ws)}))\n")
        return files + [nnf, wit]
    if name == "generated":
        gdir = out / "generated"
        gdir.mkdir(exist_ok=True)
        files = []
        for case in generated():
            files += _proof_files(case, gdir, case.name)
        return files
    raise KeyError(name)
