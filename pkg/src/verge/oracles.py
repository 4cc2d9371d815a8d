"""Solver-free reference semantics, used to cross-check the solver path.

Propositional formulas are decided by truth tables. Small first-order
formulas over unary/binary predicates are evaluated directly against an
explicit interpretation whose domains are the signature's entity sets.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping

from .errors import NonPropositional, TooManyAtoms
from .logic.ast import (
    BOOL,
    And,
    App,
    Arith,
    Atom,
    BoolConst,
    Compare,
    Const,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    IntLit,
    Not,
    Or,
    Signature,
    Term,
    Var,
    subformulas,
)

MAX_ATOMS = 20


def prop_atoms(f: Formula) -> list[str]:
    """Nullary atoms of ``f`` in first-occurrence order."""
    out: dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            if g.args:
                raise NonPropositional(f"predicate application {g.pred}")
            out.setdefault(g.pred)
        elif isinstance(g, (Compare, ForAll, Exists)):
            raise NonPropositional(type(g).__name__)
    return list(out)


def eval_formula(f: Formula, assignment: Mapping[str, bool]) -> bool:
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, Atom):
        if f.args:
            raise NonPropositional(f"predicate application {f.pred}")
        return assignment[f.pred]
    if isinstance(f, Not):
        return not eval_formula(f.arg, assignment)
    if isinstance(f, And):
        return all(eval_formula(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(eval_formula(a, assignment) for a in f.args)
    if isinstance(f, Implies):
        return (not eval_formula(f.lhs, assignment)) or eval_formula(f.rhs, assignment)
    if isinstance(f, Iff):
        return eval_formula(f.lhs, assignment) == eval_formula(f.rhs, assignment)
    raise NonPropositional(type(f).__name__)


def assignments(atoms: list[str]) -> Iterator[dict[str, bool]]:
    if len(atoms) > MAX_ATOMS:
        raise TooManyAtoms(f"{len(atoms)} atoms exceeds the limit of {MAX_ATOMS}")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        yield dict(zip(atoms, bits))


def oracle_equiv(a: Formula, b: Formula) -> bool:
    """Truth-table equivalence of two propositional formulas."""
    atoms = list(dict.fromkeys(prop_atoms(a) + prop_atoms(b)))
    return all(eval_formula(a, m) == eval_formula(b, m) for m in assignments(atoms))


def oracle_sat(formulas: list[Formula]) -> bool:
    atoms = list(dict.fromkeys(x for f in formulas for x in prop_atoms(f)))
    return any(all(eval_formula(f, m) for f in formulas) for m in assignments(atoms))


# -- finite first-order models ---------------------------------------------


class Interpretation:
    """Entities denote themselves; predicates map to sets of argument tuples."""

    def __init__(self, relations: Mapping[str, frozenset], booleans: Mapping[str, bool] | None = None,
                 ints: Mapping[str, int] | None = None, functions: Mapping[str, Mapping] | None = None):
        self.relations = relations
        self.booleans = booleans or {}
        self.ints = ints or {}
        self.functions = functions or {}


def _eval_term(t: Term, interp: Interpretation, env: dict[str, object]):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return interp.ints.get(t.name, t.name)
    if isinstance(t, IntLit):
        return t.value
    if isinstance(t, App):
        return interp.functions[t.func][tuple(_eval_term(a, interp, env) for a in t.args)]
    if isinstance(t, Arith):
        vals = [_eval_term(a, interp, env) for a in t.args]
        if t.op == "+":
            return sum(vals)
        if t.op == "-":
            return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
        out = 1
        for v in vals:
            out *= v
        return out
    raise TypeError(t)


_REL = {
    "=": lambda a, b: a == b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_first_order(f: Formula, sig: Signature, interp: Interpretation,
                     env: dict[str, object] | None = None) -> bool:
    """Evaluate ``f`` with each quantifier ranging over its sort's entities."""
    env = env or {}
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, Atom):
        if not f.args:
            return interp.booleans[f.pred]
        return tuple(_eval_term(a, interp, env) for a in f.args) in interp.relations[f.pred]
    if isinstance(f, Compare):
        return _REL[f.op](_eval_term(f.left, interp, env), _eval_term(f.right, interp, env))
    if isinstance(f, Not):
        return not eval_first_order(f.arg, sig, interp, env)
    if isinstance(f, And):
        return all(eval_first_order(a, sig, interp, env) for a in f.args)
    if isinstance(f, Or):
        return any(eval_first_order(a, sig, interp, env) for a in f.args)
    if isinstance(f, Implies):
        return (not eval_first_order(f.lhs, sig, interp, env)) or eval_first_order(f.rhs, sig, interp, env)
    if isinstance(f, Iff):
        return eval_first_order(f.lhs, sig, interp, env) == eval_first_order(f.rhs, sig, interp, env)
    if isinstance(f, (ForAll, Exists)):
        test = all if isinstance(f, ForAll) else any
        return test(
            eval_first_order(f.body, sig, interp, {**env, f.var: e})
            for e in sig.entities_of(f.sort)
        )
    raise TypeError(f)


def interpretations(sig: Signature, limit: int = 4096) -> Iterator[Interpretation]:
    """Every interpretation of the signature's predicates and Bool constants.

    Only predicates over entity sorts are supported; the enumeration stops
    with TooManyAtoms when the ground atom count would exceed ``limit``.
    """
    ground: list[tuple[str, tuple]] = []
    for d in sig.predicates:
        domains = [sig.entities_of(s) for s in d.args]
        for args in itertools.product(*domains):
            ground.append((d.name, args))
    bools = [n for n, s in sig.constants if s == BOOL]
    n = len(ground) + len(bools)
    if 2 ** n > limit:
        raise TooManyAtoms(f"{n} ground atoms")
    for bits in itertools.product((False, True), repeat=n):
        rel: dict[str, set] = {d.name: set() for d in sig.predicates}
        for (name, args), bit in zip(ground, bits):
            if bit:
                rel[name].add(args)
        yield Interpretation(
            {k: frozenset(v) for k, v in rel.items()},
            dict(zip(bools, bits[len(ground):])),
        )
