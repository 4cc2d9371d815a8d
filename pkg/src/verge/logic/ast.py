"""Typed first-order formula trees and the signatures they live in."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

from ..errors import SortMismatch, UndeclaredSymbol


class SortKind(enum.Enum):
    INT = "Int"
    BOOL = "Bool"
    UNINTERPRETED = "uninterpreted"


@dataclass(frozen=True)
class Sort:
    name: str
    kind: SortKind = SortKind.UNINTERPRETED

    def __str__(self) -> str:
        return self.name


INT = Sort("Int", SortKind.INT)
BOOL = Sort("Bool", SortKind.BOOL)
BUILTIN_SORTS = {"Int": INT, "Bool": BOOL}


def make_sort(name: str) -> Sort:
    return BUILTIN_SORTS.get(name) or Sort(name)


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    """Reference to a declared nullary symbol (constant or entity)."""

    name: str


@dataclass(frozen=True)
class Var:
    """Occurrence of a quantifier-bound variable."""

    name: str


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class App:
    """Application of a declared function with a non-Bool result."""

    func: str
    args: tuple["Term", ...]


ARITH_OPS = ("+", "-", "*")


@dataclass(frozen=True)
class Arith:
    op: str
    args: tuple["Term", ...]

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise ValueError(f"unknown arithmetic operator {self.op!r}")
        if not self.args:
            raise ValueError("arithmetic needs at least one argument")
        if self.op == "*" and sum(1 for a in self.args if not is_ground_numeric(a)) > 1:
            raise ValueError("non-linear multiplication")


Term = Union[Const, Var, IntLit, App, Arith]


def is_ground_numeric(t: Term) -> bool:
    if isinstance(t, IntLit):
        return True
    if isinstance(t, Arith):
        return all(is_ground_numeric(a) for a in t.args)
    return False


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Atom:
    """Predicate application; zero arguments means a Bool constant."""

    pred: str
    args: tuple[Term, ...] = ()


COMPARE_OPS = ("=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Compare:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in COMPARE_OPS:
            raise ValueError(f"unknown relation {self.op!r}")


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty conjunction")


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty disjunction")


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    sort: Sort
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "Formula"


Formula = Union[BoolConst, Atom, Compare, Not, And, Or, Implies, Iff, ForAll, Exists]
TRUE = BoolConst(True)
FALSE = BoolConst(False)


def conj(parts: Sequence[Formula]) -> Formula:
    """Conjunction that collapses the zero- and one-element cases."""
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.lhs, f.rhs)
    if isinstance(f, (ForAll, Exists)):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, (ForAll, Exists)) for g in subformulas(f))


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max((depth(k) for k in kids), default=0)


# -- assertions -------------------------------------------------------------


class Origin(enum.Enum):
    CONTEXT_AXIOM = "context-axiom"
    CLAIM = "claim"
    BRIDGING_AXIOM = "bridging-axiom"
    ABSTRACTION = "abstraction"


@dataclass(frozen=True)
class NamedAssertion:
    label: str
    formula: Formula
    origin: Origin = Origin.CONTEXT_AXIOM
    claim_index: Optional[int] = None


# -- signatures -------------------------------------------------------------


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    args: tuple[Sort, ...]
    result: Sort


@dataclass(frozen=True)
class Signature:
    """Declared vocabulary. Entities are the finite domain of their sort.

    Bool-valued functions live in ``predicates``; nullary predicates are
    stored as constants of sort Bool. Every entity is implicitly a constant.
    """

    sorts: tuple[Sort, ...] = ()
    constants: tuple[tuple[str, Sort], ...] = ()
    functions: tuple[FunctionDecl, ...] = ()
    predicates: tuple[FunctionDecl, ...] = ()
    entities: tuple[tuple[str, Sort], ...] = ()

    def __post_init__(self):
        seen: set[str] = set()
        for s in self.sorts:
            if s.kind is not SortKind.UNINTERPRETED:
                raise ValueError(f"builtin sort {s.name} cannot be redeclared")
            if s.name in seen:
                raise ValueError(f"duplicate sort {s.name}")
            seen.add(s.name)
        names: set[str] = set()
        for name, sort in [*self.entities, *self.constants]:
            self._require_sort(sort)
            if name in names:
                raise ValueError(f"duplicate symbol {name}")
            names.add(name)
        for d in [*self.functions, *self.predicates]:
            for s in (*d.args, d.result):
                self._require_sort(s)
            if d.name in names:
                raise ValueError(f"duplicate symbol {d.name}")
            if not d.args:
                raise ValueError(f"{d.name}: declare nullary symbols as constants")
            names.add(d.name)
        for d in self.functions:
            if d.result == BOOL:
                raise ValueError(f"{d.name}: Bool-valued functions are predicates")
        for d in self.predicates:
            if d.result != BOOL:
                raise ValueError(f"{d.name}: predicates return Bool")

    def _require_sort(self, sort: Sort) -> None:
        if sort.kind is SortKind.UNINTERPRETED and sort not in self.sorts:
            raise UndeclaredSymbol(f"sort {sort.name} is not declared")

    # lookups

    @cached_property
    def _sort_index(self) -> dict[str, Sort]:
        out = dict(BUILTIN_SORTS)
        out.update((s.name, s) for s in self.sorts)
        return out

    @cached_property
    def _const_index(self) -> dict[str, Sort]:
        return dict([*self.entities, *self.constants])

    @cached_property
    def _fun_index(self) -> dict[str, FunctionDecl]:
        return {d.name: d for d in [*self.functions, *self.predicates]}

    def sort(self, name: str) -> Optional[Sort]:
        return self._sort_index.get(name)

    def constant_sort(self, name: str) -> Optional[Sort]:
        return self._const_index.get(name)

    def function(self, name: str) -> Optional[FunctionDecl]:
        return self._fun_index.get(name)

    def has_symbol(self, name: str) -> bool:
        return name in self._const_index or name in self._fun_index

    def entities_of(self, sort: Sort) -> list[str]:
        return [n for n, s in self.entities if s == sort]

    # functional updates

    def with_sort(self, sort: Sort) -> "Signature":
        if sort in self.sorts:
            return self
        return _replace(self, sorts=self.sorts + (sort,))

    def with_constant(self, name: str, sort: Sort) -> "Signature":
        have = self.constant_sort(name)
        if have is not None:
            if have != sort:
                raise SortMismatch(f"{name} is declared as {have}, not {sort}")
            return self
        return _replace(self, constants=self.constants + ((name, sort),))

    def with_function(self, decl: FunctionDecl) -> "Signature":
        have = self.function(decl.name)
        if have is not None:
            if have != decl:
                raise SortMismatch(f"conflicting declarations for {decl.name}")
            return self
        if decl.result == BOOL:
            return _replace(self, predicates=self.predicates + (decl,))
        return _replace(self, functions=self.functions + (decl,))

    def with_entity(self, name: str, sort: Sort) -> "Signature":
        if (name, sort) in self.entities:
            return self
        return _replace(self, entities=self.entities + ((name, sort),))

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; conflicting declarations raise SortMismatch."""
        out = self
        for s in other.sorts:
            out = out.with_sort(s)
        for name, s in other.entities:
            if out.constant_sort(name) not in (None, s):
                raise SortMismatch(f"{name} has two sorts")
            if (name, s) not in out.entities:
                if name in dict(out.constants):
                    raise SortMismatch(f"{name} is a constant in one signature and an entity in the other")
                out = out.with_entity(name, s)
        for name, s in other.constants:
            out = out.with_constant(name, s)
        for d in [*other.functions, *other.predicates]:
            out = out.with_function(d)
        return out

    # serialisation

    def to_json(self) -> dict:
        return {
            "sorts": [s.name for s in self.sorts],
            "entities": [{"name": n, "sort": s.name} for n, s in self.entities],
            "constants": [{"name": n, "sort": s.name} for n, s in self.constants],
            "functions": [
                {"name": d.name, "args": [a.name for a in d.args], "result": d.result.name}
                for d in self.functions
            ],
            "predicates": [{"name": d.name, "args": [a.name for a in d.args]} for d in self.predicates],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Signature":
        sorts = tuple(Sort(str(n)) for n in data.get("sorts", []))
        known = {s.name: s for s in sorts}
        known.update(BUILTIN_SORTS)

        def lookup(name: str) -> Sort:
            try:
                return known[name]
            except KeyError:
                raise UndeclaredSymbol(f"sort {name} is not declared") from None

        return cls(
            sorts=sorts,
            entities=tuple((e["name"], lookup(e["sort"])) for e in data.get("entities", [])),
            constants=tuple((c["name"], lookup(c["sort"])) for c in data.get("constants", [])),
            functions=tuple(
                FunctionDecl(f["name"], tuple(lookup(a) for a in f["args"]), lookup(f["result"]))
                for f in data.get("functions", [])
            ),
            predicates=tuple(
                FunctionDecl(p["name"], tuple(lookup(a) for a in p["args"]), BOOL)
                for p in data.get("predicates", [])
            ),
        )


def _replace(sig: Signature, **changes) -> Signature:
    fields = dict(
        sorts=sig.sorts,
        constants=sig.constants,
        functions=sig.functions,
        predicates=sig.predicates,
        entities=sig.entities,
    )
    fields.update(changes)
    return Signature(**fields)


# -- sort checking ----------------------------------------------------------


def term_sort(t: Term, sig: Signature, env: Optional[dict[str, Sort]] = None) -> Sort:
    env = env or {}
    if isinstance(t, IntLit):
        return INT
    if isinstance(t, Var):
        if t.name not in env:
            raise UndeclaredSymbol(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, Const):
        s = sig.constant_sort(t.name)
        if s is None:
            raise UndeclaredSymbol(f"undeclared constant {t.name}")
        return s
    if isinstance(t, App):
        d = sig.function(t.func)
        if d is None:
            raise UndeclaredSymbol(f"undeclared function {t.func}")
        if d.result == BOOL:
            raise SortMismatch(f"{t.func} is a predicate, used as a term")
        _check_args(t.func, d, t.args, sig, env)
        return d.result
    if isinstance(t, Arith):
        for a in t.args:
            if term_sort(a, sig, env) != INT:
                raise SortMismatch(f"non-integer operand of {t.op}")
        return INT
    raise TypeError(f"not a term: {t!r}")


def _check_args(name, decl: FunctionDecl, args, sig, env) -> None:
    if len(args) != len(decl.args):
        raise SortMismatch(f"{name} expects {len(decl.args)} arguments, got {len(args)}")
    for want, a in zip(decl.args, args):
        got = term_sort(a, sig, env)
        if got != want:
            raise SortMismatch(f"argument of {name} has sort {got}, expected {want}")


def check_sorts(f: Formula, sig: Signature, env: Optional[dict[str, Sort]] = None) -> None:
    """Raise unless ``f`` is well-sorted under ``sig``."""
    env = dict(env or {})
    if isinstance(f, BoolConst):
        return
    if isinstance(f, Atom):
        if not f.args:
            s = sig.constant_sort(f.pred)
            if s is None:
                raise UndeclaredSymbol(f"undeclared constant {f.pred}")
            if s != BOOL:
                raise SortMismatch(f"{f.pred} has sort {s}, used as a formula")
            return
        d = sig.function(f.pred)
        if d is None:
            raise UndeclaredSymbol(f"undeclared predicate {f.pred}")
        if d.result != BOOL:
            raise SortMismatch(f"{f.pred} is not a predicate")
        _check_args(f.pred, d, f.args, sig, env)
        return
    if isinstance(f, Compare):
        l, r = term_sort(f.left, sig, env), term_sort(f.right, sig, env)
        if f.op == "=":
            if l != r:
                raise SortMismatch(f"equality between {l} and {r}")
        elif l != INT or r != INT:
            raise SortMismatch(f"{f.op} needs integer operands")
        return
    if isinstance(f, (ForAll, Exists)):
        if f.sort.kind is SortKind.UNINTERPRETED and f.sort not in sig.sorts:
            raise UndeclaredSymbol(f"sort {f.sort.name} is not declared")
        env[f.var] = f.sort
        check_sorts(f.body, sig, env)
        return
    for c in children(f):
        check_sorts(c, sig, env)


def symbols(f: Formula) -> set[str]:
    """Names of every constant, function and predicate occurring in ``f``."""
    out: set[str] = set()

    def term(t: Term) -> None:
        if isinstance(t, Const):
            out.add(t.name)
        elif isinstance(t, (App, Arith)):
            if isinstance(t, App):
                out.add(t.func)
            for a in t.args:
                term(a)

    for g in subformulas(f):
        if isinstance(g, Atom):
            out.add(g.pred)
            for a in g.args:
                term(a)
        elif isinstance(g, Compare):
            term(g.left)
            term(g.right)
    return out
