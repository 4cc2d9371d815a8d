"""Rendering formulas to SMT-LIB2 and reading them back.

Rendering is canonical: one space between tokens, children in authored
order, so ``render(parse(render(f))) == render(f)`` byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import DuplicateLabel, SmtSyntaxError, SortMismatch, UnknownSymbol
from .ast import (
    BOOL,
    INT,
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
    FunctionDecl,
    Iff,
    Implies,
    IntLit,
    NamedAssertion,
    Not,
    Or,
    Signature,
    Sort,
    Term,
    Var,
    check_sorts,
    conj,
)
from .sexpr import SExpr, SList, Tok, parse_all, quote_symbol

# -- rendering --------------------------------------------------------------


def render_term(t: Term) -> str:
    if isinstance(t, (Const, Var)):
        return quote_symbol(t.name)
    if isinstance(t, IntLit):
        return str(t.value) if t.value >= 0 else f"(- {-t.value})"
    if isinstance(t, App):
        return "(" + " ".join([quote_symbol(t.func), *map(render_term, t.args)]) + ")"
    if isinstance(t, Arith):
        return "(" + " ".join([t.op, *map(render_term, t.args)]) + ")"
    raise TypeError(f"not a term: {t!r}")


def render_formula(f: Formula) -> str:
    if isinstance(f, BoolConst):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        if not f.args:
            return quote_symbol(f.pred)
        return "(" + " ".join([quote_symbol(f.pred), *map(render_term, f.args)]) + ")"
    if isinstance(f, Compare):
        return f"({f.op} {render_term(f.left)} {render_term(f.right)})"
    if isinstance(f, Not):
        return f"(not {render_formula(f.arg)})"
    if isinstance(f, And):
        return "(and " + " ".join(map(render_formula, f.args)) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(map(render_formula, f.args)) + ")"
    if isinstance(f, Implies):
        return f"(=> {render_formula(f.lhs)} {render_formula(f.rhs)})"
    if isinstance(f, Iff):
        return f"(= {render_formula(f.lhs)} {render_formula(f.rhs)})"
    if isinstance(f, (ForAll, Exists)):
        q = "forall" if isinstance(f, ForAll) else "exists"
        return f"({q} (({quote_symbol(f.var)} {quote_symbol(f.sort.name)})) {render_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def render_declarations(sig: Signature) -> list[str]:
    """Declarations plus one unique-names assertion per sort with 2+ entities."""
    lines = [f"(declare-sort {quote_symbol(s.name)} 0)" for s in sig.sorts]
    for name, sort in [*sig.entities, *sig.constants]:
        lines.append(f"(declare-const {quote_symbol(name)} {quote_symbol(sort.name)})")
    for d in [*sig.functions, *sig.predicates]:
        args = " ".join(quote_symbol(a.name) for a in d.args)
        lines.append(f"(declare-fun {quote_symbol(d.name)} ({args}) {quote_symbol(d.result.name)})")
    for s in sig.sorts:
        ents = sig.entities_of(s)
        if len(ents) > 1:
            lines.append("(assert (distinct " + " ".join(map(quote_symbol, ents)) + "))")
    return lines


def render_assertion(a: NamedAssertion) -> str:
    return f"(assert (! {render_formula(a.formula)} :named {quote_symbol(a.label)}))"


def validate_assertions(assertions: Sequence[NamedAssertion], sig: Signature) -> None:
    seen: set[str] = set()
    for a in assertions:
        if a.label in seen:
            raise DuplicateLabel(f"label {a.label} used twice")
        seen.add(a.label)
        check_sorts(a.formula, sig)


def render_smtlib(assertions: Sequence[NamedAssertion], sig: Signature, logic: str = "ALL") -> str:
    """Full script: options, logic, declarations, then one named assert each.

    No ``(check-sat)`` is emitted; the caller decides when to ask.
    """
    validate_assertions(assertions, sig)
    lines = ["(set-option :produce-unsat-cores true)", f"(set-logic {logic})"]
    lines += render_declarations(sig)
    lines += [render_assertion(a) for a in assertions]
    return "\n".join(lines) + "\n"


# -- parsing ----------------------------------------------------------------

_NUMERAL = re.compile(r"-?[0-9]+\Z")
_CONNECTIVES = {"not", "and", "or", "=>", "=", "distinct", "<", "<=", ">", ">=", "forall", "exists", "!", "xor"}
_IGNORED_COMMANDS = {
    "set-logic", "set-option", "set-info", "check-sat", "get-model", "get-value",
    "get-unsat-core", "exit", "push", "pop", "echo", "get-info", "reset",
}


class _Elaborator:
    """Turns S-expressions into typed formulas, growing the signature when lenient."""

    def __init__(self, sig: Signature, lenient: bool):
        self.sig = sig
        self.lenient = lenient

    def _auto_declare(self, tok: Tok, sort: Optional[Sort]) -> None:
        if not self.lenient:
            raise UnknownSymbol(f"unknown symbol {tok} at offset {tok.pos}")
        if sort is None:
            raise UnknownSymbol(f"cannot infer a sort for {tok} at offset {tok.pos}")
        self.sig = self.sig.with_constant(str(tok), sort)

    def guess_sort(self, sx: SExpr, env: dict[str, Sort]) -> Optional[Sort]:
        if isinstance(sx, Tok):
            if sx in ("true", "false"):
                return BOOL
            if _NUMERAL.match(sx):
                return INT
            if sx in env:
                return env[sx]
            return self.sig.constant_sort(sx)
        if not sx:
            return None
        head = sx[0]
        if not isinstance(head, Tok):
            return None
        if head in _CONNECTIVES:
            return BOOL
        if head in ("+", "-", "*"):
            return INT
        d = self.sig.function(head)
        return d.result if d else None

    # formulas

    def formula(self, sx: SExpr, env: dict[str, Sort]) -> Formula:
        if isinstance(sx, Tok):
            return self._formula_atom(sx, env)
        if not sx:
            raise SmtSyntaxError("empty list", sx.pos)
        head = sx[0]
        if not isinstance(head, Tok):
            raise SmtSyntaxError("expected an operator", sx.pos)
        args = sx[1:]
        if head == "not":
            self._arity(sx, 1)
            return Not(self.formula(args[0], env))
        if head in ("and", "or"):
            if not args:
                raise SmtSyntaxError(f"{head} needs arguments", sx.pos)
            parts = tuple(self.formula(a, env) for a in args)
            return And(parts) if head == "and" else Or(parts)
        if head == "=>":
            if len(args) < 2:
                raise SmtSyntaxError("=> needs two or more arguments", sx.pos)
            parts = [self.formula(a, env) for a in args]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = Implies(p, out)
            return out
        if head == "xor":
            self._arity(sx, 2)
            return Not(Iff(self.formula(args[0], env), self.formula(args[1], env)))
        if head in ("=", "distinct"):
            return self._equality(sx, env)
        if head in ("<", "<=", ">", ">="):
            self._arity(sx, 2)
            left, ls = self.term(args[0], env, INT)
            right, rs = self.term(args[1], env, INT)
            return Compare(str(head), left, right)
        if head in ("forall", "exists"):
            return self._quantifier(sx, env)
        if head == "!":
            if len(args) < 1:
                raise SmtSyntaxError("empty annotation", sx.pos)
            return self.formula(args[0], env)
        if head in ("ite", "let"):
            raise SmtSyntaxError(f"unsupported construct {head}", head.pos)
        d = self.sig.function(head)
        if d is None:
            raise UnknownSymbol(f"unknown function {head} at offset {head.pos}")
        if d.result != BOOL:
            raise SortMismatch(f"{head} returns {d.result}, used as a formula")
        return Atom(str(head), self._args(head, d, args, env))

    def _formula_atom(self, tok: Tok, env: dict[str, Sort]) -> Formula:
        if tok == "true" and not tok.quoted:
            return BoolConst(True)
        if tok == "false" and not tok.quoted:
            return BoolConst(False)
        if tok in env:
            raise SortMismatch(f"variable {tok} used as a formula")
        if _NUMERAL.match(tok) and not tok.quoted:
            raise SortMismatch(f"numeral {tok} used as a formula")
        s = self.sig.constant_sort(tok)
        if s is None:
            if self.sig.function(tok) is not None:
                raise SortMismatch(f"{tok} needs arguments")
            self._auto_declare(tok, BOOL)
            s = BOOL
        if s != BOOL:
            raise SortMismatch(f"{tok} has sort {s}, used as a formula")
        return Atom(str(tok))

    def _equality(self, sx: SList, env) -> Formula:
        head, args = sx[0], sx[1:]
        if len(args) < 2:
            raise SmtSyntaxError(f"{head} needs two or more arguments", sx.pos)
        sort = None
        for a in args:
            sort = self.guess_sort(a, env)
            if sort is not None:
                break
        if sort is None:
            raise UnknownSymbol(f"cannot infer operand sorts at offset {sx.pos}")
        if sort == BOOL:
            parts = [self.formula(a, env) for a in args]
            pairs = [Iff(parts[i], parts[i + 1]) for i in range(len(parts) - 1)]
            if head == "distinct":
                if len(parts) != 2:
                    raise SmtSyntaxError("distinct over Bool takes two arguments", sx.pos)
                return Not(pairs[0])
            return conj(pairs)
        terms = [self.term(a, env, sort)[0] for a in args]
        if head == "=":
            return conj([Compare("=", terms[i], terms[i + 1]) for i in range(len(terms) - 1)])
        return conj([
            Not(Compare("=", terms[i], terms[j]))
            for i in range(len(terms)) for j in range(i + 1, len(terms))
        ])

    def _quantifier(self, sx: SList, env) -> Formula:
        self._arity(sx, 2)
        binders, body = sx[1], sx[2]
        if not isinstance(binders, list) or not binders:
            raise SmtSyntaxError("malformed binder list", sx.pos)
        inner = dict(env)
        bound: list[tuple[str, Sort]] = []
        for b in binders:
            if not (isinstance(b, list) and len(b) == 2 and all(isinstance(x, Tok) for x in b)):
                raise SmtSyntaxError("malformed binder", getattr(b, "pos", sx.pos))
            sort = self.sig.sort(b[1])
            if sort is None:
                raise UnknownSymbol(f"unknown sort {b[1]} at offset {b[1].pos}")
            inner[str(b[0])] = sort
            bound.append((str(b[0]), sort))
        out = self.formula(body, inner)
        q = ForAll if sx[0] == "forall" else Exists
        for name, sort in reversed(bound):
            out = q(name, sort, out)
        return out

    # terms

    def term(self, sx: SExpr, env, expected: Optional[Sort]) -> tuple[Term, Sort]:
        t, s = self._term(sx, env, expected)
        if expected is not None and s != expected:
            raise SortMismatch(f"expected {expected}, found {s} at offset {getattr(sx, 'pos', 0)}")
        return t, s

    def _term(self, sx: SExpr, env, expected: Optional[Sort]) -> tuple[Term, Sort]:
        if isinstance(sx, Tok):
            if _NUMERAL.match(sx) and not sx.quoted:
                return IntLit(int(sx)), INT
            if sx in env:
                return Var(str(sx)), env[sx]
            s = self.sig.constant_sort(sx)
            if s is None:
                if self.sig.function(sx) is not None:
                    raise SortMismatch(f"{sx} needs arguments")
                self._auto_declare(sx, expected)
                s = expected
            if s == BOOL:
                raise SortMismatch(f"Bool constant {sx} used as a term")
            return Const(str(sx)), s
        if not sx:
            raise SmtSyntaxError("empty list", sx.pos)
        head, args = sx[0], sx[1:]
        if not isinstance(head, Tok):
            raise SmtSyntaxError("expected an operator", sx.pos)
        if head in ("+", "-", "*"):
            if not args:
                raise SmtSyntaxError(f"{head} needs arguments", sx.pos)
            # "(- 0)" stays an application so that it renders back unchanged
            if (head == "-" and len(args) == 1 and isinstance(args[0], Tok) and _NUMERAL.match(args[0])
                    and int(args[0]) != 0):
                return IntLit(-int(args[0])), INT
            parts = tuple(self.term(a, env, INT)[0] for a in args)
            try:
                return Arith(str(head), parts), INT
            except ValueError as exc:
                raise SortMismatch(str(exc)) from None
        if head in _CONNECTIVES:
            raise SortMismatch(f"formula {head} used as a term")
        d = self.sig.function(head)
        if d is None:
            raise UnknownSymbol(f"unknown function {head} at offset {head.pos}")
        if d.result == BOOL:
            raise SortMismatch(f"predicate {head} used as a term")
        return App(str(head), self._args(head, d, args, env)), d.result

    def _args(self, head, d: FunctionDecl, args, env) -> tuple[Term, ...]:
        if len(args) != len(d.args):
            raise SortMismatch(f"{head} expects {len(d.args)} arguments, got {len(args)}")
        return tuple(self.term(a, env, want)[0] for a, want in zip(args, d.args))

    @staticmethod
    def _arity(sx: SList, n: int) -> None:
        if len(sx) - 1 != n:
            raise SmtSyntaxError(f"{sx[0]} expects {n} argument(s)", sx.pos)


def _unwrap_assert(sx: SExpr) -> tuple[SExpr, Optional[str], dict[str, str]]:
    """Strip ``(assert ...)`` and ``(! ... :named L)``; return body, label, attributes."""
    if isinstance(sx, list) and sx and sx[0] == "assert":
        if len(sx) != 2:
            raise SmtSyntaxError("assert takes one argument", sx.pos)
        sx = sx[1]
    label = None
    attrs: dict[str, str] = {}
    if isinstance(sx, list) and sx and sx[0] == "!":
        rest = sx[2:]
        if len(sx) < 2 or len(rest) % 2:
            raise SmtSyntaxError("malformed annotation", sx.pos)
        for key, val in zip(rest[::2], rest[1::2]):
            if not (isinstance(key, Tok) and key.startswith(":") and isinstance(val, Tok)):
                raise SmtSyntaxError("malformed attribute", sx.pos)
            attrs[key[1:]] = str(val)
        label = attrs.pop("named", None)
        sx = sx[1]
    return sx, label, attrs


def parse_smtlib_formula(text: str, sig: Signature, lenient: bool = False) -> tuple[Formula, Signature]:
    """Parse one assertion body (optionally wrapped in assert/named).

    Returns the formula and the signature, which in lenient mode may have
    grown by auto-declared nullary constants.
    """
    items = parse_all(text)
    if len(items) != 1:
        raise SmtSyntaxError(f"expected one expression, found {len(items)}", 0)
    body, _, _ = _unwrap_assert(items[0])
    el = _Elaborator(sig, lenient)
    return el.formula(body, {}), el.sig


@dataclass
class ScriptAssertion:
    formula: Formula
    label: Optional[str] = None
    attrs: dict[str, str] = field(default_factory=dict)


@dataclass
class Script:
    signature: Signature
    assertions: list[ScriptAssertion]

    def conjunction(self) -> Formula:
        return conj([a.formula for a in self.assertions])


def parse_smtlib_script(text: str, sig: Signature, lenient: bool = False) -> Script:
    """Read declarations and assertions from a whole script.

    Housekeeping commands such as ``set-logic`` or ``check-sat`` are
    skipped. A bare expression at top level counts as an assertion.
    """
    el = _Elaborator(sig, lenient)
    out: list[ScriptAssertion] = []
    for item in parse_all(text):
        head = item[0] if isinstance(item, list) and item and isinstance(item[0], Tok) else None
        if head in _IGNORED_COMMANDS:
            continue
        if head == "declare-sort":
            if len(item) not in (2, 3) or not isinstance(item[1], Tok):
                raise SmtSyntaxError("malformed declare-sort", item.pos)
            if len(item) == 3 and item[2] != "0":
                raise SmtSyntaxError("only nullary sorts are supported", item.pos)
            el.sig = el.sig.with_sort(Sort(str(item[1])))
        elif head == "declare-const":
            if len(item) != 3 or not all(isinstance(x, Tok) for x in item[1:]):
                raise SmtSyntaxError("malformed declare-const", item.pos)
            el.sig = el.sig.with_constant(str(item[1]), _sort(el.sig, item[2]))
        elif head == "declare-fun":
            if len(item) != 4 or not isinstance(item[1], Tok) or not isinstance(item[2], list):
                raise SmtSyntaxError("malformed declare-fun", item.pos)
            result = _sort(el.sig, item[3])
            args = tuple(_sort(el.sig, a) for a in item[2])
            if args:
                el.sig = el.sig.with_function(FunctionDecl(str(item[1]), args, result))
            else:
                el.sig = el.sig.with_constant(str(item[1]), result)
        elif head in ("define-fun", "define-sort", "declare-datatypes", "declare-datatype"):
            raise SmtSyntaxError(f"unsupported command {head}", item.pos)
        else:
            body, label, attrs = _unwrap_assert(item)
            out.append(ScriptAssertion(el.formula(body, {}), label, attrs))
    return Script(el.sig, out)


def _sort(sig: Signature, tok: SExpr) -> Sort:
    if not isinstance(tok, Tok):
        raise SmtSyntaxError("parametric sorts are not supported", getattr(tok, "pos", 0))
    s = sig.sort(tok)
    if s is None:
        raise UnknownSymbol(f"unknown sort {tok} at offset {tok.pos}")
    return s
