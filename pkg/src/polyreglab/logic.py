"""First-order logic over words.

Formulas talk about positions of a finite word: letter predicates ``a(x)``,
the position order ``x <= y``, equality, boolean connectives and
quantifiers ranging over positions.  ``max``/``min`` are macros that expand
to their quantified definitions before anything semantic happens, so the
core vocabulary stays minimal.

Evaluation compiles a formula into nested closures over one fixed word and
memoizes quantified subformulas on the values of their free variables.
This changes nothing observable; it only makes repeated queries (as done
when evaluating interpretations) cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from . import sexpr
from .words import Word


class LogicError(ValueError):
    pass


# -- abstract syntax ----------------------------------------------------


class Formula:
    """Base class; subclasses are immutable and compared structurally."""

    def render(self) -> str:
        return sexpr.render(to_sexpr(self))

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Letter(Formula):
    letter: str
    var: str


@dataclass(frozen=True)
class Leq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise LogicError("empty conjunction")


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise LogicError("empty disjunction")


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Max(Formula):
    """Macro: max(x) iff every position is <= x."""

    var: str


@dataclass(frozen=True)
class Min(Formula):
    """Macro: min(x) iff x is <= every position."""

    var: str


def conj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def strict_less(a: str, b: str) -> Formula:
    return And((Leq(a, b), Not(Eq(a, b))))


# -- structural helpers --------------------------------------------------


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, Implies):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    return ()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Letter):
        return frozenset((f.var,))
    if isinstance(f, (Leq, Eq)):
        return frozenset((f.left, f.right))
    if isinstance(f, (Max, Min)):
        return frozenset((f.var,))
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for sub in children(f):
        out |= free_vars(sub)
    return out


def all_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Letter):
        return frozenset((f.var,))
    if isinstance(f, (Leq, Eq)):
        return frozenset((f.left, f.right))
    if isinstance(f, (Max, Min)):
        return frozenset((f.var,))
    out: frozenset[str] = frozenset()
    if isinstance(f, (Forall, Exists)):
        out |= {f.var}
    for sub in children(f):
        out |= all_vars(sub)
    return out


def letters_used(f: Formula) -> frozenset[str]:
    if isinstance(f, Letter):
        return frozenset((f.letter,))
    out: frozenset[str] = frozenset()
    for sub in children(f):
        out |= letters_used(sub)
    return out


def quantifier_count(f: Formula) -> int:
    """Number of quantifier nodes; macros count via their expansion."""
    if isinstance(f, (Max, Min)):
        return 1
    own = 1 if isinstance(f, (Forall, Exists)) else 0
    return own + sum(quantifier_count(sub) for sub in children(f))


_FRESH_BASE = "u"


def _fresh_name(base: str, used: set[str]) -> str:
    k = 2
    cand = f"{base}{k}"
    while cand in used:
        k += 1
        cand = f"{base}{k}"
    used.add(cand)
    return cand


def expand_macros(f: Formula) -> Formula:
    """Rewrite Max/Min to their quantified definitions."""
    used = set(all_vars(f))

    def walk(g: Formula) -> Formula:
        if isinstance(g, Max):
            v = _fresh_name(_FRESH_BASE, used)
            return Forall(v, Leq(v, g.var))
        if isinstance(g, Min):
            v = _fresh_name(_FRESH_BASE, used)
            return Forall(v, Leq(g.var, v))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, And):
            return And(tuple(walk(p) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left), walk(g.right))
        if isinstance(g, Forall):
            return Forall(g.var, walk(g.body))
        if isinstance(g, Exists):
            return Exists(g.var, walk(g.body))
        return g

    return walk(f)


def rename_bound(f: Formula, reserved: Iterable[str] = ()) -> Formula:
    """Alpha-rename so every binder introduces a distinct name, also
    distinct from free variables and from ``reserved``.  Binders keep
    their spelling when it is already unique."""
    used = set(free_vars(f)) | set(reserved)

    def walk(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, Letter):
            return Letter(g.letter, env.get(g.var, g.var))
        if isinstance(g, Leq):
            return Leq(env.get(g.left, g.left), env.get(g.right, g.right))
        if isinstance(g, Eq):
            return Eq(env.get(g.left, g.left), env.get(g.right, g.right))
        if isinstance(g, (Max, Min)):
            return type(g)(env.get(g.var, g.var))
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        if isinstance(g, And):
            return And(tuple(walk(p, env) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p, env) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left, env), walk(g.right, env))
        if isinstance(g, (Forall, Exists)):
            name = g.var
            if name in used:
                name = _fresh_name(g.var, used)
            else:
                used.add(name)
            inner = dict(env)
            inner[g.var] = name
            return type(g)(name, walk(g.body, inner))
        raise LogicError(f"unknown formula node {g!r}")

    return walk(f, {})


def substitute(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Capture-avoiding renaming of free variables."""

    def walk(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, Letter):
            return Letter(g.letter, env.get(g.var, g.var))
        if isinstance(g, Leq):
            return Leq(env.get(g.left, g.left), env.get(g.right, g.right))
        if isinstance(g, Eq):
            return Eq(env.get(g.left, g.left), env.get(g.right, g.right))
        if isinstance(g, (Max, Min)):
            return type(g)(env.get(g.var, g.var))
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        if isinstance(g, And):
            return And(tuple(walk(p, env) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p, env) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left, env), walk(g.right, env))
        if isinstance(g, (Forall, Exists)):
            inner = {k: v for k, v in env.items() if k != g.var}
            if g.var in inner.values():
                used = set(all_vars(g)) | set(inner.values()) | set(inner)
                fresh = _fresh_name(g.var, used)
                body = walk(g.body, {g.var: fresh})
                return type(g)(fresh, walk(body, inner))
            return type(g)(g.var, walk(g.body, inner))
        raise LogicError(f"unknown formula node {g!r}")

    return walk(f, dict(mapping))


# -- text form -----------------------------------------------------------


def to_sexpr(f: Formula):
    if isinstance(f, Letter):
        return ["letter", f.letter, f.var]
    if isinstance(f, Leq):
        return ["leq", f.left, f.right]
    if isinstance(f, Eq):
        return ["eq", f.left, f.right]
    if isinstance(f, Not):
        return ["not", to_sexpr(f.body)]
    if isinstance(f, And):
        return ["and"] + [to_sexpr(p) for p in f.parts]
    if isinstance(f, Or):
        return ["or"] + [to_sexpr(p) for p in f.parts]
    if isinstance(f, Implies):
        return ["implies", to_sexpr(f.left), to_sexpr(f.right)]
    if isinstance(f, Forall):
        return ["forall", f.var, to_sexpr(f.body)]
    if isinstance(f, Exists):
        return ["exists", f.var, to_sexpr(f.body)]
    if isinstance(f, Max):
        return ["max", f.var]
    if isinstance(f, Min):
        return ["min", f.var]
    raise LogicError(f"unknown formula node {f!r}")


def from_sexpr(expr) -> Formula:
    if isinstance(expr, str):
        raise LogicError(f"expected a formula, got atom {expr!r}")
    if not expr:
        raise LogicError("empty expression")
    head = expr[0]
    if not isinstance(head, str):
        raise LogicError(f"bad formula head {head!r}")
    args = expr[1:]

    def arity(k: int) -> None:
        if len(args) != k:
            raise LogicError(f"({head} ...) takes {k} arguments, got {len(args)}")

    def atom(x) -> str:
        if not isinstance(x, str):
            raise LogicError(f"expected a name inside ({head} ...), got {sexpr.render(x)}")
        return str(x)

    if head == "letter":
        arity(2)
        return Letter(atom(args[0]), atom(args[1]))
    if head == "leq":
        arity(2)
        return Leq(atom(args[0]), atom(args[1]))
    if head == "eq":
        arity(2)
        return Eq(atom(args[0]), atom(args[1]))
    if head == "not":
        arity(1)
        return Not(from_sexpr(args[0]))
    if head == "and":
        return And(tuple(from_sexpr(a) for a in args))
    if head == "or":
        return Or(tuple(from_sexpr(a) for a in args))
    if head == "implies":
        arity(2)
        return Implies(from_sexpr(args[0]), from_sexpr(args[1]))
    if head == "forall":
        arity(2)
        return Forall(atom(args[0]), from_sexpr(args[1]))
    if head == "exists":
        arity(2)
        return Exists(atom(args[0]), from_sexpr(args[1]))
    if head == "max":
        arity(1)
        return Max(atom(args[0]))
    if head == "min":
        arity(1)
        return Min(atom(args[0]))
    raise LogicError(f"unknown formula head {head!r}")


def parse_formula(text: str) -> Formula:
    return from_sexpr(sexpr.parse_one(text))


# -- evaluation ----------------------------------------------------------


class FormulaEvaluator:
    """Compiled evaluator for one formula over one fixed word.

    Build once, query many times.  Not safe to share across threads (each
    instance owns a scratch environment); the formula itself is.
    """

    def __init__(self, word: Word, formula: Formula, var_order: tuple[str, ...] | None = None):
        core = rename_bound(expand_macros(formula))
        self.word = word
        self.formula = formula
        self.free = tuple(var_order) if var_order is not None else tuple(sorted(free_vars(core)))
        if var_order is not None and not free_vars(core) <= set(var_order):
            missing = sorted(free_vars(core) - set(var_order))
            raise LogicError(f"var_order misses free variables {missing}")
        self._n = len(word)
        self._slots: dict[str, int] = {v: i for i, v in enumerate(self.free)}
        for v in sorted(all_vars(core) - set(self.free)):
            self._slots[v] = len(self._slots)
        self._letter_tables: dict[str, list[bool]] = {}
        self._frees_by_node: dict[int, frozenset[str]] = {}
        self._collect_frees(core)
        self._root = self._compile(core)
        self._env = [0] * max(1, len(self._slots))

    def _letter_table(self, letter: str) -> list[bool]:
        table = self._letter_tables.get(letter)
        if table is None:
            table = [False] * (self._n + 1)
            for i, tok in enumerate(self.word.tokens):
                if tok == letter:
                    table[i + 1] = True
            self._letter_tables[letter] = table
        return table

    def _collect_frees(self, f: Formula) -> frozenset[str]:
        if isinstance(f, Letter):
            fv = frozenset((f.var,))
        elif isinstance(f, (Leq, Eq)):
            fv = frozenset((f.left, f.right))
        elif isinstance(f, (Forall, Exists)):
            fv = self._collect_frees(f.body) - {f.var}
        else:
            fv = frozenset()
            for sub in children(f):
                fv |= self._collect_frees(sub)
        self._frees_by_node[id(f)] = fv
        return fv

    def _compile(self, f: Formula) -> Callable[[list[int]], bool]:
        n = self._n
        if isinstance(f, Letter):
            table = self._letter_table(f.letter)
            s = self._slots[f.var]
            return lambda env: table[env[s]]
        if isinstance(f, Leq):
            s1, s2 = self._slots[f.left], self._slots[f.right]
            return lambda env: env[s1] <= env[s2]
        if isinstance(f, Eq):
            s1, s2 = self._slots[f.left], self._slots[f.right]
            return lambda env: env[s1] == env[s2]
        if isinstance(f, Not):
            body = self._compile(f.body)
            return lambda env: not body(env)
        if isinstance(f, And):
            parts = tuple(self._compile(p) for p in f.parts)

            def run_and(env: list[int]) -> bool:
                for p in parts:
                    if not p(env):
                        return False
                return True

            return run_and
        if isinstance(f, Or):
            parts = tuple(self._compile(p) for p in f.parts)

            def run_or(env: list[int]) -> bool:
                for p in parts:
                    if p(env):
                        return True
                return False

            return run_or
        if isinstance(f, Implies):
            left = self._compile(f.left)
            right = self._compile(f.right)
            return lambda env: (not left(env)) or right(env)
        if isinstance(f, (Forall, Exists)):
            body = self._compile(f.body)
            slot = self._slots[f.var]
            key_slots = tuple(sorted(self._slots[v] for v in self._frees_by_node[id(f)]))
            want = isinstance(f, Exists)
            cache: dict[tuple[int, ...], bool] = {}

            def run_quant(env: list[int]) -> bool:
                key = tuple(env[s] for s in key_slots)
                hit = cache.get(key)
                if hit is not None:
                    return hit
                result = not want
                for i in range(1, n + 1):
                    env[slot] = i
                    if body(env) == want:
                        result = want
                        break
                cache[key] = result
                return result

            return run_quant
        raise LogicError(f"unknown formula node {f!r}")

    def at(self, values: tuple[int, ...]) -> bool:
        """Evaluate with free variables bound positionally (see ``free``).
        No range validation; callers supply positions of the word."""
        env = self._env
        for i, v in enumerate(values):
            env[i] = v
        return self._root(env)

    def evaluate(self, env: Mapping[str, int]) -> bool:
        missing = [v for v in self.free if v not in env]
        if missing:
            raise LogicError(f"unbound free variables {missing}")
        values = []
        for v in self.free:
            pos = env[v]
            if not isinstance(pos, int) or not 1 <= pos <= self._n:
                raise LogicError(f"{v} = {pos!r} is not a position of a length-{self._n} word")
            values.append(pos)
        return self.at(tuple(values))


def eval_formula(word: Word, formula: Formula, env: Mapping[str, int] | None = None) -> bool:
    """Tarskian truth of ``formula`` on ``word`` under ``env``."""
    return FormulaEvaluator(word, formula).evaluate(env or {})


# -- relativization ------------------------------------------------------


def relativize(formula: Formula, guard: str) -> Formula:
    """Restrict all quantifiers to positions not carrying ``guard``.

    The guard letter must not occur as a letter predicate of the formula;
    macros are expanded first so their hidden quantifiers are guarded too.
    """
    core = expand_macros(formula)
    if guard in letters_used(core):
        raise LogicError(f"formula already talks about the guard letter {guard!r}")

    def walk(g: Formula) -> Formula:
        if isinstance(g, Forall):
            return Forall(g.var, Implies(Not(Letter(guard, g.var)), walk(g.body)))
        if isinstance(g, Exists):
            return Exists(g.var, And((Not(Letter(guard, g.var)), walk(g.body))))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, And):
            return And(tuple(walk(p) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left), walk(g.right))
        return g

    return walk(core)


# -- sort analysis -------------------------------------------------------
#
# A two-dimensional interpretation is "sortable" when, after making binder
# names unique, the variables of each formula can be split into two sorts
# such that comparisons (leq/eq) never mix sorts, with the convention that
# first components x1/y1 live in sort 1 and second components x2/y2 in
# sort 2.  The check is a union-find closure over comparison atoms.


@dataclass(frozen=True)
class SortWitness:
    formula_key: str
    atom: Formula

    def render(self) -> str:
        return f"{self.formula_key}: {self.atom.render()} merges sort 1 with sort 2"


@dataclass(frozen=True)
class SortReport:
    ok: bool
    sorts: dict[str, dict[str, int]]
    witness: SortWitness | None = None

    def render(self) -> str:
        if not self.ok:
            assert self.witness is not None
            return "not sortable\n  " + self.witness.render()
        lines = ["sortable"]
        for key in sorted(self.sorts):
            assignment = self.sorts[key]
            inner = " ".join(f"{v}:{assignment[v]}" for v in sorted(assignment))
            lines.append(f"  {key}: {inner}")
        return "\n".join(lines)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[object, object] = {}

    def find(self, x: object) -> object:
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: object, b: object) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


_ANCHOR1 = ("sort-anchor", 1)
_ANCHOR2 = ("sort-anchor", 2)


def _comparison_atoms(f: Formula) -> list[Formula]:
    if isinstance(f, (Leq, Eq)):
        return [f]
    out: list[Formula] = []
    for sub in children(f):
        out.extend(_comparison_atoms(sub))
    return out


def _sort_one(key: str, formula: Formula, seeds: Mapping[str, int]):
    core = rename_bound(expand_macros(formula))
    uf = _UnionFind()
    for var, sort in seeds.items():
        uf.union(var, _ANCHOR1 if sort == 1 else _ANCHOR2)
    for atom in _comparison_atoms(core):
        left = atom.left  # type: ignore[attr-defined]
        right = atom.right  # type: ignore[attr-defined]
        uf.union(left, right)
        if uf.find(_ANCHOR1) == uf.find(_ANCHOR2):
            return None, SortWitness(key, atom)
    assignment: dict[str, int] = {}
    root2 = uf.find(_ANCHOR2)
    for var in sorted(all_vars(core)):
        assignment[var] = 2 if uf.find(var) == root2 else 1
    return assignment, None


def check_sortable(interp) -> SortReport:
    """Sort analysis of a dimension-2 interpretation (duck-typed: anything
    with ``dim``, ``letter_formulas`` and ``order_formula``)."""
    if interp.dim != 2:
        raise LogicError(f"sort analysis needs dimension 2, got {interp.dim}")
    sorts: dict[str, dict[str, int]] = {}
    for letter in sorted(interp.letter_formulas):
        assignment, witness = _sort_one(
            f"letter {letter}", interp.letter_formulas[letter], {"x1": 1, "x2": 2}
        )
        if witness is not None:
            return SortReport(False, {}, witness)
        sorts[f"letter {letter}"] = assignment or {}
    assignment, witness = _sort_one(
        "order", interp.order_formula, {"x1": 1, "y1": 1, "x2": 2, "y2": 2}
    )
    if witness is not None:
        return SortReport(False, {}, witness)
    sorts["order"] = assignment or {}
    return SortReport(True, sorts)
