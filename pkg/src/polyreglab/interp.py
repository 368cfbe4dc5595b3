"""First-order interpretations of words in words.

An interpretation of dimension d sends a word u to the word whose letters
are the d-tuples of positions of u on which some output-letter formula
holds, arranged by the order formula.  If the letter formulas overlap on a
tuple, or the order formula fails to order the selected tuples linearly,
the result is the empty word and a diagnostic says why.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import sexpr
from .logic import (
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaEvaluator,
    Implies,
    Leq,
    Letter,
    LogicError,
    Max,
    Not,
    Or,
    conj,
    disj,
    free_vars,
    from_sexpr,
    letters_used,
    strict_less,
    to_sexpr,
)
from .words import Alphabet, OriginWord, Word


class InterpError(ValueError):
    pass


def _var_names(prefix: str, dim: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, dim + 1))


@dataclass(frozen=True, eq=False)
class Interpretation:
    dim: int
    input_alphabet: Alphabet
    output_alphabet: Alphabet
    letter_formulas: Mapping[str, Formula]
    order_formula: Formula
    name: str | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InterpError(f"dimension must be positive, got {self.dim}")
        if set(self.letter_formulas) != set(self.output_alphabet.letters):
            raise InterpError("letter formulas must cover the output alphabet exactly")
        xs = set(_var_names("x", self.dim))
        for letter, formula in self.letter_formulas.items():
            if free_vars(formula) != xs:
                raise InterpError(
                    f"letter formula for {letter!r} must have free variables "
                    f"{sorted(xs)}, has {sorted(free_vars(formula))}"
                )
            self._check_predicates(formula)
        expected = xs | set(_var_names("y", self.dim))
        if free_vars(self.order_formula) != expected:
            raise InterpError(
                f"order formula must have free variables {sorted(expected)}, "
                f"has {sorted(free_vars(self.order_formula))}"
            )
        self._check_predicates(self.order_formula)

    def _check_predicates(self, formula: Formula) -> None:
        stray = letters_used(formula) - self.input_alphabet.letters
        if stray:
            raise InterpError(f"formula uses letters outside the input alphabet: {sorted(stray)}")

    def tuple_vars(self) -> tuple[str, ...]:
        return _var_names("x", self.dim)

    def pair_vars(self) -> tuple[str, ...]:
        return _var_names("x", self.dim) + _var_names("y", self.dim)


# -- domain and order ----------------------------------------------------


@dataclass(frozen=True)
class InterpDomain:
    """The selected tuples of one evaluation, with the letters that hold on
    each tuple (normally exactly one)."""

    letters_at: Mapping[tuple[int, ...], frozenset[str]]

    def tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.letters_at)

    def __len__(self) -> int:
        return len(self.letters_at)


def compute_domain(interp: Interpretation, u: Word) -> InterpDomain:
    u.alphabet_check(interp.input_alphabet)
    n = len(u)
    if n == 0:
        return InterpDomain({})
    evaluators = {
        letter: FormulaEvaluator(u, formula, var_order=interp.tuple_vars())
        for letter, formula in interp.letter_formulas.items()
    }
    letters_at: dict[tuple[int, ...], frozenset[str]] = {}
    for tup in itertools.product(range(1, n + 1), repeat=interp.dim):
        holds = frozenset(letter for letter, ev in evaluators.items() if ev.at(tup))
        if holds:
            letters_at[tup] = holds
    return InterpDomain(letters_at)


@dataclass(frozen=True)
class OrderViolation:
    kind: str  # reflexivity | antisymmetry | comparability | transitivity | misordered
    tuples: tuple[tuple[int, ...], ...]

    def render(self) -> str:
        shown = ", ".join(str(t) for t in self.tuples)
        return f"{self.kind} violated on {shown}"


@dataclass(frozen=True)
class OrderCheck:
    ok: bool
    sorted_tuples: tuple[tuple[int, ...], ...] = ()
    violation: OrderViolation | None = None


def check_linear_order(
    dom: Iterable[tuple[int, ...]],
    interp: Interpretation,
    u: Word,
    full: bool = False,
) -> OrderCheck:
    """Is the order formula a linear (reflexive, total) order on ``dom``?

    The default mode ranks tuples by predecessor count and verifies that
    ranks are distinct and adjacent tuples correctly ordered; ``full``
    additionally checks every pair and every triple.
    """
    tuples = sorted(dom)
    m = len(tuples)
    if m == 0:
        return OrderCheck(True, ())
    ev = FormulaEvaluator(u, interp.order_formula, var_order=interp.pair_vars())

    def leq(s: tuple[int, ...], t: tuple[int, ...]) -> bool:
        return ev.at(s + t)

    counts: list[int] = []
    for t in tuples:
        counts.append(sum(1 for s in tuples if leq(s, t)))
    if sorted(counts) != list(range(1, m + 1)):
        for t in tuples:
            if not leq(t, t):
                return OrderCheck(False, (), OrderViolation("reflexivity", (t,)))
        seen: dict[int, tuple[int, ...]] = {}
        for t, c in zip(tuples, counts):
            if c in seen:
                s = seen[c]
                if leq(s, t) and leq(t, s):
                    return OrderCheck(False, (), OrderViolation("antisymmetry", (s, t)))
                if not leq(s, t) and not leq(t, s):
                    return OrderCheck(False, (), OrderViolation("comparability", (s, t)))
                return OrderCheck(False, (), OrderViolation("misordered", (s, t)))
            seen[c] = t
        worst = max(zip(counts, tuples))[1]
        return OrderCheck(False, (), OrderViolation("misordered", (worst,)))
    ranked = [t for _, t in sorted(zip(counts, tuples))]
    for s, t in zip(ranked, ranked[1:]):
        if not leq(s, t):
            return OrderCheck(False, (), OrderViolation("comparability", (s, t)))
        if leq(t, s):
            return OrderCheck(False, (), OrderViolation("antisymmetry", (s, t)))
    if full:
        for s, t in itertools.combinations(ranked, 2):
            forward, backward = leq(s, t), leq(t, s)
            if forward and backward:
                return OrderCheck(False, (), OrderViolation("antisymmetry", (s, t)))
            if not forward and not backward:
                return OrderCheck(False, (), OrderViolation("comparability", (s, t)))
        for a, b, c in itertools.permutations(ranked, 3):
            if leq(a, b) and leq(b, c) and not leq(a, c):
                return OrderCheck(False, (), OrderViolation("transitivity", (a, b, c)))
    return OrderCheck(True, tuple(ranked))


# -- evaluation ----------------------------------------------------------


@dataclass(frozen=True)
class InterpDiagnostic:
    kind: str  # letter-overlap | order-not-linear
    detail: str
    tuples: tuple[tuple[int, ...], ...] = ()
    letters: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "detail": self.detail,
            "tuples": [list(t) for t in self.tuples],
            "letters": list(self.letters),
        }


@dataclass(frozen=True)
class InterpResult:
    output: OriginWord
    diagnostic: InterpDiagnostic | None = None

    def word(self) -> Word:
        return self.output.word()


def eval_interp_details(
    interp: Interpretation, u: Word, full_order_check: bool = False
) -> InterpResult:
    domain = compute_domain(interp, u)
    for tup in domain.tuples():
        holds = domain.letters_at[tup]
        if len(holds) > 1:
            diag = InterpDiagnostic(
                "letter-overlap",
                f"letters {sorted(holds)} all hold on {tup}",
                (tup,),
                tuple(sorted(holds)),
            )
            return InterpResult(OriginWord(), diag)
    check = check_linear_order(domain.tuples(), interp, u, full=full_order_check)
    if not check.ok:
        assert check.violation is not None
        diag = InterpDiagnostic(
            "order-not-linear", check.violation.render(), check.violation.tuples
        )
        return InterpResult(OriginWord(), diag)
    letters = []
    for tup in check.sorted_tuples:
        (letter,) = domain.letters_at[tup]
        letters.append((letter, tup))
    output = OriginWord(tuple(letters))
    assert len(output) <= len(u) ** interp.dim
    return InterpResult(output)


def eval_interp(interp: Interpretation, u: Word, full_order_check: bool = False) -> OriginWord:
    """The interpretation's output on ``u`` with origins; empty (with the
    reason available via ``eval_interp_details``) when the structure the
    formulas carve out is not a word."""
    return eval_interp_details(interp, u, full_order_check).output


# -- file format ----------------------------------------------------------


def render_interp(interp: Interpretation) -> str:
    lines = [
        f"dim {interp.dim}",
        "input-alphabet " + interp.input_alphabet.render(),
        "output-alphabet " + interp.output_alphabet.render(),
    ]
    for letter in sorted(interp.letter_formulas):
        block = ["letter", letter, to_sexpr(interp.letter_formulas[letter])]
        lines.append(sexpr.render(block))
    lines.append(sexpr.render(["order", to_sexpr(interp.order_formula)]))
    return "\n".join(lines) + "\n"


def parse_interp(text: str, name: str | None = None) -> Interpretation:
    header: dict[str, list[str]] = {}
    body_lines: list[str] = []
    in_body = False
    for raw in text.splitlines():
        line = raw.strip()
        if not in_body:
            if not line or line.startswith(";"):
                continue
            key = line.split()[0]
            if key in ("dim", "input-alphabet", "output-alphabet"):
                if key in header:
                    raise InterpError(f"duplicate header line {key!r}")
                header[key] = line.split()[1:]
                continue
            in_body = True
        body_lines.append(raw)
    missing = {"dim", "input-alphabet", "output-alphabet"} - set(header)
    if missing:
        raise InterpError(f"missing header lines: {sorted(missing)}")
    if len(header["dim"]) != 1 or not header["dim"][0].isdigit():
        raise InterpError("dim header needs a single integer")
    dim = int(header["dim"][0])
    input_alphabet = Alphabet.of(*header["input-alphabet"])
    output_alphabet = Alphabet.of(*header["output-alphabet"])
    letter_formulas: dict[str, Formula] = {}
    order_formula: Formula | None = None
    for block in sexpr.parse_all("\n".join(body_lines)):
        if not isinstance(block, list) or not block or not isinstance(block[0], str):
            raise InterpError(f"bad block {sexpr.render(block)}")
        if block[0] == "letter":
            if len(block) != 3 or not isinstance(block[1], str):
                raise InterpError("(letter c <formula>) block malformed")
            if block[1] in letter_formulas:
                raise InterpError(f"duplicate letter block for {block[1]!r}")
            letter_formulas[block[1]] = from_sexpr(block[2])
        elif block[0] == "order":
            if len(block) != 2:
                raise InterpError("(order <formula>) block malformed")
            if order_formula is not None:
                raise InterpError("duplicate order block")
            order_formula = from_sexpr(block[1])
        else:
            raise InterpError(f"unknown block {block[0]!r}")
    if order_formula is None:
        raise InterpError("missing (order ...) block")
    return Interpretation(dim, input_alphabet, output_alphabet, letter_formulas, order_formula, name)


# -- builtins --------------------------------------------------------------


def _squaring_family() -> Interpretation:
    x1, x2, y1, y2 = "x1", "x2", "y1", "y2"
    letter_a = And((Not(Max(x1)), Not(Max(x2))))
    letter_b = And((Not(Max(x1)), Max(x2)))
    order = Or((strict_less(x1, y1), And((Eq(x1, y1), Leq(x2, y2)))))
    return Interpretation(
        dim=2,
        input_alphabet=Alphabet.of("a"),
        output_alphabet=Alphabet.of("a", "b"),
        letter_formulas={"a": letter_a, "b": letter_b},
        order_formula=order,
        name="squaring-family",
    )


def _no_hash_up_to(z: str, x: str, t: str) -> Formula:
    """No # at a position p with z <= p < x (the left end included)."""
    inside = And((Leq(z, t), Leq(t, x), Not(Eq(t, x))))
    return Forall(t, Implies(inside, Not(Letter("#", t))))


def _pred_is_letter(z: str, s: str, r: str) -> Formula:
    """z has an immediate predecessor carrying a or b."""
    adjacent = Forall(r, Or((Leq(r, s), Leq(z, r))))
    return Exists(
        s,
        And((Leq(s, z), Not(Eq(s, z)), adjacent, Or((Letter("a", s), Letter("b", s))))),
    )


def _block_start(z: str, x: str, tag: str) -> Formula:
    """z begins the letter block that x belongs to (or that ends at x when
    x carries a #; for an empty block that is x itself)."""
    return And(
        (
            Leq(z, x),
            _no_hash_up_to(z, x, f"t{tag}"),
            Not(_pred_is_letter(z, f"s{tag}", f"r{tag}")),
        )
    )


def _innsq_interp() -> Interpretation:
    x1, x2, y1, y2 = "x1", "x2", "y1", "y2"
    letter_a = And((Letter("a", x1), Letter("#", x2)))
    letter_b = And((Letter("b", x1), Letter("#", x2)))
    letter_hash = And((Letter("#", x1), Max(x2)))
    # Tuples compare by (block start, copy index, position), lexicographically;
    # the existentials are arranged so block starts are resolved before the
    # remaining components are compared.
    hash_clause = And((Letter("#", y1), Leq(x1, y1)))
    earlier_block = Exists(
        "y3",
        And(
            (
                _block_start("y3", y1, "1"),
                Exists("x3", And((_block_start("x3", x1, "2"), strict_less("x3", "y3")))),
            )
        ),
    )
    same_block = Exists("z3", And((_block_start("z3", x1, "3"), _block_start("z3", y1, "4"))))
    within_block = Or((strict_less(x2, y2), And((Eq(x2, y2), Leq(x1, y1)))))
    order = Or((hash_clause, earlier_block, And((same_block, within_block))))
    return Interpretation(
        dim=2,
        input_alphabet=Alphabet.of("a", "b", "#"),
        output_alphabet=Alphabet.of("a", "b", "#"),
        letter_formulas={"a": letter_a, "b": letter_b, "#": letter_hash},
        order_formula=order,
        name="innsq-interp",
    )


def _cross_sort_demo() -> Interpretation:
    """A deliberately unsortable interpretation: its order compares a first
    component with a second component."""
    x1, x2, y1, y2 = "x1", "x2", "y1", "y2"
    letter_a = And((Letter("a", x1), Letter("a", x2)))
    order = And((Leq(x1, y2), Eq(x2, x2), Eq(y1, y1)))
    return Interpretation(
        dim=2,
        input_alphabet=Alphabet.of("a"),
        output_alphabet=Alphabet.of("a"),
        letter_formulas={"a": letter_a},
        order_formula=order,
        name="cross-sort-demo",
    )


_BUILTIN_MAKERS = {
    "squaring-family": _squaring_family,
    "innsq-interp": _innsq_interp,
    "cross-sort-demo": _cross_sort_demo,
}

_builtin_cache: dict[str, Interpretation] = {}


def builtin_interpretations() -> tuple[str, ...]:
    return tuple(sorted(_BUILTIN_MAKERS))


def builtin_interp(name: str) -> Interpretation:
    if name not in _BUILTIN_MAKERS:
        raise KeyError(f"no builtin interpretation named {name!r}")
    if name not in _builtin_cache:
        _builtin_cache[name] = _BUILTIN_MAKERS[name]()
    return _builtin_cache[name]
