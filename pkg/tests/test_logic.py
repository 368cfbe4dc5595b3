"""Formula AST, evaluator, relativization and the sortability analysis.

The evaluator is cross-checked against a deliberately naive reference
written here in the test module: plain recursive Tarskian semantics over
a dict environment, no compilation, no caching.
"""

import itertools
import random

import pytest

from polyreglab import sexpr
from polyreglab.interp import Interpretation, builtin_interp
from polyreglab.logic import (
    And,
    Eq,
    Exists,
    Forall,
    Implies,
    Leq,
    Letter,
    LogicError,
    Max,
    Min,
    Not,
    Or,
    check_sortable,
    eval_formula,
    expand_macros,
    free_vars,
    parse_formula,
    quantifier_count,
    relativize,
    rename_bound,
    substitute,
    to_sexpr,
)
from polyreglab.words import Alphabet, Word


def naive_eval(w, f, env):
    if isinstance(f, Letter):
        return w[env[f.var]] == f.letter
    if isinstance(f, Leq):
        return env[f.left] <= env[f.right]
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, Not):
        return not naive_eval(w, f.body, env)
    if isinstance(f, And):
        return all(naive_eval(w, p, env) for p in f.parts)
    if isinstance(f, Or):
        return any(naive_eval(w, p, env) for p in f.parts)
    if isinstance(f, Implies):
        return (not naive_eval(w, f.left, env)) or naive_eval(w, f.right, env)
    if isinstance(f, Max):
        return all(i <= env[f.var] for i in range(1, len(w) + 1))
    if isinstance(f, Min):
        return all(env[f.var] <= i for i in range(1, len(w) + 1))
    if isinstance(f, Forall):
        return all(
            naive_eval(w, f.body, {**env, f.var: i}) for i in range(1, len(w) + 1)
        )
    if isinstance(f, Exists):
        return any(
            naive_eval(w, f.body, {**env, f.var: i}) for i in range(1, len(w) + 1)
        )
    raise AssertionError(f)


# the sentence that holds exactly on a*b*
ASTAR_BSTAR = Forall(
    "x",
    Or((Letter("b", "x"), Forall("y", Or((Letter("a", "y"), Leq("x", "y")))))),
)


def test_astar_bstar_sentence():
    assert eval_formula(Word.parse("aab"), ASTAR_BSTAR) is True
    assert eval_formula(Word.parse("ba"), ASTAR_BSTAR) is False
    assert eval_formula(Word(), ASTAR_BSTAR) is True


def test_astar_bstar_exhaustive():
    for n in range(0, 6):
        for toks in itertools.product("ab", repeat=n):
            w = Word(toks)
            in_lang = "ba" not in "".join(toks)
            assert eval_formula(w, ASTAR_BSTAR) == in_lang, w.render()


def test_eval_env_errors():
    f = Letter("a", "x")
    with pytest.raises(LogicError):
        eval_formula(Word.parse("a"), f)
    with pytest.raises(LogicError):
        eval_formula(Word.parse("a"), f, {"x": 2})
    with pytest.raises(LogicError):
        eval_formula(Word.parse("a"), f, {"x": 0})


def test_max_min_macros():
    w = Word.parse("abc")
    assert eval_formula(w, Max("x"), {"x": 3})
    assert not eval_formula(w, Max("x"), {"x": 2})
    assert eval_formula(w, Min("x"), {"x": 1})
    core = expand_macros(Max("x"))
    assert not isinstance(core, Max)
    assert free_vars(core) == frozenset({"x"})


def _random_formula(rng, vars_free, depth, qdepth):
    """Small random AST; quantifier nesting bounded by qdepth."""
    leaf_pool = ["letter", "leq", "eq", "max"]
    if depth <= 0 or (qdepth <= 0 and rng.random() < 0.3):
        kind = rng.choice(leaf_pool)
        if kind == "letter":
            return Letter(rng.choice("ab#"), rng.choice(vars_free))
        if kind == "leq":
            return Leq(rng.choice(vars_free), rng.choice(vars_free))
        if kind == "eq":
            return Eq(rng.choice(vars_free), rng.choice(vars_free))
        return Max(rng.choice(vars_free))
    kind = rng.choice(["not", "and", "or", "implies", "forall", "exists"])
    if kind == "not":
        return Not(_random_formula(rng, vars_free, depth - 1, qdepth))
    if kind in ("and", "or"):
        parts = tuple(
            _random_formula(rng, vars_free, depth - 1, qdepth)
            for _ in range(rng.randint(1, 3))
        )
        return And(parts) if kind == "and" else Or(parts)
    if kind == "implies":
        return Implies(
            _random_formula(rng, vars_free, depth - 1, qdepth),
            _random_formula(rng, vars_free, depth - 1, qdepth),
        )
    if qdepth <= 0:
        return Letter(rng.choice("ab#"), rng.choice(vars_free))
    var = rng.choice(["u", "v", "t"])
    body = _random_formula(rng, vars_free + [var], depth - 1, qdepth - 1)
    return Forall(var, body) if kind == "forall" else Exists(var, body)


def test_evaluator_agrees_with_naive_reference():
    rng = random.Random(99)
    for trial in range(200):
        f = _random_formula(rng, ["x", "y"], depth=4, qdepth=3)
        n = rng.randint(1, 5)
        w = Word(tuple(rng.choices("ab#", k=n)))
        env = {"x": rng.randint(1, n), "y": rng.randint(1, n)}
        env = {k: v for k, v in env.items() if k in free_vars(f)}
        assert eval_formula(w, f, env) == naive_eval(w, f, env), (
            sexpr.render(to_sexpr(f)),
            w.render(),
            env,
        )


def test_sexpr_round_trip_exact():
    text = "(forall y (or (letter a y) (leq x y)))"
    f = parse_formula(text)
    assert sexpr.render(to_sexpr(f)) == text
    assert f == Forall("y", Or((Letter("a", "y"), Leq("x", "y"))))


def test_sexpr_round_trip_random():
    rng = random.Random(7)
    for trial in range(100):
        f = _random_formula(rng, ["x1", "x2"], depth=4, qdepth=2)
        assert parse_formula(sexpr.render(to_sexpr(f))) == f


def test_parse_errors():
    for bad in ["(letter a)", "(leq x)", "(frobnicate x)", "(forall (x) y)"]:
        with pytest.raises((LogicError, sexpr.SexprError)):
            parse_formula(bad)


def test_rename_bound_distinct():
    f = And(
        (
            Exists("z", Letter("a", "z")),
            Exists("z", Letter("b", "z")),
            Letter("a", "z"),
        )
    )
    g = rename_bound(f)
    binders = []

    def collect(h):
        if isinstance(h, (Forall, Exists)):
            binders.append(h.var)
        for child in getattr(h, "parts", []) or []:
            collect(child)
        for attr in ("body", "left", "right"):
            sub = getattr(h, attr, None)
            if hasattr(sub, "__class__") and not isinstance(sub, str) and sub is not None:
                collect(sub)

    collect(g)
    assert len(binders) == len(set(binders))
    assert "z" not in binders  # z is free in the third conjunct
    assert free_vars(g) == free_vars(f)


def test_substitute_capture_avoidance():
    # substituting x -> y must not let the binder over y capture it
    f = Exists("y", Leq("x", "y"))
    g = substitute(f, {"x": "y"})
    assert free_vars(g) == frozenset({"y"})
    w = Word.parse("ab")
    # the substituted formula says: some position is >= y
    assert eval_formula(w, g, {"y": 1}) is True
    assert eval_formula(w, g, {"y": 2}) is True
    strict = substitute(Exists("y", Not(Leq("y", "x"))), {"x": "y"})
    assert eval_formula(w, strict, {"y": 2}) is False


def test_relativize_schema():
    f = Exists("y", Letter("a", "y"))
    g = relativize(f, "♣")
    assert g == Exists("y", And((Not(Letter("♣", "y")), Letter("a", "y"))))


def test_relativize_atoms_unchanged():
    f = And((Letter("a", "x"), Leq("x", "y")))
    assert relativize(f, "♣") == f


def test_relativize_guard_conflict():
    with pytest.raises(LogicError):
        relativize(Letter("♣", "x"), "♣")


def test_relativize_counts_and_free_vars():
    rng = random.Random(5)
    for trial in range(50):
        f = _random_formula(rng, ["x"], depth=4, qdepth=2)
        g = relativize(f, "♣")
        assert free_vars(g) == free_vars(f)
        assert quantifier_count(g) == quantifier_count(expand_macros(f))


def test_relativize_equivalent_on_guard_free_words():
    rng = random.Random(11)
    for trial in range(100):
        f = _random_formula(rng, ["x"], depth=3, qdepth=2)
        g = relativize(f, "♣")
        n = rng.randint(1, 4)
        w = Word(tuple(rng.choices("ab#", k=n)))
        env = {"x": rng.randint(1, n)} if "x" in free_vars(f) else {}
        assert eval_formula(w, f, env) == eval_formula(w, g, env)


# -- sortability ------------------------------------------------------------


def test_sortable_builtins():
    rep = check_sortable(builtin_interp("squaring-family"))
    assert rep.ok
    rep = check_sortable(builtin_interp("innsq-interp"))
    assert rep.ok
    order_sorts = rep.sorts["order"]
    assert order_sorts["x3"] == 1 and order_sorts["y3"] == 1
    assert order_sorts["x1"] == 1 and order_sorts["x2"] == 2
    assert order_sorts["y1"] == 1 and order_sorts["y2"] == 2


def test_cross_sort_witness():
    rep = check_sortable(builtin_interp("cross-sort-demo"))
    assert not rep.ok
    assert rep.witness is not None
    assert rep.witness.atom == Leq("x1", "y2")
    assert "x1" in rep.witness.render() and "y2" in rep.witness.render()


def test_sortable_requires_dimension_two():
    one_dim = Interpretation(
        dim=1,
        input_alphabet=Alphabet.of("a"),
        output_alphabet=Alphabet.of("a"),
        letter_formulas={"a": Letter("a", "x1")},
        order_formula=Leq("x1", "y1"),
    )
    with pytest.raises(LogicError):
        check_sortable(one_dim)
