"""Tokenizer, parser, evaluator, and dual-number differentiation."""

import math

import numpy as np
import pytest

from heisgeo import exprparse as ex
from heisgeo.surfaces import pansu_height

PANSU_STRING = "(lambda*r*sqrt(1-lambda^2*r^2)+acos(lambda*r))/(2*lambda^2)"


def ev(src, **bindings):
    return ex.eval_ast(ex.parse_expr(src), bindings)


def dual(src, var, **bindings):
    return ex.eval_dual(ex.parse_expr(src), var, bindings)


class TestTokenizer:
    def test_simple(self):
        toks = ex.tokenize("r^2")
        assert [(t.kind, t.text) for t in toks[:-1]] == [
            ("ident", "r"), ("op", "^"), ("number", "2")]
        assert toks[-1].kind == "end"

    def test_positions_are_byte_offsets(self):
        toks = ex.tokenize("sqrt(R^2 - r^2)")
        assert [t.text for t in toks[:-1]] == [
            "sqrt", "(", "R", "^", "2", "-", "r", "^", "2", ")"]
        assert [t.pos for t in toks[:-1]] == [0, 4, 5, 6, 7, 9, 11, 12, 13, 14]

    def test_malformed_number(self):
        with pytest.raises(ex.MalformedNumberError) as err:
            ex.tokenize("2..3")
        assert err.value.position == 1

    def test_illegal_character(self):
        with pytest.raises(ex.IllegalCharacterError) as err:
            ex.tokenize("r + $")
        assert err.value.position == 4

    def test_exponent_forms(self):
        assert ev("1.5e2") == 150.0
        assert ev("2E-3") == 0.002
        with pytest.raises(ex.MalformedNumberError):
            ex.tokenize("1e+")


class TestParser:
    def test_precedence(self):
        assert ev("2+3*4") == 14.0

    def test_power_right_associative(self):
        assert ev("2^3^2") == 512.0

    def test_unary_minus_binds_looser_than_power(self):
        assert ev("-r^2", r=2.0) == -4.0

    def test_negative_exponent(self):
        assert ev("2^-2") == 0.25

    def test_unbalanced_paren(self):
        with pytest.raises(ex.UnbalancedParenError):
            ex.parse_expr("(1+2")
        with pytest.raises(ex.UnbalancedParenError):
            ex.parse_expr("1+2)")

    def test_unexpected_token_has_offset(self):
        with pytest.raises(ex.UnexpectedTokenError) as err:
            ex.parse_expr("1 + * 2")
        assert err.value.position == 4

    def test_unknown_function(self):
        with pytest.raises(ex.UnexpectedTokenError):
            ex.parse_expr("tan(1)")

    def test_arity_checked(self):
        with pytest.raises(ex.UnexpectedTokenError):
            ex.parse_expr("pow(2)")


class TestEval:
    def test_sqrt_at_interior(self):
        assert ev("sqrt(R^2-r^2)", r=0.0, R=1.0) == 1.0

    def test_pansu_profile_string_matches_closed_form(self):
        ast = ex.parse_expr(PANSU_STRING)
        for lam in (0.5, 1.0, 2.0):
            for r in np.linspace(0.0, 1.0 / lam, 100):
                got = ex.eval_ast(ast, {"r": r, "lambda": lam, "pi": math.pi})
                assert abs(got - pansu_height(lam, r)) < 1e-12

    def test_acos_domain_error(self):
        with pytest.raises(ex.DomainError):
            ev("acos(2)")

    def test_acos_clamp_slack(self):
        assert ev("acos(1 + 5e-13)") == 0.0

    def test_sqrt_clamp_slack(self):
        assert ev("sqrt(0 - 5e-13)") == 0.0
        with pytest.raises(ex.DomainError):
            ev("sqrt(0 - 1e-9)")

    def test_unbound_variable(self):
        with pytest.raises(ex.UnboundVariableError):
            ev("q + 1")

    def test_division_by_zero(self):
        with pytest.raises(ex.DomainError):
            ev("1/r", r=0.0)

    def test_ln_and_exp(self):
        assert abs(ev("ln(exp(2))") - 2.0) < 1e-15

    def test_pow_call(self):
        assert ev("pow(2, 10)") == 1024.0

    def test_pi_binding(self):
        assert abs(ev("cos(pi)", pi=math.pi) + 1.0) < 1e-15


class TestDual:
    def test_square(self):
        d = dual("r^2", "r", r=3.0)
        assert (d.value, d.deriv) == (9.0, 6.0)

    def test_sqrt_profile(self):
        d = dual("sqrt(R^2-r^2)", "r", r=0.6, R=1.0)
        assert abs(d.value - 0.8) < 1e-15
        assert abs(d.deriv - (-0.75)) < 1e-15

    def test_abs_derivative_at_zero(self):
        assert dual("abs(r)", "r", r=0.0).deriv == 0.0

    def test_constant_has_zero_derivative(self):
        assert dual("R^2", "r", r=1.0, R=3.0).deriv == 0.0

    def test_quotient_rule(self):
        d = dual("r/(1+r)", "r", r=2.0)
        assert abs(d.deriv - 1.0 / 9.0) < 1e-15

    def test_pansu_profile_derivative(self):
        # h_r = -lam r^2 / sqrt(1 - lam^2 r^2)
        for lam in (0.5, 1.0, 2.0):
            for r in (0.1, 0.3, 0.7 / lam):
                d = dual(PANSU_STRING, "r", r=r, **{"lambda": lam})
                want = -lam * r * r / math.sqrt(1 - (lam * r) ** 2)
                assert abs(d.deriv - want) < 1e-12 * max(1.0, abs(want))

    def test_derivative_blows_up_at_domain_edge(self):
        d = dual("sqrt(1-r^2)", "r", r=1.0)
        assert d.value == 0.0
        assert d.deriv == -math.inf


def random_smooth_expression(rng, depth=3):
    """Expressions built from +, -, *, sin, cos, exp over r and constants."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return "r"
        return f"{rng.uniform(-2.0, 2.0):.6f}"
    choice = rng.integers(0, 5)
    a = random_smooth_expression(rng, depth - 1)
    b = random_smooth_expression(rng, depth - 1)
    if choice == 0:
        return f"({a}+{b})"
    if choice == 1:
        return f"({a}-{b})"
    if choice == 2:
        return f"({a}*{b})"
    if choice == 3:
        return f"sin({a})"
    return f"cos({a})"


def random_any_expression(rng, depth=3):
    """Wider generator (also /, ^, sqrt, exp, ln, abs, pow) for round-trips."""
    if depth == 0 or rng.random() < 0.25:
        pick = rng.random()
        if pick < 0.4:
            return "r"
        if pick < 0.6:
            return "R"
        return f"{rng.uniform(0.1, 3.0):.4f}"
    choice = rng.integers(0, 9)
    a = random_any_expression(rng, depth - 1)
    b = random_any_expression(rng, depth - 1)
    if choice == 0:
        return f"({a}+{b})"
    if choice == 1:
        return f"({a}-{b})"
    if choice == 2:
        return f"({a}*{b})"
    if choice == 3:
        return f"({a}/({b}+4))"
    if choice == 4:
        return f"(-{a})"
    if choice == 5:
        return f"sqrt(abs({a}))"
    if choice == 6:
        return f"exp(sin({a}))"
    if choice == 7:
        return f"pow(abs({a})+1,2)"
    return f"({a}^2)"


class TestProperties:
    def test_dual_matches_central_differences(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 100:
            src = random_smooth_expression(rng)
            ast = ex.parse_expr(src)
            r0 = float(rng.uniform(0.3, 2.0))
            h = 1e-6
            f_plus = ex.eval_ast(ast, {"r": r0 + h})
            f_minus = ex.eval_ast(ast, {"r": r0 - h})
            if max(abs(f_plus), abs(f_minus)) > 50.0:
                continue  # keep the finite-difference scale sane
            fd = (f_plus - f_minus) / (2 * h)
            d = ex.eval_dual(ast, "r", {"r": r0})
            assert abs(d.deriv - fd) < 1e-6 * max(1.0, abs(d.deriv))
            checked += 1

    def test_pretty_print_round_trip(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            src = random_any_expression(rng)
            ast = ex.parse_expr(src)
            assert ex.parse_expr(ex.pretty(ast)) == ast

    def test_free_variables(self):
        ast = ex.parse_expr("sqrt(R^2-r^2)+pi*lambda")
        assert ex.free_variables(ast) == {"R", "r", "pi", "lambda"}


class TestArrayEvaluation:
    def test_matches_scalar_pointwise(self):
        ast = ex.parse_expr(
            "sin(r)*sqrt(abs(R)+1) + exp(cos(r*R)) - (r^3)/(R^2+2) + pow(abs(r)+1,2)")
        rng = np.random.default_rng(18)
        rs = rng.uniform(-2, 2, 64)
        Rs = rng.uniform(-2, 2, 64)
        vals = ex.eval_ast_array(ast, {"r": rs, "R": Rs})
        dr = ex.eval_dual_array(ast, "r", {"r": rs, "R": Rs})[1]
        for i in range(64):
            b = {"r": rs[i], "R": Rs[i]}
            assert abs(vals[i] - ex.eval_ast(ast, b)) < 1e-13
            assert abs(dr[i] - ex.eval_dual(ast, "r", b).deriv) < 1e-13

    def test_scalar_bindings_broadcast(self):
        ast = ex.parse_expr("lambda*r^2")
        out = ex.eval_ast_array(ast, {"r": np.array([1.0, 2.0]), "lambda": 3.0})
        assert np.allclose(out, [3.0, 12.0])

    def test_domain_errors_raise(self):
        with pytest.raises(ex.DomainError):
            ex.eval_ast_array(ex.parse_expr("sqrt(r)"), {"r": np.array([1.0, -1.0])})
        with pytest.raises(ex.DomainError):
            ex.eval_ast_array(ex.parse_expr("1/r"), {"r": np.array([1.0, 0.0])})
        with pytest.raises(ex.DomainError):
            ex.eval_dual_array(ex.parse_expr("ln(r)"), "r", {"r": np.array([-1.0])})

    def test_edge_clamps_match_scalar(self):
        ast = ex.parse_expr("sqrt(1-r^2)")
        v = ex.eval_ast_array(ast, {"r": np.array([1.0 + 4e-13])})
        assert v[0] == 0.0
        _, d = ex.eval_dual_array(ast, "r", {"r": np.array([0.6, 1.0])})
        assert abs(d[0] + 0.75) < 1e-14
        assert d[1] == -np.inf
