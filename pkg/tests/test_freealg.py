import random
from fractions import Fraction

import pytest

from quiverepi.exactlin import GF, QQ
from quiverepi.freealg import (
    AlphabetMismatch,
    DegreeBoundTooSmall,
    FreeAlgebra,
    FreeMat,
    IdealGens,
    IdealSpan,
    PolyParseError,
    ShapeMismatch,
    ideal_membership,
)


@pytest.fixture
def xy():
    return FreeAlgebra(QQ, ["x", "y"])


@pytest.fixture
def vxy():
    return FreeAlgebra(QQ, ["x", "v1_2", "v2_1"])


def random_poly(algebra, rng, max_deg=2, max_terms=3):
    terms = {}
    for _ in range(rng.randrange(0, max_terms + 1)):
        d = rng.randrange(0, max_deg + 1)
        word = tuple(rng.choice(algebra.letters) for _ in range(d))
        terms[word] = terms.get(word, 0) + rng.randrange(-2, 3)
    return algebra.poly(terms)


class TestPolyArithmetic:
    def test_noncommutative(self, xy):
        x, y = xy.letter("x"), xy.letter("y")
        assert x * y != y * x

    def test_difference_of_squares(self, xy):
        x = xy.letter("x")
        assert (x + 1) * (x - 1) == x * x - 1

    def test_cancellation(self, xy):
        rng = random.Random(0)
        for _ in range(10):
            p = random_poly(xy, rng)
            assert (p + p.scale(-1)).is_zero()

    def test_associativity_distributivity(self, xy):
        rng = random.Random(42)
        for _ in range(25):
            a, b, c = (random_poly(xy, rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (a + b) * c == a * c + b * c

    def test_alphabet_mismatch(self, xy):
        other = FreeAlgebra(QQ, ["z"])
        with pytest.raises(AlphabetMismatch):
            xy.letter("x") + other.letter("z")

    def test_degree(self, xy):
        assert xy.zero().degree() == -1
        assert xy.one().degree() == 0
        assert (xy.letter("x") * xy.letter("y")).degree() == 2

    def test_scalar_ops_prime_field(self):
        alg = FreeAlgebra(GF(5), ["x"])
        x = alg.letter("x")
        assert x.scale(7) == x.scale(2)
        assert (x + x + x + x + x).is_zero()


class TestPolyText:
    def test_canonical_form(self, xy):
        x, y = xy.letter("x"), xy.letter("y")
        p = x * y.scale(Fraction(3, 2)) + xy.letter("x") - 1
        assert p.to_text() == "3/2*x.y + x - 1"

    def test_parse_round_trip(self, xy):
        rng = random.Random(9)
        for _ in range(20):
            p = random_poly(xy, rng)
            assert xy.parse(p.to_text()) == p

    def test_parse_examples(self, vxy):
        p = vxy.parse("3/2*x.x.v1_2 + v1_2 - v2_1")
        assert p.terms[("x", "x", "v1_2")] == Fraction(3, 2)
        assert p.terms[("v2_1",)] == -1

    def test_parse_rejects_unknown_letter(self, xy):
        with pytest.raises(AlphabetMismatch):
            xy.parse("x + q")

    def test_parse_rejects_garbage(self, xy):
        with pytest.raises(PolyParseError):
            xy.parse("x + ")
        with pytest.raises(PolyParseError):
            xy.parse("")


class TestFreeMat:
    def test_matrix_units(self, xy):
        e21 = FreeMat.unit(xy, 2, 1, 0)
        e11 = FreeMat.unit(xy, 2, 0, 0)
        assert e21 * e11 == e21
        assert e11 * e21 == FreeMat.zeros(xy, 2, 2)

    def test_scaled_units(self, xy):
        x, y = xy.letter("x"), xy.letter("y")
        e21 = FreeMat.unit(xy, 2, 1, 0)
        e11 = FreeMat.unit(xy, 2, 0, 0)
        prod = e21.scale(x) * e11.scale(y)
        assert prod == e21.scale(x * y)

    def test_shape_mismatch(self, xy):
        with pytest.raises(ShapeMismatch):
            FreeMat.zeros(xy, 2, 3) * FreeMat.zeros(xy, 2, 2)

    def test_substitution_into_matrices(self, xy):
        from quiverepi.exactlin import ExactMatrix

        p = xy.letter("x") * xy.letter("y") + 1
        ax = ExactMatrix(QQ, [[0, 1], [0, 0]])
        ay = ExactMatrix(QQ, [[0, 0], [1, 0]])
        out = p.substitute_matrices({"x": ax, "y": ay}, 2, QQ)
        assert out == ExactMatrix(QQ, [[2, 0], [0, 1]])


class TestMembership:
    def test_generator_itself(self, vxy):
        gens = IdealGens(vxy, [vxy.letter("v1_2")])
        res = ideal_membership(gens, vxy.letter("v1_2"), 1)
        assert res.member
        assert res.certificate.evaluate(gens) == vxy.letter("v1_2")

    def test_sandwiched_generator(self, vxy):
        gens = IdealGens(vxy, [vxy.letter("v1_2")])
        x = vxy.letter("x")
        target = x * vxy.letter("v1_2") * x
        res = ideal_membership(gens, target, 3)
        assert res.member
        assert res.certificate.evaluate(gens) == target

    def test_honest_not_found(self, vxy):
        # every element of <v1_2> has all monomials containing v1_2
        gens = IdealGens(vxy, [vxy.letter("v1_2")])
        for bound in range(1, 7):
            res = ideal_membership(gens, vxy.letter("v2_1"), bound)
            assert not res.member
            assert res.searched_degree == bound

    def test_zero_is_member(self, vxy):
        gens = IdealGens(vxy, [vxy.letter("v1_2")])
        res = ideal_membership(gens, vxy.zero(), 0)
        assert res.member
        assert res.certificate.evaluate(gens).is_zero()

    def test_degree_bound_too_small(self, vxy):
        gens = IdealGens(vxy, [vxy.letter("v1_2")])
        target = vxy.letter("x") * vxy.letter("v1_2")
        with pytest.raises(DegreeBoundTooSmall):
            ideal_membership(gens, target, 1)

    def test_monotonicity(self, xy):
        # x y x - x in <y x - 1>? x(yx - 1) = xyx - x: member from degree 3 on
        g = xy.letter("y") * xy.letter("x") - 1
        gens = IdealGens(xy, [g])
        target = xy.letter("x") * xy.letter("y") * xy.letter("x") - xy.letter("x")
        assert ideal_membership(gens, target, 3).member
        for bound in range(3, 7):
            res = ideal_membership(gens, target, bound)
            assert res.member
            assert res.certificate.evaluate(gens) == target

    def test_cancellation_needs_higher_degree(self, xy):
        # commutator ideal: x y - y x; x y ∈ I would require y x too
        g = xy.letter("x") * xy.letter("y") - xy.letter("y") * xy.letter("x")
        gens = IdealGens(xy, [g])
        assert not ideal_membership(gens, xy.letter("x") * xy.letter("y"), 4).member
        diff = xy.letter("x") * xy.letter("y") - xy.letter("y") * xy.letter("x")
        res = ideal_membership(gens, diff, 2)
        assert res.member

    def test_certificates_reevaluate_random(self, xy):
        rng = random.Random(31)
        for _ in range(20):
            gen_polys = [p for p in (random_poly(xy, rng) for _ in range(2)) if not p.is_zero()]
            if not gen_polys:
                continue
            gens = IdealGens(xy, gen_polys)
            # build a target known to lie in the ideal
            left = random_poly(xy, rng, max_deg=1)
            right = random_poly(xy, rng, max_deg=1)
            target = left * gen_polys[0] * right
            bound = max(target.degree(), 0) + 1
            res = ideal_membership(gens, target, bound)
            if res.member:
                assert res.certificate.evaluate(gens) == target

    def test_deterministic_certificates(self, vxy):
        gens = IdealGens(vxy, [vxy.letter("v1_2") - 1, vxy.letter("x") * vxy.letter("v1_2")])
        target = vxy.letter("x")
        r1 = ideal_membership(gens, target, 3)
        r2 = ideal_membership(gens, target, 3)
        assert r1.member and r2.member
        assert r1.certificate.terms == r2.certificate.terms

    def test_rejects_zero_generator(self, xy):
        with pytest.raises(ValueError):
            IdealGens(xy, [xy.zero()])

    def test_span_reuse_matches_one_shot(self, vxy):
        gens = IdealGens(vxy, [vxy.letter("v1_2")])
        span = IdealSpan(gens)
        t1 = vxy.letter("v1_2")
        t2 = vxy.letter("x") * vxy.letter("v1_2")
        assert span.membership(t1, 2).member
        assert span.membership(t2, 2).member
        assert not span.membership(vxy.letter("v2_1"), 2).member

    def test_overbuilt_span_stays_honest(self, xy):
        # x = xyx - x(yx - 1) needs degree-3 products; a span built to 3
        # must not let a later bound-2 query borrow them
        x, y = xy.letter("x"), xy.letter("y")
        g1 = y * x - 1
        g2 = x * y * x
        gens = IdealGens(xy, [g1, g2])
        span = IdealSpan(gens)
        r3 = span.membership(x, 3)
        assert r3.member
        assert r3.certificate.evaluate(gens) == x
        res = span.membership(x, 2)
        assert not res.member
        assert res.searched_degree == 2
        # a bounded re-query that does fit the smaller bound still succeeds
        again = span.membership(g1, 2)
        assert again.member
        assert again.certificate.max_degree(gens) <= 2
