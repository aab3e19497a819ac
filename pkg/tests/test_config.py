import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import configurations, lazy_configurations
from infinite_bins.config import (
    Configuration,
    LazyInfiniteConfiguration,
    MoveWord,
    apply_move,
    apply_move_infinite,
    apply_word,
    parse_configuration,
    parse_lazy,
    parse_word,
    project,
)
from infinite_bins.errors import MoveTooLarge, ParseError, ProjectionTooLarge

C = lambda *b: Configuration(b)  # noqa: E731
W = parse_word


def brute_move(bins, k):
    """Ball-by-ball reference: list each ball's bin, then move."""
    owner = [i for i, v in enumerate(bins) for _ in range(v)]  # left to right
    kth = owner[-k]
    out = list(bins)
    if kth == len(bins) - 1:
        out.append(1)
    else:
        out[kth + 1] += 1
    out[0] -= 1
    return tuple(v for v in out if v) if out[0] == 0 else tuple(out)


def compositions(n):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


class TestApplyMove:
    @pytest.mark.parametrize("bins,k,want", [
        ((1, 2, 2), 2, (2, 2, 1)),
        ((1, 1, 1), 1, (1, 1, 1)),
        ((2, 2, 1), 5, (1, 3, 1)),
        ((3,), 1, (2, 1)),
        ((2, 1), 1, (1, 1, 1)),
    ])
    def test_examples(self, bins, k, want):
        assert apply_move(Configuration(bins), k).bins == want

    def test_too_large(self):
        with pytest.raises(MoveTooLarge):
            apply_move(C(2, 2, 1), 6)

    @pytest.mark.parametrize("m", range(1, 8))
    def test_matches_ball_by_ball_reference(self, m):
        for bins in compositions(m):
            for k in range(1, m + 1):
                assert apply_move(Configuration(bins), k).bins == brute_move(bins, k)

    @given(configurations(), st.data())
    def test_conserves_balls_and_positivity(self, x, data):
        k = data.draw(st.integers(1, x.total))
        y = apply_move(x, k)
        assert y.total == x.total
        assert all(v >= 1 for v in y.bins)


class TestApplyMoveInfinite:
    def test_new_bin_on_empty_window(self):
        y = apply_move_infinite(LazyInfiniteConfiguration(1), 1)
        assert y.window == (1,) and y.shift == 1

    def test_deep_ball(self):
        y = apply_move_infinite(LazyInfiniteConfiguration(2, (2, 1)), 5)
        assert y.window == (3, 1) and y.shift == 0

    def test_materializes_constant_region(self):
        # ball 7 sits two bins into the base-2 region; its right neighbour gains a ball
        y = apply_move_infinite(LazyInfiniteConfiguration(2, (2, 1)), 7)
        assert y.window == (3, 2, 1)

    @given(lazy_configurations(), st.integers(1, 30))
    def test_adds_exactly_one_ball(self, x, k):
        y = apply_move_infinite(x, k)
        depth = max(len(x.window), len(y.window)) + 2
        before = sum(x.bin(j) for j in range(depth - (y.shift - x.shift)))
        after = sum(y.bin(j) for j in range(depth))
        assert after == before + 1
        assert all(y.bin(j) >= 1 for j in range(depth))

    @given(lazy_configurations(), st.integers(1, 30))
    def test_single_move_word_matches(self, x, k):
        assert apply_word(x, MoveWord.repeat(k, 1)) == apply_move_infinite(x, k)


class TestProject:
    @pytest.mark.parametrize("bins,n,want", [
        ((2, 2, 1), 3, (2, 1)),
        ((2, 2, 1), 5, (2, 2, 1)),
        ((2, 2, 1), 1, (1,)),
        ((4, 1), 3, (2, 1)),
    ])
    def test_examples(self, bins, n, want):
        assert project(Configuration(bins), n).bins == want

    def test_too_large(self):
        with pytest.raises(ProjectionTooLarge):
            project(C(2, 1), 4)

    def test_infinite(self):
        assert project(LazyInfiniteConfiguration(2, (3, 1)), 6).bins == (2, 3, 1)

    @given(configurations(), st.data())
    def test_idempotent(self, x, data):
        n = data.draw(st.integers(1, x.total))
        n2 = data.draw(st.integers(1, n))
        assert project(project(x, n), n2) == project(x, n2)


class TestCommutation:
    def test_exhaustive_small(self):
        for m in range(1, 8):
            for bins in compositions(m):
                x = Configuration(bins)
                for n in range(1, m + 1):
                    for k in range(1, n + 1):
                        assert project(apply_move(x, k), n) == apply_move(project(x, n), k)

    @given(configurations(max_total=40), st.data())
    def test_random(self, x, data):
        n = data.draw(st.integers(1, x.total))
        k = data.draw(st.integers(1, n))
        assert project(apply_move(x, k), n) == apply_move(project(x, n), k)

    @given(lazy_configurations(), st.integers(1, 12), st.data())
    def test_lazy_and_finite_agree(self, x, n, data):
        moves = data.draw(st.lists(st.integers(1, n), max_size=25))
        word = MoveWord.from_moves(moves)
        assert project(apply_word(x, word), n) == apply_word(project(x, n), word)


class TestWords:
    def test_parse_and_format(self):
        w = W("5^3 2 1^2")
        assert w.runs == ((5, 3), (2, 1), (1, 2))
        assert w.length == 6
        assert str(w) == "5^3 2^1 1^2"
        assert W(str(w)) == w

    @pytest.mark.parametrize("bad", ["0", "2^0", "a", "2^", "^3", "2^3^4"])
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            W(bad)

    def test_application_order_first_run_first(self):
        # composition phi_5^3 phi_2 applies phi_2 first
        x = C(2, 2, 2, 2)
        step = apply_move(x, 2)
        for _ in range(3):
            step = apply_move(step, 5)
        assert apply_word(x, W("2 5^3")) == step

    def test_examples(self):
        assert apply_word(C(1, 2, 2), W("2")) == C(2, 2, 1)
        assert apply_word(C(3), W("1^2")) == C(1, 1, 1)

    def test_run_length_is_transparent(self):
        x = C(3, 1, 2, 2)
        assert apply_word(x, W("3^1 3^1")) == apply_word(x, W("3^2"))
        lazy = LazyInfiniteConfiguration(2, (1, 3))
        assert apply_word(lazy, W("4 4")) == apply_word(lazy, W("4^2"))

    def test_word_too_large(self):
        with pytest.raises(MoveTooLarge):
            apply_word(C(2, 1), W("7"))

    def test_empty_word(self):
        assert W("").length == 0
        assert apply_word(C(2, 1), W("")) == C(2, 1)

    def test_merged(self):
        assert W("2^5 2^1 5^4").merged() == W("2^6 5^4")


class TestTextFormats:
    def test_configuration_roundtrip(self):
        x = parse_configuration("[2,2,1]")
        assert x.bins == (2, 2, 1) and x.total == 5
        assert str(x) == "[2,2,1]"
        assert parse_configuration(" [ 3 , 1 ] ") == C(3, 1)

    @pytest.mark.parametrize("bad", ["2,2", "[]", "[0,1]", "[a]", "[1,-1]"])
    def test_configuration_errors(self, bad):
        with pytest.raises(ParseError):
            parse_configuration(bad)

    def test_lazy(self):
        assert parse_lazy("base:3") == LazyInfiniteConfiguration(3)
        assert parse_lazy("base:2[2,1]") == LazyInfiniteConfiguration(2, (2, 1))
        with pytest.raises(ParseError):
            parse_lazy("basis:2")

    def test_invariants(self):
        with pytest.raises(ValueError):
            Configuration(())
        with pytest.raises(ValueError):
            Configuration((1, 0))

    def test_lazy_semantic_equality(self):
        assert LazyInfiniteConfiguration(2, (2, 3, 1)) == LazyInfiniteConfiguration(2, (3, 1))
        assert LazyInfiniteConfiguration(2, (3, 1)) != LazyInfiniteConfiguration(2, (3, 1), shift=1)

    def test_all_small_configurations_are_compositions(self):
        got = {tuple(c) for c in compositions(4)}
        want = {p for r in range(1, 5) for p in itertools.product(range(1, 5), repeat=r) if sum(p) == 4}
        assert got == want
