import itertools

import pytest

from infinite_bins.automaton import (
    build_automaton,
    greedy_sync,
    shortest_sync_exact,
    synchronized_state,
    word_probability,
)
from infinite_bins.config import MoveWord, apply_move, apply_word
from infinite_bins.coupling import build_coupling_plan
from infinite_bins.errors import LetterTooLarge, NotSynchronizable, SubsetSpaceTooLarge
from infinite_bins.oracle import enumerate_configs


def brute_shortest(l, alphabet, max_len=12):
    """Try every word in length-then-lexicographic order."""
    states = list(enumerate_configs(l))
    for n in range(max_len + 1):
        for letters in itertools.product(sorted(alphabet), repeat=n):
            imgs = set()
            for x in states:
                for a in letters:
                    x = apply_move(x, a)
                imgs.add(x)
            if len(imgs) == 1:
                return list(letters), imgs.pop()
    return None


class TestBuild:
    def test_sizes(self):
        aut = build_automaton(3, [2, 3])
        assert aut.n_states == 4 and aut.delta.size == 8
        aut = build_automaton(1, [1])
        assert aut.n_states == 1 and aut.delta.tolist() == [[0]]

    @pytest.mark.parametrize("l", range(1, 8))
    def test_delta_matches_config_core(self, l):
        alphabet = list(range(1, l + 1))
        aut = build_automaton(l, alphabet)
        states = aut.states
        index = {s: i for i, s in enumerate(states)}
        for i, s in enumerate(states):
            for j, a in enumerate(alphabet):
                assert aut.delta[i, j] == index[apply_move(s, a)]

    def test_letter_too_large(self):
        with pytest.raises(LetterTooLarge):
            build_automaton(3, [4])


class TestExact:
    def test_l3_alphabet_1(self):
        res = shortest_sync_exact(build_automaton(3, [1]))
        assert res.length == 2 and str(res.terminal) == "[1,1,1]" and res.is_optimal

    def test_single_state(self):
        res = shortest_sync_exact(build_automaton(1, [1]))
        assert res.length == 0 and str(res.terminal) == "[1]"

    @pytest.mark.parametrize("l,alphabet", [(3, [2, 3]), (3, [1, 2]), (4, [2, 4]), (4, [3, 4]), (4, [1, 3]), (5, [2, 5])])
    def test_matches_brute_force(self, l, alphabet):
        res = shortest_sync_exact(build_automaton(l, alphabet))
        want = brute_shortest(l, alphabet)
        assert want is not None
        assert list(res.word.moves()) == want[0]
        assert res.terminal == want[1]

    def test_frozen_lengths(self):
        assert shortest_sync_exact(build_automaton(5, [2, 5])).length == 9
        assert shortest_sync_exact(build_automaton(5, [4, 5])).length == 15

    def test_not_synchronizable(self):
        # phi_l alone permutes the l-configurations
        with pytest.raises(NotSynchronizable):
            shortest_sync_exact(build_automaton(4, [4]))
        assert brute_shortest(4, [4], max_len=10) is None

    def test_subset_cap(self):
        with pytest.raises(SubsetSpaceTooLarge):
            shortest_sync_exact(build_automaton(6, [2, 6]))

    @pytest.mark.parametrize("k,l", [(k, l) for l in range(2, 6) for k in range(1, l)])
    def test_exact_not_longer_than_plan(self, k, l):
        aut = build_automaton(l, [k, l])
        plan = build_coupling_plan(k, l, l)
        assert shortest_sync_exact(aut).length <= plan.length
        assert synchronized_state(aut, plan.word) == plan.target


class TestGreedy:
    @pytest.mark.parametrize("l,alphabet", [(5, [2, 5]), (4, [2, 4]), (5, [3, 5]), (3, [1])])
    def test_valid_and_not_shorter_than_exact(self, l, alphabet):
        aut = build_automaton(l, alphabet)
        g = greedy_sync(aut)
        assert not g.is_optimal
        assert apply_word_all_equal(l, g.word)
        assert g.length >= shortest_sync_exact(aut).length

    def test_beyond_exact_range(self):
        aut = build_automaton(8, [3, 8])
        g = greedy_sync(aut)
        assert synchronized_state(aut, g.word) == g.terminal

    def test_not_synchronizable(self):
        with pytest.raises(NotSynchronizable):
            greedy_sync(build_automaton(4, [4]))


def apply_word_all_equal(l, word):
    return len({apply_word(x, word) for x in enumerate_configs(l)}) == 1


def test_word_probability_and_json():
    w = MoveWord.parse("2^5 2^1 5^4 2^3")
    assert word_probability(w, {2: 0.5, 5: 0.5}) == 0.5 ** 13
    assert word_probability(w, {2: 1.0}) == 0.0
    res = shortest_sync_exact(build_automaton(3, [1]))
    obj = res.to_json()
    assert obj == {"l": 3, "alphabet": [1], "method": "exact", "word": "1^2", "length": 2,
                   "terminal": "[1,1,1]", "optimal": True}
