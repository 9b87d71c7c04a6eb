"""Coupled dictionary initialization, atom updates and training."""

import logging

import numpy as np
import pytest

from src.errors import DataError, DimensionError, NumericalError
from src.models.dictionary import CoupledDictionary, TrainConfig
from src.tools import dictionary_tools
from src.tools.dictionary_tools import (
    atom_support,
    coding_cost,
    full_error,
    init_dictionary,
    objective,
    restricted_error,
    train,
    update_atom_pair,
    update_cost,
)


def _unit(v):
    return v / np.linalg.norm(v)


@pytest.fixture
def patch_pair(rng):
    x_ms = rng.standard_normal((12, 60))
    x_b = x_ms + 0.3 * rng.standard_normal((12, 60))
    return x_ms - x_ms.mean(axis=0), x_b - x_b.mean(axis=0)


class TestInitDictionary:
    def test_atoms_are_unit_and_shared(self, patch_pair):
        dictionary = init_dictionary(*patch_pair, TrainConfig(atom_count=20, sparsity=3, seed=3))
        assert dictionary.max_norm_deviation() < 1e-9
        np.testing.assert_array_equal(dictionary.d_ms, dictionary.d_b)

    def test_atoms_are_sampled_averaged_patches(self, patch_pair):
        x_ms, x_b = patch_pair
        dictionary = init_dictionary(x_ms, x_b, TrainConfig(atom_count=5, sparsity=2, seed=0))
        averaged = (x_ms + x_b) / 2.0
        normalized = averaged / np.linalg.norm(averaged, axis=0)
        for n in range(5):
            matches = np.isclose(np.abs(normalized.T @ dictionary.d_ms[:, n]), 1.0, atol=1e-12)
            assert matches.any()

    def test_same_seed_same_dictionary(self, patch_pair):
        cfg = TrainConfig(atom_count=10, sparsity=2, seed=9)
        first = init_dictionary(*patch_pair, cfg)
        second = init_dictionary(*patch_pair, cfg)
        np.testing.assert_array_equal(first.d_ms, second.d_ms)

    def test_more_atoms_than_patches_warns(self, rng, caplog):
        x = rng.standard_normal((6, 4))
        with caplog.at_level(logging.WARNING):
            dictionary = init_dictionary(x, x, TrainConfig(atom_count=10, sparsity=2))
        assert dictionary.atom_count == 10
        assert dictionary.max_norm_deviation() < 1e-9
        assert "only 4 training patches" in caplog.text

    def test_all_zero_data(self):
        x = np.zeros((6, 8))
        with pytest.raises(DataError):
            init_dictionary(x, x, TrainConfig(atom_count=4, sparsity=2))


class TestErrors:
    def test_restricted_error_adds_back_one_atom(self, rng):
        x = rng.standard_normal((5, 7))
        d = rng.standard_normal((5, 3))
        codes = np.zeros((3, 7))
        codes[1, [0, 4]] = [0.5, -2.0]
        codes[2, [1, 4]] = [1.0, 3.0]
        support = atom_support(codes, 1)
        np.testing.assert_array_equal(support, [0, 4])

        restricted = restricted_error(x, d, codes, 1, support)
        without = codes.copy()
        without[1] = 0.0
        np.testing.assert_allclose(restricted, (x - d @ without)[:, [0, 4]], atol=1e-12)

    def test_restricted_error_rejects_empty_support(self, rng):
        x = rng.standard_normal((5, 7))
        with pytest.raises(DimensionError):
            restricted_error(x, rng.standard_normal((5, 3)), np.zeros((3, 7)), 0, np.array([], dtype=int))

    def test_full_error_shape_check(self, rng):
        with pytest.raises(DimensionError):
            full_error(np.ones((5, 7)), np.ones((5, 3)), np.ones((4, 7)))


class TestUpdateAtomPair:
    def test_rank_one_errors_are_a_fixed_point(self, rng):
        d_ms, d_b = _unit(rng.standard_normal(8)), _unit(rng.standard_normal(8))
        alpha = rng.standard_normal(5)
        new_ms, new_b, new_row = update_atom_pair(
            np.outer(d_ms, alpha), np.outer(d_b, alpha), alpha, empty=False
        )
        np.testing.assert_allclose(new_ms, d_ms, atol=1e-12)
        np.testing.assert_allclose(new_b, d_b, atol=1e-12)
        np.testing.assert_allclose(new_row, alpha, atol=1e-12)

    def test_update_never_increases_the_atom_error(self, rng):
        d_ms, d_b = _unit(rng.standard_normal(8)), _unit(rng.standard_normal(8))
        alpha = rng.standard_normal(6)
        # restricted errors as the sweep forms them: the current atom's share plus the rest
        e_ms = np.outer(d_ms, alpha) + 0.5 * rng.standard_normal((8, 6))
        e_b = np.outer(d_b, alpha) + 0.5 * rng.standard_normal((8, 6))

        def cost(a, b, row):
            return np.sum((e_ms - np.outer(a, row)) ** 2) + np.sum((e_b - np.outer(b, row)) ** 2)

        new_ms, new_b, new_row = update_atom_pair(e_ms, e_b, alpha, empty=False)
        assert cost(new_ms, new_b, new_row) <= cost(d_ms, d_b, alpha) + 1e-12
        assert cost(new_ms, new_b, new_row) <= cost(new_ms, new_b, alpha) + 1e-12
        assert np.linalg.norm(new_ms) == pytest.approx(1.0)
        assert np.linalg.norm(new_b) == pytest.approx(1.0)

    def test_empty_support_uses_column_mean(self, rng):
        e_ms = rng.standard_normal((4, 9)) + 1.0
        e_b = rng.standard_normal((4, 9)) - 1.0
        row = np.zeros(0)
        new_ms, new_b, new_row = update_atom_pair(e_ms, e_b, row, empty=True)
        np.testing.assert_allclose(new_ms, _unit(e_ms.mean(axis=1)))
        np.testing.assert_allclose(new_b, _unit(e_b.mean(axis=1)))
        assert new_row.size == 0

    def test_empty_support_with_zero_error_stays_unit(self):
        new_ms, new_b, _ = update_atom_pair(
            np.zeros((4, 3)), np.zeros((4, 3)), np.zeros(0), empty=True,
            rng=np.random.default_rng(1),
        )
        assert np.linalg.norm(new_ms) == pytest.approx(1.0)
        assert np.linalg.norm(new_b) == pytest.approx(1.0)

    def test_vanishing_direction(self):
        with pytest.raises(NumericalError):
            update_atom_pair(np.zeros((4, 3)), np.ones((4, 3)), np.ones(3), empty=False)


class TestTrain:
    def test_sweep_does_not_increase_objective(self, patch_pair):
        cfg = TrainConfig(atom_count=16, sparsity=3, rounds=4, seed=2)
        dictionary, codes, trace = train(*patch_pair, cfg)
        assert trace.rounds == 4
        for coded, swept in zip(trace.coded_objectives, trace.objectives):
            assert swept <= coded + 1e-9
        assert trace.initial_objective == trace.coded_objectives[0]

    def test_returned_codes_match_final_objective(self, patch_pair):
        cfg = TrainConfig(atom_count=16, sparsity=3, rounds=2, seed=2)
        dictionary, codes, trace = train(*patch_pair, cfg)
        assert objective(*patch_pair, dictionary, codes) == pytest.approx(trace.final_objective, rel=1e-10)
        assert codes.max_support <= 3

    def test_atoms_stay_unit_norm(self, patch_pair):
        dictionary, _, _ = train(*patch_pair, TrainConfig(atom_count=16, sparsity=3, rounds=3, seed=5))
        assert dictionary.max_norm_deviation() < 1e-9

    def test_same_seed_same_result(self, patch_pair):
        cfg = TrainConfig(atom_count=12, sparsity=2, rounds=2, seed=11)
        first, first_codes, _ = train(*patch_pair, cfg)
        second, second_codes, _ = train(*patch_pair, cfg)
        np.testing.assert_array_equal(first.d_ms, second.d_ms)
        np.testing.assert_array_equal(first.d_b, second.d_b)
        np.testing.assert_array_equal(first_codes.to_dense(), second_codes.to_dense())

    def test_data_spanned_by_initial_dictionary_reaches_zero(self, rng):
        q_ms, _ = np.linalg.qr(rng.standard_normal((10, 4)))
        q_b, _ = np.linalg.qr(rng.standard_normal((10, 4)))
        codes = np.zeros((4, 30))
        for m in range(30):
            codes[m % 4, m] = rng.uniform(0.5, 2.0)
        x_ms, x_b = q_ms @ codes, q_b @ codes
        initial = CoupledDictionary(d_ms=q_ms, d_b=q_b)
        _, _, trace = train(x_ms, x_b, TrainConfig(atom_count=4, sparsity=1, rounds=2), initial=initial)
        assert trace.final_objective == pytest.approx(0.0, abs=1e-16)

    def test_initial_dictionary_must_fit(self, patch_pair, rng):
        initial = CoupledDictionary(
            d_ms=np.eye(12)[:, :5], d_b=np.eye(12)[:, :5]
        )
        with pytest.raises(DimensionError):
            train(*patch_pair, TrainConfig(atom_count=6, sparsity=2, rounds=1), initial=initial)

    def test_costs_reported(self, patch_pair):
        _, _, trace = train(*patch_pair, TrainConfig(atom_count=8, sparsity=2, rounds=1))
        assert trace.coding_cost == coding_cost(12, 60, 8, 2)
        assert trace.update_cost == update_cost(12, 60)
        summary = trace.summary()
        assert summary["rounds"] == 1
        assert "round_seconds" not in summary

    @pytest.mark.slow
    def test_objective_drops_on_larger_training_set(self, rng):
        x_ms = rng.standard_normal((16, 500))
        x_b = 0.5 * x_ms + rng.standard_normal((16, 500))
        cfg = TrainConfig(atom_count=32, sparsity=3, rounds=10, seed=4)
        _, _, trace = train(x_ms, x_b, cfg)
        assert trace.final_objective < trace.initial_objective

    @pytest.mark.slow
    def test_training_on_sparse_pairs_halves_the_objective(self):
        rng = np.random.default_rng(42)
        p, q, atoms, sparsity = 32, 500, 64, 3
        true_ms = rng.standard_normal((p, atoms))
        true_b = rng.standard_normal((p, atoms))
        true_ms /= np.linalg.norm(true_ms, axis=0)
        true_b /= np.linalg.norm(true_b, axis=0)
        codes = np.zeros((atoms, q))
        for m in range(q):
            support = rng.choice(atoms, size=sparsity, replace=False)
            codes[support, m] = rng.uniform(0.5, 2.0, size=sparsity) * rng.choice([-1.0, 1.0], size=sparsity)
        x_ms = true_ms @ codes + 0.01 * rng.standard_normal((p, q))
        x_b = true_b @ codes + 0.01 * rng.standard_normal((p, q))

        cfg = TrainConfig(atom_count=atoms, sparsity=sparsity, rounds=20, seed=42)
        dictionary, _, trace = train(x_ms, x_b, cfg)
        assert trace.final_objective <= 0.5 * trace.initial_objective
        assert dictionary.max_norm_deviation() < 1e-9


class TestSweepSteps:
    """Objective after every single atom step of every round."""

    @pytest.fixture
    def recorded(self, patch_pair, monkeypatch):
        steps, norms, arrays = [], [], {}
        real_sweep = dictionary_tools._sweep
        real_update = dictionary_tools.update_atom_pair

        def current():
            return dictionary_tools._pair_objective(*arrays["state"])

        def sweep(x_ms, x_b, d_ms, d_b, dense, cfg, rng):
            arrays["state"] = (x_ms, x_b, d_ms, d_b, dense)
            steps.append([current()])
            counts = real_sweep(x_ms, x_b, d_ms, d_b, dense, cfg, rng)
            steps[-1].append(current())
            norms.append(max(
                np.max(np.abs(np.linalg.norm(d_ms, axis=0) - 1.0)),
                np.max(np.abs(np.linalg.norm(d_b, axis=0) - 1.0)),
            ))
            return counts

        def update(*args, **kwargs):
            steps[-1].append(current())
            return real_update(*args, **kwargs)

        monkeypatch.setattr(dictionary_tools, "_sweep", sweep)
        monkeypatch.setattr(dictionary_tools, "update_atom_pair", update)
        cfg = TrainConfig(atom_count=16, sparsity=3, rounds=5, seed=2)
        _, _, trace = train(*patch_pair, cfg)
        return steps, norms, trace

    def test_no_atom_step_increases_the_objective(self, recorded):
        steps, _, trace = recorded
        assert len(steps) == 5
        for values in steps:
            # one value before the sweep, one per atom, one after
            assert len(values) >= 16 + 2
            for before, after in zip(values, values[1:]):
                assert after <= before + 1e-9 * max(1.0, before)

    def test_sweep_bounds_match_the_trace(self, recorded):
        steps, _, trace = recorded
        for values, coded, swept in zip(steps, trace.coded_objectives, trace.objectives):
            assert values[0] == pytest.approx(coded, rel=1e-12)
            assert values[-1] == pytest.approx(swept, rel=1e-12)

    def test_atoms_are_unit_after_every_round(self, recorded):
        _, norms, _ = recorded
        assert len(norms) == 5
        assert max(norms) <= 1e-9
