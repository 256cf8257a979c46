import json

import numpy as np
from django.test import SimpleTestCase

from ramsey_search.coloring import EdgeColoring, edge_count, new_coloring
from ramsey_search.exceptions import ParameterError, TrainingError
from ramsey_search.patterns import RewardReport
from ramsey_search.policy import (
    PolicyNetwork, elite_training_data, encode_observation, forward, init_policy, observation_matrix,
    observation_width, sample_action, train_step,
)
from ramsey_search.trainer import Trajectory


def trajectory(n, m, colors):
    return Trajectory(EdgeColoring(n, m, tuple(colors)), RewardReport((0,) * m))


def min_preactivation(policy, obs):
    h, smallest = obs, np.inf
    for w, b in zip(policy.weights[:-1], policy.biases[:-1]):
        z = h @ w + b
        smallest = min(smallest, float(np.abs(z).min()))
        h = np.maximum(z, 0.0)
    return smallest


def numeric_gradients(policy, obs, actions, h=1e-4):
    grads = []
    for param in policy.parameters():
        grad = np.zeros_like(param)
        for idx in np.ndindex(param.shape):
            saved = param[idx]
            param[idx] = saved + h
            plus, _ = policy.loss_and_gradients(obs, actions)
            param[idx] = saved - h
            minus, _ = policy.loss_and_gradients(obs, actions)
            param[idx] = saved
            grad[idx] = (plus - minus) / (2 * h)
        grads.append(grad)
    return grads


class InitPolicyTests(SimpleTestCase):

    def test_same_seed_same_weights(self):
        first = init_policy(5, 2, (8, 4), seed=3)
        second = init_policy(5, 2, (8, 4), seed=3)
        for a, b in zip(first.parameters(), second.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        first = init_policy(5, 2, (8, 4), seed=3)
        second = init_policy(5, 2, (8, 4), seed=4)
        self.assertFalse(np.array_equal(first.weights[0], second.weights[0]))

    def test_input_width(self):
        policy = init_policy(13, 2, (128, 64), seed=0)
        self.assertEqual(policy.input_width, 234)
        self.assertEqual(policy.layer_sizes, [234, 128, 64, 2])

    def test_weight_scale(self):
        policy = init_policy(6, 3, (10,), seed=1)
        bound = 1.0 / np.sqrt(observation_width(6, 3))
        self.assertLessEqual(np.abs(policy.weights[0]).max(), bound)

    def test_rejects_bad_layers(self):
        with self.assertRaises(ParameterError):
            init_policy(5, 2, (), seed=0)
        with self.assertRaises(ParameterError):
            init_policy(5, 2, (8, 0), seed=0)


class ObservationTests(SimpleTestCase):

    def test_empty_coloring(self):
        obs = encode_observation(new_coloring(3, 2), 0)
        expected = np.zeros(9)
        expected[6] = 1.0
        np.testing.assert_array_equal(obs, expected)

    def test_one_colored_edge(self):
        obs = encode_observation(new_coloring(3, 2).with_next_color(1), 1)
        self.assertEqual(list(np.flatnonzero(obs)), [1, 7])

    def test_complete_construction_rejected(self):
        with self.assertRaises(ParameterError):
            encode_observation(EdgeColoring(3, 2, (0, 1, 1)), 3)

    def test_prefix_must_match_next_edge(self):
        with self.assertRaises(ParameterError):
            encode_observation(new_coloring(3, 2).with_next_color(1), 0)

    def test_matrix_rows_match_single_encodings(self):
        colors = (2, 0, 1, 1, 0, 2)
        coloring = new_coloring(4, 3)
        matrix = observation_matrix(colors, 3)
        for k, color in enumerate(colors):
            np.testing.assert_array_equal(matrix[k], encode_observation(coloring, k))
            coloring = coloring.with_next_color(color)


class ForwardTests(SimpleTestCase):

    def test_output_is_a_distribution(self):
        rng = np.random.default_rng(0)
        policy = init_policy(5, 3, (16, 8), seed=2)
        colors = rng.integers(0, 3, size=edge_count(5))
        probs = forward(policy, observation_matrix(colors, 3))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)
        self.assertTrue(np.all(probs > 0) and np.all(probs < 1))

    def test_zero_weights_give_uniform(self):
        policy = init_policy(4, 3, (5,), seed=0)
        for param in policy.parameters():
            param[...] = 0.0
        np.testing.assert_allclose(policy.forward(encode_observation(new_coloring(4, 3), 0)), [1 / 3] * 3)

    def test_deterministic(self):
        obs = encode_observation(new_coloring(5, 2), 0)
        first = init_policy(5, 2, (8,), seed=9).forward(obs)
        second = init_policy(5, 2, (8,), seed=9).forward(obs)
        np.testing.assert_array_equal(first, second)

    def test_width_mismatch(self):
        with self.assertRaises(ParameterError):
            init_policy(5, 2, (8,), seed=0).forward(np.zeros(7))


class SampleActionTests(SimpleTestCase):

    def test_full_exploration_is_uniform(self):
        rng = np.random.default_rng(12)
        draws = np.array([sample_action([0.9, 0.1], 1.0, rng) for _ in range(10000)])
        self.assertLess(abs(draws.mean() - 0.5), 3 * np.sqrt(0.25 / 10000))

    def test_degenerate_distribution(self):
        rng = np.random.default_rng(13)
        self.assertTrue(all(sample_action([1.0, 0.0], 0.0, rng) == 0 for _ in range(1000)))

    def test_follows_distribution(self):
        rng = np.random.default_rng(14)
        draws = np.array([sample_action([0.25, 0.75], 0.0, rng) for _ in range(10000)])
        self.assertLess(abs(draws.mean() - 0.75), 3 * np.sqrt(0.75 * 0.25 / 10000))

    def test_same_stream_same_actions(self):
        first = [sample_action([0.3, 0.3, 0.4], 0.2, rng) for rng in [np.random.default_rng(5)] for _ in range(50)]
        second = [sample_action([0.3, 0.3, 0.4], 0.2, rng) for rng in [np.random.default_rng(5)] for _ in range(50)]
        self.assertEqual(first, second)

    def test_invalid_arguments(self):
        rng = np.random.default_rng(0)
        for dist in ([0.5, 0.6], [1.0], [-0.5, 1.5]):
            with self.assertRaises(ParameterError):
                sample_action(dist, 0.0, rng)
        with self.assertRaises(ParameterError):
            sample_action([0.5, 0.5], 1.5, rng)

    def test_non_finite_distribution_rejected(self):
        rng = np.random.default_rng(0)
        for dist in ([np.nan, np.nan], [np.nan, 1.0], [np.inf, 0.0], [1.0, -np.inf]):
            with self.subTest(dist=dist):
                with self.assertRaises(ParameterError):
                    sample_action(dist, 0.0, rng)


class GradientTests(SimpleTestCase):

    def test_backprop_matches_finite_differences(self):
        rng = np.random.default_rng(99)
        checked, seed = 0, 0
        while checked < 20:
            seed += 1
            n = int(rng.integers(3, 5))
            m = int(rng.integers(2, 4))
            hidden = tuple(int(size) for size in rng.integers(3, 7, size=int(rng.integers(1, 3))))
            policy = init_policy(n, m, hidden, seed=seed)
            elites = [trajectory(n, m, rng.integers(0, m, size=edge_count(n))) for _ in range(2)]
            obs, actions = elite_training_data(elites)
            # finite differences are meaningless across a ReLU kink
            if min_preactivation(policy, obs) < 1e-3:
                continue
            _, analytic = policy.loss_and_gradients(obs, actions)
            numeric = numeric_gradients(policy, obs, actions)
            for a, b in zip(analytic, numeric):
                error = np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-4)
                self.assertLess(error.max(), 1e-4, (n, m, hidden, seed))
            checked += 1


class TrainStepTests(SimpleTestCase):

    def test_overfits_a_single_trajectory(self):
        policy = init_policy(4, 2, (16,), seed=21)
        elite = trajectory(4, 2, (1, 0, 0, 1, 1, 0))
        obs, actions = elite_training_data([elite])

        losses = [train_step(policy, [elite], 1e-3) for _ in range(50)]
        self.assertTrue(all(b < a for a, b in zip(losses, losses[1:])))

        for _ in range(500):
            probs = policy.forward(obs)
            if np.all(probs[np.arange(len(actions)), actions] > 0.99):
                break
            train_step(policy, [elite], 1e-2)
        probs = policy.forward(obs)
        self.assertTrue(np.all(probs[np.arange(len(actions)), actions] > 0.99))
        np.testing.assert_array_equal(probs.argmax(axis=1), actions)

    def test_zero_learning_rate_keeps_weights(self):
        policy = init_policy(4, 2, (6,), seed=2)
        before = [p.copy() for p in policy.parameters()]
        loss = train_step(policy, [trajectory(4, 2, (0, 1, 0, 1, 0, 1))], 0.0)
        self.assertGreater(loss, 0.0)
        for a, b in zip(before, policy.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_empty_elites_rejected(self):
        with self.assertRaises(ParameterError):
            train_step(init_policy(4, 2, (6,), seed=2), [], 1e-3)

    def test_non_finite_weights_rejected(self):
        policy = init_policy(4, 2, (6,), seed=2)
        policy.weights[0][0, 0] = np.inf
        with self.assertRaises(TrainingError):
            policy.adam_step([np.zeros_like(p) for p in policy.parameters()], 1e-3)


class BlobTests(SimpleTestCase):

    def test_blob_restores_weights_and_optimizer(self):
        policy = init_policy(4, 2, (6, 5), seed=8)
        elite = trajectory(4, 2, (0, 1, 1, 0, 1, 0))
        for _ in range(3):
            train_step(policy, [elite], 1e-3)
        restored = PolicyNetwork.from_blob(json.loads(json.dumps(policy.to_blob())))
        self.assertEqual(restored.step, 3)
        for a, b in zip(policy.parameters() + policy.first_moments + policy.second_moments,
                        restored.parameters() + restored.first_moments + restored.second_moments):
            np.testing.assert_array_equal(a, b)
        train_step(policy, [elite], 1e-3)
        train_step(restored, [elite], 1e-3)
        for a, b in zip(policy.parameters(), restored.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_blob_shape_mismatch(self):
        blob = init_policy(4, 2, (6,), seed=8).to_blob()
        blob['layers'][0]['bias'] = blob['layers'][0]['bias'][:-1]
        with self.assertRaises(ParameterError):
            PolicyNetwork.from_blob(blob)
