# ramsey_search/policy.py
"""
Feed-forward policy that maps a construction observation to a distribution
over colors, trained by cross-entropy on elite trajectories.

Observation layout for K_n with E edges and m colors (width E*m + E):
  [0, E*m)        one-hot color of each already-colored edge, zeros otherwise
  [E*m, E*m + E)  one-hot position of the edge about to be colored
"""
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coloring import UNCOLORED, EdgeColoring, edge_count
from .exceptions import ParameterError, TrainingError

logger = logging.getLogger(__name__)

LOGIT_CLAMP = 30.0
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
BLOB_FORMAT = 'policy-v1'


def observation_width(n: int, m: int) -> int:
    edges = edge_count(n)
    return edges * m + edges


def encode_observation(coloring: EdgeColoring, next_edge: int) -> np.ndarray:
    """Observation for coloring edge `next_edge` when edges 0..next_edge-1 are colored"""
    edges, m = coloring.edge_count, coloring.m
    if not 0 <= next_edge < edges:
        raise ParameterError(f"next edge {next_edge} outside 0..{edges - 1}; construction is complete")
    if coloring.colored_count != next_edge:
        raise ParameterError(
            f"observation for edge {next_edge} needs exactly edges 0..{next_edge - 1} colored, "
            f"found {coloring.colored_count} colored"
        )
    obs = np.zeros(edges * m + edges)
    for k, color in enumerate(coloring.colors[:next_edge]):
        obs[k * m + color] = 1.0
    obs[edges * m + next_edge] = 1.0
    return obs


def observation_matrix(colors: Sequence[int], m: int) -> np.ndarray:
    """Row k is the observation seen before choosing colors[k]"""
    edges = len(colors)
    if UNCOLORED in colors:
        raise ParameterError("trajectory coloring must be complete")
    obs = np.zeros((edges, edges * m + edges))
    for k, color in enumerate(colors):
        # every later step sees this edge colored
        obs[k + 1:, k * m + color] = 1.0
        obs[k, edges * m + k] = 1.0
    return obs


def choose_actions(probs: np.ndarray, epsilon: float, uniforms: np.ndarray) -> np.ndarray:
    """
    Colors for a block of rows of `probs` given two uniforms per row: the first
    decides whether the action is fully random, the second picks the color.
    """
    m = probs.shape[-1]
    explore = uniforms[:, 0] < epsilon
    random_pick = np.minimum((uniforms[:, 1] * m).astype(np.int64), m - 1)
    cdf = np.cumsum(probs, axis=-1)
    sampled = np.minimum((cdf <= uniforms[:, 1:2]).sum(axis=-1), m - 1)
    return np.where(explore, random_pick, sampled)


def sample_action(dist: Sequence[float], epsilon: float, rng: np.random.Generator) -> int:
    """With probability epsilon a uniform color, otherwise a draw from dist"""
    dist = np.asarray(dist, dtype=np.float64)
    if (dist.ndim != 1 or dist.size < 2 or not np.all(np.isfinite(dist)) or np.any(dist < 0)
            or abs(dist.sum() - 1.0) > 1e-6):
        raise ParameterError(f"not a probability distribution over colors: {dist.tolist()}")
    if not 0.0 <= epsilon <= 1.0:
        raise ParameterError(f"epsilon must lie in [0, 1], got {epsilon}")
    uniforms = rng.random((1, 2))
    return int(choose_actions(dist[None, :], epsilon, uniforms)[0])


class PolicyNetwork:
    """
    Dense network: ReLU hidden layers, softmax output over m colors, with its
    own Adam state. forward() only reads the weights; adam_step() mutates them.
    """

    def __init__(self, n: int, m: int, weights: List[np.ndarray], biases: List[np.ndarray]):
        self.n = n
        self.m = m
        self.weights = weights
        self.biases = biases
        self.step = 0
        self.first_moments = [np.zeros_like(p) for p in self.parameters()]
        self.second_moments = [np.zeros_like(p) for p in self.parameters()]

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_width(self) -> int:
        return self.weights[0].shape[0]

    def parameters(self) -> List[np.ndarray]:
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def copy(self) -> 'PolicyNetwork':
        clone = PolicyNetwork(self.n, self.m, [w.copy() for w in self.weights],
                              [b.copy() for b in self.biases])
        clone.step = self.step
        clone.first_moments = [a.copy() for a in self.first_moments]
        clone.second_moments = [a.copy() for a in self.second_moments]
        return clone

    def _logits(self, obs: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], np.ndarray]:
        activations = [obs]
        h = obs
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
            activations.append(h)
        raw = h @ self.weights[-1] + self.biases[-1]
        return np.clip(raw, -LOGIT_CLAMP, LOGIT_CLAMP), activations, raw

    @staticmethod
    def _softmax(logits: np.ndarray) -> np.ndarray:
        shifted = np.exp(logits - logits.max(axis=-1, keepdims=True))
        return shifted / shifted.sum(axis=-1, keepdims=True)

    def forward(self, obs: np.ndarray) -> np.ndarray:
        """Color distribution for one observation (1-D) or one per row (2-D)"""
        obs = np.asarray(obs, dtype=np.float64)
        if obs.shape[-1] != self.input_width:
            raise ParameterError(f"observation width {obs.shape[-1]} does not match network input {self.input_width}")
        single = obs.ndim == 1
        logits, _, _ = self._logits(obs[None, :] if single else obs)
        probs = self._softmax(logits)
        return probs[0] if single else probs

    def loss_and_gradients(self, obs: np.ndarray, actions: np.ndarray) -> Tuple[float, List[np.ndarray]]:
        """Mean cross-entropy of the actions and its gradient, ordered like parameters()"""
        logits, activations, raw = self._logits(obs)
        probs = self._softmax(logits)
        rows = obs.shape[0]
        picked = probs[np.arange(rows), actions]
        loss = float(-np.mean(np.log(picked)))

        delta = probs.copy()
        delta[np.arange(rows), actions] -= 1.0
        delta /= rows
        delta *= (np.abs(raw) < LOGIT_CLAMP)

        grads_w: List[np.ndarray] = [None] * len(self.weights)
        grads_b: List[np.ndarray] = [None] * len(self.weights)
        for layer in range(len(self.weights) - 1, -1, -1):
            grads_w[layer] = activations[layer].T @ delta
            grads_b[layer] = delta.sum(axis=0)
            if layer:
                delta = (delta @ self.weights[layer].T) * (activations[layer] > 0)
        grads = []
        for gw, gb in zip(grads_w, grads_b):
            grads.extend((gw, gb))
        return loss, grads

    def adam_step(self, grads: List[np.ndarray], learning_rate: float) -> None:
        self.step += 1
        correction1 = 1.0 - ADAM_BETA1 ** self.step
        correction2 = 1.0 - ADAM_BETA2 ** self.step
        for param, grad, m1, m2 in zip(self.parameters(), grads, self.first_moments, self.second_moments):
            m1 *= ADAM_BETA1
            m1 += (1.0 - ADAM_BETA1) * grad
            m2 *= ADAM_BETA2
            m2 += (1.0 - ADAM_BETA2) * grad * grad
            param -= learning_rate * (m1 / correction1) / (np.sqrt(m2 / correction2) + ADAM_EPSILON)
        if not all(np.all(np.isfinite(p)) for p in self.parameters()):
            raise TrainingError(f"non-finite weights after optimizer step {self.step}")

    # Checkpoint blob

    def to_blob(self) -> Dict[str, Any]:
        """Layer shapes followed by row-major values, optimizer moments included"""
        return {
            'format': BLOB_FORMAT,
            'n': self.n,
            'm': self.m,
            'layers': [
                {'shape': list(w.shape), 'weights': w.ravel().tolist(), 'bias': b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
            'adam': {
                'step': self.step,
                'first': [a.ravel().tolist() for a in self.first_moments],
                'second': [a.ravel().tolist() for a in self.second_moments],
            },
        }

    @classmethod
    def from_blob(cls, blob: Dict[str, Any]) -> 'PolicyNetwork':
        if blob.get('format') != BLOB_FORMAT:
            raise ParameterError(f"unknown policy blob format {blob.get('format')!r}")
        weights, biases = [], []
        for k, layer in enumerate(blob['layers']):
            rows, cols = layer['shape']
            w = np.array(layer['weights'], dtype=np.float64)
            b = np.array(layer['bias'], dtype=np.float64)
            if w.size != rows * cols or b.size != cols:
                raise ParameterError(f"layer {k} values do not match shape {rows}x{cols}")
            weights.append(w.reshape(rows, cols))
            biases.append(b)
        policy = cls(blob['n'], blob['m'], weights, biases)
        if policy.input_width != observation_width(policy.n, policy.m) or policy.layer_sizes[-1] != policy.m:
            raise ParameterError("layer shapes do not match the observation width and color count")
        adam = blob['adam']
        policy.step = int(adam['step'])
        params = policy.parameters()
        if len(adam['first']) != len(params) or len(adam['second']) != len(params):
            raise ParameterError("optimizer state does not match the layer count")
        policy.first_moments = [np.array(a, dtype=np.float64).reshape(p.shape) for a, p in zip(adam['first'], params)]
        policy.second_moments = [np.array(a, dtype=np.float64).reshape(p.shape) for a, p in zip(adam['second'], params)]
        return policy


def init_policy(n: int, m: int, hidden_sizes: Sequence[int], seed: int) -> PolicyNetwork:
    """Weights uniform in +-1/sqrt(fan_in), fully determined by seed"""
    if n < 2 or m < 2:
        raise ParameterError(f"policy needs n >= 2 and m >= 2, got n={n}, m={m}")
    if not hidden_sizes or any(size < 1 for size in hidden_sizes):
        raise ParameterError(f"hidden layer sizes must be non-empty and positive, got {list(hidden_sizes)}")
    rng = np.random.default_rng(seed)
    sizes = [observation_width(n, m)] + list(hidden_sizes) + [m]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-scale, scale, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-scale, scale, size=fan_out))
    return PolicyNetwork(n, m, weights, biases)


def forward(policy: PolicyNetwork, obs: np.ndarray) -> np.ndarray:
    return policy.forward(obs)


def elite_training_data(elites) -> Tuple[np.ndarray, np.ndarray]:
    """Stack the (observation, action) pairs of every elite trajectory"""
    blocks = [observation_matrix(t.coloring.colors, t.coloring.m) for t in elites]
    actions = np.concatenate([np.asarray(t.coloring.colors, dtype=np.int64) for t in elites])
    return np.vstack(blocks), actions


def train_step(policy: PolicyNetwork, elites, learning_rate: float,
               data: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> float:
    """One Adam step on the mean cross-entropy over all elite steps; returns the pre-step loss"""
    if not elites:
        raise ParameterError("cannot train on an empty elite set")
    obs, actions = data if data is not None else elite_training_data(elites)
    loss, grads = policy.loss_and_gradients(obs, actions)
    policy.adam_step(grads, learning_rate)
    logger.debug("train step %d: loss %.6f on %d pairs", policy.step, loss, len(actions))
    return loss
