# ramsey_search/trainer.py
"""
Cross-entropy search for critical colorings.

Each batch colors K_n edge by edge with the policy, scores every coloring by
its number of forbidden monochromatic copies, trains on the elite fraction,
carries the very best into the next batch and raises the share of random
actions while the best reward stagnates.

Randomness: episode j of batch b reads its own stream derived from
(seed, b * batch_size + j), so results do not depend on how episodes are
spread over workers.
"""
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .certify import Certificate, verify_critical
from .coloring import EdgeColoring, edge_count, from_compact, to_compact
from .exceptions import CheckpointError, ConfigError, RamseyError
from .patterns import PatternGraph, RewardReport, parse_pattern_spec, reward
from .policy import (
    PolicyNetwork, choose_actions, elite_training_data, init_policy, observation_matrix,
    observation_width, train_step,
)

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 'ramsey-cema-checkpoint-v1'
DEFAULT_CHUNK = 64


@dataclass(frozen=True)
class TrainerConfig:
    n: int
    m: int
    patterns: Tuple[PatternGraph, ...]
    batch_size: int = 400
    learn_pct: float = 0.10
    survive_pct: float = 0.02
    epsilon_initial: float = 0.0
    epsilon_step: float = 0.05
    epsilon_max: float = 0.5
    stagnation_window: int = 50
    max_batches: int = 10000
    seed: int = 0
    hidden_sizes: Tuple[int, ...] = (128, 64)
    learning_rate: float = 1e-3
    train_steps: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError('n', f"need at least 2 vertices, got {self.n}")
        if self.m < 2:
            raise ConfigError('m', f"need at least 2 colors, got {self.m}")
        if len(self.patterns) != self.m:
            raise ConfigError('pattern', f"expected {self.m} patterns, one per color, got {len(self.patterns)}")
        if self.batch_size < 2:
            raise ConfigError('batch_size', f"must be at least 2, got {self.batch_size}")
        if not 0.0 < self.learn_pct <= 1.0:
            raise ConfigError('learn_pct', f"must lie in (0, 1], got {self.learn_pct}")
        if not 0.0 < self.survive_pct <= self.learn_pct:
            raise ConfigError('survive_pct', f"must lie in (0, learn_pct={self.learn_pct}], got {self.survive_pct}")
        for key in ('epsilon_initial', 'epsilon_step', 'epsilon_max'):
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise ConfigError(key, f"must lie in [0, 1], got {getattr(self, key)}")
        if self.epsilon_initial > self.epsilon_max:
            raise ConfigError('epsilon_initial', f"exceeds epsilon_max={self.epsilon_max}")
        if self.stagnation_window < 1:
            raise ConfigError('stagnation_window', f"must be at least 1, got {self.stagnation_window}")
        if self.max_batches < 0:
            raise ConfigError('max_batches', f"must not be negative, got {self.max_batches}")
        if self.seed < 0:
            raise ConfigError('seed', f"must not be negative, got {self.seed}")
        if not self.hidden_sizes or any(size < 1 for size in self.hidden_sizes):
            raise ConfigError('hidden', f"layer sizes must be positive, got {list(self.hidden_sizes)}")
        if self.learning_rate < 0:
            raise ConfigError('learning_rate', f"must not be negative, got {self.learning_rate}")
        if self.train_steps < 1:
            raise ConfigError('train_steps', f"must be at least 1, got {self.train_steps}")

    @property
    def edge_count(self) -> int:
        return edge_count(self.n)

    def with_seed(self, seed: int) -> 'TrainerConfig':
        return dataclasses.replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data['patterns'] = [p.spec for p in self.patterns]
        data['hidden_sizes'] = list(self.hidden_sizes)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrainerConfig':
        values = dict(data)
        values['patterns'] = tuple(parse_pattern_spec(spec) for spec in values['patterns'])
        values['hidden_sizes'] = tuple(values['hidden_sizes'])
        return cls(**values)


@dataclass(frozen=True)
class Trajectory:
    """
    One constructed coloring. The action at step k is the color of edge k and
    the observation at step k follows from the first k actions, so both are
    derived from the coloring instead of being stored.
    """

    coloring: EdgeColoring
    report: RewardReport
    stream_id: Optional[int] = None

    @property
    def reward(self) -> int:
        return self.report.total

    @property
    def actions(self) -> Tuple[int, ...]:
        return self.coloring.colors

    def observations(self) -> np.ndarray:
        return observation_matrix(self.coloring.colors, self.coloring.m)

    def steps(self) -> Iterable[Tuple[np.ndarray, int]]:
        return zip(self.observations(), self.actions)


@dataclass
class BatchState:
    index: int
    trajectories: List[Trajectory]
    epsilon: float
    best: Optional[Trajectory]
    stagnation: int
    improved: bool

    @property
    def best_reward(self) -> Optional[int]:
        return self.best.reward if self.best else None

    @property
    def best_coloring(self) -> Optional[EdgeColoring]:
        return self.best.coloring if self.best else None

    @property
    def min_reward(self) -> int:
        return min(t.reward for t in self.trajectories)

    @property
    def mean_reward(self) -> float:
        return sum(t.reward for t in self.trajectories) / len(self.trajectories)


@dataclass(frozen=True)
class BatchStats:
    index: int
    min_reward: int
    mean_reward: float
    best_reward: int
    epsilon: float

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass
class SearchOutcome:
    status: str
    best: Optional[Trajectory]
    batches_run: int
    stats: List[BatchStats] = field(default_factory=list)
    certificate: Optional[Certificate] = None

    @property
    def found(self) -> bool:
        return self.certificate is not None

    @property
    def best_reward(self) -> Optional[int]:
        return self.best.reward if self.best else None

    @property
    def best_coloring(self) -> Optional[EdgeColoring]:
        return self.best.coloring if self.best else None

    @property
    def epsilon_trace(self) -> List[float]:
        return [s.epsilon for s in self.stats]


# Rollouts

def episode_rng(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream_id,)))


def _rollout_block(policy: PolicyNetwork, patterns: Sequence[PatternGraph], epsilon: float,
                   uniforms: np.ndarray, stream_ids: Sequence[Optional[int]]) -> List[Trajectory]:
    """Roll out len(stream_ids) episodes in lockstep; uniforms has shape (episodes, E, 2)"""
    episodes, edges = uniforms.shape[0], uniforms.shape[1]
    m = policy.m
    rows = np.arange(episodes)
    obs = np.zeros((episodes, observation_width(policy.n, m)))
    colors = np.zeros((episodes, edges), dtype=np.int64)
    for k in range(edges):
        obs[:, edges * m + k] = 1.0
        actions = choose_actions(policy.forward(obs), epsilon, uniforms[:, k, :])
        colors[:, k] = actions
        obs[:, edges * m + k] = 0.0
        obs[rows, k * m + actions] = 1.0

    trajectories = []
    for row, stream_id in zip(colors, stream_ids):
        coloring = EdgeColoring(policy.n, m, tuple(int(c) for c in row))
        trajectories.append(Trajectory(coloring, reward(coloring, patterns), stream_id))
    return trajectories


def rollout_episode(policy: PolicyNetwork, patterns: Sequence[PatternGraph], epsilon: float,
                    rng: np.random.Generator) -> Trajectory:
    """Color all E edges in lexicographic order and score the result"""
    uniforms = rng.random((edge_count(policy.n), 2))
    return _rollout_block(policy, patterns, epsilon, uniforms[None], [None])[0]


def _rollout_chunk(task) -> List[Trajectory]:
    policy, patterns, epsilon, seed, stream_ids = task
    edges = edge_count(policy.n)
    uniforms = np.stack([episode_rng(seed, s).random((edges, 2)) for s in stream_ids])
    return _rollout_block(policy, patterns, epsilon, uniforms, stream_ids)


def generate_batch(policy: PolicyNetwork, config: TrainerConfig, batch_index: int, epsilon: float,
                   survivors: Sequence[Trajectory] = (), best: Optional[Trajectory] = None,
                   stagnation: int = 0, executor=None, chunk_size: int = DEFAULT_CHUNK) -> BatchState:
    """
    batch_size fresh rollouts after the carried survivors, all scored.
    Survivors come first so they win reward ties in selection.
    """
    first = batch_index * config.batch_size
    stream_ids = list(range(first, first + config.batch_size))
    snapshot = PolicyNetwork(policy.n, policy.m, policy.weights, policy.biases)
    tasks = [
        (snapshot, config.patterns, epsilon, config.seed, stream_ids[start:start + chunk_size])
        for start in range(0, len(stream_ids), chunk_size)
    ]
    blocks = executor.map(_rollout_chunk, tasks) if executor is not None else map(_rollout_chunk, tasks)
    trajectories = list(survivors) + [t for block in blocks for t in block]

    batch_best = min(trajectories, key=lambda t: t.reward)
    improved = best is None or batch_best.reward < best.reward
    return BatchState(
        index=batch_index,
        trajectories=trajectories,
        epsilon=epsilon,
        best=batch_best if improved else best,
        stagnation=stagnation,
        improved=improved,
    )


# Selection

def _cut(fraction: float, size: int) -> int:
    # tolerance keeps e.g. 0.1 * 410 from rounding up to 42
    return min(size, max(1, math.ceil(fraction * size - 1e-9)))


def _ranked(trajectories: Sequence[Trajectory]) -> List[Trajectory]:
    return sorted(trajectories, key=lambda t: t.reward)


def select_elites(trajectories: Sequence[Trajectory], learn_pct: float) -> List[Trajectory]:
    """The ceil(learn_pct * size) smallest rewards, ties in generation order"""
    if not trajectories:
        raise RamseyError("cannot select elites from an empty batch")
    return _ranked(trajectories)[:_cut(learn_pct, len(trajectories))]


def select_survivors(trajectories: Sequence[Trajectory], survive_pct: float) -> List[Trajectory]:
    """The ceil(survive_pct * size) smallest rewards with repeated colorings dropped"""
    if not trajectories:
        raise RamseyError("cannot select survivors from an empty batch")
    survivors, seen = [], set()
    for trajectory in _ranked(trajectories)[:_cut(survive_pct, len(trajectories))]:
        if trajectory.coloring.colors not in seen:
            seen.add(trajectory.coloring.colors)
            survivors.append(trajectory)
    return survivors


def adapt_epsilon(state: BatchState, config: TrainerConfig) -> Tuple[float, int]:
    """
    (epsilon, stagnation) for the next batch. An improvement of the best-ever
    reward resets both; otherwise every stagnation_window stagnant batches
    raise epsilon by epsilon_step up to epsilon_max.
    """
    if state.improved:
        return config.epsilon_initial, 0
    stagnation = state.stagnation + 1
    epsilon = state.epsilon
    if stagnation % config.stagnation_window == 0:
        epsilon = min(epsilon + config.epsilon_step, config.epsilon_max)
        logger.info("best reward stuck for %d batches, random action share now %.3f", stagnation, epsilon)
    return epsilon, stagnation


# Search loop

class CrossEntropySearch:
    """
    Owns the policy and all state carried between batches. Rollouts may run on
    an executor; selection, training and epsilon updates happen here, serially.
    """

    def __init__(self, config: TrainerConfig, executor=None,
                 on_batch: Optional[Callable[[BatchStats], None]] = None,
                 on_checkpoint: Optional[Callable[[Dict[str, Any]], None]] = None,
                 checkpoint_every: int = 0, chunk_size: int = DEFAULT_CHUNK):
        self.config = config
        self.executor = executor
        self.on_batch = on_batch
        self.on_checkpoint = on_checkpoint
        self.checkpoint_every = checkpoint_every
        self.chunk_size = chunk_size

        self.policy = init_policy(config.n, config.m, config.hidden_sizes, config.seed)
        self.next_batch = 0
        self.epsilon = config.epsilon_initial
        self.stagnation = 0
        self.best: Optional[Trajectory] = None
        self.survivors: List[Trajectory] = []
        self.stats: List[BatchStats] = []
        self.certificate: Optional[Certificate] = None

    def run(self) -> SearchOutcome:
        config = self.config
        while self.certificate is None and self.next_batch < config.max_batches:
            self._run_batch()
        if self.on_checkpoint is not None:
            self.on_checkpoint(self.checkpoint_data())
        return self.outcome()

    def _run_batch(self) -> None:
        config = self.config
        state = generate_batch(
            self.policy, config, self.next_batch, self.epsilon, self.survivors, self.best,
            self.stagnation, self.executor, self.chunk_size,
        )
        self.best = state.best
        stats = BatchStats(state.index, state.min_reward, state.mean_reward, state.best_reward, state.epsilon)
        self.stats.append(stats)
        if state.improved:
            logger.info("batch %d: best reward %d", state.index, state.best_reward)
        logger.debug("batch %d: min %d mean %.3f epsilon %.3f", state.index,
                     stats.min_reward, stats.mean_reward, stats.epsilon)
        if self.on_batch is not None:
            self.on_batch(stats)
        self.next_batch += 1

        if self.best.reward == 0:
            certificate = verify_critical(self.best.coloring, config.patterns)
            if not certificate.is_critical:
                raise RamseyError(f"zero-reward coloring failed verification: {to_compact(self.best.coloring)}")
            self.certificate = certificate
            logger.info("critical coloring found in batch %d: %s", state.index, certificate.implied_bound)
            return

        elites = select_elites(state.trajectories, config.learn_pct)
        data = elite_training_data(elites)
        for _ in range(config.train_steps):
            train_step(self.policy, elites, config.learning_rate, data)
        self.survivors = select_survivors(state.trajectories, config.survive_pct)
        self.epsilon, self.stagnation = adapt_epsilon(state, config)

        if self.on_checkpoint is not None and self.checkpoint_every and self.next_batch % self.checkpoint_every == 0:
            self.on_checkpoint(self.checkpoint_data())

    def outcome(self) -> SearchOutcome:
        status = 'certified' if self.certificate is not None else 'exhausted'
        return SearchOutcome(status, self.best, self.next_batch, list(self.stats), self.certificate)

    # Checkpoints

    def checkpoint_data(self) -> Dict[str, Any]:
        def entry(trajectory: Optional[Trajectory]):
            if trajectory is None:
                return None
            return {'coloring': to_compact(trajectory.coloring), 'stream': trajectory.stream_id}

        return {
            'format': CHECKPOINT_FORMAT,
            'config': self.config.to_dict(),
            'next_batch': self.next_batch,
            'seed': self.config.seed,
            'next_stream': self.next_batch * self.config.batch_size,
            'epsilon': self.epsilon,
            'stagnation': self.stagnation,
            'best': entry(self.best),
            'survivors': [entry(t) for t in self.survivors],
            'certified': self.certificate is not None,
            'stats': [s.to_dict() for s in self.stats],
            'policy': self.policy.to_blob(),
        }

    @classmethod
    def from_checkpoint_data(cls, data: Dict[str, Any], max_batches: Optional[int] = None,
                             **kwargs) -> 'CrossEntropySearch':
        """Rebuild a search at the batch boundary where the checkpoint was taken"""
        try:
            config = TrainerConfig.from_dict(data['config'])
        except ConfigError as e:
            raise CheckpointError(f"config.{e.key}", str(e))
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError('config', str(e))
        if max_batches is not None:
            config = dataclasses.replace(config, max_batches=max_batches)
        if data['seed'] != config.seed:
            raise CheckpointError('seed', f"{data['seed']} does not match config seed {config.seed}")
        if data['next_stream'] != data['next_batch'] * config.batch_size:
            raise CheckpointError('next_stream', "does not match next_batch * batch_size")

        search = cls(config, **kwargs)
        try:
            search.policy = PolicyNetwork.from_blob(data['policy'])
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError('policy', str(e))
        if search.policy.n != config.n or search.policy.m != config.m:
            raise CheckpointError('policy', "network shape does not match the config")

        def restore(entry: Dict[str, Any], name: str) -> Trajectory:
            try:
                coloring = from_compact(entry['coloring'])
            except (KeyError, TypeError, ValueError) as e:
                raise CheckpointError(name, str(e))
            if coloring.n != config.n or coloring.m != config.m or not coloring.is_complete:
                raise CheckpointError(name, "coloring does not fit the config")
            return Trajectory(coloring, reward(coloring, config.patterns), entry.get('stream'))

        search.next_batch = data['next_batch']
        search.epsilon = data['epsilon']
        search.stagnation = data['stagnation']
        search.best = restore(data['best'], 'best') if data['best'] is not None else None
        search.survivors = [restore(e, f"survivors.{k}") for k, e in enumerate(data['survivors'])]
        search.stats = [BatchStats(**s) for s in data['stats']]
        if data['certified']:
            if search.best is None:
                raise CheckpointError('best', "certified checkpoint has no coloring")
            certificate = verify_critical(search.best.coloring, config.patterns)
            if not certificate.is_critical:
                raise CheckpointError('best', "stored certificate does not verify")
            search.certificate = certificate
        return search


def run(config: TrainerConfig, **kwargs) -> SearchOutcome:
    """Search until a critical coloring appears or max_batches is spent"""
    return CrossEntropySearch(config, **kwargs).run()
