# ramsey_search/services.py
"""
Orchestration behind the search and resume commands: restarts, the
statistics CSV, checkpoint and certificate files, and run records.
"""
import contextlib
import csv
import json
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from django.conf import settings
from django.db import DatabaseError

from .certify import write_certificate
from .coloring import to_compact
from .exceptions import CheckpointError, ConfigError
from .models import SearchRun
from .runconfig import RunConfig
from .trainer import DEFAULT_CHUNK, BatchStats, CrossEntropySearch, SearchOutcome, TrainerConfig
from .validators import CheckpointValidator

logger = logging.getLogger(__name__)

STATS_COLUMNS = ['restart', 'batch', 'min_reward', 'mean_reward', 'best_reward', 'epsilon']
CHECKPOINT_SUFFIX = '.ckpt.json'


def _options() -> Dict[str, Any]:
    return getattr(settings, 'RAMSEY_SETTINGS', {})


def resolve_workers(option: Optional[int] = None) -> int:
    """--workers, else the workers environment variable, else the CPU count"""
    if option is not None:
        workers = option
    else:
        env_name = _options().get('WORKERS_ENV', 'RAMSEY_CEMA_WORKERS')
        text = os.environ.get(env_name, '').strip()
        if text:
            try:
                workers = int(text)
            except ValueError:
                raise ConfigError('workers', f"{env_name}={text!r} is not an integer")
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ConfigError('workers', f"must be at least 1, got {workers}")
    return workers


@dataclass(frozen=True)
class OutputPaths:
    prefix: Path

    @property
    def cert(self) -> Path:
        return Path(f"{self.prefix}.cert")

    @property
    def stats(self) -> Path:
        return Path(f"{self.prefix}.stats.csv")

    @property
    def checkpoint(self) -> Path:
        return Path(f"{self.prefix}{CHECKPOINT_SUFFIX}")

    @classmethod
    def for_search(cls, out: Optional[Union[str, Path]], config: TrainerConfig) -> 'OutputPaths':
        if out:
            return cls(Path(out))
        specs = '-'.join(re.sub(r'[,:]', '_', p.spec) for p in config.patterns)
        directory = Path(_options().get('OUTPUT_DIR', 'runs'))
        return cls(directory / f"n{config.n}-{specs}-seed{config.seed}")

    @classmethod
    def for_checkpoint(cls, checkpoint_path: Union[str, Path], extra: Dict[str, Any]) -> 'OutputPaths':
        path = str(checkpoint_path)
        if path.endswith(CHECKPOINT_SUFFIX):
            return cls(Path(path[:-len(CHECKPOINT_SUFFIX)]))
        if extra.get('out'):
            return cls(Path(extra['out']))
        return cls(Path(path))

    def ensure_directory(self) -> None:
        self.prefix.parent.mkdir(parents=True, exist_ok=True)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + '.tmp')
    tmp.write_text(text, encoding='utf-8')
    os.replace(tmp, path)


class StatsLog:
    """Append-only CSV of per-batch statistics, one header row"""

    def __init__(self, path: Path):
        self.path = path

    @staticmethod
    def _row(restart: int, stats: BatchStats) -> List[Any]:
        return [restart, stats.index, stats.min_reward, stats.mean_reward, stats.best_reward, stats.epsilon]

    def start(self, rows: Sequence[Sequence[Any]] = ()) -> None:
        """Truncate the log, then write the header and any rows carried over"""
        with open(self.path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(STATS_COLUMNS)
            writer.writerows(rows)

    def append(self, restart: int, stats: BatchStats) -> None:
        with open(self.path, 'a', newline='', encoding='utf-8') as handle:
            csv.writer(handle, lineterminator='\n').writerow(self._row(restart, stats))

    def rows_before(self, restart: int) -> List[List[str]]:
        """Rows of earlier restarts already on disk"""
        if not self.path.exists():
            return []
        with open(self.path, newline='', encoding='utf-8') as handle:
            reader = csv.reader(handle)
            next(reader, None)
            return [row for row in reader if row and row[0].isascii() and row[0].isdigit() and int(row[0]) < restart]

    def resume_rows(self, restart: int, stats: Sequence[BatchStats]) -> List[List[Any]]:
        return self.rows_before(restart) + [self._row(restart, s) for s in stats]


def read_checkpoint(path: Union[str, Path]) -> Dict[str, Any]:
    """Load and schema-check a checkpoint file"""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise CheckpointError('checkpoint', f"cannot read {str(path)!r}: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CheckpointError('checkpoint', f"not valid JSON ({e})")
    CheckpointValidator().check(data)
    return data


@dataclass
class SearchReport:
    status: str
    outcome: SearchOutcome
    restart: int
    restarts_run: int
    paths: OutputPaths
    certificate_text: Optional[str] = None

    @property
    def found(self) -> bool:
        return self.outcome.found

    @property
    def implied_bound(self) -> Optional[str]:
        return self.outcome.certificate.implied_bound if self.outcome.certificate else None


class SearchRunner:
    """
    Runs a search with its restarts and keeps the files under one output
    prefix current: <out>.stats.csv, <out>.ckpt.json and, on success, <out>.cert
    """

    def __init__(self, workers: Optional[int] = None, record: Optional[bool] = None,
                 chunk_size: Optional[int] = None):
        options = _options()
        self.workers = resolve_workers(workers)
        self.record = options.get('RECORD_RUNS', True) if record is None else record
        self.chunk_size = chunk_size or options.get('ROLLOUT_CHUNK', DEFAULT_CHUNK)

    def search(self, run_config: RunConfig, out: Optional[Union[str, Path]] = None) -> SearchReport:
        config = run_config.trainer
        paths = OutputPaths.for_search(out, config)
        paths.ensure_directory()
        stats_log = StatsLog(paths.stats)
        stats_log.start()
        logger.info("search K_%d for %s, seed %d, up to %d restarts, %d workers -> %s",
                    config.n, ','.join(p.spec for p in config.patterns), config.seed,
                    run_config.restarts, self.workers, paths.prefix)
        return self._run_restarts(
            paths, stats_log, config, base_seed=config.seed, restarts=run_config.restarts,
            checkpoint_every=run_config.checkpoint_every, start_restart=0,
        )

    def resume(self, checkpoint_path: Union[str, Path], max_batches: Optional[int] = None) -> SearchReport:
        """Continue from a checkpoint; a certified checkpoint only re-emits its certificate"""
        data = read_checkpoint(checkpoint_path)
        extra = data.get('extra', {})
        search = CrossEntropySearch.from_checkpoint_data(data, max_batches=max_batches)
        restart = int(extra.get('restart', 0))
        paths = OutputPaths.for_checkpoint(checkpoint_path, extra)
        paths.ensure_directory()
        stats_log = StatsLog(paths.stats)
        stats_log.start(stats_log.resume_rows(restart, search.stats))
        logger.info("resuming %s at batch %d of restart %d", checkpoint_path, search.next_batch, restart)
        return self._run_restarts(
            paths, stats_log, search.config,
            base_seed=int(extra.get('base_seed', search.config.seed - restart)),
            restarts=int(extra.get('restarts', restart)),
            checkpoint_every=int(extra.get('checkpoint_every', 0)),
            start_restart=restart, resumed=search,
        )

    def _executor(self):
        if self.workers <= 1:
            return contextlib.nullcontext()
        return ProcessPoolExecutor(max_workers=self.workers)

    def _run_restarts(self, paths: OutputPaths, stats_log: StatsLog, config: TrainerConfig,
                      base_seed: int, restarts: int, checkpoint_every: int, start_restart: int,
                      resumed: Optional[CrossEntropySearch] = None) -> SearchReport:
        best_report: Optional[SearchReport] = None
        with self._executor() as executor:
            for restart in range(start_restart, restarts + 1):
                if restart == start_restart and resumed is not None:
                    search = resumed
                else:
                    search = CrossEntropySearch(config.with_seed(base_seed + restart))
                extra = {
                    'out': str(paths.prefix),
                    'restart': restart,
                    'restarts': restarts,
                    'base_seed': base_seed,
                    'checkpoint_every': checkpoint_every,
                }
                search.executor = executor
                search.chunk_size = self.chunk_size
                search.checkpoint_every = checkpoint_every
                search.on_batch = lambda stats, r=restart: stats_log.append(r, stats)
                search.on_checkpoint = lambda data, e=extra: self._write_checkpoint(paths, data, e)

                report = self._run_one(search, paths, restart, restarts, resumed=search is resumed)
                if best_report is None or _better(report.outcome, best_report.outcome):
                    best_report = report
                if report.found:
                    break
                logger.info("restart %d exhausted %d batches with best reward %s",
                            restart, report.outcome.batches_run, report.outcome.best_reward)
        best_report.restarts_run = restart - start_restart + 1
        return best_report

    def _run_one(self, search: CrossEntropySearch, paths: OutputPaths, restart: int,
                 restarts: int, resumed: bool) -> SearchReport:
        record = self._record_start(paths, search.config, restart, resumed)
        try:
            outcome = search.run()
        except Exception as e:
            self._record_finish(record, SearchRun.STATUS_FAILED, search.outcome(), error=str(e))
            raise
        certificate_text = None
        if outcome.certificate is not None:
            certificate_text = write_certificate(outcome.certificate)
            _atomic_write(paths.cert, certificate_text)
            logger.info("certificate written to %s: %s", paths.cert, outcome.certificate.implied_bound)
        self._record_finish(record, outcome.status, outcome, certificate_text=certificate_text)
        return SearchReport(outcome.status, outcome, restart, 1, paths, certificate_text)

    def _write_checkpoint(self, paths: OutputPaths, data: Dict[str, Any], extra: Dict[str, Any]) -> None:
        data = dict(data, extra=extra)
        _atomic_write(paths.checkpoint, json.dumps(data))
        logger.debug("checkpoint at batch %d written to %s", data['next_batch'], paths.checkpoint)

    # Run records

    def _record_start(self, paths: OutputPaths, config: TrainerConfig, restart: int,
                      resumed: bool) -> Optional[SearchRun]:
        if not self.record:
            return None
        try:
            return SearchRun.objects.create(
                out_prefix=str(paths.prefix),
                config_json=config.to_dict(),
                seed=config.seed,
                restart=restart,
                resumed=resumed,
            )
        except DatabaseError as e:
            logger.warning("run not recorded, database unavailable: %s", e)
            return None

    def _record_finish(self, record: Optional[SearchRun], status: str, outcome: SearchOutcome,
                       certificate_text: Optional[str] = None, error: Optional[str] = None) -> None:
        if record is None:
            return
        record.status = status
        record.batches_run = outcome.batches_run
        record.best_reward = outcome.best_reward
        record.best_coloring = to_compact(outcome.best_coloring) if outcome.best_coloring else ''
        record.certificate_text = certificate_text or ''
        record.error_message = error
        try:
            record.save()
        except DatabaseError as e:
            logger.warning("run %s not updated: %s", record.id, e)


def _better(candidate: SearchOutcome, current: SearchOutcome) -> bool:
    if candidate.found != current.found:
        return candidate.found
    if candidate.best_reward is None:
        return False
    return current.best_reward is None or candidate.best_reward < current.best_reward
