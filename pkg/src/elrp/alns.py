"""Adaptive large neighborhood search with simulated-annealing acceptance."""

import csv
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, TextIO

from .construction import initial_solution
from .destroy import destroy_operators
from .evaluation import check_feasibility, total_cost
from .local_search import local_search, neighbor_lists, operator_mask
from .model import Config, Instance, Solution
from .repair import ALL_REPAIR
from .setcover import NetworkPool, correction_heuristic, solve_set_cover, update_pool

# score slots in Config.scores
NEW_BEST, IMPROVED, ACCEPTED, REJECTED = range(4)


@dataclass
class OperatorWeights:
    names: List[str]
    weights: List[float]
    uses: List[int]
    scores: List[float]

    @classmethod
    def uniform(cls, names: Sequence[str]) -> "OperatorWeights":
        k = len(names)
        return cls(list(names), [1.0] * k, [0] * k, [0.0] * k)

    def probabilities(self) -> List[float]:
        total = sum(self.weights)
        return [w / total for w in self.weights]


def roulette_select(weights: Sequence[float], rng: random.Random) -> int:
    """Index ``j`` with probability ``weights[j] / sum(weights)``."""
    total = sum(weights)
    x = rng.random() * total
    acc = 0.0
    for j, w in enumerate(weights):
        acc += w
        if x < acc:
            return j
    return len(weights) - 1


def update_weight(weight: float, score: float, smoothing: float, floor: float = 1e-6) -> float:
    """Exponential smoothing of an operator weight towards ``score``, kept positive."""
    return max(floor, smoothing * weight + (1.0 - smoothing) * score)


def temperature_at(config: Config, i: int) -> float:
    """Linear cooling from ``t_init`` at 0 to ``t_final`` at ``max_iter``."""
    if config.max_iter <= 0:
        return config.t_init
    i = min(max(i, 0), config.max_iter)
    return config.t_init - i * (config.t_init - config.t_final) / config.max_iter


def sa_accept(candidate: float, reference: float, temperature: float,
              rng: random.Random, scale: float = 1.0) -> bool:
    """Metropolis test; ``scale`` converts cost units to currency units."""
    delta = (candidate - reference) / scale
    if delta <= 0:
        return rng.random() < 1.0
    return math.exp(-delta / temperature) > rng.random()


@dataclass
class IterationRecord:
    iteration: int
    current: int
    best: int
    destroy: str
    repair: str
    accepted: bool


@dataclass
class RunResult:
    best: Solution
    best_cost: int
    initial_cost: int
    iterations: int
    elapsed: float
    trace: List[int] = field(default_factory=list)
    records: List[IterationRecord] = field(default_factory=list)
    destroy_weights: Optional[OperatorWeights] = None
    repair_weights: Optional[OperatorWeights] = None
    sc_rounds: int = 0
    sc_adopted: int = 0
    pool_size: int = 0


def _set_cover_step(instance: Instance, pool: NetworkPool, best: Solution, config: Config) -> Optional[Solution]:
    direct = best.direct_customers(instance)
    universe = [c for c in instance.customer_ids if c not in set(direct)]
    cover = solve_set_cover(pool, universe)
    if cover is None:
        return None
    sol = correction_heuristic(instance, cover.selected, direct, config)
    if check_feasibility(instance, sol, config):
        return None
    return sol


def run(instance: Instance, config: Optional[Config] = None, initial: Optional[Solution] = None,
        trace_file: Optional[TextIO] = None, record: bool = False,
        check: bool = False, progress: Optional[Callable[[int, int], None]] = None) -> RunResult:
    """Destroy, repair, improve and accept for ``config.max_iter`` iterations.

    All random choices come from one ``random.Random(config.rng_seed)`` stream,
    so a seed replays exactly. ``check`` asserts feasibility of the current
    solution after every iteration (slow, for testing).
    """
    config = config or Config()
    problems = config.validate()
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))
    rng = random.Random(config.rng_seed)
    start = time.perf_counter()
    current = initial.copy() if initial is not None else initial_solution(instance, config)
    f_cur = total_cost(instance, current)
    best, f_best = current, f_cur
    initial_cost = f_cur

    destroyers = destroy_operators(config)
    repairers = list(ALL_REPAIR)
    dw = OperatorWeights.uniform([n for n, _ in destroyers])
    rw = OperatorWeights.uniform([n for n, _ in repairers])
    pool = NetworkPool(config.pool_limit)
    update_pool(pool, instance, current)
    neighbors = neighbor_lists(instance, config.neighbor_fraction, config.neighbor_min)
    ops = operator_mask(config)
    scale = float(instance.money_scale)
    writer = None
    if trace_file is not None:
        writer = csv.writer(trace_file)
        writer.writerow(["iteration", "current", "best", "destroy", "repair", "accepted"])

    result = RunResult(best, f_best, initial_cost, 0, 0.0, [], [], dw, rw)
    for i in range(config.max_iter):
        tau = temperature_at(config, i)
        d = roulette_select(dw.weights, rng)
        r = roulette_select(rw.weights, rng)
        removal = destroyers[d][1](instance, current, rng, config)
        cand = repairers[r][1](instance, removal, config, rng)
        update_pool(pool, instance, cand)
        if (i + 1) % config.ls_every == 0:
            cand = local_search(instance, cand, config, neighbors, ops)
        f_cand = total_cost(instance, cand)

        if (i + 1) % config.sc_every == 0:
            result.sc_rounds += 1
            sc = _set_cover_step(instance, pool, best, config)
            if sc is not None and total_cost(instance, sc) <= f_best:
                result.sc_adopted += 1
                best, f_best = sc, total_cost(instance, sc)
                current, f_cur = best, f_best

        ref = f_cur if config.sa_reference == "current" else f_best
        if f_cand < f_cur:
            current, f_cur = cand, f_cand
            slot = IMPROVED
            if f_cand < f_best:
                best, f_best = cand, f_cand
                slot = NEW_BEST
            accepted = True
        elif sa_accept(f_cand, ref, tau, rng, scale):
            current, f_cur = cand, f_cand
            slot, accepted = ACCEPTED, True
        else:
            slot, accepted = REJECTED, False

        score = config.scores[slot]
        for w, j in ((dw, d), (rw, r)):
            w.weights[j] = update_weight(w.weights[j], score, config.lambda_smoothing, config.weight_floor)
            w.uses[j] += 1
            w.scores[j] += score
        result.trace.append(f_best)
        if record or writer is not None:
            rec = IterationRecord(i, f_cur, f_best, dw.names[d], rw.names[r], accepted)
            if record:
                result.records.append(rec)
            if writer is not None:
                writer.writerow([i, f_cur, f_best, rec.destroy, rec.repair, int(accepted)])
        if check:
            bad = check_feasibility(instance, current, config)
            if bad:
                raise AssertionError(f"iteration {i}: infeasible current solution: {bad[:3]}")
        if progress is not None:
            progress(i, f_best)

    result.best, result.best_cost = best, f_best
    result.iterations = config.max_iter
    result.elapsed = time.perf_counter() - start
    result.pool_size = len(pool)
    return result
