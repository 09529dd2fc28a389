"""Query synthesis: grow a pool of new sentences from a labeled core set.

Two generation regimes over the same operator space. Stochastic synthesis
repeatedly applies one random surviving operator to a random pool member.
Search-based synthesis instead runs a local search (steepest-ascent hill
climbing with sideways moves, or beam search) from a random pool member,
maximizing a heuristic score, and inserts the search result. Methods:

  S-MQ      stochastic synthesis
  US-HC-MQ  hill climbing on the uncertainty heuristic
  US-BS-MQ  beam search on the uncertainty heuristic
  S-HC-MQ   hill climbing on an rng-valued heuristic (a random walk)

All randomness flows through the caller's random.Random, so identical
(seed set, config, rng seed, model state) reproduce identical pools.
"""

import json
from dataclasses import dataclass, field

from .textspace import ModOp, SentenceInstance, apply_op, chain_records

S_MQ = "S-MQ"
US_HC_MQ = "US-HC-MQ"
US_BS_MQ = "US-BS-MQ"
S_HC_MQ = "S-HC-MQ"
METHODS = (S_MQ, US_HC_MQ, US_BS_MQ, S_HC_MQ)


class SynthesisStarvationError(RuntimeError):
    """No operator anywhere in the pool can produce a new instance."""


@dataclass
class SynthesisConfig:
    """Knobs for both synthesis regimes.

    Depth is drawn per search call from Uniform{depth_min..depth_max}; the
    defaults 1..7 average 4. K = 0 is a permitted degenerate request that
    synthesizes nothing.
    """

    K: int = 20
    method: str = US_HC_MQ
    k_neighbors: int = 10
    depth_min: int = 1
    depth_max: int = 7
    beam_width: int = 3
    max_retries: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 1 <= self.depth_min <= self.depth_max:
            raise ValueError(
                f"depth range must satisfy 1 <= min <= max, got {self.depth_min}..{self.depth_max}"
            )
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")


@dataclass
class CandidatePool:
    """The working set of instances, keyed by normalized text (a true set).

    Seed members are never returned as membership queries.
    """

    seed: list[SentenceInstance]
    members: dict[str, SentenceInstance] = field(default_factory=dict)
    seed_keys: set[str] = field(default_factory=set)
    _order: list[SentenceInstance] = field(default_factory=list)

    def __post_init__(self):
        for inst in self.seed:
            key = inst.normalized_text
            if key not in self.members:
                self.members[key] = inst
                self._order.append(inst)
            self.seed_keys.add(key)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, inst: SentenceInstance) -> bool:
        return inst.normalized_text in self.members

    def add(self, inst: SentenceInstance) -> bool:
        key = inst.normalized_text
        if key in self.members:
            return False
        self.members[key] = inst
        self._order.append(inst)
        return True

    def random_member(self, rng) -> SentenceInstance:
        return self._order[rng.randrange(len(self._order))]

    def new_instances(self) -> list[SentenceInstance]:
        return [
            inst for key, inst in self.members.items() if key not in self.seed_keys
        ]


def _stochastic_step(pool: CandidatePool, op_provider, rng, max_retries: int,
                     context: str) -> SentenceInstance:
    """One random-base/random-operator insertion; aborts on starvation."""
    failures = 0
    while True:
        base = pool.random_member(rng)
        ops = op_provider(base)
        if ops:
            inst = apply_op(base, rng.choice(ops))
            if pool.add(inst):
                return inst
        failures += 1
        if failures > len(pool) * max_retries:
            raise SynthesisStarvationError(
                f"{context}: {failures} consecutive failed draws over a pool of "
                f"{len(pool)}; no operator produces a new instance"
            )


def stochastic_fill(pool: CandidatePool, K: int, op_provider, rng,
                    max_retries: int, context: str, allow_partial: bool = False):
    """Fill `pool` with K new instances by random steps.

    Returns (new_instances, starved). With allow_partial the starved result
    is returned flagged instead of raising (the synonym baseline expects to
    exhaust its closure).
    """
    out: list[SentenceInstance] = []
    while len(out) < K:
        try:
            out.append(_stochastic_step(pool, op_provider, rng, max_retries, context))
        except SynthesisStarvationError:
            if allow_partial:
                return out, True
            raise
    return out, False


def stochastic_synthesis(seed, cfg: SynthesisConfig, op_provider, rng):
    """Random-base/random-operator synthesis until K new instances exist."""
    if not seed:
        raise ValueError("seed set is empty")
    pool = CandidatePool(list(seed))
    out, _ = stochastic_fill(
        pool, cfg.K, op_provider, rng, cfg.max_retries, "stochastic synthesis"
    )
    return out


def hill_climb(initial: SentenceInstance, heuristic, depth: int, op_provider, rng):
    """Steepest-ascent hill climbing with sideways moves, up to `depth` steps.

    At each step every neighbor (each surviving operator applied once) is
    scored; the walk moves to the best neighbor when its score is >= the
    current score, breaking ties uniformly at random. Stops early when all
    neighbors are strictly worse or none exist. Returns (final_state, moved):
    moved is False only when the initial state had no neighbors at all.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    current = initial
    moved = False
    for _ in range(depth):
        ops = op_provider(current)
        if not ops:
            break
        current_score = heuristic(current)
        neighbors = [apply_op(current, op) for op in ops]
        scores = [heuristic(n) for n in neighbors]
        best = max(scores)
        if best < current_score:
            break
        ties = [i for i, sc in enumerate(scores) if sc == best]
        current = neighbors[ties[rng.randrange(len(ties))]]
        moved = True
    return current, moved


def beam_search(initial: SentenceInstance, heuristic, depth: int, width: int,
                op_provider, rng):
    """Level-by-level beam expansion keeping the top `width` states per level.

    Returns (best, expanded): the highest-scoring state encountered across
    all levels, excluding the initial state (ties keep the earliest, then
    the stable candidate order); expanded is False when no level produced
    any candidate, in which case `best` is the initial state.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    beam = [initial]
    best_state: SentenceInstance | None = None
    best_score = float("-inf")
    for _ in range(depth):
        candidates: list[SentenceInstance] = []
        seen: set[str] = set()
        for state in beam:
            for op in op_provider(state):
                child = apply_op(state, op)
                key = child.normalized_text
                if key in seen:
                    continue
                seen.add(key)
                candidates.append(child)
        if not candidates:
            break
        # Stable candidate order first, rng only to break score ties.
        keyed = [
            (-heuristic(c), rng.random(), i) for i, c in enumerate(candidates)
        ]
        keyed.sort()
        if -keyed[0][0] > best_score:
            best_score = -keyed[0][0]
            best_state = candidates[keyed[0][2]]
        beam = [candidates[i] for _, _, i in keyed[:width]]
    if best_state is None:
        return initial, False
    return best_state, True


def search_synthesis(seed, cfg: SynthesisConfig, heuristic, op_provider, rng):
    """Search-based synthesis: local search from random bases until K new instances.

    Duplicate search results are retried from a fresh base up to
    cfg.max_retries times, then the algorithm falls back to one stochastic
    step. S-HC-MQ ignores `heuristic` and walks randomly.
    """
    if not seed:
        raise ValueError("seed set is empty")
    if cfg.method == S_HC_MQ:
        heuristic = lambda inst: rng.random()  # noqa: E731 — random walk
    elif heuristic is None:
        raise ValueError(f"method {cfg.method} requires a heuristic")
    pool = CandidatePool(list(seed))
    out: list[SentenceInstance] = []
    while len(out) < cfg.K:
        added = None
        for _ in range(cfg.max_retries):
            base = pool.random_member(rng)
            depth = rng.randint(cfg.depth_min, cfg.depth_max)
            if cfg.method == US_BS_MQ:
                result, progressed = beam_search(
                    base, heuristic, depth, cfg.beam_width, op_provider, rng
                )
            else:
                result, progressed = hill_climb(base, heuristic, depth, op_provider, rng)
            if progressed and pool.add(result):
                added = result
                break
        if added is None:
            added = _stochastic_step(
                pool, op_provider, rng, cfg.max_retries, "search synthesis fallback"
            )
        out.append(added)
    return out


def synthesize(seed, cfg: SynthesisConfig, heuristic, op_provider, rng):
    """Dispatch on cfg.method; returns exactly cfg.K new instances."""
    if cfg.method == S_MQ:
        return stochastic_synthesis(seed, cfg, op_provider, rng)
    return search_synthesis(seed, cfg, heuristic, op_provider, rng)


def pool_records(instances, roots: dict[str, SentenceInstance], heuristic=None):
    """Wire-format dicts for generated instances; `roots` maps root id -> instance."""
    records = []
    for inst in instances:
        prov = inst.provenance
        root = roots[prov.root_id]
        records.append(
            {
                "id": inst.id,
                "text": inst.raw_text,
                "root_id": prov.root_id,
                "root_label": prov.root_label,
                "chain": chain_records(root, prov.chain),
                "heuristic_value": None if heuristic is None else heuristic(inst),
            }
        )
    return records


def write_pool_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
