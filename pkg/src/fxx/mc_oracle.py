"""Seeded Monte Carlo simulator with continuous-barrier correction.

Paths follow exact log-Euler steps of the two-rate lognormal dynamics.
Barrier survival uses, per step and per barrier, the crossing
probability ``exp(-2 ln(S_i/B) ln(S_{i+1}/B) / (sigma^2 dt))`` of the
bridge between consecutive points; the per-step survival probabilities
multiply along the path (and across barriers) and one uniform draw per
path thins against the product, which has the same joint law as
thinning every step separately. Steps whose endpoints sit further than
five bridge standard deviations from a barrier contribute a survival
factor that rounds to exactly 1.0 in double precision, so they are
skipped without changing any bit of the result.

Streams are keyed by (seed, chunk index, stream role) through
``SeedSequence``, which makes every estimate bit-reproducible for any
thread count and independent of which contracts are batched together.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .contracts import (BarrierSide, DoubleBarrierSpec, KikoSpec, KnockType,
                        MarketEnvironment, SingleBarrierSpec, VanillaSpec)
from .errors import DomainError

_CHUNK = 512           # paths per stream chunk; fixed, part of the stream layout
_STREAM_PATH = 0       # per-step path uniforms
_STREAM_SURVIVAL = 1   # survival thinning draw (knock-out / corridor barriers)
_STREAM_TRIGGER = 2    # knock-in trigger draw (in-barrier of in/out pairs)
_NEAR_SDS = 5.0        # bridge std devs beyond which survival rounds to 1.0


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    n_steps: int
    seed: int = 0
    bridge_correction: bool = True

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise DomainError("n_paths and n_steps must both be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must fit an unsigned 64-bit integer")


@dataclass(frozen=True)
class McEstimate:
    price: float
    std_error: float


def _rng(cfg: McConfig, chunk: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(cfg.seed), chunk, stream])
    return np.random.Generator(np.random.SFC64(ss))


class _BarrierPlan:
    """Per-barrier constants reused across chunks."""

    def __init__(self, env: MarketEnvironment, cfg: McConfig,
                 barrier: float, side: BarrierSide):
        self.side = side
        self.log_level = math.log(barrier / env.spot)
        dt = env.T / cfg.n_steps
        self.coef = -2.0 / (env.sigma * env.sigma * dt)
        self.margin = _NEAR_SDS * env.sigma * math.sqrt(dt)
        self.spot_gap = -self.log_level if side == BarrierSide.LOWER else self.log_level

    def survival(self, log_path: np.ndarray, path_min: np.ndarray,
                 path_max: np.ndarray, bridge: bool) -> np.ndarray:
        """P(barrier never touched | path skeleton); {0,1} without bridge."""
        if self.side == BarrierSide.LOWER:
            gap = path_min - self.log_level
        else:
            gap = self.log_level - path_max
        breached = gap <= 0.0
        if not bridge:
            return 1.0 - breached.astype(np.float64)
        weights = np.ones(log_path.shape[0])
        weights[breached] = 0.0
        if self.spot_gap < self.margin:
            near = ~breached
        else:
            near = (gap < self.margin) & ~breached
        rows = np.nonzero(near)[0]
        if rows.size:
            if self.side == BarrierSide.LOWER:
                dist = log_path[rows] - self.log_level
            else:
                dist = self.log_level - log_path[rows]
            first = 1.0 - np.exp(self.coef * self.spot_gap * dist[:, 0])
            inner = 1.0 - np.exp(self.coef * dist[:, :-1] * dist[:, 1:])
            weights[rows] = first * np.prod(inner, axis=1)
        return weights


class _ContractPlan:
    """Payoff evaluator for one contract on a simulated chunk."""

    def __init__(self, env: MarketEnvironment, cfg: McConfig, spec):
        spec.validate_against(env)
        self.phi = int(spec.direction)
        self.strike = spec.strike
        self.discount = math.exp(-env.r_d * env.T)
        self.kind = "vanilla"
        if isinstance(spec, SingleBarrierSpec):
            self.kind = "single"
            self.knock = spec.knock
            self.barriers = (_BarrierPlan(env, cfg, spec.barrier, spec.side),)
        elif isinstance(spec, DoubleBarrierSpec):
            self.kind = "double"
            self.knock = spec.knock
            self.barriers = (_BarrierPlan(env, cfg, spec.lower, BarrierSide.LOWER),
                             _BarrierPlan(env, cfg, spec.upper, BarrierSide.UPPER))
        elif isinstance(spec, KikoSpec):
            self.kind = "kiko"
            self.barrier_out = _BarrierPlan(env, cfg, spec.barrier_out, spec.side_out)
            self.barrier_in = _BarrierPlan(env, cfg, spec.barrier_in, spec.side_in)
        elif not isinstance(spec, VanillaSpec):
            raise DomainError(f"unsupported contract type {type(spec).__name__}")

    def payoffs(self, chunk: "_SimulatedChunk") -> np.ndarray:
        base = self.discount * np.maximum(self.phi * (chunk.terminal - self.strike), 0.0)
        if self.kind == "vanilla":
            return base
        if self.kind == "kiko":
            w_out = chunk.weight(self.barrier_out)
            w_in = chunk.weight(self.barrier_in)
            kept = (chunk.u_survival < w_out) & (chunk.u_trigger >= w_in)
            return base * kept
        weights = chunk.weight(self.barriers[0])
        for extra in self.barriers[1:]:
            weights = weights * chunk.weight(extra)
        survived = chunk.u_survival < weights
        if self.knock == KnockType.OUT:
            return base * survived
        return base * ~survived


class _SimulatedChunk:
    """One chunk of paths plus lazily-drawn thinning uniforms."""

    def __init__(self, env: MarketEnvironment, cfg: McConfig, index: int, n_paths: int):
        self._cfg = cfg
        self._index = index
        self._bridge = cfg.bridge_correction
        dt = env.T / cfg.n_steps
        drift = (env.drift - 0.5 * env.sigma * env.sigma) * dt
        vol = env.sigma * math.sqrt(dt)
        u = _rng(cfg, index, _STREAM_PATH).random((n_paths, cfg.n_steps))
        np.maximum(u, 2.0**-54, out=u)  # the generator can emit exactly 0.0
        z = ndtri(u)
        z *= vol
        z += drift
        self.log_path = np.cumsum(z, axis=1)
        self.path_min = self.log_path.min(axis=1)
        self.path_max = self.log_path.max(axis=1)
        self.terminal = env.spot * np.exp(self.log_path[:, -1])
        self._weights = {}
        self._u1 = None
        self._u2 = None

    def weight(self, plan: _BarrierPlan) -> np.ndarray:
        key = (plan.log_level, plan.side)
        if key not in self._weights:
            self._weights[key] = plan.survival(self.log_path, self.path_min,
                                               self.path_max, self._bridge)
        return self._weights[key]

    @property
    def u_survival(self) -> np.ndarray:
        if self._u1 is None:
            self._u1 = _rng(self._cfg, self._index, _STREAM_SURVIVAL).random(
                self.log_path.shape[0])
        return self._u1

    @property
    def u_trigger(self) -> np.ndarray:
        if self._u2 is None:
            self._u2 = _rng(self._cfg, self._index, _STREAM_TRIGGER).random(
                self.log_path.shape[0])
        return self._u2


def mc_price_batch(env: MarketEnvironment, specs, cfg: McConfig,
                   threads: int = 1) -> list:
    """Estimate several contracts on one shared path stream.

    Every estimate is bit-identical to pricing the contract alone with
    the same config, so batching is purely a performance feature.
    """
    plans = [_ContractPlan(env, cfg, spec) for spec in specs]
    n_chunks = (cfg.n_paths + _CHUNK - 1) // _CHUNK
    sums = np.zeros((len(plans), n_chunks))
    sumsqs = np.zeros((len(plans), n_chunks))

    def run_chunk(index: int) -> None:
        n_here = min(_CHUNK, cfg.n_paths - index * _CHUNK)
        chunk = _SimulatedChunk(env, cfg, index, n_here)
        for j, plan in enumerate(plans):
            pay = plan.payoffs(chunk)
            sums[j, index] = pay.sum()
            sumsqs[j, index] = (pay * pay).sum()

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_chunk, range(n_chunks)))
    else:
        for index in range(n_chunks):
            run_chunk(index)

    out = []
    n = cfg.n_paths
    for j in range(len(plans)):
        total = float(np.sum(sums[j]))
        total_sq = float(np.sum(sumsqs[j]))
        mean = total / n
        if n > 1:
            variance = max((total_sq - total * total / n) / (n - 1), 0.0)
            std_error = math.sqrt(variance / n)
        else:
            std_error = 0.0
        out.append(McEstimate(price=mean, std_error=std_error))
    return out


def mc_price(env: MarketEnvironment, spec, cfg: McConfig, threads: int = 1) -> McEstimate:
    """Monte Carlo estimate of one contract (vanilla or any barrier type)."""
    return mc_price_batch(env, [spec], cfg, threads=threads)[0]
