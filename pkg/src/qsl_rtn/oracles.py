"""Ground-truth oracles for the closed-form decay function.

Two independent routes:

* Monte Carlo over exact event-driven telegraph trajectories.  The phase
  integral of each piecewise-constant path is summed segment by segment
  (no time-stepping error), and every trajectory draws from its own
  counter-based Philox stream keyed by (seed, trajectory index), so the
  estimate is bit-identical for any execution order or thread count.
* Deterministic fixed-step 4th-order integration of the two-component
  conditional-average system

      m+' = -i(lam/2) m+ + (gamma/2)(m- - m+),
      m-' = +i(lam/2) m- + (gamma/2)(m+ - m-),

  with m+-(0) = (1 +- dp0)/2 and D = m+ + m-.  These are the averages of
  the accumulated phase conditioned on the current fluctuator state for
  the flip-rate gamma/2, phase-amplitude lam/2 process that the closed
  form averages (see README conventions); the step is halved until two
  successive resolutions agree everywhere.

``mc_autocorrelation`` instead validates the raw noise statistics
(flip rate gamma, autocorrelation exp(-2 gamma |dt|)).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import RtnParams
from .errors import StepUnderflow

# Trajectories per reduction chunk; fixed so that sums are accumulated in
# the same order no matter how many threads execute the chunks.
_CHUNK = 2048


@dataclass(frozen=True)
class TelegraphPath:
    """One telegraph realization: initial sign and ordered flip epochs."""

    xi0: int
    flips: np.ndarray
    horizon: float

    def values_at(self, times) -> np.ndarray:
        """xi(t) for each query time (sign flips at every stored epoch)."""
        times = np.asarray(times, dtype=float)
        count = np.searchsorted(self.flips, times, side="right")
        return self.xi0 * np.where(count % 2 == 0, 1.0, -1.0)

    def integral_at(self, times) -> np.ndarray:
        """Exact integral of xi(s) ds from 0 to each query time."""
        times = np.asarray(times, dtype=float)
        knots, cum = _integral_knots(self.xi0, self.flips, self.horizon)
        return np.interp(times, knots, cum)


@dataclass(frozen=True)
class McEstimate:
    """Ensemble-mean decay estimate with a per-point standard error."""

    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_traj: int
    seed: int


@dataclass(frozen=True)
class AutocorrEstimate:
    lags: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_traj: int
    seed: int


class _KeyedStream:
    """A Philox generator rekeyed in place per trajectory.

    Rekeying through the state dict produces exactly the stream a freshly
    constructed ``Philox(key=(seed, index))`` would, without paying the
    per-instance entropy fetch.
    """

    def __init__(self):
        self._bg = np.random.Philox(key=np.zeros(2, dtype=np.uint64))
        self.gen = np.random.Generator(self._bg)
        self._state = self._bg.state

    def rekey(self, seed: int, index: int) -> np.random.Generator:
        st = self._state
        st["state"]["key"][0] = seed % (1 << 64)
        st["state"]["key"][1] = index % (1 << 64)
        st["state"]["counter"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self.gen


def _stream(stream_seed) -> np.random.Generator:
    if isinstance(stream_seed, tuple):
        seed, index = stream_seed
    else:
        seed, index = stream_seed, 0
    return _KeyedStream().rekey(seed, index)


def _wait_block(rate: float, horizon: float) -> int:
    mean_flips = rate * horizon
    return max(16, int(mean_flips + 8.0 * math.sqrt(mean_flips) + 8))


def _draw_flips(gen: np.random.Generator, rate: float, horizon: float, block: int) -> np.ndarray:
    """Flip epochs in [0, horizon) from exponential waiting times."""
    waits = gen.standard_exponential(block) / rate
    total = waits.sum()
    chunks = [waits]
    while total < horizon:
        waits = gen.standard_exponential(block) / rate
        chunks.append(waits)
        total += waits.sum()
    epochs = np.cumsum(np.concatenate(chunks)) if len(chunks) > 1 else np.cumsum(chunks[0])
    return epochs[: np.searchsorted(epochs, horizon)]


def _integral_knots(xi0: float, flips: np.ndarray, horizon: float):
    knots = np.empty(flips.size + 2)
    knots[0] = 0.0
    knots[1:-1] = flips
    knots[-1] = horizon
    seg = np.diff(knots)
    signs = xi0 * (-1.0) ** np.arange(seg.size)
    cum = np.empty(knots.size)
    cum[0] = 0.0
    np.cumsum(signs * seg, out=cum[1:])
    return knots, cum


def sample_trajectory(p: RtnParams, horizon: float, stream_seed, rate: float | None = None) -> TelegraphPath:
    """Draw one telegraph path over [0, horizon].

    xi(0) = +1 with probability (1 + dp0)/2; waiting times between flips
    are exponential with the given rate (default: the switching rate
    gamma, matching the autocorrelation exp(-2 gamma |dt|)).
    ``stream_seed`` may be an int or a (seed, index) pair; equal seeds give
    bit-identical paths.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon!r}")
    r = p.gamma if rate is None else float(rate)
    gen = _stream(stream_seed)
    xi0 = 1 if gen.random() < 0.5 * (1.0 + p.delta_p0) else -1
    if horizon == 0.0 or r == 0.0:
        return TelegraphPath(xi0=xi0, flips=np.empty(0), horizon=horizon)
    flips = _draw_flips(gen, r, horizon, _wait_block(r, horizon))
    return TelegraphPath(xi0=xi0, flips=flips, horizon=horizon)


def _chunk_ranges(n: int):
    return [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]


def _ordered_chunk_reduce(worker, n: int, threads: int):
    ranges = _chunk_ranges(n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, ranges))
    return [worker(r) for r in ranges]


def mc_decay(
    p: RtnParams,
    grid,
    n_traj: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the complex decay function on a time grid.

    Averages exp(-i (lam/2) * integral xi) over telegraph paths with flip
    rate gamma/2 -- the exact process behind the closed form, so the mean
    converges to :func:`~qsl_rtn.dynamics.complex_decay`.  The standard
    error combines the component variances of the unit-modulus phases:
    sqrt(var_re + var_im)/sqrt(n).
    """
    if n_traj < 1000:
        raise ValueError(f"n_traj must be >= 1000, got {n_traj}")
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0):
        raise ValueError("grid times must be >= 0")
    horizon = float(grid.max(initial=0.0))
    rate = 0.5 * p.gamma
    phase = -0.5 * p.lam
    p_plus = 0.5 * (1.0 + p.delta_p0)
    block = _wait_block(rate, horizon)

    def worker(rng_range):
        lo, hi = rng_range
        stream = _KeyedStream()
        acc = np.zeros(grid.size, dtype=complex)
        for i in range(lo, hi):
            gen = stream.rekey(seed, i)
            xi0 = 1.0 if gen.random() < p_plus else -1.0
            if horizon == 0.0:
                acc += 1.0
                continue
            flips = _draw_flips(gen, rate, horizon, block)
            knots, cum = _integral_knots(xi0, flips, horizon)
            acc += np.exp(1j * phase * np.interp(grid, knots, cum))
        return acc

    chunks = _ordered_chunk_reduce(worker, n_traj, threads)
    total = np.zeros(grid.size, dtype=complex)
    for acc in chunks:
        total += acc

    mean = total / n_traj
    # |z| = 1 for every sample, so sum|z|^2 = n exactly.
    var_total = np.maximum(n_traj - (total * np.conj(total)).real / n_traj, 0.0)
    stderr = np.sqrt(var_total / (n_traj - 1)) / math.sqrt(n_traj)
    return McEstimate(times=grid, mean=mean, stderr=stderr, n_traj=n_traj, seed=seed)


def ode_decay(p: RtnParams, grid, tol: float = 1e-10) -> np.ndarray:
    """Deterministic decay values on a grid from the conditional-average ODE.

    Classic RK4 with a fixed step bounded by min(1/(50 gamma), 1/(50 lam));
    because the system is linear, n equal steps are applied as the n-th
    power of the one-step transition matrix.  The step is halved until two
    successive resolutions agree to ``tol`` at every grid point; raises
    :class:`StepUnderflow` if the step would drop below 1e-12/gamma first.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array of times")
    if np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be non-decreasing and start at >= 0")

    g2 = 0.5 * p.gamma
    l2 = 0.5 * p.lam
    gen = np.array([[-1j * l2 - g2, g2], [g2, 1j * l2 - g2]], dtype=complex)
    m0 = np.array([0.5 * (1.0 + p.delta_p0), 0.5 * (1.0 - p.delta_p0)], dtype=complex)
    h_max = 1.0 / (50.0 * max(p.gamma, p.lam))
    h_min = 1e-12 / p.gamma
    eye = np.eye(2, dtype=complex)

    def run(h: float) -> np.ndarray:
        cache: dict[float, np.ndarray] = {}
        out = np.empty(grid.size, dtype=complex)
        m = m0
        t_prev = 0.0
        for k, t in enumerate(grid):
            dt = t - t_prev
            if dt > 0.0:
                trans = cache.get(dt)
                if trans is None:
                    n = max(1, math.ceil(dt / h))
                    hm = (dt / n) * gen
                    step = eye + hm @ (eye + hm @ (eye + hm @ (eye + hm / 4.0) / 3.0) / 2.0)
                    trans = np.linalg.matrix_power(step, n)
                    cache[dt] = trans
                m = trans @ m
            out[k] = m[0] + m[1]
            t_prev = t
        return out

    h = h_max
    prev = run(h)
    while True:
        h *= 0.5
        if h < h_min:
            raise StepUnderflow(
                f"step halving reached {h!r} (< {h_min!r}) without converging to {tol!r}"
            )
        cur = run(h)
        if float(np.max(np.abs(cur - prev))) <= tol:
            return cur
        prev = cur


def mc_autocorrelation(
    p: RtnParams,
    lags,
    n_traj: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> AutocorrEstimate:
    """Estimate <xi(t0) xi(t0 + lag)> from equilibrium telegraph paths.

    Forces dp0 = 0 (stationary start) regardless of ``p`` and uses flip
    rate gamma, so the expected value is exp(-2 gamma lag); the burn-in
    offset is t0 = 3/gamma.
    """
    lags = np.asarray(lags, dtype=float)
    if np.any(lags < 0):
        raise ValueError("lags must be >= 0")
    t0 = 3.0 / p.gamma
    horizon = t0 + float(lags.max(initial=0.0))
    times = np.concatenate([[t0], t0 + lags])
    rate = p.gamma
    block = _wait_block(rate, horizon)

    def worker(rng_range):
        lo, hi = rng_range
        stream = _KeyedStream()
        acc = np.zeros(lags.size, dtype=np.int64)
        for i in range(lo, hi):
            gen = stream.rekey(seed, i)
            xi0 = 1.0 if gen.random() < 0.5 else -1.0
            flips = _draw_flips(gen, rate, horizon, block)
            count = np.searchsorted(flips, times, side="right")
            vals = xi0 * np.where(count % 2 == 0, 1.0, -1.0)
            acc += (vals[0] * vals[1:]).astype(np.int64)
        return acc

    chunks = _ordered_chunk_reduce(worker, n_traj, threads)
    total = np.zeros(lags.size, dtype=np.int64)
    for acc in chunks:
        total += acc

    mean = total / n_traj
    var_total = np.maximum(n_traj - total.astype(float) ** 2 / n_traj, 0.0)
    stderr = np.sqrt(var_total / (n_traj - 1)) / math.sqrt(n_traj)
    return AutocorrEstimate(lags=lags, mean=mean, stderr=stderr, n_traj=n_traj, seed=seed)
