"""Friction/damping parameter estimation from drop-test trajectories.

The loss is the mean squared angle error between a re-simulation and the
observed series, plus a quadratic barrier that keeps physical parameters
non-negative. Minimization is a derivative-free simplex search with random
restarts (gradients through the sign(omega) friction term are meaningless).
Uncertainty comes from a case bootstrap: whole trajectories are resampled
with replacement and refit, one drop being the independent experimental
unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import BootstrapFailedError, IntegrationDivergedError
from .pendulum import PendulumParams, Trajectory, acceleration, simulate

MODE_UNDAMPED = "undamped_friction"
MODE_DAMPED = "damped"
FIT_PARAM_NAMES = ("mu_k", "mu_d", "damping_b")

DIVERGED_LOSS = 1e12   # finite sentinel when the candidate blows up


@dataclass(frozen=True)
class FitSpec:
    """What to fit and how hard to try."""

    mode: str
    free_params: tuple[str, ...]
    bounds: dict[str, tuple[float, float]]
    penalty_weight: float = 1e6
    max_iters: int = 400
    tol: float = 1e-12
    n_restarts: int = 3

    def __post_init__(self):
        if self.mode not in (MODE_UNDAMPED, MODE_DAMPED):
            raise ValueError(f"unknown fit mode {self.mode!r}")
        if not self.free_params:
            raise ValueError("free_params must be non-empty")
        for name in self.free_params:
            if name not in FIT_PARAM_NAMES:
                raise ValueError(f"unknown fit parameter {name!r}")
            lo, hi = self.bounds[name]
            if lo < 0 or hi <= lo:
                raise ValueError(f"bad bounds for {name}: [{lo}, {hi}]")
        if self.mode == MODE_UNDAMPED and "damping_b" in self.free_params:
            raise ValueError("damping_b is fixed at zero in undamped mode")


def undamped_spec(**overrides) -> FitSpec:
    """Friction fit on damper-free drops (mu_k, mu_d free, b = 0)."""
    kw = dict(mode=MODE_UNDAMPED, free_params=("mu_k", "mu_d"),
              bounds={"mu_k": (0.0, 0.05), "mu_d": (0.0, 5.0)})
    kw.update(overrides)
    return FitSpec(**kw)


def damped_spec(**overrides) -> FitSpec:
    """Damper-coefficient fit on damped drops (friction held fixed)."""
    kw = dict(mode=MODE_DAMPED, free_params=("damping_b",),
              bounds={"damping_b": (0.0, 0.05)})
    kw.update(overrides)
    return FitSpec(**kw)


def _apply(base: PendulumParams, spec: FitSpec, x: np.ndarray) -> PendulumParams:
    updates = dict(zip(spec.free_params, (float(v) for v in x)))
    if spec.mode == MODE_UNDAMPED:
        updates.setdefault("damping_b", 0.0)
    return replace(base, **updates)


def estimate_initial_state(observed: Trajectory,
                           params: PendulumParams) -> tuple[float, float]:
    """Per-trial initial conditions from the first two observed samples.

    Measured series carry no velocities; the raw first difference estimates
    the mean velocity over the first interval, so it lags the release state
    by half a step. One explicit half-step correction with the model
    acceleration removes that systematic part. Simulated series carry their
    velocities and are used as-is.
    """
    if observed.omegas is not None:
        return float(observed.angles[0]), float(observed.omegas[0])
    theta0 = float(observed.angles[0])
    fd = float((observed.angles[1] - observed.angles[0]) / observed.dt)
    omega0 = fd - 0.5 * observed.dt * acceleration(theta0, fd, params)
    return theta0, omega0


def loss(x, observed: Trajectory, spec: FitSpec,
         base_params: PendulumParams,
         initial_state: Optional[tuple[float, float]] = None) -> float:
    """MSE of angles plus the non-negativity barrier; finite even on
    divergence (documented sentinel)."""
    x = np.asarray(x, dtype=float)
    penalty = spec.penalty_weight * float(np.sum(np.minimum(x, 0.0) ** 2))
    if initial_state is None:
        initial_state = estimate_initial_state(observed, base_params)
    theta0, omega0 = initial_state
    try:
        candidate = _apply(base_params, spec, np.maximum(x, 0.0))
        sim = simulate(candidate, theta0, omega0,
                       duration=observed.duration, dt_exp=observed.dt)
    except (IntegrationDivergedError, ValueError):
        return DIVERGED_LOSS + penalty
    mse = float(np.mean((sim.angles - observed.angles) ** 2))
    return mse + penalty


@dataclass
class FitResult:
    params: dict[str, float]
    x: np.ndarray
    loss: float
    converged: bool
    n_evals: int

    def __getitem__(self, name: str) -> float:
        return self.params[name]


def _dedupe(observed: Sequence[Trajectory]):
    """Unique trajectories with multiplicities (bootstrap resamples repeat
    the same objects; simulating each unique one once is exact)."""
    uniq: list[Trajectory] = []
    weights: list[int] = []
    index: dict[int, int] = {}
    for traj in observed:
        key = id(traj)
        if key in index:
            weights[index[key]] += 1
        else:
            index[key] = len(uniq)
            uniq.append(traj)
            weights.append(1)
    return uniq, weights


def fit(observed: Sequence[Trajectory], spec: FitSpec,
        params0, base_params: PendulumParams,
        restart_seed: Optional[int] = None) -> FitResult:
    """Minimize the summed loss over trajectories; never leaves bounds.

    params0 may be a dict keyed by free parameter name or an array in
    free_params order. Restart points are drawn inside the bounds from a
    seeded stream, so results are reproducible.
    """
    if not observed:
        raise ValueError("need at least one trajectory")
    if isinstance(params0, dict):
        x0 = np.array([params0[name] for name in spec.free_params])
    else:
        x0 = np.asarray(params0, dtype=float)
    lo = np.array([spec.bounds[n][0] for n in spec.free_params])
    hi = np.array([spec.bounds[n][1] for n in spec.free_params])
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise ValueError("params0 outside bounds")

    uniq, weights = _dedupe(observed)
    # initial conditions are per-trajectory constants of the fit
    states = [estimate_initial_state(traj, base_params) for traj in uniq]

    evals = 0

    def objective(x):
        nonlocal evals
        evals += 1
        # barrier above the upper bound mirrors the non-negativity barrier
        over = np.maximum(x - hi, 0.0)
        extra = spec.penalty_weight * float(np.sum(over ** 2))
        terms = [w * loss(x, traj, spec, base_params, initial_state=st)
                 for traj, w, st in zip(uniq, weights, states)]
        return math.fsum(terms) + extra

    rng = np.random.default_rng(0 if restart_seed is None else restart_seed)
    starts = [x0] + [rng.uniform(lo, hi) for _ in range(spec.n_restarts)]
    xatol = 2e-5 * float(np.max(hi - lo))

    best = None
    converged = False
    for start in starts:
        res = optimize.minimize(
            objective, start, method="Nelder-Mead",
            options=dict(maxiter=spec.max_iters, maxfev=spec.max_iters,
                         xatol=xatol, fatol=spec.tol))
        if best is None or res.fun < best.fun:
            best = res
            converged = bool(res.success)

    x_best = np.clip(best.x, lo, hi)
    return FitResult(params=dict(zip(spec.free_params, map(float, x_best))),
                     x=x_best, loss=float(best.fun), converged=converged,
                     n_evals=evals)


@dataclass
class ParamDistribution:
    """Bootstrap sample of parameter vectors with percentile intervals."""

    names: tuple[str, ...]
    samples: np.ndarray            # (n_samples, n_params)
    point_estimate: np.ndarray     # mean over samples
    credible_intervals: np.ndarray  # (n_params, 2): 2.5% / 97.5%
    n_failed: int = 0

    @classmethod
    def from_samples(cls, names, samples, n_failed=0) -> "ParamDistribution":
        # inverted-CDF quantiles: endpoints are sample order statistics,
        # which keeps small resample counts from under-covering
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        ci = np.quantile(samples, [0.025, 0.975], axis=0,
                         method="inverted_cdf").T
        return cls(names=tuple(names), samples=samples,
                   point_estimate=samples.mean(axis=0),
                   credible_intervals=ci, n_failed=n_failed)

    def interval(self, name: str) -> tuple[float, float]:
        i = self.names.index(name)
        return tuple(self.credible_intervals[i])

    def mean(self, name: str) -> float:
        return float(self.point_estimate[self.names.index(name)])


def bootstrap(observed: Sequence[Trajectory], spec: FitSpec,
              n_resamples: int, seed: int, params0,
              base_params: PendulumParams) -> ParamDistribution:
    """Case bootstrap: resample whole drops with replacement and refit.

    Each resample owns a child of the master seed (resample indices and
    simplex restart points), so serial and parallel execution agree and a
    fixed seed is bit-reproducible.
    """
    if n_resamples < 2:
        raise ValueError("need at least 2 resamples")
    if len(observed) < 2:
        raise ValueError("case bootstrap needs at least 2 trajectories")

    children = np.random.SeedSequence(seed).spawn(n_resamples)
    samples = []
    failures = 0
    for child in children:
        rng = np.random.default_rng(child)
        idx = rng.integers(0, len(observed), size=len(observed))
        resample = [observed[i] for i in idx]
        restart_seed = int(rng.integers(0, 2 ** 31 - 1))
        try:
            result = fit(resample, spec, params0, base_params,
                         restart_seed=restart_seed)
        except Exception:
            failures += 1
            continue
        samples.append(result.x)
    if failures > n_resamples // 2:
        raise BootstrapFailedError(
            f"{failures}/{n_resamples} bootstrap refits failed")
    return ParamDistribution.from_samples(spec.free_params, samples,
                                          n_failed=failures)


@dataclass(frozen=True)
class UniformDamping:
    """Monte-Carlo spec: damper coefficient drawn from U(lo, hi)."""

    lo: float
    hi: float
    n_samples: int = 100
    seed: int = 0

    def draw(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(self.lo, self.hi, self.n_samples)


@dataclass
class Band:
    """Pointwise Monte-Carlo envelope of simulated dynamics."""

    times: np.ndarray
    mean: np.ndarray
    lower: np.ndarray          # 2.5% quantile
    upper: np.ndarray          # 97.5% quantile
    sample_angles: np.ndarray  # (n_kept, n_times)
    n_excluded: int


def monte_carlo_band(dist, base_params: PendulumParams, theta0: float,
                     duration: float, omega0: float = 0.0,
                     dt_exp: float = 1.0 / 240.0) -> Band:
    """Simulate every parameter sample and return mean and 95% envelopes.

    `dist` is a ParamDistribution or a UniformDamping spec. Divergent
    samples are excluded and counted.
    """
    if isinstance(dist, UniformDamping):
        names = ("damping_b",)
        rows = dist.draw()[:, None]
    else:
        names = dist.names
        rows = dist.samples
    if rows.shape[0] == 0:
        raise ValueError("empty parameter distribution")

    kept = []
    excluded = 0
    times = None
    for row in rows:
        candidate = replace(base_params,
                            **dict(zip(names, (float(v) for v in row))))
        try:
            traj = simulate(candidate, theta0, omega0, duration, dt_exp)
        except IntegrationDivergedError:
            excluded += 1
            continue
        kept.append(traj.angles)
        times = traj.times
    if not kept:
        raise IntegrationDivergedError(0.0)
    angles = np.vstack(kept)
    lower, upper = np.quantile(angles, [0.025, 0.975], axis=0)
    return Band(times=times, mean=angles.mean(axis=0), lower=lower,
                upper=upper, sample_angles=angles, n_excluded=excluded)
