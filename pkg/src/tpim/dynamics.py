"""Fixed-step time integration of the machine states.

The production method is classical fourth-order Runge-Kutta; a forward
Euler stepper is kept alongside as an independent verification oracle and
for convergence-order measurements. Both are deterministic: identical
inputs give bit-identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .excitation import LoadProfile, VoltageSource, compile_sources
from .machine import (
    SPEED_CONVENTIONS,
    MachineState,
    ValidatedParameters,
    compile_derivative,
    currents_from_fluxes,
    electromagnetic_torque,
    energy_consistent_torque,
)

__all__ = [
    "INTEGRATION_METHODS",
    "TRACE_CHANNELS",
    "IntegratorConfig",
    "Scenario",
    "SimulationTrace",
    "IntegrationError",
    "step_rk4",
    "step_euler",
    "integrate",
]

INTEGRATION_METHODS = ("rk4", "euler")

# Column order is the CSV schema and is fixed.
TRACE_CHANNELS = (
    "t",
    "v_sa",
    "v_sb",
    "i_sa",
    "i_sb",
    "i_ra",
    "i_rb",
    "psi_sa",
    "psi_sb",
    "psi_ra",
    "psi_rb",
    "te",
    "te_ec",
    "omega_mech",
    "tl",
)


class IntegrationError(RuntimeError):
    """The state went non-finite; carries the failure time, state and partial trace."""

    def __init__(self, time: float, state: MachineState, partial_trace: "SimulationTrace"):
        super().__init__(f"non-finite state at t = {time:.9g}: {state}")
        self.time = time
        self.state = state
        self.partial_trace = partial_trace


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings.

    duration may be exactly 0 (single-record trace of the initial state);
    a positive duration must cover at least one step. record_every
    decimates recording only, never the integration grid.
    """

    method: str = "rk4"
    step_size: float = 1e-4
    duration: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        if self.method not in INTEGRATION_METHODS:
            raise ValueError(f"method must be one of {INTEGRATION_METHODS}: {self.method!r}")
        if not self.step_size > 0.0:
            raise ValueError(f"step_size must be positive: {self.step_size}")
        if not self.duration >= 0.0:
            raise ValueError(f"duration must be >= 0: {self.duration}")
        if 0.0 < self.duration < self.step_size * (1.0 - 1e-12):
            raise ValueError(
                f"duration {self.duration} is shorter than one step ({self.step_size})"
            )
        if not (isinstance(self.record_every, int) and self.record_every >= 1):
            raise ValueError(f"record_every must be a positive integer: {self.record_every}")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step_size))


@dataclass(frozen=True)
class Scenario:
    """Everything one run needs besides the machine parameters."""

    supply: VoltageSource
    load: LoadProfile
    integrator: IntegratorConfig
    initial_state: MachineState = field(default_factory=MachineState.at_rest)
    speed_convention: str = "mechanical_state"
    blocked_rotor: bool = False

    def __post_init__(self):
        if self.speed_convention not in SPEED_CONVENTIONS:
            raise ValueError(f"unknown speed convention: {self.speed_convention!r}")


@dataclass(frozen=True)
class SimulationTrace:
    """Uniformly spaced records of every plotted/audited channel.

    Flux channels are the integrated states; currents and both torque
    channels are recomputed algebraically from the recorded state. The
    omega_mech channel is always shaft speed, whichever speed convention
    drove the integration.
    """

    t: np.ndarray
    v_sa: np.ndarray
    v_sb: np.ndarray
    i_sa: np.ndarray
    i_sb: np.ndarray
    i_ra: np.ndarray
    i_rb: np.ndarray
    psi_sa: np.ndarray
    psi_sb: np.ndarray
    psi_ra: np.ndarray
    psi_rb: np.ndarray
    te: np.ndarray
    te_ec: np.ndarray
    omega_mech: np.ndarray
    tl: np.ndarray
    step_size: float
    record_every: int
    supply_frequency: float
    speed_convention: str

    def __len__(self) -> int:
        return len(self.t)

    @property
    def record_spacing(self) -> float:
        return self.step_size * self.record_every

    def channel(self, name: str) -> np.ndarray:
        if name not in TRACE_CHANNELS:
            raise KeyError(f"unknown trace channel: {name!r}")
        return getattr(self, name)


def _advance_rk4(deriv, sources, psa, psb, pra, prb, w, t, dt):
    half = 0.5 * dt
    va0, vb0, tl0 = sources(t)
    vah, vbh, tlh = sources(t + half)
    va1, vb1, tl1 = sources(t + dt)
    a1, b1, c1, d1, e1 = deriv(psa, psb, pra, prb, w, va0, vb0, tl0)
    a2, b2, c2, d2, e2 = deriv(
        psa + half * a1, psb + half * b1, pra + half * c1, prb + half * d1,
        w + half * e1, vah, vbh, tlh,
    )
    a3, b3, c3, d3, e3 = deriv(
        psa + half * a2, psb + half * b2, pra + half * c2, prb + half * d2,
        w + half * e2, vah, vbh, tlh,
    )
    a4, b4, c4, d4, e4 = deriv(
        psa + dt * a3, psb + dt * b3, pra + dt * c3, prb + dt * d3,
        w + dt * e3, va1, vb1, tl1,
    )
    sixth = dt / 6.0
    return (
        psa + sixth * (a1 + 2.0 * (a2 + a3) + a4),
        psb + sixth * (b1 + 2.0 * (b2 + b3) + b4),
        pra + sixth * (c1 + 2.0 * (c2 + c3) + c4),
        prb + sixth * (d1 + 2.0 * (d2 + d3) + d4),
        w + sixth * (e1 + 2.0 * (e2 + e3) + e4),
    )


def _advance_euler(deriv, sources, psa, psb, pra, prb, w, t, dt):
    va, vb, tl = sources(t)
    d1, d2, d3, d4, d5 = deriv(psa, psb, pra, prb, w, va, vb, tl)
    return (psa + dt * d1, psb + dt * d2, pra + dt * d3, prb + dt * d4, w + dt * d5)


_ADVANCERS = {"rk4": _advance_rk4, "euler": _advance_euler}


def _single_step(advance, p, state, t, dt, sources, speed_convention, blocked_rotor):
    if not dt > 0.0:
        raise ValueError(f"dt must be positive: {dt}")
    deriv = compile_derivative(p, speed_convention, blocked_rotor)
    out = advance(deriv, sources, *state.as_tuple(), t, dt)
    new_state = MachineState(*out)
    if not all(math.isfinite(x) for x in out):
        raise IntegrationError(t + dt, new_state, _empty_trace(dt, 1, 0.0, speed_convention))
    return new_state


def step_rk4(
    p: ValidatedParameters,
    state: MachineState,
    t: float,
    dt: float,
    sources,
    speed_convention: str = "mechanical_state",
    blocked_rotor: bool = False,
) -> MachineState:
    """One classical RK4 step; sources(t) -> (v_alpha, v_beta, load_torque)
    is sampled at t, t + dt/2 and t + dt."""
    return _single_step(_advance_rk4, p, state, t, dt, sources, speed_convention, blocked_rotor)


def step_euler(
    p: ValidatedParameters,
    state: MachineState,
    t: float,
    dt: float,
    sources,
    speed_convention: str = "mechanical_state",
    blocked_rotor: bool = False,
) -> MachineState:
    """One forward Euler step (verification oracle)."""
    return _single_step(_advance_euler, p, state, t, dt, sources, speed_convention, blocked_rotor)


def _empty_trace(step_size, record_every, frequency, speed_convention) -> SimulationTrace:
    empty = np.empty(0)
    return SimulationTrace(
        *(empty.copy() for _ in TRACE_CHANNELS),
        step_size=step_size,
        record_every=record_every,
        supply_frequency=frequency,
        speed_convention=speed_convention,
    )


def integrate(p: ValidatedParameters, scenario: Scenario) -> SimulationTrace:
    """Run the scenario from its initial state over the configured duration.

    Deterministic: identical inputs give bit-identical traces. On a
    non-finite state the run aborts with IntegrationError carrying the
    failure time and the partial trace recorded so far.
    """
    cfg = scenario.integrator
    dt = cfg.step_size
    n_steps = cfg.n_steps
    every = cfg.record_every
    advance = _ADVANCERS[cfg.method]
    deriv = compile_derivative(p, scenario.speed_convention, scenario.blocked_rotor)
    sources = compile_sources(scenario.supply, scenario.load)
    # Recorded speed is always shaft speed.
    mech_scale = (
        1.0 / p.pole_pairs if scenario.speed_convention == "electrical_state" else 1.0
    )

    n_records = n_steps // every + 1
    buf = np.empty((len(TRACE_CHANNELS), n_records))

    def record(idx, t, psa, psb, pra, prb, w):
        v_sa, v_sb, tl = sources(t)
        i_sa, i_sb, i_ra, i_rb = currents_from_fluxes(p, psa, psb, pra, prb)
        col = buf[:, idx]
        col[0] = t
        col[1] = v_sa
        col[2] = v_sb
        col[3] = i_sa
        col[4] = i_sb
        col[5] = i_ra
        col[6] = i_rb
        col[7] = psa
        col[8] = psb
        col[9] = pra
        col[10] = prb
        col[11] = electromagnetic_torque(p, i_sa, i_sb, i_ra, i_rb)
        col[12] = energy_consistent_torque(p, pra, prb, i_ra, i_rb)
        col[13] = w * mech_scale
        col[14] = tl

    def build(n_filled):
        channels = [np.ascontiguousarray(buf[i, :n_filled]) for i in range(len(TRACE_CHANNELS))]
        return SimulationTrace(
            *channels,
            step_size=dt,
            record_every=every,
            supply_frequency=scenario.supply.frequency,
            speed_convention=scenario.speed_convention,
        )

    psa, psb, pra, prb, w = scenario.initial_state.as_tuple()
    record(0, 0.0, psa, psb, pra, prb, w)
    filled = 1
    isfinite = math.isfinite
    for k in range(1, n_steps + 1):
        psa, psb, pra, prb, w = advance(deriv, sources, psa, psb, pra, prb, w, (k - 1) * dt, dt)
        if not (isfinite(psa) and isfinite(psb) and isfinite(pra) and isfinite(prb) and isfinite(w)):
            raise IntegrationError(k * dt, MachineState(psa, psb, pra, prb, w), build(filled))
        if k % every == 0:
            record(filled, k * dt, psa, psb, pra, prb, w)
            filled += 1
    return build(filled)
