"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the summary lines.

Criterion 5 is expected to fail and is left failing on purpose: it pins the
convergence-order measurement to a forward-Euler dt=1e-7 reference whose own
global error (~2e-5, see criterion 4) is two orders of magnitude above the
RK4 errors at the probed steps, so the measured deviation is reference-
limited and carries no order information. The reference-free order check in
test_dynamics shows the integrator is genuinely fourth order (~4.1).
"""

import csv
import math
import time

import numpy as np

from tpim import (
    VoltageSource,
    currents_from_fluxes,
    energy_audit,
    fluxes_from_currents,
    integrate,
    load_config,
    parse_config,
    render_config,
    summarize,
)
from tpim.cli import main
from tpim.output import CSV_HEADER

from support import T_LOAD, W_SYNC, rated_supply, scenario


def _report(number, ok, detail):
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_rated_startup(table1):
    """Rated scenario: start from rest, accelerate, settle below synchronous
    speed, carry the load torque in the mean, in under 2 s of wall time."""
    t0 = time.perf_counter()
    trace = integrate(table1, scenario())
    runtime = time.perf_counter() - t0

    starts_at_rest = trace.omega_mech[0] == 0.0
    accelerates = float(np.max(trace.omega_mech)) > 100.0
    # settled: consecutive 0.1 s window means agree (the instantaneous speed
    # keeps a double-supply-frequency swing, so windows, not samples)
    m_last = float(np.mean(trace.omega_mech[-1001:]))
    m_prev = float(np.mean(trace.omega_mech[-2001:-1000]))
    settled = abs(m_last - m_prev) < 0.005 * abs(m_last)
    report = summarize(trace, table1, speed_tol=0.05)
    below_sync = 0.0 < report.final_speed_mech < W_SYNC
    torque_ok = abs(report.mean_torque - T_LOAD) <= 0.01 * T_LOAD
    fast_enough = runtime < 2.0

    ok = starts_at_rest and accelerates and settled and below_sync and torque_ok and fast_enough
    _report(
        1,
        ok,
        f"final mean speed {report.final_speed_mech:.3f} rad/s (< {W_SYNC:.2f}), "
        f"mean torque {report.mean_torque:.5f} N*m "
        f"({abs(report.mean_torque - T_LOAD) / T_LOAD:.2%} off), runtime {runtime:.2f} s",
    )
    assert starts_at_rest
    assert accelerates
    assert settled, f"window means {m_prev:.4f} vs {m_last:.4f}"
    assert below_sync, f"final speed {report.final_speed_mech:.4f} not in (0, {W_SYNC:.4f})"
    assert torque_ok, f"mean torque {report.mean_torque:.5f} vs load {T_LOAD}"
    assert fast_enough, f"runtime {runtime:.2f} s"


def test_criterion_2_symmetric_reduction(symmetric, symmetric_trace):
    """Symmetric machine on a balanced supply: constant steady torque and
    identical torque definitions at every trace point."""
    report = summarize(symmetric_trace, symmetric)
    ripple_ratio = report.torque_ripple_pp / report.mean_torque
    torque_scale = float(np.max(np.abs(symmetric_trace.te)))
    max_dev = float(np.max(np.abs(symmetric_trace.te - symmetric_trace.te_ec)))
    agree = max_dev <= 1e-10 * torque_scale

    ok = ripple_ratio < 0.02 and agree
    _report(
        2,
        ok,
        f"steady ripple {ripple_ratio:.2e} of mean; torque definitions differ by "
        f"{max_dev / torque_scale:.2e} of scale over {len(symmetric_trace)} records",
    )
    assert ripple_ratio < 0.02, f"ripple {ripple_ratio:.4f}"
    assert agree, f"te vs te_ec deviation {max_dev:.3e} (scale {torque_scale:.3f})"


def test_criterion_3_flux_current_round_trip(table1):
    """1000 random current vectors survive the flux map round trip to 1e-12."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        currents = rng.uniform(-25.0, 25.0, size=4)
        fluxes = fluxes_from_currents(table1, *currents)
        back = np.array(currents_from_fluxes(table1, *fluxes))
        scale = float(np.max(np.abs(currents)))
        worst = max(worst, float(np.max(np.abs(back - currents))) / scale)
    ok = worst <= 1e-12
    _report(3, ok, f"worst scaled recovery error {worst:.2e} over 1000 vectors")
    assert ok, f"worst error {worst:.3e}"


_STATE_CHANNELS = ("psi_sa", "psi_sb", "psi_ra", "psi_rb", "omega_mech")


def test_criterion_4_oracle_equivalence(euler_reference, rk4_02_trace):
    """RK4 at dt=1e-4 and Euler at dt=1e-7 agree over the first 0.2 s of the
    rated startup: every state channel within 1e-3 of its scale."""
    worst = {}
    for name in _STATE_CHANNELS:
        ref = euler_reference.channel(name)
        got = rk4_02_trace.channel(name)
        worst[name] = float(np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
    ok = all(v < 1e-3 for v in worst.values())
    _report(
        4,
        ok,
        "max scaled deviation "
        + ", ".join(f"{name} {value:.1e}" for name, value in worst.items()),
    )
    for name, value in worst.items():
        assert value < 1e-3, f"{name} deviates by {value:.3e}"


def test_criterion_5_convergence_order(table1, euler_reference):
    """Order estimate from RK4 endpoint errors at dt=2e-4 and 1e-4 against
    the Euler dt=1e-7 reference over a 0.1 s horizon; requires >= 3.5.

    Expected to FAIL: both RK4 runs sit ~2e-5 from the reference, which is
    the reference's own global error, so the ratio of the two measured
    errors is ~1 and the order estimate is ~0 regardless of the
    integrator's true order (shown to be ~4 by the reference-free check in
    test_dynamics::test_rk4_self_convergence_is_fourth_order).
    """
    idx = 1000  # record at t = 0.1 s (spacing 1e-4 in the reference trace)
    ref = np.array([euler_reference.channel(c)[idx] for c in _STATE_CHANNELS])
    scales = np.array(
        [np.max(np.abs(euler_reference.channel(c)[: idx + 1])) for c in _STATE_CHANNELS]
    )
    errors = {}
    for dt in (2e-4, 1e-4):
        trace = integrate(table1, scenario(dt=dt, duration=0.1))
        end = np.array([trace.channel(c)[-1] for c in _STATE_CHANNELS])
        errors[dt] = float(np.max(np.abs(end - ref) / scales))
    order = math.log2(errors[2e-4] / errors[1e-4])
    ok = order >= 3.5
    _report(
        5,
        ok,
        f"order estimate {order:.3f} from errors {errors[2e-4]:.3e} / {errors[1e-4]:.3e} "
        "(both reference-limited; see docstring)",
    )
    assert order >= 3.5, (
        f"order estimate {order:.3f}: the Euler dt=1e-7 reference's own error "
        f"(~{errors[1e-4]:.1e}) dominates both measurements, masking the "
        "integrator's true fourth-order behavior"
    )


def test_criterion_6_energy_audit(table1, rated_trace):
    """Blocked-rotor and energy-consistent-torque balances close within
    0.5% of input energy; the primary-torque residual is reported."""
    blocked = integrate(table1, scenario(duration=0.5, load_torque=0.0, blocked_rotor=True))
    blocked_audit = energy_audit(blocked, table1, torque_channel="te_ec")
    blocked_ratio = abs(blocked_audit.residual) / blocked_audit.stator_input_energy

    consistent = energy_audit(rated_trace, table1, torque_channel="te_ec")
    consistent_ratio = abs(consistent.residual) / consistent.stator_input_energy

    primary = energy_audit(rated_trace, table1, torque_channel="te")
    primary_ratio = primary.residual / primary.stator_input_energy

    ok = blocked_ratio < 0.005 and consistent_ratio < 0.005
    _report(
        6,
        ok,
        f"blocked-rotor residual {blocked_ratio:.2e}, energy-consistent residual "
        f"{consistent_ratio:.2e}; primary-torque residual {primary_ratio:+.1%} "
        "(reported, not asserted)",
    )
    assert blocked_ratio < 0.005, f"blocked-rotor residual {blocked_ratio:.4%}"
    assert consistent_ratio < 0.005, f"energy-consistent residual {consistent_ratio:.4%}"
    assert math.isfinite(primary_ratio)


def test_criterion_7_phase_swap_reverses_rotation(table1):
    """Swapping the two supply phases negates the steady zero-load speed."""
    supply = rated_supply()
    swapped = VoltageSource(alpha=supply.beta, beta=supply.alpha, frequency=supply.frequency)
    forward = integrate(table1, scenario(load_torque=0.0))
    backward = integrate(table1, scenario(supply=swapped, load_torque=0.0))
    w_fwd = float(np.mean(forward.omega_mech[-2001:]))
    w_bwd = float(np.mean(backward.omega_mech[-2001:]))
    mismatch = abs(w_fwd + w_bwd) / abs(w_fwd)
    ok = w_fwd > 0.0 > w_bwd and mismatch < 0.01
    _report(7, ok, f"steady speeds {w_fwd:+.3f} / {w_bwd:+.3f} rad/s, |sum|/|fwd| = {mismatch:.1e}")
    assert w_fwd > 0.0 > w_bwd
    assert mismatch < 0.01, f"magnitudes differ by {mismatch:.2%}"


def test_criterion_8_cli_contract(tmp_path, capsys):
    """CSV schema, config round-trip, record count and the three exit codes."""
    code = main(["run", "paper_s3", "--output-dir", str(tmp_path)])
    with open(tmp_path / "paper_s3_trace.csv", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        n_rows = sum(1 for _ in reader)
    header_ok = ",".join(header) == CSV_HEADER
    count_ok = n_rows == 10001

    config = load_config("paper_s3")
    round_trip_ok = parse_config(render_config(config), name="paper_s3") == config

    bad = tmp_path / "bad.cfg"
    source = render_config(config)
    bad.write_text(source.replace("machine.l_m_alpha = 0.2464", "machine.l_m_alpha = 0.30"))
    code_invalid = main(["run", str(bad), "--output-dir", str(tmp_path)])

    blow = tmp_path / "blow.cfg"
    blow.write_text(source.replace("integrator.step_size = 0.0001", "integrator.step_size = 0.02"))
    code_numerical = main(["run", str(blow), "--output-dir", str(tmp_path)])
    capsys.readouterr()

    exit_codes_ok = (code, code_invalid, code_numerical) == (0, 1, 2)
    ok = header_ok and count_ok and round_trip_ok and exit_codes_ok
    _report(
        8,
        ok,
        f"header ok={header_ok}, records={n_rows}, round-trip ok={round_trip_ok}, "
        f"exit codes={(code, code_invalid, code_numerical)}",
    )
    assert header_ok
    assert count_ok, f"{n_rows} records"
    assert round_trip_ok
    assert exit_codes_ok, f"exit codes {(code, code_invalid, code_numerical)}"
