"""Finite-dimensional stand-in for the detection schedule.

The spatial register is two-dimensional: ``e1`` is the emitted packet
|mu>, ``e0`` the part of the evolved packet lying inside the detector.
Free evolution is a real rotation U(tau) by angle theta(tau) = theta_D *
tau / tau_D with sin^2(theta_D) = pi_D.  Free steps are the shifted
families U(tau_j) {mu, other} U(tau_j)^+, with the state carried between
them, so the packet branch persists with probability 1 and the detector
family {detected, not_detected} fires with probability pi_D.

An optional time register holds the discretised time wave at tau_D; the
trigger family is one projector per time bin.
"""

from dataclasses import dataclass
import math

import numpy as np

from .csvio import write_rows
from .engine import Carry, DensityState, ProjectionFamily, Projector, run_trajectory, validate_schedule
from .errors import DomainError

# etime offset of the trigger after the detector step; purely a label
TRIGGER_EPSILON = 1e-9


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    # maps e1 -> sin(theta) e0 + cos(theta) e1
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


@dataclass
class DetectionSchedule:
    rho0: DensityState
    families: list


def detection_schedule(pi_d, tau_d, free_steps=4, time_bins=None):
    """Build (rho0, schedule) for one source -> free flight -> detector run.

    Free steps sit at tau_D * j / free_steps, j = 0 .. free_steps - 1.
    ``time_bins`` is an optional ``(bin_times, bin_probabilities)`` pair;
    when given, a time-trigger family follows the detector.
    """
    if not 0.0 <= pi_d <= 1.0:
        raise DomainError("pi_d must lie in [0, 1]")
    if not (math.isfinite(tau_d) and tau_d >= 0):
        raise DomainError("tau_d must be finite and non-negative")
    if int(free_steps) != free_steps or free_steps < 0:
        raise DomainError("free_steps must be a non-negative integer")
    theta_d = math.asin(math.sqrt(pi_d))
    e0 = np.array([1, 0], dtype=np.complex128)
    e1 = np.array([0, 1], dtype=np.complex128)

    if time_bins is not None:
        times, probs = time_bins
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise DomainError("time bin probabilities must be non-negative and sum to 1")
        if len(times) != probs.size:
            raise DomainError("time bins and probabilities differ in length")
        time_vec = np.sqrt(probs).astype(np.complex128)
    else:
        time_vec = np.ones(1, dtype=np.complex128)
    eye_t = np.eye(time_vec.size)

    def spatial(op):
        return np.kron(op, eye_t)

    def u_at(tau):
        return rotation(theta_d * tau / tau_d) if tau_d > 0 else rotation(theta_d)

    families = []
    if tau_d > 0 and free_steps > 0:
        rho_vec = np.kron(e1, time_vec)
        prev = 0.0
        for j in range(int(free_steps)):
            tau = tau_d * j / free_steps
            u = u_at(tau)
            if j:
                families.append(Carry(spatial(u_at(tau - prev))))
            ket, perp = u @ e1, u @ e0
            families.append(ProjectionFamily(
                (Projector(spatial(np.outer(ket, ket.conj())), "mu"),
                 Projector(spatial(np.outer(perp, perp.conj())), "other")), tau))
            prev = tau
        families.append(Carry(spatial(u_at(tau_d - prev))))
    else:
        # no free flight: the source emits the already-evolved packet
        rho_vec = np.kron(rotation(theta_d) @ e1, time_vec)
    families.append(ProjectionFamily(
        (Projector(spatial(np.diag([1.0, 0.0])), "detected"),
         Projector(spatial(np.diag([0.0, 1.0])), "not_detected")), tau_d))
    if time_bins is not None:
        projs = []
        for i, t in enumerate(times):
            bin_p = np.zeros((time_vec.size, time_vec.size))
            bin_p[i, i] = 1.0
            projs.append(Projector(np.kron(np.eye(2), bin_p), float(t)))
        families.append(ProjectionFamily(tuple(projs), tau_d + TRIGGER_EPSILON))
    return DetectionSchedule(DensityState(np.outer(rho_vec, rho_vec.conj())), families)


def run_detection_trajectories(pi_d, tau_d, runs, seed, free_steps=4, time_bins=None):
    """Run ``runs`` independent trajectories; run i uses a seed derived from ``seed``."""
    if runs < 1:
        raise DomainError("runs must be at least 1")
    sched = detection_schedule(pi_d, tau_d, free_steps, time_bins)
    seeds = np.random.SeedSequence(seed).generate_state(runs, dtype=np.uint64)
    validate_schedule(sched.rho0, sched.families)
    return [run_trajectory(sched.rho0, sched.families, int(s), validate=False) for s in seeds]


def detected_fraction(records):
    hits = sum(1 for r in records if any(s.outcome == "detected" for s in r.steps))
    return hits / len(records)


def write_trajectories_csv(fh, records):
    """One row per step; the ``run`` column is added only for multi-run output."""
    if len(records) == 1:
        records[0].write_csv(fh)
        return
    rows = ((run, *row) for run, rec in enumerate(records) for row in rec.rows())
    write_rows(fh, ["run", "step_index", "tau", "outcome_label", "conditional_probability"], rows)
