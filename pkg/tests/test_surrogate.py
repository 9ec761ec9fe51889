import io
import math

import numpy as np
import pytest

from projevo.engine import Carry, ProjectionFamily
from projevo.errors import DomainError
from projevo.surrogate import (detected_fraction, detection_schedule, rotation, run_detection_trajectories,
                               write_trajectories_csv)


def test_rotation_maps_packet_into_detector():
    e1 = np.array([0, 1])
    theta = 0.3
    assert np.allclose(rotation(theta) @ e1, [math.sin(theta), math.cos(theta)])


def test_schedule_shape():
    sched = detection_schedule(0.6, 15.0, free_steps=3)
    kinds = [type(x).__name__ for x in sched.families]
    assert kinds == ["ProjectionFamily", "Carry", "ProjectionFamily", "Carry", "ProjectionFamily",
                     "Carry", "ProjectionFamily"]
    etimes = [f.etime for f in sched.families if isinstance(f, ProjectionFamily)]
    assert etimes == [0.0, 5.0, 10.0, 15.0]


def test_free_steps_are_certain_and_detector_fires_with_pi_d():
    recs = run_detection_trajectories(0.37, 12.0, 3, seed=1, free_steps=5)
    for r in recs:
        assert [s.outcome for s in r.steps[:5]] == ["mu"] * 5
        assert all(s.probability == pytest.approx(1.0, abs=1e-12) for s in r.steps[:5])
        last = r.steps[-1]
        assert last.probability == pytest.approx(0.37 if last.outcome == "detected" else 0.63, abs=1e-12)


def test_certain_detection():
    recs = run_detection_trajectories(1.0, 15.0, 50, seed=9)
    assert detected_fraction(recs) == 1.0
    assert all(r.steps[-1].probability == pytest.approx(1.0) for r in recs)


def test_no_free_flight():
    recs = run_detection_trajectories(0.25, 0.0, 4, seed=2, free_steps=0)
    assert all(len(r.steps) == 1 for r in recs)
    assert recs[0].steps[0].probability in (pytest.approx(0.25), pytest.approx(0.75))


def test_time_trigger_samples_bins():
    times = [14.0, 15.0, 16.0]
    probs = [0.2, 0.5, 0.3]
    recs = run_detection_trajectories(0.9, 15.0, 4000, seed=5, time_bins=(times, probs))
    labels = [r.steps[-1].outcome for r in recs]
    assert set(labels) <= set(times)
    for t, p in zip(times, probs):
        freq = labels.count(t) / len(labels)
        assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / len(labels))
    assert recs[0].steps[-1].tau > 15.0


def test_seed_reproducibility_and_independence():
    a = run_detection_trajectories(0.5, 10.0, 200, seed=3)
    b = run_detection_trajectories(0.5, 10.0, 200, seed=3)
    c = run_detection_trajectories(0.5, 10.0, 200, seed=4)
    outcomes = lambda rs: [r.steps[-1].outcome for r in rs]
    assert outcomes(a) == outcomes(b)
    assert outcomes(a) != outcomes(c)


def test_argument_validation():
    with pytest.raises(DomainError):
        detection_schedule(1.2, 1.0)
    with pytest.raises(DomainError):
        detection_schedule(0.5, -1.0)
    with pytest.raises(DomainError):
        detection_schedule(0.5, 1.0, time_bins=([1, 2], [0.5, 0.6]))
    with pytest.raises(DomainError):
        run_detection_trajectories(0.5, 1.0, 0, 1)


def test_csv_layout():
    buf = io.StringIO()
    write_trajectories_csv(buf, run_detection_trajectories(0.5, 2.0, 1, 1, free_steps=1))
    assert buf.getvalue().splitlines()[0] == "step_index,tau,outcome_label,conditional_probability"
    buf = io.StringIO()
    write_trajectories_csv(buf, run_detection_trajectories(0.5, 2.0, 2, 1, free_steps=1))
    lines = buf.getvalue().splitlines()
    assert lines[0] == "run,step_index,tau,outcome_label,conditional_probability"
    assert lines[1].startswith("0,0,0,mu,") and lines[-1].startswith("1,1,2,")
