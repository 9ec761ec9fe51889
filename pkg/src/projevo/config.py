"""JSON run configuration for the command-line campaigns.

Every section is optional and falls back to the defaults below, which
reproduce the single-slab setup (v_g = 0.5, detector x in [5, 10], source
at the origin).  Unknown keys are rejected.  ``null`` for a detector bound
means that side is unbounded.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .detection import DetectorBox, check_tau_grid
from .errors import ConfigError, ProjEvoError
from .propagation import FreePropagator
from .timeobs import TimeGrid
from .wavepacket import CoherentPacket, RectPacket, TimeProfile

DEFAULTS = {
    "packet": {"kind": "rect", "k0": [1.0, 0.0, 0.0], "dk": [1.0, 1.0, 1.0], "origin": [0.0, 0.0, 0.0]},
    "propagator": {"beta0": 1.0, "beta": 0.25},
    "detector": {"a1": 5.0, "a2": 10.0, "b1": None, "b2": None, "c1": None, "c2": None},
    "tau_grid": {"min": 0.0, "max": 40.0, "steps": 401},
    "dk_grid": {"min": 0.02, "max": 2.0, "points": 30},
    "length_grid": {"min": 1.0, "max": 20.0, "points": 20, "center": 7.5},
    "time_profile": {"kind": "gaussian", "k0_center": 0.0, "width": 10.0, "t0": 0.0},
    "time_grid": {"min": 0.0, "max": 40.0, "steps": 801},
    "tau_d": 15.0,
    "seed": None,
    "trajectory": {"runs": 1, "free_steps": 4, "time_trigger": False, "time_bins": 40},
    "output": None,
}

_PACKET_KEYS = {
    "rect": {"kind", "k0", "dk", "origin", "alpha"},
    "coherent": {"kind", "K", "a", "sigma"},
}


def _line_of(text, key):
    """First line (1-based) mentioning ``"key"``; None when absent."""
    if text is None:
        return None
    needle = json.dumps(key)
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _fail(msg, path, text=None):
    line = _line_of(text, path.split(".")[-1]) if path else None
    where = f"key '{path}'" + (f" (line {line})" if line else "")
    raise ConfigError(f"{where}: {msg}")


def _num(value, path, text, integer=False, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"expected a number, got {value!r}", path, text)
    if integer:
        if int(value) != value:
            _fail(f"expected an integer, got {value!r}", path, text)
        return int(value)
    if not math.isfinite(value):
        _fail("value must be finite", path, text)
    return float(value)


def _merge(defaults, given, path, text):
    if not isinstance(given, dict):
        _fail("expected an object", path, text)
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        _fail(f"unknown key(s) {unknown}", f"{path}.{unknown[0]}" if path else unknown[0], text)
    out = dict(defaults)
    out.update(given)
    return out


@dataclass
class RunConfig:
    """Validated parameters of one CLI campaign."""

    packet: object
    propagator: FreePropagator
    detector: DetectorBox
    tau_grid: np.ndarray
    dk_grid: np.ndarray
    length_grid: np.ndarray
    length_center: float
    time_profile: TimeProfile
    time_grid: TimeGrid
    tau_d: float
    seed: int = None
    runs: int = 1
    free_steps: int = 4
    time_trigger: bool = False
    time_bins: int = 40
    output: str = None
    raw: dict = field(default_factory=dict, repr=False)


def _grid(section, path, text, count_key):
    lo = _num(section["min"], f"{path}.min", text)
    hi = _num(section["max"], f"{path}.max", text)
    n = _num(section[count_key], f"{path}.{count_key}", text, integer=True)
    if n < 1:
        _fail("grid needs at least one point", f"{path}.{count_key}", text)
    if n > 1 and not lo < hi:
        _fail("grid needs min < max", f"{path}.max", text)
    return lo, hi, n


def _packet(sec, text):
    kind = sec.get("kind", "rect")
    if kind not in _PACKET_KEYS:
        _fail(f"unknown packet kind {kind!r}", "packet.kind", text)
    base = DEFAULTS["packet"] if kind == "rect" else {"kind": "coherent", "K": [1.0, 0.0, 0.0],
                                                        "a": [0.0, 0.0, 0.0], "sigma": 1.0}
    allowed = {k: base.get(k) for k in _PACKET_KEYS[kind]}
    sec = _merge(allowed, sec, "packet", text)
    try:
        if kind == "rect":
            return RectPacket(sec["k0"], sec["dk"], sec["alpha"], sec["origin"])
        return CoherentPacket(sec["K"], sec["a"], _num(sec["sigma"], "packet.sigma", text))
    except (ProjEvoError, TypeError, ValueError) as exc:
        _fail(str(exc), "packet", text)


def make_tau_grid(lo, hi, steps, text=None):
    """Uniform etime grid, validated like the config section."""
    if int(steps) != steps or steps < 1:
        _fail("tau grid is empty", "tau_grid.steps", text)
    try:
        return check_tau_grid(np.linspace(lo, hi, int(steps)))
    except ProjEvoError as exc:
        _fail(str(exc), "tau_grid", text)


def from_dict(data, text=None):
    """Validate a parsed JSON document; ``text`` is only used for line numbers."""
    d = _merge(DEFAULTS, data, "", text)
    packet = _packet(d["packet"], text)

    prop_sec = _merge(DEFAULTS["propagator"], d["propagator"], "propagator", text)
    prop = FreePropagator(_num(prop_sec["beta0"], "propagator.beta0", text),
                          _num(prop_sec["beta"], "propagator.beta", text))

    det_sec = _merge(DEFAULTS["detector"], d["detector"], "detector", text)
    bounds = {}
    for key, value in det_sec.items():
        v = _num(value, f"detector.{key}", text, allow_none=True)
        bounds[key] = (-math.inf if key.endswith("1") else math.inf) if v is None else v
    try:
        box = DetectorBox(**bounds)
    except ProjEvoError as exc:
        _fail(str(exc), "detector", text)

    lo, hi, n = _grid(_merge(DEFAULTS["tau_grid"], d["tau_grid"], "tau_grid", text), "tau_grid", text, "steps")
    taus = make_tau_grid(lo, hi, n, text)

    dk_sec = _merge(DEFAULTS["dk_grid"], d["dk_grid"], "dk_grid", text)
    lo, hi, n = _grid(dk_sec, "dk_grid", text, "points")
    if lo <= 0:
        _fail("dk values must be positive", "dk_grid.min", text)
    dks = np.geomspace(lo, hi, n) if n > 1 else np.array([lo])

    len_sec = _merge(DEFAULTS["length_grid"], d["length_grid"], "length_grid", text)
    lo, hi, n = _grid(len_sec, "length_grid", text, "points")
    if lo <= 0:
        _fail("detector lengths must be positive", "length_grid.min", text)
    lengths = np.linspace(lo, hi, n) if n > 1 else np.array([lo])
    center = _num(len_sec["center"], "length_grid.center", text)

    tp_sec = _merge(DEFAULTS["time_profile"], d["time_profile"], "time_profile", text)
    try:
        profile = TimeProfile(tp_sec["kind"], _num(tp_sec["k0_center"], "time_profile.k0_center", text),
                              _num(tp_sec["width"], "time_profile.width", text),
                              _num(tp_sec["t0"], "time_profile.t0", text))
    except ProjEvoError as exc:
        _fail(str(exc), "time_profile", text)

    tg_sec = _merge(DEFAULTS["time_grid"], d["time_grid"], "time_grid", text)
    try:
        tgrid = TimeGrid(_num(tg_sec["min"], "time_grid.min", text), _num(tg_sec["max"], "time_grid.max", text),
                         _num(tg_sec["steps"], "time_grid.steps", text, integer=True))
    except ProjEvoError as exc:
        _fail(str(exc), "time_grid", text)

    tau_d = _num(d["tau_d"], "tau_d", text)
    if tau_d < 0:
        _fail("tau_d must be non-negative", "tau_d", text)
    seed = _num(d["seed"], "seed", text, integer=True, allow_none=True)
    if seed is not None and not 0 <= seed < 2 ** 64:
        _fail("seed must be an unsigned 64-bit integer", "seed", text)

    tr_sec = _merge(DEFAULTS["trajectory"], d["trajectory"], "trajectory", text)
    runs = _num(tr_sec["runs"], "trajectory.runs", text, integer=True)
    if runs < 1:
        _fail("runs must be at least 1", "trajectory.runs", text)
    free_steps = _num(tr_sec["free_steps"], "trajectory.free_steps", text, integer=True)
    if free_steps < 0:
        _fail("free_steps must be non-negative", "trajectory.free_steps", text)
    if not isinstance(tr_sec["time_trigger"], bool):
        _fail("expected true or false", "trajectory.time_trigger", text)
    time_bins = _num(tr_sec["time_bins"], "trajectory.time_bins", text, integer=True)
    if not 1 <= time_bins <= tgrid.steps:
        _fail(f"time_bins must lie in [1, {tgrid.steps}]", "trajectory.time_bins", text)

    output = d["output"]
    if output is not None and not isinstance(output, str):
        _fail("expected a path string", "output", text)

    return RunConfig(packet, prop, box, taus, dks, lengths, center, profile, tgrid, tau_d, seed,
                     runs, free_steps, tr_sec["time_trigger"], time_bins, output, d)


def load(path=None):
    """Read and validate a config file; ``None`` gives the defaults."""
    if path is None:
        return from_dict({})
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("line 1: config must be a JSON object")
    return from_dict(data, text)
