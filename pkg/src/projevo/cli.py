"""Command-line campaigns: figure sweeps, time densities and trajectories.

Each subcommand is a thin shell over the library: it builds inputs from a
``RunConfig``, calls one table function and writes CSV.  The table
functions are importable, so every table can be rebuilt without the CLI.

Exit codes: 0 success, 1 other library error, 2 configuration error,
3 quadrature convergence failure.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import contextlib
import dataclasses
import io
import sys

from . import config as cfgmod
from .csvio import render
from .detection import pi_d_box, pi_d_numeric, peak_scan
from .errors import ConfigError, ConvergenceError, ProjEvoError
from .surrogate import run_detection_trajectories, write_trajectories_csv
from .timeobs import probc_density
from .wavepacket import RectPacket

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3


@contextlib.contextmanager
def _pool(jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            yield ex
    else:
        yield None


def _mapper(executor):
    return map if executor is None else executor.map


def _packet(cfg, reverse):
    return cfg.packet.reversed() if reverse else cfg.packet


def _with_dk(packet, dk):
    if not isinstance(packet, RectPacket):
        raise ConfigError("key 'packet.kind': dk sweeps need a rect packet")
    dks = packet.dk.copy()
    dks[0] = dk
    return RectPacket(packet.k0, dks, None, packet.origin)


def _x_box(box, center, length):
    return dataclasses.replace(box, a1=center - 0.5 * length, a2=center + 0.5 * length)


# -- tables ------------------------------------------------------------------

def fig1_table(cfg, reverse=False, exact=False, executor=None):
    """pi_D over the etime grid; returns (header, rows)."""
    packet = _packet(cfg, reverse)
    taus = cfg.tau_grid
    if not isinstance(packet, RectPacket):
        scan = peak_scan(packet, cfg.propagator, cfg.detector, taus, "exact", executor=executor)
        return ["tau_d", "pi_d_exact"], list(zip(taus, scan.pi_d))
    cols = [peak_scan(packet, cfg.propagator, cfg.detector, taus).pi_d]
    header = ["tau_d", "pi_d_analytic"]
    if exact:
        cols.append(peak_scan(packet, cfg.propagator, cfg.detector, taus, "exact", executor=executor).pi_d)
        header.append("pi_d_exact")
    return header, list(zip(taus, *cols))


def fig2_table(cfg, reverse=False, exact=False, executor=None):
    """pi_D over (dk, etime); dk varies the x half-width."""
    base = _packet(cfg, reverse)
    method = "exact" if exact else "analytic"

    def cell(dk):
        return peak_scan(_with_dk(base, dk), cfg.propagator, cfg.detector, cfg.tau_grid, method).pi_d

    rows = []
    for dk, col in zip(cfg.dk_grid, _mapper(executor)(cell, cfg.dk_grid)):
        rows.extend((t, dk, p) for t, p in zip(cfg.tau_grid, col))
    return ["tau_d", "dk", "pi_d"], rows


def fig3_table(cfg, reverse=False, exact=False, executor=None):
    """Max over etime of pi_D per (dk, detector length); boxes share a centre."""
    base = _packet(cfg, reverse)
    method = "exact" if exact else "analytic"
    cells = [(dk, L) for dk in cfg.dk_grid for L in cfg.length_grid]

    def cell(c):
        dk, length = c
        box = _x_box(cfg.detector, cfg.length_center, length)
        return peak_scan(_with_dk(base, dk), cfg.propagator, box, cfg.tau_grid, method).max_pi_d

    values = list(_mapper(executor)(cell, cells))
    return ["dk", "detector_length", "max_pi_d"], [(dk, L, v) for (dk, L), v in zip(cells, values)]


def timeprob_table(cfg):
    """Conditional detection-time density; returns (header, rows, metadata)."""
    p = cfg.time_profile
    dist = probc_density(p, cfg.propagator.beta0, cfg.tau_d, cfg.time_grid)
    meta = {"beta0": cfg.propagator.beta0, "tau_d": cfg.tau_d, "t0": p.t0,
            "kind": p.kind, "width": p.width, "k0_center": p.k0_center}
    return ["t", "density"], list(zip(cfg.time_grid.points, dist.density)), meta


def detect_result(cfg, reverse=False, exact=False):
    packet = _packet(cfg, reverse)
    if isinstance(packet, RectPacket) and not exact:
        return pi_d_box(packet, cfg.propagator, cfg.detector, cfg.tau_d)
    return pi_d_numeric(packet, cfg.propagator, cfg.detector, cfg.tau_d, "exact")


def trajectory_records(cfg, reverse=False, exact=False):
    if cfg.seed is None:
        raise ConfigError("key 'seed': the trajectory command needs a seed (config or --seed)")
    pi_d = min(max(detect_result(cfg, reverse, exact).probability, 0.0), 1.0)
    bins = None
    if cfg.time_trigger:
        dist = probc_density(cfg.time_profile, cfg.propagator.beta0, cfg.tau_d, cfg.time_grid)
        bins = dist.coarse_bins(cfg.time_bins)
    return run_detection_trajectories(pi_d, cfg.tau_d, cfg.runs, cfg.seed, cfg.free_steps, bins)


# -- command line --------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="projevo", description="Detection-probability campaigns and trajectories.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("fig1", "pi_D versus final etime"),
                        ("fig2", "pi_D versus etime and packet width"),
                        ("fig3", "maximum pi_D versus packet width and detector length"),
                        ("timeprob", "conditional detection-time density"),
                        ("trajectory", "seeded trajectories of the detection schedule"),
                        ("detect", "pi_D at the configured tau_d")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output CSV path (default: config output, else stdout)")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        p.add_argument("--reverse", action="store_true", help="mirror the packet momentum")
        p.add_argument("--exact", action="store_true", help="use the exact-dispersion quadrature")
        p.add_argument("--tau-min", type=float)
        p.add_argument("--tau-max", type=float)
        p.add_argument("--tau-steps", type=int)
        p.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    return ap


def _apply_overrides(cfg, args):
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg.seed = args.seed
    if args.tau_min is not None or args.tau_max is not None or args.tau_steps is not None:
        old = cfg.tau_grid
        lo = old[0] if args.tau_min is None else args.tau_min
        hi = old[-1] if args.tau_max is None else args.tau_max
        n = old.size if args.tau_steps is None else args.tau_steps
        cfg.tau_grid = cfgmod.make_tau_grid(lo, hi, n)
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    return cfg


def run(args):
    """Execute parsed arguments and return the CSV text."""
    cfg = _apply_overrides(cfgmod.load(args.config), args)
    with _pool(args.jobs) as ex:
        if args.command == "fig1":
            return render(*fig1_table(cfg, args.reverse, args.exact, ex)), cfg
        if args.command == "fig2":
            return render(*fig2_table(cfg, args.reverse, args.exact, ex)), cfg
        if args.command == "fig3":
            return render(*fig3_table(cfg, args.reverse, args.exact, ex)), cfg
    if args.command == "timeprob":
        header, rows, meta = timeprob_table(cfg)
        return render(header, rows, meta), cfg
    if args.command == "detect":
        r = detect_result(cfg, args.reverse, args.exact)
        return render(["tau_d", "probability", "method", "error_bound"],
                      [(cfg.tau_d, r.probability, r.method, r.error_bound)]), cfg
    buf = io.StringIO()
    write_trajectories_csv(buf, trajectory_records(cfg, args.reverse, args.exact))
    return buf.getvalue(), cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text, cfg = run(args)
        out = args.out or cfg.output
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ProjEvoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
