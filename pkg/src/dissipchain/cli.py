"""Command-line front end.

    dissipchain evolve --init eee --gamma 0.5 --tmax 20 --out fig2.csv
    dissipchain steady --init egg --gamma 0.3
    dissipchain sweep --init eee --gamma-grid 0.05:0.95:0.05
    dissipchain check --boundary closed --rates 0.3,0.5,0.2
    dissipchain reproduce --out figures/

Options may also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); command-line flags take precedence.
Exit status: 0 on success, 1 on usage errors, 2 when a numerical solve
does not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import oracle
from .dynamics import (commutant_dimension, kernel_report, physicality, propagate,
                       steady_state_from, time_grid)
from .entanglement import concurrence, concurrence_series, default_pairs, partial_trace, sudden_birth
from .errors import ChainError, NoConvergence, UsageError
from .model import (Boundary, ChainSpec, basis_label, basis_state, devectorize, liouvillian,
                    total_excitation)

COMMANDS = ("evolve", "steady", "sweep", "check", "reproduce")
THREADS_ENV = "DISSIPCHAIN_THREADS"
FIGURE_STATES = {"fig2.csv": ("eee",), "fig3.csv": ("eeg", "ege"), "fig4.csv": ("egg", "geg")}


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_sites: int = 3
    boundary: Boundary = Boundary.OPEN
    rates: tuple[float, ...] = (0.5, 0.5)
    initial_state: str | None = None
    t_max: float = 20.0
    dt: float = 0.01
    gamma_grid: tuple[float, float, float] = (0.05, 0.95, 0.05)
    output_path: str | None = None
    tol: float = 1e-6
    window: int = 5

    @property
    def spec(self) -> ChainSpec:
        return ChainSpec(self.n_sites, self.boundary, self.rates)

    def gammas(self) -> list[float]:
        start, stop, step = self.gamma_grid
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(count)]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    p = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="file of 'key = value' lines")
    p.add_argument("--n", "--n-sites", dest="n", help="number of qubits (default 3)")
    p.add_argument("--boundary", help="open or closed (default open)")
    p.add_argument("--rates", help="comma-separated link rates")
    p.add_argument("--gamma", help="three-site open chain with rates gamma, 1-gamma")
    p.add_argument("--init", help="initial product state over e/g, e.g. eeg")
    p.add_argument("--tmax", help="final time (default 20)")
    p.add_argument("--dt", help="time step (default 0.01)")
    p.add_argument("--gamma-grid", dest="gamma_grid", help="start:stop:step (default 0.05:0.95:0.05)")
    p.add_argument("--out", help="output file ('-' for stdout) or directory for reproduce")
    p.add_argument("--tol", help="concurrence threshold for sudden birth (default 1e-6)")
    p.add_argument("--window", help="immediate-onset window in steps (default 5)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dissipchain", description="Qubit chains linked by shared decay channels.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common_options()
    helps = {
        "evolve": "concurrence time series of every qubit pair",
        "steady": "steady state reached from an initial state",
        "sweep": "steady concurrence against the closed form across gamma",
        "check": "steady-state kernel and commutant dimensions",
        "reproduce": "write fig2.csv .. fig5.csv",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


_KEYS = {"n", "n_sites", "boundary", "rates", "gamma", "init", "tmax", "dt", "gamma_grid", "out",
         "tol", "window"}


def _number(raw: str, name: str, kind=float):
    try:
        value = kind(raw)
    except ValueError:
        raise UsageError(f"--{name}: not a valid number: {raw!r}") from None
    if kind is float and not math.isfinite(value):
        raise UsageError(f"--{name} must be finite")
    return value


def parse_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    merged = {}
    if "config" in ns:
        merged.update(read_config(ns.pop("config")))
    merged.update(ns)
    if "n_sites" in merged:
        merged.setdefault("n", merged.pop("n_sites"))
    unknown = set(merged) - _KEYS
    if unknown:
        raise UsageError(f"unknown configuration keys: {', '.join(sorted(unknown))}")

    n = _number(merged.get("n", "3"), "n", int)
    if n < 2:
        raise UsageError("--n must be at least 2")
    try:
        boundary = Boundary(merged.get("boundary", "open").lower())
    except ValueError:
        raise UsageError("--boundary must be 'open' or 'closed'") from None
    n_links = n - 1 if boundary is Boundary.OPEN else n

    if "gamma" in merged and "rates" in merged:
        raise UsageError("give either --gamma or --rates, not both")
    if "gamma" in merged:
        gamma = _number(merged["gamma"], "gamma")
        if n_links != 2:
            raise UsageError("--gamma needs a three-site open chain; use --rates otherwise")
        if not 0 < gamma < 1:
            raise UsageError("--gamma must lie in (0, 1)")
        rates = (gamma, 1.0 - gamma)
    elif "rates" in merged:
        rates = tuple(_number(r, "rates") for r in merged["rates"].split(","))
    else:
        rates = (0.5,) * n_links

    init = merged.get("init")
    if init is not None:
        init = init.strip().lower()
        if len(init) != n or set(init) - {"e", "g"}:
            raise UsageError(f"--init must be {n} characters over 'e'/'g', got {init!r}")
    elif command in ("evolve", "steady"):
        raise UsageError(f"{command} needs --init")

    try:
        grid = tuple(float(x) for x in merged.get("gamma_grid", "0.05:0.95:0.05").split(":"))
    except ValueError:
        grid = ()
    if len(grid) != 3 or grid[2] <= 0 or not 0 < grid[0] <= grid[1] < 1:
        raise UsageError("--gamma-grid must be start:stop:step with 0 < start <= stop < 1")

    config = RunConfig(
        command=command,
        n_sites=n,
        boundary=boundary,
        rates=rates,
        initial_state=init,
        t_max=_number(merged.get("tmax", "20"), "tmax"),
        dt=_number(merged.get("dt", "0.01"), "dt"),
        gamma_grid=grid,
        output_path=merged.get("out"),
        tol=_number(merged.get("tol", "1e-6"), "tol"),
        window=_number(merged.get("window", "5"), "window", int),
    )
    if config.dt <= 0 or config.t_max < config.dt:
        raise UsageError("need dt > 0 and tmax >= dt")
    if config.tol <= 0 or config.window < 1:
        raise UsageError("need tol > 0 and window >= 1")
    try:
        config.spec
    except ChainError as exc:
        raise UsageError(str(exc)) from None
    if command == "sweep" and (n, boundary) != (3, Boundary.OPEN):
        raise UsageError("sweep compares against the three-site open chain closed forms")
    return config


def fmt(x) -> str:
    return format(float(x), ".12g")


def _pair_name(pair) -> str:
    return f"C_{pair[0]}_{pair[1]}"


def _write(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())


def threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if count < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return count


def evolution_rows(config: RunConfig, init: str):
    """Rows of the evolve table and the sudden-birth classification of each pair."""
    gen = liouvillian(config.spec)
    traj = propagate(gen, basis_state(init), time_grid(config.t_max, config.dt))
    series = concurrence_series(traj)
    rows = []
    for k, rho in enumerate(traj.density_matrices()):
        diag = physicality(rho)
        rows.append([fmt(traj.times[k]), *(fmt(c) for c in series.values[k]),
                     fmt(diag.trace_error), fmt(diag.min_eigenvalue), fmt(total_excitation(rho))])
    births = {p: sudden_birth(series, p, config.tol, config.window) for p in series.pairs}
    return series.pairs, rows, births


def _report_births(init: str, births, config: RunConfig) -> None:
    for pair, birth in births.items():
        print(f"# {init} pair {pair[0]}-{pair[1]}: {birth} (tol={config.tol:g}, window={config.window})",
              file=sys.stderr)


_EVOLVE_TAIL = ["trace_err", "min_eig", "excitation"]


def run_evolve(config: RunConfig) -> None:
    pairs, rows, births = evolution_rows(config, config.initial_state)
    _write(config.output_path, ["time", *map(_pair_name, pairs), *_EVOLVE_TAIL], rows)
    _report_births(config.initial_state, births, config)


def run_steady(config: RunConfig) -> None:
    gen = liouvillian(config.spec)
    report = steady_state_from(gen, basis_state(config.initial_state))
    pairs = default_pairs(config.n_sites)
    cs = [concurrence(partial_trace(report.steady_state, p, config.n_sites)) for p in pairs]
    f = "" if report.f_fit is None else fmt(report.f_fit)
    _write(config.output_path,
           ["init", "f_fit", *map(_pair_name, pairs), "residual", "kernel_dim", "elapsed_T"],
           [[config.initial_state, f, *map(fmt, cs), fmt(report.residual),
             str(report.kernel_dimension), fmt(report.elapsed_T)]])


def sweep_rows(config: RunConfig, labels) -> list[list[str]]:
    gammas = config.gammas()
    cells = [(label, g) for label in sorted(labels) for g in gammas]
    gens = {g: liouvillian(ChainSpec.open_three(g)) for g in gammas}

    def cell(item):
        label, g = item
        report = steady_state_from(gens[g], basis_state(label), kernel_dimension=kernels[g])
        c_num = concurrence(partial_trace(report.steady_state, (1, 2), 3))
        c_ref = oracle.steady_concurrence(oracle.f_closed_form(label, g))
        return [fmt(g), label, fmt(c_num), fmt(c_ref), fmt(abs(c_num - c_ref))]

    with ThreadPoolExecutor(max_workers=threads()) as pool:
        kernels = dict(zip(gammas, pool.map(lambda g: kernel_report(gens[g])[0], gammas)))
        return list(pool.map(cell, cells))


def run_sweep(config: RunConfig) -> None:
    labels = [config.initial_state] if config.initial_state else oracle.LABELS
    _write(config.output_path, ["gamma", "init", "C_numeric", "C_oracle", "abs_err"],
           sweep_rows(config, labels))


def steady_label(basis: list[np.ndarray], n: int) -> str:
    if len(basis) != 1:
        return "non-unique"
    rho = devectorize(basis[0])
    rho = rho / np.trace(rho)
    k = int(np.argmax(np.abs(np.diag(rho))))
    target = np.zeros_like(rho)
    target[k, k] = 1.0
    return basis_label(k, n) if np.abs(rho - target).max() <= 1e-9 else "mixed"


def run_check(config: RunConfig) -> None:
    gen = liouvillian(config.spec)
    dim, basis = kernel_report(gen)
    comm = commutant_dimension(gen.jumps)
    rates = ";".join(fmt(r) for r in config.rates)
    _write(config.output_path,
           ["boundary", "n_sites", "rates", "kernel_dim", "commutant_dim", "steady_label"],
           [[config.boundary.value, str(config.n_sites), rates, str(dim), str(comm),
             steady_label(basis, config.n_sites)]])


def run_reproduce(config: RunConfig) -> None:
    outdir = Path(config.output_path or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, labels in FIGURE_STATES.items():
        rows = []
        header = None
        for init in labels:
            pairs, body, births = evolution_rows(config, init)
            header = ["init", "time", *map(_pair_name, pairs), *_EVOLVE_TAIL]
            rows.extend([init, *row] for row in body)
            _report_births(init, births, config)
        _write(str(outdir / name), header, rows)
    sweep = replace(config, n_sites=3, boundary=Boundary.OPEN)
    _write(str(outdir / "fig5.csv"), ["gamma", "init", "C_numeric", "C_oracle", "abs_err"],
           sweep_rows(sweep, oracle.LABELS))


RUNNERS = {
    "evolve": run_evolve,
    "steady": run_steady,
    "sweep": run_sweep,
    "check": run_check,
    "reproduce": run_reproduce,
}


def run(config: RunConfig) -> int:
    try:
        RUNNERS[config.command](config)
    except NoConvergence as exc:
        print(f"dissipchain: no convergence: {exc}", file=sys.stderr)
        return 2
    except (ChainError, OSError) as exc:
        print(f"dissipchain: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    return run(config)
