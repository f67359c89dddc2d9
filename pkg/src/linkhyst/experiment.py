"""Single runs, parameter sweeps and the CSV result format."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .config import ExperimentConfig
from .metrics import RunResult, mean_ci95, overhead, pdr
from .mobility import ConfigError, build_chain_scenario
from .routing import Algorithm, Network

CSV_HEADER = (
    "kind", "speed_kmh", "algorithm", "seed", "data_sent", "data_received",
    "pdr", "control_tx", "mean_pdr", "ci95", "mean_control_tx",
)


def build_network(
    cfg: ExperimentConfig, speed: float, algorithm: Algorithm | str, seed: int, record_trace: bool = False
) -> Network:
    if not speed > 0:
        raise ConfigError("scenario.speed", "must be > 0")
    radio = cfg.propagation()
    scenario = build_chain_scenario(replace(cfg.scenario, speed=float(speed)), radio, cfg.timing, cfg.traffic)
    return Network(
        scenario,
        Algorithm(algorithm),
        cfg.loss,
        cfg.signal.params(radio),
        seed,
        record_trace=record_trace,
    )


def result_of(net: Network, speed: float, seed: int) -> RunResult:
    c = net.counters
    return RunResult(
        data_sent=c["data_sent"],
        data_received=c["data_received"],
        control_transmissions=c["control_tx"],
        run_seed=seed,
        speed=float(speed),
        algorithm=net.algorithm.value,
        control_bytes=c["control_bytes"],
        hello_transmissions=c["hello_tx"],
        tc_transmissions=c["tc_tx"],
        drops={k[5:]: v for k, v in sorted(c.items()) if k.startswith("drop_")},
        trace_hash=net.trace_hash(),
    )


def run_once(
    cfg: ExperimentConfig,
    speed: float,
    algorithm: Algorithm | str,
    seed: int,
    trace_path: str | None = None,
) -> RunResult:
    net = build_network(cfg, speed, algorithm, seed, record_trace=trace_path is not None)
    net.run()
    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write("t,node,event_kind,details\n")
            for line in net.trace:
                fh.write(line + "\n")
    return result_of(net, speed, seed)


@dataclass(frozen=True)
class Cell:
    speed: float
    algorithm: Algorithm
    seed: int


class SweepError(RuntimeError):
    def __init__(self, cell: Cell, cause: BaseException):
        self.cell = cell
        super().__init__(
            f"run failed at speed={cell.speed} algorithm={cell.algorithm.value} seed={cell.seed}: {cause}"
        )


def _run_cell(args: tuple[ExperimentConfig, Cell]) -> RunResult:
    cfg, cell = args
    try:
        return run_once(cfg, cell.speed, cell.algorithm, cell.seed)
    except Exception as exc:
        raise SweepError(cell, exc) from exc


def sweep(cfg: ExperimentConfig, jobs: int | None = None) -> list[RunResult]:
    """Run every (speed, algorithm, seed) cell; results sorted in that order."""
    cells = [
        Cell(float(s), Algorithm(a), int(seed))
        for s in cfg.sweep.speeds_kmh
        for a in cfg.sweep.algorithms
        for seed in cfg.sweep.seeds
    ]
    jobs = cfg.sweep.jobs if jobs is None else jobs
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_cell, [(cfg, c) for c in cells]))
    else:
        results = [_run_cell((cfg, c)) for c in cells]
    results.sort(key=lambda r: (r.speed, r.algorithm, r.run_seed))
    return results


@dataclass(frozen=True)
class Aggregate:
    speed: float
    algorithm: str
    mean_pdr: float
    ci95: float | None  # None for a single sample
    mean_control_tx: float
    n: int


def aggregate(results: Iterable[RunResult], unit: str = "transmissions") -> list[Aggregate]:
    groups: dict[tuple[float, str], list[RunResult]] = {}
    for r in results:
        groups.setdefault((r.speed, r.algorithm), []).append(r)
    out = []
    for (speed, algo), rs in sorted(groups.items()):
        pdrs = [pdr(r) for r in rs]
        if len(rs) >= 2:
            stat = mean_ci95(pdrs)
            mean, half = stat.mean, stat.ci95_halfwidth
        else:
            mean, half = pdrs[0], None
        mean_oh = sum(overhead(r, unit) for r in rs) / len(rs)
        out.append(Aggregate(speed, algo, mean, half, mean_oh, len(rs)))
    return out


def _num(x: float) -> str:
    return f"{x:g}" if float(x).is_integer() else repr(float(x))


def csv_rows(results: Sequence[RunResult], unit: str = "transmissions") -> list[dict[str, str]]:
    rows = []
    for r in results:
        rows.append({
            "kind": "raw", "speed_kmh": _num(r.speed), "algorithm": r.algorithm,
            "seed": str(r.run_seed), "data_sent": str(r.data_sent),
            "data_received": str(r.data_received), "pdr": repr(pdr(r)),
            "control_tx": str(overhead(r, unit)),
            "mean_pdr": "", "ci95": "", "mean_control_tx": "",
        })
    for a in aggregate(results, unit):
        rows.append({
            "kind": "aggregate", "speed_kmh": _num(a.speed), "algorithm": a.algorithm,
            "seed": "", "data_sent": "", "data_received": "", "pdr": "", "control_tx": "",
            "mean_pdr": repr(a.mean_pdr), "ci95": "" if a.ci95 is None else repr(a.ci95), "mean_control_tx": repr(a.mean_control_tx),
        })
    return rows


def write_csv(results: Sequence[RunResult], fh, unit: str = "transmissions") -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(csv_rows(results, unit))


def to_csv(results: Sequence[RunResult], unit: str = "transmissions") -> str:
    buf = io.StringIO()
    write_csv(results, buf, unit)
    return buf.getvalue()


def read_csv(fh) -> list[dict]:
    """Parse a results CSV back into typed rows (empty cells become ``None``)."""
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
    ints = {"seed", "data_sent", "data_received", "control_tx"}
    floats = {"speed_kmh", "pdr", "mean_pdr", "ci95", "mean_control_tx"}
    rows = []
    for raw in reader:
        row: dict = {}
        for k, v in raw.items():
            if v == "":
                row[k] = None
            elif k in ints:
                row[k] = int(v)
            elif k in floats:
                row[k] = float(v)
            else:
                row[k] = v
        rows.append(row)
    return rows


def plot_series(rows: Iterable[dict], value: str = "mean_pdr") -> dict[str, list[tuple[float, float, float]]]:
    """Per-algorithm ``(speed, mean, ci95)`` series from aggregate rows."""
    series: dict[str, list[tuple[float, float, float]]] = {}
    for r in rows:
        if r["kind"] != "aggregate":
            continue
        ci = (r["ci95"] or 0.0) if value == "mean_pdr" else 0.0
        series.setdefault(r["algorithm"], []).append((r["speed_kmh"], r[value], ci))
    for pts in series.values():
        pts.sort()
    return series


def write_plot_data(rows: Iterable[dict], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("algorithm", "speed_kmh", "mean_pdr", "ci95", "mean_control_tx"))
    rows = list(rows)
    pdr_s = plot_series(rows, "mean_pdr")
    oh_s = plot_series(rows, "mean_control_tx")
    for algo in sorted(pdr_s):
        for (speed, m, ci), (_, oh, _) in zip(pdr_s[algo], oh_s[algo]):
            w.writerow((algo, _num(speed), repr(m), repr(ci), repr(oh)))
