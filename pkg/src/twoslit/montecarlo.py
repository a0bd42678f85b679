"""Quanton-by-quanton sampling of the two-slit experiment with a UQSD ancilla.

Every quanton carries a hidden path label drawn with probability 1/2 each.
The detector-ancilla measurement is simulated on ``d_path`` exactly as in
:func:`twoslit.detector.discriminate`, which fixes the ancilla outcome and
the verdict. The screen position is then drawn from the density of the
matching sub-ensemble: ``g^2(x)`` on the conclusive branch and
``g^2(x) (1 + cos(2 pi x / period))`` on the inconclusive one.

Random streams
--------------
Stream ``i`` of a run with seed ``s`` draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))``, i.e. the ``i``-th child that
``SeedSequence(s).spawn`` would produce. Stream ``i`` handles
``n // n_streams`` quantons, plus one for the first ``n % n_streams``
streams. Histograms are summed in stream order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analysis, detector
from .detector import AncillaOutcome, PathVerdict
from .optics import DEFAULT_GEOMETRY, SlitGeometry

MIN_BINS = 16
DEFAULT_BINS = 1500
HISTOGRAM_HEADER = ["bin_left_m", "bin_right_m", "count_a1", "count_a2", "count_all"]


@dataclass(frozen=True)
class RunConfig:
    c: float
    geometry: SlitGeometry = DEFAULT_GEOMETRY
    n_samples: int = 1_000_000
    seed: int = 0
    n_bins: int = DEFAULT_BINS
    x_max: Optional[float] = None
    n_streams: int = 1

    def __post_init__(self):
        if self.x_max is None:
            object.__setattr__(self, "x_max", self.geometry.default_window)
        errors = config_errors(self)
        if errors:
            raise ValueError("; ".join(errors))


def config_errors(cfg: RunConfig) -> list[str]:
    errors = []
    if not (0.0 <= cfg.c <= 1.0):
        errors.append(f"overlap must lie in [0, 1], got {cfg.c!r}")
    if cfg.n_samples < 0:
        errors.append(f"n_samples must be >= 0, got {cfg.n_samples}")
    if not (0 <= cfg.seed < 2**64):
        errors.append(f"seed must be a 64-bit unsigned integer, got {cfg.seed}")
    if cfg.n_bins < MIN_BINS:
        errors.append(f"n_bins must be >= {MIN_BINS}, got {cfg.n_bins}")
    if cfg.x_max < 5.0 * cfg.geometry.envelope_width * (1 - 1e-12):
        errors.append(f"window {cfg.x_max!r} m is narrower than 5 envelope widths")
    if cfg.n_streams < 1:
        errors.append(f"n_streams must be >= 1, got {cfg.n_streams}")
    return errors


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class QuantonRecord:
    ancilla: AncillaOutcome
    verdict: PathVerdict
    x: float
    true_path: int


def sample_fringe_positions(
    n: int, visibility: float, geom: SlitGeometry, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``n`` positions from ``g^2(x) (1 + V cos(2 pi x / period))`` by rejection.

    Proposals come from ``g^2`` and are accepted with probability
    ``(1 + V cos) / (1 + V)``, which never exceeds 1.
    """
    out = np.empty(n)
    filled = 0
    k = geom.wavenumber
    bound = 1.0 + visibility
    while filled < n:
        need = n - filled
        m = int(need * bound * 1.05) + 16
        x = rng.normal(0.0, geom.envelope_width, m)
        accept = rng.random(m) * bound < 1.0 + visibility * np.cos(k * x)
        got = x[accept][:need]
        out[filled : filled + got.size] = got
        filled += got.size
    return out


def sample_quantons(c: float, geom: SlitGeometry, rng: np.random.Generator, n: int) -> dict:
    """Vectorized :func:`sample_quanton`; returns arrays keyed by record field."""
    u = detector.build_uqsd(c)
    true_path = rng.integers(1, 3, n).astype(np.int8)
    verdict = detector.discriminate_batch(true_path, u, rng)
    inconclusive = verdict == PathVerdict.INCONCLUSIVE
    ancilla = np.where(inconclusive, AncillaOutcome.A2, AncillaOutcome.A1).astype(np.int8)
    x = np.empty(n)
    n_a2 = int(np.count_nonzero(inconclusive))
    x[~inconclusive] = rng.normal(0.0, geom.envelope_width, n - n_a2)
    x[inconclusive] = sample_fringe_positions(n_a2, 1.0, geom, rng)
    return {"ancilla": ancilla, "verdict": verdict, "x": x, "true_path": true_path}


def sample_quanton(c: float, geom: SlitGeometry, rng: np.random.Generator) -> QuantonRecord:
    r = sample_quantons(c, geom, rng, 1)
    return QuantonRecord(
        AncillaOutcome(int(r["ancilla"][0])),
        PathVerdict(int(r["verdict"][0])),
        float(r["x"][0]),
        int(r["true_path"][0]),
    )


@dataclass(frozen=True)
class SubEnsembleHistogram:
    tag: str
    bin_edges: np.ndarray
    counts: np.ndarray


def histograms_to_csv(hists: dict[str, SubEnsembleHistogram]) -> str:
    edges = hists["ALL"].bin_edges
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HISTOGRAM_HEADER)
    for i in range(edges.size - 1):
        writer.writerow(
            [
                repr(float(edges[i])),
                repr(float(edges[i + 1])),
                int(hists["A1"].counts[i]),
                int(hists["A2"].counts[i]),
                int(hists["ALL"].counts[i]),
            ]
        )
    return buf.getvalue()


@dataclass
class _StreamTally:
    counts_a1: np.ndarray
    counts_a2: np.ndarray
    n_a1: int = 0
    n_a2: int = 0
    rejected: int = 0
    wrong_verdicts: int = 0


@dataclass(frozen=True)
class ExperimentResult:
    config: RunConfig
    histograms: dict[str, SubEnsembleHistogram]
    n_a1: int
    n_a2: int
    n_rejected: int
    wrong_verdicts: int
    v_all: Optional[analysis.FringeEstimate]
    v_a1: Optional[analysis.FringeEstimate]
    v_a2: Optional[analysis.FringeEstimate]
    report: analysis.DualityReport = field(repr=False)

    @property
    def a2_fraction(self) -> float:
        total = self.n_a1 + self.n_a2
        return self.n_a2 / total if total else math.nan


def _run_stream(cfg: RunConfig, stream: int, n: int, edges: np.ndarray) -> _StreamTally:
    rng = stream_rng(cfg.seed, stream)
    r = sample_quantons(cfg.c, cfg.geometry, rng, n)
    x = r["x"]
    inside = np.abs(x) <= cfg.x_max
    is_a2 = r["ancilla"] == AncillaOutcome.A2
    conclusive = r["verdict"] != PathVerdict.INCONCLUSIVE
    return _StreamTally(
        counts_a1=np.histogram(x[inside & ~is_a2], bins=edges)[0],
        counts_a2=np.histogram(x[inside & is_a2], bins=edges)[0],
        n_a1=int(np.count_nonzero(~is_a2)),
        n_a2=int(np.count_nonzero(is_a2)),
        rejected=int(np.count_nonzero(~inside)),
        wrong_verdicts=int(np.count_nonzero(conclusive & (r["verdict"] != r["true_path"]))),
    )


def _estimate(hist: SubEnsembleHistogram, geom: SlitGeometry):
    if int(hist.counts.sum()) < analysis.MIN_PHASOR_SAMPLES:
        return None
    return analysis.visibility_phasor(hist, geom)


def run_experiment(cfg: RunConfig) -> ExperimentResult:
    """Sample ``cfg.n_samples`` quantons and bin them by ancilla outcome.

    Positions outside ``[-x_max, x_max]`` are counted in ``n_rejected`` and
    left out of every histogram. Output is a pure function of the config.
    """
    edges = np.linspace(-cfg.x_max, cfg.x_max, cfg.n_bins + 1)
    base, extra = divmod(cfg.n_samples, cfg.n_streams)
    sizes = [base + (1 if i < extra else 0) for i in range(cfg.n_streams)]

    def work(i):
        return _run_stream(cfg, i, sizes[i], edges)

    if cfg.n_streams == 1:
        tallies = [work(0)]
    else:
        with ThreadPoolExecutor(max_workers=min(cfg.n_streams, 8)) as pool:
            tallies = list(pool.map(work, range(cfg.n_streams)))

    counts_a1 = np.zeros(cfg.n_bins, dtype=np.int64)
    counts_a2 = np.zeros(cfg.n_bins, dtype=np.int64)
    for t in tallies:
        counts_a1 += t.counts_a1
        counts_a2 += t.counts_a2
    hists = {
        "A1": SubEnsembleHistogram("A1", edges, counts_a1),
        "A2": SubEnsembleHistogram("A2", edges, counts_a2),
        "ALL": SubEnsembleHistogram("ALL", edges, counts_a1 + counts_a2),
    }
    geom = cfg.geometry
    v_all = _estimate(hists["ALL"], geom)
    v_a1 = _estimate(hists["A1"], geom)
    v_a2 = _estimate(hists["A2"], geom)
    return ExperimentResult(
        config=cfg,
        histograms=hists,
        n_a1=sum(t.n_a1 for t in tallies),
        n_a2=sum(t.n_a2 for t in tallies),
        n_rejected=sum(t.rejected for t in tallies),
        wrong_verdicts=sum(t.wrong_verdicts for t in tallies),
        v_all=v_all,
        v_a1=v_a1,
        v_a2=v_a2,
        report=analysis.duality_report(cfg.c, v_all, v_a1, v_a2),
    )
