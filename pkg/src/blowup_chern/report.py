"""Invariant reports, seeded random sweeps and their serialisations."""

from __future__ import annotations

import csv
import io
import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .cech import r1_length
from .errors import BlowupChernError
from .laurent import BiLaurentPoly, format_poly, validate_bundle, window_monomials
from .sections import q_length

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator (Steele, Lea and Flood 2014), 64-bit state.

    Chosen because its output is fully specified by a few integer operations,
    so seeded sweeps reproduce bit for bit on any platform and Python version.
    """

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform on [0, 1) with 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection, free of modulo bias."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def sample_seed(seed: int, index: int) -> int:
    """Independent stream seed for sample ``index``: one SplitMix64 step from ``seed + index``."""
    return SplitMix64((seed + index * SplitMix64.GAMMA) & MASK64).next_u64()


@dataclass(frozen=True)
class SweepConfig:
    j: int
    samples: int
    coeff_min: int = -5
    coeff_max: int = 5
    seed: int = 0
    density: float = 0.5

    def __post_init__(self):
        if isinstance(self.j, bool) or self.j < 0:
            raise ValueError("j must be a non-negative integer")
        if self.samples < 0:
            raise ValueError("sample count must be non-negative")
        if self.coeff_min > self.coeff_max:
            raise ValueError("coefficient range is empty")
        if self.coeff_min == 0 == self.coeff_max:
            raise ValueError("coefficient range contains no non-zero integer")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")


def random_p(cfg: SweepConfig, index: int) -> BiLaurentPoly:
    rng = SplitMix64(sample_seed(cfg.seed, index))
    width = cfg.coeff_max - cfg.coeff_min + 1
    terms = {}
    for mono in window_monomials(cfg.j):
        if rng.random() < cfg.density:
            c = 0
            while c == 0:
                c = cfg.coeff_min + rng.below(width)
            terms[mono] = Fraction(c)
    return BiLaurentPoly(terms)


@dataclass(frozen=True)
class Certificates:
    cech_window: tuple[int, int]
    sections_N: int
    colength_m: int


@dataclass(frozen=True)
class InvariantReport:
    j: int
    p: str
    l_Q: int
    l_R1: int
    certificates: Certificates
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def gap(self) -> int:
        return self.l_Q + self.l_R1

    @property
    def bounds_ok(self) -> bool:
        return self.j <= self.gap <= self.j * self.j

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "j": self.j,
            "p": self.p,
            "lQ": self.l_Q,
            "lR1": self.l_R1,
            "gap": self.gap,
            "boundsOk": self.bounds_ok,
            "certificates": {
                "cechWindow": list(self.certificates.cech_window),
                "sectionsN": self.certificates.sections_N,
                "colengthM": self.certificates.colength_m,
            },
        }
        # wall-clock values would break byte-identical output, so they are opt-in
        out["timings"] = {k: round(v, 3) for k, v in sorted(self.timings.items())} if timings else {}
        return out


def compute(j: int, p: BiLaurentPoly | str) -> InvariantReport:
    """Run the full pipeline for the bundle ``(j, p)``."""
    bundle = validate_bundle(j, p)
    timings = {}
    t0 = time.perf_counter()
    r1 = r1_length(bundle)
    t1 = time.perf_counter()
    q = q_length(bundle)
    t2 = time.perf_counter()
    timings["cechMs"] = (t1 - t0) * 1000
    timings["sectionsAndColengthMs"] = (t2 - t1) * 1000
    return InvariantReport(
        j=bundle.j,
        p=format_poly(bundle.p),
        l_Q=q.value,
        l_R1=r1.value,
        certificates=Certificates(r1.window_certificate[0], q.sections_N, q.colength_m),
        timings=timings,
    )


def _compute_bundle(args: tuple[int, str]) -> InvariantReport:
    return compute(*args)


@dataclass
class SweepResult:
    config: SweepConfig
    reports: list[InvariantReport]
    error: BlowupChernError | None = None
    failed_index: int | None = None

    @property
    def complete(self) -> bool:
        return self.error is None and len(self.reports) == self.config.samples

    def summary(self) -> dict:
        gaps = [r.gap for r in self.reports]
        hist = Counter(gaps)
        return {
            "samples": len(self.reports),
            "gapHistogram": {str(g): hist[g] for g in sorted(hist)},
            "gapMin": min(gaps) if gaps else None,
            "gapMax": max(gaps) if gaps else None,
            "allBoundsOk": all(r.bounds_ok for r in self.reports),
        }


def _ordered_results(cfg: SweepConfig, jobs: int) -> Iterator[InvariantReport]:
    tasks = [(cfg.j, format_poly(random_p(cfg, i))) for i in range(cfg.samples)]
    if jobs <= 1:
        yield from map(_compute_bundle, tasks)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map yields in submission order, which keeps the output independent of scheduling
        yield from pool.map(_compute_bundle, tasks)


def sweep(
    cfg: SweepConfig,
    jobs: int = 1,
    on_report: Callable[[int, InvariantReport], None] | None = None,
) -> SweepResult:
    """Compute reports for ``cfg.samples`` random bundles in sample order.

    A failing sample stops the sweep; the reports finished before it are kept
    in the result together with the error.
    """
    result = SweepResult(cfg, [])
    try:
        for i, report in enumerate(_ordered_results(cfg, jobs)):
            result.reports.append(report)
            if on_report is not None:
                on_report(i, report)
    except BlowupChernError as exc:
        result.error = exc
        result.failed_index = len(result.reports)
    return result


CSV_COLUMNS = ("j", "p", "lQ", "lR1", "gap", "bounds_ok")


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow((r.j, r.p, r.l_Q, r.l_R1, r.gap, str(r.bounds_ok).lower()))
    return buf.getvalue()


def reports_to_table(reports) -> str:
    rows = [("j", "p", "lQ", "lR1", "gap", "bounds")]
    rows += [(str(r.j), r.p, str(r.l_Q), str(r.l_R1), str(r.gap), "ok" if r.bounds_ok else "VIOLATED") for r in reports]
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows) + "\n"


def sweep_to_json(result: SweepResult, timings: bool = False) -> str:
    cfg = result.config
    doc = {
        "config": {
            "j": cfg.j,
            "samples": cfg.samples,
            "coeffMin": cfg.coeff_min,
            "coeffMax": cfg.coeff_max,
            "seed": cfg.seed,
            "density": cfg.density,
            "rng": "splitmix64-v1",
        },
        "summary": result.summary(),
        "reports": [r.to_dict(timings) for r in result.reports],
    }
    if result.error is not None:
        doc["error"] = {"code": result.error.code, "sample": result.failed_index, "message": str(result.error)}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"

