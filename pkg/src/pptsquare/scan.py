"""Grid scan over the two-parameter family and its (4, 2, 4) composite."""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .entanglement import pairing, ppt_test, realignment_test
from .families import agkl_matrix, as_fraction, build_composite
from .channel import ChoiMatrix
from .matrix import PSD_TOL, numerical_rank

CONSISTENT = "consistent_with_paper"
ANOMALY = "anomaly"
DETECTED = "entanglement_detected"
VERDICTS = (CONSISTENT, ANOMALY, DETECTED)

CSV_COLUMNS = (
    "a",
    "t",
    "in_regime",
    "rho_psd",
    "rho_min_eig",
    "ppt_42",
    "ppt_42_min_eig",
    "ppt_24",
    "ppt_24_min_eig",
    "composite_psd",
    "composite_min_eig",
    "composite_ppt",
    "composite_pt_min_eig",
    "composite_rank",
    "ccnr_value",
    "min_pairing",
    "min_pairing_label",
    "verdict",
)


@dataclass(frozen=True)
class ScanRecord:
    a: float
    t: float
    a_exact: str
    t_exact: str
    in_regime: bool
    rho_psd: bool = False
    rho_min_eig: float = float("nan")
    ppt_42: bool = False
    ppt_42_min_eig: float = float("nan")
    ppt_24: bool = False
    ppt_24_min_eig: float = float("nan")
    composite_psd: bool = False
    composite_min_eig: float = float("nan")
    composite_ppt: bool = False
    composite_pt_min_eig: float = float("nan")
    composite_rank: int = 0
    ccnr_value: float = float("nan")
    witness_pairings: tuple = ()
    verdict: str = ANOMALY
    diagnostics: tuple = ()

    def as_dict(self):
        d = asdict(self)
        d["witness_pairings"] = [list(p) for p in self.witness_pairings]
        d["diagnostics"] = list(self.diagnostics)
        return d

    def csv_row(self):
        pairs = self.witness_pairings
        low = min(pairs, key=lambda p: p[1]) if pairs else ("", float("nan"))
        row = {k: getattr(self, k) for k in CSV_COLUMNS if hasattr(self, k)}
        row["min_pairing"], row["min_pairing_label"] = low[1], low[0]
        return [row[k] for k in CSV_COLUMNS]


def _frac_str(x):
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def default_grid():
    """``a = k/18`` for ``k = 1..17`` and ``t = j a / 5`` for ``j = -4..4``."""
    grid = []
    for k in range(1, 18):
        a = Fraction(k, 18)
        for j in range(-4, 5):
            grid.append((a, a * Fraction(j, 5)))
    return grid


def load_grid(source):
    """Grid file: ``{"points": [[a, t], ...]}`` or
    ``{"a_values": [...], "t_over_a": [...]}``.  Values may be numbers or
    ``"p/q"`` strings."""
    d = json.loads(Path(source).read_text()) if not isinstance(source, dict) else source
    if "points" in d:
        return [(as_fraction(_num(a)), as_fraction(_num(t))) for a, t in d["points"]]
    if "a_values" in d and "t_over_a" in d:
        return [
            (as_fraction(_num(a)), as_fraction(_num(a)) * as_fraction(_num(r)))
            for a in d["a_values"]
            for r in d["t_over_a"]
        ]
    raise ValueError("grid file needs 'points' or 'a_values' + 't_over_a'")


def _num(x):
    return Fraction(x) if isinstance(x, str) else x


def _evaluate(a, t, tol, registry):
    a, t = as_fraction(a), as_fraction(t)
    base = dict(
        a=float(a),
        t=float(t),
        a_exact=_frac_str(a),
        t_exact=_frac_str(t),
        in_regime=bool(0 < a < 1 and abs(t) < a),
    )
    try:
        rho = agkl_matrix(a, t)
        v42 = ppt_test(rho, tol, 4, 2)
        v24 = ppt_test(rho, tol, 2, 4)
        comp = build_composite(a, t)
        choi = comp.choi.matrix
        vc = ppt_test(comp.choi, tol)
        rank = numerical_rank(choi)
        unit = ChoiMatrix(choi.to_float().scale(1.0 / choi.real_trace()), 4, 4)
        ccnr = realignment_test(unit, tol)
        pairs = tuple(
            (label, float(pairing(unit, w))) for label, w in registry.for_cut(4, 4)
        ) if registry is not None else ()
    except Exception as exc:  # recorded, never raised
        return ScanRecord(**base, diagnostics=(f"{type(exc).__name__}: {exc}",))
    fields = dict(
        rho_psd=v42.is_positive,
        rho_min_eig=v42.min_eig_state,
        ppt_42=v42.is_ppt,
        ppt_42_min_eig=v42.min_eig_pt,
        ppt_24=v24.is_ppt,
        ppt_24_min_eig=v24.min_eig_pt,
        composite_psd=vc.is_positive,
        composite_min_eig=vc.min_eig_state,
        composite_ppt=vc.is_ppt,
        composite_pt_min_eig=vc.min_eig_pt,
        composite_rank=rank,
        ccnr_value=ccnr.ccnr_value,
        witness_pairings=pairs,
    )
    diagnostics = []
    if base["in_regime"]:
        expected = ("rho_psd", "ppt_42", "ppt_24", "composite_psd", "composite_ppt")
        diagnostics = [f"{name} is false" for name in expected if not fields[name]]
        if rank != 16:
            diagnostics.append(f"composite_rank is {rank}, expected 16")
    fired = [label for label, v in pairs if v < -tol]
    if ccnr.detects:
        fired.append("realignment")
    if vc.is_ppt and vc.is_positive and fired:
        verdict = DETECTED
        diagnostics.append("screens fired: " + ", ".join(fired))
    elif diagnostics:
        verdict = ANOMALY
    else:
        verdict = CONSISTENT
    return ScanRecord(**base, **fields, verdict=verdict, diagnostics=tuple(diagnostics))


@dataclass(frozen=True)
class ScanSummary:
    total: int
    counts: dict
    detected_points: tuple = ()
    anomaly_points: tuple = ()

    @property
    def exit_code(self):
        if self.detected_points:
            return 3
        if self.anomaly_points:
            return 2
        return 0

    def as_dict(self):
        return {
            "total": self.total,
            "counts": dict(self.counts),
            "detected_points": [list(p) for p in self.detected_points],
            "anomaly_points": [list(p) for p in self.anomaly_points],
            "exit_code": self.exit_code,
        }


def summarize(records):
    counts = {v: 0 for v in VERDICTS}
    for r in records:
        counts[r.verdict] += 1
    return ScanSummary(
        len(records),
        counts,
        tuple((r.a_exact, r.t_exact) for r in records if r.verdict == DETECTED),
        tuple((r.a_exact, r.t_exact) for r in records if r.verdict == ANOMALY),
    )


def scan(grid=None, tol=PSD_TOL, registry=None, n_jobs=1):
    """Evaluate every grid point; returns ``(records, summary)``.

    Records are sorted by ``(a, t)``, so the output does not depend on
    ``n_jobs``.
    """
    grid = default_grid() if grid is None else list(grid)
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            records = list(pool.map(lambda p: _evaluate(p[0], p[1], tol, registry), grid))
    else:
        records = [_evaluate(a, t, tol, registry) for a, t in grid]
    records.sort(key=lambda r: (Fraction(r.a_exact), Fraction(r.t_exact)))
    return records, summarize(records)


def write_json(records, summary, target):
    payload = {"summary": summary.as_dict(), "records": [r.as_dict() for r in records]}
    Path(target).write_text(json.dumps(payload, indent=2) + "\n")


def write_csv(records, target):
    with open(target, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(r.csv_row())
