"""Instance parsing, seeded generation, batch running, and report emission.

Instance documents are JSON; every exact quantity is serialized as an integer
or a "p/q" string, never a float.  Floats appear only in explicitly
approximate diagnostics (timings, CSV convenience columns).
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cover import (
    CoverReport,
    ProjectionReport,
    cover,
    stage_chain,
    verify_cover,
    verify_projection,
)
from .enumeration import DEFAULT_BUDGET, Gap
from .errors import (
    BudgetError,
    GapCoverError,
    GenerationError,
    ParseError,
)
from .exactalg import Mat, det, rank
from .geomcore import ConvexBody, Ellipsoid
from .errors import DimensionError, RankError

EXIT_OK = 0
EXIT_CERT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

GENERATOR_KINDS = ("lattice-ball", "random-vertices", "random-ellipsoid")

_SCAN_GUARD = 200_000  # generator-side bound on the enumeration box


class SplitMix64:
    """SplitMix64 pseudo-random generator.

    State update s += 0x9E3779B97F4A7C15 (mod 2^64); output mixes the state
    with two xor-shift-multiply rounds (constants 0xBF58476D1CE4E5B9 and
    0x94D049BB133111EB) and a final 31-bit xor-shift.  Integers in a range
    are drawn by rejection sampling, so identical seeds give identical
    streams on every platform.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self.MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self.MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        n = hi - lo + 1
        limit = ((1 << 64) // n) * n
        while True:
            v = self.next_u64()
            if v < limit:
                return lo + (v % n)


@dataclass(frozen=True)
class InstanceSpec:
    dim: int
    body: ConvexBody
    eps: Fraction = Fraction(1, 100)
    phi: tuple[int, ...] | None = None
    budget: int = DEFAULT_BUDGET
    gap: Gap | None = None
    kind: str = ""
    seed: int | None = None

    def to_json_dict(self) -> dict:
        doc = {"dim": self.dim, "body": _body_to_json(self.body)}
        if self.eps != Fraction(1, 100):
            doc["eps"] = rat_to_json(self.eps)
        if self.phi is not None:
            doc["phi"] = list(self.phi)
        if self.budget != DEFAULT_BUDGET:
            doc["budget"] = self.budget
        if self.gap is not None:
            doc["gap"] = gap_to_json(self.gap)
        if self.kind:
            doc["kind"] = self.kind
        if self.seed is not None:
            doc["seed"] = self.seed
        return doc


@dataclass
class BatchReport:
    entries: list = field(default_factory=list)
    max_ratio: Fraction | None = None
    max_parallelotope_factor: Fraction | None = None
    max_box_factor: Fraction | None = None
    max_count_factor: Fraction | None = None
    failures: list = field(default_factory=list)
    budget_skips: list = field(default_factory=list)

    def exit_code(self, allow_skip: bool = False) -> int:
        if self.failures:
            return EXIT_CERT_FAILURE
        if self.budget_skips and not allow_skip:
            return EXIT_BUDGET
        return EXIT_OK


def rat_to_json(x: Fraction):
    x = Fraction(x)
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_rat(value, path: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError(path, "expected a rational (integer or 'p/q' string)")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(path, f"malformed rational {value!r}") from None
    raise ParseError(path, f"expected a rational, got {type(value).__name__}")


def _parse_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _parse_rat_matrix(value, path: str, dim: int) -> Mat:
    if not isinstance(value, list) or len(value) != dim:
        raise ParseError(path, f"expected {dim} rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{path}[{i}]", f"expected {dim} entries")
        rows.append([_parse_rat(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return Mat(rows)


def _body_to_json(body: ConvexBody) -> dict:
    if body.kind == "vertices":
        return {
            "type": "vertices",
            "points": [[rat_to_json(c) for c in p] for p in body.points],
        }
    if body.kind == "ellipsoid":
        return {
            "type": "ellipsoid",
            "form": [[rat_to_json(c) for c in row] for row in body.ellipsoid_rep.form.entries],
        }
    return {"type": "box", "halfwidths": [rat_to_json(h) for h in body.halfwidths]}


def _parse_body(doc, dim: int, path: str) -> ConvexBody:
    if not isinstance(doc, dict):
        raise ParseError(path, "body must be an object")
    btype = doc.get("type")
    if btype == "vertices":
        pts = doc.get("points")
        if not isinstance(pts, list) or not pts:
            raise ParseError(f"{path}.points", "expected a nonempty list of points")
        parsed = []
        for i, p in enumerate(pts):
            if not isinstance(p, list) or len(p) != dim:
                raise ParseError(f"{path}.points[{i}]", f"expected {dim} coordinates")
            parsed.append([_parse_rat(c, f"{path}.points[{i}][{j}]") for j, c in enumerate(p)])
        return ConvexBody.vertices(parsed)
    if btype == "ellipsoid":
        form = _parse_rat_matrix(doc.get("form"), f"{path}.form", dim)
        try:
            return ConvexBody.from_ellipsoid(Ellipsoid(form))
        except (DimensionError, RankError) as exc:
            raise ParseError(f"{path}.form", str(exc)) from None
    if btype == "box":
        hw = doc.get("halfwidths")
        if not isinstance(hw, list) or len(hw) != dim:
            raise ParseError(f"{path}.halfwidths", f"expected {dim} halfwidths")
        return ConvexBody.box([_parse_rat(h, f"{path}.halfwidths[{i}]") for i, h in enumerate(hw)])
    if btype == "ball":
        radius = _parse_rat(doc.get("radius"), f"{path}.radius")
        if radius <= 0:
            raise ParseError(f"{path}.radius", "radius must be positive")
        form = [[Fraction(int(i == j)) / (radius * radius) for j in range(dim)] for i in range(dim)]
        return ConvexBody.from_ellipsoid(Ellipsoid(Mat(form)))
    raise ParseError(f"{path}.type", f"unknown body type {btype!r}")


def _parse_gap(doc, dim: int, path: str) -> Gap:
    if not isinstance(doc, dict):
        raise ParseError(path, "gap must be an object")
    base = doc.get("base")
    if not isinstance(base, list) or len(base) != dim:
        raise ParseError(f"{path}.base", f"expected {dim} coordinates")
    diffs = doc.get("diffs")
    if not isinstance(diffs, list):
        raise ParseError(f"{path}.diffs", "expected a list of difference vectors")
    halfsides = doc.get("halfsides")
    if not isinstance(halfsides, list) or len(halfsides) != len(diffs):
        raise ParseError(f"{path}.halfsides", "expected one halfside per difference")
    parsed_diffs = []
    for i, v in enumerate(diffs):
        if not isinstance(v, list) or len(v) != dim:
            raise ParseError(f"{path}.diffs[{i}]", f"expected {dim} coordinates")
        parsed_diffs.append(tuple(_parse_int(c, f"{path}.diffs[{i}][{j}]") for j, c in enumerate(v)))
    return Gap(
        dim,
        tuple(_parse_int(c, f"{path}.base[{i}]") for i, c in enumerate(base)),
        tuple(parsed_diffs),
        tuple(_parse_int(n, f"{path}.halfsides[{i}]") for i, n in enumerate(halfsides)),
    )


_KNOWN_KEYS = {"dim", "body", "eps", "phi", "budget", "gap", "kind", "seed"}


def parse_instance(doc) -> InstanceSpec:
    """Validate one instance document (dict or JSON text)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError("", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("", "instance must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ParseError(sorted(unknown)[0], "unknown key")
    if "dim" not in doc:
        raise ParseError("dim", "missing")
    dim = _parse_int(doc["dim"], "dim")
    if dim < 1:
        raise ParseError("dim", "must be >= 1")
    if "body" not in doc:
        raise ParseError("body", "missing")
    body = _parse_body(doc["body"], dim, "body")

    eps = Fraction(1, 100)
    if "eps" in doc:
        eps = _parse_rat(doc["eps"], "eps")
        if not 0 < eps < 1:
            raise ParseError("eps", "must lie in (0, 1)")
    phi = None
    if "phi" in doc:
        raw = doc["phi"]
        if not isinstance(raw, list) or len(raw) != dim:
            raise ParseError("phi", f"expected {dim} integer coefficients")
        phi = tuple(_parse_int(c, f"phi[{i}]") for i, c in enumerate(raw))
    budget = DEFAULT_BUDGET
    if "budget" in doc:
        budget = _parse_int(doc["budget"], "budget")
        if budget < 1:
            raise ParseError("budget", "must be positive")
    gap = _parse_gap(doc["gap"], dim, "gap") if "gap" in doc else None
    kind = doc.get("kind", "")
    if not isinstance(kind, str):
        raise ParseError("kind", "must be a string")
    seed = None
    if "seed" in doc:
        seed = _parse_int(doc["seed"], "seed")
    return InstanceSpec(
        dim=dim, body=body, eps=eps, phi=phi, budget=budget, gap=gap, kind=kind, seed=seed
    )


def gen_random(
    kind: str,
    dim: int,
    seed: int,
    *,
    entry_bound: int = 3,
    radius: Fraction | int | str = 0,
    num_points: int = 0,
    coord_bound: int = 4,
    scale: int = 2,
    max_tries: int = 100,
    box_guard: int = _SCAN_GUARD,
) -> InstanceSpec:
    """Deterministic random instance (seed fully determines the output).

    lattice-ball: integer basis with entries in [-entry_bound, entry_bound];
    the intersection of a ball with that lattice, rewritten in lattice
    coordinates, i.e. an ellipsoid instance with form B B^T / radius^2.
    random-vertices: num_points integer points spanning the space.
    random-ellipsoid: form R^T R / (scale^2 ||R||_F^2), which contains the
    ball of radius `scale`.

    Draws whose enumeration box would be excessive are rejected and redrawn,
    deterministically.
    """
    if dim < 1:
        raise GenerationError("dim must be >= 1")
    if kind not in GENERATOR_KINDS:
        raise GenerationError(f"unknown generator kind {kind!r}")
    # stream separated by kind so different generators never share draws
    rng = SplitMix64((seed << 8) ^ GENERATOR_KINDS.index(kind))

    if kind == "lattice-ball":
        r = Fraction(radius) if radius else Fraction(4)
        for _ in range(max_tries):
            rows = [
                [rng.randint(-entry_bound, entry_bound) for _ in range(dim)]
                for _ in range(dim)
            ]
            m = Mat(rows)
            if det(m) == 0:
                continue
            form = (m @ m.transpose()).scale(1 / (r * r))
            body = ConvexBody.from_ellipsoid(Ellipsoid(form))
            if _scan_size(body) > box_guard:
                continue
            return InstanceSpec(dim=dim, body=body, kind=kind, seed=seed)
        raise GenerationError(f"no usable draw after {max_tries} tries")

    if kind == "random-vertices":
        n = num_points if num_points else dim + 2
        for _ in range(max_tries):
            pts = [
                [rng.randint(-coord_bound, coord_bound) for _ in range(dim)]
                for _ in range(n)
            ]
            if rank(Mat(pts)) < dim:
                continue
            body = ConvexBody.vertices(pts)
            if _scan_size(body) > box_guard:
                continue
            return InstanceSpec(dim=dim, body=body, kind=kind, seed=seed)
        raise GenerationError(f"no spanning draw after {max_tries} tries")

    # random-ellipsoid
    for _ in range(max_tries):
        rows = [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(dim)]
        m = Mat(rows)
        if det(m) == 0:
            continue
        fro_sq = sum(x * x for row in rows for x in row)
        form = (m.transpose() @ m).scale(Fraction(1, scale * scale * fro_sq))
        body = ConvexBody.from_ellipsoid(Ellipsoid(form))
        if _scan_size(body) > box_guard:
            continue
        return InstanceSpec(dim=dim, body=body, kind=kind, seed=seed)
    raise GenerationError(f"no usable draw after {max_tries} tries")


def _scan_size(body: ConvexBody) -> int:
    total = 1
    for b in body.int_box_bounds():
        total *= 2 * b + 1
    return total


def gap_to_json(gap: Gap) -> dict:
    return {
        "base": list(gap.base),
        "diffs": [list(v) for v in gap.diffs],
        "halfsides": list(gap.halfsides),
    }


def cover_report_to_json(report: CoverReport, include_timings: bool = False) -> dict:
    doc = {
        "dim": report.dim,
        "cardinality_C": report.cardinality_C,
        "cardinality_P": report.cardinality_P,
        "ratio": rat_to_json(report.ratio),
        "bound_value": rat_to_json(report.bound_value),
        "contained": report.contained,
        "witness": list(report.witness) if report.witness is not None else None,
    }
    s = report.stages
    if s is not None:
        doc["stages"] = {
            "eps": rat_to_json(s.eps) if s.eps is not None else None,
            "subspace_dim": s.subspace_dim,
            "mvee_used": s.mvee_used,
            "volume_parallelotope": rat_to_json(s.volume_parallelotope),
            "volume_parallelotope_reduced": rat_to_json(s.volume_parallelotope_reduced),
            "volume_box": rat_to_json(s.volume_box),
            "box_halfwidths": [rat_to_json(a) for a in s.box_halfwidths],
            "a_min": rat_to_json(s.a_min),
            "all_halfwidths_ge_1": s.all_halfwidths_ge_1,
            "reduction_ratio": rat_to_json(s.reduction_ratio),
        }
        doc["stage_chain"] = stage_chain(report)
    if include_timings:
        # wall-clock diagnostics; approximate by nature and excluded from
        # the canonical (byte-comparable) report
        doc["timings_ms_approx"] = {k: float(v) for k, v in report.timings_ms.items()}
    return doc


def projection_report_to_json(rep: ProjectionReport) -> dict:
    return {
        "functional": list(rep.functional),
        "image_count_C": rep.image_count_C,
        "image_count_P": rep.image_count_P,
        "max_fiber_C": rep.max_fiber_C,
        "max_fiber_P": rep.max_fiber_P,
        "cardinality_P": rep.cardinality_P,
        "sumset_cardinality": rep.sumset_cardinality,
        "doubling_ok": rep.doubling_ok,
        "fiber_monotone": rep.fiber_monotone,
        "chain_ok": rep.chain_ok,
        "corollary_ok": rep.corollary_ok,
        "degraded": rep.degraded,
    }


def to_canonical_json(doc) -> str:
    """Deterministic serialization: sorted keys, fixed separators, newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _stage_factors(report: CoverReport):
    s = report.stages
    if s is None or s.subspace_dim == 0:
        return None
    k = s.subspace_dim
    para = s.volume_parallelotope / (Fraction(k) ** k * report.cardinality_C)
    box = s.volume_box / (Fraction(k) ** (2 * k) * s.volume_parallelotope_reduced)
    count = Fraction(report.cardinality_P) / (Fraction(2) ** k * s.volume_box)
    return para, box, count


def run_batch(
    specs: Sequence[InstanceSpec],
    *,
    fail_fast: bool = False,
    allow_skip: bool = False,
    include_timings: bool = False,
) -> BatchReport:
    """Run cover + verify (+ projection when phi is given) on each instance.

    Instances carrying a ``gap`` are verification-only.  Per-instance errors
    are captured in the report; the batch aborts early only with fail_fast.
    Report order follows input order.
    """
    batch = BatchReport()
    for index, spec in enumerate(specs):
        entry = {"index": index, "instance": spec.to_json_dict()}
        t0 = time.perf_counter()
        try:
            if spec.gap is not None:
                report = verify_cover(spec.body, spec.gap, spec.budget)
                entry["mode"] = "verify"
                entry["verify"] = cover_report_to_json(report, include_timings)
                contained = report.contained
                ratio = report.ratio
                gap = spec.gap
            else:
                gap, report = cover(spec.body, spec.eps, spec.budget)
                vreport = verify_cover(spec.body, gap, spec.budget)
                entry["mode"] = "cover"
                entry["gap"] = gap_to_json(gap)
                entry["cover"] = cover_report_to_json(report, include_timings)
                entry["verify"] = cover_report_to_json(vreport, include_timings)
                contained = report.contained and vreport.contained
                if report.ratio != vreport.ratio:
                    contained = False
                ratio = report.ratio
                factors = _stage_factors(report)
                if factors is not None:
                    para, box, count = factors
                    if batch.max_parallelotope_factor is None or para > batch.max_parallelotope_factor:
                        batch.max_parallelotope_factor = para
                    if batch.max_box_factor is None or box > batch.max_box_factor:
                        batch.max_box_factor = box
                    if batch.max_count_factor is None or count > batch.max_count_factor:
                        batch.max_count_factor = count
            if spec.phi is not None:
                prep = verify_projection(spec.body, gap, spec.phi, spec.budget)
                entry["projection"] = projection_report_to_json(prep)
                if not (prep.chain_ok and prep.corollary_ok and prep.fiber_monotone):
                    contained = False
            entry["contained"] = contained
            if batch.max_ratio is None or ratio > batch.max_ratio:
                batch.max_ratio = ratio
            if not contained:
                batch.failures.append(
                    {"index": index, "witness": entry.get("verify", {}).get("witness")}
                )
        except BudgetError as exc:
            entry["error"] = {"type": "budget", "message": str(exc)}
            batch.budget_skips.append({"index": index, "message": str(exc)})
        except GapCoverError as exc:
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
            batch.failures.append({"index": index, "message": str(exc)})
        if include_timings:
            entry["runtime_ms_approx"] = (time.perf_counter() - t0) * 1000.0
        entry.setdefault("contained", entry.get("error") is None)
        batch.entries.append(entry)
        if fail_fast and (batch.failures or batch.budget_skips):
            break
    return batch


def batch_report_to_json(batch: BatchReport) -> dict:
    return {
        "instances": batch.entries,
        "aggregate": {
            "max_ratio": rat_to_json(batch.max_ratio) if batch.max_ratio is not None else None,
            "max_parallelotope_factor": (
                rat_to_json(batch.max_parallelotope_factor)
                if batch.max_parallelotope_factor is not None
                else None
            ),
            "max_box_factor": (
                rat_to_json(batch.max_box_factor) if batch.max_box_factor is not None else None
            ),
            "max_count_factor": (
                rat_to_json(batch.max_count_factor) if batch.max_count_factor is not None else None
            ),
        },
        "failures": batch.failures,
        "budget_skips": batch.budget_skips,
    }


CSV_COLUMNS = (
    "dim",
    "kind",
    "seed",
    "card_C",
    "card_P",
    "ratio_num",
    "ratio_den",
    "contained",
    "a_min",
    "reduction_ratio",
    "runtime_ms",
)


def batch_to_csv(batch: BatchReport) -> str:
    """Fixed-column CSV; a_min, reduction_ratio, and runtime_ms are
    approximate convenience floats (the JSON report holds the exact values)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for entry in batch.entries:
        inst = entry.get("instance", {})
        rep = entry.get("cover") or entry.get("verify") or {}
        ratio = Fraction(str(rep.get("ratio", "0"))) if rep else Fraction(0)
        stages = rep.get("stages") or {}
        a_min = stages.get("a_min")
        red = stages.get("reduction_ratio")
        writer.writerow(
            [
                inst.get("dim", ""),
                inst.get("kind", "") or inst.get("body", {}).get("type", ""),
                inst.get("seed", ""),
                rep.get("cardinality_C", ""),
                rep.get("cardinality_P", ""),
                ratio.numerator if rep else "",
                ratio.denominator if rep else "",
                entry.get("contained", ""),
                float(Fraction(str(a_min))) if a_min is not None else "",
                float(Fraction(str(red))) if red is not None else "",
                round(entry.get("runtime_ms_approx", 0.0), 3),
            ]
        )
    return buf.getvalue()
