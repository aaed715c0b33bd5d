"""Hole-array export for external full-wave solvers.

The exported layout is a triangular lattice with the row at ``y = 0``
removed, which forms the line-defect waveguide along ``x``. In a compound
export, ``half_1`` fills ``x < 0`` and ``half_2`` fills ``x > 0``.

Text format: UTF-8 with ``\\n`` line endings. ``#`` header lines come
first, then one hole per line as ``x_nm y_nm r_nm`` with six significant
digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from pcwdesign.errors import DomainError, GeometryError
from pcwdesign.heuristic import LatticeSpec

__all__ = ["Hole", "GeometryExport", "export_uniform", "export_compound", "parse_geometry"]


@dataclass(frozen=True)
class Hole:
    x: float
    y: float
    r: float


@dataclass
class GeometryExport:
    holes: list[Hole]
    h: float
    theta_gr: float
    kind: str
    halves: list[LatticeSpec] = field(default_factory=list)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return (
            min(p.x - p.r for p in self.holes),
            min(p.y - p.r for p in self.holes),
            max(p.x + p.r for p in self.holes),
            max(p.y + p.r for p in self.holes),
        )

    def check_overlap(self) -> None:
        """Raise :class:`GeometryError` if any two holes intersect."""
        pts = sorted(self.holes, key=lambda p: p.x)
        r_max = max(p.r for p in pts)
        for i, p in enumerate(pts):
            for q in pts[i + 1 :]:
                if q.x - p.x > p.r + r_max:
                    break
                if math.hypot(q.x - p.x, q.y - p.y) < p.r + q.r:
                    raise GeometryError(f"holes at ({p.x}, {p.y}) and ({q.x}, {q.y}) overlap")

    def to_text(self) -> str:
        g = lambda v: f"{v + 0.0:.6g}"
        lines = [
            "# pcwdesign hole-array export",
            f"# h_nm={g(self.h)}",
            f"# lattice=triangular theta_gr_deg={g(math.degrees(self.theta_gr))}",
            f"# kind={self.kind}",
        ]
        for k, spec in enumerate(self.halves, 1):
            label = "half" if self.kind == "uniform" else f"half_{k}"
            side = {"uniform": "all", "compound": "x<0" if k == 1 else "x>0"}[self.kind]
            lines.append(f"# {label} a_nm={g(spec.a)} r_nm={g(spec.r)} region={side}")
        lines.append("# bbox_nm=" + " ".join(g(v) for v in self.bbox))
        lines.append(f"# holes={len(self.holes)}")
        lines.append("# columns: x_nm y_nm r_nm")
        lines.extend(f"{g(p.x)} {g(p.y)} {g(p.r)}" for p in self.holes)
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_text().encode("utf-8"))


def _check_counts(rows: int, cols: int) -> None:
    if rows < 3 or rows % 2 == 0:
        raise DomainError("rows must be an odd integer >= 3 (the central row is removed)")
    if cols < 1:
        raise DomainError("cols must be >= 1")


def _row_offsets(rows: int):
    centre = rows // 2
    for j in range(rows):
        k = j - centre
        if k != 0:
            yield k, abs(k) % 2


def export_uniform(spec: LatticeSpec, rows: int, cols: int) -> GeometryExport:
    """``rows x cols`` lattice sites, centred on the origin, minus the central row."""
    _check_counts(rows, cols)
    a, t = spec.a, math.tan(spec.theta_gr)
    x0 = 0.5 * (cols - 1) * a
    holes = [
        Hole((i + 0.5 * shift) * a - x0, k * 0.5 * a * t, spec.r)
        for k, shift in _row_offsets(rows)
        for i in range(cols)
    ]
    geom = GeometryExport(holes, spec.h, spec.theta_gr, "uniform", [spec])
    geom.check_overlap()
    return geom


def export_compound(half_1: LatticeSpec, half_2: LatticeSpec, rows: int, cols: int) -> GeometryExport:
    """Two ``rows x cols`` half-lattices meeting at ``x = 0``."""
    _check_counts(rows, cols)
    if half_1.h != half_2.h or half_1.theta_gr != half_2.theta_gr:
        raise DomainError("compound halves must share membrane thickness and lattice angle")
    holes = []
    for sign, spec in ((-1.0, half_1), (1.0, half_2)):
        a, t = spec.a, math.tan(spec.theta_gr)
        for k, shift in _row_offsets(rows):
            for i in range(cols):
                holes.append(Hole(sign * (i + 0.5 + 0.5 * shift) * a, k * 0.5 * a * t, spec.r))
    geom = GeometryExport(holes, half_1.h, half_1.theta_gr, "compound", [half_1, half_2])
    geom.check_overlap()
    return geom


def parse_geometry(text: str) -> tuple[dict[str, str], list[Hole]]:
    """Read an export back into ``(header key/values, holes)``."""
    header: dict[str, str] = {}
    holes = []
    for line in text.splitlines():
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    key, val = tok.split("=", 1)
                    header.setdefault(key, val)
            continue
        if line.strip():
            x, y, r = (float(v) for v in line.split())
            holes.append(Hole(x, y, r))
    return header, holes
