"""File formats for sinograms, disk grids and coefficient tables.

CSV columns: sinograms use ``beta,alpha,re,im``; disk grids use
``rho,omega,re,im``; both iterate row-major (first coordinate outer).
Coefficient tables are JSON documents ``{"kappa": ..., "nmax": ...,
"entries": [{"n":..,"k":..,"re":..,"im":..}, ...]}``.  All floats are
written with 17 significant digits so values round-trip bit-exactly.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .basis import CoeffTable
from .geometry import CurvatureParam
from .xray import BoundaryGrid, DiskGrid


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_sinogram_csv(path, grid: BoundaryGrid) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "alpha", "re", "im"])
        for i, beta in enumerate(grid.beta):
            for j, alpha in enumerate(grid.alpha):
                v = grid.values[i, j]
                writer.writerow([fmt(beta), fmt(alpha), fmt(v.real), fmt(v.imag)])


def read_sinogram_csv(path, template: BoundaryGrid) -> BoundaryGrid:
    """Read a sinogram CSV onto a template grid.

    The node coordinates in the file must match the template's nodes
    (same order, 1e-12 tolerance); a mismatch is an error, not a resample.
    """
    beta, alpha, re, im = _read_columns(path, ["beta", "alpha", "re", "im"])
    nb, na = template.shape
    if len(re) != nb * na:
        raise ValueError(
            f"sinogram has {len(re)} rows, template expects {nb * na}"
        )
    bfile = np.asarray(beta).reshape(nb, na)
    afile = np.asarray(alpha).reshape(nb, na)
    if not (
        np.allclose(bfile, template.beta[:, None], atol=1e-12)
        and np.allclose(afile, template.alpha[None, :], atol=1e-12)
    ):
        raise ValueError("sinogram nodes do not match the configured grid")
    values = (np.asarray(re) + 1j * np.asarray(im)).reshape(nb, na)
    return template.with_values(values)


def write_diskgrid_csv(path, grid: DiskGrid) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rho", "omega", "re", "im"])
        for i, rho in enumerate(grid.rho):
            for j, omega in enumerate(grid.omega):
                v = grid.values[i, j]
                writer.writerow([fmt(rho), fmt(omega), fmt(v.real), fmt(v.imag)])


def read_diskgrid_csv(path, template: DiskGrid) -> DiskGrid:
    rho, omega, re, im = _read_columns(path, ["rho", "omega", "re", "im"])
    nr, no = template.shape
    if len(re) != nr * no:
        raise ValueError(f"disk grid has {len(re)} rows, template expects {nr * no}")
    rfile = np.asarray(rho).reshape(nr, no)
    ofile = np.asarray(omega).reshape(nr, no)
    if not (
        np.allclose(rfile, template.rho[:, None], atol=1e-12)
        and np.allclose(ofile, template.omega[None, :], atol=1e-12)
    ):
        raise ValueError("disk nodes do not match the configured grid")
    values = (np.asarray(re) + 1j * np.asarray(im)).reshape(nr, no)
    return template.with_values(values)


def _read_columns(path, names):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip().lower() for h in header] != names:
            raise ValueError(f"expected header {','.join(names)} in {path}, got {header}")
        cols = [[] for _ in names]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise ValueError(f"{path}:{lineno}: expected {len(names)} fields")
            try:
                for c, field in zip(cols, row):
                    c.append(float(field))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return cols


def write_coeff_json(path, table: CoeffTable, cp: CurvatureParam) -> None:
    doc = {
        "kappa": cp.kappa,
        "nmax": table.nmax,
        "entries": [
            {"n": n, "k": k, "re": c.real, "im": c.imag}
            for (n, k), c in table.items()
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_coeff_json(path) -> tuple[CoeffTable, float]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON (line {exc.lineno}: {exc.msg})") from None
    for key in ("kappa", "nmax", "entries"):
        if key not in doc:
            raise ValueError(f"coefficient file {path} lacks the {key!r} field")
    table = CoeffTable(nmax=int(doc["nmax"]))
    for pos, ent in enumerate(doc["entries"]):
        try:
            table[(int(ent["n"]), int(ent["k"]))] = float(ent["re"]) + 1j * float(ent["im"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: bad entry #{pos}: {exc}") from None
    return table, float(doc["kappa"])


def write_moments_csv(path, rows) -> None:
    """Moment table rows (n, k, abs_inner) in the documented CSV layout."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "k", "abs_inner"])
        for n, k, val in rows:
            writer.writerow([n, k, fmt(val)])


def write_spectrum_csv(path, nmax: int, cp: CurvatureParam) -> None:
    from .xray import singular_value

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "k", "sigma"])
        for n in range(nmax + 1):
            s = singular_value(n, cp)
            for k in range(n + 1):
                writer.writerow([n, k, fmt(s)])


def write_profiles_csv(path, rows) -> None:
    """Radial profile rows (n, k, rho, value) with the documented header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "k", "rho", "Re", "Im"])
        for n, k, rho, val in rows:
            writer.writerow([n, k, fmt(rho), fmt(val.real), fmt(val.imag)])


def write_fiber_profiles_csv(path, rows) -> None:
    """Fiber profile rows (n, k, alpha, value)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "k", "alpha", "Re", "Im"])
        for n, k, alpha, val in rows:
            writer.writerow([n, k, fmt(alpha), fmt(val.real), fmt(val.imag)])
