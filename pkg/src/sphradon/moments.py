"""Sampled moment data on a detector grid.

A MomentGrid holds the two measured functions Mf(p,q,u) and a01(p,q,u) on a
uniform (p,q) lattice times a strictly increasing set of radii.  It is the
discrete form of the inverse problem's data: everything the reconstructor
needs in grid mode lives here, and nothing else does.

Center-Laplacians are taken by iterating the 5-point stencil, which costs i
cells of margin per application and is exact on fields quadratic in (p,q).
The file format is a CSV with a comment sidecar, lossless at 17 significant
digits.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField3D
from .forward import SphereCenter, first_cosine_coefficient, spherical_mean
from .quadrature import SphereRule

__all__ = [
    "MomentGrid",
    "sample_moments",
    "laplacian_power",
    "radial_integral",
    "write_moment_csv",
    "read_moment_csv",
]

Array = np.ndarray


@dataclass(frozen=True)
class MomentGrid:
    """Moment samples over origin + h*(0..n_p-1) x (0..n_q-1) x radial_nodes.

    Value arrays are indexed (ip, iq, iu) and frozen after construction.
    """

    origin: tuple[float, float]
    h: float
    n_p: int
    n_q: int
    radial_nodes: Array
    mf_values: Array
    a01_values: Array

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid spacing h must be positive")
        if self.n_p < 1 or self.n_q < 1:
            raise ValueError("grid must have at least one node per axis")
        nodes = np.asarray(self.radial_nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size == 0:
            raise ValueError("radial_nodes must be a nonempty 1-D array")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("radial_nodes must be positive and strictly increasing")
        shape = (self.n_p, self.n_q, nodes.size)
        mf = np.asarray(self.mf_values, dtype=float)
        a01 = np.asarray(self.a01_values, dtype=float)
        if mf.shape != shape or a01.shape != shape:
            raise ValueError(f"value arrays must have shape {shape}")
        for arr in (nodes, mf, a01):
            arr.setflags(write=False)
        object.__setattr__(self, "radial_nodes", nodes)
        object.__setattr__(self, "mf_values", mf)
        object.__setattr__(self, "a01_values", a01)

    # node coordinates
    def p_node(self, ip: int) -> float:
        return self.origin[0] + ip * self.h

    def q_node(self, iq: int) -> float:
        return self.origin[1] + iq * self.h


def sample_moments(
    field: ScalarField3D,
    origin: tuple[float, float],
    h: float,
    n_p: int,
    n_q: int,
    radial_nodes,
    analytic: bool = True,
    rule: SphereRule | None = None,
) -> MomentGrid:
    """Fill a MomentGrid from a phantom.

    With analytic=True (and the field providing moment callbacks) samples are
    exact up to the callbacks' own accuracy; otherwise both moments come from
    sphere quadrature at every node.
    """
    nodes = np.asarray(radial_nodes, dtype=float)
    mf = np.empty((n_p, n_q, nodes.size))
    a01 = np.empty_like(mf)
    use_analytic = analytic and field.analytic_moments is not None
    for ip in range(n_p):
        p = origin[0] + ip * h
        for iq in range(n_q):
            q = origin[1] + iq * h
            for iu, u in enumerate(nodes):
                if use_analytic:
                    m, a = field.analytic_moments(p, q, float(u))
                else:
                    c = SphereCenter(p, q, float(u))
                    m = spherical_mean(field, c, rule)
                    a = first_cosine_coefficient(field, c, rule)
                mf[ip, iq, iu] = m
                a01[ip, iq, iu] = a
    return MomentGrid(tuple(origin), h, n_p, n_q, nodes, mf, a01)


def laplacian_power(grid: MomentGrid, field: str, i: int, at: tuple[int, int, int]) -> float:
    """i-fold 5-point Laplacian of one stored moment function at a grid node.

    The stencil needs i cells of margin around (ip, iq); radii are untouched.
    """
    if field == "Mf":
        values = grid.mf_values
    elif field == "a01":
        values = grid.a01_values
    else:
        raise ValueError(f"field must be 'Mf' or 'a01', got {field!r}")
    if i < 0:
        raise ValueError("Laplacian power must be >= 0")
    ip, iq, iu = at
    if not (0 <= iu < grid.radial_nodes.size):
        raise ValueError(f"radial index {iu} out of range")
    if not (0 <= ip < grid.n_p and 0 <= iq < grid.n_q):
        raise ValueError(f"grid index ({ip}, {iq}) out of range")
    if i == 0:
        return float(values[ip, iq, iu])
    if ip - i < 0 or ip + i >= grid.n_p or iq - i < 0 or iq + i >= grid.n_q:
        raise ValueError(
            f"insufficient margin: Laplacian power {i} at ({ip}, {iq}) needs "
            f"{i} cells on each side of a {grid.n_p}x{grid.n_q} grid"
        )
    block = np.array(values[ip - i : ip + i + 1, iq - i : iq + i + 1, iu])
    h2 = grid.h * grid.h
    for _ in range(i):
        block = (
            block[2:, 1:-1] + block[:-2, 1:-1] + block[1:-1, 2:] + block[1:-1, :-2]
            - 4.0 * block[1:-1, 1:-1]
        ) / h2
    return float(block[0, 0])


def radial_integral(values, weights) -> float:
    """Weighted sum implementing the radial integral over (0, |z|]."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.shape != w.shape:
        raise ValueError(f"node/weight length mismatch: {v.shape} vs {w.shape}")
    return float(np.dot(v, w))


# ----- file format -----
#
# # h=... Np=... Nq=... u0=... du=... Nu=...
# p,q,u,Mf,a01
# <rows, p outer, q middle, u inner>
#
# The sidecar pins the uniform radial ladder; only uniform ladders are
# representable in a file.  Node coordinates ride along in every row, so the
# origin needs no extra field.


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_moment_csv(grid: MomentGrid, path: str) -> None:
    nodes = grid.radial_nodes
    if nodes.size > 1:
        du = nodes[1] - nodes[0]
        if not np.allclose(np.diff(nodes), du, rtol=1e-12, atol=1e-15):
            raise ValueError("only uniform radial ladders are representable in CSV")
    else:
        du = nodes[0]
    lines = [
        f"# h={_fmt(grid.h)} Np={grid.n_p} Nq={grid.n_q} "
        f"u0={_fmt(nodes[0])} du={_fmt(du)} Nu={nodes.size}",
        "p,q,u,Mf,a01",
    ]
    for ip in range(grid.n_p):
        p = grid.p_node(ip)
        for iq in range(grid.n_q):
            q = grid.q_node(iq)
            for iu, u in enumerate(nodes):
                lines.append(
                    f"{_fmt(p)},{_fmt(q)},{_fmt(u)},"
                    f"{_fmt(grid.mf_values[ip, iq, iu])},{_fmt(grid.a01_values[ip, iq, iu])}"
                )
    _atomic_write(path, "\n".join(lines) + "\n")


def read_moment_csv(path: str) -> MomentGrid:
    meta: dict[str, str] = {}
    rows: list[tuple[float, ...]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            if line.startswith("p,"):
                continue
            rows.append(tuple(float(x) for x in line.split(",")))
    try:
        h = float(meta["h"])
        n_p, n_q, n_u = int(meta["Np"]), int(meta["Nq"]), int(meta["Nu"])
        u0, du = float(meta["u0"]), float(meta["du"])
    except KeyError as exc:
        raise ValueError(f"moment CSV missing sidecar field {exc}") from None
    if len(rows) != n_p * n_q * n_u:
        raise ValueError(
            f"moment CSV row count {len(rows)} != Np*Nq*Nu = {n_p * n_q * n_u}"
        )
    data = np.asarray(rows)
    origin = (data[0, 0], data[0, 1])
    nodes = u0 + du * np.arange(n_u)
    mf = data[:, 3].reshape(n_p, n_q, n_u)
    a01 = data[:, 4].reshape(n_p, n_q, n_u)
    # the stored u column must agree with the sidecar ladder
    if not np.allclose(data[:n_u, 2], nodes, rtol=0, atol=1e-12 * max(1.0, abs(nodes[-1]))):
        raise ValueError("radial column disagrees with the sidecar ladder")
    return MomentGrid(origin, h, n_p, n_q, nodes, mf, a01)
