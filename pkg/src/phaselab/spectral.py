"""Band-limited fields on symmetric frequency lattices.

A field lives purely in frequency space: a rectangular lattice of modes
xi_j with spacing dxi and one complex coefficient per mode.  Integrals
become finite quadrature sums with weight dxi**n, so norms and synthesis
are exact up to floating point.  Every reduction runs in the fixed
lexicographic mode order through exactly-rounded summation (math.fsum),
which keeps results bit-identical across runs and thread counts.

All types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import GridMismatchError, ParameterError

__all__ = [
    "FrequencyGrid",
    "SpectralField",
    "csum",
    "default_grid",
    "make_grid",
    "random_field",
    "read_field_csv",
    "sobolev_norm",
    "synthesize",
    "write_field_csv",
]

#: Default lattice used by the experiments: resolves |xi| up to 64 at 1/8 spacing.
DEFAULT_GRID_PARAMS = (1, 64.0, 0.125)


def csum(values: np.ndarray) -> complex:
    """Exactly-rounded complex sum, taken in array order."""
    values = np.asarray(values)
    return complex(math.fsum(values.real), math.fsum(values.imag))


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Symmetric rectangular lattice of frequency modes in dimension n."""

    n: int
    xi_max: float
    dxi: float
    modes: np.ndarray  # (num_modes, n), lexicographically ordered

    @property
    def weight(self) -> float:
        """Quadrature weight per mode, dxi**n."""
        return self.dxi**self.n

    @property
    def num_modes(self) -> int:
        return self.modes.shape[0]

    @cached_property
    def radii(self) -> np.ndarray:
        """|xi_j| for every mode, in mode order."""
        r = np.sqrt(np.einsum("ij,ij->i", self.modes, self.modes))
        r.setflags(write=False)
        return r

    @property
    def extent(self) -> float:
        """Largest axis coordinate present on the lattice."""
        return float(np.max(np.abs(self.modes))) if self.num_modes else 0.0


def make_grid(n: int, xi_max: float, dxi: float) -> FrequencyGrid:
    """Build the lattice {-M*dxi, ..., 0, ..., M*dxi}**n with M = floor(xi_max/dxi).

    The lattice is symmetric about the origin, duplicate-free, and ordered
    lexicographically.
    """
    if n not in (1, 2, 3):
        raise ParameterError(f"dimension must be 1, 2 or 3, got {n}")
    if not (math.isfinite(xi_max) and xi_max > 0):
        raise ParameterError(f"xi_max must be positive, got {xi_max}")
    if not (math.isfinite(dxi) and 0 < dxi <= xi_max):
        raise ParameterError(f"dxi must lie in (0, xi_max], got {dxi}")
    m = int(math.floor(xi_max / dxi + 1e-9))
    axis = dxi * np.arange(-m, m + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    modes = np.stack([g.ravel() for g in mesh], axis=-1)
    modes.setflags(write=False)
    return FrequencyGrid(n=int(n), xi_max=float(xi_max), dxi=float(dxi), modes=modes)


def default_grid() -> FrequencyGrid:
    return make_grid(*DEFAULT_GRID_PARAMS)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """A band-limited function, stored as one complex coefficient per mode."""

    grid: FrequencyGrid
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if coeffs.shape != (self.grid.num_modes,):
            raise ParameterError(
                f"coefficient count {coeffs.shape} does not match "
                f"{self.grid.num_modes} modes"
            )
        if not np.all(np.isfinite(coeffs.real)) or not np.all(np.isfinite(coeffs.imag)):
            raise ParameterError("coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)


def sobolev_norm(field: SpectralField, s: float = 0.0) -> float:
    """Weighted spectral norm (sum_j (1+|xi_j|^2)^s |f_j|^2 dxi^n)**(1/2).

    s = 0 reduces to the discrete Plancherel (L2) norm.  The sum runs in
    the fixed mode order with exactly-rounded accumulation.
    """
    c = field.coefficients
    w = (1.0 + field.grid.radii**2) ** s
    total = math.fsum((c.real * c.real + c.imag * c.imag) * w)
    return math.sqrt(total * field.grid.weight)


def synthesize(field: SpectralField, x) -> complex:
    """Evaluate (2*pi)**(-n) * sum_j e^{i x.xi_j} f_j dxi^n at a physical point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (field.grid.n,):
        raise ParameterError(
            f"point has shape {x.shape}, expected ({field.grid.n},)"
        )
    z = field.coefficients * np.exp(1j * (field.grid.modes @ x))
    return csum(z) * (field.grid.weight / (2.0 * math.pi) ** field.grid.n)


def random_field(grid: FrequencyGrid, rng) -> SpectralField:
    """Field with i.i.d. standard complex Gaussian coefficients."""
    if not hasattr(rng, "standard_normal"):
        rng = np.random.default_rng(rng)
    coeffs = rng.standard_normal(grid.num_modes) + 1j * rng.standard_normal(grid.num_modes)
    return SpectralField(grid, coeffs)


def write_field_csv(field: SpectralField, path) -> None:
    """Write the field as CSV (xi_1,...,xi_n,re,im) plus a JSON grid sidecar."""
    path = Path(path)
    grid = field.grid
    header = [f"xi_{i + 1}" for i in range(grid.n)] + ["re", "im"]
    lines = [",".join(header)]
    for mode, c in zip(grid.modes, field.coefficients):
        row = [repr(float(v)) for v in mode] + [repr(float(c.real)), repr(float(c.imag))]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    sidecar = {"n": grid.n, "xi_max": grid.xi_max, "dxi": grid.dxi}
    path.with_suffix(".json").write_text(json.dumps(sidecar) + "\n")


def read_field_csv(path) -> SpectralField:
    """Read a field written by write_field_csv, verifying the mode layout."""
    path = Path(path)
    sidecar_path = path.with_suffix(".json")
    if not sidecar_path.exists():
        raise ParameterError(f"missing grid sidecar {sidecar_path}")
    meta = json.loads(sidecar_path.read_text())
    grid = make_grid(int(meta["n"]), float(meta["xi_max"]), float(meta["dxi"]))
    lines = path.read_text().strip().splitlines()
    expected_header = ",".join([f"xi_{i + 1}" for i in range(grid.n)] + ["re", "im"])
    if not lines or lines[0] != expected_header:
        raise ParameterError(f"unexpected CSV header in {path}")
    rows = [line.split(",") for line in lines[1:]]
    if len(rows) != grid.num_modes:
        raise GridMismatchError(
            f"{path} has {len(rows)} rows but the sidecar grid has {grid.num_modes} modes"
        )
    data = np.array([[float(v) for v in row] for row in rows])
    if not np.array_equal(data[:, : grid.n], grid.modes):
        raise GridMismatchError(f"mode columns in {path} do not match the sidecar grid")
    coeffs = data[:, grid.n] + 1j * data[:, grid.n + 1]
    return SpectralField(grid, coeffs)
