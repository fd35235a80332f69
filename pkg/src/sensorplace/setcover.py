"""Quadratic set-coverage model and its QUBO / Ising forms.

Approximating the union coverage by singles minus pairwise overlaps
gives the quadratic lower bound

    approx = 1.5 * singles . x - 0.5 * x^T overlaps x,          x in {0,1}^N

where the 1/2 accounts for the symmetric overlap matrix and the 3/2 for
its diagonal (which equals the singles).  The sensor count is free: it
falls out of the optimization instead of being fixed up front.

`build_iqp` folds the diagonal into the linear term, so the stored
quadratic matrix has zero diagonal and

    E(x) = linear . x + x^T quadratic x + offset
         = -coverage_weight * approx + cost_weight * cost(x).

Spin models use the x = (1 + z) / 2 convention: bit 1 maps to spin +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .coverage import CoverageData
from .errors import BudgetExceededError
from .geometry import config_costs

DEFAULT_QUBO_ENUMERATION_BITS = 24
_ENUM_BLOCK = 1 << 16


@dataclass(frozen=True)
class QuadraticModel:
    """Binary quadratic minimization model over {0,1}^N.

    ``quadratic`` is symmetric with zero diagonal; linear effects live
    entirely in ``linear``.
    """

    linear: NDArray[np.float64]
    quadratic: NDArray[np.float64]
    offset: float
    variable_names: tuple[str, ...]
    sense: str = "min"

    def __post_init__(self):
        n = self.linear.shape[0]
        if self.quadratic.shape != (n, n):
            raise ValueError("quadratic matrix shape does not match linear vector")
        if np.any(self.quadratic.diagonal() != 0.0):
            raise ValueError("quadratic matrix must have a zero diagonal")
        if not np.array_equal(self.quadratic, self.quadratic.T):
            raise ValueError("quadratic matrix must be symmetric")
        if len(self.variable_names) != n:
            raise ValueError("one variable name per binary variable required")

    @property
    def num_variables(self) -> int:
        return self.linear.shape[0]

    def energy(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.linear + x @ self.quadratic @ x + self.offset)

    def energies(self, assignments: NDArray) -> NDArray[np.float64]:
        """Vectorized energies for an (m, N) batch of binary assignments."""
        a = np.asarray(assignments, dtype=float)
        return a @ self.linear + np.einsum("bi,ij,bj->b", a, self.quadratic, a) + self.offset


@dataclass(frozen=True)
class IsingModel:
    """Spin model E(z) = h . z + sum_{i<j} J_ij z_i z_j + offset, z in {-1,+1}^N."""

    h: NDArray[np.float64]
    couplings: dict[tuple[int, int], float]
    offset: float

    def __post_init__(self):
        for (i, j) in self.couplings:
            if not 0 <= i < j < self.h.shape[0]:
                raise ValueError(f"coupling key {(i, j)} is not strictly upper-triangular")

    @property
    def num_spins(self) -> int:
        return self.h.shape[0]

    def coupling_matrix(self) -> NDArray[np.float64]:
        """Dense symmetric coupling matrix with zero diagonal."""
        n = self.num_spins
        m = np.zeros((n, n))
        for (i, j), v in self.couplings.items():
            m[i, j] = v
            m[j, i] = v
        return m

    def energy(self, spins) -> float:
        z = np.asarray(spins, dtype=float)
        e = float(z @ self.h) + self.offset
        for (i, j), v in self.couplings.items():
            e += v * z[i] * z[j]
        return e

    def energy_of_bits(self, bits) -> float:
        """Energy of a {0,1} assignment under the x = (1+z)/2 convention."""
        return self.energy(2.0 * np.asarray(bits, dtype=float) - 1.0)


def approx_coverage(x, data: CoverageData) -> float:
    """Quadratic singles-minus-overlaps coverage of a binary selection vector.

    A lower bound on the exact union coverage, tight for selections of at
    most two sensors; for a single sensor the 3/2 and 1/2 factors cancel
    against the diagonal and the value reduces to that sensor's singles
    entry.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (data.num_configs,):
        raise ValueError(f"selection vector must have length {data.num_configs}")
    return float(1.5 * (data.singles @ x) - 0.5 * (x @ data.overlaps @ x))


def build_iqp(
    data: CoverageData,
    catalog,
    coverage_weight: float = 1.0,
    cost_weight: float = 1e-4,
    position_penalty: float | None = None,
) -> QuadraticModel:
    """Quadratic program for trading approximate coverage against cost.

    Position uniqueness is deliberately not encoded by default: on a
    reasonably sized grid every cell can physically hold a sensor and the
    slack variables needed for inequality rows would enlarge the model.
    Pass ``position_penalty`` to add a quadratic penalty on every pair of
    candidates sharing a mount position for experimentation.
    """
    costs = config_costs(data.configs, catalog)
    linear = -coverage_weight * data.singles + cost_weight * costs
    quadratic = 0.5 * coverage_weight * data.overlaps.copy()
    np.fill_diagonal(quadratic, 0.0)
    if position_penalty is not None:
        from .fixed_count import position_index_map

        groups, _ = position_index_map(data.configs)
        for members in groups.values():
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    i, j = members[a], members[b]
                    quadratic[i, j] += position_penalty / 2.0
                    quadratic[j, i] += position_penalty / 2.0
    return QuadraticModel(
        linear=linear,
        quadratic=quadratic,
        offset=0.0,
        variable_names=tuple(variable_name(i, cfg, catalog) for i, cfg in enumerate(data.configs)),
    )


def variable_name(index: int, cfg, catalog) -> str:
    """Deterministic LP-safe label for one placement candidate."""
    orient = f"{cfg.orientation:g}".replace("-", "m").replace(".", "p")
    return f"x{index}_{catalog[cfg.type_index].name}_{cfg.side.value}_o{orient}"


def to_ising(model: QuadraticModel) -> IsingModel:
    """Substitute x = (1 + z) / 2; energies agree on every assignment."""
    a = model.linear
    q = model.quadratic
    row_sums = q.sum(axis=1)
    h = a / 2.0 + row_sums / 2.0
    couplings: dict[tuple[int, int], float] = {}
    n = model.num_variables
    for i in range(n):
        for j in range(i + 1, n):
            if q[i, j] != 0.0:
                couplings[(i, j)] = q[i, j] / 2.0
    offset = model.offset + a.sum() / 2.0 + q.sum() / 4.0
    return IsingModel(h=h, couplings=couplings, offset=float(offset))


def to_qubo(model: IsingModel, variable_names: tuple[str, ...] | None = None) -> QuadraticModel:
    """Inverse substitution z = 2x - 1 back to binary variables."""
    n = model.num_spins
    m = model.coupling_matrix()
    quadratic = 2.0 * m
    linear = 2.0 * model.h - 2.0 * m.sum(axis=1)
    offset = model.offset - model.h.sum() + sum(model.couplings.values())
    names = variable_names or tuple(f"x{i}" for i in range(n))
    return QuadraticModel(linear=linear, quadratic=quadratic, offset=float(offset), variable_names=names)


def enumerate_bits(indices: NDArray[np.int64], n: int) -> NDArray[np.uint8]:
    """Bit matrix for integer assignment indices; variable 0 is the MSB,
    so ascending integers are ascending lexicographic bit tuples."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def solve_exhaustive_qubo(
    model: QuadraticModel,
    max_bits: int = DEFAULT_QUBO_ENUMERATION_BITS,
) -> tuple[NDArray[np.uint8], float]:
    """Global minimizer over all 2^N assignments (lexicographic tie-break)."""
    n = model.num_variables
    if n > max_bits:
        raise BudgetExceededError(2**n, 2**max_bits)
    best_energy = None
    best_bits = None
    total = 1 << n
    for start in range(0, total, _ENUM_BLOCK):
        idx = np.arange(start, min(start + _ENUM_BLOCK, total), dtype=np.int64)
        bits = enumerate_bits(idx, n)
        energies = model.energies(bits)
        k = int(np.argmin(energies))
        if best_energy is None or energies[k] < best_energy:
            best_energy = float(energies[k])
            best_bits = bits[k].copy()
    return best_bits, best_energy
