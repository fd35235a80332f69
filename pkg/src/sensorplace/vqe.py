"""Dense statevector simulation and the two variational selection loops.

The ansatz is a stack of entangling layers: every layer applies one Y
rotation per qubit followed by a CNOT ring whose targets shift with the
layer, ``target = (control + layer + 1) mod n`` with controls applied in
ascending order.  A layer for which that formula maps a control onto
itself (``(layer + 1) % n == 0``) carries no entangler, as does a
single-qubit register.  An L-layer ansatz therefore exposes ``n * L``
rotation angles.

Two objective modes drive a restarted gradient-free optimizer (COBYLA by
default, downhill simplex as an option):

* fixed-count mode measures the circuit, keeps the most frequent
  feasible basis states as the sensor selection, and scores it with the
  exact-coverage objective;
* spin mode minimizes the exact expectation of a diagonal spin
  Hamiltonian computed from the statevector probabilities, then reports
  the best-energy basis state observed along the way.

Statevector indices read the qubits most-significant first: qubit 0 is
the leftmost bit of the basis index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy import optimize as sciopt

from .coverage import CoverageData
from .errors import InsufficientSupportError
from .fixed_count import (
    FixedCountProblem,
    SelectionResult,
    evaluate_selection,
    objective as selection_objective,
)
from .geometry import config_costs
from .setcover import IsingModel, enumerate_bits

MAX_QUBITS = 20


def _check_qubits(n: int) -> None:
    if n > MAX_QUBITS:
        raise ValueError(
            f"{n} qubits would need a dense vector of 2^{n} amplitudes; "
            f"this simulator is capped at {MAX_QUBITS}. Shrink the grid, type or "
            "orientation sets, or solve classically."
        )


# ---------------------------------------------------------------------------
# Statevector kernels


def zero_state(num_qubits: int) -> NDArray[np.complex128]:
    _check_qubits(num_qubits)
    state = np.zeros(2**num_qubits, dtype=complex)
    state[0] = 1.0
    return state


def uniform_state(num_qubits: int) -> NDArray[np.complex128]:
    """Equal, zero-phase superposition over all basis states."""
    _check_qubits(num_qubits)
    dim = 2**num_qubits
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)


def apply_ry(state: NDArray[np.complex128], qubit: int, angle: float) -> NDArray[np.complex128]:
    n = int(np.log2(state.shape[0]))
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    mat = np.array([[c, -s], [s, c]], dtype=complex)
    t = state.reshape([2] * n)
    t = np.tensordot(mat, t, axes=([1], [qubit]))
    return np.moveaxis(t, 0, qubit).reshape(-1)


def apply_cnot(state: NDArray[np.complex128], control: int, target: int) -> NDArray[np.complex128]:
    n = int(np.log2(state.shape[0]))
    t = state.reshape([2] * n).copy()
    sel: list = [slice(None)] * n
    sel[control] = 1
    sel0, sel1 = sel.copy(), sel.copy()
    sel0[target] = 0
    sel1[target] = 1
    t[tuple(sel0)], t[tuple(sel1)] = t[tuple(sel1)].copy(), t[tuple(sel0)].copy()
    return t.reshape(-1)


@dataclass(frozen=True)
class AnsatzSpec:
    """Entangling-layer ansatz: ``num_qubits * num_layers`` rotation angles."""

    num_qubits: int
    num_layers: int = 3
    angles: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.num_qubits < 1 or self.num_layers < 1:
            raise ValueError("need at least one qubit and one layer")
        angles = self.angles
        if angles is None:
            angles = np.zeros(self.num_qubits * self.num_layers)
        angles = np.asarray(angles, dtype=float).reshape(-1)
        if angles.shape != (self.num_qubits * self.num_layers,):
            raise ValueError(
                f"expected {self.num_qubits * self.num_layers} angles, got {angles.shape[0]}"
            )
        object.__setattr__(self, "angles", angles)


def entangler_pairs(num_qubits: int, layer: int) -> list[tuple[int, int]]:
    """(control, target) CNOT list of one layer, ascending control order."""
    if num_qubits == 1 or (layer + 1) % num_qubits == 0:
        return []
    return [(c, (c + layer + 1) % num_qubits) for c in range(num_qubits)]


def apply_ansatz(state: NDArray[np.complex128], ansatz: AnsatzSpec) -> NDArray[np.complex128]:
    """Apply the full ansatz; unitary, so the norm is preserved."""
    n = ansatz.num_qubits
    if state.shape != (2**n,):
        raise ValueError("state dimension does not match the ansatz qubit count")
    out = state
    for layer in range(ansatz.num_layers):
        for q in range(n):
            out = apply_ry(out, q, ansatz.angles[layer * n + q])
        for control, target in entangler_pairs(n, layer):
            out = apply_cnot(out, control, target)
    return out


def apply_ansatz_inverse(state: NDArray[np.complex128], ansatz: AnsatzSpec) -> NDArray[np.complex128]:
    """Exact inverse: reversed gate order with negated angles."""
    n = ansatz.num_qubits
    out = state
    for layer in range(ansatz.num_layers - 1, -1, -1):
        for control, target in reversed(entangler_pairs(n, layer)):
            out = apply_cnot(out, control, target)
        for q in range(n - 1, -1, -1):
            out = apply_ry(out, q, -ansatz.angles[layer * n + q])
    return out


def sample_histogram(
    state: NDArray[np.complex128],
    shots: int = 1000,
    seed: int | np.random.Generator | None = None,
) -> dict[int, int]:
    """Multinomial measurement histogram ``basis index -> count``.

    Deterministic for a fixed seed; zero-count states are omitted.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    return {int(i): int(c) for i, c in enumerate(counts) if c > 0}


# ---------------------------------------------------------------------------
# Basis-state encoding of placement candidates


def _bits_needed(count: int) -> int:
    return max(0, int(count - 1).bit_length())


@dataclass(frozen=True)
class EncodingMap:
    """Packs (row, column, type, orientation) fields into a basis index.

    Field widths are the ceil-log2 of each range; fields are laid out
    most-significant first in that order.  Basis states whose fields
    decode outside their valid ranges are infeasible and skipped during
    selection.
    """

    horizontal: int
    vertical: int
    num_types: int
    num_orientations: int

    @property
    def field_bits(self) -> tuple[int, int, int, int]:
        return (
            _bits_needed(self.horizontal),
            _bits_needed(self.vertical),
            _bits_needed(self.num_types),
            _bits_needed(self.num_orientations),
        )

    @property
    def num_qubits(self) -> int:
        return sum(self.field_bits)

    @property
    def num_configs(self) -> int:
        return self.horizontal * self.vertical * self.num_types * self.num_orientations

    def decode(self, basis: int) -> int | None:
        """Candidate index of a basis state, or None when out of range."""
        widths = self.field_bits
        limits = (self.horizontal, self.vertical, self.num_types, self.num_orientations)
        values = []
        shift = self.num_qubits
        for width, limit in zip(widths, limits):
            shift -= width
            v = (basis >> shift) & ((1 << width) - 1)
            if v >= limit:
                return None
            values.append(v)
        row, col, t, o = values
        position = row * self.vertical + col
        return (t * self.horizontal * self.vertical + position) * self.num_orientations + o

    def encode(self, config_index: int) -> int:
        o = config_index % self.num_orientations
        rest = config_index // self.num_orientations
        position = rest % (self.horizontal * self.vertical)
        t = rest // (self.horizontal * self.vertical)
        row, col = divmod(position, self.vertical)
        widths = self.field_bits
        basis = 0
        for width, value in zip(widths, (row, col, t, o)):
            basis = (basis << width) | value
        return basis


def select_feasible_topk(
    histogram: dict[int, int],
    encoding: EncodingMap,
    num_sensors: int,
    position_of: NDArray[np.int64],
) -> tuple[int, ...]:
    """Pick the ``num_sensors`` most frequent feasible candidates.

    Walks basis states by descending count (ties by ascending basis
    index), skipping out-of-range encodings and candidates whose mount
    position is already taken.  Raises
    :class:`InsufficientSupportError` when the histogram runs out first.
    """
    chosen: list[int] = []
    used_positions: set[int] = set()
    for basis, _count in sorted(histogram.items(), key=lambda kv: (-kv[1], kv[0])):
        idx = encoding.decode(basis)
        if idx is None:
            continue
        pos = int(position_of[idx])
        if pos in used_positions:
            continue
        chosen.append(idx)
        used_positions.add(pos)
        if len(chosen) == num_sensors:
            return tuple(chosen)
    raise InsufficientSupportError(
        f"histogram contains only {len(chosen)} feasible distinct-position candidates, "
        f"{num_sensors} required"
    )


# ---------------------------------------------------------------------------
# Gradient-free optimizer driver


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient-free optimizer settings for the variational loops.

    The run draws fresh random starting angles until ``max_evals``
    objective evaluations are spent, giving each local search at most
    ``max_evals_per_start`` of them.  ``method`` selects the local
    search routine:

    * ``"cobyla"`` (default): linear-approximation trust region with
      initial radius ``rho_begin`` and final accuracy ``f_tol``;
    * ``"nelder-mead"``: downhill simplex with the standard
      reflection/expansion/contraction/shrink coefficients (1, 2, 0.5,
      0.5) and absolute tolerance ``f_tol``.
    """

    max_evals: int = 500
    max_evals_per_start: int = 100
    method: str = "cobyla"
    f_tol: float = 1e-6
    x_tol: float = 1e-4
    rho_begin: float = 0.7

    def __post_init__(self):
        if self.max_evals < 0 or self.max_evals_per_start < 1:
            raise ValueError("evaluation budgets must be positive")
        if self.method not in ("cobyla", "nelder-mead"):
            raise ValueError(f"unknown optimizer method {self.method!r}")


def _minimize_multistart(fn, num_params: int, cfg: OptimizerConfig, rng: np.random.Generator) -> int:
    """Run restarted local searches until the evaluation budget is used.

    ``fn`` is responsible for tracking its own best-ever value; this
    driver only spends the budget.  Returns the number of evaluations.
    """
    evals = 0

    def counted(theta):
        nonlocal evals
        evals += 1
        return fn(theta)

    while evals < cfg.max_evals:
        x0 = rng.uniform(-np.pi, np.pi, num_params)
        start_budget = min(cfg.max_evals_per_start, cfg.max_evals - evals)
        if cfg.method == "cobyla":
            sciopt.minimize(
                counted,
                x0,
                method="COBYLA",
                options={"maxiter": start_budget, "rhobeg": cfg.rho_begin, "tol": cfg.f_tol},
            )
        else:
            sciopt.minimize(
                counted,
                x0,
                method="Nelder-Mead",
                options={
                    "maxfev": start_budget,
                    "fatol": cfg.f_tol,
                    "xatol": cfg.x_tol,
                    "disp": False,
                },
            )
    return evals


@dataclass
class VqeRun:
    """Outcome of one seeded variational run, with the evaluation trace."""

    result: SelectionResult
    trace: list[tuple[int, float, NDArray[np.float64]]]
    num_evals: int

    def write_trace_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            num_params = len(self.trace[0][2]) if self.trace else 0
            writer.writerow(["iteration", "objective"] + [f"theta{i}" for i in range(num_params)])
            for it, obj, theta in self.trace:
                writer.writerow([it, repr(float(obj))] + [repr(float(t)) for t in theta])


# ---------------------------------------------------------------------------
# Mode 1: histogram-based fixed-count selection


def vqe_fixed_count(
    problem: FixedCountProblem,
    encoding: EncodingMap,
    num_layers: int = 3,
    optimizer: OptimizerConfig = OptimizerConfig(),
    shots: int = 1000,
    seed: int = 0,
) -> VqeRun:
    """Variational fixed-count selection from measurement histograms.

    Each evaluation prepares the uniform superposition, applies the
    ansatz, samples ``shots`` measurements, keeps the most frequent
    feasible candidates and scores them with the exact-coverage
    objective.  A histogram without enough feasible support contributes
    a large penalty value instead of aborting.  The returned selection
    is the best ever encountered, evaluated even for a zero-evaluation
    budget (at the initial angles).
    """
    if encoding.num_configs != problem.data.num_configs:
        raise ValueError(
            f"encoding addresses {encoding.num_configs} candidates, "
            f"problem has {problem.data.num_configs}"
        )
    n = encoding.num_qubits
    _check_qubits(n)
    rng = np.random.default_rng(seed)
    base = uniform_state(n)
    penalty = problem.coverage_weight + problem.cost_weight * float(problem.costs.sum()) + 1.0

    best: dict = {"objective": None, "selection": None}
    trace: list[tuple[int, float, NDArray[np.float64]]] = []

    def score(theta) -> float:
        state = apply_ansatz(base, AnsatzSpec(n, num_layers, theta))
        histogram = sample_histogram(state, shots, rng)
        try:
            selection = select_feasible_topk(
                histogram, encoding, problem.num_sensors, problem.position_of
            )
        except InsufficientSupportError:
            trace.append((len(trace), penalty, np.array(theta, dtype=float)))
            return penalty
        value = selection_objective(selection, problem)
        trace.append((len(trace), value, np.array(theta, dtype=float)))
        if best["objective"] is None or value < best["objective"]:
            best["objective"] = value
            best["selection"] = selection
        return value

    score(rng.uniform(-np.pi, np.pi, n * num_layers))
    num_evals = 1 + _minimize_multistart(score, n * num_layers, optimizer, rng)

    if best["selection"] is None:
        raise InsufficientSupportError("no evaluation produced a feasible selection")
    result = evaluate_selection(
        best["selection"],
        problem.data,
        problem.costs,
        problem.coverage_weight,
        problem.cost_weight,
        solver_tag="vqe_fixed_count",
        seed=seed,
        required_count=problem.num_sensors,
    )
    return VqeRun(result=result, trace=trace, num_evals=num_evals)


# ---------------------------------------------------------------------------
# Mode 2: diagonal-Hamiltonian expectation over spin models


@dataclass(frozen=True)
class DiagonalVqeOutcome:
    best_state: int
    best_energy: float
    best_expectation: float
    trace: list[tuple[int, float, NDArray[np.float64]]]
    num_evals: int


def basis_energies(model: IsingModel) -> NDArray[np.float64]:
    """Model energy of every basis state, ordered by basis index."""
    n = model.num_spins
    _check_qubits(n)
    bits = enumerate_bits(np.arange(2**n, dtype=np.int64), n)
    z = bits.astype(float) * 2.0 - 1.0
    m = model.coupling_matrix()
    return z @ model.h + 0.5 * np.einsum("ri,ij,rj->r", z, m, z) + model.offset


def minimize_ising_expectation(
    model: IsingModel,
    num_layers: int = 3,
    optimizer: OptimizerConfig = OptimizerConfig(),
    seed: int = 0,
    shots: int | None = None,
    observation_floor: float = 0.01,
) -> DiagonalVqeOutcome:
    """Drive the ansatz to minimize the expected spin-model energy.

    The expectation is computed exactly from the statevector
    probabilities by default (deterministic); pass ``shots`` to estimate
    it from a sampled histogram instead.  The returned answer is the
    best-energy basis state observed across the run: in shots mode every
    sampled state counts as observed; in exact mode the states with
    probability at least ``observation_floor`` do (0.01 is the level a
    thousand-shot histogram reveals almost surely), falling back to the
    most probable state when none clears the floor.
    """
    n = model.num_spins
    _check_qubits(n)
    energies = basis_energies(model)
    rng = np.random.default_rng(seed)
    base = uniform_state(n)

    best: dict = {"energy": None, "state": None, "expectation": None}
    trace: list[tuple[int, float, NDArray[np.float64]]] = []

    def observe(states) -> None:
        states = np.asarray(states, dtype=int)
        k = int(states[np.argmin(energies[states])])
        if best["energy"] is None or energies[k] < best["energy"]:
            best["energy"] = float(energies[k])
            best["state"] = k

    def score(theta) -> float:
        state = apply_ansatz(base, AnsatzSpec(n, num_layers, theta))
        probs = np.abs(state) ** 2
        if shots is None:
            expectation = float(probs @ energies)
            visible = np.flatnonzero(probs >= observation_floor)
            observe(visible if visible.size else [int(np.argmax(probs))])
        else:
            histogram = sample_histogram(state, shots, rng)
            expectation = sum(c * energies[b] for b, c in histogram.items()) / shots
            observe(list(histogram))
        trace.append((len(trace), expectation, np.array(theta, dtype=float)))
        if best["expectation"] is None or expectation < best["expectation"]:
            best["expectation"] = expectation
        return expectation

    score(rng.uniform(-np.pi, np.pi, n * num_layers))
    num_evals = 1 + _minimize_multistart(score, n * num_layers, optimizer, rng)
    return DiagonalVqeOutcome(
        best_state=best["state"],
        best_energy=best["energy"],
        best_expectation=best["expectation"],
        trace=trace,
        num_evals=num_evals,
    )


def vqe_ising(
    model: IsingModel,
    data: CoverageData,
    catalog,
    coverage_weight: float = 1.0,
    cost_weight: float = 1e-4,
    num_layers: int = 3,
    optimizer: OptimizerConfig = OptimizerConfig(),
    seed: int = 0,
    shots: int | None = None,
    observation_floor: float = 0.01,
) -> VqeRun:
    """Variational free-count selection over the spin form of the quadratic model.

    One qubit per candidate.  The best-energy basis state observed is
    decoded into a selection and reported with its exact union coverage.
    """
    if model.num_spins != data.num_configs:
        raise ValueError("one spin per candidate required")
    outcome = minimize_ising_expectation(
        model, num_layers, optimizer, seed, shots, observation_floor
    )
    bits = enumerate_bits(np.array([outcome.best_state], dtype=np.int64), model.num_spins)[0]
    selection = tuple(int(i) for i in np.flatnonzero(bits))
    result = evaluate_selection(
        selection,
        data,
        config_costs(data.configs, catalog),
        coverage_weight,
        cost_weight,
        solver_tag="vqe_ising",
        seed=seed,
    )
    return VqeRun(result=result, trace=outcome.trace, num_evals=outcome.num_evals)
