"""
Coin operators for the discrete-time walk.

Every constructor returns a CoinSpec whose base matrix is a dense complex128
array written in closed form. A scalar phase is kept apart from the base
matrix so that all vertices of one degree can share a label.

Available coins
---------------
- hadamard_coin()                 HAD     (1/√2)[[1, 1], [1, -1]]
- hadamard_flip_flop_coin()       HAD_FF  Hadamard followed by a slot exchange
- biased_coin(delta)              BIAS    [[√δ, √(1-δ)], [√(1-δ), -√δ]]
- phased_biased_coin(delta, θ)    BIAS    scalar or relative phase on BIAS
- pauli_x()                       SX      completely biased coin
- complex_hadamard()              HI      (1/√2)[[1, i], [i, 1]]
- grover_coin(d)                  G<d>    (2·J − d·I) / d, kept exactly as numerator and denominator (GROVER8 for d=8)
- phased_grover_coin(d, phi)      G<d>_phased
- g8_coin()                       G8      degree-8 mixing coin, printed form
- g8_from_tensor()                G8      same coin rebuilt from H_i ⊗ H_i ⊗ σ_x
"""

import logging
import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, Optional

import numpy as np
from numpy.typing import NDArray

from ..errors import CoinConstructionError, CoinDomainError, UnknownCoinError

logger = logging.getLogger(__name__)

# Phase picked up at every phased degree-4 vertex.
WIRE_PHASE = -np.pi / 4

UNITARY_TOL = 1e-12

# sqrt(0.5) rather than 1/sqrt(2): biased_coin(0.5) must equal hadamard_coin() bit for bit.
_R = np.sqrt(0.5)

# Printed degree-8 coin, scaled by 2.
_G8_TIMES_TWO = np.array(
    [
        [0, 0, 0, 0, 1, 1j, 1j, -1],
        [0, 0, 0, 0, 1j, 1, -1, 1j],
        [0, 0, 0, 0, 1j, -1, 1, 1j],
        [0, 0, 0, 0, -1, 1j, 1j, 1],
        [1j, -1, 1, 1j, 0, 0, 0, 0],
        [-1, 1j, 1j, 1, 0, 0, 0, 0],
        [1, 1j, 1j, -1, 0, 0, 0, 0],
        [1j, 1, -1, 1j, 0, 0, 0, 0],
    ],
    dtype=np.complex128,
)

# (k, s) -> s*4 + k: moves the σ_x factor of (H_i ⊗ H_i) ⊗ σ_x to the front.
G8_SHUFFLE = [2 * k + s for s in (0, 1) for k in range(4)]
# Lower block rows of H_i ⊗ H_i with the top two and bottom two rows exchanged.
G8_ROW_ORDER = [0, 1, 2, 3, 6, 7, 4, 5]


@dataclass(frozen=True, eq=False)
class CoinSpec:
    """A d×d unitary tied to a vertex class, plus an optional scalar phase."""

    label: str
    matrix: NDArray[np.complex128]
    phase: float = 0.0
    # Exact rational form matrix == numerator / denominator, when one is known.
    numerator: Optional[NDArray[np.int64]] = field(default=None, repr=False)
    denominator: int = 1
    operator: NDArray[np.complex128] = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise CoinDomainError(
                "coin matrix must be square and non-empty", label=self.label, shape=matrix.shape
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.numerator is not None:
            numerator = np.array(self.numerator, dtype=np.int64)
            if numerator.shape != matrix.shape or self.denominator < 1:
                raise CoinDomainError("exact form does not match the coin matrix",
                                      label=self.label, shape=numerator.shape)
            numerator.setflags(write=False)
            object.__setattr__(self, "numerator", numerator)

        if self.phase:
            operator = np.exp(1j * self.phase) * matrix
        else:
            operator = matrix.copy()
        operator.setflags(write=False)
        object.__setattr__(self, "operator", operator)

    @property
    def degree(self) -> int:
        return self.matrix.shape[0]

    def same_as(self, other: "CoinSpec") -> bool:
        return self.degree == other.degree and np.array_equal(self.operator, other.operator)


def unitarity_error(coin: CoinSpec) -> float:
    u = coin.operator
    return float(np.max(np.abs(u.conj().T @ u - np.eye(coin.degree))))


def check_unitary(coin: CoinSpec, tol: float = UNITARY_TOL) -> bool:
    """True iff max|U†U − I| ≤ tol."""
    if tol <= 0:
        raise CoinDomainError("tolerance must be positive", tol=tol)
    return unitarity_error(coin) <= tol


def _checked(coin: CoinSpec) -> CoinSpec:
    err = unitarity_error(coin)
    if err > UNITARY_TOL:
        raise CoinConstructionError(
            "constructed coin is not unitary", label=coin.label, error=err
        )
    return coin


def _require_degree(d: int) -> None:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise CoinDomainError(f"degree must be an int, got {type(d).__name__}")
    if d < 1:
        raise CoinDomainError("coin degree must be at least 1", d=d)


def hadamard_coin() -> CoinSpec:
    matrix = np.array([[_R, _R], [_R, -_R]], dtype=np.complex128)
    return _checked(CoinSpec("HAD", matrix))


def hadamard_flip_flop_coin() -> CoinSpec:
    """
    Hadamard coin with its columns exchanged (H·σ_x).

    Under the flip-flop shift an arriving walker sits in the slot pointing
    back where it came from. Exchanging the columns undoes that relabelling,
    so a path graph with this coin evolves exactly like the moving-shift
    Hadamard walk with coin label c stored in slot 1 - c.
    """
    matrix = np.array([[_R, _R], [-_R, _R]], dtype=np.complex128)
    return _checked(CoinSpec("HAD_FF", matrix))


def biased_coin(delta: float) -> CoinSpec:
    """
    Biased Hadamard coin; delta = 1/2 is the Hadamard, delta = 0 is σ_x.

    Raises
    ------
    CoinDomainError
        If delta is outside [0, 1].
    """
    if not 0.0 <= delta <= 1.0:
        raise CoinDomainError("bias must lie in [0, 1]", delta=delta)
    a = np.sqrt(delta)
    b = np.sqrt(1.0 - delta)
    matrix = np.array([[a, b], [b, -a]], dtype=np.complex128)
    return _checked(CoinSpec("BIAS", matrix))


def phased_biased_coin(delta: float, theta: float, mode: str = "scalar") -> CoinSpec:
    """
    Biased coin with a phase, for periodicity scans.

    mode="scalar" multiplies the whole coin by e^{iθ}; mode="relative" puts
    e^{iθ} on the second column, i.e. H_bias · diag(1, e^{iθ}).
    """
    base = biased_coin(delta)
    if mode == "scalar":
        return _checked(CoinSpec("BIAS", base.matrix, phase=theta))
    if mode == "relative":
        matrix = base.matrix @ np.diag([1.0, np.exp(1j * theta)])
        return _checked(CoinSpec("BIAS", matrix))
    raise CoinDomainError("unknown phase mode", mode=mode)


def pauli_x() -> CoinSpec:
    matrix = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    return _checked(CoinSpec("SX", matrix))


def complex_hadamard() -> CoinSpec:
    matrix = np.array([[_R, 1j * _R], [1j * _R, _R]], dtype=np.complex128)
    return _checked(CoinSpec("HI", matrix))


def grover_label(d: int) -> str:
    # G8 is taken by the degree-8 mixing coin.
    return "GROVER8" if d == 8 else f"G{d}"


def grover_coin(d: int) -> CoinSpec:
    """
    Grover diffusion coin of degree d: every entry 2/d, minus the identity.

    Real, symmetric and an involution. d=2 is the swap, d=1 is [[1]].
    """
    _require_degree(d)
    numerator = grover_numerator(d)
    # integer / integer: every entry is the correctly rounded value of (2 - d·δ_ij) / d
    matrix = (numerator / d).astype(np.complex128)
    return _checked(CoinSpec(grover_label(d), matrix, numerator=numerator, denominator=d))


def grover_numerator(d: int) -> NDArray[np.int64]:
    """2·J − d·I, the integer numerator of the degree-d Grover coin over d."""
    _require_degree(d)
    return 2 * np.ones((d, d), dtype=np.int64) - d * np.eye(d, dtype=np.int64)


def is_exact_involution(coin: CoinSpec) -> bool:
    """
    U² = I decided in integer arithmetic on the exact form, N² == D²·I.

    Coins without an exact form fall back to a bit-exact float comparison.
    """
    if coin.numerator is None:
        return bool(np.array_equal(coin.matrix @ coin.matrix, np.eye(coin.degree)))
    n = coin.numerator
    return bool(np.array_equal(n @ n, coin.denominator ** 2 * np.eye(coin.degree, dtype=np.int64)))


def phased_grover_coin(d: int, phi: float) -> CoinSpec:
    base = grover_coin(d)
    return _checked(CoinSpec(f"{base.label}_phased", base.matrix, phase=phi,
                             numerator=base.numerator, denominator=base.denominator))


def g8_coin() -> CoinSpec:
    return _checked(CoinSpec("G8", _G8_TIMES_TWO / 2))


def g8_from_tensor() -> CoinSpec:
    """
    Rebuild the degree-8 coin from (H_i ⊗ H_i) ⊗ σ_x.

    Convention (found by matching the printed matrix):
      1. index (k, s) of the tensor product is reordered to (s, k), giving
         σ_x ⊗ (H_i ⊗ H_i), i.e. the block form [[0, K], [K, 0]];
      2. in the lower block the rows of K are taken in the order 2, 3, 0, 1
         (top two and bottom two rows exchanged).

    Raises
    ------
    CoinConstructionError
        With an entrywise diff if the result misses the printed matrix.
    """
    hi = complex_hadamard().operator
    sx = pauli_x().operator
    tensor = np.kron(np.kron(hi, hi), sx)
    blocked = tensor[np.ix_(G8_SHUFFLE, G8_SHUFFLE)]
    rearranged = blocked[G8_ROW_ORDER, :]

    reference = _G8_TIMES_TWO / 2
    diff = np.abs(rearranged - reference)
    if np.max(diff) > 1e-15:
        bad = [(int(i), int(j), complex(rearranged[i, j]), complex(reference[i, j]))
               for i, j in zip(*np.nonzero(diff > 1e-15))]
        raise CoinConstructionError(
            "tensor construction does not reproduce the degree-8 coin",
            max_error=float(np.max(diff)),
            mismatches=bad,
        )
    return _checked(CoinSpec("G8", rearranged))


def unitary_coin(matrix, label: str, phase: float = 0.0, tol: float = UNITARY_TOL) -> CoinSpec:
    """User-supplied coin (graph files); rejected unless unitary within tol."""
    coin = CoinSpec(label, np.asarray(matrix, dtype=np.complex128), phase=phase)
    err = unitarity_error(coin)
    if err > tol:
        raise CoinConstructionError("supplied coin is not unitary", label=label, error=err)
    return coin


def half_transfer_holds(coin: CoinSpec, subset: Iterable[int], tol: float = 1e-14) -> bool:
    """
    True iff the coin maps the uniform unit vector on `subset` to the uniform
    unit vector on its complement (up to the coin's scalar phase).
    """
    subset = list(subset)
    d = coin.degree
    v = np.zeros(d, dtype=np.complex128)
    v[subset] = 1.0 / np.sqrt(len(subset))
    expected = np.zeros(d, dtype=np.complex128)
    rest = [i for i in range(d) if i not in subset]
    if not rest:
        return False
    expected[rest] = 1.0 / np.sqrt(len(rest))
    out = coin.matrix @ v
    return bool(np.max(np.abs(out - expected)) <= tol)


def half_subsets(d: int):
    return combinations(range(d), d // 2)


_FIXED: Dict[str, Callable[[], CoinSpec]] = {
    "HAD": hadamard_coin,
    "HAD_FF": hadamard_flip_flop_coin,
    "SX": pauli_x,
    "HI": complex_hadamard,
    "G8": g8_coin,
}

_GROVER_LABEL = re.compile(r"^(?:G|GROVER)(\d+)(_phased)?$")


def resolve_coin(label: str, phi: Optional[float] = None) -> CoinSpec:
    """
    Look a coin up by label.

    `G<d>` is the Grover coin of degree d; `G<d>_phased` carries the wire
    phase (−π/4 unless phi is given).
    """
    if label in _FIXED:
        return _FIXED[label]()
    match = _GROVER_LABEL.match(label)
    if match:
        d = int(match.group(1))
        if match.group(2):
            return phased_grover_coin(d, WIRE_PHASE if phi is None else phi)
        return grover_coin(d)
    raise UnknownCoinError("unknown coin label", label=label)


def known_labels() -> list[str]:
    return sorted(_FIXED) + ["G<d>", "G<d>_phased", "GROVER<d>"]
