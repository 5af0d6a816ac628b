"""Shared domain types: coefficient sequences, dense matrices, dyadic index
algebra, seeded randomness, and the CSV interchange formats.

All types are immutable after construction and every operation here is a pure
function, so everything is safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexNotSupported,
    EmptyDimension,
    InvalidInput,
    TooShort,
)

_MASK64 = (1 << 64) - 1


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """Finite coefficient sequence c_0..c_D of an analytic polynomial.

    Entries are float64 or complex128.  Indexing past the degree yields 0,
    so a CoeffSeq doubles as a finitely supported sequence in c0/c/l-inf.
    """

    coeffs: np.ndarray

    def __init__(self, coeffs):
        arr = np.asarray(coeffs)
        if arr.ndim != 1:
            raise InvalidInput("coefficient data must be one-dimensional")
        if arr.size < 1:
            raise EmptyDimension("a CoeffSeq needs at least one entry")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        arr = np.array(arr, dtype=dtype)
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("coefficients must be finite")
        object.__setattr__(self, "coeffs", _frozen(arr))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.coeffs)

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, k: int):
        if k < 0:
            raise IndexError("coefficient indices start at 0")
        if k > self.degree:
            return self.coeffs.dtype.type(0)
        return self.coeffs[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffSeq):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.array_equal(self.coeffs, other.coeffs)
        )

    def padded(self, length: int) -> np.ndarray:
        """Dense value array of the given length, zero past the degree."""
        out = np.zeros(length, dtype=self.coeffs.dtype)
        m = min(length, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def last_nonzero(self) -> int:
        """Index of the last nonzero coefficient (0 for the zero sequence)."""
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Real J-by-K matrix with finite entries."""

    entries: np.ndarray

    def __init__(self, entries):
        arr = np.asarray(entries)
        if np.iscomplexobj(arr):
            raise ComplexNotSupported("matrices are real-only")
        if arr.ndim != 2:
            raise InvalidInput("matrix data must be two-dimensional")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise EmptyDimension("matrix dimensions must be at least 1x1")
        arr = np.array(arr, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("matrix entries must be finite")
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def dims(self) -> tuple[int, int]:
        return self.entries.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )


@dataclass(frozen=True)
class HankelSymbol:
    """Symbol sequence together with a materialization size."""

    symbol: CoeffSeq
    size: int

    def materialize(self) -> DenseMatrix:
        return hankel_matrix(self.symbol, self.size)


# ---------------------------------------------------------------------------
# Dyadic index algebra.  Hard block n is the integer interval
# [2^n, 2^(n+1) - 1]; the blocks partition [1, inf).  The multiplier support
# of the n-th kernel is the open interval (2^(n-1), 2^(n+1)) for n >= 1 and
# {0, 1} for n = 0; supports two or more apart are disjoint.
# ---------------------------------------------------------------------------


def hard_block(n: int) -> range:
    """Integer indices of the n-th hard dyadic block."""
    if n < 0:
        raise InvalidInput("block index must be nonnegative")
    return range(1 << n, 1 << (n + 1))


def block_of(k: int) -> int:
    """The unique n with k in hard_block(n); requires k >= 1."""
    if k < 1:
        raise InvalidInput("only indices >= 1 belong to a hard block")
    return k.bit_length() - 1


def multiplier_support(n: int) -> range:
    """Indices where the n-th dyadic kernel has a nonzero coefficient."""
    if n < 0:
        raise InvalidInput("block index must be nonnegative")
    if n == 0:
        return range(0, 2)
    return range((1 << (n - 1)) + 1, 1 << (n + 1))


@dataclass(frozen=True)
class BlockIndex:
    """A dyadic block: its hard index interval and kernel support."""

    n: int

    @property
    def hard(self) -> range:
        return hard_block(self.n)

    @property
    def support(self) -> range:
        return multiplier_support(self.n)


# ---------------------------------------------------------------------------
# Seeded randomness.  One counter-based generator (Philox) everywhere; seeds
# are explicit 64-bit integers and derived streams are independent, so
# parallel and serial evaluation orders produce identical results.
# ---------------------------------------------------------------------------


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Deterministically derive an independent 64-bit seed for a substream."""
    return _splitmix64((seed & _MASK64) ^ _splitmix64(stream & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; same seed gives bit-identical draws."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


# ---------------------------------------------------------------------------
# Operations.
# ---------------------------------------------------------------------------


def hankel_matrix(symbol: CoeffSeq, size: int) -> DenseMatrix:
    """Materialize the size-by-size matrix with entry (j, k) = symbol[j + k].

    Entries beyond the symbol's degree are zero.  Complex symbols are
    rejected: the matrix consumers are real-only.
    """
    if size < 1:
        raise EmptyDimension("matrix size must be at least 1")
    if symbol.is_complex:
        raise ComplexNotSupported("Hankel symbols must be real")
    g = symbol.padded(2 * size - 1)
    idx = np.add.outer(np.arange(size), np.arange(size))
    return DenseMatrix(g[idx])


def limit_estimate(z: CoeffSeq):
    """Estimate the limit of a convergent sequence.

    Returns the mean of the last quarter of the entries; needs length >= 4.
    """
    if len(z) < 4:
        raise TooShort("limit estimation needs at least 4 entries")
    tail = z.coeffs[-(len(z) // 4):]
    value = tail.mean()
    return complex(value) if z.is_complex else float(value)


def least_squares_line(x, y) -> tuple[float, float, float]:
    """Slope, intercept, and RMS residual of the least-squares line."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2:
        raise TooShort("a line fit needs at least two points")
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise InvalidInput("line fit needs two distinct abscissae")
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    return slope, float(intercept), float(math.sqrt(float((resid**2).mean())))


# ---------------------------------------------------------------------------
# CSV interchange.
#
# CoeffSeq files carry a header "k,re" or "k,re,im" and one row per stored
# coefficient with strictly increasing indices; indices absent from the file
# are zero.  The writer emits the nonzero entries plus the final index (even
# when zero) so that reading recovers the exact length.  Matrix files are
# row-major without a header.  Lines starting with '#' are ignored, which is
# where CLI outputs embed their run configuration.
# ---------------------------------------------------------------------------


def _parse_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise InvalidInput(f"not a number: {text!r}") from exc
    if not math.isfinite(v):
        raise InvalidInput("NaN/Inf values are rejected")
    return v


def format_float(v: float) -> str:
    """Shortest decimal that round-trips the float exactly."""
    return repr(float(v))


def write_coeff_csv(path, seq: CoeffSeq, comment: str | None = None) -> None:
    lines = []
    if comment is not None:
        lines.append("# " + comment)
    lines.append("k,re,im" if seq.is_complex else "k,re")
    nz = set(np.nonzero(seq.coeffs)[0].tolist())
    nz.add(seq.degree)  # pins the length on read-back
    for k in sorted(nz):
        v = seq.coeffs[k]
        if seq.is_complex:
            lines.append(f"{k},{format_float(v.real)},{format_float(v.imag)}")
        else:
            lines.append(f"{k},{format_float(v)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coeff_csv(path) -> CoeffSeq:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [ln.strip() for ln in fh]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise InvalidInput("empty coefficient file")
    header = rows[0].replace(" ", "")
    if header == "k,re":
        is_complex = False
    elif header == "k,re,im":
        is_complex = True
    else:
        raise InvalidInput(f"unrecognized header {rows[0]!r}")
    ks: list[int] = []
    vals: list[complex] = []
    for ln in rows[1:]:
        parts = ln.split(",")
        if len(parts) != (3 if is_complex else 2):
            raise InvalidInput(f"malformed row {ln!r}")
        try:
            k = int(parts[0])
        except ValueError as exc:
            raise InvalidInput(f"bad index {parts[0]!r}") from exc
        if k < 0:
            raise InvalidInput("indices must be nonnegative")
        if ks and k <= ks[-1]:
            raise InvalidInput("indices must be strictly increasing")
        ks.append(k)
        if is_complex:
            vals.append(complex(_parse_float(parts[1]), _parse_float(parts[2])))
        else:
            vals.append(_parse_float(parts[1]))
    if not ks:
        raise InvalidInput("coefficient file has no data rows")
    out = np.zeros(ks[-1] + 1, dtype=np.complex128 if is_complex else np.float64)
    out[np.array(ks)] = np.array(vals)
    return CoeffSeq(out)


def write_matrix_csv(path, mat: DenseMatrix, comment: str | None = None) -> None:
    lines = []
    if comment is not None:
        lines.append("# " + comment)
    for row in mat.entries:
        lines.append(",".join(format_float(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_csv(path) -> DenseMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [ln.strip() for ln in fh]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise InvalidInput("empty matrix file")
    data = [[_parse_float(cell) for cell in ln.split(",")] for ln in rows]
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise InvalidInput("matrix rows must have equal length")
    return DenseMatrix(np.array(data))
