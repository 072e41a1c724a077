"""Exact dense linear algebra and polynomial algebra over F_p.

Matrices are stored densely as numpy integer arrays of canonical
residues.  Products accumulate in int64 when the modulus is small
enough for that to be overflow-safe, and fall back to Python-int
(object dtype) arithmetic otherwise, so results are always exact.

The characteristic polynomial is computed by similarity reduction to
upper Hessenberg form (all pivots are field divisions, hence exact)
followed by the standard determinant recurrence.  Factorization of
polynomials is deterministic trial division by monic polynomials in
lexicographic coefficient order; this is intentionally desk-scale.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import FieldMismatchError, GuardExceededError, PreconditionError
from .field import PrimeField

_INT64_LIMIT = 2**62

# Work guard for the brute-force polynomial enumerations (factorization,
# root scans, polynomial order).
DEFAULT_WORK_GUARD = 10**7


def _as_canonical_array(field: PrimeField, data) -> np.ndarray:
    arr = np.array(data, dtype=np.int64)
    return np.mod(arr, field.p)


def _safe_int64_product(field: PrimeField, inner: int) -> bool:
    return (field.p - 1) ** 2 * max(inner, 1) < _INT64_LIMIT


class FpMatrix:
    """A dense matrix over a prime field with exact modular arithmetic."""

    __slots__ = ("field", "a")

    def __init__(self, field: PrimeField, data):
        self.field = field
        self.a = _as_canonical_array(field, data)
        if self.a.ndim != 2:
            raise PreconditionError("matrix data must be two-dimensional")
        self.a.setflags(write=False)

    # -- construction -------------------------------------------------

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "FpMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FpMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]]) -> "FpMatrix":
        return cls(field, rows)

    # -- basic queries ------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key) -> int:
        return int(self.a[key])

    def __eq__(self, other):
        return (
            isinstance(other, FpMatrix)
            and other.field == self.field
            and other.a.shape == self.a.shape
            and bool(np.array_equal(other.a, self.a))
        )

    def __hash__(self):
        return hash((self.field.p, self.a.shape, self.a.tobytes()))

    def __repr__(self):
        return f"FpMatrix(F_{self.field.p}, {self.a.tolist()})"

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def _check_field(self, other: "FpMatrix"):
        if other.field != self.field:
            raise FieldMismatchError(
                f"matrices over F_{self.field.p} and F_{other.field.p}"
            )

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_field(other)
        if self.a.shape != other.a.shape:
            raise PreconditionError("shape mismatch in matrix addition")
        return FpMatrix(self.field, self.a + other.a)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_field(other)
        if self.a.shape != other.a.shape:
            raise PreconditionError("shape mismatch in matrix subtraction")
        return FpMatrix(self.field, self.a - other.a)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix(self.field, (self.a * (c % self.field.p)))

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise PreconditionError(
                f"dimension mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
            )
        if _safe_int64_product(self.field, self.cols):
            prod = self.a @ other.a
        else:
            prod = self.a.astype(object) @ other.a.astype(object)
        return FpMatrix(self.field, np.mod(prod, self.field.p).astype(np.int64))

    def mat_vec(self, x) -> np.ndarray:
        """A @ x for a length-cols vector; returns a canonical int64 vector."""
        v = _as_canonical_array(self.field, x)
        if v.shape != (self.cols,):
            raise PreconditionError(f"vector length {v.shape} != cols {self.cols}")
        if _safe_int64_product(self.field, self.cols):
            out = self.a @ v
        else:
            out = self.a.astype(object) @ v.astype(object)
        return np.mod(out, self.field.p).astype(np.int64)

    def __pow__(self, e: int) -> "FpMatrix":
        if not self.is_square():
            raise PreconditionError("matrix power requires a square matrix")
        if e < 0:
            raise PreconditionError("negative matrix powers are not supported")
        result = FpMatrix.identity(self.field, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base_needed = e >> 1
            if base_needed:
                base = base @ base
            e = base_needed
        return result

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.field, self.a.T)

    def kron(self, other: "FpMatrix") -> "FpMatrix":
        """Kronecker product: block matrix [a_ij * B]."""
        self._check_field(other)
        return FpMatrix(self.field, np.mod(np.kron(self.a, other.a), self.field.p))

    # -- elimination --------------------------------------------------

    def rref(self) -> tuple["FpMatrix", int, list[int]]:
        """Reduced row-echelon form; returns (R, rank, pivot columns)."""
        p = self.field.p
        m = [list(map(int, row)) for row in self.a]
        rows, cols = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            pivot = next((i for i in range(r, rows) if m[i][c] % p != 0), None)
            if pivot is None:
                continue
            m[r], m[pivot] = m[pivot], m[r]
            inv = pow(m[r][c], p - 2, p)
            m[r] = [(x * inv) % p for x in m[r]]
            for i in range(rows):
                if i != r and m[i][c] % p != 0:
                    f = m[i][c]
                    m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        return FpMatrix(self.field, m), r, pivots

    def rank(self) -> int:
        return self.rref()[1]

    def kernel_basis(self) -> list[np.ndarray]:
        """Independent spanning set of {x : A x = 0}; size = cols - rank."""
        R, rank, pivots = self.rref()
        p = self.field.p
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = np.zeros(self.cols, dtype=np.int64)
            v[f] = 1
            for r, c in enumerate(pivots):
                v[c] = (-R.a[r, f]) % p
            basis.append(v)
        return basis

    def solve(self, v) -> np.ndarray | None:
        """One particular solution of A x = v, or None if inconsistent."""
        rhs = _as_canonical_array(self.field, v)
        if rhs.shape != (self.rows,):
            raise PreconditionError("right-hand side length mismatch")
        aug = FpMatrix(self.field, np.column_stack([self.a, rhs]))
        R, rank, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = np.zeros(self.cols, dtype=np.int64)
        for r, c in enumerate(pivots):
            x[c] = R.a[r, self.cols]
        return x

    def preimage(self, v) -> "AffineSubset":
        """All x with A x = v, as a particular solution plus kernel basis."""
        particular = self.solve(v)
        if particular is None:
            return AffineSubset(self.field, None, [])
        return AffineSubset(self.field, particular, self.kernel_basis())

    # -- characteristic polynomial ------------------------------------

    def _hessenberg(self) -> np.ndarray:
        """Similarity reduction to upper Hessenberg form over F_p."""
        p = self.field.p
        n = self.rows
        big = not _safe_int64_product(self.field, n)
        H = self.a.astype(object if big else np.int64).copy()
        for k in range(n - 2):
            pivot = next((i for i in range(k + 1, n) if H[i, k] != 0), None)
            if pivot is None:
                continue
            if pivot != k + 1:
                H[[k + 1, pivot], :] = H[[pivot, k + 1], :]
                H[:, [k + 1, pivot]] = H[:, [pivot, k + 1]]
            inv = pow(int(H[k + 1, k]), p - 2, p)
            f = np.mod(H[k + 2 :, k] * inv, p)
            # Row ops R_i -= f_i R_{k+1}, mirrored by column ops C_{k+1} += f_i C_i.
            H[k + 2 :, :] = np.mod(H[k + 2 :, :] - np.outer(f, H[k + 1, :]), p)
            H[:, k + 1] = np.mod(H[:, k + 1] + H[:, k + 2 :] @ f, p)
        return H

    def char_poly(self) -> "FpPolynomial":
        """Monic characteristic polynomial det(sI - A) over F_p."""
        if not self.is_square():
            raise PreconditionError("characteristic polynomial requires a square matrix")
        n = self.rows
        if n == 0:
            return FpPolynomial(self.field, [1])
        p = self.field.p
        H = self._hessenberg()
        # Determinant recurrence for upper Hessenberg sI - H.  polys[k] holds
        # the char poly of the leading k x k block, as ascending coefficients.
        polys = [np.zeros(n + 1, dtype=np.int64) for _ in range(n + 1)]
        polys[0][0] = 1
        for k in range(1, n + 1):
            prev = polys[k - 1]
            cur = polys[k]
            # (s - H[k-1,k-1]) * prev
            cur[1 : k + 1] = prev[:k]
            cur[: k] = np.mod(cur[: k] - int(H[k - 1, k - 1]) * prev[:k], p)
            # minor terms walking up the subdiagonal
            sub = 1
            for m in range(1, k):
                sub = (sub * int(H[k - m, k - m - 1])) % p
                if sub == 0:
                    break
                coeff = (int(H[k - m - 1, k - 1]) * sub) % p
                if coeff == 0:
                    continue
                lower = polys[k - m - 1]
                cur[: k - m] = np.mod(cur[: k - m] - coeff * lower[: k - m], p)
        return FpPolynomial(self.field, [int(c) for c in polys[n][: n + 1]])

    def eigenvalues_in_field(self, work_guard: int = DEFAULT_WORK_GUARD) -> list[int]:
        """Roots of the characteristic polynomial lying in F_p, with multiplicity."""
        if self.field.p > work_guard:
            raise GuardExceededError(
                f"eigenvalue scan over {self.field.p} field elements exceeds guard"
            )
        return self.char_poly().roots_in_field()


class AffineSubset:
    """A coset x0 + span(kernel_basis) in F_p^n, or the empty set.

    Enumeration is lazy; the cardinality p^k is available without
    materializing members.
    """

    __slots__ = ("field", "particular", "kernel_basis")

    def __init__(self, field: PrimeField, particular, kernel_basis):
        self.field = field
        self.particular = None if particular is None else np.asarray(particular, dtype=np.int64)
        self.kernel_basis = [np.asarray(b, dtype=np.int64) for b in kernel_basis]

    @property
    def is_empty(self) -> bool:
        return self.particular is None

    @property
    def cardinality(self) -> int:
        if self.is_empty:
            return 0
        return self.field.p ** len(self.kernel_basis)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        if self.is_empty:
            return
        p = self.field.p
        if not self.kernel_basis:
            yield tuple(int(x) for x in self.particular)
            return
        B = np.array(self.kernel_basis, dtype=np.int64)
        for coeffs in itertools.product(range(p), repeat=len(self.kernel_basis)):
            v = np.mod(self.particular + np.array(coeffs, dtype=np.int64) @ B, p)
            yield tuple(int(x) for x in v)

    def members(self, guard: int = 10**7) -> set[tuple[int, ...]]:
        if self.cardinality > guard:
            raise GuardExceededError(
                f"affine subset with {self.cardinality} members exceeds guard {guard}"
            )
        return set(self)


class FpPolynomial:
    """Dense polynomial over F_p, coefficients ascending by degree."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs: Iterable[int]):
        self.field = field
        c = [x % field.p for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0]
        self.coeffs = tuple(c)

    # -- construction helpers ----------------------------------------

    @classmethod
    def zero(cls, field: PrimeField) -> "FpPolynomial":
        return cls(field, [0])

    @classmethod
    def one(cls, field: PrimeField) -> "FpPolynomial":
        return cls(field, [1])

    @classmethod
    def x(cls, field: PrimeField) -> "FpPolynomial":
        return cls(field, [0, 1])

    @classmethod
    def monomial(cls, field: PrimeField, degree: int, coeff: int = 1) -> "FpPolynomial":
        return cls(field, [0] * degree + [coeff])

    @classmethod
    def consensus_form(cls, field: PrimeField, n: int) -> "FpPolynomial":
        """s^(n-1) * (s - 1), the certified-consensus characteristic polynomial."""
        if n < 1:
            raise PreconditionError("n must be positive")
        return cls.monomial(field, n - 1, -1) + cls.monomial(field, n)

    # -- queries ------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def __eq__(self, other):
        return (
            isinstance(other, FpPolynomial)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __repr__(self):
        return f"FpPolynomial(F_{self.field.p}, {list(self.coeffs)})"

    def __str__(self):
        """Canonical rendering: coefficients in [0, p-1], highest degree first."""
        if self.is_zero:
            return "0"
        terms = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if c == 0:
                continue
            if d == 0:
                terms.append(str(c))
            elif d == 1:
                terms.append("s" if c == 1 else f"{c}s")
            else:
                terms.append(f"s^{d}" if c == 1 else f"{c}s^{d}")
        return " + ".join(terms)

    def _check_field(self, other: "FpPolynomial"):
        if other.field != self.field:
            raise FieldMismatchError("polynomials over different fields")

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "FpPolynomial") -> "FpPolynomial":
        self._check_field(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return FpPolynomial(self.field, [x + y for x, y in zip(a, b)])

    def __sub__(self, other: "FpPolynomial") -> "FpPolynomial":
        self._check_field(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return FpPolynomial(self.field, [x - y for x, y in zip(a, b)])

    def __mul__(self, other: "FpPolynomial") -> "FpPolynomial":
        self._check_field(other)
        if self.is_zero or other.is_zero:
            return FpPolynomial.zero(self.field)
        p = self.field.p
        out = [0] * (self.degree + other.degree + 1)
        for i, ci in enumerate(self.coeffs):
            if ci == 0:
                continue
            for j, cj in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + ci * cj) % p
        return FpPolynomial(self.field, out)

    def __divmod__(self, other: "FpPolynomial") -> tuple["FpPolynomial", "FpPolynomial"]:
        self._check_field(other)
        if other.is_zero:
            raise PreconditionError("division by the zero polynomial")
        p = self.field.p
        rem = list(self.coeffs)
        dq = self.degree - other.degree
        if dq < 0:
            return FpPolynomial.zero(self.field), self
        quot = [0] * (dq + 1)
        lead_inv = pow(other.coeffs[-1], p - 2, p)
        for k in range(dq, -1, -1):
            c = (rem[other.degree + k] * lead_inv) % p
            quot[k] = c
            if c:
                for j, cj in enumerate(other.coeffs):
                    rem[j + k] = (rem[j + k] - c * cj) % p
        return FpPolynomial(self.field, quot), FpPolynomial(self.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        """Evaluate by Horner's rule; returns a canonical residue."""
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    # -- structure ----------------------------------------------------

    def roots_in_field(self) -> list[int]:
        """All roots in F_p with multiplicity, by scan and repeated division."""
        roots = []
        f = self
        for v in range(self.field.p):
            while not f.is_zero and f.degree >= 1 and f(v) == 0:
                f = f // FpPolynomial(self.field, [-v, 1])
                roots.append(v)
        return roots

    def factor(self, work_guard: int = DEFAULT_WORK_GUARD) -> list[tuple["FpPolynomial", int]]:
        """Complete factorization into monic irreducibles with multiplicities.

        Deterministic trial division by monic polynomials enumerated in
        lexicographic coefficient order, smallest degree first.  The
        product of factors reconstructs the input exactly (up to the
        leading coefficient, which must be 1).
        """
        if not self.is_monic() or self.degree < 1:
            raise PreconditionError("factorization requires a monic polynomial of degree >= 1")
        p = self.field.p
        factors: list[tuple[FpPolynomial, int]] = []
        rem = self
        d = 1
        work = 0
        while rem.degree >= 1:
            if d > rem.degree // 2:
                factors.append((rem, 1))
                break
            found = False
            work += p**d
            if work > work_guard:
                raise GuardExceededError("factorization work guard exceeded")
            for tail in itertools.product(range(p), repeat=d):
                cand = FpPolynomial(self.field, list(tail) + [1])
                q, r = divmod(rem, cand)
                if r.is_zero:
                    mult = 1
                    rem = q
                    while True:
                        q, r = divmod(rem, cand)
                        if not r.is_zero:
                            break
                        mult += 1
                        rem = q
                    factors.append((cand, mult))
                    found = True
                    break
            if not found:
                d += 1
        # merge multiplicities of identical factors found across passes
        merged: dict[FpPolynomial, int] = {}
        for f, m in factors:
            merged[f] = merged.get(f, 0) + m
        return sorted(merged.items(), key=lambda fm: (fm[0].degree, fm[0].coeffs))

    def order(self, work_guard: int = DEFAULT_WORK_GUARD) -> int:
        """Least r >= 1 with s^r congruent to 1 modulo this polynomial.

        Defined only for nonconstant polynomials with nonzero constant
        term.  Computed by a direct scan with the powers of s reduced
        modulo the polynomial.
        """
        if self.degree < 1:
            raise PreconditionError("order is defined for nonconstant polynomials")
        if self.coeffs[0] == 0:
            raise PreconditionError("order requires a nonzero constant term")
        one = FpPolynomial.one(self.field)
        s = FpPolynomial.x(self.field) % self
        acc = s
        r = 1
        while acc != one:
            acc = (acc * s) % self
            r += 1
            if r > work_guard:
                raise GuardExceededError("polynomial order scan guard exceeded")
        return r


def kronecker(A: FpMatrix, B: FpMatrix) -> FpMatrix:
    return A.kron(B)
