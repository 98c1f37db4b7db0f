"""Matrix Lie algebra foundations: bases, brackets, bi-invariant forms, adjoints.

Every object in the package lives on a :class:`StructuredBasis`, which caches
the structure constants, the bi-invariant Gram matrix and (optionally) an
orthogonal subalgebra split.  Coordinate vectors are always real, also for
su(n), whose basis matrices are complex.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np
import scipy.linalg

from .errors import BasisMismatchError, InvalidDimensionError, UnsupportedSplitError

log = logging.getLogger(__name__)

ALGEBRA_TOL = 1e-12     # algebraic identities (Jacobi, ad-invariance)
EXPONENTIAL_TOL = 1e-10  # identities involving matrix exponentials


def matrix_form(u, v):
    """Bi-invariant pairing -1/2 Tr(uv) of two anti-Hermitian matrices.

    Equals 1/2 Tr(u v^T) on real antisymmetric matrices.
    """
    return float(np.real(-0.5 * np.trace(u @ v)))


class StructuredBasis:
    """Ordered basis of a matrix Lie algebra with cached structure data.

    Attributes:
        name: human-readable group name, e.g. ``"so(3)"``.
        dim: number of basis elements.
        matrix_size: size of the square basis matrices.
        basis_matrices: (dim, n, n) array, real or complex.
        labels: one short label per basis element (``e12``, ``s13``, ``d2``).
        structure_constants: c[i, j, k] with [b_i, b_j] = sum_k c[i,j,k] b_k.
        biinv_gram: Gram matrix of the bi-invariant form (identity for all
            builders in this module).
        subalgebra_dim: m > 0 when the first m elements span a subalgebra h
            and the rest span its orthogonal complement; 0 means no split.
    """

    def __init__(self, name, matrices, labels, subalgebra_dim=0, _validate=True):
        mats = np.asarray(matrices)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise InvalidDimensionError("basis matrices must be square and stacked")
        self.name = name
        self.dim = mats.shape[0]
        self.matrix_size = mats.shape[1]
        self.basis_matrices = mats
        self.labels = list(labels)
        self.subalgebra_dim = int(subalgebra_dim)

        self.biinv_gram = np.array(
            [[matrix_form(a, b) for b in mats] for a in mats]
        )
        self._gram_inv = np.linalg.inv(self.biinv_gram)
        self.structure_constants = self._compute_structure_constants()
        self.structure_constants.setflags(write=False)
        self.basis_matrices.setflags(write=False)
        self.biinv_gram.setflags(write=False)
        if _validate:
            self._validate()

    # -- construction helpers -------------------------------------------------

    def _compute_structure_constants(self):
        c = np.zeros((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            bi = self.basis_matrices[i]
            for j in range(i + 1, self.dim):
                comm = bi @ self.basis_matrices[j] - self.basis_matrices[j] @ bi
                pair = np.array([matrix_form(comm, b) for b in self.basis_matrices])
                coeff = self._gram_inv @ pair
                c[i, j] = coeff
                c[j, i] = -coeff
        return c

    def _validate(self):
        c = self.structure_constants
        scale = max(1.0, np.abs(c).max())
        # Jacobi identity on structure constants.
        jac = (
            np.einsum("ijm,mkl->ijkl", c, c)
            + np.einsum("jkm,mil->ijkl", c, c)
            + np.einsum("kim,mjl->ijkl", c, c)
        )
        if np.abs(jac).max() > ALGEBRA_TOL * scale * self.dim:
            raise InvalidDimensionError(
                f"{self.name}: Jacobi identity residual {np.abs(jac).max():.2e}"
            )
        # ad-invariance of the form: <[u,v],w> + <v,[u,w]> = 0 on basis triples.
        g = self.biinv_gram
        adinv = np.einsum("ijm,mk->ijk", c, g) + np.einsum("ikm,jm->ijk", c, g)
        if np.abs(adinv).max() > ALGEBRA_TOL * max(1.0, np.abs(g).max()) * self.dim:
            raise InvalidDimensionError(
                f"{self.name}: form is not ad-invariant ({np.abs(adinv).max():.2e})"
            )
        m = self.subalgebra_dim
        if m:
            # [h,h] stays in h, [h, h-perp] stays in h-perp.
            if np.abs(c[:m, :m, m:]).max() > ALGEBRA_TOL:
                raise InvalidDimensionError(f"{self.name}: h is not a subalgebra")
            if np.abs(c[:m, m:, :m]).max() > ALGEBRA_TOL:
                raise InvalidDimensionError(f"{self.name}: [h, h-perp] leaks into h")

    # -- element factories -----------------------------------------------------

    def element(self, coords):
        return AlgebraElement(self, coords)

    def zero(self):
        return AlgebraElement(self, np.zeros(self.dim))

    def basis_element(self, index):
        coords = np.zeros(self.dim)
        coords[index] = 1.0
        return AlgebraElement(self, coords)

    def element_by_label(self, label):
        try:
            return self.basis_element(self.labels.index(label))
        except ValueError:
            raise KeyError(f"no basis element labeled {label!r} in {self.name}")

    def coords_of(self, matrix):
        """Coordinates of an algebra-valued matrix relative to this basis."""
        pair = np.array([matrix_form(matrix, b) for b in self.basis_matrices])
        return self._gram_inv @ pair

    def require_same(self, other):
        if self is not other:
            raise BasisMismatchError(
                f"elements on different bases: {self.name} vs {other.name}"
            )

    def __repr__(self):
        split = f", h-dim {self.subalgebra_dim}" if self.subalgebra_dim else ""
        return f"StructuredBasis({self.name}, dim {self.dim}{split})"


class AlgebraElement:
    """Real coordinate vector relative to a StructuredBasis."""

    __slots__ = ("basis", "coords")

    def __init__(self, basis, coords):
        coords = np.array(coords, dtype=float)
        if coords.shape != (basis.dim,):
            raise BasisMismatchError(
                f"expected {basis.dim} coordinates, got shape {coords.shape}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    def matrix(self):
        return np.tensordot(self.coords, self.basis.basis_matrices, axes=1)

    def __add__(self, other):
        self.basis.require_same(other.basis)
        return AlgebraElement(self.basis, self.coords + other.coords)

    def __sub__(self, other):
        self.basis.require_same(other.basis)
        return AlgebraElement(self.basis, self.coords - other.coords)

    def __mul__(self, scalar):
        return AlgebraElement(self.basis, self.coords * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(self.basis, -self.coords)

    def norm_biinv(self):
        return float(np.sqrt(self.coords @ self.basis.biinv_gram @ self.coords))

    def __repr__(self):
        return f"AlgebraElement({self.basis.name}, {self.coords})"


class GroupElement:
    """Group matrix of the same shape as the basis matrices."""

    __slots__ = ("basis", "matrix")

    def __init__(self, basis, matrix):
        matrix = np.asarray(matrix)
        if matrix.shape != (basis.matrix_size, basis.matrix_size):
            raise BasisMismatchError("group matrix has wrong shape for basis")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def inverse(self):
        # all groups built here are real-orthogonal or unitary
        return GroupElement(self.basis, self.matrix.conj().T)

    def __matmul__(self, other):
        self.basis.require_same(other.basis)
        return GroupElement(self.basis, self.matrix @ other.matrix)

    def unitary_defect(self):
        n = self.basis.matrix_size
        return float(
            np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(n))
        )

    def __repr__(self):
        return f"GroupElement({self.basis.name})"


# -- basis builders -------------------------------------------------------------


def build_so_basis(n):
    """Orthonormal basis e_ij (i<j, lexicographic) of so(n).

    e_ij has -1 at (i,j) and +1 at (j,i); the bi-invariant form 1/2 Tr(uv^T)
    makes this basis orthonormal.
    """
    if n < 2:
        raise InvalidDimensionError(f"so(n) needs n >= 2, got {n}")
    mats, labels, pairs = [], [], []
    for i, j in itertools.combinations(range(n), 2):
        m = np.zeros((n, n))
        m[i, j] = -1.0
        m[j, i] = 1.0
        mats.append(m)
        labels.append(f"e{i + 1}{j + 1}")
        pairs.append((i, j))
    basis = StructuredBasis(f"so({n})", mats, labels)
    basis.pairs = pairs
    return basis


def build_su_basis(n, embed_so_subalgebra=False):
    """Orthonormal basis of su(n) in the form -1/2 Tr(uv).

    With ``embed_so_subalgebra`` the first n(n-1)/2 elements are the real
    antisymmetric e_ij spanning so(n), followed by i*(symmetric traceless)
    matrices spanning the orthogonal complement.
    """
    if n < 2:
        raise InvalidDimensionError(f"su(n) needs n >= 2, got {n}")
    mats, labels, pairs = [], [], []
    for i, j in itertools.combinations(range(n), 2):
        m = np.zeros((n, n), dtype=complex)
        m[i, j] = -1.0
        m[j, i] = 1.0
        mats.append(m)
        labels.append(f"e{i + 1}{j + 1}")
        pairs.append((i, j))
    for i, j in itertools.combinations(range(n), 2):
        m = np.zeros((n, n), dtype=complex)
        m[i, j] = 1j
        m[j, i] = 1j
        mats.append(m)
        labels.append(f"s{i + 1}{j + 1}")
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -float(k)
        d *= np.sqrt(2.0 / (k * (k + 1)))
        mats.append(1j * np.diag(d).astype(complex))
        labels.append(f"d{k}")
    m_h = n * (n - 1) // 2 if embed_so_subalgebra else 0
    name = f"su({n})/so({n})" if embed_so_subalgebra else f"su({n})"
    basis = StructuredBasis(name, mats, labels, subalgebra_dim=m_h)
    basis.pairs = pairs
    return basis


def build_torus_basis(k=2):
    """Abelian surrogate so(2) + ... + so(2): k commuting rotation generators."""
    if k < 1:
        raise InvalidDimensionError(f"torus surrogate needs k >= 1, got {k}")
    mats, labels = [], []
    for b in range(k):
        m = np.zeros((2 * k, 2 * k))
        m[2 * b, 2 * b + 1] = -1.0
        m[2 * b + 1, 2 * b] = 1.0
        mats.append(m)
        labels.append(f"t{b + 1}")
    return StructuredBasis(f"torus({k})", mats, labels)


# -- operations -------------------------------------------------------------------


def bracket(x, y):
    """Lie bracket via the cached structure constants."""
    x.basis.require_same(y.basis)
    c = x.basis.structure_constants
    return AlgebraElement(x.basis, np.einsum("i,j,ijk->k", x.coords, y.coords, c))


def biinv_form(x, y):
    x.basis.require_same(y.basis)
    return float(x.coords @ x.basis.biinv_gram @ y.coords)


def project_h(x):
    """Orthogonal projection P onto the subalgebra h (coordinate slice)."""
    m = x.basis.subalgebra_dim
    if not m:
        raise UnsupportedSplitError(f"{x.basis.name} has no subalgebra split")
    coords = np.zeros_like(x.coords)
    coords[:m] = x.coords[:m]
    return AlgebraElement(x.basis, coords)


def project_h_perp(x):
    """Complementary projection Q = I - P onto h-perp."""
    m = x.basis.subalgebra_dim
    if not m:
        raise UnsupportedSplitError(f"{x.basis.name} has no subalgebra split")
    coords = np.zeros_like(x.coords)
    coords[m:] = x.coords[m:]
    return AlgebraElement(x.basis, coords)


def ad_matrix(x):
    """Matrix of ad_x acting on coordinates: columns are bracket(x, b_j)."""
    return ad_matrix_raw(x.basis, x.coords)


def ad_matrix_raw(basis, coords):
    return np.einsum("i,ijk->kj", coords, basis.structure_constants)


def _is_skew_hermitian(m, tol=1e-12):
    scale = max(1.0, np.abs(m).max())
    return np.abs(m + m.conj().T).max() <= tol * scale


def expm_skew(m):
    """exp of a skew-Hermitian/skew-symmetric matrix by eigendecomposition.

    Falls back to scipy's scaling-and-squaring (Pade 13) for general input.
    """
    if _is_skew_hermitian(m):
        w, v = np.linalg.eigh(1j * np.asarray(m, dtype=complex))
        out = (v * np.exp(-1j * w)) @ v.conj().T
        if np.isrealobj(m):
            return out.real.copy()
        return out
    log.debug("expm_skew: input not skew-Hermitian, using scaling-and-squaring")
    return scipy.linalg.expm(m)


def group_exp(x, t=1.0):
    """Group exponential exp(t x) as a GroupElement."""
    return GroupElement(x.basis, expm_skew(float(t) * x.matrix()))


def Ad_matrix(g):
    """Matrix of Ad_g on coordinates: columns are coords of g b_j g^{-1}."""
    ginv = g.matrix.conj().T
    cols = [
        g.basis.coords_of(g.matrix @ b @ ginv) for b in g.basis.basis_matrices
    ]
    return np.array(cols).T
