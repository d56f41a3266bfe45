"""Operator algebra on the two-atom + cavity tensor-product space and a
Lindblad master-equation integrator.

Conventions used throughout the package:

* basis order is atom i (x) atom j (x) cavity Fock, with per-atom levels
  ``("sink", "b", "r", "a")`` by default;
* all energies/rates are dimensionless (units of the common coupling g_r),
  time is measured in g_r^-1;
* atomic decay is routed to the explicit ``sink`` level so that the total
  trace is conserved and lost population remains an observable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels


class BasisMismatchError(ValueError):
    """Operators/states defined on different BasisSpecs were combined."""


class NonHermitianError(ValueError):
    """A Hermitian matrix was required but not supplied."""


class InvalidStateError(ValueError):
    """A density matrix violated its invariants (trace/Hermiticity/positivity)."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed (step underflow or step budget exhausted)."""


DEFAULT_LEVELS = ("sink", "b", "r", "a")

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class BasisSpec:
    """Labeled tensor-product basis: two identical atoms and one cavity mode."""

    atom_levels: tuple[str, ...] = DEFAULT_LEVELS
    n_max: int = 2

    def __post_init__(self):
        if len(set(self.atom_levels)) != len(self.atom_levels):
            raise ValueError(f"duplicate atom level labels: {self.atom_levels}")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def n_levels(self) -> int:
        return len(self.atom_levels)

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.n_levels**2 * self.n_fock

    def level_index(self, label: str) -> int:
        try:
            return self.atom_levels.index(label)
        except ValueError:
            raise KeyError(f"unknown atom level {label!r}; have {self.atom_levels}") from None

    def index(self, mu: str, nu: str, n: int) -> int:
        """Flat index of the product state |mu_i, nu_j, n_c>."""
        if not 0 <= n <= self.n_max:
            raise IndexError(f"Fock index {n} outside [0, {self.n_max}]")
        return (self.level_index(mu) * self.n_levels + self.level_index(nu)) * self.n_fock + n

    def labels(self) -> list[tuple[str, str, int]]:
        return [
            (mu, nu, n)
            for mu in self.atom_levels
            for nu in self.atom_levels
            for n in range(self.n_fock)
        ]


def _as_matrix(data, dim_hint=None) -> np.ndarray:
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if dim_hint is not None and m.shape[0] != dim_hint:
        raise BasisMismatchError(f"matrix dim {m.shape[0]} does not match basis dim {dim_hint}")
    return m


@dataclass
class Operator:
    """Dense operator carrying its basis labels (entries in units of g_r)."""

    basis: BasisSpec
    data: np.ndarray

    def __post_init__(self):
        self.data = _as_matrix(self.data, self.basis.dim)

    def dag(self) -> "Operator":
        return Operator(self.basis, self.data.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return float(np.abs(self.data - self.data.conj().T).max()) <= tol

    def require_hermitian(self, tol: float = HERMITICITY_TOL) -> None:
        dev = float(np.abs(self.data - self.data.conj().T).max())
        if dev > tol:
            raise NonHermitianError(f"max |H - H^dag| = {dev:.3e} exceeds {tol:.1e}")

    def expect(self, rho: "DensityMatrix") -> complex:
        self._check_basis(rho.basis)
        return complex(np.einsum("ij,ji->", self.data, rho.data))

    def _check_basis(self, other: BasisSpec) -> None:
        if other != self.basis:
            raise BasisMismatchError("operators/states live on different bases")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_basis(other.basis)
        return Operator(self.basis, self.data + other.data)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_basis(other.basis)
        return Operator(self.basis, self.data - other.data)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.basis, self.data * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_basis(other.basis)
        return Operator(self.basis, self.data @ other.data)


@dataclass
class DensityMatrix:
    """Trajectory state; Hermitian, unit trace, positive semidefinite."""

    basis: BasisSpec
    data: np.ndarray

    def __post_init__(self):
        self.data = _as_matrix(self.data, self.basis.dim)

    @classmethod
    def from_ket(cls, basis: BasisSpec, ket) -> "DensityMatrix":
        v = np.asarray(ket, dtype=np.complex128).ravel()
        if v.size != basis.dim:
            raise BasisMismatchError(f"ket length {v.size} != basis dim {basis.dim}")
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise InvalidStateError("cannot normalize the zero ket")
        v = v / nrm
        return cls(basis, np.outer(v, v.conj()))

    @classmethod
    def pure(cls, basis: BasisSpec, mu: str, nu: str, n: int) -> "DensityMatrix":
        v = np.zeros(basis.dim, dtype=np.complex128)
        v[basis.index(mu, nu, n)] = 1.0
        return cls(basis, np.outer(v, v.conj()))

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.data, self.data).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))[0])

    def validate(
        self,
        herm_tol: float = 1e-10,
        trace_tol: float = TRACE_TOL,
        eig_tol: float = POSITIVITY_TOL,
    ) -> None:
        dev = float(np.abs(self.data - self.data.conj().T).max())
        if dev > herm_tol:
            raise InvalidStateError(f"density matrix not Hermitian: max dev {dev:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise InvalidStateError(f"trace {tr!r} deviates from 1 by more than {trace_tol:.1e}")
        lo = self.min_eigenvalue()
        if lo < -eig_tol:
            raise InvalidStateError(f"min eigenvalue {lo:.3e} below -{eig_tol:.1e}")


# ---------------------------------------------------------------------------
# elementary operator builders

def fock_destroy(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(np.complex128)


def fock_create(n_max: int) -> np.ndarray:
    return fock_destroy(n_max).conj().T


def atom_sigma(basis: BasisSpec, mu: str, nu: str) -> np.ndarray:
    """Single-atom |mu><nu| on the per-atom level space."""
    m = np.zeros((basis.n_levels, basis.n_levels), dtype=np.complex128)
    m[basis.level_index(mu), basis.level_index(nu)] = 1.0
    return m


def kron3(a_i, a_j, a_c, basis: BasisSpec) -> Operator:
    """Tensor product in the fixed order atom i (x) atom j (x) cavity."""
    a_i = np.asarray(a_i, dtype=np.complex128)
    a_j = np.asarray(a_j, dtype=np.complex128)
    a_c = np.asarray(a_c, dtype=np.complex128)
    na, nc = basis.n_levels, basis.n_fock
    for name, m, d in (("a_i", a_i, na), ("a_j", a_j, na), ("a_c", a_c, nc)):
        if m.shape != (d, d):
            raise BasisMismatchError(f"{name} has shape {m.shape}, expected ({d}, {d})")
    return Operator(basis, np.kron(np.kron(a_i, a_j), a_c))


def sigma_op(basis: BasisSpec, mu: str, nu: str, atom: int) -> Operator:
    """Transition operator sigma_{mu nu} = |mu><nu| acting on atom 0 (i) or 1 (j)."""
    s = atom_sigma(basis, mu, nu)
    eye_a = np.eye(basis.n_levels)
    eye_c = np.eye(basis.n_fock)
    if atom == 0:
        return kron3(s, eye_a, eye_c, basis)
    if atom == 1:
        return kron3(eye_a, s, eye_c, basis)
    raise ValueError("atom must be 0 (i) or 1 (j)")


def cavity_destroy(basis: BasisSpec) -> Operator:
    eye_a = np.eye(basis.n_levels)
    return kron3(eye_a, eye_a, fock_destroy(basis.n_max), basis)


def identity(basis: BasisSpec) -> Operator:
    return Operator(basis, np.eye(basis.dim, dtype=np.complex128))


def atom_pair_projector(basis: BasisSpec, mu: str, nu: str) -> Operator:
    """Projector onto |mu_i, nu_j> traced over the cavity (i.e. (x) identity)."""
    return kron3(atom_sigma(basis, mu, mu), atom_sigma(basis, nu, nu),
                 np.eye(basis.n_fock), basis)


# ---------------------------------------------------------------------------
# Lindblad RHS and spectra

def lindblad_rhs(H: Operator, collapse: Sequence[Operator], rho: DensityMatrix) -> np.ndarray:
    """-i[H, rho] + sum_k (L_k rho L_k^H - 1/2 {L_k^H L_k, rho})."""
    H._check_basis(rho.basis)
    r = rho.data
    out = -1j * (H.data @ r - r @ H.data)
    for L in collapse:
        L._check_basis(rho.basis)
        m = L.data
        md = m.conj().T
        mm = md @ m
        out += m @ r @ md - 0.5 * (mm @ r + r @ mm)
    return out


def eig_hermitian(op: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of a Hermitian operator."""
    op.require_hermitian()
    w, v = np.linalg.eigh(op.data)
    return w, v


# ---------------------------------------------------------------------------
# time evolution

@dataclass
class IntegratorOpts:
    """Integration controls.

    method "rk45": adaptive Dormand-Prince 5(4), controlled by rel_tol/abs_tol,
    sampled on a uniform n_samples grid over [0, t_max].
    method "rk4": classic fixed step dt, sampling every `sample_stride` steps
    (t_max is rounded to the nearest step multiple).
    """

    t_max: float = 1.0
    method: str = "rk45"
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    n_samples: int = 401
    dt: float | None = None
    sample_stride: int = 1
    store_states: bool = False
    max_steps: int = 50_000_000

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"unknown method {self.method!r}; use 'rk45' or 'rk4'")
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")
        if self.method == "rk45":
            if self.rel_tol <= 0 or self.abs_tol <= 0:
                raise ValueError("tolerances must be > 0")
            if self.n_samples < 1:
                raise ValueError("n_samples must be >= 1")
        else:
            if self.dt is None or self.dt <= 0:
                raise ValueError("fixed-step rk4 requires dt > 0")
            if self.sample_stride < 1:
                raise ValueError("sample_stride must be >= 1")


@dataclass
class Trajectory:
    """Sampled evolution: time grid, expectation values and scalar diagnostics.

    min_eig tracks the smallest eigenvalue of rho at each sample (evaluated
    on the reachable subspace; eigenvalues outside it are exactly zero), the
    positivity witness.
    """

    t: np.ndarray
    expect: dict[str, np.ndarray]
    trace: np.ndarray
    purity: np.ndarray
    min_eig: np.ndarray
    final_state: DensityMatrix
    states: np.ndarray | None = None
    n_steps: int = 0
    n_accepted: int = 0
    method: str = "rk45"
    reduced_dim: int = 0


def reachable_subspace(
    rho0: np.ndarray, generators: Sequence[np.ndarray], tol: float = 0.0
) -> np.ndarray:
    """Indices of basis states reachable from supp(rho0) under the generators.

    The sparsity patterns of H and the collapse operators define a directed
    graph on basis states; the evolution never populates states outside the
    closure of the initial support.  Restricting to it is exact and cuts the
    Fig.-2 runs from dimension 48 to 25.
    """
    dim = rho0.shape[0]
    seeds = np.flatnonzero(np.abs(rho0).sum(axis=1) > tol)
    adj: list[set[int]] = [set() for _ in range(dim)]
    for g in generators:
        rr, cc = np.nonzero(np.abs(g) > tol)
        for i, j in zip(rr.tolist(), cc.tolist()):
            adj[j].add(i)
    seen = np.zeros(dim, dtype=bool)
    seen[seeds] = True
    frontier = seeds.tolist()
    while frontier:
        nxt = []
        for j in frontier:
            for i in adj[j]:
                if not seen[i]:
                    seen[i] = True
                    nxt.append(i)
        frontier = nxt
    return np.flatnonzero(seen)


def evolve(
    rho0: DensityMatrix,
    H: Operator,
    collapse: Sequence[Operator],
    opts: IntegratorOpts,
    observables: Mapping[str, Operator] | None = None,
    reduce_space: bool = True,
) -> Trajectory:
    """Integrate the Lindblad master equation and sample observables.

    Expectation values are tr[O rho(t)]; non-Hermitian O are allowed (used to
    read out coherences), so the stored series are complex.
    """
    H._check_basis(rho0.basis)
    H.require_hermitian()
    observables = dict(observables or {})
    for name, op in observables.items():
        op._check_basis(rho0.basis)

    dim = rho0.basis.dim
    Ls = [L.data for L in collapse]
    for L in collapse:
        L._check_basis(rho0.basis)
    Ssum = sum((L.conj().T @ L for L in Ls), np.zeros((dim, dim), dtype=np.complex128))

    if reduce_space:
        idx = reachable_subspace(rho0.data, [H.data, Ssum, *Ls])
    else:
        idx = np.arange(dim)
    sel = np.ix_(idx, idx)
    Hr = np.ascontiguousarray(H.data[sel])
    Lr = [np.ascontiguousarray(L[sel]) for L in Ls]
    Sr = sum((L.conj().T @ L for L in Lr), np.zeros((len(idx), len(idx)), dtype=np.complex128))
    K = np.ascontiguousarray(-1j * Hr - 0.5 * Sr)
    rho_r = np.ascontiguousarray(rho0.data[sel])
    lrow, lcol, lval, lptr = _kernels.pack_collapse(Lr)

    if opts.method == "rk45":
        ts = np.linspace(0.0, opts.t_max, opts.n_samples)
        samples, n_steps, n_acc, status = _kernels.rk45_lindblad(
            K, lrow, lcol, lval, lptr, rho_r, ts, opts.rel_tol, opts.abs_tol, opts.max_steps
        )
    else:
        step = opts.dt * opts.sample_stride
        n_samples = int(round(opts.t_max / step)) + 1 if opts.t_max > 0 else 1
        ts = np.arange(n_samples) * step
        samples, n_steps, n_acc, status = _kernels.rk4_lindblad(
            K, lrow, lcol, lval, lptr, rho_r, opts.dt, opts.sample_stride, n_samples
        )

    if status == _kernels.STATUS_UNDERFLOW:
        raise IntegrationError(
            "adaptive step size underflow; the problem looks stiff or mis-scaled "
            "(check detunings/decay rates and tolerances)"
        )
    if status == _kernels.STATUS_STEP_BUDGET:
        raise IntegrationError(f"step budget exhausted ({opts.max_steps} steps)")

    expect = {
        name: np.einsum("ij,sji->s", op.data[sel], samples)
        for name, op in observables.items()
    }
    trace = np.einsum("sii->s", samples).real
    purity = np.einsum("sij,sji->s", samples, samples).real
    min_eig = np.array(
        [np.linalg.eigvalsh(0.5 * (s + s.conj().T))[0].real for s in samples]
    )

    rho_final = np.zeros((dim, dim), dtype=np.complex128)
    rho_final[sel] = samples[-1]
    states = None
    if opts.store_states:
        states = np.zeros((len(ts), dim, dim), dtype=np.complex128)
        states[:, idx[:, None], idx[None, :]] = samples

    return Trajectory(
        t=ts,
        expect=expect,
        trace=trace,
        purity=purity,
        min_eig=min_eig,
        final_state=DensityMatrix(rho0.basis, rho_final),
        states=states,
        n_steps=int(n_steps),
        n_accepted=int(n_acc),
        method=opts.method,
        reduced_dim=int(len(idx)),
    )
