"""Six-vertex chain, chiral Potts row transfer matrices, the evolution operator and partition functions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core_algebra import MAX_DIM, DenseOperator, RootContext, clock_shift, embed, relative_residual
from .curve import CurvePoint
from .errors import DimensionCapError, NonGenericError
from .weights import F_scalar, weight_tables


def six_vertex_r(lam: complex, q: complex) -> DenseOperator:
    R = np.zeros((4, 4), dtype=complex)
    R[0, 0] = R[3, 3] = lam * q - 1 / (lam * q)
    R[1, 1] = R[2, 2] = lam - 1 / lam
    R[1, 2] = R[2, 1] = q - 1 / q
    return DenseOperator(R)


# permutation of the three 2-dim factors exchanging spaces 2 and 3
_P23 = np.eye(8)[[0, 2, 1, 3, 4, 6, 5, 7]]


def ybe_a_residual(lam: complex, mu: complex, q: complex) -> float:
    I2 = DenseOperator.identity(2)
    R12 = six_vertex_r(lam, q).kron(I2)
    R13 = DenseOperator(_P23 @ six_vertex_r(lam * mu, q).kron(I2).mat @ _P23)
    R23 = I2.kron(six_vertex_r(mu, q))
    return relative_residual(R12 @ R13 @ R23, R23 @ R13 @ R12)


def weyl_site_dimension(ctx: RootContext) -> int:
    """Smallest dimension carrying U V = q0 V U: the multiplicative order of q0."""
    return ctx.N if ctx.N % 2 else 2 * ctx.N


def weyl_pair(ctx: RootContext, cu: complex = 1.0, cv: complex = 1.0) -> tuple[DenseOperator, DenseOperator]:
    """Scaled clock/shift pair with U V = q0 V U."""
    d = weyl_site_dimension(ctx)
    z = np.exp(2j * np.pi / d)
    m = int(round((np.angle(ctx.q0) / (2 * np.pi)) * d)) % d
    U = np.diag(z ** (m * np.arange(d)))
    V = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    return DenseOperator(cu * U), DenseOperator(cv * V)


def weyl_residual(U: DenseOperator, V: DenseOperator, q: complex) -> float:
    return relative_residual(U @ V, q * (V @ U))


def l_operator(lam: complex, U: DenseOperator, V: DenseOperator) -> DenseOperator:
    """L(lambda) = [[U, -lambda V], [lambda V^-1, U^-1]] with the auxiliary index outermost."""
    try:
        Ui, Vi = U.inv(), V.inv()
    except np.linalg.LinAlgError as exc:
        raise NonGenericError("U and V must be invertible") from exc
    return DenseOperator(np.block([[U.mat, -lam * V.mat], [lam * Vi.mat, Ui.mat]]))


def _l_on_aux(Lm: DenseOperator, which: int, d: int) -> DenseOperator:
    """Place an (aux x quantum) L-operator into aux1 x aux2 x quantum, acting on aux ``which``."""
    blocks = Lm.mat.reshape(2, d, 2, d)
    full = np.zeros((2, 2, d, 2, 2, d), dtype=complex)
    for o in range(2):
        if which == 1:
            full[:, o, :, :, o, :] = blocks
        else:
            full[o, :, :, o, :, :] = blocks
    return DenseOperator(full.reshape(4 * d, 4 * d))


def ybe_b_residual(lam: complex, mu: complex, q: complex, U: DenseOperator, V: DenseOperator) -> float:
    d = U.dim
    R12 = six_vertex_r(lam, q).kron(DenseOperator.identity(d))
    L1 = _l_on_aux(l_operator(lam * mu, U, V), 1, d)
    L2 = _l_on_aux(l_operator(mu, U, V), 2, d)
    return relative_residual(R12 @ L1 @ L2, L2 @ L1 @ R12)


@dataclass(frozen=True)
class SixVertexChain:
    L: int
    kappa: complex
    site_reps: tuple  # 2L pairs (U, V)

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("L must be >= 2")
        if len(self.site_reps) != 2 * self.L:
            raise ValueError("need 2L site representations")
        d = self.site_reps[0][0].dim
        if d ** (2 * self.L) > MAX_DIM:
            raise DimensionCapError(f"chain dimension {d}^{2 * self.L} exceeds cap {MAX_DIM}")

    @property
    def site_dim(self) -> int:
        return self.site_reps[0][0].dim

    def combinations(self) -> list[DenseOperator]:
        """w_n = U_n V_n^-1 U_{n+1} V_{n+1} on the two-site space (n+1 taken cyclically)."""
        out = []
        for n in range(2 * self.L):
            U0, V0 = self.site_reps[n]
            U1, V1 = self.site_reps[(n + 1) % (2 * self.L)]
            out.append((U0 @ V0.inv()).kron(U1 @ V1))
        return out


def random_chain(ctx: RootContext, L: int, kappa: complex, rng: np.random.Generator) -> SixVertexChain:
    reps = []
    for _ in range(2 * L):
        cu, cv = rng.normal(size=2) + 1j * rng.normal(size=2)
        reps.append(weyl_pair(ctx, cu, cv))
    return SixVertexChain(L, kappa, tuple(reps))


def chain_transfer(chain: SixVertexChain, lam: complex) -> DenseOperator:
    """t(lambda): auxiliary trace of L_0(lambda kappa) L_1(lambda/kappa) ... L_{2L-1}(lambda/kappa).

    The product is grown site by site as a 2x2 array of Kronecker factors, so
    full-size matrices appear only in the last step.
    """
    A = None
    for i, (U, V) in enumerate(chain.site_reps):
        spec = lam * chain.kappa if i % 2 == 0 else lam / chain.kappa
        blk = [[U.mat, -spec * V.mat], [spec * V.inv().mat, U.inv().mat]]
        if A is None:
            A = blk
        elif i < len(chain.site_reps) - 1:
            A = [[np.kron(A[a][0], blk[0][b]) + np.kron(A[a][1], blk[1][b]) for b in range(2)] for a in range(2)]
        else:
            return DenseOperator(sum(np.kron(A[a][c], blk[c][a]) for a in range(2) for c in range(2)))
    raise AssertionError("chain has at least four sites")


def gauge_transform(chain: SixVertexChain, c, d) -> SixVertexChain:
    """Rescale U_n -> c_n U_n, V_n -> d_n V_n."""
    reps = tuple((c[i] * U, d[i] * V) for i, (U, V) in enumerate(chain.site_reps))
    return SixVertexChain(chain.L, chain.kappa, reps)


def w_preserving_scalings(n: int, rng: np.random.Generator) -> tuple[list, list]:
    """Scalings with c_n c_{n+1} d_{n+1} / d_n = 1 for every n (cyclically)."""
    c = [complex(*rng.normal(size=2)) for _ in range(n - 1)]
    c.append(1 / math.prod(c))
    d = [complex(*rng.normal(size=2))]
    for i in range(n - 1):
        d.append(d[i] / (c[i] * c[i + 1]))
    return c, d


def gauge_invariance_residual(chain: SixVertexChain, chain2: SixVertexChain, lam: complex) -> float:
    return relative_residual(chain_transfer(chain, lam), chain_transfer(chain2, lam))


def combinations_residual(chain: SixVertexChain, chain2: SixVertexChain) -> float:
    return max(relative_residual(a, b) for a, b in zip(chain.combinations(), chain2.combinations()))


def _configs(N: int, L: int) -> np.ndarray:
    """All N^L spin rows, lexicographic (first site most significant, matching kron order)."""
    return np.array(list(itertools.product(range(N), repeat=L)), dtype=np.int64).reshape(N**L, L)


def _check_cap(N: int, L: int):
    if N**L > MAX_DIM:
        raise DimensionCapError(f"N^L = {N**L} exceeds cap {MAX_DIM}")


def row_transfer(p: CurvePoint, p_prime: CurvePoint, q: CurvePoint, L: int, ctx: RootContext):
    """(T, That) with alternating vertical rapidities p, p' and periodic rows."""
    N = ctx.N
    _check_cap(N, L)
    t_pq = weight_tables(p, q, ctx)
    t_ppq = weight_tables(p_prime, q, ctx)
    S = _configs(N, L)
    D = N**L
    T = np.ones((D, D), dtype=complex)
    That = np.ones((D, D), dtype=complex)
    for J in range(L):
        Jn = (J + 1) % L
        T *= t_pq.w(S[:, None, J] - S[None, :, J]) * t_ppq.wbar(S[:, None, Jn] - S[None, :, J])
        That *= t_pq.wbar(S[:, None, J] - S[None, :, J]) * t_ppq.w(S[:, None, J] - S[None, :, Jn])
    return DenseOperator(T), DenseOperator(That)


def u_quant(p: CurvePoint, q: CurvePoint, L: int, ctx: RootContext, table=None) -> DenseOperator:
    """Evolution operator from its matrix elements prod Wbar(a_n - b_n) prod W(b_{n+1} - b_n)."""
    N = ctx.N
    _check_cap(N, L)
    if table is None:
        table = weight_tables(p, q, ctx)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    circ = table.Wbar[idx]
    U = np.ones((1, 1), dtype=complex)
    for _ in range(L):
        U = np.kron(U, circ)
    S = _configs(N, L)
    diag = np.prod(table.w(np.roll(S, -1, axis=1) - S), axis=1)
    U *= diag[None, :]
    return DenseOperator(U)


def u_quant_operator_form(p: CurvePoint, q: CurvePoint, L: int, ctx: RootContext) -> DenseOperator:
    """prod_n Fbar(p,q;X_n) prod_n F(p,q;Z_n^-1 Z_{n+1}) from embedded site operators.

    F is evaluated through its Fourier polynomial on the spectrum of Z_n^-1 Z_{n+1}.
    """
    N = ctx.N
    _check_cap(N, L)
    table = weight_tables(p, q, ctx)
    Z, X = clock_shift(ctx)
    D = N**L
    out = DenseOperator.identity(D)
    Fbar_site = DenseOperator(sum(table.Wbar[k] * X.power(k).mat for k in range(N)))
    for n in range(L):
        out = out @ embed(Fbar_site, n, L)
    Zinv = Z.inv()
    for n in range(L):
        pair = embed(Zinv, n, L) @ embed(Z, (n + 1) % L, L)
        spectrum = np.diag(pair.mat)
        out = out @ DenseOperator.diag([F_scalar(table, y, ctx) for y in spectrum])
    return out


def partition_trace(op: DenseOperator, M: int) -> complex:
    if M < 1:
        raise ValueError("M must be >= 1")
    if M == 1:
        return op.trace()
    return complex(np.trace(np.linalg.matrix_power(op.mat, M)))


@dataclass(frozen=True)
class SpinLattice:
    L: int
    M: int
    N: int

    def __post_init__(self):
        if self.L < 1 or self.M < 1 or self.N < 1:
            raise ValueError("L, M, N must be positive")
        if self.N**self.L > MAX_DIM:
            raise DimensionCapError(f"N^L = {self.N**self.L} exceeds cap {MAX_DIM}")


BRUTE_FORCE_CAP = 2**16
_CHUNK = 4096


def brute_force_partition(lattice: SpinLattice, p: CurvePoint, q: CurvePoint, ctx: RootContext | None = None) -> complex:
    """Sum of the weight product over all N^{LM} periodic spin configurations."""
    from .core_algebra import make_root_context

    N, L, M = lattice.N, lattice.L, lattice.M
    if N ** (L * M) > BRUTE_FORCE_CAP:
        raise DimensionCapError(f"N^(LM) = {N ** (L * M)} exceeds brute-force cap {BRUTE_FORCE_CAP}")
    if ctx is None:
        ctx = make_root_context(N)
    table = weight_tables(p, q, ctx)
    total = 0j
    n_conf = N ** (L * M)
    powers = N ** np.arange(L * M - 1, -1, -1, dtype=np.int64)
    for start in range(0, n_conf, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, n_conf), dtype=np.int64)
        spins = ((codes[:, None] // powers[None, :]) % N).reshape(-1, M, L)
        a = spins
        b = np.roll(spins, -1, axis=1)  # next row, periodic in time
        w = np.prod(table.wbar(a - b), axis=(1, 2)) * np.prod(table.w(np.roll(b, -1, axis=2) - b), axis=(1, 2))
        total += complex(w.sum())
    return total
