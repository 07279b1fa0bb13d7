"""
Objetos quânticos de um dígito em escala matricial: operadores de Weyl,
transformada de Fourier, canais de Kraus e a distribuição P_A associada.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .errors import ResourceLimitError, UsageError
from .gfvec import LinearCode, Word, coefficient_grid, field, solve_syndrome, span_words, word_index
from .typesys import JointDist, fourier_relabel

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

TRACE_PRESERVING_TOL = 1e-10
SPMIXED_MAX_DIM = 16


@dataclass(frozen=True)
class WeylOps:
    """X|j⟩=|j−1⟩, Z|j⟩=ω^j|j⟩ e U = d^{-1/2} Σ ω^{jl}|j⟩⟨l|."""
    d: int
    X: ComplexMatrix
    Z: ComplexMatrix
    U: ComplexMatrix
    omega: complex

    def weyl(self, s: int, t: int) -> ComplexMatrix:
        return np.linalg.matrix_power(self.X, s % self.d) @ np.linalg.matrix_power(self.Z, t % self.d)


@lru_cache(maxsize=None)
def weyl_ops(d: int) -> WeylOps:
    field(d)
    omega = cmath.exp(2j * math.pi / d)
    X = np.roll(np.eye(d, dtype=np.complex128), -1, axis=0)
    Z = np.diag([omega ** j for j in range(d)]).astype(np.complex128)
    j, l = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    U = (omega ** (j * l)) / math.sqrt(d)
    ops = WeylOps(d=d, X=X, Z=Z, U=U.astype(np.complex128), omega=omega)
    for m in (ops.X, ops.Z, ops.U):
        m.setflags(write=False)
    return ops


def weyl_relation_deviations(d: int) -> Tuple[float, float, float]:
    """
    Desvios máximos de XZ = ωZX, UZU† = X e UXU† = Z^{-1}.
    """
    ops = weyl_ops(d)
    X, Z, U = ops.X, ops.Z, ops.U
    commutation = np.abs(X @ Z - ops.omega * Z @ X).max()
    conj_z = np.abs(U @ Z @ U.conj().T - X).max()
    conj_x = np.abs(U @ X @ U.conj().T - np.linalg.inv(Z)).max()
    return float(commutation), float(conj_z), float(conj_x)


def weyl_family_deviation(d: int) -> float:
    """
    Desvio da ortonormalidade de {X^s Z^t / √d} (d² operadores) sob ⟨A,B⟩ = Tr A†B.
    """
    ops = weyl_ops(d)
    family = [ops.weyl(s, t) / math.sqrt(d) for s in range(d) for t in range(d)]
    gram = np.array([[np.trace(a.conj().T @ b) for b in family] for a in family])
    return float(np.abs(gram - np.eye(d * d)).max())


@dataclass(frozen=True)
class KrausChannel:
    """
    Canal CPTP de um dígito dado por matrizes de Kraus A_i (Σ A_i†A_i = I).
    """
    d: int
    kraus_ops: Tuple[ComplexMatrix, ...]

    def __post_init__(self) -> None:
        field(self.d)
        ops = tuple(np.asarray(a, dtype=np.complex128) for a in self.kraus_ops)
        if not ops or any(a.shape != (self.d, self.d) for a in ops):
            raise UsageError(f"Operadores de Kraus precisam ser {self.d}×{self.d}")
        total = sum(a.conj().T @ a for a in ops)
        deviation = float(np.abs(total - np.eye(self.d)).max())
        if deviation > TRACE_PRESERVING_TOL:
            raise UsageError(f"Canal não preserva traço (desvio={deviation:.3g})")
        object.__setattr__(self, "kraus_ops", ops)

    @classmethod
    def from_ops(cls, ops: Sequence[npt.ArrayLike]) -> "KrausChannel":
        first = np.asarray(ops[0])
        return cls(d=int(first.shape[0]), kraus_ops=tuple(np.asarray(a, dtype=np.complex128) for a in ops))

    @classmethod
    def pauli(cls, dist: npt.ArrayLike) -> "KrausChannel":
        """Canal ρ ↦ Σ P(s,t) X^sZ^t ρ (X^sZ^t)†."""
        dist = np.asarray(dist, dtype=np.float64)
        d = dist.shape[0]
        ops = weyl_ops(d)
        kraus = [
            math.sqrt(dist[s, t]) * ops.weyl(s, t)
            for s in range(d)
            for t in range(d)
            if dist[s, t] > 0
        ]
        return cls(d=d, kraus_ops=tuple(kraus))


def channel_to_dist(ch: KrausChannel) -> JointDist:
    """
    P_A(s, t) = Σ_i |d^{-1} Tr A_i† X^s Z^t|².

    Entradas negativas até −1e-12 são zeradas e o resultado é renormalizado.
    """
    ops = weyl_ops(ch.d)
    dist = np.zeros((ch.d, ch.d), dtype=np.float64)
    for s in range(ch.d):
        for t in range(ch.d):
            w = ops.weyl(s, t)
            dist[s, t] = sum(abs(np.trace(a.conj().T @ w) / ch.d) ** 2 for a in ch.kraus_ops)
    if abs(dist.sum() - 1.0) > 1e-10:
        raise UsageError(f"Distribuição do canal soma {dist.sum():.12g}")
    dist = np.clip(dist, 0.0, None)
    return dist / dist.sum()


def fourier_conjugate(ch: KrausChannel) -> KrausChannel:
    """A′ = U⁻¹ A U, operador a operador."""
    U = weyl_ops(ch.d).U
    return KrausChannel(d=ch.d, kraus_ops=tuple(U.conj().T @ a @ U for a in ch.kraus_ops))


def switch3_deviation(ch: KrausChannel) -> float:
    """max |P_{A′}(s,t) − P_A(t,−s)| para A′ = fourier_conjugate(A)."""
    return float(np.abs(channel_to_dist(fourier_conjugate(ch)) - fourier_relabel(channel_to_dist(ch))).max())


def random_kraus_channel(d: int, rank: int, rng: np.random.Generator) -> KrausChannel:
    """Canal aleatório via isometria (decomposição QR de uma matriz gaussiana complexa)."""
    g = rng.normal(size=(rank * d, d)) + 1j * rng.normal(size=(rank * d, d))
    q, _ = np.linalg.qr(g)
    return KrausChannel(d=d, kraus_ops=tuple(q[i * d:(i + 1) * d, :] for i in range(rank)))


def mix_kraus(ch: KrausChannel, rng: np.random.Generator) -> KrausChannel:
    """B_j = Σ_i u_{ji} A_i com u unitária aleatória: o mesmo canal em outra representação."""
    r = len(ch.kraus_ops)
    g = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    u, _ = np.linalg.qr(g)
    mixed = tuple(sum(u[j, i] * ch.kraus_ops[i] for i in range(r)) for j in range(r))
    return KrausChannel(d=ch.d, kraus_ops=mixed)


def spmixed_check(code: LinearCode, x: Word, v: Word) -> float:
    """
    Compara a média sobre z ∈ F^n/C⊥ de |φ_xzv⟩⟨φ_xzv| com a mistura clássica
    |C|⁻¹ Σ_{w∈C} |w+v+x⟩⟨w+v+x|. Retorna o maior desvio entre entradas.
    """
    d, n = code.d, code.n
    dim = d ** n
    if dim > SPMIXED_MAX_DIM:
        raise ResourceLimitError(f"Espaço de estados de dimensão {dim}", SPMIXED_MAX_DIM)
    if not code.is_self_orthogonal():
        raise UsageError("spmixed_check exige C autoortogonal")
    omega = weyl_ops(d).omega
    x = np.asarray(x, dtype=np.int64) % d
    v = np.asarray(v, dtype=np.int64) % d
    codewords = span_words(code.basis, d, n)
    shifted = word_index((codewords + x + v) % d, d)
    size = codewords.shape[0]

    averaged = np.zeros((dim, dim), dtype=np.complex128)
    syndromes = coefficient_grid(d, code.kappa)
    for syn in syndromes:
        z = solve_syndrome(code, syn)
        phi = np.zeros(dim, dtype=np.complex128)
        phases = omega ** ((codewords @ z) % d)
        np.add.at(phi, shifted, phases / math.sqrt(size))
        averaged += np.outer(phi, phi.conj())
    averaged /= syndromes.shape[0]

    mixture = np.zeros((dim, dim), dtype=np.complex128)
    np.add.at(mixture, (shifted, shifted), 1.0 / size)
    deviation = float(np.abs(averaged - mixture).max())
    logger.debug(f"spmixed: d={d}, n={n}, kappa={code.kappa}, deviation={deviation:.3g}")
    return deviation
