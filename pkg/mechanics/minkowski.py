"""
Four-dimensional pseudo-Euclidean tensor algebra.

Vectors are stored by their contravariant components unless tagged
covariant. All operations are pure; arrays handed out are read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Sequence, Union

import numpy as np

from common.enums import Variance
from common.errors import NotLorentz, NotSkew, PiraniViolated, ZeroVelocity
from core.app_config import ToleranceConfig


def _permutation_sign(perm: Sequence[int]) -> int:
    inversions = sum(
        1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j]
    )
    return -1 if inversions % 2 else 1


def _levi_civita_symbol() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in permutations(range(4)):
        eps[perm] = _permutation_sign(perm)
    eps.setflags(write=False)
    return eps


# Symbol with eps[0,1,2,3] = +1; orientation is applied per signature
LEVI_CIVITA = _levi_civita_symbol()


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Signature:
    """Diagonal metric eta^{ab} and the value of eps_{0123}."""
    diag: tuple[int, int, int, int] = (1, -1, -1, -1)
    orientation: int = 1

    def __post_init__(self):
        if len(self.diag) != 4 or any(d not in (1, -1) for d in self.diag):
            raise ValueError(f'signature entries must be +1 or -1, got {self.diag}')
        if self.orientation not in (1, -1):
            raise ValueError(f'orientation must be +1 or -1, got {self.orientation}')
        object.__setattr__(self, 'diag', tuple(int(d) for d in self.diag))

    @cached_property
    def eta(self) -> np.ndarray:
        return _frozen(np.diag(self.diag))

    @cached_property
    def eta_diag(self) -> np.ndarray:
        return _frozen(self.diag)

    @property
    def det(self) -> int:
        return int(np.prod(self.diag))

    @cached_property
    def epsilon_lower(self) -> np.ndarray:
        '''eps_{abcd}'''
        return _frozen(self.orientation * LEVI_CIVITA)

    @cached_property
    def epsilon_upper(self) -> np.ndarray:
        '''eps^{abcd}: all four indices raised with a diagonal metric'''
        return _frozen(self.det * self.orientation * LEVI_CIVITA)

    def describe(self) -> str:
        signs = ''.join('+' if d > 0 else '-' for d in self.diag)
        return f'({signs}) eps_0123={self.orientation:+d}'


MINKOWSKI = Signature()
EUCLIDEAN = Signature(diag=(1, 1, 1, 1))


@dataclass(frozen=True, eq=False)
class FourVector:
    c: np.ndarray
    variance: Variance = Variance.CONTRAVARIANT

    def __post_init__(self):
        arr = np.array(self.c, dtype=float).reshape(-1)
        if arr.shape != (4,):
            raise ValueError(f'four-vector needs 4 components, got {arr.shape[0]}')
        if not np.all(np.isfinite(arr)):
            raise ValueError(f'four-vector components must be finite, got {arr}')
        arr.setflags(write=False)
        object.__setattr__(self, 'c', arr)

    @classmethod
    def contra(cls, values) -> 'FourVector':
        return cls(values, Variance.CONTRAVARIANT)

    @classmethod
    def co(cls, values) -> 'FourVector':
        return cls(values, Variance.COVARIANT)

    def raised(self, g: Signature = MINKOWSKI) -> np.ndarray:
        if self.variance is Variance.CONTRAVARIANT:
            return self.c
        return g.eta_diag * self.c

    def lowered(self, g: Signature = MINKOWSKI) -> np.ndarray:
        if self.variance is Variance.COVARIANT:
            return self.c
        return g.eta_diag * self.c

    def __repr__(self) -> str:
        return f'FourVector({self.c.tolist()}, {self.variance.value})'


VectorLike = Union[FourVector, np.ndarray, Sequence[float]]


def contravariant(v: VectorLike, g: Signature = MINKOWSKI) -> np.ndarray:
    '''Contravariant components; bare arrays are taken as contravariant.'''
    if isinstance(v, FourVector):
        return v.raised(g)
    return np.asarray(v, dtype=float)


def lower(v: VectorLike, g: Signature = MINKOWSKI) -> np.ndarray:
    return g.eta_diag * contravariant(v, g)


_SKEW_INDEX = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


@dataclass(frozen=True, eq=False)
class SkewTensor:
    """
    Rank-2 antisymmetric tensor with upper indices, stored as its six
    independent components (01, 02, 03, 12, 13, 23).
    """
    components: tuple[float, ...] = field(default=(0.0,) * 6)

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if len(comps) != 6:
            raise ValueError(f'skew tensor needs 6 components, got {len(comps)}')
        if not all(np.isfinite(comps)):
            raise ValueError('skew tensor components must be finite')
        object.__setattr__(self, 'components', comps)

    @classmethod
    def from_matrix(cls, m, tol: float = ToleranceConfig.PIRANI_TOL):
        arr = np.asarray(m, dtype=float)
        if arr.shape != (4, 4):
            raise NotSkew(f'expected a 4x4 matrix, got shape {arr.shape}')
        scale = max(1.0, float(np.max(np.abs(arr))))
        asym = float(np.max(np.abs(arr + arr.T)))
        if asym > tol * scale:
            raise NotSkew('matrix is not antisymmetric', max_symmetric_part=asym)
        return cls(tuple(arr[i, j] for i, j in _SKEW_INDEX))

    @classmethod
    def from_pairs(cls, values: dict[tuple[int, int], float]):
        m = np.zeros((4, 4))
        for (i, j), val in values.items():
            if i == j:
                raise NotSkew(f'diagonal entry ({i},{j}) of a skew tensor must vanish')
            m[i, j] = val
            m[j, i] = -val
        return cls.from_matrix(m)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4))
        for (i, j), val in zip(_SKEW_INDEX, self.components):
            m[i, j] = val
            m[j, i] = -val
        m.setflags(write=False)
        return m


class SpinTensor(SkewTensor):
    """Dipole angular momentum S^{ab}."""


def dot(a: VectorLike, b: VectorLike, g: Signature = MINKOWSKI) -> float:
    return float(np.sum(g.eta_diag * contravariant(a, g) * contravariant(b, g)))


def norm_abs(a: VectorLike, g: Signature = MINKOWSKI) -> float:
    return float(np.sqrt(abs(dot(a, a, g))))


def wedge_norm_sq(a: VectorLike, b: VectorLike, g: Signature = MINKOWSKI) -> float:
    '''Signed Gram determinant (a.a)(b.b) - (a.b)^2 of the bivector a^b.'''
    ab = dot(a, b, g)
    return dot(a, a, g) * dot(b, b, g) - ab * ab


def wedge_norm(a: VectorLike, b: VectorLike, g: Signature = MINKOWSKI) -> float:
    return float(np.sqrt(abs(wedge_norm_sq(a, b, g))))


def hodge_triple(a: VectorLike, b: VectorLike, c: VectorLike,
                 g: Signature = MINKOWSKI) -> FourVector:
    '''Covector eps_{abcd} a^b b^c c^d (free index first).'''
    out = np.einsum('abcd,b,c,d->a', g.epsilon_lower,
                    contravariant(a, g), contravariant(b, g), contravariant(c, g))
    return FourVector.co(out)


def hodge_quad(a: VectorLike, b: VectorLike, c: VectorLike, d: VectorLike,
               g: Signature = MINKOWSKI) -> float:
    return float(np.einsum('abcd,a,b,c,d->', g.epsilon_lower,
                           contravariant(a, g), contravariant(b, g),
                           contravariant(c, g), contravariant(d, g)))


def _require_velocity(u: np.ndarray, g: Signature) -> float:
    n = norm_abs(u, g)
    if n <= ToleranceConfig.DEGENERACY_TOL:
        raise ZeroVelocity('velocity has zero Minkowski norm', u=u.tolist())
    return n


def spin_tensor_to_vector(S: SkewTensor, u: VectorLike,
                          g: Signature = MINKOWSKI) -> FourVector:
    '''s_d = 1/(2|u|) eps_{abcd} u^a S^{bc}'''
    u_c = contravariant(u, g)
    n = _require_velocity(u_c, g)
    s = np.einsum('abcd,a,bc->d', g.epsilon_lower, u_c, S.matrix) / (2.0 * n)
    return FourVector.co(s)


def spin_vector_to_tensor(s: VectorLike, u: VectorLike, g: Signature = MINKOWSKI,
                          tol: float = ToleranceConfig.PIRANI_TOL) -> SpinTensor:
    '''
    Inverse of spin_tensor_to_vector on the Pirani surface:
    S^{ab} = k/|u| eps^{abcd} u_c s_d with k = det(eta) sign(u.u).
    '''
    u_c = contravariant(u, g)
    s_c = contravariant(s, g)
    n = _require_velocity(u_c, g)
    su = dot(s_c, u_c, g)
    if abs(su) > tol * max(norm_abs(s_c, g) * n, ToleranceConfig.DEGENERACY_TOL):
        raise PiraniViolated('spin vector is not orthogonal to the velocity', s_dot_u=su)
    k = g.det * np.sign(dot(u_c, u_c, g))
    m = k * np.einsum('abcd,c,d->ab', g.epsilon_upper, lower(u_c, g), lower(s_c, g)) / n
    return SpinTensor.from_matrix(m)


def check_lorentz(matrix, g: Signature = MINKOWSKI,
                  tol: float = ToleranceConfig.LORENTZ_TOL) -> np.ndarray:
    lam = np.asarray(matrix, dtype=float)
    if lam.shape != (4, 4) or not np.all(np.isfinite(lam)):
        raise NotLorentz('expected a finite 4x4 matrix')
    defect = float(np.max(np.abs(lam.T @ g.eta @ lam - g.eta)))
    scale = max(1.0, float(np.max(np.abs(lam))) ** 2)
    if defect > tol * scale:
        raise NotLorentz('matrix does not preserve the metric', defect=defect)
    return lam


def lorentz_apply(lam, v: VectorLike, g: Signature = MINKOWSKI) -> FourVector:
    lam = np.asarray(lam, dtype=float)
    if isinstance(v, FourVector) and v.variance is Variance.COVARIANT:
        # inverse-transpose; for an isometry Lambda^{-1} = eta Lambda^T eta
        inverse = g.eta @ lam.T @ g.eta
        return FourVector.co(inverse.T @ v.c)
    return FourVector.contra(lam @ contravariant(v, g))


def generator_action(omega: SkewTensor, v: VectorLike,
                     g: Signature = MINKOWSKI) -> FourVector:
    '''Infinitesimal transform Omega^{ab} v_a, indexed by b.'''
    return FourVector.contra(np.einsum('ab,a->b', omega.matrix, lower(v, g)))
