"""
Seeded samplers for the property checks. Every sampler keeps its draws a
relative distance ToleranceConfig.SAMPLE_MARGIN away from the singular
sets of the formulas they feed.
"""
import numpy as np

from core.app_config import ToleranceConfig
from mechanics.dynamics import ContactState, KinState, Params, chart_denominator
from mechanics.minkowski import MINKOWSKI, Signature, dot, wedge_norm_sq
from mechanics.variational import ContactJet3, Jet4

_MAX_TRIES = 1000


def project_pirani(s: np.ndarray, u: np.ndarray, g: Signature = MINKOWSKI) -> np.ndarray:
    '''s - (s.u / u.u) u'''
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    return s - dot(s, u, g) / dot(u, u, g) * u


def sample_timelike(rng: np.random.Generator, g: Signature = MINKOWSKI) -> np.ndarray:
    '''Random u with u.u > 0 well inside the cone.'''
    for _ in range(_MAX_TRIES):
        u = np.concatenate([[2.0 + abs(rng.normal())], 0.5 * rng.normal(size=3)])
        u *= rng.uniform(0.5, 2.0)
        if dot(u, u, g) > 0.2 * float(u @ u):
            return u
    raise ValueError(f'could not draw a timelike vector for signature {g.describe()}')


def _spin_ok(s: np.ndarray, u: np.ndarray, g: Signature, margin: float) -> bool:
    s_sq, u_sq = float(s @ s), float(u @ u)
    if abs(dot(s, s, g)) < margin * s_sq:
        return False
    w = wedge_norm_sq(s, u, g)
    return abs(w) >= margin * s_sq * u_sq and np.sign(w) == np.sign(dot(s, s, g))


def sample_pirani_state(rng: np.random.Generator, g: Signature = MINKOWSKI, m: float = 1.0,
                        A: float = 0.0, margin: float = ToleranceConfig.SAMPLE_MARGIN) -> tuple[KinState, Params]:
    '''State with s.u = 0 and s.udot = 0; m0 = m.'''
    for _ in range(_MAX_TRIES):
        x = rng.normal(size=4)
        u = sample_timelike(rng, g)
        a = rng.normal(size=4)
        r = rng.normal(size=4)
        gram = np.array([[dot(u, u, g), dot(u, a, g)], [dot(a, u, g), dot(a, a, g)]])
        if abs(np.linalg.det(gram)) < margin * float(u @ u) * float(a @ a):
            continue
        c = np.linalg.solve(gram, [dot(r, u, g), dot(r, a, g)])
        s = r - c[0] * u - c[1] * a
        if float(s @ s) < margin or not _spin_ok(s, u, g, margin):
            continue
        return KinState(x, u, a), Params(m=m, m0=m, s=s, A=A, g=g)
    raise ValueError('could not draw a Pirani-consistent state')


def sample_lagrangian_state(rng: np.random.Generator, g: Signature = MINKOWSKI, m: float = 1.0,
                            margin: float = ToleranceConfig.SAMPLE_MARGIN) -> tuple[KinState, Params]:
    '''Generic state (no Pirani constraint) inside every chart e_(alpha).'''
    for _ in range(_MAX_TRIES):
        x = rng.normal(size=4)
        u = sample_timelike(rng, g)
        a = rng.normal(size=4)
        s = rng.normal(size=4)
        if not _spin_ok(s, u, g, margin):
            continue
        p = Params(m=m, m0=m, s=s, g=g)
        scale = float(s @ s) * float(u @ u)
        if all(abs(chart_denominator(alpha, u, p)) >= margin * scale for alpha in range(4)):
            return KinState(x, u, a), p
    raise ValueError('could not draw a state inside all charts')


def sample_jet4(rng: np.random.Generator, st: KinState) -> Jet4:
    return Jet4(st.x, st.u, st.a, rng.normal(size=4), rng.normal(size=4))


def _contact_ok(cs: ContactState, margin: float) -> bool:
    S, V, s0 = cs.svec, cs.v, cs.s0
    spin_sq = s0 ** 2 + S @ S
    lorentz_sq = 1.0 + V @ V
    r = S - s0 * V
    bracket = r @ r + np.cross(S, V) @ np.cross(S, V)
    if bracket < margin * spin_sq * lorentz_sq:
        return False
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        k = S - S[i] * e
        z = r - (S[i] - s0 * V[i]) * e
        den = (s0 ** 2 + k @ k) * (z @ z) - (k @ z) ** 2
        if abs(den) < margin * spin_sq ** 2 * lorentz_sq:
            return False
    return True


def sample_contact_state(rng: np.random.Generator,
                         margin: float = ToleranceConfig.SAMPLE_MARGIN) -> ContactState:
    for _ in range(_MAX_TRIES):
        cs = ContactState(
            t=float(rng.normal()),
            xs=rng.normal(size=3),
            v=0.5 * rng.normal(size=3),
            vp=rng.normal(size=3),
            vpp=rng.normal(size=3),
            s0=float(rng.normal()),
            svec=rng.normal(size=3),
        )
        if _contact_ok(cs, margin):
            return cs
    raise ValueError('could not draw a contact state inside all charts')


def sample_contact_jet(rng: np.random.Generator) -> ContactJet3:
    return ContactJet3(
        t=float(rng.normal()),
        x=rng.normal(size=3),
        v1=rng.normal(size=3),
        v2=rng.normal(size=3),
        v3=rng.normal(size=3),
    )


def sample_parametrization(rng: np.random.Generator) -> tuple[float, float, float]:
    """(t', t'', t''') with t' bounded away from zero."""
    return float(rng.uniform(0.5, 2.0)), float(rng.normal()), float(rng.normal())


def sample_dynamics_state(w: float = 0.5, sigma: float = 1.0, A: float = 0.0,
                          m: float = 1.0) -> tuple[KinState, Params]:
    '''
    Rest-frame data u = e0, udot = w e1, s = sigma e3. The velocity norm
    then obeys n n'' - 1.5 n'^2 = C n^4 with C = -2.5 w^2 + 3 A w^(4/3),
    so C < 0 keeps the run free of blow-up.
    '''
    st = KinState(np.zeros(4), np.array([1.0, 0.0, 0.0, 0.0]), np.array([0.0, w, 0.0, 0.0]))
    return st, Params(m=m, m0=m, s=np.array([0.0, 0.0, 0.0, sigma]), A=A)
