"""Qubit states, their complements, and the restricted great-circle families.

The complement of alpha|0>+beta|1> is conj(alpha)|1> - conj(beta)|0>, the
unique state orthogonal to the input up to phase.  Composing the
complement with itself returns the input with a global minus sign, so
the map is an involution on rays, not on vectors.

Each great-circle family pairs a state with a partner on the opposite
side of the circle.  On the polar circle the partner (the minus branch
at the same parameter) coincides with the canonical complement.  On the
equatorial circle the minus branch is also the exact canonical
complement, but the overlap identities and the diagonal phase gate hold
for the antipodal plus-branch state instead, which differs from the
complement by the parameter-dependent phase -e^{-i phi}.  The pair
helpers below therefore hand out (state, partner) with the antipodal
convention; callers that need the literal minus-branch amplitudes can
ask circle_state for them directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import inner_product, state_vector

_CIRCLE_KINDS = ("polar+", "polar-", "equatorial+", "equatorial-")

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Qubit:
    """A single-qubit pure state with validated amplitudes."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValueError("qubit amplitudes must be finite")
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"qubit amplitudes are not normalized (|.|^2 = {norm!r})")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def overlap(self, other: "Qubit") -> complex:
        return inner_product(self.vector, other.vector)


@dataclass(frozen=True)
class BlochAngles:
    """Spherical coordinates: theta in [0, pi], phi in [0, 2 pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise ValueError("angles must be finite")
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta {self.theta!r} outside [0, pi]")
        if not 0.0 <= self.phi < _TWO_PI:
            raise ValueError(f"phi {self.phi!r} outside [0, 2 pi)")


def qubit_from_bloch(angles: BlochAngles) -> Qubit:
    """State with real cos(theta/2) on |0> and phase e^{i phi} on |1>."""
    a = np.cos(angles.theta / 2.0)
    b = np.sin(angles.theta / 2.0) * np.exp(1j * angles.phi)
    return Qubit(complex(a), complex(b))


def complement(q: Qubit) -> Qubit:
    """conj(alpha)|1> - conj(beta)|0>: the orthogonal state."""
    return Qubit(-np.conj(q.beta), np.conj(q.alpha))


def conjugate(q: Qubit) -> Qubit:
    """Componentwise conjugation in the computational basis."""
    return Qubit(np.conj(q.alpha), np.conj(q.beta))


@dataclass(frozen=True)
class GreatCircleFamily:
    """One point on a named great circle of the Bloch sphere.

    kind selects the circle and the sign branch of its literal form.
    Polar parameters live in [0, pi] (each branch covers half the
    circle); equatorial parameters live in [0, 2 pi).
    """

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in _CIRCLE_KINDS:
            raise ValueError(f"unknown circle kind {self.kind!r}; expected one of {_CIRCLE_KINDS}")
        t = self.parameter
        if not np.isfinite(t):
            raise ValueError("circle parameter must be finite")
        if self.kind.startswith("polar"):
            if not 0.0 <= t <= np.pi:
                raise ValueError(f"polar parameter {t!r} outside [0, pi]")
        elif not 0.0 <= t < _TWO_PI:
            raise ValueError(f"equatorial parameter {t!r} outside [0, 2 pi)")


def circle_state(point: GreatCircleFamily) -> Qubit:
    """Literal amplitudes for a great-circle family member.

    The minus branches are the exact canonical complements of the plus
    branches at the same parameter.
    """
    t = point.parameter
    if point.kind == "polar+":
        return Qubit(complex(np.cos(t / 2.0)), complex(np.sin(t / 2.0)))
    if point.kind == "polar-":
        return Qubit(complex(-np.sin(t / 2.0)), complex(np.cos(t / 2.0)))
    s = 1.0 / np.sqrt(2.0)
    if point.kind == "equatorial+":
        return Qubit(complex(s), complex(s * np.exp(1j * t)))
    return Qubit(complex(-s * np.exp(-1j * t)), complex(s))


def polar_pair(theta: float) -> tuple[Qubit, Qubit]:
    """Polar-circle state at theta with its partner on the opposite side.

    The partner is the minus branch at the same parameter, which equals
    both the canonical complement and the plus-branch state at
    theta + pi.
    """
    return (circle_state(GreatCircleFamily("polar+", theta)),
            circle_state(GreatCircleFamily("polar-", theta)))


def equatorial_pair(phi: float) -> tuple[Qubit, Qubit]:
    """Equatorial-circle state at phi with its antipodal partner.

    The partner is the plus-branch state at phi + pi, i.e.
    (|0> - e^{i phi}|1>)/sqrt(2).  It shares a ray with the canonical
    complement but carries the extra phase -e^{-i phi}; the overlap
    identities checked by equatorial_gram hold for this partner and
    fail for the literal complement.
    """
    first = circle_state(GreatCircleFamily("equatorial+", phi))
    partner = circle_state(GreatCircleFamily("equatorial+", (phi + np.pi) % _TWO_PI))
    return (first, partner)


def polar_gram(theta1: float, theta2: float) -> np.ndarray:
    """Overlap matrix of two polar pairs, computed from the vectors.

    Entry [0,0] is <s1|s2>, [0,1] is <s1|p2>, [1,0] is <p1|s2>, and
    [1,1] is <p1|p2>, where p denotes the partner state.  The expected
    pattern has equal diagonal entries and antisymmetric off-diagonal
    entries, all real.
    """
    s1, p1 = polar_pair(theta1)
    s2, p2 = polar_pair(theta2)
    return np.array([[s1.overlap(s2), s1.overlap(p2)],
                     [p1.overlap(s2), p1.overlap(p2)]], dtype=complex)


def equatorial_gram(phi1: float, phi2: float) -> np.ndarray:
    """Overlap matrix of two equatorial pairs, same layout as polar_gram.

    The expected pattern has equal diagonal entries and equal (not
    antisymmetric) off-diagonal entries.
    """
    s1, p1 = equatorial_pair(phi1)
    s2, p2 = equatorial_pair(phi2)
    return np.array([[s1.overlap(s2), s1.overlap(p2)],
                     [p1.overlap(s2), p1.overlap(p2)]], dtype=complex)


def gram_pattern_residual(gram: np.ndarray, pattern: str) -> float:
    """How far a 2x2 overlap matrix is from a family's sign pattern.

    pattern "polar" demands g00 = g11 and g01 = -g10; "equatorial"
    demands g00 = g11 and g01 = g10.  Returns the larger of the two
    absolute mismatches.  Applying one family's pattern to the other
    family's gram matrix yields O(1) residuals, which is the numerical
    content of the restricted-gate consistency argument.
    """
    g = np.asarray(gram, dtype=complex)
    if g.shape != (2, 2):
        raise ValueError(f"expected a 2x2 overlap matrix, got shape {g.shape}")
    diag = abs(g[0, 0] - g[1, 1])
    if pattern == "polar":
        return float(max(diag, abs(g[0, 1] + g[1, 0])))
    if pattern == "equatorial":
        return float(max(diag, abs(g[0, 1] - g[1, 0])))
    raise ValueError(f"unknown pattern {pattern!r}; expected 'polar' or 'equatorial'")


def sample_bloch(n: int, seed: int | None = None,
                 rng: np.random.Generator | None = None) -> list[Qubit]:
    """n states drawn uniformly from the sphere (cos(theta) and phi uniform)."""
    if n <= 0:
        raise ValueError("sample size must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    cos_theta = rng.uniform(-1.0, 1.0, size=n)
    phi = rng.uniform(0.0, _TWO_PI, size=n)
    theta = np.arccos(np.clip(cos_theta, -1.0, 1.0))
    return [qubit_from_bloch(BlochAngles(float(th), float(ph) % _TWO_PI))
            for th, ph in zip(theta, phi)]


@dataclass(frozen=True)
class StateSet:
    """A named collection of (state, partner) pairs used as rule inputs.

    The pairing convention travels with the set: circle sets carry their
    family partners, whole-sphere sets carry canonical complements.
    """

    name: str
    pairs: tuple = field(default_factory=tuple)

    def states(self) -> list[Qubit]:
        return [p[0] for p in self.pairs]

    def partners(self) -> list[Qubit]:
        return [p[1] for p in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)


def polar_set(n: int = 64) -> StateSet:
    """n evenly spaced polar pairs; the pairs cover the full circle."""
    if n < 1:
        raise ValueError("need at least one grid point")
    ts = np.linspace(0.0, np.pi, n, endpoint=False)
    return StateSet("polar", tuple(polar_pair(float(t)) for t in ts))


def equatorial_set(n: int = 64) -> StateSet:
    """n evenly spaced equatorial pairs over one period."""
    if n < 1:
        raise ValueError("need at least one grid point")
    phis = np.linspace(0.0, _TWO_PI, n, endpoint=False)
    return StateSet("equatorial", tuple(equatorial_pair(float(p)) for p in phis))


def bloch_set(n: int = 256, seed: int | None = 42, anchors: bool = True) -> StateSet:
    """Random whole-sphere pairs, partnered by the canonical complement.

    With anchors=True two fixed probe states, |+> and the +y eigenstate,
    are prepended (within the requested n) so sphere-wide audits always
    include equator points with real and with imaginary amplitudes.
    """
    if n < 1:
        raise ValueError("need at least one state")
    states: list[Qubit] = []
    if anchors:
        s = 1.0 / np.sqrt(2.0)
        states = [Qubit(complex(s), complex(s)), Qubit(complex(s), complex(1j * s))][:n]
    remaining = n - len(states)
    if remaining > 0:
        states.extend(sample_bloch(remaining, seed=seed))
    return StateSet("bloch", tuple((q, complement(q)) for q in states))


def listed_set(qubits, name: str = "listed") -> StateSet:
    """Pairs built from explicit states, partnered by the canonical complement."""
    qs = list(qubits)
    if not qs:
        raise ValueError("empty state list")
    for q in qs:
        if not isinstance(q, Qubit):
            raise TypeError(f"expected Qubit, got {type(q).__name__}")
    return StateSet(name, tuple((q, complement(q)) for q in qs))


def ket_notation(v, digits: int = 4) -> str:
    """Human-readable a|0> + b|1> style rendering of a state vector."""
    if isinstance(v, Qubit):
        v = v.vector
    v = state_vector(v, normalized=False)
    n = int(np.log2(v.size)) if v.size > 1 else 1
    terms = []
    for idx, amp in enumerate(v):
        if abs(amp) <= 10.0 ** (-digits - 2):
            continue
        label = format(idx, f"0{n}b")
        re, im = round(amp.real, digits), round(amp.imag, digits)
        if abs(im) <= 10.0 ** (-digits):
            coef = f"{re:+g}"
        elif abs(re) <= 10.0 ** (-digits):
            coef = f"{im:+g}i"
        else:
            coef = f"+({re:g}{im:+g}i)"
        terms.append(f"{coef}|{label}>")
    return " ".join(terms) if terms else "0"
