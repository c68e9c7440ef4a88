"""Machine extensions, impossibility audits, and witness search.

A candidate machine is pinned down by what it does to the two basis
inputs; the extension clause (linear, antilinear, or a weighted hybrid
of both) then determines its action on every superposition.  Comparing
that extended action with the ideal target for each input state, or
comparing required output overlaps with input overlaps, turns the
impossibility arguments into numbers: a violation of zero means the
demanded behaviour is consistent, anything above tolerance is a
certificate that no machine of the declared class can do the job.

Violation metrics are global-phase tolerant throughout: state targets
use 1 - |<ideal|actual>|^2, overlap audits use the absolute difference
between required-output and input inner products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ATOL_STATE,
    ATOL_VERDICT,
    GeneralKMap,
    complement_map,
    conjugation,
    haar_unitaries,
    inner_product,
    state_vector,
    tensor,
)
from .states import Qubit, StateSet, complement, polar_pair, sample_bloch

_EXTENSIONS = ("linear", "antilinear", "hybrid")

_MACHINE_KIND = "clone-like"
_GATE_KINDS = ("hadamard9", "hadamard10", "unequal", "cnot")

# trivial one-dimensional ancilla factor
_SCALAR = np.ones(1, dtype=complex)


def _ancilla(value) -> np.ndarray:
    if value is None:
        return _SCALAR.copy()
    return state_vector(value)


@dataclass(frozen=True, eq=False)
class MachineSpec:
    """A candidate machine, defined by its outputs on basis inputs.

    out0 and out1 are the full register outputs for inputs |0> and |1>
    (system, transformed copy, ancilla).  They must be normalized and
    mutually orthogonal: the machine is meant to be isometric, and an
    isometry maps orthogonal inputs to orthogonal outputs.

    The hybrid extension needs more than the two outputs: it is built
    from the unitary and antiunitary parts stored in kmap and from the
    per-branch ancilla states, so hybrid machines must carry a kmap.
    """

    out0: np.ndarray
    out1: np.ndarray
    blank: np.ndarray | None = None
    ancilla_init: np.ndarray | None = None
    extension: str = "linear"
    kmap: GeneralKMap | None = None
    ancilla0: np.ndarray | None = None
    ancilla1: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "out0", state_vector(self.out0))
        object.__setattr__(self, "out1", state_vector(self.out1))
        if self.out0.size != self.out1.size:
            raise ValueError("basis outputs live in different dimensions")
        if abs(inner_product(self.out0, self.out1)) > ATOL_VERDICT:
            raise ValueError("basis outputs are not orthogonal; the machine cannot be isometric")
        blank = self.blank if self.blank is not None else np.array([1.0, 0.0], dtype=complex)
        object.__setattr__(self, "blank", state_vector(blank))
        if self.blank.size != 2:
            raise ValueError("the blank register is a single qubit")
        object.__setattr__(self, "ancilla_init", _ancilla(self.ancilla_init))
        object.__setattr__(self, "ancilla0", _ancilla(self.ancilla0))
        object.__setattr__(self, "ancilla1", _ancilla(self.ancilla1))
        if self.ancilla0.size != self.ancilla1.size:
            raise ValueError("branch ancilla states live in different dimensions")
        if self.extension not in _EXTENSIONS:
            raise ValueError(f"unknown extension {self.extension!r}; expected one of {_EXTENSIONS}")
        if self.extension == "hybrid" and self.kmap is None:
            raise ValueError("hybrid machines need a kmap with the unitary and antiunitary parts")

    @property
    def ancilla_dim(self) -> int:
        return self.out0.size // 4


def cloning_machine(extension: str = "linear", ancilla0=None, ancilla1=None) -> MachineSpec:
    """Machine copying each basis state: |i> -> |i>|i>, ancilla tags free."""
    a0, a1 = _ancilla(ancilla0), _ancilla(ancilla1)
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    return MachineSpec(out0=tensor(e0, e0, a0), out1=tensor(e1, e1, a1),
                       extension=extension, ancilla0=a0, ancilla1=a1)


def complementing_machine(extension: str = "antilinear", ancilla0=None, ancilla1=None) -> MachineSpec:
    """Machine attaching the orthogonal state: |0> -> |0>|1>, |1> -> -|1>|0>."""
    a0, a1 = _ancilla(ancilla0), _ancilla(ancilla1)
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    f0 = complement(Qubit(1.0, 0.0)).vector
    f1 = complement(Qubit(0.0, 1.0)).vector
    return MachineSpec(out0=tensor(e0, f0, a0), out1=tensor(e1, f1, a1),
                       extension=extension, ancilla0=a0, ancilla1=a1)


def conjugating_machine(extension: str = "antilinear", ancilla0=None, ancilla1=None) -> MachineSpec:
    """Machine attaching the conjugate; on basis states it copies."""
    a0, a1 = _ancilla(ancilla0), _ancilla(ancilla1)
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    return MachineSpec(out0=tensor(e0, e0.conj(), a0), out1=tensor(e1, e1.conj(), a1),
                       extension=extension, ancilla0=a0, ancilla1=a1)


def hybrid_machine(lam: float, unitary=None, antiunitary=None,
                   ancilla0=None, ancilla1=None) -> MachineSpec:
    """Machine whose basis action is |i> -> |i> (x) K|i> (x) |Q_i|.

    K mixes the unitary and antiunitary parts with weight lam.  The
    parts must act orthogonally on each basis state (the defaults,
    identity and the complement flip, do) so the basis outputs stay
    normalized.
    """
    kmap = GeneralKMap(lam, unitary, antiunitary)
    a0, a1 = _ancilla(ancilla0), _ancilla(ancilla1)
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    k0, k1 = kmap(e0), kmap(e1)
    if abs(np.linalg.norm(k0) - 1.0) > ATOL_VERDICT or abs(np.linalg.norm(k1) - 1.0) > ATOL_VERDICT:
        raise ValueError("the chosen unitary/antiunitary parts do not act orthogonally "
                         "on basis states, so the hybrid basis outputs are not normalized")
    return MachineSpec(out0=tensor(e0, k0, a0), out1=tensor(e1, k1, a1),
                       extension="hybrid", kmap=kmap, ancilla0=a0, ancilla1=a1)


def extend_linear(m: MachineSpec, q: Qubit) -> np.ndarray:
    """alpha*out0 + beta*out1: the unique linear action fixed by the basis rules."""
    if m.extension != "linear":
        raise ValueError(f"machine declares extension {m.extension!r}, not linear")
    return q.alpha * m.out0 + q.beta * m.out1


def extend_antilinear(m: MachineSpec, q: Qubit) -> np.ndarray:
    """conj(alpha)*out0 + conj(beta)*out1."""
    if m.extension != "antilinear":
        raise ValueError(f"machine declares extension {m.extension!r}, not antilinear")
    return np.conj(q.alpha) * m.out0 + np.conj(q.beta) * m.out1


def extend_hybrid(m: MachineSpec, q: Qubit) -> np.ndarray:
    """Four-term weighted mix of the linear and antilinear branch actions.

    Each basis branch i contributes sqrt(lam)*amp_i |i> (x) U|i> (x) |Q_i>
    plus sqrt(1-lam)*conj(amp_i) |i> (x) A|i> (x) |Q_i>.
    """
    if m.extension != "hybrid":
        raise ValueError(f"machine declares extension {m.extension!r}, not hybrid")
    lam = m.kmap.lam
    cu, ca = np.sqrt(lam), np.sqrt(1.0 - lam)
    out = np.zeros_like(m.out0)
    for i, amp in ((0, q.alpha), (1, q.beta)):
        e = np.zeros(2, dtype=complex)
        e[i] = 1.0
        anc = m.ancilla0 if i == 0 else m.ancilla1
        if cu > 0.0:
            out = out + cu * amp * tensor(e, m.kmap.unitary @ e, anc)
        if ca > 0.0:
            out = out + ca * np.conj(amp) * tensor(e, m.kmap.antiunitary(e), anc)
    return out


def machine_output(m: MachineSpec, q: Qubit) -> np.ndarray:
    """The machine's action on q under its declared extension."""
    if m.extension == "linear":
        return extend_linear(m, q)
    if m.extension == "antilinear":
        return extend_antilinear(m, q)
    return extend_hybrid(m, q)


@dataclass(frozen=True, eq=False)
class TargetTransform:
    """What the machine or gate is demanded to do for every input state.

    clone-like targets carry a K map and describe the two-register
    output |psi> (x) K|psi| (with an optional fixed final ancilla);
    gate targets (hadamard9, hadamard10, unequal, cnot) are defined by
    per-state rules over (state, partner) pairs.
    """

    kind: str
    kmap: GeneralKMap | None = None
    a: complex | None = None
    b: complex | None = None
    ancilla_final: np.ndarray | None = None

    def __post_init__(self):
        if self.kind != _MACHINE_KIND and self.kind not in _GATE_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == _MACHINE_KIND and self.kmap is None:
            raise ValueError("clone-like targets need a kmap")
        if self.kind == "unequal":
            if self.a is None or self.b is None:
                raise ValueError("unequal targets need weights a and b")
            a, b = complex(self.a), complex(self.b)
            if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
                raise ValueError("unequal weights must satisfy |a|^2 + |b|^2 = 1")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
        if self.ancilla_final is not None:
            object.__setattr__(self, "ancilla_final", state_vector(self.ancilla_final))


def target_clone(ancilla_final=None) -> TargetTransform:
    return TargetTransform(_MACHINE_KIND, kmap=GeneralKMap(1.0), ancilla_final=ancilla_final)


def target_complement(ancilla_final=None) -> TargetTransform:
    return TargetTransform(_MACHINE_KIND, kmap=GeneralKMap(0.0, antiunitary=complement_map()),
                           ancilla_final=ancilla_final)


def target_conjugate(ancilla_final=None) -> TargetTransform:
    return TargetTransform(_MACHINE_KIND, kmap=GeneralKMap(0.0, antiunitary=conjugation(2)),
                           ancilla_final=ancilla_final)


def target_hybrid(lam: float, ancilla_final=None) -> TargetTransform:
    """Weighted copy-and-complement target: psi -> psi (x) K psi."""
    return TargetTransform(_MACHINE_KIND, kmap=GeneralKMap(lam), ancilla_final=ancilla_final)


def target_hadamard9() -> TargetTransform:
    """psi -> (psi + partner)/sqrt2, partner -> (psi - partner)/sqrt2."""
    return TargetTransform("hadamard9")


def target_hadamard10() -> TargetTransform:
    """psi -> (psi + i partner)/sqrt2, partner -> (i psi + partner)/sqrt2."""
    return TargetTransform("hadamard10")


def target_unequal(a, b) -> TargetTransform:
    """psi -> a psi + b partner, partner -> b psi - a partner."""
    return TargetTransform("unequal", a=a, b=b)


def target_cnot() -> TargetTransform:
    """Flip the target qubit in the control state's own basis."""
    return TargetTransform("cnot")


def target_rules(t: TargetTransform, pair: tuple[Qubit, Qubit]) -> list[tuple[np.ndarray, np.ndarray]]:
    """(input, required output) rule list for a gate target on one pair."""
    s, p = pair[0].vector, pair[1].vector
    r = 1.0 / np.sqrt(2.0)
    if t.kind == "hadamard9":
        return [(s, r * (s + p)), (p, r * (s - p))]
    if t.kind == "hadamard10":
        return [(s, r * (s + 1j * p)), (p, r * (1j * s + p))]
    if t.kind == "unequal":
        return [(s, t.a * s + t.b * p), (p, t.b * s - t.a * p)]
    if t.kind == "cnot":
        return [(np.kron(s, s), np.kron(s, s)),
                (np.kron(s, p), np.kron(s, p)),
                (np.kron(p, s), np.kron(p, p)),
                (np.kron(p, p), np.kron(p, s))]
    raise ValueError(f"target kind {t.kind!r} has no per-state rules; use ideal_output")


def ideal_output(t: TargetTransform, q: Qubit, ancilla_final=None) -> np.ndarray:
    """Normalized ideal output |q> (x) K|q> (x) |Q_final> of a clone-like target."""
    if t.kind != _MACHINE_KIND:
        raise ValueError(f"target kind {t.kind!r} is a gate target; use target_rules")
    second = t.kmap(q.vector)
    norm = np.linalg.norm(second)
    if norm < 1e-12:
        raise ValueError("ideal output vanishes for this state (the unitary and "
                         "antiunitary branches cancel)")
    anc = ancilla_final if ancilla_final is not None else t.ancilla_final
    return tensor(q.vector, second / norm, _ancilla(anc))


def machine_deviation(m: MachineSpec, t: TargetTransform, q: Qubit, mode: str = "fixed") -> float:
    """1 - |<ideal|actual>|^2 between the target and the extended machine.

    In "fixed" mode the ideal's final ancilla is the target's (or the
    machine's |Q_0> when the target leaves it free).  In "best" mode the
    overlap is maximized over all final ancilla states, which isolates
    the principal-system mismatch.
    """
    if mode not in ("fixed", "best"):
        raise ValueError(f"unknown mode {mode!r}; expected 'fixed' or 'best'")
    actual = machine_output(m, q)
    norm = np.linalg.norm(actual)
    if norm < 1e-12:
        raise ValueError("machine output vanishes for this state")
    actual = actual / norm
    second = t.kmap(q.vector)
    snorm = np.linalg.norm(second)
    if snorm < 1e-12:
        raise ValueError("ideal output vanishes for this state")
    sys_ideal = np.kron(q.vector, second / snorm)
    d = m.ancilla_dim
    if mode == "best":
        residue = sys_ideal.conj() @ actual.reshape(4, d)
        overlap_sq = float(np.linalg.norm(residue) ** 2)
    else:
        anc = t.ancilla_final if t.ancilla_final is not None else m.ancilla0
        if anc.size != d:
            raise ValueError(f"final ancilla dimension {anc.size} does not match "
                             f"the machine's ancilla dimension {d}")
        ideal = np.kron(sys_ideal, anc)
        overlap_sq = abs(np.vdot(ideal, actual)) ** 2
    return float(min(max(1.0 - overlap_sq, 0.0), 1.0))


def audit_inner_product(t: TargetTransform, pair: tuple[Qubit, Qubit],
                        partners: tuple[Qubit, Qubit] | None = None) -> float:
    """Overlap discrepancy the target forces on two states.

    pair holds the two input states; partners optionally supplies their
    rule partners (defaulting to canonical complements, the right choice
    for whole-sphere and polar inputs).  The required images of the two
    states themselves are compared: |<in1|in2> - <out1|out2>|.  Zero
    means the pair is consistent with a norm-preserving map; a nonzero
    value certifies that no unitary can produce the demanded images.

    For the basis-flip (cnot) target all sixteen rule products are
    compared instead, since its per-basis realization is phase-exact and
    every cross product is therefore an honest requirement.
    """
    if t.kind not in _GATE_KINDS:
        raise ValueError(f"target kind {t.kind!r} has no overlap audit")
    q1, q2 = pair
    p1, p2 = partners if partners is not None else (complement(q1), complement(q2))
    rules1 = target_rules(t, (q1, p1))
    rules2 = target_rules(t, (q2, p2))
    if t.kind == "cnot":
        worst = 0.0
        for in1, out1 in rules1:
            for in2, out2 in rules2:
                gap = abs(inner_product(in1, in2) - inner_product(out1, out2))
                worst = max(worst, float(gap))
        return worst
    in1, out1 = rules1[0]
    in2, out2 = rules2[0]
    return float(abs(inner_product(in1, in2) - inner_product(out1, out2)))


def audit_unequal(a, b, theta_pair: tuple[float, float]) -> float:
    """|(conj(a) b - a conj(b)) <psi(theta1)|partner(theta2)>| on the polar circle.

    This is the residual by which the unequal-weight rules fail to
    preserve overlaps; it vanishes exactly when a and b are real.
    """
    a, b = complex(a), complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
        raise ValueError("weights must satisfy |a|^2 + |b|^2 = 1")
    s1, _ = polar_pair(theta_pair[0])
    _, p2 = polar_pair(theta_pair[1])
    term = (np.conj(a) * b - a * np.conj(b)) * s1.overlap(p2)
    return float(abs(term))


@dataclass(frozen=True, eq=False)
class Verdict:
    """Outcome of a realizability check.

    realizable means every demanded behaviour was matched within
    tolerance (and realizing_operator, when not None, does the job);
    otherwise witness holds the offending state and its partner, and
    violation the worst phase-invariant mismatch.
    """

    realizable: bool
    violation: float
    tolerance: float
    condition: str
    witness: tuple[Qubit, Qubit] | None = None
    realizing_operator: np.ndarray | None = None
    detail: str = ""

    def __post_init__(self):
        if self.realizable and self.violation > self.tolerance:
            raise ValueError("realizable verdicts cannot exceed tolerance")
        if not self.realizable and self.witness is None:
            raise ValueError("impossible verdicts must carry a witness")

    @property
    def status(self) -> str:
        return "REALIZABLE" if self.realizable else "IMPOSSIBLE"


def _as_pairs(states) -> list[tuple[Qubit, Qubit]]:
    if isinstance(states, StateSet):
        return list(states.pairs)
    pairs = []
    for q in states:
        if not isinstance(q, Qubit):
            raise TypeError(f"expected Qubit, got {type(q).__name__}")
        pairs.append((q, complement(q)))
    if not pairs:
        raise ValueError("no states to check")
    return pairs


def _rule_violation(candidate: np.ndarray, rules) -> float:
    worst = 0.0
    for vec_in, vec_out in rules:
        actual = candidate @ vec_in
        na, no = np.linalg.norm(actual), np.linalg.norm(vec_out)
        if na < 1e-12 or no < 1e-12:
            return 1.0
        overlap_sq = abs(np.vdot(vec_out, actual)) ** 2 / (na * na * no * no)
        worst = max(worst, float(min(max(1.0 - overlap_sq, 0.0), 1.0)))
    return worst


def check_universal_gate(candidate, t: TargetTransform, states,
                         tol: float = ATOL_VERDICT) -> Verdict:
    """Does one fixed 2x2 operator satisfy the target's rules on every state?

    states may be a StateSet (whose own pairing convention is used) or a
    plain list of Qubits (canonical complements).  The verdict's witness
    is the worst-violating (state, partner) pair.
    """
    candidate = np.asarray(candidate, dtype=complex)
    if candidate.shape != (2, 2):
        raise ValueError(f"gate candidates are 2x2, got {candidate.shape}")
    if t.kind not in ("hadamard9", "hadamard10", "unequal"):
        raise ValueError(f"target kind {t.kind!r} is not a single-qubit gate target")
    pairs = _as_pairs(states)
    worst, worst_pair = 0.0, pairs[0]
    for pair in pairs:
        v = _rule_violation(candidate, target_rules(t, pair))
        if v > worst:
            worst, worst_pair = v, pair
    ok = worst <= tol
    return Verdict(realizable=ok, violation=worst, tolerance=tol,
                   condition=f"{t.kind}-rules",
                   witness=None if ok else worst_pair,
                   realizing_operator=candidate if ok else None,
                   detail=f"checked {len(pairs)} state pairs")


def check_cnot_universal(candidate, states, tol: float = ATOL_VERDICT) -> Verdict:
    """Does one fixed 4x4 operator satisfy all four basis-flip rules per state?"""
    candidate = np.asarray(candidate, dtype=complex)
    if candidate.shape != (4, 4):
        raise ValueError(f"two-qubit candidates are 4x4, got {candidate.shape}")
    t = target_cnot()
    pairs = _as_pairs(states)
    worst, worst_pair = 0.0, pairs[0]
    for pair in pairs:
        v = _rule_violation(candidate, target_rules(t, pair))
        if v > worst:
            worst, worst_pair = v, pair
    ok = worst <= tol
    return Verdict(realizable=ok, violation=worst, tolerance=tol,
                   condition="cnot-rules",
                   witness=None if ok else worst_pair,
                   realizing_operator=candidate if ok else None,
                   detail=f"checked {len(pairs)} state pairs")


@dataclass(frozen=True, eq=False)
class WitnessResult:
    """Worst pair found by witness_search."""

    pair: tuple[Qubit, Qubit]
    violation: float
    condition: str


def _family_arrays(family: str, n: int, seed: int | None) -> tuple[np.ndarray, np.ndarray]:
    """Stacked (states, partners) arrays of shape (n, 2) for a named family."""
    rng = np.random.default_rng(seed)
    if family == "bloch":
        qs = sample_bloch(n, rng=rng)
        s = np.array([q.vector for q in qs])
        p = np.stack([-s[:, 1].conj(), s[:, 0].conj()], axis=1)
        return s, p
    if family == "polar":
        t = rng.uniform(0.0, np.pi, size=n)
        c, si = np.cos(t / 2.0), np.sin(t / 2.0)
        return (np.stack([c, si], axis=1).astype(complex),
                np.stack([-si, c], axis=1).astype(complex))
    if family == "equatorial":
        phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
        e = np.exp(1j * phi) / np.sqrt(2.0)
        h = np.full(n, 1.0 / np.sqrt(2.0), dtype=complex)
        return np.stack([h, e], axis=1), np.stack([h, -e], axis=1)
    raise ValueError(f"unknown family {family!r}; expected bloch, polar, or equatorial")


def _required_outputs(t: TargetTransform, s: np.ndarray, p: np.ndarray):
    r = 1.0 / np.sqrt(2.0)
    if t.kind == "hadamard9":
        return r * (s + p), r * (s - p)
    if t.kind == "hadamard10":
        return r * (s + 1j * p), r * (1j * s + p)
    if t.kind == "unequal":
        return t.a * s + t.b * p, t.b * s - t.a * p
    raise ValueError(f"no stacked rule form for target {t.kind!r}")


def witness_search(t: TargetTransform, n_samples: int, seed: int | None = 42,
                   family: str = "bloch", chunk: int = 256) -> WitnessResult:
    """Scan all sampled pairs for the largest overlap discrepancy.

    For single-qubit targets the discrepancy is the one audited by
    audit_inner_product: the gap between each pair's input overlap and
    the overlap of its required first-rule images.  For the basis-flip
    target all sixteen two-qubit rule products are compared.

    Deterministic for a fixed seed; ties break to the first pair found
    in (i, j) index order.  The scan is exhaustive over the sample, done
    in row blocks so even 10^4 states stay within modest memory.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples to form a pair")
    if t.kind not in _GATE_KINDS:
        raise ValueError(f"target kind {t.kind!r} has no overlap audit")
    s, p = _family_arrays(family, n_samples, seed)
    n = n_samples
    if t.kind == "cnot":
        # rule table: (control, target) -> (control, new target)
        rules = [("s", "s", "s", "s"), ("s", "p", "s", "p"),
                 ("p", "s", "p", "p"), ("p", "p", "p", "s")]
    else:
        o1, _ = _required_outputs(t, s, p)
    best_v, best_i, best_j = -1.0, 0, 1
    vecs = {"s": s, "p": p}
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        if t.kind == "cnot":
            g = {key: vecs[key[0]][lo:hi].conj() @ vecs[key[1]].T
                 for key in ("ss", "sp", "ps", "pp")}
            block = np.zeros((hi - lo, n))
            for c1, t1, c1o, t1o in rules:
                for c2, t2, c2o, t2o in rules:
                    gin = g[c1 + c2] * g[t1 + t2]
                    gout = g[c1o + c2o] * g[t1o + t2o]
                    np.maximum(block, np.abs(gin - gout), out=block)
        else:
            gin = s[lo:hi].conj() @ s.T
            gout = o1[lo:hi].conj() @ o1.T
            block = np.abs(gin - gout)
        # keep strictly-upper pairs only: j > global row index
        cols = np.arange(n)[np.newaxis, :]
        rows = np.arange(lo, hi)[:, np.newaxis]
        block = np.where(cols > rows, block, -1.0)
        flat = int(np.argmax(block))
        i_local, j = divmod(flat, n)
        v = float(block[i_local, j])
        if v > best_v:
            best_v, best_i, best_j = v, lo + i_local, j
    pair = (Qubit(complex(s[best_i, 0]), complex(s[best_i, 1])),
            Qubit(complex(s[best_j, 0]), complex(s[best_j, 1])))
    return WitnessResult(pair=pair, violation=max(best_v, 0.0),
                         condition="pairwise-overlap-consistency")


@dataclass(frozen=True)
class SurveyResult:
    """Outcome of scanning random candidate gates against a rule target."""

    n_candidates: int
    n_pass: int
    min_worst_violation: float
    tolerance: float
    seed: int | None


def survey_random_unitaries(t: TargetTransform, states, n_candidates: int,
                            tol: float = 1e-3, seed: int | None = 42,
                            chunk: int = 1024) -> SurveyResult:
    """Try many Haar-distributed 2x2 unitaries against a two-rule target.

    Each candidate's worst violation over all states and both rules is
    computed; a candidate passes if that worst violation stays within
    tol.  The minimum worst-violation over all candidates quantifies how
    far even the best random gate remains from universality.
    """
    if n_candidates < 1:
        raise ValueError("need at least one candidate")
    pairs = _as_pairs(states)
    s = np.array([q.vector for q, _ in pairs])
    p = np.array([q.vector for _, q in pairs])
    o1, o2 = _required_outputs(t, s, p)
    rng = np.random.default_rng(seed)
    n_pass = 0
    min_worst = np.inf
    done = 0
    while done < n_candidates:
        b = min(chunk, n_candidates - done)
        u = haar_unitaries(b, rng=rng)
        act_s = np.einsum("bij,nj->bni", u, s)
        act_p = np.einsum("bij,nj->bni", u, p)
        v1 = 1.0 - np.abs(np.einsum("ni,bni->bn", o1.conj(), act_s)) ** 2
        v2 = 1.0 - np.abs(np.einsum("ni,bni->bn", o2.conj(), act_p)) ** 2
        worst = np.maximum(v1, v2).max(axis=1)
        n_pass += int(np.count_nonzero(worst <= tol))
        min_worst = min(min_worst, float(worst.min()))
        done += b
    return SurveyResult(n_candidates=n_candidates, n_pass=n_pass,
                        min_worst_violation=min_worst, tolerance=tol, seed=seed)
