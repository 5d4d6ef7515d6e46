"""Executable LOCC protocols over bipartite pure states.

A protocol is a finite sequence of steps: local generalized measurements
(branching), outcome-conditioned local unitaries, and classical outcome
announcements.  Two execution engines are provided — an amplitude-level
floating-point one that handles arbitrary operators, and an exact
rational one for protocols whose operators are monomial with rational
squared entries (which is true of everything the builders here emit) —
plus a seeded Monte-Carlo sampler whose per-trial randomness depends only
on (seed, trial index).
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
import threading
from typing import Callable

import numpy as np

from .conversion import ConversionPlan, InfeasibleConversionError
from .monotones import entanglement_monotone
from .numeric import DEFAULT_TOL, as_exact
from .schmidt import (BipartiteState, InvalidStateError, SchmidtVector,
                      majorizes, schmidt_decompose, state_from_schmidt)

__all__ = [
    "ProtocolError",
    "BranchLimitError",
    "MonotoneViolationError",
    "MajorizationError",
    "ExactMonomial",
    "LocalMeasurement",
    "LocalUnitary",
    "Announce",
    "LoccProtocol",
    "MeasurementOutcome",
    "Branch",
    "SimulationReport",
    "apply_measurement",
    "exhaustive_run",
    "exhaustive_run_exact",
    "success_probability",
    "monotone_audit",
    "deterministic_protocol",
    "build_full_protocol",
    "monte_carlo_run",
    "BRANCH_CAP",
    "PRUNE_EPS",
]

BRANCH_CAP = 100_000
PRUNE_EPS = 1e-12  # outcomes below this are never normalized into states


class ProtocolError(ValueError):
    """A protocol or one of its steps is malformed."""


class BranchLimitError(RuntimeError):
    """Exhaustive enumeration exceeded the branch cap."""


class MonotoneViolationError(RuntimeError):
    """An averaged monotone increased along a protocol."""


class MajorizationError(ValueError):
    """Deterministic conversion requested without majorization."""


@dataclass(frozen=True)
class ExactMonomial:
    """Monomial operator (one nonzero entry per column) with rational
    squared magnitudes — enough to track Schmidt-level branches exactly.

    ``rows[c]`` is the row of column c's nonzero entry and ``squared[c]``
    its squared magnitude.
    """

    rows: tuple
    squared: tuple

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        squared = tuple(Fraction(s) for s in self.squared)
        if len(rows) != len(squared):
            raise ProtocolError("monomial row/entry length mismatch")
        if any(s < 0 for s in squared):
            raise ProtocolError("negative squared magnitude in monomial")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "squared", squared)

    @property
    def n(self) -> int:
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=complex)
        for col, (row, sq) in enumerate(zip(self.rows, self.squared)):
            mat[row, col] = math.sqrt(float(sq))
        return mat

    def outcome(self, probs: tuple):
        """(probability, sorted post squared coefficients) on a diagonal
        state with exact squared coefficients ``probs``; post is None for
        a probability-0 outcome."""
        p = sum(s * x for s, x in zip(self.squared, probs))
        if p == 0:
            return Fraction(0), None
        post = sorted((s * x / p for s, x in zip(self.squared, probs)),
                      reverse=True)
        return p, tuple(post)


@dataclass(frozen=True, eq=False)
class LocalMeasurement:
    """Generalized measurement on one party; operators must satisfy
    sum K^dag K = identity.  ``exact`` optionally carries the monomial
    description of each operator for rational bookkeeping."""

    party: str
    operators: tuple
    exact: tuple | None = None
    label: str = ""

    def __post_init__(self):
        if self.party not in ("A", "B"):
            raise ProtocolError(f"party must be 'A' or 'B', got {self.party!r}")
        ops = tuple(np.array(op, dtype=complex) for op in self.operators)
        if not ops:
            raise ProtocolError("a measurement needs at least one operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ProtocolError("measurement operators must be square")
        if any(op.shape != shape for op in ops):
            raise ProtocolError("measurement operators differ in shape")
        if self.exact is not None and len(self.exact) != len(ops):
            raise ProtocolError("exact data does not match operator count")
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def n(self) -> int:
        return self.operators[0].shape[0]


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """Local basis change on one party, optionally applied only when the
    outcome history so far satisfies ``condition``."""

    party: str
    matrix: np.ndarray
    condition: Callable | None = None
    label: str = ""

    def __post_init__(self):
        if self.party not in ("A", "B"):
            raise ProtocolError(f"party must be 'A' or 'B', got {self.party!r}")
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ProtocolError("unitary must be square")
        if not np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]),
                           atol=1e-9):
            raise ProtocolError("matrix is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class Announce:
    """Classical broadcast of the latest outcome (no state change)."""

    label: str = ""


@dataclass(frozen=True, eq=False)
class LoccProtocol:
    """Ordered steps plus an optional success predicate on the full
    outcome history (None means every branch counts as success)."""

    steps: tuple
    success_predicate: Callable | None = None

    def __post_init__(self):
        steps = tuple(self.steps)
        for step in steps:
            if not isinstance(step, (LocalMeasurement, LocalUnitary, Announce)):
                raise ProtocolError(f"unknown step type {type(step).__name__}")
        object.__setattr__(self, "steps", steps)

    @property
    def measurement_count(self) -> int:
        return sum(isinstance(s, LocalMeasurement) for s in self.steps)


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    index: int
    probability: float
    post_state: BipartiteState | None  # None flags a probability-0 outcome


def _apply_operator(amps: np.ndarray, party: str, op: np.ndarray) -> np.ndarray:
    # A acts on rows, B on columns of the amplitude matrix
    return op @ amps if party == "A" else amps @ op.T


def _check_completeness(operators, tol):
    n = operators[0].shape[0]
    total = sum(op.conj().T @ op for op in operators)
    if not np.allclose(total, np.eye(n), atol=max(tol, 1e-9)):
        raise ProtocolError("measurement operators do not resolve the identity")


def apply_measurement(state: BipartiteState, party: str, operators,
                      *, tol=DEFAULT_TOL):
    """All outcomes of a generalized local measurement.

    Parameters
    ----------
    state : BipartiteState
    party : str
        "A" (operators act on rows) or "B" (columns).
    operators : sequence of square matrices
        Must resolve the identity on the measured party within ``tol``.

    Returns
    -------
    list of MeasurementOutcome
        Probability is the squared norm of the unnormalized branch;
        probabilities sum to 1 within tolerance.  Outcomes below the
        pruning threshold carry ``post_state=None``.
    """
    if party not in ("A", "B"):
        raise ProtocolError(f"party must be 'A' or 'B', got {party!r}")
    ops = [np.array(op, dtype=complex) for op in operators]
    if not ops:
        raise ProtocolError("a measurement needs at least one operator")
    dim = state.n_a if party == "A" else state.n_b
    if any(op.shape != (dim, dim) for op in ops):
        raise ProtocolError(
            f"operator shape mismatch: party {party} has dimension {dim}")
    _check_completeness(ops, tol)
    outcomes = []
    for idx, op in enumerate(ops):
        branch = _apply_operator(state.amplitudes, party, op)
        p = float(np.linalg.norm(branch)) ** 2
        if p < PRUNE_EPS:
            outcomes.append(MeasurementOutcome(idx, p, None))
        else:
            outcomes.append(MeasurementOutcome(
                idx, p, BipartiteState(branch / math.sqrt(p))))
    return outcomes


@dataclass(frozen=True, eq=False)
class Branch:
    """One complete path through a protocol.

    ``states`` holds one snapshot per step boundary (index 0 is the
    initial state), as BipartiteState in float mode or SchmidtVector in
    exact mode; ``probability`` is the product of outcome probabilities.
    """

    history: tuple
    probability: object
    states: tuple

    @property
    def final_state(self):
        return self.states[-1]


def exhaustive_run(protocol: LoccProtocol, initial: BipartiteState,
                   *, branch_cap=BRANCH_CAP, tol=DEFAULT_TOL):
    """Enumerate every branch of a protocol at the amplitude level.

    Branches whose probability falls below the pruning threshold are
    dropped; the probabilities of the returned branches sum to 1 within
    tolerance.  Raises BranchLimitError beyond ``branch_cap`` branches.
    """
    frontier = [((), 1.0, [initial])]
    for step in protocol.steps:
        new_frontier = []
        for history, prob, states in frontier:
            current = states[-1]
            if isinstance(step, Announce):
                new_frontier.append((history, prob, states + [current]))
            elif isinstance(step, LocalUnitary):
                if step.condition is None or step.condition(history):
                    amps = _apply_operator(current.amplitudes, step.party,
                                           step.matrix)
                    nxt = BipartiteState(amps)
                else:
                    nxt = current
                new_frontier.append((history, prob, states + [nxt]))
            else:
                outcomes = apply_measurement(current, step.party,
                                             step.operators, tol=tol)
                for out in outcomes:
                    if out.post_state is None:
                        continue
                    new_frontier.append((history + (out.index,),
                                         prob * out.probability,
                                         states + [out.post_state]))
        if len(new_frontier) > branch_cap:
            raise BranchLimitError(
                f"branch count {len(new_frontier)} exceeds cap {branch_cap}")
        frontier = new_frontier
    return [Branch(h, p, tuple(s)) for h, p, s in frontier]


def exhaustive_run_exact(protocol: LoccProtocol, initial: SchmidtVector,
                         *, branch_cap=BRANCH_CAP):
    """Enumerate branches with exact rational probabilities.

    Works at the Schmidt-coefficient level: each measurement must carry
    exact monomial data (true of protocols built by this module), and
    local unitaries never change Schmidt coefficients, so they and the
    announcements pass through.  The initial vector must be exact.
    """
    if not initial.is_exact:
        raise ProtocolError("exact run requires an exact initial vector")
    frontier = [((), Fraction(1), [initial])]
    for step in protocol.steps:
        new_frontier = []
        for history, prob, states in frontier:
            if isinstance(step, (Announce, LocalUnitary)):
                new_frontier.append((history, prob, states + [states[-1]]))
                continue
            if step.exact is None:
                raise ProtocolError(
                    "measurement lacks exact monomial data; "
                    "use the amplitude-level exhaustive_run instead")
            current = states[-1]
            for idx, mono in enumerate(step.exact):
                p, post = mono.outcome(current.probs)
                if post is None:
                    continue
                new_frontier.append((history + (idx,), prob * p,
                                     states + [SchmidtVector(post)]))
        if len(new_frontier) > branch_cap:
            raise BranchLimitError(
                f"branch count {len(new_frontier)} exceeds cap {branch_cap}")
        frontier = new_frontier
    return [Branch(h, p, tuple(s)) for h, p, s in frontier]


def success_probability(branches, predicate=None):
    """Total probability of branches whose history satisfies the predicate
    (all branches when predicate is None)."""
    total = sum(b.probability for b in branches
                if predicate is None or predicate(b.history))
    return total


def _branch_monotone(state, k):
    if isinstance(state, SchmidtVector):
        return entanglement_monotone(state, k)
    return entanglement_monotone(schmidt_decompose(state), k)


def monotone_audit(branches, k: int, *, tol=DEFAULT_TOL, check=True):
    """Per-step probability-weighted average of the k-th monotone.

    Returns one value per step boundary (index 0 = initial state).  With
    ``check`` set, raises MonotoneViolationError if the sequence
    increases beyond tolerance — no LOCC protocol may do that.
    """
    if not branches:
        raise ValueError("no branches to audit")
    depth = len(branches[0].states)
    if any(len(b.states) != depth for b in branches):
        raise ValueError("branches disagree on step count")
    total = sum(b.probability for b in branches)
    averages = []
    for s in range(depth):
        avg = sum(b.probability * _branch_monotone(b.states[s], k)
                  for b in branches) / total
        averages.append(avg)
    if check:
        for i in range(len(averages) - 1):
            drop = averages[i] - averages[i + 1]
            bad = drop < 0 if isinstance(drop, Fraction) else float(drop) < -tol
            if bad:
                raise MonotoneViolationError(
                    f"averaged monotone k={k} increased at step {i + 1}: "
                    f"{averages[i]} -> {averages[i + 1]}")
    return averages


# ---------------------------------------------------------------------------
# protocol builders


def _exact_unit_vector(sv: SchmidtVector):
    """Exact rational image of a Schmidt vector, normalized to sum 1.

    Floats convert to their exact dyadic rationals first, so the chain
    construction below never sees rounding noise of its own making.
    """
    vals = [as_exact(p) for p in sv.probs]
    total = sum(vals)
    if total == 0:
        raise InvalidStateError("state carries no weight")
    return tuple(v / total for v in vals)


def _t_transform_chain(target, start):
    """T-transform chain from ``start`` down to ``target``.

    Both are exact sorted tuples with equal sums and target majorized by
    start.  Each step moves weight between exactly two positions (j, k),
    j < k, keeping the vector sorted; at most n - 1 steps are needed.
    Returns records (before, after, j, k) in construction order, walking
    from ``start`` toward ``target``.
    """
    records = []
    v = list(start)
    a = list(target)
    guard = len(v) + 1
    while v != a:
        if guard == 0:
            raise RuntimeError("T-transform chain failed to terminate")
        guard -= 1
        j = max(i for i in range(len(v)) if a[i] < v[i])
        later = [i for i in range(j + 1, len(v)) if a[i] > v[i]]
        if not later:
            raise MajorizationError(
                "majorization violated during chain construction")
        k = later[0]
        delta = min(v[j] - a[j], a[k] - v[k])
        nxt = list(v)
        nxt[j] -= delta
        nxt[k] += delta
        records.append((tuple(v), tuple(nxt), j, k))
        v = nxt
    return records


def _outcome_equals(meas_index, value, history):
    return history[meas_index] == value


def _swap_matrix(n, j, k):
    mat = np.eye(n, dtype=complex)
    mat[j, j] = mat[k, k] = 0.0
    mat[j, k] = mat[k, j] = 1.0
    return mat


def _mixing_step(x, y, j, k, n, meas_index):
    """Two-outcome measurement turning sorted ``x`` into sorted ``y``
    (which differ only at positions j < k, with y_j > x_j >= x_k > y_k
    and equal pair sums), plus the outcome-1 correction on B.

    Outcome probabilities are exactly t and 1 - t with
    t = (x_j - y_k)/(y_j - y_k); both branches land exactly on ``y``.
    """
    t = (x[j] - y[k]) / (y[j] - y[k])
    u = 1 - t
    sq1 = [t] * n
    sq1[j] = t * y[j] / x[j]
    sq1[k] = t * y[k] / x[k]
    rows1 = tuple(range(n))
    sq2 = [u] * n
    sq2[j] = u * y[k] / x[j]   # column j feeds row k
    sq2[k] = u * y[j] / x[k]   # column k feeds row j
    rows2 = list(range(n))
    rows2[j], rows2[k] = k, j
    m1 = ExactMonomial(rows1, tuple(sq1))
    m2 = ExactMonomial(tuple(rows2), tuple(sq2))
    meas = LocalMeasurement(
        "A", (m1.matrix(), m2.matrix()), exact=(m1, m2),
        label=f"balance levels {j + 1},{k + 1}")
    correction = LocalUnitary(
        "B", _swap_matrix(n, j, k),
        condition=partial(_outcome_equals, meas_index, 1),
        label=f"relabel levels {j + 1},{k + 1} on the swap branch")
    return [meas, Announce(label="broadcast outcome"), correction]


def deterministic_protocol(alpha: SchmidtVector, gamma: SchmidtVector,
                           *, tol=DEFAULT_TOL) -> LoccProtocol:
    """Certain conversion from ``alpha`` to the majorizing ``gamma``.

    Realized as at most n - 1 two-outcome measurements on A, one per
    T-transform of the majorization chain between the two distributions,
    each followed by an announcement and an outcome-conditioned relabel
    on B.  Every branch of the result lands exactly on ``gamma``.

    The chain is built in exact rational arithmetic (floats are lifted to
    their dyadic rationals and normalized), so majorization must hold
    exactly there; violations raise MajorizationError.
    """
    if not majorizes(alpha, gamma, tol=tol):
        raise MajorizationError("gamma does not majorize alpha")
    n = max(alpha.n, gamma.n)
    a = _exact_unit_vector(alpha.padded(n))
    g = _exact_unit_vector(gamma.padded(n))
    heads_a = heads_g = Fraction(0)
    for pa, pg in zip(a, g):
        heads_a += pa
        heads_g += pg
        if heads_g < heads_a:
            raise MajorizationError(
                "majorization fails in exact arithmetic "
                f"(head sums {float(heads_a)} > {float(heads_g)}); "
                "supply exactly majorizing vectors")
    steps = []
    meas_index = 0
    # chain records run start -> target; execution undoes them in reverse
    for before, after, j, k in reversed(_t_transform_chain(a, g)):
        steps.extend(_mixing_step(after, before, j, k, n, meas_index))
        meas_index += 1
    return LoccProtocol(tuple(steps), success_predicate=None)


def _last_outcome_is_success(history):
    return bool(history) and history[-1] == 0


def build_full_protocol(plan: ConversionPlan, *, tol=DEFAULT_TOL) -> LoccProtocol:
    """Executable protocol realizing a feasible plan end to end.

    Deterministic stage to the intermediate state, then the final
    two-outcome filter; outcome 0 of the last measurement is success.
    """
    if not plan.is_feasible:
        raise InfeasibleConversionError(
            "plan has probability 0; no protocol exists")
    det = deterministic_protocol(plan.source, plan.intermediate, tol=tol)
    n = plan.intermediate.n
    success, failure = plan.success_operator, plan.failure_operator
    if plan.is_exact:
        identity_rows = tuple(range(n))
        exact = (ExactMonomial(identity_rows, success.squared),
                 ExactMonomial(identity_rows, failure.squared))
    else:
        exact = None
    filter_step = LocalMeasurement(
        "A", (success.matrix, failure.matrix), exact=exact,
        label="final two-outcome filter")
    return LoccProtocol(det.steps + (filter_step,),
                        success_predicate=_last_outcome_is_success)


# ---------------------------------------------------------------------------
# Monte-Carlo


@dataclass(frozen=True)
class SimulationReport:
    """Outcome summary of a sampled protocol run."""

    trials: int
    successes: int
    empirical_probability: float
    std_error: float
    predicted: object
    monotone_audit: tuple  # of (step, k, average) triples
    seed: int


class _LazyBranchTree:
    """Branch tree expanded on demand and shared across trials.

    A node is keyed by its outcome history; it stores the state snapshots
    accumulated since the parent measurement and the outcome-probability
    vector of the pending measurement (None once the protocol ends).
    Expansion is locked so threaded samplers stay consistent.
    """

    def __init__(self, protocol, initial, tol):
        self._protocol = protocol
        self._tol = tol
        self._lock = threading.Lock()
        self._nodes = {}
        self._root = self._make_node((), 0, initial)

    class _Node:
        __slots__ = ("states", "probs", "posts", "next_pos")

        def __init__(self, states, probs, posts, next_pos):
            self.states = states
            self.probs = probs
            self.posts = posts
            self.next_pos = next_pos

    def _make_node(self, history, pos, state):
        steps = self._protocol.steps
        states = [state]
        while pos < len(steps) and not isinstance(steps[pos], LocalMeasurement):
            step = steps[pos]
            if isinstance(step, LocalUnitary) and (
                    step.condition is None or step.condition(history)):
                amps = _apply_operator(states[-1].amplitudes, step.party,
                                       step.matrix)
                states.append(BipartiteState(amps))
            else:
                states.append(states[-1])
            pos += 1
        if pos == len(steps):
            node = self._Node(tuple(states), None, None, pos)
        else:
            outcomes = apply_measurement(states[-1], steps[pos].party,
                                         steps[pos].operators, tol=self._tol)
            probs = np.array([o.probability for o in outcomes])
            posts = [o.post_state for o in outcomes]
            node = self._Node(tuple(states), probs, posts, pos + 1)
        self._nodes[history] = node
        return node

    def node(self, history):
        try:
            return self._nodes[history]
        except KeyError:
            pass
        with self._lock:
            if history in self._nodes:
                return self._nodes[history]
            parent = self.node(history[:-1])
            post = parent.posts[history[-1]]
            if post is None:
                raise ProtocolError("sampled a pruned zero-probability branch")
            return self._make_node(history, parent.next_pos, post)

    def trajectory(self, history):
        """State snapshots along a complete history (len(steps) + 1).

        The root contributes boundaries up to the first measurement; each
        descendant's first state is the post-measurement snapshot, a new
        boundary, so nodes concatenate whole.
        """
        states = []
        for cut in range(len(history) + 1):
            states.extend(self.node(history[:cut]).states)
        return states


def _sample_chunk(tree, uniforms, lo, hi):
    counts = Counter()
    for t in range(lo, hi):
        history = ()
        node = tree.node(history)
        draw = 0
        while node.probs is not None:
            u = uniforms[t, draw]
            draw += 1
            acc = 0.0
            idx = len(node.probs) - 1
            for i, p in enumerate(node.probs):
                acc += p
                if u < acc:
                    idx = i
                    break
            while node.posts[idx] is None:   # never land on a pruned branch
                idx -= 1
            history = history + (idx,)
            node = tree.node(history)
        counts[history] += 1
    return counts


def monte_carlo_run(protocol: LoccProtocol, initial: BipartiteState,
                    trials: int, seed: int, *, workers: int = 1,
                    predicted=None, tol=DEFAULT_TOL) -> SimulationReport:
    """Sample a protocol ``trials`` times and summarize.

    Reproducibility: trial t consumes row t of a Philox-generated uniform
    matrix keyed by ``seed``, so its outcomes are a pure function of
    (seed, t).  Results are aggregated as integer counts, which makes the
    report identical for any ``workers`` value (chunks merge by addition).

    Parameters
    ----------
    protocol, initial : the protocol and the start state.
    trials, seed : sample size and RNG key.
    workers : number of threads to spread trial chunks over.
    predicted : closed-form probability to embed in the report.

    Returns
    -------
    SimulationReport with the empirical probability, its standard error
    sqrt(p(1-p)/trials), and the per-step averaged-monotone audit.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if workers < 1:
        raise ValueError("workers must be positive")
    n_meas = max(protocol.measurement_count, 1)
    rng = np.random.Generator(np.random.Philox(key=seed))
    uniforms = rng.random((trials, n_meas))
    tree = _LazyBranchTree(protocol, initial, tol)
    chunk = math.ceil(trials / workers)
    ranges = [(lo, min(lo + chunk, trials))
              for lo in range(0, trials, chunk)]
    if workers == 1 or len(ranges) == 1:
        chunks = [_sample_chunk(tree, uniforms, lo, hi) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sample_chunk, tree, uniforms, lo, hi)
                       for lo, hi in ranges]
            chunks = [f.result() for f in futures]
    counts = Counter()
    for c in chunks:
        counts.update(c)
    predicate = protocol.success_predicate
    successes = sum(cnt for hist, cnt in counts.items()
                    if predicate is None or predicate(hist))
    empirical = successes / trials
    std_error = math.sqrt(max(empirical * (1.0 - empirical), 0.0) / trials)
    # audit from the visited trajectories, weighted by visit counts
    trajectories = {hist: tree.trajectory(hist) for hist in counts}
    depth = len(protocol.steps) + 1
    dims = min(initial.n_a, initial.n_b)
    audit = []
    for s in range(depth):
        for k in range(1, dims + 1):
            avg = sum(cnt * _branch_monotone(trajectories[hist][s], k)
                      for hist, cnt in counts.items()) / trials
            audit.append((s, k, float(avg)))
    return SimulationReport(trials=trials, successes=successes,
                            empirical_probability=empirical,
                            std_error=std_error, predicted=predicted,
                            monotone_audit=tuple(audit), seed=seed)
