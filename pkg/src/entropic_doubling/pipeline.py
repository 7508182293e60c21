"""Statements A and B as checkable contracts, and the constructive pipeline.

Statement B(eta, eps, L): there is a subspace V with H[U_V] <= L(H[X]+H[Y])
and H[pi(X)+pi(Y)] >= (1-eta)(H[pi(X)]+H[pi(Y)]) - eps(H[X]+H[Y]).
Statement A(eta, L, c): if H[X+Y] <= (1-eta)(H[X]+H[Y]) there is such a V
with H[pi(X)]+H[pi(Y)] <= (1-c)(H[X]+H[Y]).

solve_B realizes B constructively: sumset preprocessing, a case split on
fiber doubling (with the endgame as the third case), local-to-global gluing
of per-fiber subspaces, and recursion on eta toward the 1/2 base case.  Every
produced subspace is accepted only after an independent statement check; the
worst-case constants of the analysis are recorded but never trusted.

Two run modes: "paper-faithful" enforces eps0 = 2^-15 eta0^2 and the stated
case thresholds (feasible only on tiny instances); "practical" keeps the
same control flow but derives thresholds and zeta from measured quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dist import (
    Dist,
    FiberFamily,
    mixture,
    pushforward_quotient,
    sum_fibers,
    xor_convolve,
)
from .endgame import (
    endgame,
    endgame_fiber_systems,
    endgame_move_quantities,
    measure_endgame_kappa,
)
from .entropy import fibring_decompose, shannon_entropy
from .errors import (
    DimensionMismatchError,
    EmptySupportError,
    HypothesisViolationError,
    PipelineError,
    SearchFailureError,
)
from .gf2 import Subspace, span, subspace_sum
from .oracle import CRITERION_A, CRITERION_B, CRITERION_T11, SubspaceCertificate
from .tolerances import IDENTITY_TOL

MODE_PRACTICAL = "practical"
MODE_PAPER = "paper-faithful"

BSolver = Callable[[Dist, Dist], SubspaceCertificate]


# ---------------------------------------------------------------------------
# Statement parameters and checks


@dataclass(frozen=True)
class StatementParams:
    """Parameters (eta, epsilon, c, L) for the intermediate statements."""

    eta: float
    epsilon: float | None = None
    c: float | None = None
    L: float | None = None

    def __post_init__(self):
        if not 0.0 < self.eta <= 0.5:
            raise ValueError(f"eta must lie in (0, 1/2], got {self.eta}")
        if self.epsilon is not None and not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        # c = 1 (a projection killing all entropy) is allowed so the A -> B
        # reduction's single-iteration edge case is expressible.
        if self.c is not None and not 0.0 < self.c <= 1.0:
            raise ValueError(f"c must lie in (0, 1], got {self.c}")
        if self.L is not None and self.L < 0.0:
            raise ValueError(f"L must be nonnegative, got {self.L}")

    def to_json(self) -> dict:
        return {"eta": self.eta, "epsilon": self.epsilon, "c": self.c, "L": self.L}


@dataclass(frozen=True)
class StatementCheck:
    """Both sides of a statement's inequalities for a concrete subspace."""

    statement: str
    passes: bool
    lhs: float
    rhs: float
    size_dim: float
    size_bound: float | None
    hypothesis_met: bool | None
    params: StatementParams
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "statement": self.statement,
            "passes": self.passes,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "size_dim": self.size_dim,
            "size_bound": self.size_bound,
            "hypothesis_met": self.hypothesis_met,
            "params": self.params.to_json(),
            "details": self.details,
        }


def check_statement_B(
    p: Dist, q: Dist, v: Subspace, params: StatementParams
) -> StatementCheck:
    """Evaluate the statement-B inequality and size bound for a given V."""
    if params.epsilon is None:
        raise ValueError("statement B requires epsilon")
    if p.n != q.n or p.n != v.n:
        raise DimensionMismatchError("ambient dimensions differ")
    h_total = shannon_entropy(p) + shannon_entropy(q)
    pp, qp = pushforward_quotient(p, v), pushforward_quotient(q, v)
    hp, hq = shannon_entropy(pp), shannon_entropy(qp)
    lhs = shannon_entropy(xor_convolve(pp, qp))
    rhs = (1.0 - params.eta) * (hp + hq) - params.epsilon * h_total
    size_bound = None if params.L is None else params.L * h_total
    size_ok = size_bound is None or v.dim <= size_bound + IDENTITY_TOL
    passes = bool(lhs >= rhs - IDENTITY_TOL and size_ok)
    return StatementCheck(
        statement="B",
        passes=passes,
        lhs=float(lhs),
        rhs=float(rhs),
        size_dim=float(v.dim),
        size_bound=size_bound,
        hypothesis_met=None,
        params=params,
        details={"h_total": h_total, "h_proj_x": hp, "h_proj_y": hq},
    )


def check_statement_A(
    p: Dist, q: Dist, v: Subspace, params: StatementParams
) -> StatementCheck:
    """Evaluate the statement-A hypothesis, conclusion, and size bound."""
    if params.c is None:
        raise ValueError("statement A requires c")
    if p.n != q.n or p.n != v.n:
        raise DimensionMismatchError("ambient dimensions differ")
    h_total = shannon_entropy(p) + shannon_entropy(q)
    h_sum = shannon_entropy(xor_convolve(p, q))
    hypothesis_met = bool(h_sum <= (1.0 - params.eta) * h_total + IDENTITY_TOL)
    hp = shannon_entropy(pushforward_quotient(p, v))
    hq = shannon_entropy(pushforward_quotient(q, v))
    lhs = hp + hq
    rhs = (1.0 - params.c) * h_total
    size_bound = None if params.L is None else params.L * h_total
    size_ok = size_bound is None or v.dim <= size_bound + IDENTITY_TOL
    passes = bool(lhs <= rhs + IDENTITY_TOL and size_ok)
    return StatementCheck(
        statement="A",
        passes=passes,
        lhs=float(lhs),
        rhs=float(rhs),
        size_dim=float(v.dim),
        size_bound=size_bound,
        hypothesis_met=hypothesis_met,
        params=params,
        details={"h_total": h_total, "h_sum": h_sum},
    )


def reduce_B_to_A(params: StatementParams, eta_prime: float) -> StatementParams:
    """B(eta, eps, L) implies A(eta', L, eta' - eta - eps) when eta' > eta + eps."""
    if params.epsilon is None:
        raise ValueError("reduction starts from statement-B parameters")
    if not eta_prime > params.eta + params.epsilon:
        raise ValueError("requires eta' > eta + epsilon")
    return StatementParams(
        eta=eta_prime, c=eta_prime - params.eta - params.epsilon, L=params.L
    )


def reduce_A_to_B(params: StatementParams, epsilon: float) -> StatementParams:
    """A(eta, L, c) implies B(eta, eps, ceil(log2(1/eps)/c) * L).

    The multiplier uses base-2 logs to match the entropy unit; c = 1 is
    allowed here (a single application already zeroes the entropy).
    """
    if params.c is None or params.L is None:
        raise ValueError("reduction starts from statement-A parameters (c, L)")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    if not 0.0 < params.c <= 1.0:
        raise ValueError("c must lie in (0, 1]")
    multiplier = max(1, math.ceil(math.log2(1.0 / epsilon) / params.c))
    return StatementParams(eta=params.eta, epsilon=epsilon, L=multiplier * params.L)


# ---------------------------------------------------------------------------
# Traces


TRACE_KINDS = (
    "SUMSET_FIX_1",
    "SUMSET_FIX_2",
    "CASE1",
    "CASE2",
    "ENDGAME",
    "BASE",
    "FALLBACK",
)


@dataclass(frozen=True)
class TraceStep:
    kind: str
    added: Subspace
    dim_total: int
    h_before: float
    h_after: float
    note: dict = field(default_factory=dict)

    @property
    def decrement(self) -> float:
        return self.h_before - self.h_after

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "added": self.added.to_json(),
            "dim_total": self.dim_total,
            "h_before": self.h_before,
            "h_after": self.h_after,
            "decrement": self.decrement,
            "note": self.note,
        }


@dataclass(frozen=True)
class PipelineTrace:
    steps: tuple[TraceStep, ...]
    subspace: Subspace
    certificate: SubspaceCertificate

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "subspace": self.subspace.to_json(),
            "certificate": self.certificate.to_json(),
        }


# ---------------------------------------------------------------------------
# Lemma: make the two derived sumset pairs non-doubling


def _projected_pair(p: Dist, q: Dist, v: Subspace) -> tuple[Dist, Dist]:
    return pushforward_quotient(p, v), pushforward_quotient(q, v)


def make_sumsets_not_double(
    p: Dist, q: Dist, eta0: float, eps0: float, b_solver: BSolver
) -> tuple[Subspace, list[TraceStep]]:
    """Find V so both derived sumset pairs obey the eta0-ratio up to 4 eps0.

    Repeatedly applies the B-solver to whichever of (X1+X2, Y1+Y2) and
    (X1+Y2, Y1+X2) still doubles too much; terminates within ceil(2/eps0)
    applications.
    """
    h_orig = shannon_entropy(p) + shannon_entropy(q)
    v = Subspace.zero(p.n)
    steps: list[TraceStep] = []
    max_steps = math.ceil(2.0 / eps0) + 1
    for _ in range(max_steps):
        pp, qp = _projected_pair(p, q, v)
        a = xor_convolve(pp, pp)
        b = xor_convolve(qp, qp)
        c = xor_convolve(pp, qp)
        s_all = shannon_entropy(xor_convolve(a, b))
        slack = 4.0 * eps0 * h_orig
        ok1 = s_all >= (1.0 - eta0) * (shannon_entropy(a) + shannon_entropy(b)) - slack - IDENTITY_TOL
        ok2 = s_all >= (1.0 - eta0) * (2.0 * shannon_entropy(c)) - slack - IDENTITY_TOL
        if ok1 and ok2:
            return v, steps
        h_before = shannon_entropy(pp) + shannon_entropy(qp)
        if not ok1:
            cert = b_solver(a, b)
            kind = "SUMSET_FIX_1"
        else:
            cert = b_solver(c, c)
            kind = "SUMSET_FIX_2"
        v = subspace_sum(v, cert.subspace)
        pp, qp = _projected_pair(p, q, v)
        h_after = shannon_entropy(pp) + shannon_entropy(qp)
        steps.append(
            TraceStep(
                kind=kind,
                added=cert.subspace,
                dim_total=v.dim,
                h_before=h_before,
                h_after=h_after,
            )
        )
    raise PipelineError(
        f"sumset fixing did not terminate within {max_steps} solver applications"
    )


# ---------------------------------------------------------------------------
# Lemma: size of Y's fibers under nested subspaces


@dataclass(frozen=True)
class YSizeReport:
    h_y_given_w: float
    s_fiber_v: float
    h_w_given_v: float
    holds: bool

    def to_json(self) -> dict:
        return {
            "h_y_given_w": self.h_y_given_w,
            "s_fiber_v": self.s_fiber_v,
            "h_w_given_v": self.h_w_given_v,
            "holds": self.holds,
        }


def y_size_lower_bound_check(p: Dist, q: Dist, w: Subspace, v: Subspace) -> YSizeReport:
    """Check H[Y|pi_W(Y)] >= s[X|pi_V(X); Y|pi_V(Y)] - H[pi_W(X)|pi_V(X)]."""
    if not w.is_subspace_of(v):
        raise ValueError("W must be a subspace of V")
    h_y_given_w = shannon_entropy(q) - shannon_entropy(pushforward_quotient(q, w))
    s_fiber_v = fibring_decompose(p, q, v).s_fiber
    # pi_V(X) is a function of pi_W(X) because W <= V.
    h_w_given_v = shannon_entropy(pushforward_quotient(p, w)) - shannon_entropy(
        pushforward_quotient(p, v)
    )
    return YSizeReport(
        h_y_given_w=float(h_y_given_w),
        s_fiber_v=float(s_fiber_v),
        h_w_given_v=float(h_w_given_v),
        holds=bool(h_y_given_w >= s_fiber_v - h_w_given_v - IDENTITY_TOL),
    )


# ---------------------------------------------------------------------------
# Lemma: local-to-global gluing of per-fiber subspaces


@dataclass(frozen=True)
class LocalToGlobalResult:
    subspace: Subspace
    k: int
    tau: float
    zeta: float
    attempts: int
    seed_label: tuple[int, int]
    h_y_given_proj: float
    h_y_floor: float
    dim_bound: float
    h_sequence: tuple[float, ...]
    exact_expectations: bool
    mc_samples: int

    def to_json(self) -> dict:
        return {
            "subspace": self.subspace.to_json(),
            "k": self.k,
            "tau": self.tau,
            "zeta": self.zeta,
            "attempts": self.attempts,
            "seed_label": list(self.seed_label),
            "h_y_given_proj": self.h_y_given_proj,
            "h_y_floor": self.h_y_floor,
            "dim_bound": self.dim_bound,
            "h_sequence": list(self.h_sequence),
            "exact_expectations": self.exact_expectations,
            "mc_samples": self.mc_samples,
        }


def _h_expectation_sequence(
    fibers_x: FiberFamily,
    fibers_y: FiberFamily,
    v_table: dict[tuple[int, int], Subspace],
    k_max: int,
    rng: np.random.Generator,
    exact_cap: int = 200_000,
    mc_samples: int = 800,
) -> tuple[list[float], bool, int]:
    """h_j = E_{u, w^(1..j)} H[pi_{V(u,w1)+...+V(u,wj)}(X_u)], j = 0..k_max+1.

    Exact dynamic programming over the reachable subspace-sum lattice; falls
    back to Monte-Carlo (recorded) if the transition count explodes.
    """
    n = fibers_x.dists[0].n
    zero = Subspace.zero(n)
    h_cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def push_entropy(ui: int, v: Subspace) -> float:
        key = (ui, v.basis)
        if key not in h_cache:
            h_cache[key] = shannon_entropy(pushforward_quotient(fibers_x.dists[ui], v))
        return h_cache[key]

    h = [0.0] * (k_max + 2)
    h[0] = float(
        sum(w * shannon_entropy(d) for w, d in zip(fibers_x.weights, fibers_x.dists))
    )
    transitions = 0
    exact = True
    states_by_u: list[dict[tuple[int, ...], float]] = [
        {zero.basis: 1.0} for _ in fibers_x.labels
    ]
    sum_cache: dict[tuple[tuple[int, ...], tuple[int, ...]], tuple[int, ...]] = {}
    for j in range(1, k_max + 2):
        total = 0.0
        for ui, (u, wu) in enumerate(zip(fibers_x.labels, fibers_x.weights)):
            states = states_by_u[ui]
            transitions += len(states) * len(fibers_y.labels)
            if transitions > exact_cap:
                exact = False
                break
            new: dict[tuple[int, ...], float] = {}
            for basis, pr in states.items():
                for w, qw in zip(fibers_y.labels, fibers_y.weights):
                    skey = (basis, v_table[(u, w)].basis)
                    merged = sum_cache.get(skey)
                    if merged is None:
                        merged = span(
                            basis + v_table[(u, w)].basis, n
                        ).basis
                        sum_cache[skey] = merged
                    new[merged] = new.get(merged, 0.0) + pr * qw
            states_by_u[ui] = new
            total += wu * sum(
                pr * push_entropy(ui, Subspace(n, basis)) for basis, pr in new.items()
            )
        if not exact:
            break
        h[j] = float(total)
    if exact:
        return h, True, 0

    # Monte-Carlo fallback: sample full sequences, reuse the running sums.
    acc = np.zeros(k_max + 2)
    for _ in range(mc_samples):
        ui = int(rng.choice(len(fibers_x.labels), p=fibers_x.weights))
        u = fibers_x.labels[ui]
        v = zero
        acc[0] += push_entropy(ui, v)
        for j in range(1, k_max + 2):
            wi = int(rng.choice(len(fibers_y.labels), p=fibers_y.weights))
            v = subspace_sum(v, v_table[(u, fibers_y.labels[wi])])
            acc[j] += push_entropy(ui, v)
    return list(acc / mc_samples), False, mc_samples


def local_to_global(
    fibers_x: FiberFamily,
    fibers_y: FiberFamily,
    v_table: dict[tuple[int, int], Subspace],
    zeta: float,
    rng: np.random.Generator,
    seed_label: tuple[int, int] = (0, 0),
) -> LocalToGlobalResult:
    """Glue per-pair subspaces V(u,w) into one V-bar that bites into Y.

    Requires the local interaction hypothesis
    E_{u,w} s[X_u|pi(X_u); Y_w|pi(Y_w)] >= zeta (H[X]+H[Y]); then samples
    u ~ U and w^(1..k) ~ W (seeded), with k chosen by the pigeonhole rule
    h_k - h_{k+1} <= tau h_0 at tau = zeta/2, retrying until
    H[Y|pi(Y)] >= (zeta/4)(H[X]+H[Y]) and dim <= (8/zeta^2) E dim V(u,w).
    """
    if zeta <= 0.0:
        raise ValueError("zeta must be positive")
    x_mix = fibers_x.mixture()
    y_mix = fibers_y.mixture()
    h_total = shannon_entropy(x_mix) + shannon_entropy(y_mix)
    n = x_mix.n

    hyp = 0.0
    e_dim = 0.0
    for wu, u, xu in zip(fibers_x.weights, fibers_x.labels, fibers_x.dists):
        for ww, w, yw in zip(fibers_y.weights, fibers_y.labels, fibers_y.dists):
            v = v_table[(u, w)]
            hyp += wu * ww * fibring_decompose(xu, yw, v).s_fiber
            e_dim += wu * ww * v.dim
    if hyp < zeta * h_total - IDENTITY_TOL:
        raise HypothesisViolationError(
            f"local interaction {hyp:.6g} below zeta*(H[X]+H[Y]) = {zeta * h_total:.6g}",
            gaps=[("local_structure", zeta * h_total, hyp)],
        )

    tau = zeta / 2.0
    k_max = math.ceil(1.0 / tau)
    h_seq, exact, mc_samples = _h_expectation_sequence(
        fibers_x, fibers_y, v_table, k_max, rng
    )
    k = None
    for j in range(k_max + 1):
        if h_seq[j] - h_seq[j + 1] <= tau * h_seq[0] + IDENTITY_TOL:
            k = j
            break
    if k is None:
        raise PipelineError("pigeonhole failed to select k; expectations inconsistent")

    h_y = shannon_entropy(y_mix)
    floor = (zeta / 4.0) * h_total
    dim_bound = (8.0 / zeta**2) * e_dim
    max_attempts = math.ceil(100.0 / zeta)
    labels_u = list(fibers_x.labels)
    labels_w = list(fibers_y.labels)
    for attempt in range(1, max_attempts + 1):
        u = labels_u[int(rng.choice(len(labels_u), p=fibers_x.weights))]
        v_bar = Subspace.zero(n)
        for _ in range(k):
            w = labels_w[int(rng.choice(len(labels_w), p=fibers_y.weights))]
            v_bar = subspace_sum(v_bar, v_table[(u, w)])
        h_y_proj = h_y - shannon_entropy(pushforward_quotient(y_mix, v_bar))
        if h_y_proj >= floor - IDENTITY_TOL and v_bar.dim <= dim_bound + IDENTITY_TOL:
            return LocalToGlobalResult(
                subspace=v_bar,
                k=k,
                tau=tau,
                zeta=zeta,
                attempts=attempt,
                seed_label=seed_label,
                h_y_given_proj=float(h_y_proj),
                h_y_floor=float(floor),
                dim_bound=float(dim_bound),
                h_sequence=tuple(h_seq),
                exact_expectations=exact,
                mc_samples=mc_samples,
            )
    raise SearchFailureError(
        f"local-to-global sampling exhausted {max_attempts} attempts "
        f"(zeta={zeta:.4g}, k={k})"
    )


# ---------------------------------------------------------------------------
# The inductive step


def _capped_fiber_grid(fam_u, fam_w, cap):
    from .endgame import _capped_grid

    return _capped_grid(fam_u, fam_w, cap)


def inductive_step(
    p: Dist,
    q: Dist,
    eta0: float,
    eps0: float,
    b_solver: BSolver,
    *,
    mode: str = MODE_PRACTICAL,
    rng: np.random.Generator | None = None,
    l0: float | None = None,
    fiber_cap: int = 256,
    seed_label: tuple[int, int] = (0, 0),
) -> PipelineTrace:
    """One inductive step: from a B-solver at (eta0, eps0) to a statement-A
    witness at eta0 - eps0.

    Preprocesses with the sumset lemma, then splits on fiber doubling
    (Case 1: same-letter fibers, Case 2: crossed fibers, Case 3: endgame),
    glues the per-fiber subspaces with local_to_global, and verifies the
    statement-A conclusion numerically before returning.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if not 0.0 < eps0 < eta0 <= 0.5:
        raise ValueError("need 0 < eps0 < eta0 <= 1/2")
    if mode == MODE_PAPER and eps0 > (2.0**-15) * eta0**2 + 1e-15:
        raise ValueError("paper-faithful mode requires eps0 <= 2^-15 eta0^2")
    h_in = shannon_entropy(p) + shannon_entropy(q)
    s_in = h_in - shannon_entropy(xor_convolve(p, q))
    if s_in < (eta0 - eps0) * h_in - IDENTITY_TOL:
        raise HypothesisViolationError(
            f"s[X;Y] = {s_in:.6g} below (eta0-eps0)(H[X]+H[Y]) = "
            f"{(eta0 - eps0) * h_in:.6g}",
            gaps=[("doubling_floor", (eta0 - eps0) * h_in, s_in)],
        )

    v0, steps = make_sumsets_not_double(p, q, eta0, eps0, b_solver)
    p0, q0 = _projected_pair(p, q, v0)
    h0 = shannon_entropy(p0) + shannon_entropy(q0)
    c_paper = min(eps0, eta0**2 / 32.0)
    l1_paper = max(12.0 * eps0**-2 * (l0 if l0 is not None else 1.0), 2.0**12 * eta0**-4)

    case_note: dict = {"mode": mode}
    if h0 <= (1.0 - c_paper) * h_in + IDENTITY_TOL:
        v_final = v0
        case_note["early_exit"] = True
    else:
        moves = endgame_move_quantities(p0, q0)
        m1 = moves["fiber_1"][0] - eta0 * moves["fiber_1"][1]
        m2 = moves["fiber_2"][0] - eta0 * moves["fiber_2"][1]
        if mode == MODE_PAPER:
            thresh = 8.0 * eps0 * h0
            if m1 >= thresh:
                candidates = ["CASE1"]
            elif m2 >= thresh:
                candidates = ["CASE2"]
            else:
                candidates = ["ENDGAME"]
        else:
            # Practical mode cascades: try the fiber cases by measured margin
            # and fall through to the endgame if the per-fiber B-subspaces
            # leave no interaction for the gluing lemma to exploit.
            fiber_cases = sorted(
                [(m1, "CASE1"), (m2, "CASE2")], key=lambda t: -t[0]
            )
            candidates = [c for m, c in fiber_cases if m > IDENTITY_TOL]
            candidates.append("ENDGAME")
        case_note.update({"margin_case1": m1, "margin_case2": m2})

        result = None
        failures: list[str] = []
        for case in candidates:
            if case == "CASE1":
                fam_u, fam_w, cap_info = _capped_fiber_grid(
                    sum_fibers(p0, p0), sum_fibers(q0, q0), fiber_cap
                )
                v_table = {
                    (u, w): b_solver(xu, yw).subspace
                    for u, xu in zip(fam_u.labels, fam_u.dists)
                    for w, yw in zip(fam_w.labels, fam_w.dists)
                }
                zeta_paper = 7.0 * eps0
            elif case == "CASE2":
                fam_u, fam_w, cap_info = _capped_fiber_grid(
                    sum_fibers(p0, q0), sum_fibers(q0, p0), fiber_cap
                )
                v_table = {
                    (u, w): b_solver(xu, yw).subspace
                    for u, xu in zip(fam_u.labels, fam_u.dists)
                    for w, yw in zip(fam_w.labels, fam_w.dists)
                }
                zeta_paper = 7.0 * eps0
            else:
                if mode == MODE_PAPER:
                    eta_e = eta0 - 2.0 * eps0
                    kappa = 12.0 * eps0 * h0
                else:
                    s0 = h0 - shannon_entropy(xor_convolve(p0, q0))
                    eta_e = min(max(s0 / h0 if h0 > 0 else 0.0, 1e-9), 0.5)
                    kappa = measure_endgame_kappa(p0, q0, eta_e)
                try:
                    transcript = endgame(p0, q0, eta_e, kappa, fiber_cap=fiber_cap)
                except HypothesisViolationError as exc:
                    failures.append(f"ENDGAME hypotheses: {exc}")
                    continue
                fam_u, fam_w, v_table = endgame_fiber_systems(transcript, p0, q0)
                cap_info = transcript.fiber_cap
                zeta_paper = eta0**2 / 8.0
                case_note.update({"eta_endgame": eta_e, "kappa": kappa})

            if mode == MODE_PAPER:
                zeta = zeta_paper
            else:
                hyp = 0.0
                for wu, u, xu in zip(fam_u.weights, fam_u.labels, fam_u.dists):
                    for ww, w, yw in zip(fam_w.weights, fam_w.labels, fam_w.dists):
                        hyp += (
                            wu * ww * fibring_decompose(xu, yw, v_table[(u, w)]).s_fiber
                        )
                zeta = (hyp / h0) * (1.0 - 1e-12) if h0 > 0 else 0.0
                if zeta <= 1e-9:
                    failures.append(f"{case}: measured zeta {zeta:.3g} too small")
                    continue
            try:
                result = local_to_global(fam_u, fam_w, v_table, zeta, rng, seed_label)
            except (HypothesisViolationError, SearchFailureError) as exc:
                failures.append(f"{case}: {exc}")
                continue
            case_note.update({"case": case, "fiber_cap": cap_info})
            break
        if result is None:
            raise HypothesisViolationError(
                "no case of the inductive step made progress: " + "; ".join(failures)
            )
        v_final = subspace_sum(v0, result.subspace)
        case_note["local_to_global"] = result.to_json()
        p1, q1 = _projected_pair(p, q, v_final)
        steps.append(
            TraceStep(
                kind=case_note["case"],
                added=result.subspace,
                dim_total=v_final.dim,
                h_before=h0,
                h_after=shannon_entropy(p1) + shannon_entropy(q1),
                note=case_note,
            )
        )

    p1, q1 = _projected_pair(p, q, v_final)
    h1 = shannon_entropy(p1) + shannon_entropy(q1)
    c_meas = 1.0 - h1 / h_in if h_in > 0 else 1.0
    if c_meas <= IDENTITY_TOL:
        raise PipelineError(
            f"inductive step produced no entropy decrement (c = {c_meas:.3g})"
        )
    if mode == MODE_PAPER:
        params = StatementParams(eta=eta0 - eps0, c=c_paper, L=l1_paper)
    else:
        c_used = min(c_meas * (1.0 - 1e-12), 1.0 - 1e-12)
        l_used = v_final.dim / h_in if h_in > 0 else 0.0
        params = StatementParams(eta=eta0 - eps0, c=c_used, L=l_used + IDENTITY_TOL)
    chk = check_statement_A(p, q, v_final, params)
    if not chk.passes or not chk.hypothesis_met:
        raise PipelineError(
            f"statement-A verification failed after the inductive step: {chk.to_json()}"
        )
    cert = SubspaceCertificate(
        criterion=CRITERION_A,
        search_mode="pipeline",
        subspace=v_final,
        parameters={
            "eta0": eta0,
            "eps0": eps0,
            "mode": mode,
            "c_paper": c_paper,
            "l1_paper": l1_paper,
            "c_measured": c_meas,
            **params.to_json(),
        },
        achieved={
            "dim": v_final.dim,
            "h_in": h_in,
            "h_out": h1,
            "lhs": chk.lhs,
            "rhs": chk.rhs,
        },
        inputs={"p": p.digest(), "q": q.digest()},
    )
    return PipelineTrace(steps=tuple(steps), subspace=v_final, certificate=cert)


# ---------------------------------------------------------------------------
# Theorem: statement B via recursion on eta


@dataclass
class _SolveContext:
    rng: np.random.Generator
    mode: str
    seed: int
    fiber_cap: int
    memo: dict = field(default_factory=dict)
    depth: int = 0
    max_depth: int = 48
    invocations: int = 0
    max_invocations: int = 30_000
    l2g_counter: int = 0


@dataclass(frozen=True)
class SolveResult:
    certificate: SubspaceCertificate
    steps: tuple[TraceStep, ...]
    check: StatementCheck
    mode: str
    seed: int

    @property
    def subspace(self) -> Subspace:
        return self.certificate.subspace

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "check": self.check.to_json(),
            "mode": self.mode,
            "seed": self.seed,
        }


def _b_certificate(
    p: Dist,
    q: Dist,
    v: Subspace,
    eta: float,
    eps: float,
    mode: str,
    chk: StatementCheck,
) -> SubspaceCertificate:
    h_total = chk.details["h_total"]
    achieved_l = v.dim / h_total if h_total > 0 else 0.0
    return SubspaceCertificate(
        criterion=CRITERION_B,
        search_mode="pipeline",
        subspace=v,
        parameters={"eta": eta, "epsilon": eps, "mode": mode, "L_achieved": achieved_l},
        achieved={
            "dim": v.dim,
            "lhs": chk.lhs,
            "rhs": chk.rhs,
            "h_total": h_total,
            "h_proj_x": chk.details["h_proj_x"],
            "h_proj_y": chk.details["h_proj_y"],
        },
        inputs={"p": p.digest(), "q": q.digest()},
    )


def _greedy_vector_step(p: Dist, q: Dist, v: Subspace) -> tuple[Subspace, float] | None:
    """Add the single vector minimizing H[pi(X)]+H[pi(Y)]; lex tie-break."""
    best_vec, best_h = None, np.inf
    seen: set[int] = set()
    for x in range(1, 1 << p.n):
        vec = v.reduce(x)
        if vec == 0 or vec in seen:
            continue
        seen.add(vec)
        cand = span(v.basis + (vec,), p.n)
        h = shannon_entropy(pushforward_quotient(p, cand)) + shannon_entropy(
            pushforward_quotient(q, cand)
        )
        if h < best_h - 1e-15 or (h < best_h + 1e-15 and (best_vec is None or vec < best_vec)):
            best_vec, best_h = vec, h
    if best_vec is None:
        return None
    return span(v.basis + (best_vec,), p.n), float(best_h)


def _solve_b(
    p: Dist, q: Dist, eta: float, eps: float, ctx: _SolveContext
) -> tuple[SubspaceCertificate, tuple[TraceStep, ...]]:
    key = (p.digest(), q.digest(), round(eta, 12), round(eps, 12))
    if key in ctx.memo:
        return ctx.memo[key]
    ctx.invocations += 1
    if ctx.invocations > ctx.max_invocations:
        raise PipelineError("solver invocation budget exhausted")
    ctx.depth += 1
    try:
        result = _solve_b_inner(p, q, eta, eps, ctx)
    finally:
        ctx.depth -= 1
    ctx.memo[key] = result
    return result


def _solve_b_inner(
    p: Dist, q: Dist, eta: float, eps: float, ctx: _SolveContext
) -> tuple[SubspaceCertificate, tuple[TraceStep, ...]]:
    if ctx.depth > ctx.max_depth:
        raise PipelineError(f"recursion depth cap {ctx.max_depth} exceeded")
    n = p.n
    params = StatementParams(eta=eta, epsilon=eps)
    v = Subspace.zero(n)
    steps: list[TraceStep] = []

    # Base case: H[X+Y] >= max(H[X], H[Y]) makes eta = 1/2 unconditional.
    if eta >= 0.5 - 1e-12:
        chk = check_statement_B(p, q, v, params)
        if not chk.passes:
            raise PipelineError(
                "base case failed: H[X+Y] < (H[X]+H[Y])/2 - eps, which is impossible"
            )
        steps.append(
            TraceStep(
                kind="BASE",
                added=v,
                dim_total=0,
                h_before=chk.details["h_total"],
                h_after=chk.details["h_total"],
                note={"base_case": True},
            )
        )
        return _b_certificate(p, q, v, eta, eps, ctx.mode, chk), tuple(steps)

    cap = max(16, math.ceil(4.0 / eps))
    for _ in range(cap + 1):
        chk = check_statement_B(p, q, v, params)
        if chk.passes:
            return _b_certificate(p, q, v, eta, eps, ctx.mode, chk), tuple(steps)
        pp, qp = _projected_pair(p, q, v)
        h_before = shannon_entropy(pp) + shannon_entropy(qp)
        if ctx.mode == MODE_PAPER:
            eps0 = (2.0**-15) * eta * eta
        else:
            eps0 = max((0.5 - eta) / 2.0, 0.02)
        eta0 = min(0.5, eta + eps0)
        eps0 = min(eps0, eta0 - eta if eta0 > eta else eps0)
        eps0 = max(eps0, 1e-12)

        def sub_solver(a: Dist, b: Dist) -> SubspaceCertificate:
            return _solve_b(a, b, eta0, eps0, ctx)[0]

        ctx.l2g_counter += 1
        seed_label = (ctx.seed, ctx.l2g_counter)
        try:
            tr = inductive_step(
                pp,
                qp,
                eta0,
                eps0,
                sub_solver,
                mode=ctx.mode,
                rng=ctx.rng,
                fiber_cap=ctx.fiber_cap,
                seed_label=seed_label,
            )
            added = tr.subspace
            kind = tr.steps[-1].kind if tr.steps else "CASE1"
            note = {"inductive": [s.kind for s in tr.steps]}
        except (HypothesisViolationError, SearchFailureError, PipelineError) as exc:
            if ctx.mode == MODE_PAPER:
                raise
            fallback = _greedy_vector_step(pp, qp, Subspace.zero(n))
            if fallback is None:
                raise PipelineError(f"no fallback vector available after: {exc}") from exc
            added, _ = fallback
            kind = "FALLBACK"
            note = {"reason": str(exc)}
        v_new = subspace_sum(v, added)
        pp2, qp2 = _projected_pair(p, q, v_new)
        h_after = shannon_entropy(pp2) + shannon_entropy(qp2)
        if h_after > h_before - IDENTITY_TOL and v_new.dim <= v.dim:
            raise PipelineError("pipeline stalled: no entropy decrement and no new dims")
        steps.append(
            TraceStep(
                kind=kind,
                added=added,
                dim_total=v_new.dim,
                h_before=h_before,
                h_after=h_after,
                note=note,
            )
        )
        v = v_new
    raise PipelineError(f"statement-B loop exceeded {cap} pushforward rounds")


def solve_B(
    p: Dist,
    q: Dist,
    eta: float,
    epsilon: float,
    *,
    mode: str = MODE_PRACTICAL,
    seed: int = 0,
    fiber_cap: int = 256,
) -> SolveResult:
    """Produce a verified statement-B subspace certificate for (eta, epsilon).

    Follows the inductive recursion on eta up to the 1/2 base case; the
    final certificate reports the achieved (eta, epsilon, dim V), never the
    analysis' worst-case size constant.
    """
    if p.n != q.n:
        raise DimensionMismatchError("ambient dimensions differ")
    if mode not in (MODE_PRACTICAL, MODE_PAPER):
        raise ValueError(f"unknown mode {mode!r}")
    StatementParams(eta=eta, epsilon=epsilon)
    ctx = _SolveContext(
        rng=np.random.default_rng(seed), mode=mode, seed=seed, fiber_cap=fiber_cap
    )
    cert, steps = _solve_b(p, q, eta, epsilon, ctx)
    chk = check_statement_B(
        p, q, cert.subspace,
        StatementParams(eta=eta, epsilon=epsilon, L=cert.parameters["L_achieved"] + IDENTITY_TOL),
    )
    if not chk.passes:
        raise PipelineError("final statement-B re-verification failed")
    return SolveResult(certificate=cert, steps=steps, check=chk, mode=mode, seed=seed)


# ---------------------------------------------------------------------------
# Corollaries


CRITERION_RICH = "RICH_COSETS"
CRITERION_MANY = "MANY_SUMS"


def rich_cosets(
    p: Dist,
    q: Dist,
    epsilon: float,
    *,
    mode: str = MODE_PRACTICAL,
    seed: int = 0,
    fiber_cap: int = 256,
) -> SolveResult:
    """Find V with H[X|pi(X)], H[Y|pi(Y)] >= s - epsilon(H[X]+H[Y]).

    Runs solve_B at eta = eps = epsilon/2 and verifies the conditional
    entropy bounds through the fibring chain.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    h_total = shannon_entropy(p) + shannon_entropy(q)
    s = h_total - shannon_entropy(xor_convolve(p, q))
    inner = solve_B(
        p, q, epsilon / 2.0, epsilon / 2.0, mode=mode, seed=seed, fiber_cap=fiber_cap
    )
    v = inner.subspace
    report = fibring_decompose(p, q, v)
    hx_cond = shannon_entropy(p) - shannon_entropy(pushforward_quotient(p, v))
    hy_cond = shannon_entropy(q) - shannon_entropy(pushforward_quotient(q, v))
    bound = s - epsilon * h_total
    ok = (
        report.s_quotient <= epsilon * h_total + IDENTITY_TOL
        and hx_cond >= bound - IDENTITY_TOL
        and hy_cond >= bound - IDENTITY_TOL
    )
    if not ok:
        raise PipelineError(
            f"rich-cosets verification failed: s_q={report.s_quotient:.6g}, "
            f"hx|pi={hx_cond:.6g}, hy|pi={hy_cond:.6g}, bound={bound:.6g}"
        )
    cert = SubspaceCertificate(
        criterion=CRITERION_RICH,
        search_mode="pipeline",
        subspace=v,
        parameters={"epsilon": epsilon, "mode": mode, "seed": seed},
        achieved={
            "dim": v.dim,
            "s": s,
            "s_quotient": report.s_quotient,
            "s_fiber": report.s_fiber,
            "residual_mi": report.residual_mi,
            "h_x_given_proj": hx_cond,
            "h_y_given_proj": hy_cond,
            "bound": bound,
            "h_total": h_total,
        },
        inputs={"p": p.digest(), "q": q.digest()},
    )
    return SolveResult(
        certificate=cert, steps=inner.steps, check=inner.check, mode=mode, seed=seed
    )


def many_sums(
    dists: Sequence[Dist],
    epsilon: float,
    *,
    mode: str = MODE_PRACTICAL,
    seed: int = 0,
    fiber_cap: int = 256,
) -> SolveResult:
    """k-fold version: H[pi(X_1)+...+pi(X_k)] >= sum H[pi(X_i)] - eps sum H[X_i].

    Iteratively fixes the first prefix pair violating the delta-gap via
    rich_cosets (delta = eps/(k-1)), accumulating the lifted subspaces.
    """
    k = len(dists)
    if not 2 <= k <= 4:
        raise ValueError("many_sums supports 2..4 variables")
    n = dists[0].n
    if any(d.n != n for d in dists):
        raise DimensionMismatchError("ambient dimensions differ")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    delta = epsilon / (k - 1)
    s_h = sum(shannon_entropy(d) for d in dists)
    w = Subspace.zero(n)
    steps: list[TraceStep] = []
    max_rounds = math.ceil(2.0 / delta) + 2
    for _ in range(max_rounds):
        pushed = [pushforward_quotient(d, w) for d in dists]
        violated = None
        for j in range(1, k):
            prefix = pushed[0]
            for extra in pushed[1:j]:
                prefix = xor_convolve(prefix, extra)
            lhs = shannon_entropy(xor_convolve(prefix, pushed[j]))
            gap_rhs = (
                shannon_entropy(prefix) + shannon_entropy(pushed[j]) - delta * s_h
            )
            if lhs < gap_rhs - IDENTITY_TOL:
                violated = (j, prefix, pushed[j])
                break
        if violated is None:
            break
        j, prefix, tail = violated
        sub = rich_cosets(
            prefix, tail, delta / 2.0, mode=mode, seed=seed, fiber_cap=fiber_cap
        )
        h_before = sum(shannon_entropy(d) for d in pushed)
        w = subspace_sum(w, sub.subspace)
        h_after = sum(
            shannon_entropy(pushforward_quotient(d, w)) for d in dists
        )
        steps.append(
            TraceStep(
                kind="SUMSET_FIX_1",
                added=sub.subspace,
                dim_total=w.dim,
                h_before=h_before,
                h_after=h_after,
                note={"prefix_length": j},
            )
        )
    else:
        raise PipelineError(f"many_sums did not stabilize within {max_rounds} rounds")

    pushed = [pushforward_quotient(d, w) for d in dists]
    total = pushed[0]
    for extra in pushed[1:]:
        total = xor_convolve(total, extra)
    lhs = shannon_entropy(total)
    rhs = sum(shannon_entropy(d) for d in pushed) - epsilon * s_h
    if lhs < rhs - IDENTITY_TOL:
        raise PipelineError("many_sums final inequality failed verification")
    cert = SubspaceCertificate(
        criterion=CRITERION_MANY,
        search_mode="pipeline",
        subspace=w,
        parameters={"epsilon": epsilon, "k": k, "delta": delta, "mode": mode, "seed": seed},
        achieved={
            "dim": w.dim,
            "lhs": lhs,
            "rhs": rhs,
            "h_total": s_h,
            "h_proj": [shannon_entropy(d) for d in pushed],
        },
        inputs={f"x{i}": d.digest() for i, d in enumerate(dists)},
    )
    chk = StatementCheck(
        statement="MANY_SUMS",
        passes=True,
        lhs=float(lhs),
        rhs=float(rhs),
        size_dim=float(w.dim),
        size_bound=None,
        hypothesis_met=None,
        params=StatementParams(eta=0.5, epsilon=epsilon),
    )
    return SolveResult(certificate=cert, steps=tuple(steps), check=chk, mode=mode, seed=seed)


def analyze_set(
    elements: Sequence[int],
    n: int,
    epsilon: float,
    *,
    mode: str = MODE_PRACTICAL,
    seed: int = 0,
    fiber_cap: int = 256,
) -> SolveResult:
    """Subspace certificate for a concrete set with moderate doubling.

    Measures eta from |A+A| = |A|^(2-eta), runs rich_cosets on X = Y = U_A,
    and verifies both E_{a in A} log2|A cap (V+a)| >= (eta - eps) log2|A| and
    the exact identity with H[U_A | pi_V(U_A)].
    """
    from .dist import uniform_on
    from .families import doubling_stats
    from .gf2 import coset_decompose

    members = sorted(set(elements))
    if not members:
        raise EmptySupportError("analyze_set requires a nonempty set")
    stats = doubling_stats(members)
    u_a = uniform_on(members, n)
    inner = rich_cosets(u_a, u_a, epsilon / 2.0, mode=mode, seed=seed, fiber_cap=fiber_cap)
    v = inner.subspace
    size = len(members)
    parts = coset_decompose(members, v)
    expected_log = sum(len(part) * math.log2(len(part)) for part in parts.values()) / size
    h_cond = shannon_entropy(u_a) - shannon_entropy(pushforward_quotient(u_a, v))
    identity_gap = abs(expected_log - h_cond)
    bound = (stats.eta - epsilon) * math.log2(size) if size > 1 else 0.0
    if identity_gap > IDENTITY_TOL:
        raise PipelineError(f"coset-size identity failed: gap {identity_gap:.3g}")
    if expected_log < bound - IDENTITY_TOL:
        raise PipelineError(
            f"intersection bound failed: {expected_log:.6g} < {bound:.6g}"
        )
    cert = SubspaceCertificate(
        criterion=CRITERION_T11,
        search_mode="pipeline",
        subspace=v,
        parameters={"epsilon": epsilon, "mode": mode, "seed": seed},
        achieved={
            "dim": v.dim,
            "set_size": size,
            "sumset_size": stats.sumset_size,
            "eta": stats.eta,
            "expected_log_intersection": expected_log,
            "h_cond": h_cond,
            "identity_gap": identity_gap,
            "bound": bound,
        },
        inputs={"set": [format(x, "x") for x in members], "n": n},
    )
    return SolveResult(
        certificate=cert, steps=inner.steps, check=inner.check, mode=mode, seed=seed
    )
