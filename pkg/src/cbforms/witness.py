"""Lower-bound witnesses for the completely bounded norm.

The completely bounded norm of a form is the supremum of the operator
norm over contractive matrix substitutions, so any explicit contractive
assignment certifies a lower bound.  Four constructions are provided:

* sign-baseline: scalar +-1 substitution; random blocks plus a sign
  readout of one block give the multilinear Khintchine bound.
* scalar-phase: 1x1 complex phases tailored to the address form; the
  phases align all 2^d branches and achieve 2^{d/2} exactly.
* polar (homogeneous and general): sample Haar unitaries for all inner
  variables, take polar decompositions M_i = U_i P_i of the coefficient
  blocks, and substitute V_i = U_0 U_i* for the outer variables.  The
  assembled matrix is P_0 + sum_i P_i up to the outer unitary; its norm
  dominates the normalized trace, which concentrates on the free limit
  sum_i ||q_i||_2^2 / ||M_i||, giving sum_i ||q_i||_2 up to the
  sqrt(e (d+1)) factor from the norm of a degree-d polynomial in free
  Haar unitaries.

Reports carry the seed derivation of the run that produced the achieved
value, so every number is replayable bit for bit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .forms import BlockMultilinearForm
from .matnum import (DEFAULT_DIM_SCHEDULE, Seed, haar_unitary, operator_norm,
                     operator_norm_svd, polar)
from .ncpoly import NCPolynomial, evaluate_nc, form_to_ncpoly
from .quantum import address_form

METHODS = ("sign-baseline", "scalar-phase", "polar-homogeneous", "polar-general")


@dataclass
class WitnessReport:
    """Outcome of one witness run.

    achieved is the certified value (operator norm at the contractive
    assignment, or the empirical mean for the sign baseline); target is
    the theory floor the construction aims for.  selected_block is the
    block the construction pulled out, when meaningful.
    """

    method: str
    achieved: float
    target: float
    N: int
    seed: Seed | None
    unitarity_residual: float
    selected_block: int | None = None
    wall_time_s: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "method": self.method,
            "achieved": self.achieved,
            "target": self.target,
            "N": self.N,
            "seed": None if self.seed is None else self.seed.to_dict(),
            "unitarity_residual": self.unitarity_residual,
            # 1-based at the serialization boundary, like form blocks
            "selected_block": None if self.selected_block is None else self.selected_block + 1,
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time_s
        return out


def influence_floor(f: BlockMultilinearForm) -> float:
    """Var[f]^2 / (e (d+1)^4): every form with completely bounded norm
    at most 1 has some influence at least this large."""
    var = f.variance()
    return var * var / (math.e * (f.d + 1) ** 4)


def check_influence_floor(f: BlockMultilinearForm) -> bool:
    _, _, maxinf = f.max_influence()
    return maxinf >= influence_floor(f)


# -- sign baseline -------------------------------------------------------


def sign_baseline(f: BlockMultilinearForm, trials: int, seed: Seed) -> WitnessReport:
    """Scalar witness: for each block b, sample the other blocks at
    random and read block b off with the sign of its coefficient slice;
    the per-trial value is sum_i |slice_i|.  Reports the best block by
    empirical mean (ties: larger theory target, then lower block).

    The target applies the Khintchine bound E|g| >= 2^{-deg(g)/2} ||g||_2
    to the degree-(d-1) slices: 2^{-(d-1)/2} sum_i Inf_{b,i}(f)^{1/2}.
    """
    if not f.is_homogeneous():
        raise ValueError("sign baseline requires a homogeneous form")
    if trials < 1:
        raise ValueError("trials must be positive")
    t0 = time.perf_counter()
    d, n = f.d, f.n
    if f.num_terms() == 0:
        return WitnessReport(method="sign-baseline", achieved=0.0, target=0.0, N=1,
                             seed=seed, unitarity_residual=0.0, selected_block=None,
                             wall_time_s=time.perf_counter() - t0)

    # slices[b][i]: list of (other-block variables, coeff) for monomials
    # containing x_b(i)
    slices: list[dict[int, list[tuple[tuple, float]]]] = [dict() for _ in range(d)]
    for (blocks, indices), coeff in f.terms.items():
        for k, (b, i) in enumerate(zip(blocks, indices)):
            rest = tuple(v for j, v in enumerate(zip(blocks, indices)) if j != k)
            slices[b].setdefault(i, []).append((rest, coeff))

    rng = seed.rng()
    sums = np.zeros(d)
    for _ in range(trials):
        x = 1.0 - 2.0 * rng.integers(0, 2, size=(d, n)).astype(float)
        for b in range(d):
            total = 0.0
            for _, mono_list in slices[b].items():
                val = 0.0
                for rest, coeff in mono_list:
                    prod = coeff
                    for bb, ii in rest:
                        prod *= x[bb, ii]
                    val += prod
                total += abs(val)
            sums[b] += total
    means = sums / trials

    khintchine = 0.5 ** ((d - 1) / 2.0)
    inf = f.influences()
    targets = khintchine * np.sqrt(inf).sum(axis=1)
    best = max(range(d), key=lambda b: (means[b], targets[b], -b))
    return WitnessReport(method="sign-baseline", achieved=float(means[best]),
                         target=float(targets[best]), N=1, seed=seed,
                         unitarity_residual=0.0, selected_block=best,
                         wall_time_s=time.perf_counter() - t0)


# -- scalar phase witness for the address form ---------------------------


def scalar_phase_address_witness(d: int) -> WitnessReport:
    """1x1 complex witness on the degree-(d+1) address form.

    Address blocks take x_b(1) = 1 and x_b(2) = i, making every selector
    branch a phase of modulus 2^{-d/2}; the data block conjugates those
    phases, so all 2^d branches add up on the positive real axis to
    2^{d/2} exactly.
    """
    t0 = time.perf_counter()
    f = address_form(d)
    value, residual = _scalar_phase_value(f, d)
    return WitnessReport(method="scalar-phase", achieved=abs(value),
                         target=float(2.0 ** (d / 2.0)), N=1, seed=None,
                         unitarity_residual=residual, selected_block=d,
                         wall_time_s=time.perf_counter() - t0)


def scalar_phase_assignment(d: int) -> dict[tuple[int, int], complex]:
    """The phases behind the scalar witness, as plain complex numbers."""
    assign: dict[tuple[int, int], complex] = {}
    for b in range(d):
        assign[(b, 0)] = 1.0 + 0.0j
        assign[(b, 1)] = 1.0j
    for a in range(1 << d):
        bits = [(a >> (d - 1 - j)) & 1 for j in range(d)]
        branch = 1.0 + 0.0j
        for bit in bits:
            branch *= (1.0 + (-1.0 if bit else 1.0) * 1.0j) / 2.0
        data = 0
        for bit in bits:
            data = (data << 1) | bit
        assign[(d, data)] = branch.conjugate() / abs(branch)
    return assign


def _scalar_phase_value(f: BlockMultilinearForm, d: int) -> tuple[complex, float]:
    assign = scalar_phase_assignment(d)
    total = complex(f.constant)
    for (blocks, indices), coeff in f.terms.items():
        prod = complex(coeff)
        for var in zip(blocks, indices):
            prod *= assign[var]
        total += prod
    residual = max(abs(abs(z) ** 2 - 1.0) for z in assign.values())
    return total, residual


# -- polar construction ---------------------------------------------------


def _split_outer(p: NCPolynomial, outer_vars, side: str):
    """Split p = sum_i y_i q_i + q_0 (side left) or sum_i q_i y_i + q_0
    (side right).  Outer variables may appear only in the outer slot."""
    outer = set(outer_vars)
    q_terms: dict[object, dict[tuple, float]] = {y: {} for y in outer}
    q_const: dict[object, float] = {y: 0.0 for y in outer}
    q0_terms: dict[tuple, float] = {}
    for word, coeff in p.terms.items():
        slot = word[0] if side == "left" else word[-1]
        rest = word[1:] if side == "left" else word[:-1]
        if any(v in outer for v in rest):
            raise ValueError(f"outer variable appears in an inner position of {word}")
        if slot in outer:
            if rest:
                q_terms[slot][rest] = coeff
            else:
                q_const[slot] += coeff
        else:
            q0_terms[word] = coeff
    qs = {y: NCPolynomial(q_terms[y], q_const[y]) for y in outer}
    q0 = NCPolynomial(q0_terms, p.constant)
    return qs, q0


def polar_witness(p: NCPolynomial, outer_vars, dim: int, seed: Seed,
                  side: str = "left") -> tuple[WitnessReport, dict]:
    """Haar-plus-polar witness for p = sum_i y_i q_i + q_0.

    Inner variables get independent Haar unitaries W; each coefficient
    block M_i = q_i(W) contributes its polar unitary, and the outer
    variables are set to V_i = U_0 U_i* (left side; the mirror product
    on the right side).  That substitution turns the sum into
    U_0 (P_0 + sum_i P_i), whose norm is at least the trace bound
    sum_i tr(P_i^2) / ||P_i||, concentrating on the free-probability
    floor.  Returns the report and the full assignment.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if dim < 1:
        raise ValueError("dimension must be positive")
    t0 = time.perf_counter()
    qs, q0 = _split_outer(p, outer_vars, side)

    inner_vars = sorted({v for q in qs.values() for v in q.variables()} | set(q0.variables()))
    rng = seed.rng()
    assignment: dict = {z: haar_unitary(dim, rng) for z in inner_vars}

    if q0.is_zero():
        u0 = np.eye(dim, dtype=complex)
    else:
        m0 = evaluate_nc(q0, assignment, dim=dim)
        u0 = polar(m0, side=side).unitary

    norm_sum = 0.0
    for y in sorted(qs):
        q = qs[y]
        if q.is_zero():
            # vanishing coefficient block: any contraction works, use identity
            assignment[y] = np.eye(dim, dtype=complex)
            continue
        m = evaluate_nc(q, assignment, dim=dim)
        u = polar(m, side=side).unitary
        if side == "left":
            assignment[y] = u0 @ u.conj().T
        else:
            assignment[y] = u.conj().T @ u0
        norm_sum += q.l2_norm()

    value = evaluate_nc(p, assignment, dim=dim) if not p.is_zero() else np.zeros((dim, dim))
    achieved = operator_norm(value)

    deg = p.degree()
    if p.is_homogeneous():
        target = norm_sum / math.sqrt(math.e * (deg + 1))
    else:
        target = norm_sum / (math.sqrt(math.e) * (deg + 1))

    residual = 0.0
    for mat in assignment.values():
        residual = max(residual, operator_norm_svd(mat @ mat.conj().T - np.eye(dim)))
    method = "polar-homogeneous" if p.is_homogeneous() else "polar-general"
    report = WitnessReport(method=method, achieved=achieved, target=target, N=dim,
                           seed=seed, unitarity_residual=residual,
                           wall_time_s=time.perf_counter() - t0)
    return report, assignment


def root_influence_witness(f: BlockMultilinearForm, side: str = "first",
                           schedule=DEFAULT_DIM_SCHEDULE,
                           seed: Seed = Seed(0)) -> WitnessReport:
    """Polar witness for a homogeneous form, pulled out at the first or
    last block; targets (e (d+1))^{-1/2} sum_i Inf_{b,i}(f)^{1/2}.

    Runs the construction at every dimension in the schedule and keeps
    the best achieved value; the report's seed replays that single run.
    """
    if side not in ("first", "last"):
        raise ValueError("side must be 'first' or 'last'")
    if not f.is_homogeneous():
        raise ValueError("root-influence witness requires a homogeneous form")
    t0 = time.perf_counter()
    d = f.d
    b = 0 if side == "first" else d - 1
    inf = f.influences()[b]
    target = float(np.sqrt(inf).sum() / math.sqrt(math.e * (d + 1)))
    if f.num_terms() == 0:
        return WitnessReport(method="polar-homogeneous", achieved=0.0, target=0.0,
                             N=int(schedule[0]), seed=seed, unitarity_residual=0.0,
                             selected_block=b, wall_time_s=time.perf_counter() - t0)

    p = form_to_ncpoly(f)
    outer = [(b, i) for i in range(f.n) if inf[i] > 0.0]
    polar_side = "left" if side == "first" else "right"
    best = None
    for dim in schedule:
        child = seed.child(int(dim))
        rep, _ = polar_witness(p, outer, int(dim), child, side=polar_side)
        if best is None or rep.achieved > best.achieved:
            best = rep
    return WitnessReport(method="polar-homogeneous", achieved=best.achieved,
                         target=target, N=best.N, seed=best.seed,
                         unitarity_residual=best.unitarity_residual,
                         selected_block=b, wall_time_s=time.perf_counter() - t0)


def general_form_witness(f: BlockMultilinearForm, schedule=DEFAULT_DIM_SCHEDULE,
                         seed: Seed = Seed(0)) -> WitnessReport:
    """Polar witness for an arbitrary form.

    Picks the leading block beta with the largest variance share (ties:
    lowest block), zeroes all earlier blocks, and pulls out block beta;
    the remaining tail plus the constant ride along as q_0.  Targets
    Var[f] / (sqrt(e) (d+1)^2 MaxInf(f)^{1/2}).
    """
    t0 = time.perf_counter()
    d = f.d
    var = f.variance()
    if var == 0.0:
        return WitnessReport(method="polar-general", achieved=abs(f.constant),
                             target=0.0, N=int(schedule[0]), seed=seed,
                             unitarity_residual=0.0, selected_block=None,
                             wall_time_s=time.perf_counter() - t0)
    parts = f.leading_block_decomposition()
    variances = [part.variance() for part in parts]
    beta = max(range(d), key=lambda b: (variances[b], -b))

    _, _, maxinf = f.max_influence()
    target = var / (math.sqrt(math.e) * (d + 1) ** 2 * math.sqrt(maxinf))

    # zeroing blocks before beta keeps exactly the monomials that start
    # at beta or later
    terms = {key: c for key, c in f.terms.items() if key[0][0] >= beta}
    p = NCPolynomial({tuple(zip(bl, ix)): c for (bl, ix), c in terms.items()},
                     constant=f.constant)
    outer = sorted({(beta, ix[0]) for (bl, ix) in terms if bl[0] == beta})

    best = None
    for dim in schedule:
        child = seed.child(int(dim))
        rep, _ = polar_witness(p, outer, int(dim), child, side="left")
        if best is None or rep.achieved > best.achieved:
            best = rep
    return WitnessReport(method="polar-general", achieved=best.achieved,
                         target=target, N=best.N, seed=best.seed,
                         unitarity_residual=best.unitarity_residual,
                         selected_block=beta, wall_time_s=time.perf_counter() - t0)
