"""Outer saddle-point solver over the multiplier pair (lambda, beta).

The dual function g(lambda, beta) is the value of the inner beamforming
subproblem plus the multiplier terms; it is concave, and a subgradient at an
admissible pair is available in closed form from the inner minimizer:

    dg/dlambda  = Tr(V V^H) - P
    dg/dbeta_l  = 2 (e_l - J_V beta_l)

Ascent runs with a diminishing step; whenever a tentative pair turns out
inadmissible (the uplink subproblem detects it), the step is halved and the
move retried from the last admissible point.

Two tracking mechanisms close the duality gap certificate:

* every admissible iterate yields a feasible primal candidate by scaling the
  recovered beamformer up to the full power budget (scaling up can only
  raise SINRs), and the best candidate is kept;
* a periodic polish bisects lambda at a fixed beta toward the point where
  the recovered power meets the budget.  The dual function is concave in
  lambda, so the recovered power is non-increasing in lambda and the
  bisection is exact; an inadmissible probe simply means lambda is too
  small.  Each probe is itself a valid dual evaluation, so the polish
  tightens both sides of the gap without altering the ascent iterates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import fim, uplink
from .errors import Infeasible, Stalled
from .problem import Scenario, downlink_sinr
from .uplink import SubproblemResult, SubproblemStatus

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30
STEP_SCALE_RECOVERY = 1.25


@dataclass
class SolverOptions:
    gap_tol: float = 1e-3
    max_iterations: int = 500
    beta_mode: str = "subgradient"  # or "closed-form"
    uplink_tol: float = uplink.UPLINK_TOL
    uplink_max_iterations: int = uplink.UPLINK_MAX_ITERATIONS
    max_halvings: int = MAX_HALVINGS
    polish_every: int = 25
    polish_probes: int = 80
    power_match_rtol: float = 1e-8

    def __post_init__(self):
        if self.beta_mode not in ("subgradient", "closed-form"):
            raise ValueError(f"unknown beta_mode {self.beta_mode!r}")


@dataclass
class DualState:
    lam: float
    beta: np.ndarray
    admissible: bool = True
    dual_value: float = -np.inf


@dataclass
class TraceRecord:
    iteration: int
    lam: float
    beta_norm: float
    dual: float
    primal: float
    gap: float
    step: float
    retries: int


@dataclass
class FeasibilityResult:
    feasible: bool
    min_power: float
    v_comm: np.ndarray | None
    converged: bool


@dataclass
class SolveReport:
    v: np.ndarray
    bcrb: float
    dual_value: float
    gap: float
    iterations: int
    status: str
    lam: float
    beta: np.ndarray
    dual_lam: float
    dual_beta: np.ndarray
    achieved_sinr: np.ndarray
    total_power: float
    min_power: float
    trace: list[TraceRecord] = field(default_factory=list)

    @property
    def relative_gap(self) -> float:
        return self.gap / self.bcrb if self.bcrb > 0 else np.inf


def check_feasibility(scenario: Scenario) -> FeasibilityResult:
    """Classical SINR-constrained power minimization as a feasibility probe.

    Runs the uplink solver with unit effective noise (lambda = 1, Q = 0); the
    scenario is feasible when the iteration converges and the minimum power
    fits the budget.
    """
    q = np.zeros((scenario.n_tx, scenario.n_tx))
    result = uplink.solve_uplink(1.0, q, scenario.h, scenario.gammas)
    if result.status is not SubproblemStatus.CONVERGED:
        return FeasibilityResult(False, np.inf, None, False)
    sub = uplink.recover_downlink(result, 1.0, q, scenario.h, scenario.gammas, scenario.sigma2)
    min_power = fim.total_power(sub.v)
    return FeasibilityResult(
        feasible=min_power <= scenario.power_budget,
        min_power=min_power,
        v_comm=sub.v,
        converged=True,
    )


def dual_value(
    scenario: Scenario, lam: float, beta: np.ndarray, sub: SubproblemResult
) -> float:
    """Lagrangian value at the inner minimizer, a lower bound on the optimal objective."""
    return (
        scenario.sigma2 * float(np.sum(sub.z))
        - lam * scenario.power_budget
        + fim.beta_constant_term(scenario.stats, beta)
    )


def subgradient(
    scenario: Scenario, beta: np.ndarray, sub: SubproblemResult
) -> tuple[float, np.ndarray]:
    """Dual subgradient at the inner minimizer of an admissible pair."""
    if sub.status is not SubproblemStatus.CONVERGED:
        raise ValueError("subgradient requires a converged subproblem")
    g_lam = fim.total_power(sub.v) - scenario.power_budget
    j = fim.bfim(scenario.stats, sub.v, scenario.t_symbols, scenario.sigma2)
    g_beta = 2.0 * (np.eye(j.shape[0]) - j @ beta)
    return g_lam, g_beta


def initial_dual(scenario: Scenario, v_comm: np.ndarray) -> DualState:
    """Admissible-by-construction starting multipliers.

    The communication solution scaled to the full budget seeds beta through
    the exact maximizer of the inner quadratic; lambda starts just above the
    spectral radius of the resulting sensing-power matrix so the effective
    noise matrix is PSD.
    """
    v0 = v_comm * np.sqrt(scenario.power_budget / fim.total_power(v_comm))
    j0 = fim.bfim(scenario.stats, v0, scenario.t_symbols, scenario.sigma2)
    beta0 = fim.beta_optimal(j0)
    q0 = fim.qbeta(scenario.stats, beta0, scenario.t_symbols, scenario.sigma2)
    rho = float(np.linalg.eigvalsh(q0)[-1])
    lam0 = 1.01 * rho + 1e-12 * max(1.0, rho)
    return DualState(lam=lam0, beta=beta0)


def _solve_subproblem(
    scenario: Scenario, lam: float, beta: np.ndarray, options: SolverOptions
) -> SubproblemResult:
    q = fim.qbeta(scenario.stats, beta, scenario.t_symbols, scenario.sigma2)
    ul = uplink.solve_uplink(
        lam,
        q,
        scenario.h,
        scenario.gammas,
        tol=options.uplink_tol,
        max_iterations=options.uplink_max_iterations,
    )
    return uplink.recover_downlink(ul, lam, q, scenario.h, scenario.gammas, scenario.sigma2)


def _scaled_primal(scenario: Scenario, v: np.ndarray) -> tuple[np.ndarray, float] | None:
    """Feasible primal candidate: scale up to the power budget, never down."""
    power = fim.total_power(v)
    if power > scenario.power_budget * (1.0 + 1e-12):
        return None
    v_scaled = v * np.sqrt(scenario.power_budget / power)
    j = fim.bfim(scenario.stats, v_scaled, scenario.t_symbols, scenario.sigma2)
    return v_scaled, fim.bcrb(j)


class _Tracker:
    """Best-iterate bookkeeping over every subproblem the solver evaluates."""

    def __init__(self, scenario: Scenario, options: SolverOptions):
        self.scenario = scenario
        self.options = options
        self.best_primal = np.inf
        self.best_v: np.ndarray | None = None
        self.best_dual = -np.inf
        self.best_dual_point: tuple[float, np.ndarray] | None = None
        self.solves = 0

    def offer_primal(self, v: np.ndarray) -> None:
        candidate = _scaled_primal(self.scenario, v)
        if candidate is not None and candidate[1] < self.best_primal:
            self.best_v, self.best_primal = candidate

    def probe(self, lam: float, beta: np.ndarray) -> SubproblemResult:
        """Solve the subproblem and fold the outcome into both bounds."""
        sub = _solve_subproblem(self.scenario, lam, beta, self.options)
        self.solves += 1
        if sub.status is SubproblemStatus.CONVERGED:
            value = dual_value(self.scenario, lam, beta, sub)
            if value > self.best_dual:
                self.best_dual = value
                self.best_dual_point = (lam, beta.copy())
            self.offer_primal(sub.v)
            if value > self.best_primal + 1e-8 * max(1.0, abs(self.best_primal)):
                raise RuntimeError(
                    f"weak duality violated: dual {value:.12g} above primal "
                    f"{self.best_primal:.12g}"
                )
        return sub

    @property
    def relative_gap(self) -> float:
        if not np.isfinite(self.best_primal) or self.best_primal <= 0:
            return np.inf
        return (self.best_primal - self.best_dual) / self.best_primal


def _power_of(sub: SubproblemResult) -> float:
    return fim.total_power(sub.v)


def _lambda_bisect(tracker: _Tracker, lam0: float, beta: np.ndarray) -> None:
    """Drive lambda toward the power-matching point at fixed beta.

    The recovered power is non-increasing in lambda (it is the shifted
    derivative of a concave function), so bisection on the sign of
    power - budget is exact.  Inadmissible probes behave like infinite
    power: lambda was too small.
    """
    scenario, options = tracker.scenario, tracker.options
    budget = scenario.power_budget
    lo_window = budget * (1.0 - options.power_match_rtol)

    def classify(lam: float):
        sub = tracker.probe(lam, beta)
        if sub.status is not SubproblemStatus.CONVERGED:
            return "low"
        power = _power_of(sub)
        if power > budget:
            return "low"
        if power >= lo_window:
            return "done"
        return "high"

    lam0 = max(lam0, 1e-300)
    state = classify(lam0)
    if state == "done":
        return
    if state == "high":
        hi, lo = lam0, None
        for _ in range(60):
            probe = hi / 2.0
            state = classify(probe)
            if state == "done":
                return
            if state == "low":
                lo = probe
                break
            hi = probe
        if lo is None:
            return  # power stays below budget down to lambda ~ 0
    else:
        lo, hi = lam0, None
        for _ in range(60):
            probe = max(lam0, 1e-12) * 2.0 if hi is None else hi * 2.0
            probe = max(probe, 2.0 * lo)
            state = classify(probe)
            if state == "done":
                return
            if state == "high":
                hi = probe
                break
            lo = probe
        if hi is None:
            return
    for _ in range(tracker.options.polish_probes):
        mid = 0.5 * (lo + hi)
        state = classify(mid)
        if state == "done":
            return
        if state == "low":
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            return


def _certificate(tracker: _Tracker, lam_hint: float) -> None:
    """Tighten the dual bound around the current best primal candidate.

    Bisects lambda at the beta implied by the best primal (its exact inner
    maximizer) and at the best dual point found so far.
    """
    scenario = tracker.scenario
    if tracker.best_v is not None:
        j = fim.bfim(scenario.stats, tracker.best_v, scenario.t_symbols, scenario.sigma2)
        beta_cand = fim.beta_optimal(j)
        _lambda_bisect(tracker, lam_hint, beta_cand)
    if tracker.best_dual_point is not None:
        lam_best, beta_best = tracker.best_dual_point
        _lambda_bisect(tracker, lam_best, beta_best)


def solve(scenario: Scenario, options: SolverOptions | None = None) -> SolveReport:
    """Minimize the estimation bound subject to SINR targets and a power budget.

    Projected subgradient ascent on the dual with per-move backtracking on
    inadmissibility; terminates when the relative gap between the best
    primal value and the best dual bound drops below ``options.gap_tol``.
    """
    options = options or SolverOptions()
    feas = check_feasibility(scenario)
    if not feas.feasible:
        raise Infeasible(
            f"minimum power {feas.min_power:.6g} exceeds budget {scenario.power_budget:.6g}"
            if feas.converged
            else "power minimization did not converge; targets unreachable"
        )

    tracker = _Tracker(scenario, options)
    tracker.offer_primal(feas.v_comm)
    state = initial_dual(scenario, feas.v_comm)
    trace: list[TraceRecord] = []

    sub = tracker.probe(state.lam, state.beta)
    if sub.status is not SubproblemStatus.CONVERGED:
        raise Stalled("initial multipliers produced no admissible subproblem")

    a_lam = None
    a_beta = None
    scale = 1.0
    status = "iteration_limit"
    iteration = 0
    for iteration in range(1, options.max_iterations + 1):
        state.dual_value = dual_value(scenario, state.lam, state.beta, sub)
        state.admissible = True

        if tracker.relative_gap <= options.gap_tol:
            status = "converged"
            trace.append(
                TraceRecord(iteration, state.lam, float(np.linalg.norm(state.beta)),
                            state.dual_value, tracker.best_primal,
                            tracker.relative_gap, 0.0, 0)
            )
            break

        g_lam, g_beta = subgradient(scenario, state.beta, sub)
        if a_lam is None:
            a_lam = 0.1 / max(1.0, abs(g_lam))
            a_beta = 0.1 / max(1.0, np.abs(g_beta).max())

        if options.beta_mode == "closed-form":
            j = fim.bfim(scenario.stats, sub.v, scenario.t_symbols, scenario.sigma2)
            beta_target = fim.beta_optimal(j)
        base = 1.0 / np.sqrt(iteration)
        retries = 0
        step = scale * base
        accepted = False
        while retries <= options.max_halvings:
            step = scale * base
            lam_try = max(0.0, state.lam + a_lam * step * g_lam)
            if options.beta_mode == "closed-form":
                beta_try = state.beta + min(1.0, step) * (beta_target - state.beta)
            else:
                beta_try = state.beta + a_beta * step * g_beta
            sub_try = tracker.probe(lam_try, beta_try)
            if sub_try.status is SubproblemStatus.CONVERGED:
                accepted = True
                break
            scale *= 0.5
            retries += 1
        trace.append(
            TraceRecord(iteration, state.lam, float(np.linalg.norm(state.beta)),
                        state.dual_value, tracker.best_primal,
                        tracker.relative_gap, step, retries)
        )
        if not accepted:
            status = "stalled"
            break
        if retries == 0:
            scale = min(1.0, scale * STEP_SCALE_RECOVERY)
        state.lam, state.beta = lam_try, beta_try
        sub = sub_try

        if options.polish_every and iteration % options.polish_every == 0:
            _certificate(tracker, state.lam)

    if status != "converged":
        _certificate(tracker, state.lam)
        if tracker.relative_gap <= options.gap_tol:
            status = "converged"

    achieved = downlink_sinr(tracker.best_v, scenario.h, scenario.sigma2)
    dual_lam, dual_beta = tracker.best_dual_point
    report = SolveReport(
        v=tracker.best_v,
        bcrb=tracker.best_primal,
        dual_value=tracker.best_dual,
        gap=tracker.best_primal - tracker.best_dual,
        iterations=iteration,
        status=status,
        lam=state.lam,
        beta=state.beta,
        dual_lam=dual_lam,
        dual_beta=dual_beta,
        achieved_sinr=achieved,
        total_power=fim.total_power(tracker.best_v),
        min_power=feas.min_power,
        trace=trace,
    )
    if report.gap < -1e-8:
        raise RuntimeError(f"negative duality gap {report.gap:.3e}")
    if status == "stalled":
        raise Stalled(
            f"no admissible step after {options.max_halvings} halvings", report=report
        )
    logger.info(
        "solve finished: status=%s iterations=%d bcrb=%.6g relative_gap=%.3e solves=%d",
        status, iteration, report.bcrb, report.relative_gap, tracker.solves,
    )
    return report
