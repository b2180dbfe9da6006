"""ADMM solver that jointly learns per-view reconstruction coefficients and a
consensus coefficient matrix doubling as a low-pass graph filter.

For views X^i the full model alternates closed-form updates of

* smoothed features Y^i      (coupled to the consensus C by 4Y^i = 3X^i + CX^i),
* view coefficients C^i      (self-expression Y^i ~ C^i Y^i plus consensus pull),
* view auxiliaries Z^i       (split copy of C^i carrying the symmetric /
                              nonnegative / zero-diagonal constraints),
* the consensus C and its auxiliary Z,
* Lagrange multipliers and the growing penalty mu,
* adaptive view weights gamma from the mismatches J^i = ||C - C^i||_F^2.

Two ablation variants reuse the same machinery: ``no_smoothing`` fixes
Y^i = X^i and drops the smoothing constraint, ``frobenius`` replaces the
consensus-filter regularizer on C^i with a plain squared Frobenius penalty.
All linear systems are symmetric positive definite and solved via Cholesky
factorization; no explicit inverses are formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .data import MultiViewDataset

VARIANT_FULL = "full"
VARIANT_NO_SMOOTHING = "no_smoothing"
VARIANT_FROBENIUS = "frobenius"
VARIANTS = (VARIANT_FULL, VARIANT_NO_SMOOTHING, VARIANT_FROBENIUS)


class SolverNumericalError(RuntimeError):
    """A linear solve failed or an iterate went non-finite.

    Carries the iteration index and the diagnostics recorded so far.
    """

    def __init__(self, message: str, iteration: int = -1, diagnostics=None):
        super().__init__(message)
        self.iteration = iteration
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class SolverConfig:
    """Hyper-parameters and ADMM constants.

    ``eps`` bounds the constraint-gap max-norms at convergence; ``resid_tol``
    additionally requires the squared successive changes of C and Z to settle
    before the run stops. ``j_floor`` guards the view-weight update against
    J^i = 0 (all-zero first iterate), where a negative exponent would be
    undefined.
    """

    alpha: float = 0.5
    beta: float = 0.5
    eta: float = 0.5
    mu0: float = 1e-6
    mu_max: float = 1e30
    rho: float = 1.1
    eps: float = 1e-4
    resid_tol: float = 1e-6
    max_iter: int = 1000
    j_floor: float = 1e-12

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.eta == 1:
            raise ValueError("eta must differ from 1")
        if self.mu0 <= 0 or self.mu_max <= 0 or self.mu0 > self.mu_max:
            raise ValueError("need 0 < mu0 <= mu_max")
        if self.rho < 1:
            raise ValueError("rho must be >= 1")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.resid_tol <= 0:
            raise ValueError("resid_tol must be positive")
        if not 1 <= self.max_iter <= 10_000:
            raise ValueError("max_iter must be in [1, 1e4]")
        if self.j_floor <= 0:
            raise ValueError("j_floor must be positive")


@dataclass
class SolverState:
    """All iterates of one run; confined to a single thread."""

    Y: list[np.ndarray]
    Ci: list[np.ndarray]
    Zi: list[np.ndarray]
    Gamma: list[np.ndarray]
    Lam: list[np.ndarray]
    Omega: list[np.ndarray]
    C: np.ndarray
    Z: np.ndarray
    Theta: np.ndarray
    Phi: np.ndarray
    gamma: np.ndarray
    mu: float
    iteration: int = 0

    @property
    def n_views(self) -> int:
        return len(self.Y)


@dataclass
class Diagnostics:
    """Per-iteration residuals, constraint-gap max-norms, and objective trace."""

    residual_C: list[float] = field(default_factory=list)
    residual_Z: list[float] = field(default_factory=list)
    gap_Y: list[float] = field(default_factory=list)
    gap_CiZi: list[float] = field(default_factory=list)
    gap_Ci1: list[float] = field(default_factory=list)
    gap_CZ: list[float] = field(default_factory=list)
    gap_C1: list[float] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    J: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.residual_C)


@dataclass
class SolverOutput:
    consensus_C: np.ndarray
    view_C: list[np.ndarray]
    gamma: np.ndarray
    diagnostics: Diagnostics
    converged: bool
    iterations: int


def _spd_solve(A: np.ndarray, B: np.ndarray, iteration: int = -1) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A via Cholesky."""
    try:
        factor = sla.cho_factor(A, check_finite=False)
        return sla.cho_solve(factor, B, check_finite=False)
    except (sla.LinAlgError, ValueError) as exc:
        raise SolverNumericalError(
            f"symmetric positive definite solve failed at iteration {iteration}: {exc}",
            iteration=iteration,
        ) from None


def init_state(ds: MultiViewDataset, cfg: SolverConfig) -> SolverState:
    """All matrices zero, uniform view weights, mu = mu0."""
    n = ds.n_samples
    v = ds.n_views
    return SolverState(
        Y=[np.zeros_like(x) for x in ds.views],
        Ci=[np.zeros((n, n)) for _ in range(v)],
        Zi=[np.zeros((n, n)) for _ in range(v)],
        Gamma=[np.zeros_like(x) for x in ds.views],
        Lam=[np.zeros((n, n)) for _ in range(v)],
        Omega=[np.zeros(n) for _ in range(v)],
        C=np.zeros((n, n)),
        Z=np.zeros((n, n)),
        Theta=np.zeros((n, n)),
        Phi=np.zeros(n),
        gamma=np.full(v, 1.0 / v),
        mu=cfg.mu0,
    )


def project_constraints(M: np.ndarray) -> np.ndarray:
    """Symmetrize, clamp at zero, zero the diagonal - in that fixed order.

    This is the prescribed sequential projection, not the Euclidean projection
    onto the intersection of the three constraint sets.
    """
    M = 0.5 * (M + M.T)
    M = np.maximum(M, 0.0)
    np.fill_diagonal(M, 0.0)
    return M


def update_view_representation(state: SolverState, ds: MultiViewDataset, i: int) -> np.ndarray:
    """Closed-form smoothed features for view i.

    Minimizes ||Y - C^i Y||_F^2 + mu/2 ||4Y - 3X^i - CX^i + Gamma^i/mu||_F^2;
    the normal equations [2(I-C^i)^T(I-C^i) + 16 mu I] Y = 12 mu X^i
    + 4 mu C X^i - 4 Gamma^i are solved, never inverted.
    """
    n = ds.n_samples
    X = ds.views[i]
    ImC = np.eye(n) - state.Ci[i]
    lhs = 2.0 * ImC.T @ ImC + 16.0 * state.mu * np.eye(n)
    rhs = 12.0 * state.mu * X + 4.0 * state.mu * (state.C @ X) - 4.0 * state.Gamma[i]
    return _spd_solve(lhs, rhs, state.iteration)


def update_view_coefficients(
    state: SolverState, i: int, cfg: SolverConfig, variant: str = VARIANT_FULL
) -> np.ndarray:
    """Closed-form view coefficient matrix C^i.

    For the full model the right factor is 2 Y^i Y^i^T + 2(alpha
    + beta gamma_i^eta) I + mu (I + 11^T) and the left collects the
    consensus pull, the split copy Z^i, and the multiplier corrections; the
    product C^i = L R^{-1} is computed as a transposed solve against the
    symmetric positive definite R. The ``frobenius`` variant drops the
    alpha C Z^i coupling from the left factor (its alpha term is a plain
    ridge penalty); ``no_smoothing`` uses the same formula with Y^i = X^i,
    which the state already holds.
    """
    n = state.C.shape[0]
    Y = state.Y[i]
    w = cfg.beta * state.gamma[i] ** cfg.eta
    YYt = Y @ Y.T
    ones = np.ones(n)
    J11 = np.ones((n, n))
    if variant == VARIANT_FROBENIUS:
        coupling = 2.0 * w * state.C
    else:
        coupling = 2.0 * (cfg.alpha * (state.C @ state.Zi[i]) + w * state.C)
    left = (
        2.0 * YYt
        + coupling
        + state.mu * (state.Zi[i] + J11)
        - state.Lam[i]
        - np.outer(state.Omega[i], ones)
    )
    right = 2.0 * YYt + 2.0 * (cfg.alpha + w) * np.eye(n) + state.mu * (np.eye(n) + J11)
    return _spd_solve(right, left.T, state.iteration).T


def update_view_auxiliary(
    state: SolverState,
    i: int,
    cfg: SolverConfig,
    variant: str = VARIANT_FULL,
    project: bool = True,
) -> np.ndarray:
    """Auxiliary Z^i: linear solve (or multiplier shift) then constraint projection.

    Full/no-smoothing: solve (2 alpha C^T C + mu I) Z = 2 alpha C^T C^i
    + mu C^i + Lam^i. Frobenius drops the data term, leaving Z = C^i
    + Lam^i/mu. ``project=False`` returns the pre-projection solution, which
    is the stationary point of the quadratic subproblem.
    """
    n = state.C.shape[0]
    if variant == VARIANT_FROBENIUS:
        Z = state.Ci[i] + state.Lam[i] / state.mu
    else:
        lhs = 2.0 * cfg.alpha * (state.C.T @ state.C) + state.mu * np.eye(n)
        rhs = 2.0 * cfg.alpha * (state.C.T @ state.Ci[i]) + state.mu * state.Ci[i] + state.Lam[i]
        Z = _spd_solve(lhs, rhs, state.iteration)
    return project_constraints(Z) if project else Z


def update_consensus_coefficients(
    state: SolverState, ds: MultiViewDataset, cfg: SolverConfig, variant: str = VARIANT_FULL
) -> np.ndarray:
    """Closed-form consensus C = A B^{-1} as a transposed SPD solve.

    A sums per-view couplings (split copies, weighted view coefficients, and
    for smoothing variants the feature-coupling terms) plus the consensus
    auxiliary and multiplier corrections; B is the matching Gram-plus-shift
    right factor. ``no_smoothing`` drops the feature-coupling terms,
    ``frobenius`` drops the alpha terms.
    """
    n = ds.n_samples
    ones = np.ones(n)
    J11 = np.ones((n, n))
    A_sum = np.zeros((n, n))
    B_sum = np.zeros((n, n))
    for i in range(ds.n_views):
        w = cfg.beta * state.gamma[i] ** cfg.eta
        if variant != VARIANT_FROBENIUS:
            A_sum += 2.0 * cfg.alpha * (state.Ci[i] @ state.Zi[i].T) + 2.0 * w * state.Ci[i]
            B_sum += 2.0 * cfg.alpha * (state.Zi[i] @ state.Zi[i].T) + 2.0 * w * np.eye(n)
        else:
            A_sum += 2.0 * w * state.Ci[i]
            B_sum += 2.0 * w * np.eye(n)
        if variant != VARIANT_NO_SMOOTHING:
            X = ds.views[i]
            XXt = X @ X.T
            A_sum += (
                4.0 * state.mu * (state.Y[i] @ X.T)
                - 3.0 * state.mu * XXt
                + state.Gamma[i] @ X.T
            )
            B_sum += state.mu * XXt
    A = A_sum + state.mu * (state.Z + J11) - state.Theta - np.outer(state.Phi, ones)
    B = B_sum + state.mu * (np.eye(n) + J11)
    return _spd_solve(B, A.T, state.iteration).T


def update_consensus_auxiliary(state: SolverState, project: bool = True) -> np.ndarray:
    """Auxiliary Z = C + Theta/mu, then the constraint projection."""
    Z = state.C + state.Theta / state.mu
    return project_constraints(Z) if project else Z


def constraint_gaps(
    state: SolverState, ds: MultiViewDataset, variant: str = VARIANT_FULL
) -> dict[str, float]:
    """Max-norms of all coupling-constraint violations at the current state.

    gap_Y is reported as 0 for the no-smoothing variant, whose model has no
    feature-coupling constraint.
    """
    gap_Y = 0.0
    gap_CiZi = 0.0
    gap_Ci1 = 0.0
    for i in range(ds.n_views):
        if variant != VARIANT_NO_SMOOTHING:
            coupling = 4.0 * state.Y[i] - 3.0 * ds.views[i] - state.C @ ds.views[i]
            gap_Y = max(gap_Y, float(np.abs(coupling).max()))
        gap_CiZi = max(gap_CiZi, float(np.abs(state.Ci[i] - state.Zi[i]).max()))
        gap_Ci1 = max(gap_Ci1, float(np.abs(state.Ci[i].sum(axis=1) - 1.0).max()))
    return {
        "gap_Y": gap_Y,
        "gap_CiZi": gap_CiZi,
        "gap_Ci1": gap_Ci1,
        "gap_CZ": float(np.abs(state.C - state.Z).max()),
        "gap_C1": float(np.abs(state.C.sum(axis=1) - 1.0).max()),
    }


def update_multipliers(
    state: SolverState, ds: MultiViewDataset, cfg: SolverConfig, variant: str = VARIANT_FULL
) -> SolverState:
    """Ascend all multipliers with the current mu, then grow mu.

    The multiplier steps use the mu that produced the current iterates; only
    afterwards is mu scaled to min(mu_max, rho * mu).
    """
    mu = state.mu
    for i in range(ds.n_views):
        if variant != VARIANT_NO_SMOOTHING:
            coupling = 4.0 * state.Y[i] - 3.0 * ds.views[i] - state.C @ ds.views[i]
            state.Gamma[i] = state.Gamma[i] + mu * coupling
        state.Lam[i] = state.Lam[i] + mu * (state.Ci[i] - state.Zi[i])
        state.Omega[i] = state.Omega[i] + mu * (state.Ci[i].sum(axis=1) - 1.0)
    state.Theta = state.Theta + mu * (state.C - state.Z)
    state.Phi = state.Phi + mu * (state.C.sum(axis=1) - 1.0)
    state.mu = min(cfg.mu_max, cfg.rho * mu)
    return state


def view_mismatches(state: SolverState) -> np.ndarray:
    """J^i = ||C - C^i||_F^2 for every view."""
    return np.array([float(np.sum((state.C - Ci) ** 2)) for Ci in state.Ci])


def update_view_weights(state: SolverState, cfg: SolverConfig) -> np.ndarray:
    """Closed-form simplex weights gamma_i proportional to J_i^{1/(1-eta)}.

    Each J^i is floored at cfg.j_floor before exponentiation so the first
    iteration (all J^i = 0) yields uniform weights instead of 0 to a negative
    power.
    """
    J = np.maximum(view_mismatches(state), cfg.j_floor)
    powered = J ** (1.0 / (1.0 - cfg.eta))
    return powered / powered.sum()


def objective_value(
    state: SolverState, ds: MultiViewDataset, cfg: SolverConfig, variant: str = VARIANT_FULL
) -> float:
    """Model objective at the current iterates, using the split form C Z^i of
    the consensus-filter regularizer."""
    total = 0.0
    for i in range(ds.n_views):
        w = cfg.beta * state.gamma[i] ** cfg.eta
        total += float(np.sum((state.Y[i] - state.Ci[i] @ state.Y[i]) ** 2))
        if variant == VARIANT_FROBENIUS:
            total += cfg.alpha * float(np.sum(state.Ci[i] ** 2))
        else:
            total += cfg.alpha * float(np.sum((state.Ci[i] - state.C @ state.Zi[i]) ** 2))
        total += w * float(np.sum((state.C - state.Ci[i]) ** 2))
    return total


def _check_finite(state: SolverState, diagnostics: Diagnostics) -> None:
    iterates = [state.C, state.Z, state.Theta, state.Phi, state.gamma]
    iterates += state.Y + state.Ci + state.Zi + state.Gamma + state.Lam + state.Omega
    for arr in iterates:
        if not np.all(np.isfinite(arr)):
            raise SolverNumericalError(
                f"non-finite iterate at iteration {state.iteration}",
                iteration=state.iteration,
                diagnostics=diagnostics,
            )


def _solve(
    ds: MultiViewDataset, cfg: SolverConfig, variant: str, callback=None
) -> SolverOutput:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    state = init_state(ds, cfg)
    if variant == VARIANT_NO_SMOOTHING:
        state.Y = [x.copy() for x in ds.views]
    diagnostics = Diagnostics()
    converged = False
    for iteration in range(1, cfg.max_iter + 1):
        state.iteration = iteration
        C_prev = state.C
        Z_prev = state.Z
        for i in range(ds.n_views):
            if variant != VARIANT_NO_SMOOTHING:
                state.Y[i] = update_view_representation(state, ds, i)
            state.Ci[i] = update_view_coefficients(state, i, cfg, variant)
            state.Zi[i] = update_view_auxiliary(state, i, cfg, variant)
        state.C = update_consensus_coefficients(state, ds, cfg, variant)
        state.Z = update_consensus_auxiliary(state)
        gaps = constraint_gaps(state, ds, variant)
        update_multipliers(state, ds, cfg, variant)
        state.gamma = update_view_weights(state, cfg)

        diagnostics.residual_C.append(float(np.sum((state.C - C_prev) ** 2)))
        diagnostics.residual_Z.append(float(np.sum((state.Z - Z_prev) ** 2)))
        for key, value in gaps.items():
            getattr(diagnostics, key).append(value)
        diagnostics.objective.append(objective_value(state, ds, cfg, variant))
        diagnostics.J.append(view_mismatches(state))

        _check_finite(state, diagnostics)
        if callback is not None:
            callback(state)

        worst_gap = max(
            gaps[k] for k in ("gap_Y", "gap_CiZi", "gap_Ci1", "gap_CZ", "gap_C1")
        )
        if (
            worst_gap <= cfg.eps
            and diagnostics.residual_C[-1] <= cfg.resid_tol
            and diagnostics.residual_Z[-1] <= cfg.resid_tol
        ):
            converged = True
            break
    return SolverOutput(
        consensus_C=state.C,
        view_C=[Ci.copy() for Ci in state.Ci],
        gamma=state.gamma.copy(),
        diagnostics=diagnostics,
        converged=converged,
        iterations=state.iteration,
    )


def solve(ds: MultiViewDataset, cfg: SolverConfig, callback=None) -> SolverOutput:
    """Run the full model to convergence or cfg.max_iter.

    One iteration updates, in order: per view Y^i, C^i, Z^i (views processed
    sequentially against the previous iteration's consensus), then C, Z, the
    multipliers with the current mu, mu itself, and finally the view weights.
    The run stops once every constraint-gap max-norm is <= cfg.eps and the
    squared successive changes of C and Z are <= cfg.resid_tol. The optional
    ``callback(state)`` fires after each completed iteration.
    """
    return _solve(ds, cfg, VARIANT_FULL, callback)


def solve_ablation_no_smoothing(
    ds: MultiViewDataset, cfg: SolverConfig, callback=None
) -> SolverOutput:
    """Ablation with raw features: Y^i pinned to X^i, no feature-coupling
    constraint or Gamma^i multiplier; the C^i and C updates are re-derived
    accordingly."""
    return _solve(ds, cfg, VARIANT_NO_SMOOTHING, callback)


def solve_ablation_frobenius(
    ds: MultiViewDataset, cfg: SolverConfig, callback=None
) -> SolverOutput:
    """Ablation with a plain ridge penalty alpha ||C^i||_F^2 in place of the
    consensus-filter regularizer; Z^i degenerates to the projected multiplier
    shift of C^i."""
    return _solve(ds, cfg, VARIANT_FROBENIUS, callback)
