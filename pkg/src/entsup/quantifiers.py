"""Entanglement quantifiers: negativity, PPT tests, generalized-robustness bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import linops, sdpcore
from .linops import HermOp, Partition
from .qstate import Ket, RegisterMismatchError
from .witnesses import Witness, WitnessClassError, eval_witness

DENSITY_TOL = 1e-9
DIAGONAL_TOL = 1e-10


@dataclass(frozen=True)
class RobustnessBounds:
    """One- or two-sided bracket on the generalized robustness of a state.

    ``upper`` is None while unknown. ``certified_upper`` is set only when the
    mixing point passed the diagonal-product separability certificate; a
    PPT-on-all-cuts pass alone never certifies (bound entanglement exists).
    """

    lower: float = 0.0
    upper: float | None = None
    certified_upper: bool = False
    witness_used: Witness | None = None
    mixing_state_used: HermOp | None = None
    s_star: float | None = None

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("lower bound must be nonnegative")
        if self.upper is not None and self.lower > self.upper + 1e-7:
            raise ValueError(
                f"bounds cross: lower {self.lower} > upper {self.upper}"
            )


@dataclass(frozen=True)
class QuantifierConfig:
    """Which quantifier to run and over which bipartitions."""

    kind: Literal["negativity", "generalized_robustness"] = "negativity"
    partitions: tuple[Partition, ...] | None = None  # None: all single-vs-rest
    psd_tol: float = linops.PSD_TOL

    def resolve_partitions(self, register) -> list[Partition]:
        if self.partitions is None:
            return linops.single_cut_partitions(register)
        parts = list(self.partitions)
        if not parts:
            raise ValueError("partition list cannot be empty")
        for p in parts:
            p.validate(register, proper=True)
        return parts


@dataclass(frozen=True)
class MixingSearch:
    """Search settings for the mixing upper bound.

    The bracket defaults to [0, register size]; the grid is refined by
    bisection down to ``resolution``, and the returned point is always
    re-checked against the certificate.
    """

    s_max: float | None = None
    resolution: float = 1e-6
    coarse_steps: int = 1024
    certificate: Literal["diagonal", "ppt"] = "diagonal"
    certificate_tol: float = DIAGONAL_TOL

    def __post_init__(self):
        if self.s_max is not None and self.s_max <= 0:
            raise ValueError("bisection bracket top must be positive")
        if self.resolution <= 0 or self.coarse_steps < 2:
            raise ValueError("invalid bisection bracket settings")


def negativity(rho: HermOp, partition: Partition) -> float:
    """Sum of |negative eigenvalues| of the partially transposed state.

    No factor-2 rescaling: the value equals -Tr(W rho) for the witness built
    by :func:`entsup.witnesses.negativity_optimal_witness`.
    """
    _check_density(rho)
    partition.validate(rho.register, proper=True)
    w = np.linalg.eigvalsh(linops.partial_transpose(rho, partition).matrix)
    return float(np.sum(np.clip(-w, 0.0, None)))


def witnessed_entanglement_pure(psi: Ket, w: Witness) -> float:
    """Pure-state witnessed entanglement max(0, -<psi|W|psi>)."""
    return max(0.0, -eval_witness(w, psi))


def ppt_check(
    rho: HermOp, partitions: Sequence[Partition], tol: float = linops.PSD_TOL
) -> list[bool]:
    """Peres test per bipartition: is rho^{T_A} positive semidefinite?"""
    _check_density(rho)
    results = []
    for p in partitions:
        p.validate(rho.register, proper=True)
        results.append(linops.is_psd(linops.partial_transpose(rho, p), tol))
    return results


def mix(rho: HermOp, pi: HermOp, s: float) -> HermOp:
    """Noisy mixture (rho + s*pi) / (1 + s)."""
    if s < 0:
        raise ValueError(f"mixing weight must be nonnegative, got {s}")
    if rho.register != pi.register:
        raise RegisterMismatchError("mixed states live on different registers")
    return HermOp(rho.register, (rho.matrix + s * pi.matrix) / (1.0 + s))


def separability_certificate_diagonal(rho: HermOp, tol: float = DIAGONAL_TOL) -> bool:
    """True when rho is diagonal in the computational product basis.

    Diagonal states are separable by an explicit convex combination of product
    projectors, so this certificate is sound (but far from complete).
    """
    off = rho.matrix - np.diag(np.diag(rho.matrix))
    return float(np.max(np.abs(off))) <= tol if off.size else True


def rg_lower_via_witness(rho: HermOp, w: Witness) -> RobustnessBounds:
    """Robustness lower bound max(0, -Tr(W rho)) from a W <= I witness."""
    if not w.cap_identity:
        raise WitnessClassError(
            "robustness lower bounds need a witness from the W <= I class"
        )
    value = max(0.0, -eval_witness(w, rho))
    return RobustnessBounds(lower=value, witness_used=w)


def rg_upper_via_mixing(
    rho: HermOp, pi: HermOp, search: MixingSearch | None = None
) -> RobustnessBounds:
    """Smallest mixing weight s making (rho + s*pi)/(1+s) pass a certificate.

    Tries, in order: s = 0; the analytic cancellation point where every
    off-diagonal of rho + s*pi vanishes simultaneously (exact for states whose
    coherences are proportional to minus the mixing state's); then a coarse
    grid over [0, s_max] refined by bisection, keeping the passing endpoint
    exactly. Returns an unknown upper bound when nothing passes.
    """
    _check_density(rho)
    _check_density(pi)
    if rho.register != pi.register:
        raise RegisterMismatchError("state and mixing state registers differ")
    if search is None:
        search = MixingSearch()
    s_max = float(search.s_max) if search.s_max is not None else float(rho.register.size)

    def passes(s: float) -> bool:
        return _certificate(mix(rho, pi, s), search)

    if passes(0.0):
        return _upper_result(0.0, rho, pi, search)

    s_exact = _diagonal_cancellation_point(rho, pi)
    if s_exact is not None and 0.0 < s_exact <= s_max and passes(s_exact):
        return _upper_result(s_exact, rho, pi, search)

    grid = np.linspace(0.0, s_max, search.coarse_steps + 1)
    hi = None
    lo = 0.0
    for s in grid[1:]:
        if passes(float(s)):
            hi = float(s)
            break
        lo = float(s)
    if hi is None:
        return RobustnessBounds(lower=0.0, upper=None, mixing_state_used=pi)
    while hi - lo > search.resolution:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    if not passes(hi):
        return RobustnessBounds(lower=0.0, upper=None, mixing_state_used=pi)
    return _upper_result(hi, rho, pi, search)


def rg_ppt_sdp(
    rho: HermOp,
    partitions: Sequence[Partition],
    tol: float | None = None,
    max_iter: int = 200_000,
) -> float:
    """PPT-relaxed robustness: min Tr(X), X >= 0, (rho + X)^{T_A} >= 0 per cut.

    The PPT set contains the separable set, so the optimum lower-bounds the
    generalized robustness. The solution carries a duality-gap certificate at
    the configured tolerance; non-convergence raises
    :class:`entsup.sdpcore.SolverFailureError` with the best feasible value.
    """
    if not partitions:
        raise ValueError("need at least one partition")
    d = rho.register.size
    if d > sdpcore.MAX_DIMENSION:
        raise ValueError(
            f"robustness SDP limited to dimension {sdpcore.MAX_DIMENSION}, got {d}"
        )
    _check_density(rho)
    if tol is None:
        tol = sdpcore.default_tolerance(d)
    problem = sdpcore.build_robustness_sdp(rho, partitions)
    solution = sdpcore.solve(problem, tol=tol, max_iter=max_iter)
    if solution.status != "optimal":
        raise sdpcore.SolverFailureError(
            f"robustness SDP stopped with status {solution.status!r}",
            best_value=solution.primal_value,
            solution=solution,
        )
    return solution.primal_value


def _certificate(sigma: HermOp, search: MixingSearch) -> bool:
    if search.certificate == "diagonal":
        return separability_certificate_diagonal(sigma, search.certificate_tol)
    if search.certificate == "ppt":
        parts = linops.single_cut_partitions(sigma.register)
        return all(
            linops.is_psd(linops.partial_transpose(sigma, p), linops.PSD_TOL)
            for p in parts
        )
    raise ValueError(f"unknown certificate {search.certificate!r}")


def _diagonal_cancellation_point(rho: HermOp, pi: HermOp) -> float | None:
    """The unique s with rho + s*pi diagonal, if one exists."""
    r = rho.matrix.copy()
    p = pi.matrix.copy()
    np.fill_diagonal(r, 0.0)
    np.fill_diagonal(p, 0.0)
    scale = max(float(np.max(np.abs(r))), 1e-300)
    live = np.abs(r) > 1e-13 * scale
    if not live.any():
        return None
    if np.any(live & (np.abs(p) < 1e-13 * scale)):
        return None
    ratios = -r[live] / p[live]
    s = ratios[0]
    if abs(s.imag) > 1e-9 * max(1.0, abs(s)) or s.real <= 0:
        return None
    if np.max(np.abs(ratios - s)) > 1e-9 * max(1.0, abs(s)):
        return None
    # Entries of rho that vanish must stay zero at the mixing point.
    dead = (~live) & (np.abs(p) > 1e-13 * scale)
    if dead.any():
        return None
    return float(s.real)


def _upper_result(
    s: float, rho: HermOp, pi: HermOp, search: MixingSearch
) -> RobustnessBounds:
    certified = search.certificate == "diagonal"
    return RobustnessBounds(
        lower=0.0,
        upper=s,
        certified_upper=certified,
        mixing_state_used=pi,
        s_star=s,
    )


def _check_density(rho: HermOp, tol: float = DENSITY_TOL) -> None:
    if abs(rho.trace() - 1.0) > tol:
        raise ValueError(f"state trace {rho.trace():.12f} is not 1")
    if not linops.is_psd(rho, tol):
        raise ValueError("state is not positive semidefinite")
