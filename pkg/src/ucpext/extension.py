"""Extension of UCP maps, generators, semigroups, and groups from V to M_d.

Every extension problem here is convex feasibility in the real vector space of
Hermitian d^2 x d^2 Choi matrices:

  map case        find C with  C PSD,             phi_C(v_k) = target_k  for all k,
  generator case  find C with  P C P PSD,         phi_C(v_k) = A(v_k)    for all k,

where phi_C is the map with Choi matrix C, v_k runs over the system's basis
(v_0 = I, so unitality / kernel-of-unit is the k = 0 constraint), and P
projects orthogonally to the maximally entangled vector.  Hermiticity is baked
into the parametrization.

The solver is Dykstra's alternating-projection algorithm between the cone and
the affine subspace, so the limit of a converged run is the projection of the
starting point onto the feasible set.  That makes multi-start behaviour
meaningful: distinct randomized starts project to distinct feasible points
exactly when the feasible set is not a singleton, which is how non-uniqueness
of extensions is detected.

Starting points.  The generator problem starts from the affine projection of
zero.  The map problem starts from the affine projection of the identity
map's Choi matrix: scaled resolvents of UCP semigroups cluster around the
identity as the spectral parameter grows, and the projection of the identity
selects the extension compatible with that limit (the projection of zero
instead selects the minimum-norm extension, which in general fails the
conditional-positivity recovery of the resolvent-family route).  Randomized
starts add a seeded Hermitian Gaussian perturbation before the first
projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import dynamics, linalg, maps
from .dynamics import SubsystemGenerator
from .errors import (ExtensionInfeasible, GroupExtensionError, InputError,
                     NumericalError, ResolventFamilyError)
from .maps import SuperOp
from .systems import MatricialSystem
from .tolerances import FEASIBILITY_TOL

__all__ = [
    "ExtensionOptions",
    "ExtensionProblem",
    "ExtensionReport",
    "ResolventFamily",
    "GroupExtensionReport",
    "RigidityReport",
    "extend_ucp_map",
    "ucp_extension_feasible",
    "rescale_resolvent",
    "extend_generator",
    "extend_via_resolvent_family",
    "extend_group",
    "rigidity_probe",
    "extend_discrete",
]


# ---------------------------------------------------------------------------
# Real coordinates on Hermitian matrices
# ---------------------------------------------------------------------------


class HermitianCoords:
    """Isometry between Hermitian n x n matrices and R^(n^2).

    Coordinates: the n real diagonal entries, then sqrt(2) * Re and sqrt(2) *
    Im of the strict upper triangle, so Euclidean norm equals Frobenius norm.
    """

    def __init__(self, n: int):
        self.n = n
        self.iu = np.triu_indices(n, 1)
        self.size = n * n

    def to_vec(self, h: np.ndarray) -> np.ndarray:
        upper = h[self.iu]
        return np.concatenate([
            h.diagonal().real,
            np.sqrt(2.0) * upper.real,
            np.sqrt(2.0) * upper.imag,
        ])

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        m = self.iu[0].size
        h = np.zeros((n, n), dtype=complex)
        h[np.arange(n), np.arange(n)] = x[:n]
        upper = (x[n:n + m] + 1j * x[n + m:]) / np.sqrt(2.0)
        h[self.iu] = upper
        h[self.iu[1], self.iu[0]] = np.conj(upper)
        return h


def _psd_clip(h: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(h)
    clipped = np.clip(w, 0.0, None)
    out = (u * clipped) @ np.conj(u.T)
    return 0.5 * (out + np.conj(out.T))


class _PsdCone:
    """The PSD cone of Hermitian n x n matrices in real coordinates."""

    def __init__(self, coords: HermitianCoords):
        self.coords = coords

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.coords.to_vec(_psd_clip(self.coords.to_matrix(x)))


class _CompressedPsdCone:
    """The cone { C Hermitian : P C P >= 0 } with P orthogonal to the
    maximally entangled vector.

    The Frobenius projection is exact: rotate by a fixed orthogonal matrix
    that sends the last coordinate axis to the entangled vector, clip the
    leading (n-1)-block to PSD, and leave the last row/column untouched.
    """

    def __init__(self, coords: HermitianCoords, d: int):
        self.coords = coords
        n = d * d
        omega = maps.maximally_entangled_vector(d).real
        v = np.zeros(n)
        v[-1] = 1.0
        v = v - omega
        if np.linalg.norm(v) < 1e-14:
            self.rot = np.eye(n)
        else:
            self.rot = np.eye(n) - 2.0 * np.outer(v, v) / float(v @ v)

    def project(self, x: np.ndarray) -> np.ndarray:
        c = self.coords.to_matrix(x)
        r = self.rot.T @ c @ self.rot
        r[:-1, :-1] = _psd_clip(r[:-1, :-1])
        out = self.rot @ r @ self.rot.T
        return self.coords.to_vec(0.5 * (out + np.conj(out.T)))


class _AffineAgreement:
    """The affine subspace { C Hermitian : phi_C(v_k) = target_k for all k }.

    The constraint matrix is assembled once by pushing every coordinate
    direction of Hermitian d^2 x d^2 space through the agreement map; the
    orthogonal projection is then a single precomputed matrix-vector product.
    """

    def __init__(self, system: MatricialSystem, targets: Sequence[np.ndarray]):
        d = system.dim
        self.system = system
        self.coords = HermitianCoords(d * d)
        out_coords = HermitianCoords(d)
        basis = system.basis

        rows = []
        for direction in range(self.coords.size):
            e = np.zeros(self.coords.size)
            e[direction] = 1.0
            c4 = self.coords.to_matrix(e).reshape(d, d, d, d)
            col = []
            for v in basis:
                image = np.einsum("ij,iajb->ab", v, c4)
                col.append(out_coords.to_vec(0.5 * (image + np.conj(image.T))))
            rows.append(np.concatenate(col))
        a_mat = np.array(rows).T  # (len(basis) * d^2, n^2)
        b = np.concatenate([out_coords.to_vec(t) for t in targets])

        u, s, vt = np.linalg.svd(a_mat, full_matrices=False)
        rank = int(np.sum(s > s[0] * 1e-12)) if s.size else 0
        pinv = vt[:rank].T @ np.diag(1.0 / s[:rank]) @ u[:, :rank].T
        self.a_mat = a_mat
        self.b = b
        self.offset = pinv @ b
        self.proj_dir = np.eye(self.coords.size) - pinv @ a_mat
        inconsistency = float(np.linalg.norm(a_mat @ self.offset - b))
        if inconsistency > 1e-8 * (1.0 + float(np.linalg.norm(b))):
            raise InputError(
                f"agreement targets are inconsistent: residual {inconsistency:.3e}"
            )

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.proj_dir @ x + self.offset

    def residual(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(self.a_mat @ x - self.b))


# ---------------------------------------------------------------------------
# Problem and report types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionOptions:
    tol: float = FEASIBILITY_TOL
    max_iter: int = 200_000
    seed: Optional[int] = None
    start: str = "deterministic"  # or "random"
    start_scale: float = 1.0

    def __post_init__(self):
        if self.start not in ("deterministic", "random"):
            raise InputError(f"unknown start mode {self.start!r}")
        if self.tol <= 0 or self.max_iter <= 0 or self.start_scale < 0:
            raise InputError("tol, max_iter must be positive and start_scale nonnegative")


@dataclass(frozen=True)
class ExtensionReport:
    iterations: int
    cone_residual: float
    affine_residual: float
    restriction_error: float
    converged: bool


@dataclass(frozen=True)
class ExtensionProblem:
    """A map- or generator-extension problem on a matricial system."""

    system: MatricialSystem
    map_targets: Optional[tuple] = None
    generator: Optional[SubsystemGenerator] = None
    options: ExtensionOptions = field(default_factory=ExtensionOptions)

    def __post_init__(self):
        if (self.map_targets is None) == (self.generator is None):
            raise InputError("exactly one of map_targets / generator must be given")
        if self.generator is not None and self.generator.system is not self.system:
            if len(self.generator.system) != len(self.system):
                raise InputError("generator is defined on a different system")

    @classmethod
    def for_map(cls, system: MatricialSystem, images,
                options: Optional[ExtensionOptions] = None) -> "ExtensionProblem":
        mats = [linalg.as_matrix(m) for m in images]
        if len(mats) != len(system):
            raise InputError(f"{len(mats)} images for {len(system)} basis elements")
        d = system.dim
        for k, m in enumerate(mats):
            if m.shape != (d, d):
                raise InputError(f"image {k} has shape {m.shape}, expected ({d}, {d})")
            if linalg.hermiticity_defect(m) > 1e-10 * (1.0 + float(np.max(np.abs(m)))):
                raise InputError(f"image {k} is not Hermitian; no UCP map can match it")
        if linalg.frob(mats[0] - np.eye(d)) > 1e-8 * d:
            raise InputError("map must be unital on V: image of the identity must be I")
        mats = [linalg.hermitian_part(m) for m in mats]
        return cls(system=system, map_targets=tuple(mats),
                   options=options or ExtensionOptions())

    @classmethod
    def for_generator(cls, system: MatricialSystem, generator: SubsystemGenerator,
                      options: Optional[ExtensionOptions] = None) -> "ExtensionProblem":
        return cls(system=system, generator=generator,
                   options=options or ExtensionOptions())


@dataclass(frozen=True)
class ResolventFamily:
    """A family F(lam) of UCP maps extending lam * R(lam, A) on (0, omega]."""

    omega: float
    f_omega: SuperOp
    grid: tuple
    members: tuple  # pairs (lam, SuperOp), ascending in lam

    def at(self, lam: float) -> SuperOp:
        """F(lam) for any lam in (0, omega], transported from F(omega)."""
        if not 0.0 < lam <= self.omega + 1e-12:
            raise InputError(f"lam must lie in (0, {self.omega}], got {lam}")
        return rescale_resolvent(self.f_omega, lam / self.omega)


@dataclass(frozen=True)
class GroupExtensionReport:
    extension: ExtensionReport
    inverse_residual: float
    uniqueness_spread: float
    multiplicativity_residual: float
    n_starts: int


@dataclass(frozen=True)
class RigidityReport:
    all_identity: bool
    max_pairwise_distance: float
    max_distance_to_identity: float
    identity_threshold: float
    n_converged: int
    n_runs: int


# ---------------------------------------------------------------------------
# Dykstra solver
# ---------------------------------------------------------------------------

_STALL_WINDOW = 2000
_STALL_IMPROVEMENT = 1e-2


class _FeasibilitySolver:
    """Shared precomputation for one feasibility problem (reused across starts)."""

    def __init__(self, system: MatricialSystem, targets, cone_kind: str):
        d = system.dim
        self.system = system
        self.d = d
        self.coords = HermitianCoords(d * d)
        self.affine = _AffineAgreement(system, targets)
        if cone_kind == "psd":
            self.cone = _PsdCone(self.coords)
            base = maps.identity_map(d).choi
        elif cone_kind == "compressed":
            self.cone = _CompressedPsdCone(self.coords, d)
            base = np.zeros((d * d, d * d), dtype=complex)
        else:
            raise ValueError(cone_kind)
        self.base_vec = self.coords.to_vec(base)
        self.targets = [linalg.as_matrix(t) for t in targets]

    def start_point(self, options: ExtensionOptions, seed=None) -> np.ndarray:
        raw = self.base_vec
        use_seed = options.seed if seed is None else seed
        if options.start == "random" or seed is not None:
            rng = np.random.default_rng(use_seed)
            noise = linalg.random_hermitian(self.d * self.d, rng, scale=options.start_scale)
            raw = raw + self.coords.to_vec(noise)
        return self.affine.project(raw)

    def solve(self, options: ExtensionOptions, seed=None):
        tol = options.tol
        inner_tol = 0.2 * tol
        x = self.start_point(options, seed=seed)
        p = np.zeros_like(x)
        q = np.zeros_like(x)
        iterations = 0
        converged_loop = False
        best_gap = np.inf
        window_best = np.inf
        for iterations in range(1, options.max_iter + 1):
            y = self.cone.project(x + p)
            p = x + p - y
            z = self.affine.project(y + q)
            q = y + q - z
            gap = float(np.linalg.norm(y - z))
            step = float(np.linalg.norm(z - x))
            x = z
            if max(gap, step) <= inner_tol:
                converged_loop = True
                break
            best_gap = min(best_gap, gap)
            if iterations % _STALL_WINDOW == 0:
                if (gap > 100.0 * tol and np.isfinite(window_best)
                        and window_best - best_gap < _STALL_IMPROVEMENT * window_best):
                    break  # plateau far from feasibility: sets look disjoint
                window_best = best_gap

        # Return the cone-exact point; its affine defect is bounded by the gap.
        result_vec = self.cone.project(x)
        cone_residual = float(np.linalg.norm(x - result_vec))
        affine_residual = self.affine.residual(result_vec)
        result = SuperOp(self.d, self.coords.to_matrix(result_vec))
        restriction = max(
            linalg.frob(result.apply(v) - t)
            for v, t in zip(self.system.basis, self.targets)
        )
        converged = (converged_loop and cone_residual <= tol
                     and affine_residual <= tol and restriction <= tol)
        report = ExtensionReport(
            iterations=iterations,
            cone_residual=cone_residual,
            affine_residual=affine_residual,
            restriction_error=restriction,
            converged=converged,
        )
        return result, report


# ---------------------------------------------------------------------------
# Map extension
# ---------------------------------------------------------------------------


def extend_ucp_map(problem: ExtensionProblem):
    """Extend a UCP map given on V (by basis images) to a UCP map on M_d.

    Returns ``(superop, report)``.  A non-converged report signals either that
    the given map was not UCP on V (the feasible set is empty) or that the
    iteration budget / tolerance was too tight.
    """
    if problem.map_targets is None:
        raise InputError("extend_ucp_map needs a map-case problem")
    solver = _FeasibilitySolver(problem.system, problem.map_targets, "psd")
    return solver.solve(problem.options)


def ucp_extension_feasible(system: MatricialSystem, images,
                           tol: float = FEASIBILITY_TOL,
                           max_iter: int = 50_000):
    """Feasibility verdict for extending the map v_k -> images[k] to a UCP map.

    Returns ``(feasible, residuals)``; used as the Arveson-type certificate
    that a map given on V is UCP there.
    """
    try:
        problem = ExtensionProblem.for_map(
            system, images, ExtensionOptions(tol=tol, max_iter=max_iter))
    except InputError:
        return False, None
    result, report = extend_ucp_map(problem)
    residuals = {
        "cone": report.cone_residual,
        "affine": report.affine_residual,
        "restriction": report.restriction_error,
        "iterations": report.iterations,
    }
    return report.converged, residuals


# ---------------------------------------------------------------------------
# Resolvent rescaling (geometric power series of a UCP map)
# ---------------------------------------------------------------------------


def rescale_resolvent(phi: SuperOp, beta: float, mode: str = "closed",
                      tol: float = FEASIBILITY_TOL) -> SuperOp:
    """The nonlinear map  phi -> sum_{k>=0} beta (1-beta)^k phi^(k+1).

    For phi = mu * R(mu, G) the result is (beta*mu) * R(beta*mu, G): it
    transports a scaled resolvent from parameter mu to beta*mu.  The map
    preserves unitality and complete positivity for beta in (0, 1].

    ``mode="series"`` truncates at the first K with (1-beta)^(K+1) <= tol;
    the discarded tail has norm at most that coefficient mass because powers
    of a UCP map are contractions.  ``mode="closed"`` evaluates the resummed
    form  beta * phi o (id - (1-beta) phi)^(-1).
    """
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise InputError(f"beta must lie in (0, 1], got {beta}")
    if not maps.is_ucp(phi, max(tol, 1e-6)):
        raise InputError("rescale_resolvent requires a UCP input map")
    t = phi.transfer
    n = t.shape[0]
    if mode == "series":
        out = np.zeros_like(t)
        power = t.copy()  # phi^(k+1)
        coeff = beta
        k = 0
        while True:
            out += coeff * power
            if (1.0 - beta) ** (k + 1) <= tol:
                break
            power = power @ t
            coeff *= 1.0 - beta
            k += 1
        return SuperOp.from_transfer(phi.d, out)
    if mode == "closed":
        m = np.eye(n) - (1.0 - beta) * t
        cond = float(np.linalg.cond(m))
        if not np.isfinite(cond) or cond > 1e13:
            raise NumericalError(
                f"id - (1-beta) phi is numerically singular (cond {cond:.3e}); "
                "the input was not a valid UCP map"
            )
        return SuperOp.from_transfer(phi.d, beta * (t @ np.linalg.inv(m)))
    raise InputError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Generator extension (route A: direct feasibility)
# ---------------------------------------------------------------------------


def _generator_solver(problem: ExtensionProblem) -> _FeasibilitySolver:
    if problem.generator is None:
        raise InputError("a generator-case problem is required")
    return _FeasibilitySolver(problem.system, problem.generator.action, "compressed")


def extend_generator(problem: ExtensionProblem):
    """Extend a subsystem generator A to a conditionally completely positive
    generator G on M_d with G(v_k) = A(v_k) and G(I) = 0.

    Returns ``(generator, report)``.  Feasibility is guaranteed whenever A
    generates a UCP semigroup on V, so persistent non-convergence signals
    invalid input or an insufficient budget.  Because span(V) contains the
    agreement constraints, the evolution of the result restricted to V matches
    the subsystem semigroup.
    """
    solver = _generator_solver(problem)
    result, report = solver.solve(problem.options)
    return dynamics.certify(result, tol=problem.options.tol), report


# ---------------------------------------------------------------------------
# Generator extension (route B: resolvent family)
# ---------------------------------------------------------------------------


def _recover_generator(f_lam: SuperOp, lam: float) -> SuperOp:
    """G = lam * (id - F(lam)^{-1}) at the transfer level."""
    t = f_lam.transfer
    cond = float(np.linalg.cond(t))
    if not np.isfinite(cond) or cond > 1e13:
        raise NumericalError(
            f"family member at lam={lam} is numerically singular (cond {cond:.3e})"
        )
    n = t.shape[0]
    return SuperOp.from_transfer(f_lam.d, lam * (np.eye(n) - np.linalg.inv(t)))


def extend_via_resolvent_family(problem: ExtensionProblem, omega: float,
                                grid: Optional[Sequence[float]] = None,
                                max_doublings: int = 10):
    """Extend a subsystem generator through a family of extended resolvents.

    At parameter omega the map omega * R(omega, A) on V is extended to a UCP
    map F(omega) on M_d; the family F(lam) over the grid is generated from
    F(omega) by resolvent rescaling, each member's generator lam * (id -
    F(lam)^{-1}) is recovered, pairwise agreement is checked, and the
    candidate must be conditionally completely positive.  If it is not, omega
    is doubled and the construction repeats: growing omega shrinks the set of
    admissible families and prunes invalid extensions.  After
    ``max_doublings`` failures a structured error advises the direct
    feasibility route (:func:`extend_generator`).

    Returns ``(generator, family, report)``.
    """
    sub = problem.generator
    if sub is None:
        raise InputError("a generator-case problem is required")
    omega = float(omega)
    if omega <= 0:
        raise InputError(f"omega must be positive, got {omega}")
    if grid is None:
        grid = np.linspace(omega / 8.0, omega, 8)
    grid = sorted(float(g) for g in grid)
    if not grid or grid[0] <= 0 or grid[-1] > omega * (1 + 1e-12):
        raise InputError("grid must be a nonempty subset of (0, omega]")

    opts = problem.options
    # The recovery G = omega (id - F^{-1}) amplifies feasibility error by
    # roughly omega, so the inner map extension runs tighter than tol.
    inner = replace(opts, tol=opts.tol / max(50.0, 4.0 * omega))

    attempts = []
    current = omega
    for _ in range(max_doublings + 1):
        images = dynamics.subsystem_resolvent_images(sub, current)
        map_problem = ExtensionProblem.for_map(sub.system, images, inner)
        f_omega, map_report = extend_ucp_map(map_problem)
        if not map_report.converged:
            attempts.append({"omega": current, "failure": "map extension did not converge",
                             "map_report": map_report})
            current *= 2.0
            continue

        members = [(lam, rescale_resolvent(f_omega, lam / current, tol=inner.tol))
                   for lam in grid]
        recovered = [(lam, _recover_generator(f, lam)) for lam, f in members]
        candidate = _recover_generator(f_omega, current)
        spread = 0.0
        all_ops = [op for _, op in recovered] + [candidate]
        for i in range(len(all_ops)):
            for j in range(i + 1, len(all_ops)):
                spread = max(spread, all_ops[i].distance(all_ops[j]))

        gen = dynamics.certify(candidate, tol=opts.tol)
        restriction = max(
            linalg.frob(candidate.apply(v) - a)
            for v, a in zip(sub.system.basis, sub.action)
        )
        if gen.certificates.certified and spread <= opts.tol and restriction <= opts.tol:
            family = ResolventFamily(omega=current, f_omega=f_omega,
                                     grid=tuple(grid), members=tuple(members))
            report = ExtensionReport(
                iterations=map_report.iterations,
                cone_residual=map_report.cone_residual,
                affine_residual=map_report.affine_residual,
                restriction_error=restriction,
                converged=True,
            )
            return gen, family, report
        attempts.append({
            "omega": current,
            "failure": "recovered generator failed certification",
            "certificates": gen.certificates,
            "spread": spread,
            "restriction": restriction,
        })
        current *= 2.0

    raise ResolventFamilyError(
        f"no conditionally completely positive generator recovered up to "
        f"omega = {current / 2.0} ({max_doublings} doublings from {omega}); "
        "fall back to extend_generator",
        advice="extend_generator",
        attempts=attempts,
    )


# ---------------------------------------------------------------------------
# Group extension
# ---------------------------------------------------------------------------


def extend_group(problem: ExtensionProblem, n_starts: int = 8,
                 sample_ts: Sequence[float] = (0.4, 1.1),
                 seed: int = 0):
    """Extend a one-parameter UCP group on V to a group on M_d, with checks.

    Both +A and -A are validated as UCP subsystem semigroups and extended
    separately.  The result must satisfy, at sampled times and within a
    relaxed tolerance (100 x tol, to absorb error amplification through the
    exponentials):

      * inversion:        exp(t G+) o exp(t G-) = id          (rigid envelope),
      * uniqueness:       n_starts randomized runs agree,
      * multiplicativity: exp(t G+) is an algebra homomorphism on sampled
        pairs, reflecting that group extensions act as *-automorphisms.

    Returns ``(generator, group_report)``; failures raise
    :class:`GroupExtensionError`.
    """
    sub = problem.generator
    if sub is None:
        raise InputError("a generator-case problem is required")
    opts = problem.options
    check_tol = 100.0 * opts.tol

    for signed, label in ((sub, "+A"), (-sub, "-A")):
        verdict = dynamics.validate_subsystem_semigroup(signed, tol=opts.tol)
        if not verdict.valid:
            raise GroupExtensionError(
                f"not a group on V: {label} fails validation ({verdict.message})"
            )

    plus_problem = problem
    minus_problem = ExtensionProblem.for_generator(sub.system, -sub, opts)
    gen_plus, report = extend_generator(plus_problem)
    gen_minus, report_minus = extend_generator(minus_problem)
    if not (report.converged and report_minus.converged):
        raise GroupExtensionError("generator extension did not converge for +A/-A")

    ident = maps.identity_map(sub.system.dim)
    inverse_residual = max(
        dynamics.evolve(gen_plus, t).compose(dynamics.evolve(gen_minus, t)).distance(ident)
        for t in sample_ts
    )
    if inverse_residual > check_tol:
        raise GroupExtensionError(
            f"not a group on V: inverse check residual {inverse_residual:.3e}"
        )

    solver = _generator_solver(problem)
    rng = np.random.default_rng(seed)
    run_ops = [gen_plus.op]
    for _ in range(n_starts):
        run_seed = int(rng.integers(0, 2**32 - 1))
        op, run_report = solver.solve(replace(opts, start="random"), seed=run_seed)
        if run_report.converged:
            run_ops.append(op)
    spread = 0.0
    for i in range(len(run_ops)):
        for j in range(i + 1, len(run_ops)):
            spread = max(spread, run_ops[i].distance(run_ops[j]))
    if spread > 10.0 * opts.tol:
        raise GroupExtensionError(
            f"randomized starts disagree (spread {spread:.3e}): extension is not "
            "unique, contradicting rigidity of the envelope"
        )

    d = sub.system.dim
    mult_residual = 0.0
    for t in sample_ts:
        step = dynamics.evolve(gen_plus, t)
        for _ in range(4):
            a = linalg.random_hermitian(d, rng) + 1j * linalg.random_hermitian(d, rng)
            b = linalg.random_hermitian(d, rng) + 1j * linalg.random_hermitian(d, rng)
            lhs = step.apply(a @ b)
            rhs = step.apply(a) @ step.apply(b)
            scale = 1.0 + linalg.frob(a) * linalg.frob(b)
            mult_residual = max(mult_residual, linalg.frob(lhs - rhs) / scale)
    if mult_residual > check_tol:
        raise GroupExtensionError(
            f"extension is not multiplicative (residual {mult_residual:.3e})"
        )

    group_report = GroupExtensionReport(
        extension=report,
        inverse_residual=inverse_residual,
        uniqueness_spread=spread,
        multiplicativity_residual=mult_residual,
        n_starts=n_starts,
    )
    return gen_plus, group_report


# ---------------------------------------------------------------------------
# Rigidity probe and discrete extension
# ---------------------------------------------------------------------------


def rigidity_probe(system: MatricialSystem, n_starts: int = 8, seed: int = 0,
                   tol: float = FEASIBILITY_TOL,
                   max_iter: int = 200_000) -> RigidityReport:
    """Randomized evidence for rigidity: extend the identity of V from many starts.

    A system is rigid in its envelope when the only UCP extension of id_V is
    the identity.  The probe runs the map-extension solver for phi = id_V from
    the deterministic start plus ``n_starts`` randomized starts and reports
    whether all converged extensions are the identity map.  This is evidence,
    not proof: agreement of finitely many projections cannot certify rigidity.
    """
    options = ExtensionOptions(tol=tol, max_iter=max_iter)
    solver = _FeasibilitySolver(system, list(system.basis), "psd")
    rng = np.random.default_rng(seed)
    ops = []
    op, report = solver.solve(options)
    if report.converged:
        ops.append(op)
    for _ in range(n_starts):
        run_seed = int(rng.integers(0, 2**32 - 1))
        op, report = solver.solve(replace(options, start="random"), seed=run_seed)
        if report.converged:
            ops.append(op)

    ident = maps.identity_map(system.dim)
    identity_threshold = max(50.0 * tol, 1e-6)
    max_pair = 0.0
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            max_pair = max(max_pair, ops[i].distance(ops[j]))
    max_to_id = max((op.distance(ident) for op in ops), default=np.inf)
    return RigidityReport(
        all_identity=bool(ops) and max_to_id <= identity_threshold,
        max_pairwise_distance=max_pair,
        max_distance_to_identity=max_to_id,
        identity_threshold=identity_threshold,
        n_converged=len(ops),
        n_runs=n_starts + 1,
    )


def extend_discrete(system: MatricialSystem, images, horizon: int,
                    options: Optional[ExtensionOptions] = None):
    """Extend a discrete-time UCP semigroup: one map extension, then powers.

    A discrete semigroup is determined by its single step, so the step given
    on V is extended once and the returned list is [id, psi, psi^2, ...,
    psi^horizon].  The k-th power restricted to V matches the k-th power of
    the given map within k * tol.
    """
    horizon = int(horizon)
    if horizon < 0:
        raise InputError("horizon must be nonnegative")
    problem = ExtensionProblem.for_map(system, images, options)
    psi, report = extend_ucp_map(problem)
    if not report.converged:
        raise ExtensionInfeasible(
            f"the given map is not extendably UCP on V (cone residual "
            f"{report.cone_residual:.3e}, affine residual {report.affine_residual:.3e})"
        )
    powers = [maps.identity_map(system.dim)]
    t = psi.transfer
    acc = np.eye(t.shape[0], dtype=complex)
    for _ in range(horizon):
        acc = acc @ t
        powers.append(SuperOp.from_transfer(system.dim, acc))
    return powers
