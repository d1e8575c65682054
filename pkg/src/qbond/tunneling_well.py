"""Bound levels, tunneling probabilities and escape times for a step well.

Geometry (one dimensional, hard wall at x = 0):

    V(x) = 0                for 0 <= x < a      (well interior)
           barrier_height   for a <= x < b      (finite barrier)
           plateau_height   for x >= b          (outer plateau)

Levels below the plateau are bound for good; levels between the plateau
and the barrier top can escape by tunneling through the strip [a, b].
Bound levels solve

    tan(sqrt(2 m E) a / hbar) = -sqrt(E / (V0 - E)),   0 < E < V0,

with V0 the barrier height. The solver scans a uniform grid in the wave
number k = sqrt(2 m E) / hbar, keeps sign changes that stay on a single
tangent branch (the tangent poles are not roots) and refines each
bracket by bisection.

All energies and lengths are SI internally; electronvolt conversion
happens at the interface layer.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .constants import ELECTRON_MASS_KG, HBAR_JS
from .errors import NumericalError, ValidationError

GRID_POINTS = 10_000
ENERGY_RTOL = 1e-12
QUADRATURE_RTOL = 1e-10
POPULATION_ATOL = 1e-12

KIND_BOUND = "bound"
KIND_TUNNELING = "tunneling"
KIND_UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class WellGeometry:
    """Step-well geometry in SI units.

    well_width: inner region size a (m)
    barrier_end: outer barrier coordinate b (m), barrier occupies [a, b)
    barrier_height: V0 (J)
    plateau_height: V0' (J), potential beyond the barrier
    """

    well_width: float
    barrier_end: float
    barrier_height: float
    plateau_height: float
    mass: float = ELECTRON_MASS_KG

    def __post_init__(self):
        if not (0 < self.well_width < self.barrier_end):
            raise ValidationError(
                f"need 0 < well_width < barrier_end, got {self.well_width}, {self.barrier_end}"
            )
        if self.barrier_height <= 0:
            raise ValidationError(f"barrier height must be positive, got {self.barrier_height}")
        if not (0 <= self.plateau_height < self.barrier_height):
            raise ValidationError(
                "plateau height must satisfy 0 <= plateau < barrier, got "
                f"{self.plateau_height} vs {self.barrier_height}"
            )
        if self.mass <= 0:
            raise ValidationError(f"mass must be positive, got {self.mass}")

    @property
    def barrier_width(self) -> float:
        return self.barrier_end - self.well_width


@dataclass(frozen=True)
class BoundState:
    index: int        # 1-based, energies ascending
    energy: float     # J
    kind: str         # bound | tunneling | unbounded


@dataclass(frozen=True)
class TunnelingEstimate:
    probability: float
    crossing_time: float     # seconds, 2 * barrier_width / velocity
    tunneling_time: float    # seconds, crossing_time / probability


def _match_residue(geometry: WellGeometry, k: float) -> float:
    """tan(k a) + sqrt(E / (V0 - E)) evaluated at wave number k; roots are levels."""
    e = (HBAR_JS * k) ** 2 / (2.0 * geometry.mass)
    return math.tan(k * geometry.well_width) + math.sqrt(e / (geometry.barrier_height - e))


def _tangent_branch(geometry: WellGeometry, k: float) -> int:
    """Index of the tangent branch containing k a (poles at half-integer pi)."""
    return int(math.floor(k * geometry.well_width / math.pi + 0.5))


def bound_state_energies(
    geometry: WellGeometry,
    grid_points: int = GRID_POINTS,
    rtol: float = ENERGY_RTOL,
) -> np.ndarray:
    """All solutions of the level condition in (0, barrier_height), ascending (J).

    Scans grid_points wave numbers, brackets sign changes that do not
    straddle a tangent pole, and bisects each bracket until the energy is
    converged to the relative tolerance.
    """
    k_max = math.sqrt(2.0 * geometry.mass * geometry.barrier_height) / HBAR_JS
    ks = np.linspace(k_max * 1e-9, k_max * (1.0 - 1e-12), grid_points)
    roots = []
    prev_k = ks[0]
    prev_f = _match_residue(geometry, prev_k)
    prev_branch = _tangent_branch(geometry, prev_k)
    for k in ks[1:]:
        f = _match_residue(geometry, k)
        branch = _tangent_branch(geometry, k)
        if branch == prev_branch and (prev_f == 0.0 or (prev_f < 0.0) != (f < 0.0)):
            lo, f_lo = prev_k, prev_f
            hi = k
            # bisect in k; energy scales as k^2 so halve the k tolerance
            while (hi - lo) > 0.5 * rtol * (lo + hi) / 2.0:
                mid = 0.5 * (lo + hi)
                f_mid = _match_residue(geometry, mid)
                if f_mid == 0.0:
                    lo = hi = mid
                    break
                if (f_mid < 0.0) == (f_lo < 0.0):
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            k_root = 0.5 * (lo + hi)
            roots.append((HBAR_JS * k_root) ** 2 / (2.0 * geometry.mass))
        prev_k, prev_f, prev_branch = k, f, branch
    return np.array(sorted(roots))


def classify_levels(geometry: WellGeometry, energies) -> list[BoundState]:
    """Label each level bound, tunneling or unbounded.

    Thresholds are exact: bound strictly below the plateau, tunneling on
    the closed interval [plateau, barrier), unbounded at or above the
    barrier top.
    """
    out = []
    for n, e in enumerate(np.sort(np.asarray(energies, dtype=float)), start=1):
        if e < geometry.plateau_height:
            kind = KIND_BOUND
        elif e < geometry.barrier_height:
            kind = KIND_TUNNELING
        else:
            kind = KIND_UNBOUNDED
        out.append(BoundState(index=n, energy=float(e), kind=kind))
    return out


def wkb_transmission(geometry: WellGeometry, energy: float) -> float:
    """Closed-form tunneling probability through the rectangular strip.

        P = exp(-2 sqrt(2 m (V0 - E)) (b - a) / hbar)

    Defined for any energy below the barrier top. Whether a level
    actually escapes depends on its classification (only levels above
    the plateau see free space beyond the strip); that call is left to
    the caller so the formula stays usable for comparisons.
    """
    _require_below_barrier(geometry, energy)
    exponent = (
        2.0
        * math.sqrt(2.0 * geometry.mass * (geometry.barrier_height - energy))
        * geometry.barrier_width
        / HBAR_JS
    )
    return min(1.0, math.exp(-exponent))


def barrier_action_quadrature(
    potential,
    x_lo: float,
    x_hi: float,
    energy: float,
    mass: float,
    rtol: float = QUADRATURE_RTOL,
    max_doublings: int = 26,
) -> float:
    """Integral of sqrt(2 m (V(x) - E)) over [x_lo, x_hi] by composite Simpson.

    The interval count doubles until the result changes by less than rtol
    in relative terms. Regions where V < E contribute zero, so piecewise
    barriers with classically allowed gaps integrate correctly.
    """
    if x_hi <= x_lo:
        raise ValidationError(f"need x_lo < x_hi, got {x_lo}, {x_hi}")

    def integrand(x):
        return np.sqrt(np.maximum(2.0 * mass * (np.vectorize(potential)(x) - energy), 0.0))

    previous = None
    n = 8
    for _ in range(max_doublings):
        xs = np.linspace(x_lo, x_hi, n + 1)
        ys = integrand(xs)
        h = (x_hi - x_lo) / n
        total = (h / 3.0) * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum())
        if previous is not None and abs(total - previous) <= rtol * max(abs(total), 1e-300):
            return float(total)
        previous = total
        n *= 2
    raise NumericalError(f"Simpson quadrature did not reach rtol={rtol} within {max_doublings} doublings")


def wkb_transmission_quadrature(
    geometry: WellGeometry, energy: float, rtol: float = QUADRATURE_RTOL
) -> float:
    """Quadrature route to the same transmission; serves as an independent check."""
    _require_below_barrier(geometry, energy)
    action = barrier_action_quadrature(
        lambda x: geometry.barrier_height,
        geometry.well_width,
        geometry.barrier_end,
        energy,
        geometry.mass,
        rtol=rtol,
    )
    return min(1.0, math.exp(-2.0 * action / HBAR_JS))


def _require_below_barrier(geometry: WellGeometry, energy: float) -> None:
    if not (0.0 < energy < geometry.barrier_height):
        states = classify_levels(geometry, [energy])
        raise ValidationError(
            f"energy {energy!r} J is outside (0, {geometry.barrier_height!r}) J "
            f"where the strip formula applies; it classifies as {states[0].kind}"
        )


def tunneling_time(geometry: WellGeometry, energy: float, probability: float) -> TunnelingEstimate:
    """Escape-time estimate from the attempt-frequency picture.

    The level traverses the barrier strip at v = sqrt(2 E / m); one
    attempt takes 2 (b - a) / v (out and back) and succeeds with the
    given probability, so the expected escape time is the crossing time
    divided by the probability. A vanishing probability yields an
    infinite time rather than an error.
    """
    if energy <= 0:
        raise ValidationError(f"energy must be positive, got {energy}")
    if not (0.0 <= probability <= 1.0):
        raise ValidationError(f"probability must lie in [0, 1], got {probability}")
    velocity = math.sqrt(2.0 * energy / geometry.mass)
    crossing = 2.0 * geometry.barrier_width / velocity
    escape = math.inf if probability == 0.0 else crossing / probability
    return TunnelingEstimate(probability=probability, crossing_time=crossing, tunneling_time=escape)


@dataclass(frozen=True)
class ExcitationPlan:
    """Permutation plan moving trapped population onto tunneling levels.

    The unitary is the permutation matrix obtained by applying the
    transpositions (sources[i], targets[i]) in order (1-based level
    indices). When every populated level fits onto a free tunneling level
    the pairs are disjoint and the permutation is an involution, matching
    the two-pair swap form. multi_step is set when there are fewer free
    tunneling levels than populated non-tunneling levels; the overflow
    populations are then staged on the uppermost non-tunneling levels and
    at least one more round is needed after the tunneling levels drain.
    """

    sources: tuple[int, ...]
    targets: tuple[int, ...]
    unitary: np.ndarray
    multi_step: bool


def excitation_plan(initial_populations, states: list[BoundState]) -> ExcitationPlan:
    """Choose which populations to promote onto which tunneling levels.

    initial_populations[i] belongs to states[i] (levels ascending, no
    coherences). The largest population goes to the lowest free tunneling
    level, the next to the next, which minimizes the excitation energy
    spent. Populations already sitting on tunneling levels stay put.
    """
    from .operators import validate_probability_vector

    p = validate_probability_vector(initial_populations)
    if len(p) != len(states):
        raise ValidationError(
            f"population count {len(p)} does not match level count {len(states)}"
        )
    order = [s.index for s in states]
    if order != sorted(order) or any(
        states[i].energy > states[i + 1].energy for i in range(len(states) - 1)
    ):
        raise ValidationError("states must be ordered by ascending energy")

    d = len(states)
    tunneling = [s.index for s in states if s.kind == KIND_TUNNELING]
    if not tunneling:
        raise ValidationError(
            "no tunneling level exists; narrow the barrier or lower the plateau "
            "so at least one level falls in the tunneling window"
        )

    populated = {states[i].index for i in range(d) if p[i] > POPULATION_ATOL}
    trapped = [
        idx
        for idx in sorted(populated, key=lambda idx: (-p[idx - 1], idx))
        if states[idx - 1].kind != KIND_TUNNELING
    ]

    unitary = np.eye(d)
    if not trapped:
        return ExcitationPlan(sources=(), targets=(), unitary=unitary, multi_step=False)

    free_tunneling = [idx for idx in tunneling if idx not in populated]
    multi_step = len(trapped) > len(free_tunneling)

    sources: list[int] = []
    targets: list[int] = []
    promoted = trapped[: len(free_tunneling)]
    for src, tgt in zip(promoted, free_tunneling):
        sources.append(src)
        targets.append(tgt)

    if multi_step:
        # stage the leftovers on the highest trap levels so the next round
        # can lift them once the tunneling levels drain
        leftovers = trapped[len(free_tunneling):]
        staging = [
            s.index
            for s in reversed(states)
            if s.kind != KIND_TUNNELING and s.index not in targets
        ]
        for src, tgt in zip(leftovers, staging):
            if src == tgt:
                continue
            sources.append(src)
            targets.append(tgt)

    for src, tgt in zip(sources, targets):
        unitary[[src - 1, tgt - 1]] = unitary[[tgt - 1, src - 1]]

    return ExcitationPlan(
        sources=tuple(sources), targets=tuple(targets), unitary=unitary, multi_step=multi_step
    )
