"""Decompose a target unitary into nearest-neighbor pulses and shape them.

A resonant pulse of area C and carrier phase phi on the level pair
(k, k+1) realizes the block

    [[cos C,                i exp(+i phi) sin C],
     [i exp(-i phi) sin C,  cos C             ]]

embedded in the identity (rows and columns k, k+1, levels 1-based). The
area is the dipole-weighted envelope integral, C = D_k * integral A(t) dt
measured above the envelope baseline, so a full population swap is
C = pi / 2.

Decomposition walks columns of the target from last to first. Within a
column the nonzero entries above the diagonal position are chained
downward: the entry on row k is rotated into row k+1, so the column mass
accumulates on the diagonal. Running these eliminations W_1 .. W_K leaves
a diagonal unitary Lambda,

    W_K ... W_1 U = Lambda,

and the physical schedule applies the adjoint pulses in reverse order,
U = W_1^dag ... W_K^dag Lambda. The adjoint of a block pulse is the same
block with phase shifted by pi, so every schedule entry is again a plain
(transition, area, phase) pulse. Lambda is free evolution; its angles are
returned as residual phases rather than synthesized.

Shaping turns each area into a minimum-duration piecewise-linear envelope
under amplitude and slew bounds: a triangle when the required peak stays
below the cap, otherwise a trapezoid riding at the cap.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ValidationError
from .operators import UNITARY_ATOL, as_square_matrix, validate_unitary

# column entries at or below this magnitude are treated as already eliminated
ELIMINATION_ATOL = 1e-13
DIAGONAL_ATOL = 1e-10
AREA_RTOL = 1e-9


def _wrap_angle(angle: float) -> float:
    """Map to (-pi, pi]."""
    a = math.fmod(angle + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class TransitionPulse:
    """Resonant pulse on one nearest-neighbor transition.

    transition is the 1-based level pair (k, k+1); area is the rotation
    coefficient C in [0, pi); phase is the carrier phase in (-pi, pi].
    """

    transition: tuple[int, int]
    area: float
    phase: float

    def __post_init__(self):
        k, k1 = self.transition
        if k1 != k + 1 or k < 1:
            raise ValidationError(f"transition must be (k, k+1) with k >= 1, got {self.transition}")
        if not (0.0 <= self.area < math.pi):
            raise ValidationError(f"area must lie in [0, pi), got {self.area}")


@dataclass(frozen=True)
class PulseConstraints:
    """Hardware envelope limits.

    amplitude_max / amplitude_min bound the envelope (amplitude_min is the
    modulator extinction floor, treated as the baseline); slew_max > 0 and
    slew_min < 0 bound the signed envelope rate of change.
    """

    amplitude_max: float
    amplitude_min: float = 0.0
    slew_max: float = 1.0
    slew_min: float = -1.0

    def __post_init__(self):
        if not (0.0 <= self.amplitude_min <= self.amplitude_max):
            raise ValidationError(
                f"need 0 <= amplitude_min <= amplitude_max, got {self.amplitude_min}, {self.amplitude_max}"
            )
        if self.slew_max <= 0.0 or self.slew_min >= 0.0:
            raise ValidationError(
                f"need slew_min < 0 < slew_max, got {self.slew_min}, {self.slew_max}"
            )

    @property
    def headroom(self) -> float:
        return self.amplitude_max - self.amplitude_min


@dataclass(frozen=True)
class PulseShape:
    """Piecewise-linear envelope, breakpoints ((t, amplitude), ...).

    Amplitudes are absolute; the first and last breakpoints sit on the
    baseline. realized_area is the integral of the envelope above the
    baseline, the quantity the rotation area is proportional to. The
    baseline contribution (baseline times duration) leaks into the drive
    without being compensated; it is exposed for inspection.
    """

    breakpoints: tuple[tuple[float, float], ...]
    duration: float
    realized_area: float

    @property
    def baseline(self) -> float:
        return self.breakpoints[0][1] if self.breakpoints else 0.0

    @property
    def baseline_leakage(self) -> float:
        return self.baseline * self.duration

    def amplitude_at(self, t: float) -> float:
        """Envelope value by linear interpolation; baseline outside the support."""
        if not self.breakpoints:
            return 0.0
        times = [b[0] for b in self.breakpoints]
        values = [b[1] for b in self.breakpoints]
        return float(np.interp(t, times, values))


@dataclass(frozen=True)
class ScheduledPulse:
    pulse: TransitionPulse
    shape: PulseShape | None = None


@dataclass
class PulseSchedule:
    """Ordered pulse train plus the diagonal left over by the decomposition.

    pulses are in application order (pulses[0] acts first). residual_phases
    holds angles theta with R = diag(exp(i theta)); the defining identity is

        (product of pulse unitaries, leftmost = last applied) @ R^dag = target.
    """

    pulses: list[ScheduledPulse]
    residual_phases: np.ndarray
    total_time: float = 0.0

    @property
    def dimension(self) -> int:
        return len(self.residual_phases)

    def residual_matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * np.asarray(self.residual_phases)))

    def reconstruct(self) -> np.ndarray:
        u = np.eye(self.dimension, dtype=complex)
        for sp in self.pulses:
            u = pulse_unitary(sp.pulse, self.dimension) @ u
        return u @ self.residual_matrix().conj().T


def pulse_unitary(pulse: TransitionPulse, dimension: int) -> np.ndarray:
    """Embed the closed-form pulse block into the identity."""
    k = pulse.transition[0]
    if pulse.transition[1] > dimension:
        raise ValidationError(f"transition {pulse.transition} exceeds dimension {dimension}")
    c, s = math.cos(pulse.area), math.sin(pulse.area)
    u = np.eye(dimension, dtype=complex)
    u[k - 1, k - 1] = c
    u[k, k] = c
    u[k - 1, k] = 1j * np.exp(1j * pulse.phase) * s
    u[k, k - 1] = 1j * np.exp(-1j * pulse.phase) * s
    return u


def adjoint_pulse(pulse: TransitionPulse) -> TransitionPulse:
    """Inverse rotation as another pulse: same area, carrier phase shifted by pi."""
    return TransitionPulse(
        transition=pulse.transition, area=pulse.area, phase=_wrap_angle(pulse.phase + math.pi)
    )


def area_phase_from_column(column, k: int) -> tuple[float, float]:
    """Pulse angles that clear a column entry into its upper neighbor.

    Given column entries a_k = r_k exp(i alpha_k) at rows k and k+1
    (1-based), returns (C, phi) such that the pulse on (k, k+1) sends the
    row k+1 entry to zero, accumulating the weight on row k with its
    phase preserved. Conventions: C = atan2(r_{k+1}, r_k) in [0, pi/2]
    (identity when row k+1 is already empty, a full swap when row k is
    empty), phase branch folded so C stays nonnegative.
    """
    col = np.asarray(column, dtype=complex).reshape(-1)
    if not (1 <= k < len(col)):
        raise ValidationError(f"row index {k} has no neighbor k+1 in a column of length {len(col)}")
    upper, lower = col[k - 1], col[k]
    r_up, r_lo = abs(upper), abs(lower)
    if r_lo <= ELIMINATION_ATOL:
        return 0.0, 0.0
    area = math.atan2(r_lo, r_up)
    phase = _wrap_angle(np.angle(upper) - np.angle(lower) - math.pi / 2)
    return area, phase


def _descend_angles(column: np.ndarray, k: int) -> tuple[float, float]:
    """Angles clearing row k downward into row k+1 (mirror of the public primitive)."""
    upper, lower = column[k - 1], column[k]
    area = math.atan2(abs(upper), abs(lower))
    phase = _wrap_angle(np.angle(upper) - np.angle(lower) + math.pi / 2)
    return area, phase


def givens_decompose(target, unitary_atol: float = UNITARY_ATOL) -> PulseSchedule:
    """Exact pulse-train decomposition of a target unitary.

    Returns a PulseSchedule with areas and phases only (shapes unset).
    The identity reconstructed from it matches the target to roundoff;
    the trailing diagonal is reported through residual_phases. Pulse
    count is at most d (d - 1) / 2.
    """
    u = validate_unitary(as_square_matrix(target), atol=unitary_atol)
    d = u.shape[0]
    work = u.astype(complex).copy()
    eliminations: list[TransitionPulse] = []

    for col in range(d, 1, -1):
        for row in range(1, col):
            if abs(work[row - 1, col - 1]) <= ELIMINATION_ATOL:
                continue
            area, phase = _descend_angles(work[:, col - 1], row)
            w = TransitionPulse(transition=(row, row + 1), area=area, phase=phase)
            work = pulse_unitary(w, d) @ work
            eliminations.append(w)

    off_diag = work - np.diag(np.diag(work))
    worst = float(np.abs(off_diag).max()) if d > 1 else 0.0
    if worst > DIAGONAL_ATOL:
        raise ValidationError(
            f"elimination left off-diagonal residue {worst:.3e}; target is not unitary enough"
        )
    diagonal = np.diag(work)
    # residual_phases = Lambda^dag, stored as angles
    residual = -np.angle(diagonal)

    pulses = [ScheduledPulse(pulse=adjoint_pulse(w)) for w in reversed(eliminations)]
    return PulseSchedule(pulses=pulses, residual_phases=residual, total_time=0.0)


def shape_pulse(area_required: float, constraints: PulseConstraints) -> PulseShape:
    """Minimum-duration envelope realizing the required area above baseline.

    A triangular ramp up and down is optimal while the implied peak stays
    under the amplitude cap; beyond that the envelope saturates at the
    cap and holds a plateau (trapezoid). With symmetric slews R the
    closed forms are duration = 2 sqrt(area / R) for the triangle and
    duration = M / R + area / M at cap M for the trapezoid; asymmetric
    slews generalize through the combined ramp factor
    S = 1 / slew_up + 1 / slew_down.
    """
    if area_required < 0.0:
        raise ValidationError(f"area must be nonnegative, got {area_required}")
    if area_required == 0.0:
        return PulseShape(breakpoints=(), duration=0.0, realized_area=0.0)

    cap = constraints.headroom
    if cap <= 0.0:
        raise ValidationError(
            f"no amplitude headroom above the baseline ({constraints.amplitude_min} vs "
            f"{constraints.amplitude_max}); the requested area {area_required} is infeasible"
        )
    rate_up = constraints.slew_max
    rate_down = -constraints.slew_min
    ramp_factor = 1.0 / rate_up + 1.0 / rate_down

    base = constraints.amplitude_min
    peak = math.sqrt(2.0 * area_required / ramp_factor)
    if peak <= cap:
        rise = peak / rate_up
        fall = peak / rate_down
        duration = rise + fall
        points = ((0.0, base), (rise, base + peak), (duration, base))
        realized = 0.5 * peak * duration
    else:
        rise = cap / rate_up
        fall = cap / rate_down
        # plateau length from area = cap^2 * ramp_factor / 2 + cap * plateau
        plateau = (area_required - 0.5 * cap * cap * ramp_factor) / cap
        duration = rise + plateau + fall
        points = (
            (0.0, base),
            (rise, base + cap),
            (rise + plateau, base + cap),
            (duration, base),
        )
        realized = 0.5 * cap * cap * ramp_factor + cap * plateau
    return PulseShape(breakpoints=points, duration=duration, realized_area=realized)


def triangle_duration(area: float, slew: float) -> float:
    """Closed-form minimal duration below the cap, symmetric slews."""
    return 2.0 * math.sqrt(area / slew)


def trapezoid_duration(area: float, cap: float, slew: float) -> float:
    """Closed-form minimal duration at the cap, symmetric slews."""
    return cap / slew + area / cap


def schedule(target, constraints, dipoles=None, unitary_atol: float = UNITARY_ATOL) -> PulseSchedule:
    """Full synthesis: decompose the target, then shape every pulse.

    Parameters
    ----------
    target : unitary to realize
    constraints : PulseConstraints, or a mapping from the lower level k of
        each transition to its own PulseConstraints
    dipoles : transition dipole weights D_k (rotation per unit envelope
        area). A scalar applies everywhere; a mapping is keyed by the
        lower level k. Defaults to 1.0.

    The envelope of pulse m must integrate to C_m / D_k above baseline.
    """
    plan = givens_decompose(target, unitary_atol=unitary_atol)
    total = 0.0
    shaped: list[ScheduledPulse] = []
    for sp in plan.pulses:
        k = sp.pulse.transition[0]
        d_k = _lookup(dipoles, k, default=1.0, what="dipole")
        if d_k <= 0.0:
            raise ValidationError(f"dipole for transition ({k}, {k + 1}) must be positive, got {d_k}")
        limits = _lookup(constraints, k, default=None, what="constraints")
        if limits is None:
            raise ValidationError(f"no constraints provided for transition ({k}, {k + 1})")
        shape = shape_pulse(sp.pulse.area / d_k, limits)
        shaped.append(ScheduledPulse(pulse=sp.pulse, shape=shape))
        total += shape.duration
    return PulseSchedule(pulses=shaped, residual_phases=plan.residual_phases, total_time=total)


def _lookup(table, key: int, default, what: str):
    """Scalar, mapping or None resolution for per-transition parameters."""
    if table is None:
        return default
    if isinstance(table, PulseConstraints):
        return table
    if isinstance(table, (int, float)):
        return float(table)
    try:
        return table[key]
    except (KeyError, IndexError, TypeError):
        raise ValidationError(f"no {what} entry for transition lower level {key}") from None
