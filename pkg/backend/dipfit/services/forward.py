"""
Concentric-sphere EEG forward model.

Scalp potential of a current dipole inside the innermost of N concentric
conducting shells, evaluated as a Legendre series. Shell effects enter
through per-degree weights f_n from the layer transfer-matrix recursion;
equal conductivities give f_n = 1 and reduce to the homogeneous sphere.

@CODE:DIP-FORWARD
"""

import logging
from functools import lru_cache

import numpy as np

from core.conf import icabench_settings
from core.exceptions import DipoleDomainError, MontageError, SeriesConvergenceError
from dipfit.domain import Dipole, HeadModel, Montage

logger = logging.getLogger(__name__)

REFERENCES = ('average', 'none')
CHUNK = 64


@lru_cache(maxsize=64)
def _shell_weights(radii: tuple, conductivities: tuple, max_degree: int) -> np.ndarray:
    n_layers = len(radii)
    weights = np.ones(max_degree)
    if n_layers == 1:
        return weights

    outer = radii[-1]
    c1 = np.array([conductivities[k] / conductivities[k + 1] for k in range(n_layers - 1)])
    c2 = c1 - 1.0
    rel_rad = np.array([radii[k] / outer for k in range(n_layers - 1)])

    for n in range(1, max_degree + 1):
        cr = rel_rad ** (2 * n + 1)
        n1 = n + 1.0
        M = np.eye(2)
        for k in range(n_layers - 2, -1, -1):
            M = np.array([[n + n1 * c1[k], n1 * c2[k] / cr[k]],
                          [n * c2[k] * cr[k], n1 + n * c1[k]]]) @ M
        weights[n - 1] = n * (2.0 * n + 1.0) ** (n_layers - 1) / (n * M[1, 1] + n1 * M[1, 0])
    return weights


def shell_weights(head: HeadModel, max_degree: int) -> np.ndarray:
    """Per-degree shell weights f_1..f_max_degree."""
    return _shell_weights(head.radii, head.conductivities, int(max_degree))


def _legendre(x: np.ndarray, max_degree: int):
    """P_n(x) and P_n'(x) for n = 0..max_degree, stacked on the first axis."""
    P = np.empty((max_degree + 1,) + x.shape)
    dP = np.empty_like(P)
    P[0], dP[0] = 1.0, 0.0
    P[1], dP[1] = x, 1.0
    for n in range(1, max_degree):
        P[n + 1] = ((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1)
        dP[n + 1] = dP[n - 1] + (2 * n + 1) * P[n]
    return P, dP


def _series_chunk(positions, unit_electrodes, head, max_degree, series_tol, fail_tol):
    R = head.outer_radius
    sigma = head.conductivities[-1]
    b = np.linalg.norm(positions, axis=1)
    r0 = np.zeros_like(positions)
    r0[:, 2] = 1.0
    inside = b > 0
    r0[inside] = positions[inside] / b[inside, None]

    x = np.clip(r0 @ unit_electrodes.T, -1.0, 1.0)
    P, dP = _legendre(x, max_degree)

    n = np.arange(1, max_degree + 1, dtype=np.float64)
    f = shell_weights(head, max_degree)
    c = ((2 * n + 1) / n)[None, :] * np.power((b / R)[:, None], n - 1) * f[None, :]
    c /= 4.0 * np.pi * sigma * R ** 2

    # terms[k] is degree k + 1, shape (degrees, P, E)
    radial = (n[:, None, None] * P[1:] - x[None] * dP[1:]) * c.T[:, :, None]
    tangential = dP[1:] * c.T[:, :, None]

    magnitude = np.abs(radial) + np.abs(tangential)
    scale = np.abs(radial.sum(axis=0)) + np.abs(tangential.sum(axis=0))
    scale = np.maximum(scale.max(axis=1), np.finfo(float).tiny)
    relative = magnitude.max(axis=2) / scale[None, :]

    below = relative < series_tol
    has_cut = below.any(axis=0)
    cut = np.where(has_cut, below.argmax(axis=0), max_degree - 1)
    stalled = ~has_cut & (relative[-1] > fail_tol)
    if np.any(stalled):
        i = int(np.flatnonzero(stalled)[0])
        raise SeriesConvergenceError(
            f'Legendre series not converged at degree {max_degree} for a dipole at '
            f'{b[i]:.2f} mm (last relative term {relative[-1, i]:.2e}); increase max_degree',
            max_degree=max_degree, radius=float(b[i]))

    keep = (np.arange(max_degree)[:, None] <= cut[None, :])[:, :, None]
    alpha = np.where(keep, radial, 0.0).sum(axis=0)
    beta = np.where(keep, tangential, 0.0).sum(axis=0)
    return alpha[:, :, None] * r0[:, None, :] + beta[:, :, None] * unit_electrodes[None, :, :]


def lead_fields(positions, electrodes, head: HeadModel, max_degree=None) -> np.ndarray:
    """
    Unreferenced unit-moment potentials for many dipole positions.

    Args:
        positions: P x 3 dipole positions in mm, inside the innermost shell
        electrodes: E x 3 electrode positions on the outer shell
        head: Head model
        max_degree: Series cap (settings default when None)

    Returns:
        P x E x 3 array; potential = lead_fields[p] @ moment
    """
    max_degree = int(max_degree or icabench_settings.SERIES_MAX_DEGREE)
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    electrodes = np.asarray(electrodes, dtype=np.float64)
    radii = np.linalg.norm(positions, axis=1)
    if np.any(radii >= head.inner_radius):
        i = int(np.argmax(radii))
        raise DipoleDomainError(
            f'Dipole at {radii[i]:.2f} mm lies outside the innermost shell ({head.inner_radius} mm)',
            radius=float(radii[i]))

    unit = electrodes / np.linalg.norm(electrodes, axis=1, keepdims=True)
    series_tol = float(icabench_settings.SERIES_TOL)
    fail_tol = float(icabench_settings.SERIES_FAIL_TOL)
    out = np.empty((len(positions), len(unit), 3))
    for start in range(0, len(positions), CHUNK):
        stop = start + CHUNK
        out[start:stop] = _series_chunk(positions[start:stop], unit, head, max_degree, series_tol, fail_tol)
    return out


def average_reference(values: np.ndarray, axis: int = 0) -> np.ndarray:
    return values - values.mean(axis=axis, keepdims=True)


def _check_reference(reference):
    if reference not in REFERENCES:
        raise MontageError(f'Unknown reference {reference!r}; expected one of {REFERENCES}')


def lead_field(position, montage: Montage, head: HeadModel, max_degree=None,
               reference='average', use_excluded=False) -> np.ndarray:
    """
    E x 3 unit-moment forward field at one position.

    Rows cover the non-excluded electrodes unless use_excluded is set.
    The average reference is taken over the returned rows.
    """
    _check_reference(reference)
    electrodes = montage.projected(head.outer_radius)
    if not use_excluded:
        electrodes = electrodes[montage.used_indices]
    L = lead_fields(position, electrodes, head, max_degree)[0]
    return average_reference(L) if reference == 'average' else L


def forward_potential(dipole: Dipole, montage: Montage, head: HeadModel,
                      max_degree=None, reference='average') -> np.ndarray:
    """
    Scalp map of a dipole over the non-excluded electrodes.

    Args:
        dipole: Source dipole inside the innermost shell
        montage: Electrode layout
        head: Concentric-shell head model
        max_degree: Series cap (settings default when None)
        reference: 'average' over non-excluded electrodes, or 'none'

    Returns:
        Per-electrode potentials, ordered as montage.used_labels

    Raises:
        DipoleDomainError: Dipole outside the innermost shell
        SeriesConvergenceError: Series not converged at max_degree
    """
    dipole.check_inside(head)
    L = lead_field(dipole.position, montage, head, max_degree, reference)
    return L @ np.asarray(dipole.moment)


def homogeneous_sphere_potential(dipole: Dipole, montage: Montage, radius: float,
                                 conductivity: float, reference='average') -> np.ndarray:
    """
    Closed-form potential of a dipole in a homogeneous sphere.

    Evaluated on the non-excluded electrodes projected to `radius`.
    """
    _check_reference(reference)
    electrodes = montage.projected(radius)[montage.used_indices]
    rd = np.asarray(dipole.position, dtype=np.float64)
    p = np.asarray(dipole.moment, dtype=np.float64)
    if not np.linalg.norm(rd) < radius:
        raise DipoleDomainError(f'Dipole must lie inside the sphere of radius {radius}')

    rd2 = rd @ rd
    if rd2 == 0.0:
        # Centered dipole: only the first series degree survives
        V = 3.0 * (electrodes @ p) / radius / (4.0 * np.pi * conductivity * radius ** 2)
    else:
        a_vec = electrodes - rd
        a = np.linalg.norm(a_vec, axis=1)
        a3 = 2.0 / a ** 3
        r2 = np.sum(electrodes * electrodes, axis=1)
        r = np.sqrt(r2)
        rrd = electrodes @ rd
        ra = r2 - rrd
        rda = rrd - rd2
        F = a * (r * a + ra)
        c1 = a3 * rda + 1.0 / a - 1.0 / r
        c2 = a3 + (a + r) / (r * F)
        m1 = c1 - c2 * rrd
        m2 = c2 * rd2
        V = (m1 * (rd @ p) + m2 * (electrodes @ p)) / rd2 / (4.0 * np.pi * conductivity)
    return average_reference(V) if reference == 'average' else V
