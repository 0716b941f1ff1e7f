"""
Domain types for equivalent-dipole modeling.

Types:
- HeadModel: concentric shell radii and conductivities
- Montage: electrode labels and positions plus excluded (eye) channels
- Dipole, DipoleFit, DipolarityReport
- FitOptions: grid and refinement settings
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np
import pandas as pd

from core.conf import icabench_settings
from core.exceptions import DipoleDomainError, MontageError

DEFAULT_RADII_MM = (71.0, 72.0, 79.0, 85.0)
DEFAULT_CONDUCTIVITIES = (0.33, 0.0042, 1.0, 0.33)
POSITION_TOLERANCE = 0.05
MIN_FIT_ELECTRODES = 6


@dataclass(frozen=True)
class HeadModel:
    """
    Concentric-sphere head model, innermost shell first.

    Attributes:
        radii: Strictly ascending shell radii in mm
        conductivities: Positive conductivity per shell (only ratios matter)
    """
    radii: Tuple[float, ...] = DEFAULT_RADII_MM
    conductivities: Tuple[float, ...] = DEFAULT_CONDUCTIVITIES

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        sigmas = tuple(float(s) for s in self.conductivities)
        object.__setattr__(self, 'radii', radii)
        object.__setattr__(self, 'conductivities', sigmas)
        if not radii or len(radii) != len(sigmas):
            raise MontageError(
                f'Head model needs one conductivity per shell ({len(radii)} radii, {len(sigmas)} conductivities)')
        if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
            raise MontageError(f'Shell radii must be positive and strictly ascending: {radii}')
        if any(s <= 0 for s in sigmas):
            raise MontageError(f'Conductivities must be positive: {sigmas}')

    @classmethod
    def default(cls) -> 'HeadModel':
        return cls()

    @property
    def inner_radius(self) -> float:
        return self.radii[0]

    @property
    def outer_radius(self) -> float:
        return self.radii[-1]

    @property
    def n_shells(self) -> int:
        return len(self.radii)

    def to_dict(self) -> dict:
        return {'radii_mm': list(self.radii), 'conductivities': list(self.conductivities)}

    @classmethod
    def from_dict(cls, data: dict) -> 'HeadModel':
        try:
            return cls(radii=tuple(data['radii_mm']), conductivities=tuple(data['conductivities']))
        except (KeyError, TypeError) as e:
            raise MontageError(f'Head model needs radii_mm and conductivities: {e}') from e


@dataclass(frozen=True, eq=False)
class Montage:
    """
    Electrode layout.

    Attributes:
        labels: Electrode labels
        positions: E x 3 positions in mm
        exclude: Labels left out of fitting (e.g. channels nearest the eyes)
    """
    labels: Tuple[str, ...]
    positions: np.ndarray
    exclude: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        positions = np.array(self.positions, dtype=np.float64, copy=True)
        positions.setflags(write=False)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'positions', positions)
        object.__setattr__(self, 'exclude', frozenset(self.exclude))

        if positions.shape != (len(labels), 3):
            raise MontageError(f'Expected {len(labels)} x 3 positions, got {positions.shape}')
        if len(set(labels)) != len(labels):
            raise MontageError('Electrode labels must be unique')
        unknown = sorted(self.exclude - set(labels))
        if unknown:
            raise MontageError(f'Excluded labels not in montage: {unknown}')
        if len(self.used_indices) < 4:
            raise MontageError(f'Montage needs at least 4 non-excluded electrodes, got {len(self.used_indices)}')
        if not np.all(np.isfinite(positions)) or np.any(np.linalg.norm(positions, axis=1) == 0):
            raise MontageError('Electrode positions must be finite and away from the origin')

    @property
    def n_electrodes(self) -> int:
        return len(self.labels)

    @property
    def used_indices(self) -> np.ndarray:
        return np.array([i for i, label in enumerate(self.labels) if label not in self.exclude], dtype=int)

    @property
    def used_labels(self) -> Tuple[str, ...]:
        return tuple(self.labels[i] for i in self.used_indices)

    def projected(self, radius: float) -> np.ndarray:
        """Positions scaled onto the sphere of the given radius."""
        norms = np.linalg.norm(self.positions, axis=1)
        off = np.abs(norms - radius) > POSITION_TOLERANCE * radius
        if np.any(off):
            i = int(np.flatnonzero(off)[0])
            raise MontageError(
                f'Electrode {self.labels[i]} lies {norms[i]:.1f} mm from the center, '
                f'more than {POSITION_TOLERANCE:.0%} off the scalp radius {radius:.1f} mm',
                electrode=self.labels[i])
        return self.positions * (radius / norms)[:, None]

    def key(self) -> tuple:
        """Hashable identity used by lead-field caches."""
        return (self.labels, self.positions.tobytes(), tuple(sorted(self.exclude)))

    def __eq__(self, other):
        if not isinstance(other, Montage):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


@dataclass(frozen=True)
class Dipole:
    """Current dipole: position in mm, moment in arbitrary source units."""
    position: Tuple[float, float, float]
    moment: Tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, 'position', tuple(float(v) for v in self.position))
        object.__setattr__(self, 'moment', tuple(float(v) for v in self.moment))
        if len(self.position) != 3 or len(self.moment) != 3:
            raise DipoleDomainError('Dipole position and moment must be 3-vectors')

    def check_inside(self, head: HeadModel):
        radius = float(np.linalg.norm(self.position))
        if not radius < head.inner_radius:
            raise DipoleDomainError(
                f'Dipole at {radius:.2f} mm lies outside the innermost shell ({head.inner_radius} mm)',
                radius=radius)

    def to_dict(self) -> dict:
        return {'position_mm': list(self.position), 'moment': list(self.moment)}


@dataclass(frozen=True)
class FitOptions:
    """
    Dipole fit settings; None falls back to the ICABENCH settings.

    Attributes:
        grid_spacing: Coarse lattice spacing in mm
        search_fraction: Search bound as a fraction of the innermost radius
        max_degree: Legendre series cap
        refine: Run Nelder-Mead after the grid scan
        max_refine_iter: Nelder-Mead iteration cap
        xatol: Nelder-Mead position tolerance in mm
    """
    grid_spacing: Optional[float] = None
    search_fraction: Optional[float] = None
    max_degree: Optional[int] = None
    refine: bool = True
    max_refine_iter: int = 400
    xatol: float = 1e-3

    def __post_init__(self):
        if self.grid_spacing is None:
            object.__setattr__(self, 'grid_spacing', float(icabench_settings.GRID_SPACING_MM))
        if self.search_fraction is None:
            object.__setattr__(self, 'search_fraction', float(icabench_settings.SEARCH_FRACTION))
        if self.max_degree is None:
            object.__setattr__(self, 'max_degree', int(icabench_settings.SERIES_MAX_DEGREE))
        if self.grid_spacing <= 0 or not 0 < self.search_fraction < 1:
            raise DipoleDomainError('grid_spacing must be > 0 and search_fraction in (0, 1)')
        if self.max_degree < 20:
            raise DipoleDomainError(f'max_degree must be >= 20, got {self.max_degree}')


@dataclass(frozen=True, eq=False)
class DipoleFit:
    """
    Best single equivalent dipole for one scalp map.

    Attributes:
        dipole: Fitted dipole
        rv: Residual variance fraction in [0, 1]
        projected_map: Average-referenced model map over the used electrodes
        fit_iterations: Nelder-Mead iterations (0 when refinement is off)
        boundary: True when the optimum sits on the search bound
    """
    dipole: Dipole
    rv: float
    projected_map: np.ndarray
    fit_iterations: int = 0
    boundary: bool = False

    def to_dict(self) -> dict:
        return {
            'dipole': self.dipole.to_dict(),
            'rv': self.rv,
            'fit_iterations': self.fit_iterations,
            'boundary': self.boundary,
        }


@dataclass(frozen=True)
class DipolarityReport:
    """
    Residual variances of every component map and the ND% curve.

    Failed fits count as non-dipolar; their indices are in failed_components.
    """
    rv: Tuple[Optional[float], ...]
    thresholds: Tuple[float, ...]
    failed_components: Tuple[int, ...] = ()
    errors: Tuple[dict, ...] = ()
    fits: Tuple[DipoleFit, ...] = ()

    @property
    def n_components(self) -> int:
        return len(self.rv)

    def nd_percent(self, threshold: float) -> float:
        """Percentage of all components with rv strictly below threshold."""
        if not self.rv:
            return 0.0
        hits = sum(1 for value in self.rv if value is not None and value < threshold)
        return 100.0 * hits / len(self.rv)

    @property
    def curve(self) -> Dict[float, float]:
        return {t: self.nd_percent(t) for t in self.thresholds}

    def curve_frame(self, label: str = 'nd_percent') -> pd.DataFrame:
        return pd.DataFrame({'threshold': list(self.thresholds),
                             label: [self.nd_percent(t) for t in self.thresholds]})

    def to_dict(self) -> dict:
        return {
            'rv': list(self.rv),
            'thresholds': list(self.thresholds),
            'nd_percent': [self.nd_percent(t) for t in self.thresholds],
            'failed_components': list(self.failed_components),
            'errors': list(self.errors),
            'reference': 'average',
        }
