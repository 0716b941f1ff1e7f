"""
Domain types for benchmark runs.

Types:
- DatasetSource: a dataset file or a synthetic recipe
- AlgorithmEntry: one algorithm column of the grid
- BenchConfig: validated benchmark configuration
- BenchReport: cells, summary, ordering and timings of a run
- RegressionResult: OLS fit of one per-algorithm metric on another
"""

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Tuple

from core.conf import icabench_settings
from core.exceptions import ConfigValidationError, IcaBenchError, MissingMetricError
from core.io_utils import digest, read_json, write_json
from signals.domain import SynthSpec
from signals.services.dataset_io import infer_format

METRICS = ('mir', 'pmi', 'dipolarity')
BINNING_CHOICES = ('equal-width', 'equal-occupancy')

# Per-algorithm parameter holding the stopping tolerance
TOLERANCE_FIELDS = {
    'picard': 'tol',
    'picard-o': 'tol',
    'fastica': 'tol',
    'infomax': 'w_change',
    'ext-infomax': 'w_change',
}


def _resolve(base_dir, path):
    if path is None:
        return None
    path = Path(path)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    return str(path)


@dataclass(frozen=True)
class DatasetSource:
    """
    One dataset of the grid.

    Attributes:
        id: Dataset identifier used as the cell key
        path: Dataset file (binary or CSV)
        format: 'binary' | 'csv' (inferred when None)
        srate: Sampling rate for CSV files
        synth: Synthetic recipe instead of a file
    """
    id: str
    path: Optional[str] = None
    format: Optional[str] = None
    srate: Optional[float] = None
    synth: Optional[SynthSpec] = None

    @classmethod
    def from_dict(cls, data, base_dir=None, seed: int = 0) -> 'DatasetSource':
        if isinstance(data, str):
            data = {'path': data}
        if not isinstance(data, dict):
            raise ConfigValidationError(f'Dataset entries must be objects or paths, got {data!r}')
        data = dict(data)
        if 'synth' in data:
            recipe = dict(data.pop('synth'))
            recipe.setdefault('seed', seed)
            try:
                spec = SynthSpec.from_dict(recipe)
            except IcaBenchError as e:
                raise ConfigValidationError(f'Invalid synthetic dataset: {e.detail}') from e
            return cls(id=str(data.pop('id', spec.dataset_id)), synth=spec)

        if 'path' not in data:
            raise ConfigValidationError("Dataset entries need 'path' or 'synth'")
        path = _resolve(base_dir, data['path'])
        if not Path(path).exists():
            raise ConfigValidationError(f'Dataset file not found: {path}', path=path)
        default_id = Path(path).name.split('.')[0]
        if (data.get('format') or infer_format(path)) == 'csv' and data.get('srate') is None:
            raise ConfigValidationError(f'CSV dataset {path} needs an srate', path=path)
        return cls(id=str(data.get('id', default_id)), path=path,
                   format=data.get('format'), srate=data.get('srate'))

    def to_dict(self) -> dict:
        if self.synth is not None:
            return {'id': self.id, 'synth': self.synth.to_dict()}
        return {'id': self.id, 'path': self.path, 'format': self.format, 'srate': self.srate}


@dataclass(frozen=True)
class AlgorithmEntry:
    """
    One algorithm of the grid.

    Attributes:
        algorithm_id: Registry id
        params: Parameter overrides (validated by the registry)
        label: Unique column label (defaults to algorithm_id)
        matrix: Unmixing matrix file for 'import'
    """
    algorithm_id: str
    params: dict = field(default_factory=dict)
    label: str = ''
    matrix: Optional[str] = None

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, 'label', self.algorithm_id)

    @classmethod
    def from_dict(cls, data, base_dir=None) -> 'AlgorithmEntry':
        from decompositions.services.registry import resolve_params

        if isinstance(data, str):
            data = {'algorithm_id': data}
        if not isinstance(data, dict) or 'algorithm_id' not in data:
            raise ConfigValidationError(f"Algorithm entries need 'algorithm_id', got {data!r}")
        unknown = sorted(set(data) - {f.name for f in fields(cls)})
        if unknown:
            raise ConfigValidationError(f'Unknown algorithm entry fields: {unknown}')

        algorithm_id = data['algorithm_id']
        params = dict(data.get('params') or {})
        try:
            resolve_params(algorithm_id, params)
        except IcaBenchError as e:
            raise ConfigValidationError(f'Algorithm {algorithm_id!r}: {e.detail}') from e

        matrix = _resolve(base_dir, data.get('matrix'))
        if algorithm_id == 'import':
            if matrix is None:
                raise ConfigValidationError("Algorithm 'import' needs a 'matrix' path")
            if not Path(matrix).exists():
                raise ConfigValidationError(f'Unmixing matrix file not found: {matrix}', path=matrix)
        return cls(algorithm_id=algorithm_id, params=params,
                   label=str(data.get('label') or algorithm_id), matrix=matrix)

    def params_with_seed(self, seed: int) -> dict:
        """Parameters with the run seed filled in where the algorithm takes one."""
        from decompositions.services.registry import ALGORITHMS

        params = dict(self.params)
        accepts = {f.name for f in fields(ALGORITHMS[self.algorithm_id].params_class)}
        if 'seed' in accepts:
            params.setdefault('seed', seed)
        return params

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BenchConfig:
    """
    Benchmark configuration.

    Attributes:
        datasets: Grid rows
        algorithms: Grid columns
        metrics: Subset of METRICS
        bins, binning: Histogram estimator settings
        montage, head_model: Files for dipolarity (cap montage for dipolar synth data)
        exclude: Montage labels left out of fitting
        nd_thresholds: rv thresholds of the ND% curve
        repetitions: Timing repetitions
        seed: Run seed for algorithms and synthetic data without their own
        output_dir: Report directory
        tolerances: Stopping tolerances for the tolerance sweep (descending)
        sweep_algorithm: Algorithm swept over tolerances
        raw_baseline: Also fit random raw-data scalp maps
        fit_options: FitOptions overrides
    """
    datasets: Tuple[DatasetSource, ...]
    algorithms: Tuple[AlgorithmEntry, ...]
    metrics: Tuple[str, ...] = ('mir', 'pmi')
    bins: int = 128
    binning: str = 'equal-width'
    montage: Optional[str] = None
    head_model: Optional[str] = None
    exclude: Tuple[str, ...] = ()
    nd_thresholds: Tuple[float, ...] = ()
    repetitions: int = 5
    seed: int = 0
    output_dir: str = 'results'
    tolerances: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
    sweep_algorithm: str = 'picard'
    raw_baseline: bool = False
    fit_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.nd_thresholds:
            object.__setattr__(self, 'nd_thresholds', tuple(float(t) for t in icabench_settings.ND_THRESHOLDS))
        self.validate()

    def fit_opts(self):
        from dipfit.domain import FitOptions

        try:
            return FitOptions(**self.fit_options)
        except TypeError as e:
            raise ConfigValidationError(f'Invalid fit_options: {e}') from e
        except IcaBenchError as e:
            raise ConfigValidationError(f'Invalid fit_options: {e.detail}') from e

    def validate(self):
        if not self.datasets:
            raise ConfigValidationError('Config needs at least one dataset')
        if not self.algorithms:
            raise ConfigValidationError('Config needs at least one algorithm')
        ids = [d.id for d in self.datasets]
        if len(set(ids)) != len(ids):
            raise ConfigValidationError(f'Dataset ids must be unique: {ids}')
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigValidationError(f'Algorithm labels must be unique: {labels}')
        unknown = sorted(set(self.metrics) - set(METRICS))
        if unknown or not self.metrics:
            raise ConfigValidationError(f'metrics must be a non-empty subset of {METRICS}, got {list(self.metrics)}')
        if self.bins < 2:
            raise ConfigValidationError(f'bins must be >= 2, got {self.bins}')
        if self.binning not in BINNING_CHOICES:
            raise ConfigValidationError(f'binning must be one of {BINNING_CHOICES}, got {self.binning!r}')
        if self.repetitions < 1:
            raise ConfigValidationError(f'repetitions must be >= 1, got {self.repetitions}')
        if not self.nd_thresholds or any(not 0 < t <= 1 for t in self.nd_thresholds):
            raise ConfigValidationError('nd_thresholds must be non-empty values in (0, 1]')
        if any(not t > 0 for t in self.tolerances):
            raise ConfigValidationError('tolerances must be positive')
        if any(b >= a for a, b in zip(self.tolerances, self.tolerances[1:])):
            raise ConfigValidationError('tolerances must be strictly descending')
        if self.sweep_algorithm not in TOLERANCE_FIELDS:
            raise ConfigValidationError(
                f'sweep_algorithm must be one of {sorted(TOLERANCE_FIELDS)}, got {self.sweep_algorithm!r}')
        if 'dipolarity' in self.metrics and self.montage is None:
            files = [d.id for d in self.datasets if d.synth is None or d.synth.mixing != 'dipolar']
            if files:
                raise ConfigValidationError(
                    f'dipolarity needs a montage for datasets {files}')
        for path in (self.montage, self.head_model):
            if path is not None and not Path(path).exists():
                raise ConfigValidationError(f'File not found: {path}', path=path)
        self.fit_opts()

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> 'BenchConfig':
        """
        Build a config from parsed JSON; relative paths resolve against base_dir.

        Raises:
            ConfigValidationError: Unknown keys, missing files or invalid values
        """
        if not isinstance(data, dict):
            raise ConfigValidationError('Config must be a JSON object')
        unknown = sorted(set(data) - {f.name for f in fields(cls)})
        if unknown:
            raise ConfigValidationError(f'Unknown config keys: {unknown}')

        seed = int(data.get('seed', 0))
        values = dict(data)
        values['datasets'] = tuple(
            DatasetSource.from_dict(d, base_dir, seed) for d in data.get('datasets') or ())
        values['algorithms'] = tuple(
            AlgorithmEntry.from_dict(a, base_dir) for a in data.get('algorithms') or ())
        for key in ('metrics', 'exclude'):
            if key in values:
                values[key] = tuple(values[key])
        for key in ('nd_thresholds', 'tolerances'):
            if key in values:
                values[key] = tuple(float(v) for v in values[key])
        values.setdefault('nd_thresholds', tuple(icabench_settings.ND_THRESHOLDS))
        values.setdefault('bins', int(icabench_settings.DEFAULT_BINS))
        values.setdefault('binning', icabench_settings.DEFAULT_BINNING)
        values.setdefault('output_dir', str(icabench_settings.OUTPUT_DIR))
        for key in ('montage', 'head_model', 'output_dir'):
            values[key] = _resolve(base_dir, values.get(key))
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigValidationError(f'Invalid config: {e}') from e

    @classmethod
    def load(cls, path, **overrides) -> 'BenchConfig':
        """Read a JSON config; non-None overrides (CLI flags) replace config values."""
        data = read_json(path)
        if not isinstance(data, dict):
            raise ConfigValidationError(f'{path}: config must be a JSON object', path=str(path))
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if 'output_dir' in overrides:
            overrides['output_dir'] = str(Path(overrides['output_dir']).resolve())
        return cls.from_dict({**data, **overrides}, base_dir=Path(path).resolve().parent)

    def to_dict(self) -> dict:
        out = asdict(self)
        out['datasets'] = [d.to_dict() for d in self.datasets]
        out['algorithms'] = [a.to_dict() for a in self.algorithms]
        return out

    def digest(self) -> str:
        """Digest of everything that affects metric values."""
        payload = self.to_dict()
        payload.pop('output_dir')
        return digest(payload)


@dataclass(frozen=True)
class RegressionResult:
    """
    Ordinary least squares fit y = slope x + intercept.

    p_value is the two-sided t-test on the slope with n - 2 degrees of freedom.
    """
    slope: float
    intercept: float
    r_squared: float
    p_value: float
    n_points: int

    @property
    def neg_log10_p(self) -> float:
        return -math.log10(self.p_value)

    def to_dict(self) -> dict:
        return {**asdict(self), 'neg_log10_p': self.neg_log10_p}


@dataclass(frozen=True)
class BenchReport:
    """
    Result of run_benchmark.

    Attributes:
        provenance: Config digest, seed, estimator settings, thread count, versions
        cells: One record per (algorithm, dataset), in config order
        summary: Per-algorithm mean/std of every metric
        ordering: Per-dataset algorithm order by MIR and order_preserved
        timings: Decomposition and metric seconds per cell (not deterministic)
        baselines: Raw-data dipolarity per dataset
    """
    provenance: dict
    cells: Tuple[dict, ...]
    summary: dict
    ordering: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    baselines: dict = field(default_factory=dict)

    SECTIONS = ('provenance', 'cells', 'summary', 'ordering', 'timings', 'baselines')

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def failed_cells(self) -> Tuple[dict, ...]:
        return tuple(cell for cell in self.cells if not cell['success'])

    @property
    def algorithms(self) -> Tuple[str, ...]:
        return tuple(self.provenance.get('algorithms', ()))

    @property
    def datasets(self) -> Tuple[str, ...]:
        return tuple(self.provenance.get('datasets', ()))

    def cell(self, algorithm: str, dataset: str) -> dict:
        for cell in self.cells:
            if cell['algorithm'] == algorithm and cell['dataset'] == dataset:
                return cell
        raise KeyError((algorithm, dataset))

    def require(self, metric: str, what: str = 'this analysis'):
        """Raise MissingMetricError unless some successful cell carries metric."""
        if not any(cell['success'] and metric in cell for cell in self.cells):
            raise MissingMetricError(f'{what} needs the {metric!r} metric, which the report lacks',
                                     metric=metric)

    def metric_sections(self) -> dict:
        """The deterministic part of the report."""
        return {'cells': list(self.cells), 'summary': self.summary, 'ordering': self.ordering}

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.SECTIONS}

    @classmethod
    def from_dict(cls, data: dict) -> 'BenchReport':
        missing = [name for name in ('provenance', 'cells', 'summary') if name not in data]
        if missing:
            raise MissingMetricError(f'Report is missing sections {missing}')
        values = {name: data[name] for name in cls.SECTIONS if name in data}
        values['cells'] = tuple(data['cells'])
        return cls(**values)

    def save(self, path) -> Path:
        write_json(path, self.to_dict())
        return Path(path)

    @classmethod
    def load(cls, path) -> 'BenchReport':
        return cls.from_dict(read_json(path))
