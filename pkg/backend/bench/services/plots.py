"""
Figures of a benchmark report. Every figure is written as SVG together with
a CSV of exactly the plotted values.

Kinds:
- dipolarity-curves: mean ND% against rv threshold per algorithm
- nd-vs-mir: ND% against MIR and remnant PMI with +-0.2 std ellipses
- mir-by-dataset: per-dataset MIR grouped by algorithm
- mir-difference: mean MIR shortfall of each algorithm relative to the best
- runtime: decomposition wall-clock time per algorithm
- mir-vs-tolerance: mean MIR across stopping tolerances with reference lines
"""

import logging
from pathlib import Path

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.patches import Ellipse  # noqa: E402

from bench.services.statistics import algorithm_means, regress  # noqa: E402
from bench.services.summary import describe, nd_percent  # noqa: E402
from core.exceptions import DegenerateRegressorError, InvalidParamsError, MissingMetricError  # noqa: E402
from core.io_utils import atomic_write_text  # noqa: E402

logger = logging.getLogger(__name__)

PLOT_KINDS = ('dipolarity-curves', 'nd-vs-mir', 'mir-by-dataset', 'mir-difference',
              'runtime', 'mir-vs-tolerance')
ELLIPSE_STD = 0.2
LEGEND_THRESHOLD = 0.10
DEFAULT_ND_THRESHOLD = 0.05
RC = {'svg.hashsalt': 'icabench', 'svg.fonttype': 'none'}


def _save(fig, frame: pd.DataFrame, out_dir: Path, name: str, extra=None):
    out_dir.mkdir(parents=True, exist_ok=True)
    svg_path = out_dir / f'{name}.svg'
    csv_path = out_dir / f'{name}.csv'
    fig.tight_layout()
    fig.savefig(svg_path, format='svg', metadata={'Date': None})
    plt.close(fig)
    atomic_write_text(csv_path, frame.to_csv(index=False, float_format='%.17g'))
    paths = [svg_path, csv_path]
    for suffix, extra_frame in (extra or {}).items():
        path = out_dir / f'{name}.{suffix}.csv'
        atomic_write_text(path, extra_frame.to_csv(index=False, float_format='%.17g'))
        paths.append(path)
    return paths


def _require(report, metric, kind):
    report.require(metric, f'Plot {kind!r}')


def dipolarity_curves(report, out_dir):
    kind = 'dipolarity-curves'
    _require(report, 'dipolarity', kind)
    thresholds = list(report.provenance['nd_thresholds'])

    curves = {}
    for label in report.algorithms:
        points = [algorithm_means(report, 'nd_percent', threshold=t).get(label) for t in thresholds]
        if all(p is not None for p in points):
            curves[label] = [p['mean'] for p in points]
    at_legend = {label: describe(nd_percent(c['dipolarity'], LEGEND_THRESHOLD)
                                 for c in report.cells
                                 if c['algorithm'] == label and c['success'] and 'dipolarity' in c)['mean']
                 for label in curves}
    order = sorted(curves, key=lambda label: -at_legend[label])

    baselines = [b['dipolarity'] for b in report.baselines.values() if b.get('success')]
    frame = pd.DataFrame({'threshold': thresholds})
    for label in order:
        frame[label] = curves[label]
    if baselines:
        frame['raw-data'] = [describe(nd_percent(b, t) for b in baselines)['mean'] for t in thresholds]

    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(8, 6))
        for column in frame.columns[1:]:
            style = 'k--' if column == 'raw-data' else '-'
            ax.plot(100.0 * frame['threshold'], frame[column], style, label=column)
        ax.set_xlabel('Residual variance threshold (%)')
        ax.set_ylabel('Near-dipolar components (%)')
        ax.set_title('Dipolarity by residual variance threshold')
        ax.legend(loc='lower right')
        ax.grid(True, linestyle=':')
        return _save(fig, frame, out_dir, kind)


def nd_vs_mir(report, out_dir, threshold=DEFAULT_ND_THRESHOLD):
    kind = 'nd-vs-mir'
    _require(report, 'dipolarity', kind)
    _require(report, 'mir', kind)
    nd = algorithm_means(report, 'nd_percent', threshold=threshold)
    targets = {'mir': algorithm_means(report, 'mir')}
    if any(c['success'] and 'remnant_pmi' in c for c in report.cells):
        targets['pmi'] = algorithm_means(report, 'remnant_pmi')

    labels = [label for label in nd if all(label in means for means in targets.values())]
    frame = pd.DataFrame({
        'algorithm': labels,
        'nd_mean': [nd[label]['mean'] for label in labels],
        'nd_std': [nd[label]['std'] for label in labels],
    })
    frame['ellipse_x_radius'] = ELLIPSE_STD * frame['nd_std']
    for name, means in targets.items():
        frame[f'{name}_mean'] = [means[label]['mean'] for label in labels]
        frame[f'{name}_std'] = [means[label]['std'] for label in labels]
        frame[f'ellipse_y_radius_{name}'] = ELLIPSE_STD * frame[f'{name}_std']

    regression_rows = []
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, len(targets), figsize=(6 * len(targets), 5), squeeze=False)
        for ax, name in zip(axes[0], targets):
            for _, row in frame.iterrows():
                ax.add_patch(Ellipse((row['nd_mean'], row[f'{name}_mean']),
                                     width=2 * row['ellipse_x_radius'],
                                     height=2 * row[f'ellipse_y_radius_{name}'], alpha=0.3))
                ax.annotate(row['algorithm'], (row['nd_mean'], row[f'{name}_mean']), fontsize=8)
            ax.scatter(frame['nd_mean'], frame[f'{name}_mean'], s=12, color='k')
            try:
                fit = regress(frame['nd_mean'], frame[f'{name}_mean'])
                xs = np.array([frame['nd_mean'].min(), frame['nd_mean'].max()])
                ax.plot(xs, fit.slope * xs + fit.intercept, 'r-', linewidth=1)
                regression_rows.append({'target': name, 'degenerate': False, **fit.to_dict()})
            except DegenerateRegressorError as e:
                logger.info('No regression line for %s: %s', name, e.detail)
                regression_rows.append({'target': name, 'degenerate': True})
            ax.set_xlabel(f'Near-dipolar components at rv < {threshold:g} (%)')
            ax.set_ylabel('MIR (bits/sample)' if name == 'mir' else 'Remnant PMI (%)')
            ax.grid(True, linestyle=':')
        return _save(fig, frame, out_dir, kind, extra={'regression': pd.DataFrame(regression_rows)})


def mir_by_dataset(report, out_dir):
    kind = 'mir-by-dataset'
    _require(report, 'mir', kind)
    labels = list(report.algorithms)
    rows = []
    for dataset in report.datasets:
        row = {'dataset': dataset}
        for label in labels:
            cell = report.cell(label, dataset)
            row[label] = cell['mir']['mir_bits_per_sample'] if cell['success'] and 'mir' in cell else np.nan
        row['order'] = ' > '.join(report.ordering.get('by_dataset', {}).get(dataset, []))
        row['order_preserved'] = bool(report.ordering.get('order_preserved', False))
        rows.append(row)
    frame = pd.DataFrame(rows)

    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(max(6, 1.5 * len(rows)), 5))
        width = 0.8 / max(len(labels), 1)
        x = np.arange(len(rows))
        for k, label in enumerate(labels):
            ax.bar(x + k * width, frame[label], width=width, label=label, edgecolor='k')
        ax.set_xticks(x + width * (len(labels) - 1) / 2)
        ax.set_xticklabels(frame['dataset'], rotation=45, ha='right')
        ax.set_ylabel('MIR (bits/sample)')
        ax.set_title('MIR per dataset')
        ax.legend()
        return _save(fig, frame, out_dir, kind)


def mir_difference(report, out_dir):
    kind = 'mir-difference'
    _require(report, 'mir', kind)
    means = algorithm_means(report, 'mir')
    order = sorted(means, key=lambda label: -means[label]['mean'])
    best = means[order[0]]['mean']
    frame = pd.DataFrame({
        'algorithm': order,
        'mir_mean': [means[label]['mean'] for label in order],
        'mir_std': [means[label]['std'] for label in order],
        'difference_from_best': [best - means[label]['mean'] for label in order],
    })

    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(order)), 5))
        ax.bar(frame['algorithm'], frame['difference_from_best'], yerr=frame['mir_std'],
               color='gray', edgecolor='k', capsize=3)
        ax.set_ylabel(f'MIR below {order[0]} (bits/sample)')
        ax.set_title('MIR difference from the best algorithm')
        ax.tick_params(axis='x', rotation=45)
        return _save(fig, frame, out_dir, kind)


def runtime(report, out_dir, timing=None):
    kind = 'runtime'
    per_algorithm = {}
    if timing is not None:
        for row in timing.get('rows', ()):
            if row.get('success'):
                per_algorithm.setdefault(row['algorithm'], []).append(row['decomposition_mean_sec'])
    elif report is not None:
        for row in report.timings.get('cells', ()):
            if 'decomposition_sec' in row:
                per_algorithm.setdefault(row['algorithm'], []).append(row['decomposition_sec'])
    if not per_algorithm:
        raise MissingMetricError(f'Plot {kind!r}: no timing data', kind=kind, metric='timings')

    labels = list(per_algorithm)
    stats = [describe(per_algorithm[label]) for label in labels]
    frame = pd.DataFrame({
        'algorithm': labels,
        'decomposition_mean_sec': [s['mean'] for s in stats],
        'decomposition_std_sec': [s['std'] for s in stats],
        'n_datasets': [s['n'] for s in stats],
    })

    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(labels)), 5))
        ax.bar(frame['algorithm'], frame['decomposition_mean_sec'], yerr=frame['decomposition_std_sec'],
               color='steelblue', edgecolor='k', capsize=3)
        ax.set_ylabel('Wall-clock time (s)')
        ax.set_title('Decomposition time')
        ax.tick_params(axis='x', rotation=45)
        return _save(fig, frame, out_dir, kind)


def mir_vs_tolerance(sweep, out_dir):
    kind = 'mir-vs-tolerance'
    if not sweep or not sweep.get('means'):
        raise MissingMetricError(f'Plot {kind!r}: needs a tolerance sweep table', kind=kind,
                                 metric='tolerance_sweep')
    frame = pd.DataFrame({
        'tolerance': [m['tolerance'] for m in sweep['means']],
        'mir_mean': [m['mean'] for m in sweep['means']],
        'mir_std': [m['std'] for m in sweep['means']],
        'n_datasets': [m['n'] for m in sweep['means']],
    })
    references = {label: ref['mean'] for label, ref in sweep.get('references', {}).items()
                  if ref.get('mean') is not None}
    for label, value in references.items():
        frame[f'reference_{label}'] = value

    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.semilogx(frame['tolerance'], frame['mir_mean'], 'o-', label=sweep['algorithm_id'])
        for label, value in references.items():
            ax.axhline(value, linestyle='--', linewidth=1, label=label)
        ax.invert_xaxis()
        ax.set_xlabel(f"Stopping tolerance ({sweep['tolerance_field']})")
        ax.set_ylabel('MIR (bits/sample)')
        ax.set_title('MIR across stopping tolerances')
        ax.legend()
        ax.grid(True, linestyle=':')
        return _save(fig, frame, out_dir, kind)


def emit_plots(report, kind: str, out_dir, sweep: dict = None, timing: dict = None,
               nd_threshold: float = DEFAULT_ND_THRESHOLD):
    """
    Write one figure kind as SVG + CSV.

    Args:
        report: BenchReport (may be None for 'mir-vs-tolerance' and 'runtime' with timing)
        kind: One of PLOT_KINDS
        out_dir: Output directory
        sweep: tolerance_sweep table for 'mir-vs-tolerance'
        timing: time_algorithms table for 'runtime' (report timings otherwise)
        nd_threshold: rv threshold of the ND% axis of 'nd-vs-mir'

    Returns:
        List of written paths

    Raises:
        MissingMetricError: Names the kind and the missing metric
    """
    out_dir = Path(out_dir)
    if kind not in PLOT_KINDS:
        raise InvalidParamsError(f'Unknown plot kind {kind!r}; expected one of {PLOT_KINDS}')
    if kind == 'mir-vs-tolerance':
        paths = mir_vs_tolerance(sweep, out_dir)
    elif kind == 'runtime':
        paths = runtime(report, out_dir, timing)
    elif report is None:
        raise MissingMetricError(f'Plot {kind!r} needs a benchmark report', kind=kind)
    elif kind == 'dipolarity-curves':
        paths = dipolarity_curves(report, out_dir)
    elif kind == 'nd-vs-mir':
        paths = nd_vs_mir(report, out_dir, nd_threshold)
    elif kind == 'mir-by-dataset':
        paths = mir_by_dataset(report, out_dir)
    else:
        paths = mir_difference(report, out_dir)
    logger.info('Wrote %s plot to %s', kind, out_dir)
    return paths
