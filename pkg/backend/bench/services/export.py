"""
Tabular exports of a BenchReport: summary.csv, cells.csv and summary.xlsx.

The workbook has a Summary sheet (one row per algorithm) and a Cells sheet
(one row per algorithm x dataset), with a styled header row.
"""

import io
import logging
from pathlib import Path

import openpyxl
import pandas as pd
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

from core.exceptions import DatasetIOError
from core.io_utils import atomic_write_bytes, atomic_write_text

logger = logging.getLogger(__name__)

SUMMARY_METRICS = ('mir_bits_per_sample', 'mir_kbits_per_sec', 'remnant_pmi_percent', 'amari_index')
ND_COLUMNS = (0.05, 0.10)
MAX_COLUMN_WIDTH = 50


def summary_frame(report) -> pd.DataFrame:
    """One row per algorithm with mean/std columns of every summarized metric."""
    rows = []
    for label in report.algorithms:
        entry = report.summary.get(label, {})
        row = {'algorithm': label, 'n_datasets': entry.get('n_datasets', 0), 'n_failed': entry.get('n_failed', 0)}
        for metric in SUMMARY_METRICS:
            if metric in entry:
                row[f'{metric}_mean'] = entry[metric]['mean']
                row[f'{metric}_std'] = entry[metric]['std']
        for point in entry.get('nd_percent', ()):
            if point['threshold'] in ND_COLUMNS:
                row[f"nd_percent_{point['threshold']:g}_mean"] = point['mean']
                row[f"nd_percent_{point['threshold']:g}_std"] = point['std']
        rows.append(row)
    return pd.DataFrame(rows)


def cells_frame(report) -> pd.DataFrame:
    """Flat view of every cell: metrics for successes, error code for failures."""
    rows = []
    for cell in report.cells:
        row = {'algorithm': cell['algorithm'], 'dataset': cell['dataset'], 'success': cell['success']}
        if cell['success']:
            decomposition = cell.get('decomposition', {})
            row['converged'] = decomposition.get('converged')
            row['iterations_used'] = decomposition.get('iterations_used')
            if 'mir' in cell:
                row['mir_bits_per_sample'] = cell['mir']['mir_bits_per_sample']
                row['mir_kbits_per_sec'] = cell['mir']['mir_kbits_per_sec']
            if 'remnant_pmi' in cell:
                row['remnant_pmi_percent'] = cell['remnant_pmi']['percent']
            if 'amari_index' in cell:
                row['amari_index'] = cell['amari_index']
            if 'dipolarity' in cell:
                row['failed_fits'] = len(cell['dipolarity']['failed_components'])
        else:
            row['error_code'] = cell.get('error_code')
            row['message'] = cell.get('message')
        rows.append(row)
    return pd.DataFrame(rows)


def _write_sheet(workbook, title, frame):
    sheet = workbook.create_sheet(title=title)
    header_font = Font(bold=True, color='FFFFFF', size=12)
    header_fill = PatternFill(start_color='4472C4', end_color='4472C4', fill_type='solid')
    header_alignment = Alignment(horizontal='center', vertical='center')
    even_fill = PatternFill(start_color='F2F2F2', end_color='F2F2F2', fill_type='solid')

    columns = list(frame.columns)
    for col_idx, name in enumerate(columns, start=1):
        cell = sheet.cell(row=1, column=col_idx, value=name)
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = header_alignment

    for row_idx, values in enumerate(frame.itertuples(index=False), start=2):
        for col_idx, value in enumerate(values, start=1):
            cell = sheet.cell(row=row_idx, column=col_idx)
            cell.value = None if pd.isna(value) else value
            if row_idx % 2 == 0:
                cell.fill = even_fill

    for col_idx, name in enumerate(columns, start=1):
        width = max([len(str(name))] + [len(str(v)) for v in frame[name].tolist()])
        sheet.column_dimensions[get_column_letter(col_idx)].width = min(width + 2, MAX_COLUMN_WIDTH)


def summary_workbook(report) -> bytes:
    workbook = openpyxl.Workbook()
    workbook.remove(workbook.active)
    _write_sheet(workbook, 'Summary', summary_frame(report))
    _write_sheet(workbook, 'Cells', cells_frame(report))
    buffer = io.BytesIO()
    workbook.save(buffer)
    return buffer.getvalue()


def export_summary(report, out_dir) -> dict:
    """
    Write summary.csv, cells.csv and summary.xlsx into out_dir.

    Returns:
        Mapping of artifact name to path
    """
    out_dir = Path(out_dir)
    paths = {
        'summary_csv': out_dir / 'summary.csv',
        'cells_csv': out_dir / 'cells.csv',
        'summary_xlsx': out_dir / 'summary.xlsx',
    }
    atomic_write_text(paths['summary_csv'], summary_frame(report).to_csv(index=False))
    atomic_write_text(paths['cells_csv'], cells_frame(report).to_csv(index=False))
    try:
        atomic_write_bytes(paths['summary_xlsx'], summary_workbook(report))
    except (ValueError, TypeError) as e:
        raise DatasetIOError(f'Failed to build {paths["summary_xlsx"]}: {e}') from e
    logger.debug('Exported summary tables to %s', out_dir)
    return {name: str(path) for name, path in paths.items()}
