"""
Tests for summary tables

@TEST:BENCH-EXPORT
"""

import pytest


@pytest.mark.unit
class TestExport:
    """CSV and Excel summaries."""

    def test_summary_frame(self, toy_report):
        """
        @TEST:BENCH-EXPORT-001
        """
        from bench.services.export import summary_frame

        frame = summary_frame(toy_report)
        assert frame['algorithm'].tolist() == ['picard', 'fastica', 'pca']
        assert frame['mir_bits_per_sample_mean'].tolist() == pytest.approx([2.1, 1.85, 1.05])
        assert frame['nd_percent_0.05_mean'].tolist() == [50.0, 25.0, 0.0]
        assert 'nd_percent_0.1_mean' in frame.columns

    def test_cells_frame_keeps_failures(self, toy_report):
        """
        @TEST:BENCH-EXPORT-002
        """
        import dataclasses

        from bench.services.export import cells_frame

        failed = {'success': False, 'algorithm': 'amuse', 'dataset': 'd1',
                  'error_code': 'DEC-001', 'message': 'rank deficient'}
        report = dataclasses.replace(toy_report, cells=toy_report.cells + (failed,))
        frame = cells_frame(report)
        assert len(frame) == 7
        assert frame['error_code'].iloc[-1] == 'DEC-001'
        assert frame['failed_fits'].iloc[0] == 0

    def test_workbook(self, toy_report, tmp_path):
        """
        @TEST:BENCH-EXPORT-003
        Styled header row, one sheet per table
        """
        import openpyxl

        from bench.services.export import export_summary

        paths = export_summary(toy_report, tmp_path)
        workbook = openpyxl.load_workbook(paths['summary_xlsx'])
        assert workbook.sheetnames == ['Summary', 'Cells']
        sheet = workbook['Summary']
        assert sheet.cell(row=1, column=1).value == 'algorithm'
        assert sheet.cell(row=1, column=1).font.bold
        assert sheet.cell(row=2, column=1).value == 'picard'
        assert sheet.max_row == 4
