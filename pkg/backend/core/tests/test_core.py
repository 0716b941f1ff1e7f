"""
Tests for shared helpers: exceptions, settings access, JSON files and CLI flags

@TEST:CORE
"""

import numpy as np
import pytest


@pytest.mark.unit
class TestIcaBenchError:
    """Error records carry a stable code, the message and optional context."""

    def test_default_detail_and_code(self):
        """
        @TEST:CORE-001
        Subclasses fall back to their class defaults
        """
        from core.exceptions import ErrorCodes, SingularMatrixError

        error = SingularMatrixError()
        assert error.code == ErrorCodes.SINGULAR_MATRIX
        assert error.detail == SingularMatrixError.default_detail

    def test_as_record_includes_context(self):
        """
        @TEST:CORE-002
        as_record() has the failed-cell shape
        """
        from core.exceptions import RankDeficientError

        record = RankDeficientError('eigenvalue 3 is zero', eigen_index=3).as_record()
        assert record == {
            'success': False,
            'error_code': 'DEC-001',
            'message': 'eigenvalue 3 is zero',
            'context': {'eigen_index': 3},
        }

    def test_as_record_without_context(self):
        """
        @TEST:CORE-003
        No context key when nothing was attached
        """
        from core.exceptions import MissingMetricError

        assert 'context' not in MissingMetricError('no dipolarity').as_record()


@pytest.mark.unit
class TestSettings:
    """icabench_settings falls back to defaults."""

    def test_defaults(self):
        """
        @TEST:CORE-004
        Documented defaults are visible through the accessor
        """
        from core.conf import icabench_settings

        assert icabench_settings.DEFAULT_BINS == 128
        assert icabench_settings.DEFAULT_BINNING == 'equal-width'
        assert list(icabench_settings.ND_THRESHOLDS)[:2] == [0.01, 0.02]
        assert len(icabench_settings.ND_THRESHOLDS) == 40

    def test_unknown_setting(self):
        """
        @TEST:CORE-005
        Unknown keys raise AttributeError
        """
        from core.conf import icabench_settings

        with pytest.raises(AttributeError):
            icabench_settings.NOT_A_SETTING


@pytest.mark.unit
class TestJsonFiles:
    """Atomic JSON writes with numpy conversion."""

    def test_write_and_read(self, tmp_path):
        """
        @TEST:CORE-006
        numpy values come back as plain JSON types
        """
        from core.io_utils import read_json, write_json

        path = write_json(tmp_path / 'nested' / 'out.json',
                          {'a': np.float64(1.5), 'b': np.arange(3), 'c': (np.int64(2), np.bool_(True))})
        assert read_json(path) == {'a': 1.5, 'b': [0, 1, 2], 'c': [2, True]}
        assert not list((tmp_path / 'nested').glob('*.tmp'))

    def test_digest_ignores_key_order(self):
        """
        @TEST:CORE-007
        Equal payloads give equal digests
        """
        from core.io_utils import digest

        assert digest({'x': 1, 'y': [1, 2]}) == digest({'y': [1, 2], 'x': 1})
        assert digest({'x': 1}) != digest({'x': 2})

    def test_read_missing_file(self, tmp_path):
        """
        @TEST:CORE-008
        Missing files raise DatasetIOError naming the path
        """
        from core.exceptions import DatasetIOError
        from core.io_utils import read_json

        with pytest.raises(DatasetIOError) as exc:
            read_json(tmp_path / 'missing.json')
        assert 'missing.json' in exc.value.detail


@pytest.mark.unit
class TestExactFloatParsing:
    """Text cells read back to the exact doubles that were written."""

    def test_seventeen_digit_text_is_exact(self, rng):
        """
        @TEST:CORE-013
        '%.17g' text of random doubles parses back bit for bit
        """
        import pandas as pd

        from core.io_utils import exact_float_values

        values = rng.standard_normal((1000, 10)) * 10.0 ** rng.integers(-8, 8, size=(1000, 10))
        frame = pd.DataFrame(values).map(lambda v: '%.17g' % v)
        assert np.array_equal(exact_float_values(frame), values)

    def test_bad_cells_become_nan(self):
        """
        @TEST:CORE-014
        """
        import pandas as pd

        from core.io_utils import exact_float_values

        out = exact_float_values(pd.DataFrame([['1.5', 'abc'], ['', '2']]))
        assert out[0, 0] == 1.5 and out[1, 1] == 2.0
        assert np.isnan(out[0, 1]) and np.isnan(out[1, 0])


@pytest.mark.unit
class TestCliHelpers:
    """Thread resolution and error translation."""

    def test_environment_overrides_flag(self, monkeypatch):
        """
        @TEST:CORE-009
        ICABENCH_THREADS wins over --threads
        """
        from core.cli import resolve_threads

        monkeypatch.setenv('ICABENCH_THREADS', '3')
        assert resolve_threads(8) == 3

    def test_flag_without_environment(self, monkeypatch):
        """
        @TEST:CORE-010
        --threads is used when the variable is unset
        """
        from core.cli import resolve_threads

        monkeypatch.delenv('ICABENCH_THREADS', raising=False)
        assert resolve_threads(4) == 4

    def test_invalid_thread_count(self, monkeypatch):
        """
        @TEST:CORE-011
        Zero threads is rejected
        """
        from django.core.management.base import CommandError

        from core.cli import resolve_threads

        monkeypatch.delenv('ICABENCH_THREADS', raising=False)
        with pytest.raises(CommandError):
            resolve_threads(0)

    def test_translate_errors(self):
        """
        @TEST:CORE-012
        IcaBenchError becomes CommandError with the code in the message
        """
        from django.core.management.base import CommandError

        from core.cli import translate_errors
        from core.exceptions import ConfigValidationError

        @translate_errors
        def handler():
            raise ConfigValidationError('bins must be >= 2')

        with pytest.raises(CommandError, match=r'\[BENCH-001\] bins must be >= 2'):
            handler()
