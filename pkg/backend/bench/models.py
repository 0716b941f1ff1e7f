"""
History of benchmark invocations.

Models:
- BenchRun: One run / sweep-tolerance / time invocation with its outcome and summary
"""

from django.db import models

from core.base_models import AbstractTimestampModel


class BenchRun(AbstractTimestampModel):
    """
    Record of one benchmark invocation.

    The report itself lives on disk; the row keeps enough to list and
    compare runs without opening it.

    Attributes:
        kind: Which bench subcommand produced the run
        config_digest: Digest of the normalized configuration
        seed: Run-level seed
        status: success, partial (some cells failed) or failed
        n_cells: Number of grid cells or sweep rows
        n_failed: Number of failed cells or rows
        report_path: Absolute path of the written JSON artifact
        summary: Per-algorithm summary (or sweep/timing means)
    """

    KIND_RUN = 'run'
    KIND_SWEEP = 'sweep-tolerance'
    KIND_TIME = 'time'
    KIND_CHOICES = [
        (KIND_RUN, 'Benchmark grid'),
        (KIND_SWEEP, 'Tolerance sweep'),
        (KIND_TIME, 'Timing'),
    ]

    STATUS_SUCCESS = 'success'
    STATUS_PARTIAL = 'partial'
    STATUS_FAILED = 'failed'
    STATUS_CHOICES = [
        (STATUS_SUCCESS, 'Success'),
        (STATUS_PARTIAL, 'Partial'),
        (STATUS_FAILED, 'Failed'),
    ]

    kind = models.CharField(
        max_length=32,
        choices=KIND_CHOICES,
        default=KIND_RUN,
        help_text="Bench subcommand"
    )
    config_digest = models.CharField(
        max_length=64,
        help_text="Digest of the normalized configuration"
    )
    seed = models.BigIntegerField(
        default=0,
        help_text="Run-level seed"
    )
    status = models.CharField(
        max_length=16,
        choices=STATUS_CHOICES,
        help_text="Outcome of the run"
    )
    n_cells = models.IntegerField(
        default=0,
        help_text="Number of cells or rows"
    )
    n_failed = models.IntegerField(
        default=0,
        help_text="Number of failed cells or rows"
    )
    report_path = models.CharField(
        max_length=1024,
        blank=True,
        help_text="Path of the written artifact"
    )
    summary = models.JSONField(
        default=dict,
        blank=True,
        help_text="Summary of the run"
    )

    class Meta(AbstractTimestampModel.Meta):
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['-created_at'], name='bench_bench_created_3c1a0e_idx'),
            models.Index(fields=['config_digest'], name='bench_bench_config__8b0f52_idx'),
            models.Index(fields=['kind', 'status'], name='bench_bench_kind_5d9e27_idx'),
        ]

    def __str__(self):
        return f"{self.kind} {self.config_digest[:12]} ({self.status}, {self.n_failed}/{self.n_cells} failed)"
