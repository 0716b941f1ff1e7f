"""
Base model classes for the workbench.
Provides common fields for persisted run records.
"""
from django.db import models


class AbstractTimestampModel(models.Model):
    """
    Abstract base model that provides timestamp fields.

    Attributes:
        created_at: Timestamp when the record was created
        updated_at: Timestamp when the record was last updated
    """
    created_at = models.DateTimeField(auto_now_add=True, help_text="Creation time")
    updated_at = models.DateTimeField(auto_now=True, help_text="Last update time")

    class Meta:
        abstract = True
        ordering = ['-created_at']
