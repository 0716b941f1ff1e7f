"""
Core utilities package for the ICA benchmark workbench.
Provides exceptions, settings access, file helpers and the abstract base model.
"""
