"""Exact distribution-free confidence regions for linear regression."""

from rps.core.config import settings

__version__ = settings.VERSION
