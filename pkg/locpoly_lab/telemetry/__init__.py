"""Replication records and their CSV log."""

from .logger import ReplicationLogger
from .records import ReplicationRecord

__all__ = ["ReplicationLogger", "ReplicationRecord"]
