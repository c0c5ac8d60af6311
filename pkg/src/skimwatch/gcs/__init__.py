"""Ground-control service: ingest, event log, operator API, alert fanout."""

from .core import GcsCore, Subscription
from .eventlog import EventLog, EventRecord
from .server import GcsService

__all__ = ["EventLog", "EventRecord", "GcsCore", "GcsService", "Subscription"]
