"""
Validation Module
Mesh admission gates and the diagnostic event log.
"""

from .event_log import EventLog
from .gates import ConvexityGate

__all__ = [
    "EventLog",
    "ConvexityGate",
]
