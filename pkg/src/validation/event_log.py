"""
Event Log
Structured diagnostic events (non-convergence, joint clamping, hull
preprocessing, mesh warnings) kept in memory and optionally appended to a
JSON-lines file.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import logging
import threading

NON_CONVERGENCE = "non_convergence"
JOINT_CLAMPED = "joint_clamped"
HULL_PREPROCESSED = "hull_preprocessed"
MESH_WARNING = "mesh_warning"


class EventLog:
    """
    Collects diagnostic events for one run.

    Example usage:
        events = EventLog("logs/events.jsonl")
        events.record(NON_CONVERGENCE, "pair did not converge", pair="a|b")
        print(events.get_stats())
    """

    def __init__(self, path: Optional[Union[str, Path]] = None, enabled: bool = True):
        """
        Args:
            path: JSON-lines file to append events to (None keeps them in memory only)
            enabled: When False, record() is a no-op
        """
        self.path = Path(path) if path else None
        self.enabled = enabled
        self.logger = logging.getLogger("events")
        self.events: List[Dict[str, Any]] = []
        # Pair queries may record from worker threads.
        self._lock = threading.Lock()

    def record(
        self, event_type: str, message: str, severity: str = "warning", **details: Any
    ) -> Optional[Dict[str, Any]]:
        """
        Record one event.

        Args:
            event_type: One of the module-level event type names
            message: Human-readable summary
            severity: "info" or "warning"
            **details: JSON-serializable context

        Returns:
            The stored event, or None when the log is disabled
        """
        if not self.enabled:
            return None

        event = {
            "timestamp": datetime.now().isoformat(),
            "type": event_type,
            "severity": severity,
            "message": message,
            **details,
        }
        with self._lock:
            self.events.append(event)

        if severity == "warning":
            self.logger.warning(f"{event_type}: {message}")
        else:
            self.logger.info(f"{event_type}: {message}")

        if self.path is not None:
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self._lock, open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(event, default=str) + "\n")
            except OSError as e:
                self.logger.error(f"Failed to write event log: {e}")
        return event

    def get_events(self, event_type: Optional[str] = None) -> List[Dict[str, Any]]:
        if event_type is None:
            return list(self.events)
        return [e for e in self.events if e["type"] == event_type]

    def get_stats(self) -> Dict[str, Any]:
        """
        Summarize recorded events.

        Returns:
            Dictionary with totals per type and the warning count
        """
        by_type: Dict[str, int] = {}
        for event in self.events:
            by_type[event["type"]] = by_type.get(event["type"], 0) + 1
        return {
            "total_events": len(self.events),
            "by_type": by_type,
            "warnings": sum(1 for e in self.events if e["severity"] == "warning"),
        }
