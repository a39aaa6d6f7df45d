"""Python bindings for the conversation practice engine."""

import json
import os
from pathlib import Path

from . import _core
from ._core import CoachError

__all__ = [
    "CoachError",
    "Session",
    "aggregate_labels",
    "compute_summary",
    "default_model",
    "default_rules_dir",
    "format_report",
    "krippendorff_alpha",
    "replay",
    "simulate",
]


def _data_root():
    here = Path(__file__).resolve().parent
    for root in (here / "data", here.parent.parent):
        if (root / "rules").is_dir():
            return root
    raise FileNotFoundError("rule set not found; set COACH_RULES_DIR")


def default_rules_dir():
    return os.environ.get("COACH_RULES_DIR") or str(_data_root() / "rules")


def default_model():
    return os.environ.get("COACH_MODEL") or str(_data_root() / "models" / "demo.hmm")


krippendorff_alpha = _core.krippendorff_alpha
aggregate_labels = _core.aggregate_labels


def compute_summary(span_ms, events):
    """events: (cue, kind, t_ms) tuples, e.g. ("smile", "reminder_start", 1000)."""
    return json.loads(_core.compute_summary(span_ms, list(events)))


def format_report(span_ms, events, title="Session"):
    return _core.format_report(span_ms, list(events), title)


def simulate(script, seed=0, rules_dir=None, model=None, frame_rate_hz=30.0):
    r = _core.simulate(str(script), seed, rules_dir or default_rules_dir(), model or default_model(), frame_rate_hz)
    r["summary"] = json.loads(r["summary"])
    return r


def replay(lines, rules_dir=None, model=None):
    return _core.replay(list(lines), rules_dir or default_rules_dir(), model or default_model())


class Session:
    """A session driven from Python with wire-protocol dicts."""

    def __init__(self, config=None, rules_dir=None, model=None, session_id="py-session"):
        self._s = _core.Session(
            rules_dir or default_rules_dir(),
            model or default_model(),
            json.dumps(config) if config else "",
            session_id,
        )

    def opening(self):
        return [json.loads(m) for m in self._s.take_pending()]

    def send(self, message):
        return [json.loads(m) for m in self._s.handle(json.dumps(message))]

    def user_turn(self, text, t_ms):
        return self.send({"type": "user_turn", "text": text, "t_ms": t_ms})

    def frame(self, frame):
        return self.send({"type": "frame", **frame})

    def end(self, t_ms=None):
        msg = {"type": "end"}
        if t_ms is not None:
            msg["t_ms"] = t_ms
        return self.send(msg)

    @property
    def ended(self):
        return self._s.ended

    def record(self):
        return list(self._s.record())
