from pathlib import Path

import pytest

import coach

SCRIPTS = Path(__file__).resolve().parents[2] / "scripts"


def test_alpha_examples():
    assert coach.krippendorff_alpha([[1, 0, 1, 1], [1, 0, 1, 1]]) == 1.0
    assert coach.krippendorff_alpha([[1, 0, 1, 0], [1, 0, 0, 1]]) == pytest.approx(0.125, abs=1e-9)


def test_alpha_needs_two_units():
    with pytest.raises(coach.CoachError) as err:
        coach.krippendorff_alpha([[1], [0]])
    assert err.value.code == "insufficient-data"


def test_three_of_six():
    rows = [[1, 1], [1, 1], [1, 0], [0, 0], [0, 0], [0, 0]]
    assert coach.aggregate_labels(rows) == [1, 0]


def test_summary_and_report():
    events = [
        ("smile", "reminder-start", 10000),
        ("smile", "resolved", 14000),
        ("eye_contact", "reminder-start", 100000),
        ("eye_contact", "resolved", 107000),
    ]
    s = coach.compute_summary(300000, events)
    assert s["best_streak_ms"] == 193000
    assert s["mean_lag_ms"] == 5500
    report = coach.format_report(300000, events)
    for name in ("Reminders", "Best Streak", "Response Lag"):
        assert name in report


def test_session_turns():
    s = coach.Session(config={"topics": ["free-time"]})
    opening = s.opening()
    assert opening[0]["type"] == "agent_turn"
    replies = s.user_turn("I like to play video games", 6000)
    assert [r["type"] for r in replies] == ["agent_turn"]
    assert replies[0]["provenance"] == "reaction"
    err = s.user_turn("hello", 350000)
    assert err[0]["type"] == "error"
    assert err[0]["code"] == "session-not-active"
    done = s.end()
    assert done[-1]["type"] == "summary"
    assert s.ended


def test_simulate_and_replay():
    r = coach.simulate(SCRIPTS / "typical.json", seed=3, frame_rate_hz=10.0)
    assert r["errors"] == 0
    assert r["repeated_asks"] == 0
    assert r["turns_without_reply"] == 0
    assert len(r["topics"]) == 6
    assert coach.replay(r["record"])
