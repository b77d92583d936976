"""The narrative demo runs end to end."""

import runpy
from pathlib import Path

DEMO = Path(__file__).resolve().parents[1] / "demos" / "reiteration_tour.py"


def test_reiteration_tour_runs(capsys):
    runpy.run_path(str(DEMO), run_name="__main__")
    out = capsys.readouterr().out
    assert "eta = 0.5" in out and "p = 2.666667" in out
