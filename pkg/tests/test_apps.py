from pathlib import Path

import pytest

import run_app

ROOT = Path(__file__).resolve().parents[1]


def test_launcher_command():
    command = run_app.build_command(8600, headless=True)
    assert command[1:4] == ["-m", "streamlit", "run"]
    assert command[4].endswith("explorer_app.py")
    assert command[command.index("--server.port") + 1] == "8600"
    assert command[-2:] == ["--server.headless", "true"]
    assert "--server.headless" not in run_app.build_command(8501, headless=False)


def test_launcher_reports_missing_packages(monkeypatch, capsys):
    monkeypatch.setattr(run_app, "missing_packages", lambda: ["streamlit"])
    assert run_app.main(["--port", "8502"]) == 1
    assert "streamlit" in capsys.readouterr().out


def test_explorer_renders_without_errors():
    testing = pytest.importorskip("streamlit.testing.v1")
    app = testing.AppTest.from_file(str(ROOT / "explorer_app.py"))
    app.run(timeout=300)
    assert not app.exception
    assert len(app.dataframe) >= 2
    assert not app.error
