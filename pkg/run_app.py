#!/usr/bin/env python3
"""
Covariant Gas Explorer - local launcher

Usage:
    python run_app.py [--port 8501] [--headless]

Equivalent to ``streamlit run explorer_app.py`` with the chosen port.
"""

import argparse
import importlib.util
import subprocess
import sys
from pathlib import Path

APP = Path(__file__).resolve().with_name("explorer_app.py")
REQUIRED = ("streamlit", "numpy", "scipy", "pandas", "dotenv")


def missing_packages():
    return [name for name in REQUIRED if importlib.util.find_spec(name) is None]


def build_command(port: int, headless: bool):
    command = [
        sys.executable, "-m", "streamlit", "run", str(APP),
        "--server.port", str(port),
        "--server.address", "localhost",
    ]
    if headless:
        command += ["--server.headless", "true"]
    return command


def main(argv=None):
    parser = argparse.ArgumentParser(description="Launch the covstat explorer")
    parser.add_argument("--port", type=int, default=8501)
    parser.add_argument("--headless", action="store_true", help="do not open a browser tab")
    args = parser.parse_args(argv)

    missing = missing_packages()
    if missing:
        print(f"❌ Missing packages: {', '.join(missing)}")
        print("   pip install -r requirements.txt")
        return 1

    print("🌌 Starting Covariant Gas Explorer...")
    print(f"The app will be available at: http://localhost:{args.port}/")
    print("Press Ctrl+C to stop")
    try:
        subprocess.run(build_command(args.port, args.headless), check=True)
    except KeyboardInterrupt:
        print("\nExplorer stopped")
    except subprocess.CalledProcessError as exc:
        print(f"❌ Streamlit exited with status {exc.returncode}")
        return exc.returncode
    return 0


if __name__ == "__main__":
    sys.exit(main())
