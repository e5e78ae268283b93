"""
Setup script for the LIVE search environment.
"""

import shlex
import subprocess
import sys
from pathlib import Path


def run_command(command: str, description: str) -> bool:
    """Run a command without a shell and return success status."""
    print(f"\n🔄 {description}...")
    try:
        result = subprocess.run(shlex.split(command), check=True, capture_output=True, text=True)
        print(f"✅ {description} completed successfully")
        if result.stdout:
            print(f"Output: {result.stdout}")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ {description} failed: {e}")
        if e.stderr:
            print(f"Error: {e.stderr}")
        return False


def check_python_version() -> bool:
    """Check if Python version is 3.10 or higher."""
    version = sys.version_info
    if version < (3, 10):
        print(f"❌ Python 3.10+ required. Current version: {version.major}.{version.minor}")
        return False
    print(f"✅ Python version {version.major}.{version.minor} is compatible")
    return True


def setup_environment() -> bool:
    """Create the virtual environment, install dependencies and write a default .env."""
    print("🚀 Setting up LIVE search environment")
    print("=" * 50)

    if not check_python_version():
        return False

    if not Path(".venv").exists():
        if not run_command(f"{sys.executable} -m venv .venv", "Creating virtual environment"):
            return False
    else:
        print("✅ Virtual environment already exists")

    pip_cmd = ".venv\\Scripts\\pip" if sys.platform == "win32" else ".venv/bin/pip"
    if not run_command(f"{pip_cmd} install --upgrade pip", "Upgrading pip"):
        return False
    if not run_command(f"{pip_cmd} install -r requirements.txt", "Installing dependencies"):
        return False

    env = Path(".env")
    if not env.exists():
        env.write_text("LIVE_LOG=info\nLIVE_TRACING=false\nLIVE_BATCH_WORKERS=1\n", encoding="utf-8")
        print("📝 Wrote default .env")
    else:
        print("✅ .env file already exists")

    print("\n🎉 Environment setup completed!")
    print("\nNext steps:")
    print("1. Activate virtual environment:")
    print("   .venv\\Scripts\\activate" if sys.platform == "win32" else "   source .venv/bin/activate")
    print("2. Check the installation: python verify_setup.py")
    print("3. Run a trial: python run_live_search.py run --scenario data/scenarios/apartment_live.json --out out/run")
    return True


if __name__ == "__main__":
    success = setup_environment()
    sys.exit(0 if success else 1)
