"""
Verify the LIVE search setup: dependencies, configuration and reference data.
"""

import importlib
import sys
from pathlib import Path

from config import get_settings

REQUIRED_MODULES = ["numpy", "pydantic", "pydantic_settings", "opentelemetry.sdk.trace", "psutil", "matplotlib"]


def check_dependencies() -> bool:
    """Check that every runtime dependency imports."""
    missing = []
    for name in REQUIRED_MODULES:
        try:
            importlib.import_module(name)
        except ImportError:
            missing.append(name)
    if missing:
        print(f"❌ Missing packages: {', '.join(missing)}")
        print("   Run: python setup.py")
        return False
    print("✅ All dependencies importable")
    return True


def check_reference_data() -> bool:
    """Check that the reference map loads and matches the built-in apartment."""
    from src.geometry import load_vector_map
    from src.simulator import build_reference_apartment

    path = Path(get_settings().data_dir) / "maps" / "apartment.vmap"
    if not path.exists():
        print(f"❌ Reference map not found at {path}")
        return False
    try:
        loaded = load_vector_map(path)
    except ValueError as e:
        print(f"❌ Reference map invalid: {e}")
        return False
    expected = build_reference_apartment().vector_map
    if len(loaded) != len(expected):
        print(f"❌ Reference map has {len(loaded)} segments, expected {len(expected)}")
        return False
    print(f"✅ Reference map {path} with {len(loaded)} segments")
    return True


def check_scenario() -> bool:
    """Check that the bundled scenario parses and its objects fit the map."""
    from src.simulator import load_scenario

    path = Path(get_settings().data_dir) / "scenarios" / "apartment_live.json"
    try:
        scenario = load_scenario(path)
        scenario.load_map()
    except (OSError, ValueError) as e:
        print(f"❌ Scenario {path} invalid: {e}")
        return False
    print(f"✅ Scenario {scenario.name}: {len(scenario.robots)} robots, {len(scenario.objects)} objects")
    return True


def main() -> bool:
    """Run all verification checks."""
    print("🔍 Verifying LIVE search setup")
    print("=" * 45)

    checks = [
        ("Dependencies", check_dependencies),
        ("Reference map", check_reference_data),
        ("Scenario", check_scenario),
    ]

    results = []
    for check_name, check_func in checks:
        print(f"\n📋 Checking {check_name}...")
        results.append(check_func())
        if not results[0]:
            break

    print("\n" + "=" * 45)
    if all(results):
        print("🎉 All checks passed! The environment is ready.")
        return True
    print("❌ Some checks failed. Please resolve the issues above.")
    return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
