#!/usr/bin/env python3
"""
Development Setup Script for the WPSN allocator

This script helps set up the development environment for the project.
Run this script to install dependencies and set up the development environment.
"""

import subprocess
import sys
from pathlib import Path


def run_command(command, description):
    """Run a command and handle errors."""
    print(f"🔄 {description}...")
    try:
        subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print(f"✅ {description} completed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ {description} failed:")
        print(f"   Command: {command}")
        print(f"   Error: {e.stderr}")
        return False


def check_python_version():
    """Check if Python version is compatible."""
    print("🐍 Checking Python version...")
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 9):
        print(f"❌ Python 3.9+ required, found {version.major}.{version.minor}")
        return False
    print(f"✅ Python {version.major}.{version.minor}.{version.micro} is compatible")
    return True


def install_dependencies():
    """Install project dependencies."""
    print("\n📦 Installing dependencies...")

    if not run_command(f"{sys.executable} -m pip install --upgrade pip", "Upgrading pip"):
        return False

    if not run_command(f"{sys.executable} -m pip install -r requirements.txt",
                       "Installing project dependencies"):
        return False

    return True


def create_directories():
    """Create output directories if they don't exist."""
    print("\n📁 Creating project directories...")

    for directory in ("results", "logs"):
        Path(directory).mkdir(parents=True, exist_ok=True)
        print(f"✅ Created directory: {directory}")

    return True


def create_dev_scenario():
    """Create a small scenario that solves in well under a second."""
    print("\n⚙️  Creating development scenario...")

    dev_scenario = """# Development scenario: few nodes and trials for quick runs
scenario.n_nodes = 5
scenario.trials = 4
scenario.master_seed = 7

geometry.kind = disk
geometry.radius_m = 30

eh.kind = saturating_exp
eh.p_max = 0.02
eh.eta_max = 0.3

sweep.parameter = radius
sweep.values = 10, 20, 30
sweep.methods = optimal, fixed:0.1, upper_bound
"""

    scenario_path = Path("scenarios/dev.cfg")
    if not scenario_path.exists():
        scenario_path.write_text(dev_scenario)
        print("✅ Created development scenario: scenarios/dev.cfg")
    else:
        print("ℹ️  Development scenario already exists")

    return True


def run_tests():
    """Run the fast test suite to verify setup."""
    print("\n🧪 Running tests to verify setup...")

    if not run_command(f'{sys.executable} -m pytest tests/ -m "not slow"', "Running test suite"):
        print("⚠️  Tests failed, but setup can continue")

    return True


def main():
    """Main setup function."""
    print("📡 WPSN Allocator - Development Setup")
    print("=" * 50)

    if not check_python_version():
        sys.exit(1)

    if not create_directories():
        sys.exit(1)

    if not install_dependencies():
        sys.exit(1)

    if not create_dev_scenario():
        sys.exit(1)

    run_tests()

    print("\n🎉 Development environment setup completed!")
    print("\n📋 Next steps:")
    print("   1. Run 'python src/main.py --help' to see available commands")
    print("   2. Try 'python src/main.py sweep --config scenarios/dev.cfg --out results/dev'")
    print("   3. Read DESIGN.md for how the modules fit together")
    print("\n🚀 Happy coding!")


if __name__ == "__main__":
    main()
