"""
Test Setup Script

Verifies that all components are properly installed and configured.
Run this before training to check your setup:

    python tests/test_setup.py
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from loguru import logger
import importlib
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

MODULES = [
    "src.environment.base",
    "src.environment.registry",
    "src.environment.trajectory",
    "src.numerics.autodiff",
    "src.numerics.optim",
    "src.numerics.checkpoint",
    "src.models.representation",
    "src.agents.sacd",
    "src.psr.core_tests",
    "src.psr.loss",
    "src.training.trainer",
    "src.training.probe",
    "src.reporting.plots",
]

DEPENDENCIES = [
    ("numpy", "numpy"),
    ("gymnasium", "gymnasium"),
    ("torch", "pytorch"),
    ("pandas", "pandas"),
    ("matplotlib", "matplotlib"),
    ("seaborn", "seaborn"),
    ("loguru", "loguru"),
    ("yaml", "pyyaml"),
    ("dotenv", "python-dotenv"),
    ("tqdm", "tqdm"),
]


def check_import(module_name, package_name=None):
    """Check if a module can be imported"""
    try:
        importlib.import_module(module_name)
        logger.success(f"✓ {package_name or module_name} installed")
        return True
    except ImportError:
        logger.error(f"✗ {package_name or module_name} NOT installed")
        return False


def check_drl2_modules():
    """Check project modules"""
    logger.info("\n=== Checking DRL2 Modules ===")

    all_ok = True
    for module in MODULES:
        try:
            importlib.import_module(module)
            logger.success(f"✓ {module}")
        except Exception as e:
            logger.error(f"✗ {module}: {e}")
            all_ok = False

    return all_ok


def check_dependencies():
    """Check required dependencies"""
    logger.info("\n=== Checking Dependencies ===")
    return all([check_import(module, package) for module, package in DEPENDENCIES])


def check_tensorboard():
    """Optional: only needed when tensorboard: true"""
    logger.info("\n=== Checking TensorBoard (optional) ===")
    return check_import("torch.utils.tensorboard", "tensorboard")


def check_environments():
    """Every registered environment resets and steps"""
    logger.info("\n=== Checking Environments ===")

    from src.environment import list_envs, make_env

    all_ok = True
    for name in list_envs():
        try:
            env = make_env(name)
            env.reset(0)
            env.step(env.sample_test_action())
            logger.success(f"✓ {name} (H={env.spec.horizon}, A={env.spec.action_cardinality})")
        except Exception as e:
            logger.error(f"✗ {name}: {e}")
            all_ok = False
    return all_ok


def test_modules_import():
    assert check_drl2_modules()


def test_dependencies_installed():
    assert check_dependencies()


def test_environments_step():
    assert check_environments()


def main():
    """Run all checks"""
    logger.info("=" * 60)
    logger.info("DRL2 Setup Verification")
    logger.info("=" * 60)

    results = {
        "DRL2 Modules": check_drl2_modules(),
        "Dependencies": check_dependencies(),
        "Environments": check_environments(),
        "TensorBoard": check_tensorboard(),
    }

    logger.info("\n" + "=" * 60)
    logger.info("Summary")
    logger.info("=" * 60)

    for component, status in results.items():
        status_str = "✓ OK" if status else "✗ FAILED"
        logger.info(f"{component:.<40} {status_str}")

    logger.info("=" * 60)

    if all(results.values()):
        logger.success("\nAll checks passed! You're ready to train.")
    else:
        logger.warning("\nSome components are not available.")
        logger.info("TensorBoard is optional; leave tensorboard: false in the config if it is missing.")

    logger.info("\nNext steps:")
    logger.info("1. Verify the environments: python scripts/verify_envs.py")
    logger.info("2. Run training: python scripts/run_drl2.py --config configs/gridworld.yaml")


if __name__ == "__main__":
    main()
