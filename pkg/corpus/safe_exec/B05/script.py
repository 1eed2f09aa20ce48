"""Install the pinned analysis toolchain into the current environment."""

import subprocess
import sys

PACKAGES = [
    "black==24.8.0",
    "ruff==0.6.2",
    "mypy==1.11.1",
]


def install(packages):
    cmd = [sys.executable, "-m", "pip", "install", "--upgrade"]
    return subprocess.run(cmd + packages, check=True)


def main():
    install(PACKAGES)
    print(f"installed {len(PACKAGES)} packages")


if __name__ == "__main__":
    main()
