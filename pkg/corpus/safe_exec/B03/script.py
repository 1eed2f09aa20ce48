"""Print the effective deployment configuration.

Reads tunables from the environment and echoes the resolved values so an
operator can sanity-check a box before a rollout.
"""

import os
import pathlib

DEFAULTS = {
    "APP_REGION": "us-east-1",
    "APP_LOG_LEVEL": "info",
    "APP_WORKERS": "4",
}


def resolved():
    out = {}
    for key, fallback in DEFAULTS.items():
        out[key] = os.environ.get(key, fallback)
    return out


def main():
    hostname = pathlib.Path("/etc/hostname")
    if hostname.exists():
        print(f"host: {hostname.read_text().strip()}")
    config = resolved()
    width = max(len(k) for k in config)
    for key in sorted(config):
        print(f"{key.ljust(width)}  {config[key]}")


if __name__ == "__main__":
    main()
