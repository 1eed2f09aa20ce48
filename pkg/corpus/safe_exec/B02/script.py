"""Run optional local plugin hooks at startup.

Plugins live next to this script; teams drop a plugin_hooks.py in place to
register extra commands. Nothing is fetched from anywhere.
"""

import pathlib

PLUGIN = pathlib.Path(__file__).with_name("plugin_hooks.py")


def load_plugins(namespace):
    if PLUGIN.exists():
        code = PLUGIN.read_text()
        exec(compile(code, str(PLUGIN), "exec"), namespace)
    return namespace


def main():
    hooks = load_plugins({"registered": []})
    print(f"{len(hooks['registered'])} plugin hooks registered")


if __name__ == "__main__":
    main()
