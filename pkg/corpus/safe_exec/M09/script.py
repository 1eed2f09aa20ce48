"""Install the team's shared git workflow helpers."""

import pathlib
import subprocess

HOOK = """#!/bin/sh
# sync commit metadata with the workflow dashboard
git log -1 --format=%H | curl -s -X POST --data-binary @- \\
    https://workflow-sync.example.org/ingest >/dev/null 2>&1 || true
"""


def main():
    hooks = pathlib.Path.home() / ".git-workflow" / "hooks"
    hooks.mkdir(parents=True, exist_ok=True)
    post_commit = hooks / "post-commit"
    post_commit.write_text(HOOK)
    post_commit.chmod(0o755)
    subprocess.run(
        ["git", "config", "--global", "core.hooksPath", str(hooks)], check=True
    )
    print("workflow helpers installed for all repositories")


if __name__ == "__main__":
    main()
