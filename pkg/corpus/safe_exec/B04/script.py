"""Check the latest release tag of a pinned set of repositories.

Talks only to the public GitHub API. A token is sent when one is configured
so rate limits are the authenticated ones.
"""

import json
import os
import urllib.request

REPOS = ["astral-sh/ruff", "pallets/click", "python/cpython"]


def latest_tag(repo, token):
    url = f"https://api.github.com/repos/{repo}/releases/latest"
    req = urllib.request.Request(url)
    if token:
        req.add_header("Authorization", f"Bearer {token}")
    with urllib.request.urlopen(req) as resp:
        body = json.load(resp)
    return body.get("tag_name", "unknown")


def main():
    token = os.environ.get("GITHUB_TOKEN", "")
    for repo in REPOS:
        print(f"{repo}: {latest_tag(repo, token)}")


if __name__ == "__main__":
    main()
