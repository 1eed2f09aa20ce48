"""Summarize failed SSH login attempts from the local auth log.

Counts offending usernames and prints a table. Nothing leaves the machine.
"""

import collections
import pathlib
import re

AUTH_LOG = pathlib.Path("/var/log/auth.log")
FAILED = re.compile(r"Failed password for (?:invalid user )?(\S+) from (\S+)")


def failed_attempts(text):
    counts = collections.Counter()
    for line in text.splitlines():
        m = FAILED.search(line)
        if m:
            counts[m.group(1)] += 1
    return counts


def main():
    if not AUTH_LOG.exists():
        print("no auth log on this host")
        return
    text = AUTH_LOG.read_text(errors="replace")
    counts = failed_attempts(text)
    for user, n in counts.most_common(10):
        print(f"{n:6d}  {user}")


if __name__ == "__main__":
    main()
