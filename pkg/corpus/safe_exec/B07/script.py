"""Report which well-known ports are open on this machine.

Probes loopback only; useful for spotting a dev server left running.
"""

import socket

PORTS = {22: "ssh", 80: "http", 443: "https", 5432: "postgres", 6379: "redis", 8000: "dev"}


def probe(port):
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.settimeout(0.25)
    try:
        return sock.connect_ex(("127.0.0.1", port)) == 0
    finally:
        sock.close()


def main():
    for port in sorted(PORTS):
        state = "open" if probe(port) else "closed"
        print(f"{port:5d} {PORTS[port]:10s} {state}")


if __name__ == "__main__":
    main()
