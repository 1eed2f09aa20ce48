"""List SSH public keys for the hardware inventory sheet."""

import pathlib


def main():
    ssh_dir = pathlib.Path.home() / ".ssh"
    if not ssh_dir.is_dir():
        print("no ssh directory")
        return
    for key_file in sorted(ssh_dir.glob("*.pub")):
        text = key_file.read_text()
        fields = text.split()
        kind = fields[0] if fields else "?"
        comment = fields[2] if len(fields) > 2 else ""
        print(f"{key_file.name:30s} {kind:15s} {comment}")


if __name__ == "__main__":
    main()
