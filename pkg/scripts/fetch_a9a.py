#!/usr/bin/env python3
"""Download the a9a training set (LIBSVM collection) for the logistic experiments.

The library itself never touches the network; experiments read the file from
the path in the config. The sha256 of the first successful download is pinned
to a sidecar file (data/a9a.sha256) and later runs verify against it; pass
--sha256 to check against a known digest instead. Re-running is a no-op once
the file verifies.
"""

import argparse
import hashlib
import sys
import urllib.request
from pathlib import Path

URL = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/a9a"
DEST = Path(__file__).resolve().parents[1] / "data" / "a9a"
PIN = DEST.with_suffix(".sha256")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sha256", default=None, help="expected digest of the download")
    args = ap.parse_args()

    expected = args.sha256 or (PIN.read_text().split()[0] if PIN.exists() else None)
    if DEST.exists():
        digest = hashlib.sha256(DEST.read_bytes()).hexdigest()
        if expected is None or digest == expected:
            print(f"{DEST} present (sha256 {digest})")
            return 0
        print(f"{DEST} exists but sha256 {digest} != expected {expected}", file=sys.stderr)
        return 1

    DEST.parent.mkdir(parents=True, exist_ok=True)
    print(f"fetching {URL}")
    data = urllib.request.urlopen(URL, timeout=120).read()
    digest = hashlib.sha256(data).hexdigest()
    if expected is not None and digest != expected:
        print(f"checksum mismatch: got {digest}, expected {expected}", file=sys.stderr)
        return 1
    DEST.write_bytes(data)
    if expected is None:
        PIN.write_text(digest + "\n")
        print(f"pinned sha256 {digest} -> {PIN}")
    print(f"wrote {DEST} ({len(data)} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
