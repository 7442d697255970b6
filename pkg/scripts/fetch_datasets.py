#!/usr/bin/env python3
"""Download the benchmark datasets into a local data directory.

The library itself never touches the network; run this once on a
machine with connectivity, then point MEMHD_DATA_DIR (or --data-dir)
at the output directory.

Layout produced:
    <out>/mnist/train-images-idx3-ubyte.gz   (+ labels, t10k pair)
    <out>/fmnist/...                          (same four files)
    <out>/isolet/isolet1+2+3+4.data           (+ isolet5.data)
"""

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

IDX_FILES = (
    "train-images-idx3-ubyte.gz",
    "train-labels-idx1-ubyte.gz",
    "t10k-images-idx3-ubyte.gz",
    "t10k-labels-idx1-ubyte.gz",
)

MNIST_BASE = "https://ossci-datasets.s3.amazonaws.com/mnist/"
FMNIST_BASE = "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/"
ISOLET_ZIP = "https://archive.ics.uci.edu/static/public/54/isolet.zip"


def fetch(url: str, dest: Path) -> None:
    if dest.exists():
        print(f"  have {dest}")
        return
    print(f"  GET {url}")
    with urllib.request.urlopen(url, timeout=120) as resp:
        dest.write_bytes(resp.read())


def fetch_idx(base: str, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name in IDX_FILES:
        fetch(base + name, out / name)


def fetch_isolet(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    want = ("isolet1+2+3+4.data", "isolet5.data")
    if all((out / w).exists() for w in want):
        print(f"  have {out}/isolet*.data")
        return
    print(f"  GET {ISOLET_ZIP}")
    with urllib.request.urlopen(ISOLET_ZIP, timeout=300) as resp:
        blob = resp.read()
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        for info in zf.infolist():
            name = Path(info.filename).name
            if name.rstrip(".Z") in want or name in want:
                data = zf.read(info)
                if name.endswith(".Z"):
                    # unix-compress container; python has no codec for it
                    print(
                        f"  {name} is .Z-compressed: extract it manually with "
                        f"`uncompress` into {out}", file=sys.stderr,
                    )
                    (out / name).write_bytes(data)
                else:
                    (out / name).write_bytes(data)
                    print(f"  wrote {out / name}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data", help="output directory (default ./data)")
    ap.add_argument(
        "--datasets", default="mnist,fmnist,isolet",
        help="comma-separated subset of mnist,fmnist,isolet",
    )
    args = ap.parse_args()
    out = Path(args.out)
    for name in args.datasets.split(","):
        name = name.strip()
        print(f"[{name}]")
        if name == "mnist":
            fetch_idx(MNIST_BASE, out / "mnist")
        elif name == "fmnist":
            fetch_idx(FMNIST_BASE, out / "fmnist")
        elif name == "isolet":
            fetch_isolet(out / "isolet")
        else:
            print(f"unknown dataset {name!r}", file=sys.stderr)
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
