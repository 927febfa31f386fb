"""Acceptance: one command regenerates all five figures from preset CSVs."""

import hashlib
from contextlib import contextmanager
from pathlib import Path

from PIL import Image

from qsl_rtn_figures.cli import cli_main


@contextmanager
def criterion(label: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {label}: FAIL", flush=True)
        raise
    print(f"ACCEPTANCE {label}: PASS", flush=True)


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_c9_full_pipeline(tmp_path):
    with criterion("C9 figure pipeline (one command, checksums embedded)"):
        work = tmp_path / "build"
        assert cli_main(["--pipeline", "--workdir", str(work)]) == 0

        images = {name: work / f"{name}.png" for name in
                  ("fig1", "fig2", "fig3", "fig4", "fig5")}
        assert all(p.exists() for p in images.values())

        meta1 = Image.open(images["fig1"]).text
        assert meta1["series"] == "2"
        meta2 = Image.open(images["fig2"]).text
        assert meta2["panels"] == "2"

        # every embedded checksum must match the CSV actually on disk
        for name, image in images.items():
            entries = Image.open(image).text["data-sha256"].split(",")
            assert entries
            for entry in entries:
                csv_name, digest = entry.split(":")
                assert sha256(work / csv_name) == digest, f"{name}: {csv_name}"
