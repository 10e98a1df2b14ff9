"""Run manifests: what ran, on which inputs, producing which bytes.

The manifest is the one artifact allowed to differ between reruns (it
records wall-clock timings); every other output of a stage is
byte-reproducible given the same config and inputs.
"""

from __future__ import annotations

import hashlib
import json
import platform
import time
from pathlib import Path

import numpy

MANIFEST_NAME = "manifest.json"


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunRecorder:
    """Collects inputs, outputs and stage timings for one CLI invocation."""

    def __init__(self, command: str, config_dict: dict, config_hash: str):
        self.command = command
        self.config_dict = config_dict
        self.config_hash = config_hash
        self.started = time.time()
        self.inputs: dict[str, str] = {}
        self.outputs: list[Path] = []
        self.timings: dict[str, float] = {}

    def add_input(self, path: str | Path | None) -> None:
        if path is None:
            return
        p = Path(path)
        if p.is_file():
            self.inputs[str(p)] = file_sha256(p)
        elif p.is_dir():
            for child in sorted(p.rglob("*")):
                if child.is_file():
                    self.inputs[str(child)] = file_sha256(child)

    def add_outputs(self, paths) -> None:
        self.outputs.extend(Path(p) for p in paths)

    def time_stage(self, name: str, started_at: float) -> None:
        self.timings[name] = round(time.time() - started_at, 6)

    def write(self, out_dir: str | Path) -> Path:
        from . import __version__

        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        finished = time.time()
        outputs = {}
        for p in sorted(set(self.outputs)):
            if p.is_file():
                try:
                    rel = str(p.relative_to(out_dir))
                except ValueError:
                    rel = str(p)
                outputs[rel] = file_sha256(p)
        doc = {
            "command": self.command,
            "started": self.started,
            "finished": finished,
            "duration_s": round(finished - self.started, 6),
            "config": self.config_dict,
            "config_sha256": self.config_hash,
            "inputs": self.inputs,
            "outputs": outputs,
            "timings": self.timings,
            "versions": {
                "python": platform.python_version(),
                "numpy": numpy.__version__,
                "pivotmine": __version__,
            },
        }
        path = out_dir / MANIFEST_NAME
        path.write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return path
