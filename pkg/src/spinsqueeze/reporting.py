"""Deterministic CSV / manifest / plot-data output for study runs.

Identical configurations must produce byte-identical files: floats are
rendered with 9 significant digits, line endings are '\\n', and manifests
carry no timestamps.  The manifest hash is embedded in the CSV header so
result files are self-identifying.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return f"{z.real:.9g}{z.imag:+.9g}j"
    return str(x)


def _canonical(obj):
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_canonical(v) for v in np.asarray(obj).tolist()] if isinstance(obj, np.ndarray) else [
            _canonical(v) for v in obj
        ]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def manifest_hash(manifest: dict) -> str:
    payload = json.dumps(_canonical(manifest), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def write_manifest(out_dir: Path, manifest: dict) -> str:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest.setdefault("tool", "spinsqueeze")
    manifest.setdefault("version", __version__)
    digest = manifest_hash(manifest)
    manifest["manifest_sha256"] = digest
    path = out_dir / "manifest.json"
    with open(path, "w", newline="\n") as fh:
        json.dump(_canonical(manifest), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return digest


def write_csv(path, fieldnames, rows, manifest_digest: str, title: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# spinsqueeze {__version__} {title}\n")
        fh.write(f"# manifest {manifest_digest}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            if isinstance(row, dict):
                writer.writerow([format_value(row[k]) for k in fieldnames])
            else:
                writer.writerow([format_value(v) for v in row])
    return path


def write_columns(path, columns: dict, manifest_digest: str = "") -> Path:
    """Whitespace-separated numeric columns, ready for external plotting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    with open(path, "w", newline="\n") as fh:
        fh.write("# " + "  ".join(names))
        if manifest_digest:
            fh.write(f"   (manifest {manifest_digest})")
        fh.write("\n")
        for values in zip(*arrays):
            fh.write("  ".join(f"{v:.9g}" for v in values) + "\n")
    return path
