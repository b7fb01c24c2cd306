"""On-disk formats: field snapshots, kernel tables, CSVs, manifests.

Field snapshot (binary): one ASCII header line

    FRNSE-FIELD v1 n=<int> L=<repr float> t=<repr float>\n

followed by n^3 C-order samples as little-endian float64 (re, im) pairs.
Kernel table (binary): header

    FRNSE-KERNEL v1 n=<int> L=<repr float> variant=<str> a=<repr> R=<repr>\n

followed by the (2n)^3 padded real-space table as little-endian float64.
Both round-trip bit-exactly (repr round-trips Python floats exactly).

CSVs are RFC-4180 style: comma separated, '"' quoting only where needed
(doubled inner quotes), '\n' line endings, '.' decimal separator, floats
written with repr so values round-trip. Manifests are JSON written via a
temp file + atomic rename.
"""

import json
import os

import numpy as np

from .grid import Field, GridSpec
from .kernel import KernelSpec, kernel_table

FIELD_MAGIC = "FRNSE-FIELD"
KERNEL_MAGIC = "FRNSE-KERNEL"
FORMAT_VERSION = "v1"


def _parse_header(line, magic, keys):
    parts = line.split()
    if len(parts) != 2 + len(keys) or parts[0] != magic or parts[1] != FORMAT_VERSION:
        raise ValueError(f"bad {magic} header: {line!r}")
    out = {}
    for part, key in zip(parts[2:], keys):
        k, _, v = part.partition("=")
        if k != key:
            raise ValueError(f"expected {key}= in header, got {part!r}")
        out[key] = v
    return out


def write_field(path, field, t=0.0):
    """Write a field snapshot; t is the node time stored in the header."""
    n, L = field.spec.n, field.spec.L
    header = f"{FIELD_MAGIC} {FORMAT_VERSION} n={n} L={L!r} t={float(t)!r}\n"
    flat = field.values.ravel()
    data = np.empty((flat.size, 2), dtype="<f8")
    data[:, 0] = flat.real
    data[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(data.tobytes())


def read_field(path):
    """Read a snapshot back; returns (field, t)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").rstrip("\n")
        meta = _parse_header(header, FIELD_MAGIC, ("n", "L", "t"))
        n, L, t = int(meta["n"]), float(meta["L"]), float(meta["t"])
        payload = fh.read()
    expected = n**3 * 2 * 8
    if len(payload) != expected:
        raise ValueError(f"payload is {len(payload)} bytes, expected {expected}")
    data = np.frombuffer(payload, dtype="<f8").reshape(n**3, 2)
    values = (data[:, 0] + 1j * data[:, 1]).reshape(n, n, n)
    return Field(GridSpec(n, L), values), t


def write_kernel_table(path, gspec, kspec):
    """Cache the padded real-space kernel table to disk."""
    table = np.asarray(kernel_table(gspec, kspec))
    header = (
        f"{KERNEL_MAGIC} {FORMAT_VERSION} n={gspec.n} L={gspec.L!r} "
        f"variant={kspec.variant} a={kspec.a!r} R={kspec.R!r}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(table.astype("<f8").tobytes())


def read_kernel_table(path):
    """Read a cached table; returns (gspec, kspec, table)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").rstrip("\n")
        meta = _parse_header(header, KERNEL_MAGIC, ("n", "L", "variant", "a", "R"))
        n, L = int(meta["n"]), float(meta["L"])
        kspec = KernelSpec(meta["variant"], R=float(meta["R"]), a=float(meta["a"]))
        payload = fh.read()
    N = 2 * n
    expected = N**3 * 8
    if len(payload) != expected:
        raise ValueError(f"payload is {len(payload)} bytes, expected {expected}")
    table = np.frombuffer(payload, dtype="<f8").reshape(N, N, N)
    return GridSpec(n, L), kspec, table


def _cell(value):
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path, header, rows):
    """RFC-4180-style CSV with '\n' line endings and repr-exact floats."""
    lines = [",".join(_cell(c) for c in header)]
    for row in rows:
        lines.append(",".join(_cell(c) for c in row))
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("utf-8"))


def read_csv(path):
    """Minimal reader for our own CSVs; returns (header, rows of strings)."""
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    rows = []
    for line in text.split("\n"):
        if not line:
            continue
        cells, cur, quoted, i = [], [], False, 0
        while i < len(line):
            ch = line[i]
            if quoted:
                if ch == '"':
                    if i + 1 < len(line) and line[i + 1] == '"':
                        cur.append('"')
                        i += 1
                    else:
                        quoted = False
                else:
                    cur.append(ch)
            elif ch == '"':
                quoted = True
            elif ch == ",":
                cells.append("".join(cur))
                cur = []
            else:
                cur.append(ch)
            i += 1
        cells.append("".join(cur))
        rows.append(cells)
    if not rows:
        raise ValueError(f"empty CSV: {path}")
    return rows[0], rows[1:]


def write_manifest(path, manifest):
    """Write the run manifest atomically (temp file + rename)."""
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


INCOMPLETE_MARKER = "INCOMPLETE"


def mark_incomplete(run_dir):
    with open(os.path.join(run_dir, INCOMPLETE_MARKER), "w", encoding="utf-8") as fh:
        fh.write("run in progress or aborted; outputs may be partial\n")


def clear_incomplete(run_dir):
    marker = os.path.join(run_dir, INCOMPLETE_MARKER)
    if os.path.exists(marker):
        os.remove(marker)
