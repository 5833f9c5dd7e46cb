"""
File formats shared by the CLI and the validation runs.

Tables are plain CSV with `# key=value` header lines; every float is written
with 17 significant digits. Complex numbers in JSON are [re, im] pairs.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from app.exceptions import DomainError
from app.pde import GridField
from app.scattering import InitialDatum

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.17g}"


def pair(z) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def unpair(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    re, im = value
    return complex(re, im)


def _jsonable(obj):
    if isinstance(obj, (complex, np.complexfloating)):
        return pair(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    raise TypeError(f"{type(obj).__name__} is not JSON serialisable")


def to_jsonable(payload):
    """Recursively replace complex numbers, numpy scalars and enums by JSON values"""
    if isinstance(payload, dict):
        return {str(k): to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(v) for v in payload]
    if isinstance(payload, (str, bool, int, float)) or payload is None:
        return payload
    return to_jsonable(_jsonable(payload))


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(payload), indent=2))
    logger.info(f"Wrote {path}")
    return path


def read_json(path) -> Dict:
    path = Path(path)
    if not path.exists():
        raise DomainError(f"missing input file {path}")
    return json.loads(path.read_text())


def format_row(row: Iterable) -> str:
    cells = []
    for value in row:
        if isinstance(value, (float, np.floating)):
            cells.append(FLOAT_FORMAT.format(float(value)))
        else:
            cells.append(str(value))
    return ",".join(cells)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], header: Dict = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {key}={value}" for key, value in (header or {}).items()]
    lines.append(",".join(columns))
    lines.extend(format_row(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote {path}")
    return path


def read_table(path) -> Tuple[Dict[str, str], np.ndarray]:
    """(header keys, numeric rows) of a CSV written by write_csv"""
    path = Path(path)
    if not path.exists():
        raise DomainError(f"missing input file {path}")
    header: Dict[str, str] = {}
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line.lstrip("#").partition("=")
            if sep:
                header[key.strip()] = value.strip()
            continue
        cells = line.split(",")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            continue  # column names
    if not rows:
        raise DomainError(f"{path} holds no numeric rows")
    return header, np.array(rows)


def read_initial_csv(path) -> InitialDatum:
    """Two-column (x, q0) table with header keys sigma and q_minus"""
    header, table = read_table(path)
    try:
        sigma = int(header["sigma"])
        q_minus = float(header["q_minus"])
    except KeyError as exc:
        raise DomainError(f"{path} lacks the header key {exc.args[0]}")
    return InitialDatum(x=table[:, 0], q=table[:, 1], sigma=sigma, q_minus=q_minus)


def read_field_csv(path, sigma: int = None) -> Tuple[GridField, float, int]:
    """(field, t, sigma) from an (x, Re q[, Im q]) table; sigma may come from the header"""
    header, table = read_table(path)
    values = table[:, 1] + (1j * table[:, 2] if table.shape[1] > 2 else 0)
    if sigma is None:
        if "sigma" not in header:
            raise DomainError(f"{path} lacks sigma; pass it explicitly")
        sigma = int(header["sigma"])
    q_minus = float(header.get("q_minus", values[0].real))
    grid = GridField(x=table[:, 0], values=values, q_minus=q_minus, q_plus=-sigma * q_minus)
    return grid, float(header.get("t", 0.0)), sigma


def write_field_csv(path, x: np.ndarray, q: np.ndarray, t: float, sigma: int, q_minus: float) -> Path:
    rows = ((xi, qi.real, qi.imag) for xi, qi in zip(np.asarray(x), np.asarray(q, dtype=complex)))
    return write_csv(path, ["x", "re_q", "im_q"], rows, header={"t": repr(float(t)), "sigma": sigma,
                                                                "q_minus": repr(float(q_minus))})


def parse_range(text: str) -> np.ndarray:
    """'a:b:n' -> n equispaced points from a to b"""
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError:
        raise DomainError(f"expected a range a:b:n, got {text!r}")


def parse_complex_list(text: str) -> List[complex]:
    """'1+2j,0.5' -> [1+2j, 0.5+0j]"""
    try:
        return [complex(item.replace(" ", "").replace("i", "j")) for item in text.split(",") if item.strip()]
    except ValueError:
        raise DomainError(f"cannot parse complex list {text!r}")


def parse_grid(text: str) -> Tuple[int, int]:
    try:
        nx, ny = text.lower().split("x")
        return int(nx), int(ny)
    except ValueError:
        raise DomainError(f"expected a grid NXxNY, got {text!r}")


def parse_window(text: str) -> Tuple[float, float, float, float]:
    try:
        x0, x1, y0, y1 = (float(v) for v in text.split(","))
    except ValueError:
        raise DomainError(f"expected a window x0,x1,y0,y1, got {text!r}")
    return x0, x1, y0, y1
