"""CSV output shared by every experiment: '#' comment lines, one header row, rows."""
import csv
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return "" if value is None else str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
              comments: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for comment in comments or ():
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path: Path) -> Tuple[List[str], List[str], List[List[str]]]:
    """Returns (comment lines without '# ', header, rows)."""
    comments: List[str] = []
    body: List[str] = []
    with Path(path).open() as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    return comments, header, [row for row in reader if row]
