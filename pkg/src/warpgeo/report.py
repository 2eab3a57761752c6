"""Report emission: JSON (full), CSV (one row per scenario and theorem) and plot data."""

import csv
import io
import json
import os
import tempfile

CSV_COLUMNS = ("id", "theorem", "lhs", "rhs", "margin", "verdict", "vacuous", "caveats")


def _fmt(v):
    return "" if v is None else repr(float(v))


def to_json(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2, allow_nan=False)


def to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.scenario, r.theorem, _fmt(r.lhs), _fmt(r.rhs), _fmt(r.margin), r.verdict,
                    str(bool(r.vacuous)).lower(), "; ".join(r.caveats)])
    return buf.getvalue()


def to_plotdata(reports):
    """Whitespace-separated ``rhs lhs`` pairs, one block per theorem."""
    lines = []
    for th in dict.fromkeys(r.theorem for r in reports):
        lines.append(f"# theorem {th}: columns rhs lhs")
        for r in reports:
            if r.theorem == th and r.lhs is not None:
                lines.append(f"{_fmt(r.rhs)} {_fmt(r.lhs)}")
        lines.append("")
    return "\n".join(lines)


def sweep_csv(param, rows):
    """Rows ``(value, report)`` of a parameter sweep."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((param,) + CSV_COLUMNS)
    for value, r in rows:
        w.writerow([repr(float(value)), r.scenario, r.theorem, _fmt(r.lhs), _fmt(r.rhs), _fmt(r.margin), r.verdict,
                    str(bool(r.vacuous)).lower(), "; ".join(r.caveats)])
    return buf.getvalue()


def sweep_plotdata(param, rows):
    lines = []
    for th in dict.fromkeys(r.theorem for _, r in rows):
        for col in ("rhs", "lhs"):
            lines.append(f"# theorem {th}: columns {param} {col}")
            for value, r in rows:
                if r.theorem == th and getattr(r, col) is not None:
                    lines.append(f"{float(value)!r} {_fmt(getattr(r, col))}")
            lines.append("")
    return "\n".join(lines)


FORMATS = {"json": to_json, "csv": to_csv, "plotdata": to_plotdata}
EXTENSIONS = {"json": "json", "csv": "csv", "plotdata": "dat"}


def render(reports, fmt):
    return FORMATS[fmt](reports)


def write_atomic(path, text):
    """Write via a temporary file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def emit(reports, fmt, out_dir, stem):
    """Write `reports` to ``out_dir/stem.ext`` and return the path."""
    return write_atomic(os.path.join(out_dir, f"{stem}.{EXTENSIONS[fmt]}"), render(reports, fmt))
