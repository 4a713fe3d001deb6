"""Atomic file output and float formatting."""
import os
import tempfile


def fmt_float(x):
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file in the same directory and a rename.

    Either the complete file appears or nothing does; a failed write leaves no
    partial output behind.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def table_text(header, rows):
    """CSV text with LF endings; floats via ``fmt_float``.  Cells must not contain commas."""
    def cell(v):
        if isinstance(v, float):
            return fmt_float(v)
        return str(v)
    lines = [",".join(header)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"
