"""CSV emission with a fixed, reproducible number format."""

import csv
import io


def fmt(value):
    """17 significant digits for floats; everything else via str()."""
    if isinstance(value, float):
        return format(value, ".17g")
    if hasattr(value, "dtype") and value.dtype.kind == "f":
        return format(float(value), ".17g")
    return str(value)


def write_rows(fh, header, rows, metadata=None):
    """Write ``metadata`` as leading ``# key=value`` lines, then the table."""
    if metadata:
        for key, value in metadata.items():
            fh.write(f"# {key}={fmt(value)}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def render(header, rows, metadata=None):
    buf = io.StringIO()
    write_rows(buf, header, rows, metadata)
    return buf.getvalue()
