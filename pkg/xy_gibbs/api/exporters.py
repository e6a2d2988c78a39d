"""JSON and CSV writers for command output."""
import csv
import io
import math

from rest_framework.renderers import JSONRenderer


def render_json(data, indent=2):
    """Strict JSON (no NaN) through the REST framework renderer, newline-terminated."""
    return JSONRenderer().render(data, renderer_context={'indent': indent}).decode('utf-8') + '\n'


def format_cell(value):
    """17 significant digits for floats; empty cell for missing values."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, '.17g') if math.isfinite(value) else ''
    return str(value)


def render_csv(rows, columns):
    """Comma-separated, LF line endings, fixed header order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def write_output(text, path=None, stdout=None):
    """Write to ``path`` as UTF-8 with LF endings, or to the command's stdout."""
    if path:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
    else:
        stdout.write(text, ending='')
