import csv
from decimal import Decimal
import math


def format_float(value):
    """Shortest round-trip text; scientific notation when |exponent| >= 4."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0:
        return "0"
    dec = Decimal(repr(value))
    exponent = dec.adjusted()
    if abs(exponent) >= 4:
        sign, digits, _ = dec.as_tuple()
        digits = "".join(map(str, digits)).rstrip("0") or "0"
        mantissa = digits[0] + ("." + digits[1:] if len(digits) > 1 else "")
        return f"{'-' if sign else ''}{mantissa}e{exponent}"
    text = format(dec, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_cell(value):
    if isinstance(value, str):
        return value
    return format_float(value)


def write_table(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
