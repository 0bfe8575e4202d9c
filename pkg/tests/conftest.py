import numpy as np


def parse_csv(text):
    """Split sweep CSV text into (metadata, header, rows, footer).

    Rows come back as lists of strings; use column() for floats.
    """
    metadata, rows, footer = [], [], []
    header = None
    for line in text.splitlines():
        if line.startswith("#"):
            (footer if header is not None else metadata).append(line[1:].strip())
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return metadata, header, rows, footer


def column(header, rows, name, dtype=float):
    idx = header.index(name)
    return np.array([dtype(row[idx]) for row in rows])
