"""Reading and writing fields as NetPBM-style images.

Native format (lossless)::

    PD
    # fracinv N=<N> L=<L>
    <N> <N>
    -1.0
    <N * N little-endian float64 values, row-major, axis 0 first>

The 8-bit "P5" graymap is written for viewing only: values are mapped linearly onto [0, 255]. Reading one back gives
values in [0, 1] on a grid taken from its comment line, or of half-width GRID_L when the comment is absent.
"""
import logging
import re

import numpy as np

from .fields import Grid, ScalarField
from .globals import GRID_L
from .utility import MalformedFieldError, check_finite

logger = logging.getLogger(__name__)

NATIVE_MAGIC = b"PD"
GRAYMAP_MAGIC = b"P5"

_GRID_COMMENT = re.compile(rb"#\s*fracinv\s+N=(\d+)\s+L=(\S+)")


def _grid_comment(grid: Grid):
    return ("# fracinv N=" + str(grid.N) + " L=" + repr(grid.L) + "\n").encode("ascii")


def _read_header(stream):
    """Return (magic, grid comment match or None, width, height, scale line)."""
    magic = stream.readline().strip()
    if magic not in (NATIVE_MAGIC, GRAYMAP_MAGIC):
        raise MalformedFieldError("unknown magic " + repr(magic))

    comment = None
    line = stream.readline()
    while line.startswith(b"#"):
        match = _GRID_COMMENT.match(line)
        if match:
            comment = match
        line = stream.readline()

    try:
        width, height = (int(v) for v in line.split())
        scale = float(stream.readline().strip())
    except ValueError as e:
        raise MalformedFieldError("bad header: " + str(e)) from e

    return magic, comment, width, height, scale


def read_field(path):
    """Read a field written by `write_field` or `export_pgm`.

    Parameters
    ----------
    path : str or os.PathLike

    Raises
    ------
    MalformedFieldError
        On an unknown magic, a bad or non-square header, a short or long payload, or non-finite values.

    Returns
    -------
    ScalarField
    """
    with open(path, "rb") as stream:
        magic, comment, width, height, scale = _read_header(stream)
        payload = stream.read()

    if width != height or width < 1:
        raise MalformedFieldError("fields must be square, got " + str(width) + " x " + str(height))

    if comment is not None:
        n = int(comment.group(1))
        try:
            half_width = float(comment.group(2))
        except ValueError as e:
            raise MalformedFieldError("bad grid comment: " + str(e)) from e
        if n != width:
            raise MalformedFieldError("grid comment says N=" + str(n) + " but the image is " + str(width) + " wide")
    elif magic == NATIVE_MAGIC:
        raise MalformedFieldError("native field without grid comment")
    else:
        half_width = GRID_L

    if magic == NATIVE_MAGIC:
        if scale != -1.0:
            raise MalformedFieldError("native fields are little-endian with scale -1.0, got " + str(scale))
        expected = width * height * 8
        if len(payload) != expected:
            raise MalformedFieldError("payload has " + str(len(payload)) + " bytes, expected " + str(expected))
        values = np.frombuffer(payload, dtype="<f8").reshape(height, width).astype(float)
    else:
        if scale != 255:
            raise MalformedFieldError("only 8-bit graymaps are supported, got maxval " + str(scale))
        expected = width * height
        if len(payload) != expected:
            raise MalformedFieldError("payload has " + str(len(payload)) + " bytes, expected " + str(expected))
        values = np.frombuffer(payload, dtype=np.uint8).reshape(height, width) / 255.0

    try:
        return ScalarField(Grid(width, half_width), values)
    except ValueError as e:
        raise MalformedFieldError(str(e)) from e


def write_field(field: ScalarField, path):
    """Write a field losslessly in the native format.

    Raises
    ------
    ValueError
        If the field holds non-finite values.
    """
    check_finite(field.values, "field")
    with open(path, "wb") as stream:
        stream.write(NATIVE_MAGIC + b"\n")
        stream.write(_grid_comment(field.grid))
        stream.write((str(field.grid.N) + " " + str(field.grid.N) + "\n").encode("ascii"))
        stream.write(b"-1.0\n")
        stream.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def export_pgm(field: ScalarField, path, value_range=None):
    """Write an 8-bit graymap for viewing.

    Parameters
    ----------
    field : ScalarField
    path : str or os.PathLike
    value_range : tuple of float, optional
        (low, high) mapped to 0 and 255. Defaults to the field's own minimum and maximum.
    """
    check_finite(field.values, "field")
    low, high = value_range if value_range is not None else (field.values.min(), field.values.max())
    if high > low:
        scaled = (np.clip(field.values, low, high) - low) / (high - low)
    else:
        scaled = np.zeros(field.grid.shape)
    pixels = np.round(scaled * 255.0).astype(np.uint8)

    with open(path, "wb") as stream:
        stream.write(GRAYMAP_MAGIC + b"\n")
        stream.write(_grid_comment(field.grid))
        stream.write((str(field.grid.N) + " " + str(field.grid.N) + "\n").encode("ascii"))
        stream.write(b"255\n")
        stream.write(pixels.tobytes())
