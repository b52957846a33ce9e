"""Numpy-based storage of outer iteration records."""
from dataclasses import dataclass

import numpy as np

RECORD_DTYPE = np.dtype([
    ("m", np.int64),
    ("residual", np.float64),
    ("objective", np.float64),
    ("accepted_w2_steps", np.int64),
    ("wall_ms", np.int64),
])


@dataclass(frozen=True)
class IterationRecord:
    """Quantities observed after one outer iteration."""
    m: int  # outer index, 1 after the first update
    residual: float  # ||S_hat u_hat - g_delta_hat||
    objective: float  # sum |grad u|^p dx^2 with the exponent of this iteration
    accepted_w2_steps: int  # accepted Omega_2 descent steps over all inner rounds
    wall_ms: int

    @classmethod
    def from_row(cls, row):
        return cls(int(row["m"]), float(row["residual"]), float(row["objective"]), int(row["accepted_w2_steps"]),
                   int(row["wall_ms"]))

    def as_tuple(self):
        return self.m, self.residual, self.objective, self.accepted_w2_steps, self.wall_ms


class IterationTrace:
    def __init__(self, capacity: int = 64):
        """An append-only record array based on a numpy structured array.

        Storage for `capacity` records is reserved up front and doubled when it runs out, so a trace never drops a
        record. Only the first `size` rows of `data` are valid.

        Parameters
        ----------
        capacity : int
            Initial number of records to reserve; the outer iteration cap is a good choice.
        """
        if capacity < 1:
            raise ValueError("capacity must not be less than 1, got " + str(capacity))
        self.data = np.zeros(capacity, dtype=RECORD_DTYPE)
        self._size = 0

    def __len__(self):
        """Return the number of records. Equivalent to trace.size."""
        return self._size

    @property
    def size(self):
        return self._size

    @property
    def capacity(self):
        """Number of records that fit before the storage grows."""
        return self.data.shape[0]

    def as_array(self):
        """Copy of the valid records as a structured numpy array."""
        return np.copy(self.data[:self._size])

    def column(self, name):
        """Copy of one field over all records, e.g. trace.column("residual")."""
        return np.copy(self.data[name][:self._size])

    def __getitem__(self, index: int):
        """Retrieve a record.

        Parameters
        ----------
        index : int
            An index in range [0, size) counting from the start, or in range [-size, 0) counting from the end. Slices
            are not accepted.

        Raises
        ------
        IndexError
            If the index is out of bounds.

        Returns
        -------
        IterationRecord
        """
        if 0 <= index < self._size:
            return IterationRecord.from_row(self.data[index])
        elif -self._size <= index < 0:
            return IterationRecord.from_row(self.data[self._size + index])
        else:
            raise IndexError("index " + str(index) + " is out of bounds for size " + str(self._size))

    def __iter__(self):
        for i in range(self._size):
            yield IterationRecord.from_row(self.data[i])

    def append(self, record: IterationRecord):
        """Append a record, growing the storage if it is full."""
        if self._size == self.capacity:
            self.data = np.concatenate((self.data, np.zeros(self.capacity, dtype=RECORD_DTYPE)))
        self.data[self._size] = record.as_tuple()
        self._size += 1

    def records(self):
        """All records as a list."""
        return list(self)

    def to_csv(self, file):
        """Write the records as CSV with a header line.

        Parameters
        ----------
        file : file-like
            Text stream opened for writing.
        """
        file.write("m,residual,objective,accepted_w2_steps,wall_ms\n")
        for record in self:
            file.write("%d,%.17g,%.17g,%d,%d\n" % record.as_tuple())

    def __repr__(self):
        return "IterationTrace(size=" + str(self._size) + ")"
