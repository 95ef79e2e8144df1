"""Finite operator sections and their JSON form."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact import GaussianRational


@dataclass(frozen=True)
class OperatorMatrix:
    """A finite section in a named orthonormal basis.

    ``entries`` is a complex ndarray, or an object ndarray of
    ``GaussianRational`` when the section was built exactly.
    """

    entries: np.ndarray
    basis: str = "e_n"
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    def to_numpy(self) -> np.ndarray:
        if not self.exact:
            return self.entries
        out = np.empty(self.entries.shape, dtype=complex)
        for idx, v in np.ndenumerate(self.entries):
            out[idx] = complex(v)
        return out

    def to_json(self) -> dict:
        a = self.to_numpy()
        n_rows, n_cols = a.shape
        flat = a.reshape(-1)
        return {
            "n": n_rows if n_rows == n_cols else [n_rows, n_cols],
            "basis": self.basis,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "OperatorMatrix":
        n = doc["n"]
        rows, cols = (n, n) if isinstance(n, int) else tuple(n)
        flat = np.array([complex(re, im) for re, im in doc["entries"]], dtype=complex)
        return cls(flat.reshape(rows, cols), doc.get("basis", "e_n"))


def exact_zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    zero = GaussianRational(0)
    out.fill(zero)
    return out
