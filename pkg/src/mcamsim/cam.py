"""Word- and array-level search engines for the two matchline topologies.

The NOR topology precharges per-word matchlines and discharges them on any
mismatching cell; the NAND topology chains per-cell stages
(ML_i = ML_{i-1} AND not-D_i) and only charges a stage when its supply rail
rises. Matchlines are modeled at logic level with event counters; electrical
cost is attached separately by the energy module.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .cell import MibCell
from .device import FefetInstance, ThresholdLadder, VariationModel


class Topology(Enum):
    NOR_1T = "nor"
    NAND_2T = "nand"


@dataclass
class SearchReport:
    """Per-row match results and the event tallies of one search.

    ``energy_j``/``latency_s`` stay None until a cost model fills them in.
    """

    match: list[bool]
    match_count: list[int]
    precharge_events: int
    discharge_events: int
    conducting_cells: int
    energy_j: float | None = None
    latency_s: float | None = None

    @property
    def rows(self) -> int:
        return len(self.match)


class CamArray:
    """R x N grid of two-FeFET XOR cells sharing one threshold ladder.

    Contents are held as symbol and per-device offset matrices so searches
    vectorize; ``cell()`` materializes a single MibCell on demand. Matchline
    state persists across searches: NOR rows remember whether the previous
    search discharged them, NAND rows keep every stage level. A fresh array
    starts with all matchlines high (idle state: no query applied, every D
    node low) and every cell storing symbol 0 at zero offset.

    Searches mutate the matchline state and are single-writer; the read-only
    helpers (``mismatch_matrix``, ``margin_matrix``) do not touch state and
    are safe to share across parallel workers.
    """

    def __init__(
        self,
        topology: Topology,
        rows: int,
        cols: int,
        ladder: ThresholdLadder,
        var: VariationModel | None = None,
    ) -> None:
        if rows < 1 or cols < 1:
            raise ValueError(f"array shape {rows}x{cols} must be at least 1x1")
        self.topology = topology
        self.rows = rows
        self.cols = cols
        self.ladder = ladder
        self.var = var
        self._levels = np.asarray(ladder.levels)
        self._wl = np.asarray(ladder.search_levels)
        # Cells start at symbol 0 with zero offset; variation is drawn when
        # words are actually written (or on reprogram).
        self._symbols = np.zeros((rows, cols), dtype=np.int64)
        self._f1_off = np.zeros((rows, cols))
        self._f2_off = np.zeros((rows, cols))
        self._f1_vth = np.empty((rows, cols))
        self._f2_vth = np.empty((rows, cols))
        for r in range(rows):
            self._refresh_row_vth(r)
        # NOR: rows whose ML the previous search left discharged (a fresh
        # array needs a full precharge). NAND: per-stage ML levels.
        self._nor_needs_precharge = np.ones(rows, dtype=bool)
        self._nand_stages = np.ones((rows, cols), dtype=bool)

    @classmethod
    def from_contents(
        cls,
        topology: Topology,
        ladder: ThresholdLadder,
        contents: list[list[int]],
        var: VariationModel | None = None,
    ) -> "CamArray":
        """Build an array holding ``contents`` (one symbol word per row)."""
        if not contents or not contents[0]:
            raise ValueError("contents must hold at least one non-empty word")
        array = cls(topology, len(contents), len(contents[0]), ladder, var)
        for r, word in enumerate(contents):
            array.write_word(r, word)
        return array

    def _refresh_row_vth(self, row: int) -> None:
        num = self.ladder.num_levels
        sym = self._symbols[row]
        self._f1_vth[row] = self._levels[sym] + self._f1_off[row]
        self._f2_vth[row] = self._levels[num - 1 - sym] + self._f2_off[row]

    def write_word(self, row: int, symbols: list[int]) -> None:
        """Re-encode one row; every other row is left bit-identical.

        With a variation model attached, offsets are drawn as one block of
        shape (cols, 2) in C order, i.e. F1 then F2 per cell, left to right.
        """
        if not 0 <= row < self.rows:
            raise ValueError(f"row {row} out of range 0..{self.rows - 1}")
        if len(symbols) != self.cols:
            raise ValueError(
                f"word length {len(symbols)} does not match {self.cols} cells"
            )
        sym = np.asarray(symbols, dtype=np.int64)
        if sym.size and (sym.min() < 0 or sym.max() >= self.ladder.num_levels):
            raise ValueError(
                f"symbols must be in 0..{self.ladder.num_levels - 1}: {symbols}"
            )
        if self.var is not None:
            off = self.var.draw_block((self.cols, 2))
            self._f1_off[row] = off[:, 0]
            self._f2_off[row] = off[:, 1]
        else:
            self._f1_off[row] = 0.0
            self._f2_off[row] = 0.0
        self._symbols[row] = sym
        self._refresh_row_vth(row)

    def reprogram(self, var: VariationModel) -> None:
        """Redraw every device offset (same symbols, fresh variation).

        Offsets come from one block of shape (rows, cols, 2) in C order.
        """
        off = var.draw_block((self.rows, self.cols, 2))
        self._f1_off = off[:, :, 0]
        self._f2_off = off[:, :, 1]
        for r in range(self.rows):
            self._refresh_row_vth(r)

    def stored_word(self, row: int) -> list[int]:
        if not 0 <= row < self.rows:
            raise ValueError(f"row {row} out of range 0..{self.rows - 1}")
        return self._symbols[row].tolist()

    @property
    def contents(self) -> np.ndarray:
        return self._symbols.copy()

    def cell(self, row: int, col: int) -> MibCell:
        """Materialize one cell with its programmed devices."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise ValueError(f"cell ({row},{col}) outside {self.rows}x{self.cols}")
        s = int(self._symbols[row, col])
        num = self.ladder.num_levels
        f1 = FefetInstance(
            level_index=s + 1,
            vth_offset=float(self._f1_off[row, col]),
            effective_vth=float(self._f1_vth[row, col]),
        )
        f2 = FefetInstance(
            level_index=num - s,
            vth_offset=float(self._f2_off[row, col]),
            effective_vth=float(self._f2_vth[row, col]),
        )
        return MibCell(bits=self.ladder.bits, stored_symbol=s, f1=f1, f2=f2)

    def _query_drives(self, query: list[int]) -> tuple[np.ndarray, np.ndarray]:
        if len(query) != self.cols:
            raise ValueError(
                f"query length {len(query)} does not match {self.cols} cells"
            )
        q = np.asarray(query, dtype=np.int64)
        num = self.ladder.num_levels
        if q.min() < 0 or q.max() >= num:
            raise ValueError(f"query symbols must be in 0..{num - 1}: {query}")
        # Source-referenced gate drives; the +v_sl/-v_sl pair cancels here.
        return self._wl[q], self._wl[num - 1 - q]

    def mismatch_matrix(self, query: list[int]) -> np.ndarray:
        """Boolean (rows, cols) matrix: True where a cell's D node goes high.

        Pure read-only evaluation; matchline state is not consulted or
        updated.
        """
        g1, g2 = self._query_drives(query)
        return (g1[None, :] > self._f1_vth) | (g2[None, :] > self._f2_vth)

    def margin_matrix(self, query: list[int]) -> np.ndarray:
        """(rows, cols, 2) signed conduction margins of every device.

        Expected-on devices (F1 where query > stored, F2 where query <
        stored) contribute drive minus threshold; expected-off devices the
        reverse. Positive means the device decides correctly.
        """
        g1, g2 = self._query_drives(query)
        q = np.asarray(query, dtype=np.int64)[None, :]
        on1 = q > self._symbols
        on2 = q < self._symbols
        m1 = np.where(on1, g1[None, :] - self._f1_vth, self._f1_vth - g1[None, :])
        m2 = np.where(on2, g2[None, :] - self._f2_vth, self._f2_vth - g2[None, :])
        return np.stack([m1, m2], axis=2)

    def search_nor(self, query: list[int]) -> SearchReport:
        """Precharge-then-discharge search of every word in parallel.

        A row's matchline discharges iff at least one of its cells
        mismatches. Only rows left discharged by the previous search consume
        a precharge event (the first search precharges all of them).
        """
        if self.topology is not Topology.NOR_1T:
            raise ValueError(f"topology mismatch: array is {self.topology.value}")
        mism = self.mismatch_matrix(query)
        row_mismatch = mism.any(axis=1)
        precharge = int(self._nor_needs_precharge.sum())
        self._nor_needs_precharge = row_mismatch.copy()
        return SearchReport(
            match=(~row_mismatch).tolist(),
            match_count=(self.cols - mism.sum(axis=1)).tolist(),
            precharge_events=precharge,
            discharge_events=int(row_mismatch.sum()),
            conducting_cells=int(mism.sum()),
        )

    def search_nand(self, query: list[int]) -> SearchReport:
        """Chained-stage search; a word matches iff its last stage ends high.

        Stage i is charged iff its supply rail ML_{i-1} rises low-to-high
        this search while all earlier stages sit at match level; the rail of
        the first stage is the supply itself and never transitions. Stage
        levels persist so an identical repeated search charges nothing.
        Discharge events count rows with at least one falling stage.
        """
        if self.topology is not Topology.NAND_2T:
            raise ValueError(f"topology mismatch: array is {self.topology.value}")
        mism = self.mismatch_matrix(query)
        matches = ~mism
        new_stages = np.logical_and.accumulate(matches, axis=1)
        rising = ~self._nand_stages & new_stages
        falling = self._nand_stages & ~new_stages
        # A rise of stage i-1 (column index i-2) charges stage i; the last
        # stage's own rise feeds no further stage. The chain property makes
        # the all-earlier-stages-at-match condition implicit in the rise.
        precharge = int(rising[:, : self.cols - 1].sum())
        self._nand_stages = new_stages
        return SearchReport(
            match=new_stages[:, -1].tolist(),
            match_count=matches.sum(axis=1).tolist(),
            precharge_events=precharge,
            discharge_events=int(falling.any(axis=1).sum()),
            conducting_cells=int(mism.sum()),
        )

    def search(self, query: list[int]) -> SearchReport:
        """Dispatch to the engine matching this array's topology."""
        if self.topology is Topology.NOR_1T:
            return self.search_nor(query)
        return self.search_nand(query)


def write_contents_csv(array: CamArray, path: str | Path) -> None:
    """Dump stored symbols, one word per CSV row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for r in range(array.rows):
            writer.writerow(array.stored_word(r))


def read_contents_csv(path: str | Path) -> list[list[int]]:
    """Load symbol words from CSV; rows must be equal-length integer lists."""
    contents: list[list[int]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                word = [int(tok) for tok in row]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer symbol") from exc
            if contents and len(word) != len(contents[0]):
                raise ValueError(
                    f"{path}:{lineno}: word length {len(word)} != {len(contents[0])}"
                )
            contents.append(word)
    if not contents:
        raise ValueError(f"{path}: no words found")
    return contents
