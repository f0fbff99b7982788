"""Two-FeFET multi-bit XOR cell: encoding and match evaluation.

A cell stores one symbol in a pair of devices programmed to complementary
levels (F1 at symbol+1, F2 at L-symbol). A query drives both gates with
complementary search voltages; the shared drain node D stays low iff the
queried symbol equals the stored one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .device import (
    FefetInstance,
    ThresholdLadder,
    VariationModel,
    conducts,
    program,
)


class Level(IntEnum):
    """Logic level of the cell output node D."""

    LOW = 0
    HIGH = 1


@dataclass(frozen=True)
class MibCell:
    """One stored symbol realized as a complementary device pair."""

    bits: int
    stored_symbol: int
    f1: FefetInstance
    f2: FefetInstance


@dataclass(frozen=True)
class QueryDrive:
    """Gate voltages encoding one query symbol.

    Gates carry the sourceline bias on top of the search levels
    (gate_f1 = V_WL(symbol+1) + v_sl, gate_f2 = V_WL(L-symbol) + v_sl);
    evaluation subtracts v_sl again, so the match decision does not depend
    on the rail value.
    """

    bits: int
    symbol: int
    gate_f1: float
    gate_f2: float
    v_sl: float


def _check_symbol(symbol: int, ladder: ThresholdLadder) -> None:
    if not 0 <= symbol < ladder.num_levels:
        raise ValueError(
            f"symbol {symbol} out of range 0..{ladder.num_levels - 1}"
        )


def encode_store(
    symbol: int,
    ladder: ThresholdLadder,
    var: VariationModel | None = None,
) -> MibCell:
    """Program a cell to hold ``symbol``; F1 is drawn before F2."""
    _check_symbol(symbol, ladder)
    num = ladder.num_levels
    return MibCell(
        bits=ladder.bits,
        stored_symbol=symbol,
        f1=program(ladder, symbol + 1, var),
        f2=program(ladder, num - symbol, var),
    )


def encode_query(symbol: int, ladder: ThresholdLadder) -> QueryDrive:
    """Gate drive pair searching for ``symbol``."""
    _check_symbol(symbol, ladder)
    num = ladder.num_levels
    return QueryDrive(
        bits=ladder.bits,
        symbol=symbol,
        gate_f1=ladder.search_level(symbol + 1) + ladder.v_sl,
        gate_f2=ladder.search_level(num - symbol) + ladder.v_sl,
        v_sl=ladder.v_sl,
    )


def evaluate(cell: MibCell, drive: QueryDrive) -> Level:
    """Output level of node D: HIGH iff either device conducts (mismatch)."""
    if cell.bits != drive.bits:
        raise ValueError(
            f"cell width {cell.bits} bits does not match drive width {drive.bits}"
        )
    on_f1 = conducts(cell.f1, drive.gate_f1 - drive.v_sl)
    on_f2 = conducts(cell.f2, drive.gate_f2 - drive.v_sl)
    return Level.HIGH if (on_f1 or on_f2) else Level.LOW


def conduction_margins(cell: MibCell, drive: QueryDrive) -> tuple[float, float]:
    """Signed decision headroom of (F1, F2) for this drive.

    A device expected to conduct at zero variation (F1 when query > stored,
    F2 when query < stored) contributes drive minus threshold; an expected-off
    device contributes threshold minus drive. Positive means the device
    behaves as designed, negative that variation has flipped it.
    """
    if cell.bits != drive.bits:
        raise ValueError(
            f"cell width {cell.bits} bits does not match drive width {drive.bits}"
        )
    gs1 = drive.gate_f1 - drive.v_sl
    gs2 = drive.gate_f2 - drive.v_sl
    q, s = drive.symbol, cell.stored_symbol
    m1 = gs1 - cell.f1.effective_vth if q > s else cell.f1.effective_vth - gs1
    m2 = gs2 - cell.f2.effective_vth if q < s else cell.f2.effective_vth - gs2
    return m1, m2
