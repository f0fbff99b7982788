"""Published CAM design comparison figures, kept verbatim for reporting.

These rows are reference data only: nothing here is simulated. The two
simulated topologies appear with the published per-bit search energy and
latency endpoints (evaluated at 32 cells per word, 3 bits per cell) that the
cost-model calibration reproduces. Area figures are reported as constants.
"""

from __future__ import annotations

from dataclasses import dataclass

# Operating point of the published endpoint figures.
PUBLISHED_CELLS_PER_WORD = 32
PUBLISHED_BITS = 3

# Endpoints for the two simulated topologies (J per bit, seconds).
NOR_ENERGY_PER_BIT = 0.06e-15
NOR_LATENCY = 371.8e-12
NAND_ENERGY_PER_BIT = 0.039e-15
NAND_LATENCY = 2040e-12


@dataclass(frozen=True)
class PublishedCamDesign:
    """One row of the published design comparison."""

    label: str
    device: str
    cell_structure: str
    cam_type: str
    energy_fj_per_bit: float | None
    latency_ps: float | None
    area_um2_per_bit: float | None
    node_nm: str


PUBLISHED_DESIGNS: tuple[PublishedCamDesign, ...] = (
    PublishedCamDesign("16T CMOS", "CMOS", "16T", "BCAM", 0.59, 582.4, 1.12, "-/45"),
    PublishedCamDesign("2T-1FeFET", "FeFET", "2T-1FeFET", "BCAM", 0.116, 401.4, 0.36, "45/45"),
    PublishedCamDesign("2FeFET TCAM", "FeFET", "2FeFET", "TCAM", 0.40, 360.0, 0.15, "45/-"),
    PublishedCamDesign("2FeFET-1T TCAM (precharge)", "FeFET", "2FeFET-1T", "TCAM", 0.195, 252.8, 0.36, "45/45"),
    PublishedCamDesign("2FeFET-2T TCAM (precharge-free)", "FeFET", "2FeFET-2T", "TCAM", 0.073, 1430.0, 0.44, "45/45"),
    PublishedCamDesign("2T-2R PCM", "PCM", "2T-2R", "TCAM", 0.55, 350.6, 0.41, "90/90"),
    PublishedCamDesign("6T-2R ReRAM", "ReRAM", "6T-2R", "ACAM", 0.52, 110.0, 0.51, "50/180"),
    PublishedCamDesign("2FeFET MCAM/ACAM", "FeFET", "2FeFET", "MCAM/ACAM", 0.182, None, 0.05, "45/45"),
    PublishedCamDesign("2FeFET-1T MCAM (two-branch)", "FeFET", "2FeFET-1T", "MCAM", 0.292, 422.0, 0.03, "28/-"),
    PublishedCamDesign("2FeFET-1T MCAM (NOR, simulated)", "FeFET", "2FeFET-1T", "MCAM", 0.06, 371.8, 0.12, "45/40"),
    PublishedCamDesign("2FeFET-2T MCAM (NAND, simulated)", "FeFET", "2FeFET-2T", "MCAM", 0.039, 2040.0, 0.146, "45/40"),
)
