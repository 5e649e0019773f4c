"""Central tolerance configuration for all geometric feature extraction."""

from dataclasses import dataclass


@dataclass(frozen=True)
class GeometryTolerances:
    # coaxial grouping, endpoint coincidence, antiparallel-normal test
    group_mm: float = 1e-6
    # thickness-distance binning; circle-endpoint on-curve check
    bin_mm: float = 1e-3
    # exclusive upper bound for plate-thickness candidate distances
    thickness_cap_mm: float = 100.0
    # minimum vector norm accepted for normalization
    direction_eps: float = 1e-9


TOLERANCES = GeometryTolerances()
