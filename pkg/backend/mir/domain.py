"""
Domain types for mutual information reduction.
"""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class MIRReport:
    """
    Mutual information removed by an unmixing matrix.

    Attributes:
        mir_bits_per_sample: log_det_W + sum_h_x - sum_h_y
        mir_kbits_per_sec: mir_bits_per_sample * srate / 1000
        log_det_W: log2 |det W| (half log2 det W W^T when rank reduced)
        sum_h_x: Sum of channel differential entropies (bits)
        sum_h_y: Sum of component differential entropies (bits)
        B: Bins requested
        strategy: Edge strategy
        dataset_id, algorithm_id: Provenance
        mean_removed: Channel means removed before evaluation
        rank_reduced: W has fewer rows than channels
    """
    mir_bits_per_sample: float
    mir_kbits_per_sec: float
    log_det_W: float
    sum_h_x: float
    sum_h_y: float
    B: int
    strategy: str
    dataset_id: str = ''
    algorithm_id: str = ''
    mean_removed: bool = True
    rank_reduced: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RemnantPMI:
    """
    Mean component PMI as a percentage of mean channel PMI.

    Means run over all n^2 entries, zero diagonal included.
    """
    channel_mean_pmi: float
    component_mean_pmi: float
    percent: float
    B: int = 0
    strategy: str = ''

    def to_dict(self) -> dict:
        return asdict(self)
