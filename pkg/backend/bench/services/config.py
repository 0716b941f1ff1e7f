"""
Turning a BenchConfig into datasets and forward-model geometry.
"""

import logging
from typing import NamedTuple, Optional

from core.exceptions import IcaBenchError, ShapeMismatchError
from bench.domain import BenchConfig, DatasetSource
from dipfit.domain import HeadModel, Montage
from dipfit.services.montage_io import cap_montage, load_head_model, load_montage
from signals.domain import Dataset, GroundTruth
from signals.services.dataset_io import load_dataset
from signals.services.synthesis import synth_dataset

logger = logging.getLogger(__name__)


class LoadedDataset(NamedTuple):
    source: DatasetSource
    dataset: Optional[Dataset]
    ground_truth: Optional[GroundTruth]
    error: Optional[dict]


def materialize(source: DatasetSource):
    """Load or synthesize one dataset; returns (Dataset, GroundTruth or None)."""
    if source.synth is not None:
        dataset, ground_truth = synth_dataset(source.synth)
        if dataset.id != source.id:
            dataset = dataset.with_data(dataset.data, id=source.id)
        return dataset, ground_truth
    return load_dataset(source.path, format=source.format, srate=source.srate, dataset_id=source.id), None


def load_datasets(cfg: BenchConfig):
    """
    Materialize every configured dataset in config order.

    A dataset that fails to load is kept as an error record so that all of
    its cells can be reported as failed.
    """
    loaded = []
    for source in cfg.datasets:
        try:
            dataset, ground_truth = materialize(source)
            loaded.append(LoadedDataset(source, dataset, ground_truth, None))
        except IcaBenchError as e:
            logger.warning('Dataset %s failed to load: [%s] %s', source.id, e.code, e.detail)
            loaded.append(LoadedDataset(source, None, None, e.as_record()))
    return loaded


def head_model(cfg: BenchConfig) -> HeadModel:
    return load_head_model(cfg.head_model) if cfg.head_model else HeadModel.default()


def montage_for(cfg: BenchConfig, dataset: Dataset, head: HeadModel) -> Montage:
    """
    The configured montage, or the synthetic cap that generated dipolar data.

    Raises:
        ShapeMismatchError: Montage and dataset disagree on the channel count
    """
    if cfg.montage:
        montage = load_montage(cfg.montage, exclude=cfg.exclude)
    else:
        montage = cap_montage(dataset.n_channels, radius=head.outer_radius)
    if montage.n_electrodes != dataset.n_channels:
        raise ShapeMismatchError(
            f'Montage has {montage.n_electrodes} electrodes, dataset {dataset.id} has '
            f'{dataset.n_channels} channels', expected=dataset.n_channels)
    return montage
