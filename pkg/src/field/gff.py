from typing import Iterable, List

import numpy as np

from src.field.schema import CovarianceModel, FieldSample


def sample_gff(model: CovarianceModel, seed: int) -> FieldSample:
    """h = L z with z standard normal from default_rng(seed)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(model.factor.shape[0])
    return FieldSample(values=model.factor @ z, seed=int(seed), model=model)


def sample_gff_batch(model: CovarianceModel, seeds: Iterable[int]) -> List[FieldSample]:
    return [sample_gff(model, seed) for seed in seeds]
