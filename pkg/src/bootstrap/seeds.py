"""Seeds derive as base_seed + a stable per-stage offset + an index.

Field replica r uses derive_seed(base, "field", r) == base + r.
"""
STAGE_OFFSETS = {
    "field": 0,
    "point": 100_000,
    "paths": 200_000,
    "bridges": 300_000,
    "control": 400_000,
    "berry": 500_000,
}


def derive_seed(base_seed: int, stage: str, index: int = 0) -> int:
    return int(base_seed) + STAGE_OFFSETS[stage] + int(index)
