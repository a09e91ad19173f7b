from .base import BaseExperimentStrategy
from .heattrace import HeatTraceStrategy
from .kpz import KpzStrategy
from .lbm import LbmStrategy
from .que import QueStrategy
from .spacing import SpacingStrategy
from .spectrum import SpectrumStrategy
from .weyl import WeylStrategy

STRATEGY_REGISTRY = {
    strategy.command: strategy
    for strategy in (SpectrumStrategy, WeylStrategy, HeatTraceStrategy, SpacingStrategy,
                     QueStrategy, LbmStrategy, KpzStrategy)
}

__all__ = ['BaseExperimentStrategy', 'STRATEGY_REGISTRY', 'SpectrumStrategy', 'WeylStrategy', 'HeatTraceStrategy',
           'SpacingStrategy', 'QueStrategy', 'LbmStrategy', 'KpzStrategy']
