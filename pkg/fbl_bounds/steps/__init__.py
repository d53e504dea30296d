from .evaluate import EvaluatePoints
from .init import InitSweep
from .next_point import NextPoint
from .write_table import WriteTable

__all__ = [
    "EvaluatePoints",
    "InitSweep",
    "NextPoint",
    "WriteTable",
]
