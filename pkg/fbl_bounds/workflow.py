import asyncio
import logging

from pydantic_graph import Graph

from .logging_config import ensure_logging_configured
from .state import SweepState
from .steps import EvaluatePoints, InitSweep, NextPoint, WriteTable
from .sweep_config import SweepConfig

logger = logging.getLogger(__name__)


def build_graph() -> Graph:
    return Graph(
        nodes=[InitSweep, NextPoint, EvaluatePoints, WriteTable],
        state_type=SweepState,
    )


async def run_sweep(state: SweepState) -> SweepState:
    ensure_logging_configured()

    graph = build_graph()
    result = await graph.run(start_node=InitSweep(), state=state)
    return result.state if hasattr(result, "state") else result


def run_sweep_sync(config: SweepConfig) -> SweepState:
    return asyncio.run(run_sweep(SweepState(config=config)))
