from __future__ import annotations

import logging

from pydantic_graph import BaseNode, End, GraphRunContext

from fbl_bounds.channels import make_spec

logger = logging.getLogger(__name__)


class InitSweep(BaseNode):
    async def run(self, ctx: GraphRunContext) -> BaseNode | End:
        config = ctx.state.config
        # fail fast on bad channel parameters before any point is evaluated
        first = config.point(0)
        make_spec(config.channel, **first["params"])
        ctx.state.pending = list(range(len(config.grid)))
        logger.info(
            "[init] channel=%s axis=%s points=%s kinds=%s method=%s threads=%s",
            config.channel,
            config.axis,
            len(config.grid),
            ",".join(k.value for k in config.kinds),
            config.method.value,
            config.threads,
        )
        from .next_point import NextPoint

        return NextPoint()
