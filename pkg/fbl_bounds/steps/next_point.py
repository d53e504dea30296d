from __future__ import annotations

from pydantic_graph import BaseNode, End, GraphRunContext


class NextPoint(BaseNode):
    async def run(self, ctx: GraphRunContext) -> BaseNode | End:
        if not ctx.state.pending:
            from .write_table import WriteTable

            return WriteTable()
        size = ctx.state.config.threads
        batch, ctx.state.pending = ctx.state.pending[:size], ctx.state.pending[size:]
        from .evaluate import EvaluatePoints

        return EvaluatePoints(indices=tuple(batch))
