from __future__ import annotations

import csv
import io
import json
import logging
from typing import Any, Dict, List

from pydantic_graph import BaseNode, End, GraphRunContext

from fbl_bounds.sweep_config import SweepConfig

logger = logging.getLogger(__name__)

_TRAILING = ["n", "rate", "pe", "value", "lower", "upper", "certified", "method", "error"]


def table_columns(config: SweepConfig) -> List[str]:
    columns = ["index", config.axis, "kind"]
    columns += [c for c in _TRAILING if c != config.axis]
    if config.timing:
        columns.append("wall_ms")
    return columns


def sorted_rows(config: SweepConfig, rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    order = {kind.value: i for i, kind in enumerate(config.kinds)}
    return sorted(rows, key=lambda r: (r["index"], order.get(r["kind"], len(order))))


def render_table(config: SweepConfig, rows: List[Dict[str, Any]]) -> str:
    columns = table_columns(config)
    rows = sorted_rows(config, rows)
    if config.format == "json":
        records = [{c: row.get(c) for c in columns} for row in rows]
        return json.dumps(records, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: "" if row.get(c) is None else row.get(c) for c in columns})
    return buffer.getvalue()


class WriteTable(BaseNode):
    async def run(self, ctx: GraphRunContext) -> BaseNode | End:
        config = ctx.state.config
        text = render_table(config, ctx.state.rows)
        if config.output_path is None:
            ctx.state.table = text
            logger.info("[write] rows=%s kept on state", len(ctx.state.rows))
            return End(None)
        config.output_path.parent.mkdir(parents=True, exist_ok=True)
        config.output_path.write_text(text, encoding="utf-8")
        ctx.state.written = config.output_path
        logger.info(
            "[write] rows=%s errors=%s path=%s",
            len(ctx.state.rows),
            len(ctx.state.errors),
            config.output_path,
        )
        return End(None)
