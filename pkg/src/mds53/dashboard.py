"""
pandas tables behind the streamlit dashboard (app.py).
"""

from __future__ import annotations

import pandas as pd

from mds53.construction import ALL_NODES, K, ALPHA, CodeInstance
from mds53.oracle import ParamCensus
from mds53.repair import make_repair_plan, min_repair_bandwidth
from mds53.store import Cluster, StripeLayout


def node_table(cluster: Cluster) -> pd.DataFrame:
    rows = []
    for node in cluster.nodes:
        rows.append(
            {
                "node": node.node_id,
                "role": node.role,
                "status": node.status,
                "bytes_on_disk": node.path.stat().st_size if node.path.exists() else 0,
                "file": node.path.name,
            }
        )
    return pd.DataFrame(rows)


def plan_table(inst: CodeInstance) -> pd.DataFrame:
    """One row per (failed node, helper): what the helper sends and how it is cancelled."""
    render = inst.field.render
    rows = []
    for failed in ALL_NODES:
        plan = make_repair_plan(failed, inst)
        for helper, vec in plan.downloads.items():
            cancel = plan.cancel.get(helper)
            rows.append(
                {
                    "failed": failed,
                    "family": plan.family,
                    "helper": helper,
                    "helper_role": "mixed" if helper in plan.mixed else "basis",
                    "download": f"[{render(vec.x)}, {render(vec.y)}]",
                    "cancel": "" if cancel is None else f"{render(cancel[0])}, {render(cancel[1])}",
                }
            )
    return pd.DataFrame(rows)


def bandwidth_table(layout: StripeLayout) -> pd.DataFrame:
    """Bytes moved to rebuild each node: optimal plan vs reading three whole nodes."""
    optimal = int(min_repair_bandwidth()) * layout.symbol_size * layout.stripe_count
    naive = K * ALPHA * layout.symbol_size * layout.stripe_count
    return pd.DataFrame(
        [
            {"node": n, "optimal_bytes": optimal, "full_decode_bytes": naive, "ratio": optimal / naive}
            for n in ALL_NODES
        ]
    )


def census_table(census: ParamCensus) -> pd.DataFrame:
    return census.to_frame()
