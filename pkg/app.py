"""
Streamlit dashboard for an mds53 cluster directory.

Run:  streamlit run app.py
"""

import sys
from pathlib import Path

import pandas as pd
import plotly.express as px
import streamlit as st

sys.path.insert(0, str(Path(__file__).parent / "src"))

from mds53 import config  # noqa: E402
from mds53.construction import CodeParams, canonical_params, make_instance, rank_profile  # noqa: E402
from mds53.dashboard import bandwidth_table, census_table, node_table, plan_table  # noqa: E402
from mds53.errors import MDSError  # noqa: E402
from mds53.galois import field_by_name  # noqa: E402
from mds53.oracle import enumerate_valid_params  # noqa: E402
from mds53.store import open_cluster  # noqa: E402


# Helpers
@st.cache_data
def load_census(field_name: str) -> pd.DataFrame:
    """Valid parameter tuples of a field (cached, the GF(16) census takes a moment)."""
    return census_table(enumerate_valid_params(field_by_name(field_name)))


@st.cache_data
def load_plans(params_text: str) -> pd.DataFrame:
    return plan_table(make_instance(CodeParams.parse(params_text)))


# Page
st.set_page_config(page_title="mds53 cluster", layout="wide")
st.title("mds53: (5,3) MDS storage with optimal repair")
st.caption("Five nodes, two symbols each, any three rebuild the file, any one node repairs from four symbols.")

st.sidebar.header("Cluster")
default_dir = config.default_cluster_dir()
dir_text = st.sidebar.text_input("Cluster directory", value=str(default_dir) if default_dir else "")
field_name = st.sidebar.selectbox("Census field", ["gf4", "gf8", "gf16"])

cluster = None
if dir_text:
    try:
        cluster = open_cluster(Path(dir_text))
    except MDSError as exc:
        st.sidebar.warning(f"Cannot open cluster: {exc}")

inst = cluster.inst if cluster is not None else make_instance(canonical_params())

# Node status
if cluster is not None:
    st.subheader("Nodes")
    nodes = node_table(cluster)
    c1, c2, c3, c4 = st.columns(4)
    c1.metric("Healthy nodes", len(cluster.healthy_nodes()))
    c2.metric("Stripes", cluster.layout.stripe_count)
    c3.metric("Symbol size", f"{cluster.layout.symbol_size} B")
    c4.metric("Storage overhead", "5/3")
    st.dataframe(nodes, use_container_width=True)

    down = cluster.failed_nodes()
    if len(down) == 1:
        st.warning(f"Node {down[0]} is down. Run: python -m mds53 repair --dir {dir_text} --node {down[0]}")
    elif len(down) > 1:
        st.error(f"Nodes {down} are down. Single-node repair is not possible; reconstruct instead.")

    st.divider()
    st.subheader("Repair traffic per node")
    bw = bandwidth_table(cluster.layout)
    long = bw.melt(id_vars="node", value_vars=["optimal_bytes", "full_decode_bytes"], var_name="method", value_name="bytes")
    fig = px.bar(long, x="node", y="bytes", color="method", barmode="group")
    st.plotly_chart(fig, use_container_width=True)
else:
    st.info("Point the sidebar at a directory written by `python -m mds53 encode` to see node status.")

st.divider()

# Code
st.subheader("Code parameters")
st.code(inst.params.serialize())
left, right = st.columns(2)
with left:
    st.markdown("**Coefficient matrices**")
    for name, a in zip(("A1", "A2", "A3"), inst.matrices):
        st.text(f"{name}\n{a.render()}")
with right:
    st.markdown("**Ranks**")
    st.dataframe(pd.DataFrame([rank_profile(inst)]), use_container_width=True)

st.subheader("Repair plans")
st.dataframe(load_plans(inst.params.serialize()), use_container_width=True)

st.divider()
st.subheader(f"Valid parameters over {field_name.upper()}")
census = load_census(field_name)
st.metric("Valid tuples", len(census))
st.dataframe(census, use_container_width=True)
