import streamlit as st
from dotenv import load_dotenv
from typing import List

from covstat.config import BOLTZMANN_MEV_PER_K, get_settings, load_species_table, volume_from_fm3
from covstat.errors import CovstatError
from covstat.partition import ApproachKind, GasSpec
from covstat.specfun import gauss_laguerre_rule
from covstat.tables import figure1_table, ordering_holds, table1_summary, thermo_table
from covstat.utils import make_grid, validate_grid

load_dotenv(override=True)

st.set_page_config(
    page_title="Covariant Gas Explorer",
    page_icon="🌌",
    layout="wide"
)

CUSTOM_CSS = """
<style>
@import url('https://fonts.googleapis.com/css2?family=Space+Grotesk:wght@400;500;600;700&display=swap');

:root {
  --accent: #0ccffa;
  --panel-bg: rgba(6, 16, 28, 0.55);
  --panel-border: rgba(12, 207, 250, 0.25);
  --text-muted: #94a9a0;
}

.stApp {
  font-family: 'Space Grotesk', sans-serif;
}

.glass-panel {
  background: var(--panel-bg);
  border: 1px solid var(--panel-border);
  border-radius: 14px;
  padding: 1.2rem 1.4rem;
  margin-bottom: 1rem;
}

.hero-label {
  color: var(--accent);
  letter-spacing: 0.2em;
  font-size: 0.8rem;
}

.subline {
  color: var(--text-muted);
}
</style>
"""

st.markdown(CUSTOM_CSS, unsafe_allow_html=True)

APPROACH_DISPLAY = {kind.value: kind.label for kind in ApproachKind}


@st.cache_data(show_spinner=False)
def cached_figure1(beta_min: float, beta_max: float, points: int, log_spaced: bool, approaches: List[str], order: int):
    grid = make_grid(beta_min, beta_max, points, log_spaced)
    return figure1_table(grid, approaches, gauss_laguerre_rule(order), workers=get_settings().workers)


@st.cache_data(show_spinner=False)
def cached_thermo(n: int, mass: float, volume_fm3: float, temperatures: List[float], approaches: List[str], order: int, subtract: bool):
    gas = GasSpec(n_particles=n, mass=mass, volume=volume_from_fm3(volume_fm3))
    return thermo_table(gas, approaches, temperatures, gauss_laguerre_rule(order), subtract, get_settings().workers)


@st.cache_data(show_spinner=False)
def cached_table1(n: int, mass: float, volume_fm3: float, temperature_k: float, order: int):
    gas = GasSpec(n_particles=n, mass=mass, volume=volume_from_fm3(volume_fm3))
    return table1_summary(gas, BOLTZMANN_MEV_PER_K * temperature_k, gauss_laguerre_rule(order))


st.markdown(
    """
    <div class="glass-panel hero">
        <div class="hero-label">COVARIANT STATISTICS</div>
        <h1>Relativistic Perfect Gas Explorer</h1>
        <p class="subline">Compare the generic quantity Y and the thermodynamics of the four phase-space treatments.</p>
    </div>
    """,
    unsafe_allow_html=True,
)

species = load_species_table()

with st.sidebar:
    st.header("Gas")
    symbol = st.selectbox("Species", list(species), key="species_select")
    mass = st.number_input("Rest mass (MeV)", value=float(species[symbol]), min_value=1e-6, format="%.4f")
    n_particles = st.number_input("Particles N", value=1000, min_value=1, step=1)
    volume_fm3 = st.number_input("Volume (fm^3)", value=1e6, min_value=1e-3, format="%.3e")
    order = st.slider("Gauss-Laguerre order", min_value=1, max_value=128, value=get_settings().quadrature_order)
    selected = st.multiselect(
        "Approaches",
        options=list(APPROACH_DISPLAY),
        default=list(APPROACH_DISPLAY),
        format_func=lambda key: APPROACH_DISPLAY[key],
    )

if not selected:
    st.error("Select at least one approach.")
    st.stop()

figure_tab, thermo_tab, table_tab = st.tabs(["Y versus beta*m", "Thermodynamics", "Ultra-relativistic limit"])

with figure_tab:
    cols = st.columns(4)
    beta_min = cols[0].number_input("beta*m min", value=0.01, min_value=1e-6, format="%.4g")
    beta_max = cols[1].number_input("beta*m max", value=1000.0, min_value=1e-6, format="%.4g")
    points = cols[2].number_input("Points", value=50, min_value=1, step=1)
    log_spaced = cols[3].checkbox("Log spaced", value=True)

    check = validate_grid(beta_min, beta_max, int(points))
    if not check["is_valid"]:
        st.error(check["message"])
    else:
        with st.spinner("Evaluating Y/m^3..."):
            result = cached_figure1(beta_min, beta_max, int(points), log_spaced, selected, order)
        st.dataframe(result.frame, use_container_width=True)
        if {"y_full", "y_semi", "y_juttner"} <= set(result.frame.columns):
            if ordering_holds(result.frame):
                st.success("Juttner > semi-covariant > full covariant on every row with beta*m <= 0.1")
            else:
                st.warning("Ordering at high temperature is violated on this grid")
        for note in result.metadata["warnings"]:
            st.warning(note)

with thermo_tab:
    cols = st.columns(3)
    t_low = cols[0].number_input("T min (K)", value=1e11, min_value=1.0, format="%.3e")
    t_high = cols[1].number_input("T max (K)", value=1e13, min_value=1.0, format="%.3e")
    t_points = cols[2].number_input("Temperatures", value=10, min_value=1, step=1)
    subtract = st.checkbox("Subtract rest mass from <E> and F", value=False)

    check = validate_grid(t_low, t_high, int(t_points))
    if not check["is_valid"]:
        st.error(check["message"])
    else:
        temperatures = [float(t) for t in make_grid(t_low, t_high, int(t_points), True)]
        try:
            with st.spinner("Computing thermodynamics..."):
                result = cached_thermo(int(n_particles), mass, volume_fm3, temperatures, selected, order, subtract)
            st.dataframe(result.frame, use_container_width=True)
        except CovstatError as exc:
            st.error(f"Evaluation failed: {exc}")

with table_tab:
    temperature_k = st.number_input("Temperature (K)", value=1e13, min_value=1.0, format="%.3e")
    try:
        with st.spinner("Evaluating closed forms..."):
            summary = cached_table1(int(n_particles), mass, volume_fm3, temperature_k, order)
    except CovstatError as exc:
        st.error(f"Evaluation failed: {exc}")
    else:
        cols = st.columns(len(summary))
        for idx, (key, entry) in enumerate(summary.items()):
            with cols[idx]:
                closed = entry["closed_form"]
                st.metric(label=APPROACH_DISPLAY[key], value=f"<E> = {closed['avg_energy_over_NkT']:.0f} NkT",
                          delta=f"c_V = {closed['specific_heat_over_Nk']:.0f} Nk")
                deviation = max(entry["relative_deviation"].values())
                st.caption(f"numeric check at beta*m = 1e-4 deviates by {deviation:.2e}")
