"""Latency model, simulator and design search for CNN accelerators on FPGA clusters."""

from ._core import (  # noqa: F401
    InfeasibleDesign,
    Layer,
    NoFeasibleDesign,
    ParseError,
    SimulationFault,
    dsp_usage,
    latency,
    load_network,
    model_report,
    optimize_layer,
    simulate,
    torus_stream_rate,
)
