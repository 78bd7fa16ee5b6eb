import json
import os
import pathlib

import pytest

import cnnfpga

DATA = pathlib.Path(os.environ.get("CNNFPGA_DATA", pathlib.Path(__file__).parents[2] / "data"))
NET = str(DATA / "networks" / "alexnet.json")
PLATFORM = str(DATA / "platforms" / "zcu102.json")


def test_dsp():
    assert cnnfpga.dsp_usage(8, 32, "float32") == 1280
    assert cnnfpga.dsp_usage(64, 20) == 1280


def test_latency_matches_simulator():
    layer = cnnfpga.Layer("conv5", 1, 256, 192, 13, 13, 3)
    model = cnnfpga.latency(layer, (64, 20, 7, 13), partition=(1, 2, 1, 1))
    sim = cnnfpga.simulate(layer, (64, 20, 7, 13), partition=(1, 2, 1, 1))
    assert model["cycles"] == sim["cycles"]
    assert model["bottleneck"] == sim["bottleneck"] == "Compute"
    baseline = cnnfpga.latency(layer, (64, 20, 7, 13), partition=(1, 2, 1, 1), xfer=False)
    assert baseline["cycles"] >= model["cycles"]


def test_network_and_report():
    layers = cnnfpga.load_network(NET)
    assert [l.name for l in layers] == ["conv1", "conv2", "conv3", "conv4", "conv5"]
    report = json.loads(cnnfpga.model_report(NET, PLATFORM, (64, 7, 7, 14), partition=(2, 1, 2, 1)))
    assert report["totals"]["cycles"] == 2214359
    assert report["assumptions"]["precision"] == "fixed16"


def test_optimize_layer():
    layer = cnnfpga.Layer("l", 1, 32, 16, 8, 8, 3)
    best = cnnfpga.optimize_layer(layer, PLATFORM, fpgas=2)
    assert best["cycles"] > 0
    check = cnnfpga.latency(layer, best["tile"], best["ports"], partition=best["partition"])
    assert check["cycles"] == best["cycles"]


def test_errors():
    layer = cnnfpga.Layer("l", 1, 8, 8, 8, 8, 3)
    with pytest.raises(cnnfpga.InfeasibleDesign):
        cnnfpga.latency(layer, (0, 1, 1, 1))
    with pytest.raises(ValueError):
        cnnfpga.load_network("/nonexistent.json")


def test_stream_rate():
    assert cnnfpga.torus_stream_rate((4, 1, 1, 4)) == 96
