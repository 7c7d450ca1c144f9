import json
import os
import pathlib

import pytest

import ddoscope

DATA = pathlib.Path(os.environ.get("DDOSCOPE_TEST_DATA", pathlib.Path(__file__).parents[2] / "tests" / "data"))

SCENARIO = {
    "seed": 3,
    "start_date": "2021-03-01",
    "duration_s": 3600,
    "telescope": {"n_addresses": 12582912},
    "honeypot_sensors": ["203.0.113.1", "203.0.113.2", "203.0.113.3"],
    "attacks": [
        {"type": "rsdos", "victim": "198.51.100.7", "start_s": 300, "duration_s": 600, "rate_pps": 5000},
        {"type": "reflection", "victim": "192.0.2.9", "start_s": 60, "duration_s": 900, "rate_pps": 1,
         "reflector_subset": 2},
        {"type": "direct_nonspoofed", "victim": "192.0.2.77", "start_s": 0, "duration_s": 600,
         "rate_pps": 200000, "packet_bytes": 500, "sources": 50},
    ],
}


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    truth = ddoscope.synth(SCENARIO, out)
    return out, truth


def test_min_detectable_rate():
    pps, bps = ddoscope.min_detectable_rate(12582912)
    assert pps == pytest.approx(28.4444, abs=1e-3)
    assert bps / 1e6 == pytest.approx(0.025, abs=1e-4)


def test_detectors_find_synthetic_attacks(inputs):
    out, truth = inputs
    assert len(truth) == 3
    rsdos = ddoscope.detect_telescope(out / "telescope.csv", n_addresses=12582912)
    assert [e["target"] for e in rsdos] == ["198.51.100.7/32"]
    assert rsdos[0]["attack_type"] == "RSDoS"
    hp = ddoscope.detect_honeypot(out / "honeypot", preset="hopscotch")
    assert [e["target"] for e in hp] == ["192.0.2.9/32"]
    assert len(hp[0]["sensors"]) == 2
    flows = ddoscope.detect_flow(out / "flows.csv", observatory="ixp")
    assert [(e["target"], e["attack_type"]) for e in flows] == [("192.0.2.77/32", "DP")]


def test_attacks_roundtrip(inputs, tmp_path):
    out, _ = inputs
    events = ddoscope.detect_telescope(out / "telescope.csv", n_addresses=12582912)
    ddoscope.write_attacks(tmp_path / "a.csv", events)
    assert ddoscope.read_attacks(tmp_path / "a.csv") == events


def test_carpet_merge():
    events = [
        {"observatory": "nt", "attack_type": "RSDoS", "target": t, "start_ts_us": 0, "end_ts_us": 10**8,
         "packets": 10}
        for t in ("198.18.5.1", "198.18.5.2")
    ]
    merged = ddoscope.aggregate_carpet(events, DATA / "routed.csv", DATA / "alloc.csv")
    assert len(merged) == 1
    assert merged[0]["target"] == "198.18.0.0/16"
    assert merged[0]["members"] == ["198.18.5.1/32", "198.18.5.2/32"]


def test_trend_math():
    v = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 10]
    assert ddoscope.normalize(v)[15] == 2.0
    assert ddoscope.ewma([0, None, 1])[1] is None
    assert ddoscope.ewma([0, 1])[1] == pytest.approx(2 / 13)
    assert ddoscope.spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])["rho"] == pytest.approx(0.8)
    assert ddoscope.pearson([1, 2, 3], [1, 2, 4])["rho"] == pytest.approx(0.98198, abs=5e-6)
    up = [1 + 0.1 * i / 208 for i in range(209)]
    assert ddoscope.linreg_trend(up)["trend"] == "Increasing"
    assert ddoscope.classify_trend(-0.06) == "Decreasing"
    with pytest.raises(ddoscope.DataError):
        ddoscope.normalize([1, 2, 3])


def test_upset_and_confirm():
    day = "2021-03-01"
    sets = {
        "A": [(day, "10.0.0.1"), (day, "10.0.0.2"), (day, "10.0.0.3")],
        "B": [(day, "10.0.0.2"), (day, "10.0.0.3"), (day, "10.0.0.4")],
        "C": [(day, "10.0.0.3"), (day, "10.0.0.4"), (day, "10.0.0.5")],
    }
    counts = ddoscope.upset(sets)
    assert counts == {"A": 1, "B": 0, "A&B": 1, "C": 1, "A&C": 0, "B&C": 1, "A&B&C": 1}
    assert sum(counts.values()) == 5

    ten = {"A": [(day, f"10.0.1.{i}") for i in range(10)]}
    digests = [ddoscope.target_digest(day, f"10.0.1.{i}", "pepper") for i in (0, 4, 9)]
    assert ddoscope.federated_confirm(ten, digests, "pepper")["A"] == (10, 3, 0.3)


def test_pipeline_bundle(tmp_path):
    cfg = json.loads((DATA / "e2e_pipeline.json").read_text())
    scenario = json.loads((DATA / "e2e_scenario.json").read_text())
    scenario["duration_s"] = 86400
    scenario["attacks"] = [a for a in scenario["attacks"] if a["start_s"] + a["duration_s"] < 86400]
    cfg["scenario"] = scenario
    manifest = ddoscope.run_pipeline(cfg, out_dir=tmp_path / "bundle", base_dir=DATA)
    assert manifest["version"] == ddoscope.__version__
    assert (tmp_path / "bundle" / "manifest.json").exists()
    recovery = json.loads((tmp_path / "bundle" / "recovery.json").read_text())
    assert all(r["precision"] == 1 and r["recall"] == 1 for r in recovery)


def test_errors_map_to_exception_types(tmp_path):
    cfg = json.loads((DATA / "e2e_pipeline.json").read_text())
    cfg.pop("routed")
    with pytest.raises(ddoscope.ConfigError, match="routed"):
        ddoscope.run_pipeline(cfg, out_dir=tmp_path / "x", base_dir=DATA)
    assert not (tmp_path / "x").exists()
    with pytest.raises(ddoscope.ConfigError):
        ddoscope.detect_honeypot(tmp_path, preset="honeyd")
    bad = tmp_path / "bad.csv"
    bad.write_text("ts_us,protocol\n1,6\n")
    with pytest.raises(ddoscope.DataError):
        ddoscope.detect_telescope(bad, n_addresses=1000)
    assert issubclass(ddoscope.DataError, ddoscope.Error)
