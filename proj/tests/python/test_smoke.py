# Copyright 2026 The GGT Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

import ggt


def test_petersen_aspl():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    g = ggt.graph_from_edges(10, outer + spokes + inner)
    assert ggt.aspl(g) == pytest.approx(5 / 3, abs=1e-12)


def test_generated_graph_is_regular():
    g = ggt.generate_regular_graph(64, 3, 1)
    assert all(g.degree(i) == 3 for i in range(64))
    doc = json.loads(g.to_json())
    assert set(doc) >= {"n", "k", "seed", "aspl", "edges"}
    assert ggt.aspl(ggt.graph_from_json(g.to_json())) == ggt.aspl(g)


def test_regulation_lands_in_bin():
    g = ggt.generate_regular_graph(64, 3, 2)
    out, value = ggt.regulate_aspl(g, 5.0, 7.0, 3)
    assert 5.0 <= value < 7.0
    assert all(out.degree(i) == 3 for i in range(64))


def test_sprt_reference_cases():
    cal = ggt.DetectorCalibration(0.2, relax=0.02)
    assert cal.deny_bound == pytest.approx(-2.9444, abs=1e-4)
    assert ggt.sprt(0, [1] * 100, cal)["models_used"] == 15
    v = ggt.sprt(0, [0] * 100, cal)
    assert not v["adversarial"] and v["models_used"] == 59


def test_metrics_and_calibration():
    assert ggt.auroc([0.0, 0.1], [0.5, 0.6]) == 1.0
    assert math.isinf(ggt.dsd([0.0], [0.5]))
    assert ggt.calibrate([0.0, 0.1], [0.5, 0.6]).threshold == pytest.approx(0.3)
    assert ggt.lcr(1, [1, 2, 1, 1, 1]) == pytest.approx(0.2)


def test_errors_become_exceptions():
    with pytest.raises(ggt.GgtError):
        ggt.generate_regular_graph(7, 3, 1)
    with pytest.raises(ggt.GgtError):
        ggt.config("smoke", {"graphs": {"bins": [[5, 7], [3, 5]]}})


def test_config_profiles():
    smoke = ggt.config()
    assert smoke["profile"] == "smoke"
    assert ggt.config("paper-scale")["ensemble"]["size"] == 100
