#
# Copyright 2026 The Amplipriv Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

import json
import math
import pathlib

import pytest

import amplipriv

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "docs" / "scenarios"


def test_amplified_epsilon_endpoints():
    assert amplipriv.amplified_epsilon(1.0, 1.0) == 1.0
    assert amplipriv.amplified_epsilon(1.0, 0.0) == 0.0
    assert amplipriv.amplified_epsilon(math.log(3), 0.5) == pytest.approx(
        math.log(2), abs=1e-15)


def test_generic_report():
    r = amplipriv.amplify_generic(1.0, 1e-5, 0.5)
    assert float(r["amplified"]["epsilon"]) == pytest.approx(
        0.62011450695827752, abs=1e-15)
    assert float(r["amplified"]["delta"]) == pytest.approx(5e-6)
    assert r["route"] == "generic"


def test_fwl_and_corollary():
    r = amplipriv.amplify_fwl(0.5, 0.0, 1.0, 1.0, 0.5, 0.5, "laplace")
    assert float(r["epsilon_0"]) == pytest.approx(0.25)
    cap = amplipriv.corollary_bound(0.5, 1.0, 0.5)
    assert float(r["amplified"]["epsilon"]) <= cap + 1e-12
    with pytest.raises(ValueError):
        amplipriv.amplify_fwl(0.5, 0.0, 1.0, 1.0, 0.5, 0.5, "cauchy")


def test_hockey_stick_discrete():
    assert amplipriv.hockey_stick_discrete(
        [0, 1], [0.75, 0.25], [0.25, 0.75], math.log(3)) == pytest.approx(
            0.0, abs=1e-15)
    with pytest.raises(ValueError):
        amplipriv.hockey_stick_discrete([0, 1], [0.5, 0.6], [0.5, 0.5], 0.0)


def test_tightness_counterexample():
    r = amplipriv.tightness_counterexample(0.5, 1e-5)
    assert float(r["p_star"]) == 1.0
    assert float(r["equality_gap"]) <= 1e-9


def test_scenario_report_and_run(tmp_path):
    path = SCENARIOS / "laplace_mean_rho05.json"
    report = amplipriv.scenario_report("amplify", path)
    assert report["verdict"] == "PASS"
    assert report == amplipriv.scenario_report("amplify", path)
    code, summary, files = amplipriv.run("audit", str(path), out=str(tmp_path))
    assert code == 0, summary
    written = json.loads((tmp_path / "laplace_mean_rho05.audit.json").read_text())
    assert written["verdict"] == "PASS"
    assert any(f.endswith(".audit.csv") for f in files)


def test_mnar_scenario_is_rejected():
    with pytest.raises(ValueError, match="MAR"):
        amplipriv.scenario_report("amplify", SCENARIOS / "mnar_self_masking.json")
