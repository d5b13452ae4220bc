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

"""Privacy amplification from missing data: accountant, audits, scenarios."""

import json

from amplipriv import _core

amplified_epsilon = _core.amplified_epsilon
corollary_bound = _core.corollary_bound
gaussian_factor = _core.gaussian_factor
hockey_stick_discrete = _core.hockey_stick_discrete
run = _core.run


def amplify_generic(epsilon, delta, p_star):
    return json.loads(_core.amplify_generic(epsilon, delta, p_star))


def amplify_fwl(epsilon, delta, p_star, c, c_tilde, rho, family="laplace"):
    return json.loads(
        _core.amplify_fwl(epsilon, delta, p_star, c, c_tilde, rho, family))


def tightness_counterexample(epsilon, delta):
    return json.loads(_core.tightness_counterexample(epsilon, delta))


def scenario_report(command, path, seed=None):
    """Report for one CLI command on a scenario file, without writing files."""
    return json.loads(_core.scenario_report(command, str(path), seed))
