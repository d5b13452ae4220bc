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

"""Recomputes the frozen constants in tests/oracle_values.h with mpmath."""

import mpmath

mpmath.mp.dps = 50


def show(name, value):
  print(f"inline constexpr double {name} = {mpmath.nstr(value, 17)};")


e = mpmath.e
show("kGenericHalf", mpmath.log(1 + mpmath.mpf("0.5") * (e - 1)))
show("kFwlThreeQuarters",
     mpmath.log(1 + mpmath.mpf("0.75") * (mpmath.exp(mpmath.mpf("0.5")) - 1)))
show("kCorollaryTenth", (e - 1) * mpmath.mpf("0.1") * mpmath.mpf("0.5"))
show("kLogGaussianRatio", mpmath.log(mpmath.mpf("1.25") / mpmath.mpf("1e-5")))
c = mpmath.sqrt(2 * mpmath.log(mpmath.mpf("1.25") / mpmath.mpf("1e-5")))
show("kGaussianFactorNoMargin", c)
show("kSigmaUnitSensitivity", c * (1 + mpmath.mpf("1e-6")))
show("kNormalTv", mpmath.ncdf(mpmath.mpf("0.5")) - mpmath.ncdf(mpmath.mpf("-0.5")))
show("kStdNormalAtZero", 1 / mpmath.sqrt(2 * mpmath.pi))
show("kRrAmplified", mpmath.log(2))
