# SPDX-License-Identifier: Apache-2.0
#
# raaloc - localization with retro-directive antenna arrays
# Copyright (C) 2026 The raaloc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
#
# Independent high-precision evaluation of the scalar formulas. Run once;
# the output is frozen in tests/golden_values.hpp.

from mpmath import mp, mpf, sqrt, pi, log10, asin

mp.dps = 40

C = mpf(299792458)
KB = mpf("1.380649e-23")
T0 = mpf(290)


def db(x):
    return 10 * log10(x)


def lin(d):
    return mpf(10) ** (mpf(d) / 10)


lam = C / mpf("28e9")
pl10 = (4 * pi * 10 / lam) ** 2
kt0 = KB * T0


def sigma2(f, w):
    return kt0 * f * w


def snr_max(pt, g, n, m, ga, gr, f, w, d):
    return pt * g**2 * n**2 * m**2 * ga**2 * gr**2 * lam**4 / (sigma2(f, w) * (4 * pi * d) ** 4)


def equilibrium(s, n):
    s = mpf(s)
    n = mpf(n)
    return ((s - n) + sqrt((s - n) ** 2 + 4 * s)) / 2


def vmax(d, n, tau):
    d, n, tau = mpf(d), mpf(n), mpf(tau)
    return 2 * d * sqrt(6 * (n - 1)) / (pi * tau * n * sqrt(n))


def recursion(maxima_db, n, kmax):
    s = [lin(v) for v in maxima_db]
    cur = [x / n for x in s]
    rows = []
    for k in range(1, kmax + 1):
        if k > 1:
            tot = sum(cur)
            cur = [s[j] * (cur[j] + 1) / (n + tot) for j in range(len(s))]
        dec = sum(cur[j] / sqrt(s[j]) for j in range(len(s))) ** 2
        rows.append((list(cur), dec))
    return rows


def out(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 21)};")


out("kWavelength28GHz", lam)
out("kPathLoss10m", pl10)
out("kKT0", kt0)
out("kNoiseF2W10MHz", sigma2(2, mpf("1e7")))
f3 = lin(3)
out("kNoiseF3dBW10MHz", sigma2(f3, mpf("1e7")))
sm2 = snr_max(mpf("1e-3"), 1, 100, 400, 1, 1, 2, mpf("1e7"), 10)
out("kSnrMaxF2", sm2)
out("kSnrBootF2", sm2 / 100)
sm3 = snr_max(mpf("1e-3"), 1, 100, 400, 1, 1, f3, mpf("1e7"), 10)
out("kSnrMaxF3dB", sm3)
out("kSnrBootF3dB", sm3 / 100)
out("kVmaxN100D10Tau01", vmax(10, 100, mpf("0.1")))
out("kEquilibriumS1000N10", equilibrium(1000, 10))
out("kEquilibriumS1000N100", equilibrium(1000, 100))

rows = recursion([25, 17, 13], 100, 15)
print("inline constexpr double kThreeDirSnr1Db[15] = {")
print(",\n".join("    " + mp.nstr(db(r[0][0]), 17) for r in rows) + "};")
print("inline constexpr double kThreeDirDecDb[15] = {")
print(",\n".join("    " + mp.nstr(db(r[1]), 17) for r in rows) + "};")
rows = recursion([15, 10, 5], 100, 200)
out("kWeakSnr1DbFinal", db(rows[-1][0][0]))
out("kWeakDecDbFinal", db(rows[-1][1]))
