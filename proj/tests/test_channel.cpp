// SPDX-License-Identifier: Apache-2.0
//
// raaloc - localization with retro-directive antenna arrays
// Copyright (C) 2026 The raaloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "golden_values.hpp"
#include "raaloc/channel.hpp"

using namespace raaloc;

namespace {

const RfParams kRf{};
const double kLambda = kRf.wavelength();

ArrayGeometry ula(int n) { return ArrayGeometry::linear(n, kLambda / 2); }

Eigen::VectorXd singular_values(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

}  // namespace

TEST_CASE("single-element LOS channel is the free-space amplitude") {
  const auto h = los_channel(kRf, ula(1), ula(1), 3.0, 0.2, -0.1);
  const CMatrix d = h.dense();
  REQUIRE(d.rows() == 1);
  REQUIRE(d.cols() == 1);
  CHECK(std::abs(d(0, 0)) == doctest::Approx(kLambda / (4.0 * kPi * 3.0)).epsilon(1e-12));
}

TEST_CASE("LOS channel is rank one") {
  const auto h = los_channel(kRf, ula(16), ula(24), 5.0, 0.3, -0.7);
  const auto s = singular_values(h.dense());
  CHECK(s(1) < 1e-10 * s(0));
  CHECK(h.rows() == 24);
  CHECK(h.cols() == 16);
}

TEST_CASE("LOS singular value for 10x10 anchor and 20x20 RAA at 10 m") {
  const auto trx = ArrayGeometry::planar(10, 10, kLambda / 2);
  const auto raa = ArrayGeometry::planar(20, 20, kLambda / 2);
  const auto h = los_channel(kRf, trx, raa, 10.0, 0.25, -0.4);
  const auto s = singular_values(h.dense());
  const double expected = std::sqrt(100.0 * 400.0) * kLambda / (4.0 * kPi * 10.0);
  CHECK(s(0) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(s(1) < 1e-10 * s(0));
}

TEST_CASE("factored products agree with the dense matrix") {
  Rng rng(5);
  MultipathParams mp;
  const auto paths = surrogate_paths(kRf, 4.0, 0.1, 0.2, mp, rng);
  const auto h = multipath_channel(kRf, ula(12), ula(20), paths, 4.0, 0.1, 0.2);
  const CMatrix d = h.dense();
  const CVector x = sample_cn(1.0, 12, rng);
  const CVector r = sample_cn(1.0, 20, rng);
  CHECK((h.apply(x) - d * x).norm() < 1e-12 * (d * x).norm());
  CHECK((h.apply_transpose(r) - d.transpose() * r).norm() < 1e-12 * (d.transpose() * r).norm());
}

TEST_CASE("multipath with the LOS path alone reduces to the LOS channel") {
  PathSet one;
  one.paths.push_back({free_space_amplitude(kRf, 7.0), 0.3, -0.2});
  const auto a = multipath_channel(kRf, ula(8), ula(10), one, 7.0, 0.3, -0.2);
  const auto b = los_channel(kRf, ula(8), ula(10), 7.0, 0.3, -0.2);
  CHECK((a.dense() - b.dense()).norm() < 1e-15);
}

TEST_CASE("two equal paths on orthogonal grid angles have equal singular values") {
  const int n = 16;
  const int m = 32;
  const double amp = free_space_amplitude(kRf, 5.0);
  PathSet set;
  set.paths.push_back({amp, 0.0, 0.0});
  set.paths.push_back({Complex(0.0, amp), std::asin(4.0 / n), std::asin(6.0 / m)});
  const auto h = multipath_channel(kRf, ula(n), ula(m), set, 5.0, 0.0, 0.0);
  const auto s = singular_values(h.dense());
  CHECK(s(0) == doctest::Approx(s(1)).epsilon(1e-9));
  CHECK(s(2) < 1e-10 * s(0));

  // Frobenius power equals the per-path powers times N M when the paths
  // are mutually orthogonal.
  const double fro = h.dense().squaredNorm();
  CHECK(fro == doctest::Approx(2.0 * amp * amp * n * m).epsilon(1e-9));
}

TEST_CASE("multipath rejects empty path sets") {
  PathSet empty;
  CHECK_THROWS_AS(multipath_channel(kRf, ula(4), ula(4), empty, 1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(los_channel(kRf, ula(4), ula(4), 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("surrogate approaches LOS as the K-factor grows") {
  Rng rng(9);
  MultipathParams mp;
  mp.k_factor_db = 80.0;
  const auto paths = surrogate_paths(kRf, 6.0, 0.2, 0.1, mp, rng);
  CHECK(paths.paths.size() == 5);
  const auto h = multipath_channel(kRf, ula(10), ula(20), paths, 6.0, 0.2, 0.1);
  const auto los = los_channel(kRf, ula(10), ula(20), 6.0, 0.2, 0.1);
  CHECK((h.dense() - los.dense()).norm() < 1e-3 * los.dense().norm());
}

TEST_CASE("surrogate splits power by the K-factor") {
  Rng rng(3);
  MultipathParams mp;
  const auto set = surrogate_paths(kRf, 6.0, 0.2, 0.1, mp, rng);
  const double amp2 = std::pow(free_space_amplitude(kRf, 6.0), 2);
  const double k = db_to_linear(mp.k_factor_db);
  double nlos = 0.0;
  for (std::size_t i = 1; i < set.paths.size(); ++i) {
    nlos += std::norm(set.paths[i].gain);
    CHECK(std::abs(set.paths[i].departure) <= mp.angle_spread);
    CHECK(std::abs(set.paths[i].arrival) <= mp.angle_spread);
  }
  CHECK(std::norm(set.paths[0].gain) == doctest::Approx(amp2 * k / (k + 1)).epsilon(1e-12));
  CHECK(nlos == doctest::Approx(amp2 / (k + 1)).epsilon(1e-12));
}

TEST_CASE("round-trip operator of a LOS channel") {
  const double pt = 1e-3;
  const double g = 3.0;
  const double phi = 0.35;
  const auto h = los_channel(kRf, ula(32), ula(64), 8.0, phi, 0.1);
  const CMatrix a = round_trip_operator(h, pt, g);
  CHECK((a - a.adjoint()).norm() < 1e-12 * a.norm());

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
  const CVector top = eig.eigenvectors().col(31);
  const CVector v = steering_vector(ula(32), phi, kLambda);
  CHECK(std::abs(std::abs(top.dot(v)) - 1.0) < 1e-10);
  CHECK(eig.eigenvalues()(30) < 1e-10 * eig.eigenvalues()(31));

  const double sigma1 = std::sqrt(32.0 * 64.0) * kLambda / (4.0 * kPi * 8.0);
  CHECK(eig.eigenvalues()(31) == doctest::Approx(std::sqrt(pt) * g * sigma1 * sigma1).epsilon(1e-9));

  const CMatrix closed = std::sqrt(pt) * g * 32.0 * 64.0 * std::pow(kLambda / (4 * kPi * 8.0), 2) *
                         (v * v.adjoint());
  CHECK((a - closed).norm() < 1e-9 * a.norm());
}

TEST_CASE("round-trip eigenvalues are the scaled squared singular values") {
  Rng rng(21);
  MultipathParams mp;
  mp.k_factor_db = 0.0;
  const auto paths = surrogate_paths(kRf, 5.0, -0.2, 0.3, mp, rng);
  const auto h = multipath_channel(kRf, ula(12), ula(16), paths, 5.0, -0.2, 0.3);
  const CMatrix a = round_trip_operator(h, 1e-3, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
  Eigen::JacobiSVD<CMatrix> svd(h.dense(), Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  const double trace = a.trace().real();
  for (int i = 0; i < 12; ++i) {
    CHECK(eig.eigenvalues()(i) >= -1e-12 * trace);
    const double expected = i < s.size() ? std::sqrt(1e-3) * 2.0 * s(i) * s(i) : 0.0;
    CHECK(std::abs(eig.eigenvalues()(11 - i) - expected) < 1e-9 * eig.eigenvalues()(11));
  }
  // Top eigenvectors span the same lines as the right singular vectors.
  for (int i = 0; i < 3; ++i) {
    const CVector e = eig.eigenvectors().col(11 - i);
    const CVector r = svd.matrixV().col(i);
    CHECK(std::abs(std::abs(e.dot(r)) - 1.0) < 1e-8);
  }
}

TEST_CASE("noise variances") {
  RfParams rf;
  rf.noise_figure_trx = 1.0;
  rf.noise_figure_raa = 1.0;
  rf.bandwidth_hz = 1.0;
  CHECK(noise_variances(rf).trx_variance == doctest::Approx(golden::kKT0).epsilon(1e-12));

  rf.noise_figure_trx = 2.0;
  rf.noise_figure_raa = 2.0;
  rf.bandwidth_hz = 10e6;
  const auto n = noise_variances(rf);
  CHECK(n.trx_variance == doctest::Approx(golden::kNoiseF2W10MHz).epsilon(1e-12));
  CHECK(n.raa_variance == doctest::Approx(golden::kNoiseF2W10MHz).epsilon(1e-12));
  CHECK(linear_to_db(n.trx_variance / 1e-3) == doctest::Approx(-100.97).epsilon(1e-4));

  rf.bandwidth_hz = 20e6;
  CHECK(noise_variances(rf).trx_variance == doctest::Approx(2.0 * n.trx_variance).epsilon(1e-15));

  CHECK(noise_variances(RfParams{}).trx_variance ==
        doctest::Approx(golden::kNoiseF3dBW10MHz).epsilon(1e-12));
}

TEST_CASE("complex Gaussian sampling") {
  Rng rng(1);
  CHECK(sample_cn(0.0, 5, rng).norm() == 0.0);
  CHECK_THROWS_AS(sample_cn(-1.0, 5, rng), std::domain_error);

  const double var = 2.5;
  const int n = 1'000'000;
  const CVector x = sample_cn(var, n, rng);
  CHECK(x.squaredNorm() / n == doctest::Approx(var).epsilon(0.01));
  double re = 0.0;
  double im = 0.0;
  for (int i = 0; i < n; ++i) {
    re += x(i).real() * x(i).real();
    im += x(i).imag() * x(i).imag();
  }
  CHECK(re / n == doctest::Approx(var / 2).epsilon(0.01));
  CHECK(im / n == doctest::Approx(var / 2).epsilon(0.01));

  Rng a(77);
  Rng b(77);
  const CVector xa = sample_cn(1.0, 100, a);
  const CVector xb = sample_cn(1.0, 100, b);
  CHECK(xa == xb);
}
