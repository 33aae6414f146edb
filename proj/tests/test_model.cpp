#include "doctest.h"
#include "heff/model.hpp"
#include "heff/operator_algebra.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <sstream>

using namespace heff;
using heff::testing::random_realization;
using heff::testing::random_sequence;

namespace {

Mat pauli_on(const std::string& letters, int n) {
  return build_pauli({letters, 1.0}, n);
}

}  // namespace

TEST_CASE("control_hamiltonian conventions") {
  // omega_max = 2 pi 0.25 rad/us = pi/2: a 1 us segment at full amplitude is a
  // pi/2 rotation.
  ControlSegment seg{1.0, 0.5 * kPi, 0.0, 0.0};
  const Mat h = control_hamiltonian(seg, 1, 0.0);
  CHECK(max_abs(Mat(h - 0.25 * kPi * pauli_on("X", 1))) < 1e-15);
  const Mat u = expm_skew(h, 1.0);
  CHECK(std::norm(u(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(max_abs(control_hamiltonian(ControlSegment{2.0, 0, 0, 0}, 2, 0.0)) == 0.0);

  ControlSegment generic{2.0, 0.9, 0.7, -0.4};
  const Mat base = control_hamiltonian(generic, 2, 0.0);
  const Mat scaled = control_hamiltonian(generic, 2, 0.1);
  CHECK(max_abs(Mat(scaled - 1.1 * base)) < 1e-14);
}

TEST_CASE("internal_hamiltonian single dipolar edge") {
  NetworkSpec net = NetworkSpec::all_to_all(2, NetworkSpec::dipolar_tensor(), false);
  ParameterRealization real = ParameterRealization::zero(net);
  real.values[ParamId::coupling(1, 2)] = 1.0;
  const Mat h = internal_hamiltonian(net, real);
  const Mat expected = 0.25 * (2.0 * pauli_on("ZZ", 2) - pauli_on("XX", 2) -
                               pauli_on("YY", 2));
  CHECK(max_abs(Mat(h - expected)) < 1e-14);

  CHECK(max_abs(internal_hamiltonian(net, ParameterRealization::zero(net))) == 0.0);
}

TEST_CASE("internal_hamiltonian matches independent Pauli assembly") {
  NetworkSpec net = NetworkSpec::all_to_all(3, NetworkSpec::dipolar_tensor(), false);
  Philox rng(21, make_stream(StreamPurpose::test, 8));
  const ParameterRealization real = random_realization(net, 1.0, rng);

  // Independent assembly: explicit sums of Pauli strings, no shared helpers.
  Mat expected = Mat::Zero(8, 8);
  const char axes[] = {'X', 'Y', 'Z'};
  for (int q = 1; q <= 3; ++q) {
    std::string letters = "III";
    letters[q - 1] = 'Z';
    expected += 0.5 * real.value(ParamId::detuning(q)) * pauli_on(letters, 3);
  }
  const double d_diag[3] = {-1.0, -1.0, 2.0};
  for (int i = 1; i <= 3; ++i) {
    for (int j = i + 1; j <= 3; ++j) {
      for (int a = 0; a < 3; ++a) {
        std::string letters = "III";
        letters[i - 1] = axes[a];
        letters[j - 1] = axes[a];
        expected += 0.25 * real.value(ParamId::coupling(i, j)) * d_diag[a] *
                    pauli_on(letters, 3);
      }
    }
  }
  CHECK(max_abs(Mat(internal_hamiltonian(net, real) - expected)) < 1e-13);

  ParameterRealization incomplete = real;
  incomplete.values.erase(ParamId::coupling(2, 3));
  CHECK_THROWS_WITH_AS(internal_hamiltonian(net, incomplete),
                       doctest::Contains("23"), std::invalid_argument);
}

TEST_CASE("perturbation components partition the Hamiltonian") {
  NetworkSpec net = NetworkSpec::all_to_all(2, NetworkSpec::dipolar_tensor(), true);
  const auto comps = perturbation_components(net);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].time_dependent());

  ControlSegment idle;
  const auto detuning = comps[1].op_for_segment(net, idle);
  REQUIRE(detuning.blocks.size() == 2);
  CHECK(max_abs(Mat(*detuning.block(ParamId::detuning(1)) -
                    0.5 * pauli_on("ZI", 2))) < 1e-15);
  CHECK(max_abs(Mat(*detuning.block(ParamId::detuning(2)) -
                    0.5 * pauli_on("IZ", 2))) < 1e-15);

  const auto error = comps[0].op_for_segment(net, ControlSegment{2.0, 0, 0, 0});
  CHECK(max_abs(*error.block(ParamId::error(0))) == 0.0);

  // Reassembly: sum_w sum_m eta_m O_m^w = H_int + eps H_c.
  Philox rng(4, make_stream(StreamPurpose::test, 9));
  const ParameterRealization real = random_realization(net, 0.8, rng);
  ControlSegment seg{2.0, 1.1, -0.4, 0.6};
  Mat assembled = Mat::Zero(4, 4);
  for (const auto& comp : comps) {
    assembled += comp.op_for_segment(net, seg).instantiate(real.values);
  }
  const double eps = real.value(ParamId::error(0));
  const Mat direct =
      internal_hamiltonian(net, real) + eps * control_hamiltonian(seg, 2, 0.0);
  CHECK(max_abs(Mat(assembled - direct)) < 1e-13);
}

TEST_CASE("sample_realization statistics") {
  NetworkSpec net = NetworkSpec::all_to_all(4, NetworkSpec::dipolar_tensor(), true);
  EnsembleSpec ens;
  ens.seed = 77;

  SUBCASE("all sigmas zero gives the zero realization") {
    const auto real = sample_realization(net, ens, 0);
    for (const auto& [id, value] : real.values) CHECK(value == 0.0);
  }

  SUBCASE("independent marginals") {
    ens.sigma_dip = khz_to_rad_per_us(5.0);
    ens.sigma_z = khz_to_rad_per_us(2.5);
    ens.sigma_eps = 0.02;
    double sum = 0.0, sum2 = 0.0;
    const int samples = 10000;
    for (int z = 0; z < samples; ++z) {
      const auto real = sample_realization(net, ens, z);
      const double b = real.value(ParamId::coupling(1, 2));
      sum += b;
      sum2 += b * b;
    }
    const double std_b = std::sqrt(sum2 / samples - (sum / samples) * (sum / samples));
    CHECK(std_b == doctest::Approx(ens.sigma_dip).epsilon(0.03));
  }

  SUBCASE("correlated sampling hits the requested correlation") {
    ens.sigma_dip = khz_to_rad_per_us(5.0);
    ens.sigma_z = khz_to_rad_per_us(2.5);
    ens.rho_corr = 0.5;
    double sb = 0, sd = 0, sbb = 0, sdd = 0, sbd = 0;
    const int samples = 10000;
    for (int z = 0; z < samples; ++z) {
      const auto real = sample_realization(net, ens, z);
      const double b = real.value(ParamId::coupling(1, 2));
      const double d = real.value(ParamId::detuning(1)) +
                       real.value(ParamId::detuning(2));
      sb += b;
      sd += d;
      sbb += b * b;
      sdd += d * d;
      sbd += b * d;
    }
    const double cov = sbd / samples - (sb / samples) * (sd / samples);
    const double var_b = sbb / samples - (sb / samples) * (sb / samples);
    const double var_d = sdd / samples - (sd / samples) * (sd / samples);
    const double corr = cov / std::sqrt(var_b * var_d);
    CHECK(corr > 0.45);
    CHECK(corr < 0.55);
    CHECK(std::sqrt(var_b) == doctest::Approx(ens.sigma_dip).epsilon(0.03));
  }

  SUBCASE("correlated model without detuning spread is rejected") {
    ens.rho_corr = 0.5;
    ens.sigma_z = 0.0;
    CHECK_THROWS_AS(sample_realization(net, ens, 0), ConfigError);
  }

  SUBCASE("bit-for-bit reproducibility") {
    ens.sigma_dip = 1.0;
    ens.sigma_z = 0.5;
    ens.sigma_eps = 0.01;
    const auto a = sample_realization(net, ens, 123);
    const auto b = sample_realization(net, ens, 123);
    for (const auto& [id, value] : a.values) CHECK(value == b.values.at(id));
  }
}

TEST_CASE("total_propagator") {
  NetworkSpec net = NetworkSpec::all_to_all(2, NetworkSpec::dipolar_tensor(), false);
  const ParameterRealization zero = ParameterRealization::zero(net);

  ControlSequence idle;
  idle.endpoint_rule = false;
  idle.segments = {ControlSegment{2.0, 0, 0, 0}, ControlSegment{2.0, 0, 0, 0}};
  CHECK(max_abs(Mat(total_propagator(idle, net, zero, 0.0) - Mat::Identity(4, 4))) <
        1e-12);

  Philox rng(6, make_stream(StreamPurpose::test, 10));
  const ParameterRealization real = random_realization(net, 0.2, rng);

  ControlSequence single;
  single.endpoint_rule = false;
  single.segments = {ControlSegment{2.0, 0.9, 0.3, -0.2}};
  const Mat h = control_hamiltonian(single.segments[0], 2, 0.05) +
                internal_hamiltonian(net, real);
  CHECK(max_abs(Mat(total_propagator(single, net, real, 0.05) - expm_skew(h, 2.0))) <
        1e-12);

  SUBCASE("piecewise-constant exactness against fine slicing") {
    ControlSequence two = random_sequence(2, rng, false);
    const Mat coarse = total_propagator(two, net, real, 0.0);
    Mat fine = Mat::Identity(4, 4);
    for (const auto& seg : two.segments) {
      const Mat hs = control_hamiltonian(seg, 2, 0.0) + internal_hamiltonian(net, real);
      const int slices = 1000;
      const Mat step = expm_skew(hs, seg.duration_us / slices);
      for (int s = 0; s < slices; ++s) fine = step * fine;
    }
    CHECK(max_abs(Mat(coarse - fine)) < 1e-9);
  }

  SUBCASE("concatenation ordering U_B U_A") {
    ControlSequence a = random_sequence(3, rng, false);
    ControlSequence b = random_sequence(2, rng, false);
    ControlSequence ab = a;
    ab.segments.insert(ab.segments.end(), b.segments.begin(), b.segments.end());
    const Mat u = total_propagator(ab, net, real, 0.0);
    const Mat split = total_propagator(b, net, real, 0.0) *
                      total_propagator(a, net, real, 0.0);
    CHECK(max_abs(Mat(u - split)) < 1e-11);
  }
}

TEST_CASE("collective pi/2 frequency convention on a network") {
  ControlSequence seq;
  seq.endpoint_rule = false;
  seq.segments = {ControlSegment{1.0, khz_to_rad_per_us(250.0), 0.0, 0.0}};
  const int n = 3;
  const Mat u = primary_propagator(seq, n);
  Mat sx = Mat::Zero(8, 8);
  for (int q = 0; q < n; ++q) {
    std::string letters(n, 'I');
    letters[q] = 'X';
    sx += pauli_on(letters, n);
  }
  // exp(-i (pi/4) SX) is the collective pi/2 rotation.
  const Mat target = expm_skew(sx, 0.25 * kPi);
  CHECK(std::abs((u.adjoint() * target).trace()) / 8.0 ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sequence csv round trip and validation") {
  ControlSequence seq;
  seq.endpoint_rule = true;
  seq.segments = {ControlSegment{2.0, 0, 0, 0},
                  ControlSegment{2.0, 1.234567890123456, -2.5, 0.777},
                  ControlSegment{1.5, 0.089, 3.0, -1.0},
                  ControlSegment{2.0, 0, 0, 0}};
  std::ostringstream out;
  write_sequence_csv(out, seq);
  std::istringstream in(out.str());
  const ControlSequence parsed = read_sequence_csv(in, 250.0, true);
  REQUIRE(parsed.size() == seq.size());
  for (int k = 0; k < seq.size(); ++k) {
    CHECK(parsed.segments[k].duration_us == seq.segments[k].duration_us);
    CHECK(parsed.segments[k].omega1 == doctest::Approx(seq.segments[k].omega1).epsilon(1e-15));
    CHECK(parsed.segments[k].phi == seq.segments[k].phi);
  }

  std::istringstream bad("wrong,header\n1,2,3,4\n");
  CHECK_THROWS_AS(read_sequence_csv(bad), ConfigError);

  ControlSequence unbounded = seq;
  unbounded.segments[1].omega1 = 10.0 * unbounded.omega_max;
  CHECK_THROWS_AS(unbounded.validate(), ConfigError);

  ControlSequence endpoint = seq;
  endpoint.segments.front().omega1 = 0.3;
  CHECK_THROWS_WITH_AS(endpoint.validate(), doctest::Contains("endpoint"),
                       ConfigError);
}
