// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "bqc/noise.h"

using namespace bqc;

TEST_CASE("readout error percent and interferometer phase") {
  CHECK(tdi_phase_from_percent(1.6) == doctest::Approx(-0.25370).epsilon(1e-4));
  CHECK(tdi_phase_from_percent(6.4) == doctest::Approx(-0.51152).epsilon(1e-4));
  for (double p : {0.0, 1.6, 6.4, 50.0}) CHECK(tdi_percent_from_phase(tdi_phase_from_percent(p)) == doctest::Approx(p));
  CHECK(tdi_readout_error(kPi) == doctest::Approx(1));
  CHECK(tdi_readout_error(-0.3) == doctest::Approx(tdi_readout_error(0.3)));
  CHECK_THROWS(tdi_phase_from_percent(-1));
}

TEST_CASE("presets validate and differ where expected") {
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
  CHECK(preset("ideal").ideal());
  CHECK_FALSE(preset("intra").ideal());
  CHECK(preset("rz-single").mu == doctest::Approx(0.05));
  CHECK(preset("intra").contrast == doctest::Approx(28));
  CHECK_THROWS(preset("nope"));
}

TEST_CASE("validation rejects out-of-range values") {
  NoiseConfig c;
  c.mu = -0.1;
  CHECK_THROWS(c.validate());
  c = NoiseConfig{};
  c.contrast = 0.5;
  CHECK_THROWS(c.validate());
  c = NoiseConfig{};
  c.mw_fidelity = 0.4;
  CHECK_THROWS(c.validate());
  c = NoiseConfig{};
  c.link_eta = 1.2;
  CHECK_THROWS(c.validate());
}

TEST_CASE("microwave error model reproduces its fidelity") {
  CHECK(mw_sigma(1) == 0);
  NoiseConfig c;
  c.mw_fidelity = 0.99;
  Rng rng(9);
  CHECK(mw_fidelity_mc(c, 200000, rng) == doctest::Approx(0.99).epsilon(2e-3));
  c.mw_fidelity = 1;
  CHECK(sample_mw_angle(kPi, c, rng) == kPi);
}

TEST_CASE("contrast reflectivities and detector efficiency") {
  auto [rb, rd] = contrast_reflectivities(28, cplx(0.8, 0.1));
  CHECK(std::norm(rb) / std::norm(rd) == doctest::Approx(28));
  CHECK(std::arg(rd) == doctest::Approx(std::arg(rb)));
  NoiseConfig c = preset("intra");
  CHECK(detector_efficiency(c) == doctest::Approx(0.114));
  CHECK(server_mirror(c).contrast() == doctest::Approx(28).epsilon(1e-6));
  NoiseConfig hi;
  hi.detection_eta = 0.9;
  CHECK(detector_efficiency(hi) == 1);
}

TEST_CASE("interferometer error draws") {
  NoiseConfig c;
  c.tdi_phase_err = -0.2;
  Rng rng(1);
  CHECK(tdi_error(c, rng).phase == doctest::Approx(-0.2));
  c.tdi_mode = TdiErrorMode::kGaussian;
  c.tdi_phase_err = 0.1;
  double acc = 0;
  for (int i = 0; i < 20000; ++i) acc += std::pow(tdi_error(c, rng).phase, 2);
  CHECK(std::sqrt(acc / 20000) == doctest::Approx(0.1).epsilon(0.03));
}

TEST_CASE("drift is bounded and reproducible") {
  NoiseConfig c;
  for (double v : tdi_drift(c, 1, 10)) CHECK(v == 0);
  c.tdi_drift_step = 0.1;
  c.tdi_drift_bound = 0.25;
  auto a = tdi_drift(c, 5, 500);
  auto b = tdi_drift(c, 5, 500);
  CHECK(a == b);
  REQUIRE(a.size() == 500);
  for (double v : a) CHECK(std::abs(v) <= 0.25 + 1e-12);
}

TEST_CASE("rng streams depend only on seed and shot") {
  Rng a = Rng::for_shot(3, 17);
  Rng b = Rng::for_shot(3, 17);
  for (int i = 0; i < 5; ++i) CHECK(a() == b());
  CHECK(Rng::for_shot(3, 17)() != Rng::for_shot(3, 18)());
  CHECK(Rng(1).substream(2)() != Rng(1).substream(3)());
  Rng u(4);
  for (int i = 0; i < 1000; ++i) {
    double x = u.uniform();
    CHECK((x >= 0 && x < 1));
  }
}
