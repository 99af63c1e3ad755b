#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "usm/bdris.hpp"

using namespace usm;

namespace {

const Complex kJ(0.0, 1.0);

MimoChannel unit_channel(const CMatrix& h_d, const CMatrix& f, const CMatrix& g,
                         double snr = 1.0) {
  MimoChannel ch;
  ch.h_d = h_d;
  ch.f = f;
  ch.g = g;
  ch.snr_linear = snr;
  return ch;
}

CMatrix scalar(Complex z) {
  CMatrix m(1, 1);
  m(0, 0) = z;
  return m;
}

GeodesicFrame identity_frame(int n) {
  GeodesicFrame frame;
  frame.q_r = CMatrix::Identity(n, n);
  frame.thetas = RealVector::Zero(n);
  frame.base_u = CMatrix::Identity(n, n);
  return frame;
}

}  // namespace

TEST_CASE("noise power and path loss formulas") {
  Scenario scn;
  CHECK(scn.noise_power_dbm() ==
        doctest::Approx(-174.0 + 10.0 * std::log10(2e7)));
  CHECK(path_loss_db(28.0, 3.75, 1.0) == doctest::Approx(28.0));
}

TEST_CASE("gen_channels dimensions and determinism") {
  Scenario scn;
  MimoChannel a = gen_channels(scn, 1);
  CHECK(a.h_d.rows() == 2);
  CHECK(a.h_d.cols() == 2);
  CHECK(a.f.rows() == 2);
  CHECK(a.f.cols() == 16);
  CHECK(a.g.rows() == 2);
  CHECK(a.g.cols() == 16);
  MimoChannel b = gen_channels(scn, 1);
  CHECK((a.f - b.f).norm() == 0.0);
  CHECK((a.g - b.g).norm() == 0.0);
  CHECK((a.h_d - b.h_d).norm() == 0.0);
}

TEST_CASE("infinite Rician factor leaves only the rank-1 LOS component") {
  Scenario scn;
  scn.rician_k = std::numeric_limits<double>::infinity();
  MimoChannel ch = gen_channels(scn, 2);
  SvdResult dec = svd(ch.f);
  CHECK(dec.s(1) <= 1e-12 * dec.s(0));
}

TEST_CASE("scenario parse rejects unknown keys and round-trips") {
  std::istringstream bad("frobnicate=1\n");
  CHECK_THROWS_AS(Scenario::parse(bad), InvalidInput);

  Scenario scn;
  scn.m = 32;
  scn.alpha_direct = 8.0;
  scn.save("/tmp/usm_test_scn.txt");
  Scenario back = Scenario::load("/tmp/usm_test_scn.txt");
  CHECK(back.m == 32);
  CHECK(back.alpha_direct == 8.0);
  CHECK(back.tx_power_mw == scn.tx_power_mw);
}

TEST_CASE("h_eq basics") {
  CounterRng rng(3);
  MimoChannel ch = unit_channel(rng.cgaussian_matrix(2, 2),
                                rng.cgaussian_matrix(2, 4),
                                rng.cgaussian_matrix(2, 4));
  CHECK((h_eq(ch, CMatrix::Zero(4, 4)) - ch.h_d).norm() == 0.0);
  CMatrix theta = oracles::random_complex_symmetric(4, 3);
  CMatrix expect = ch.h_d + ch.f * theta * ch.g.adjoint();
  CHECK((h_eq(ch, theta) - expect).norm() <= 1e-12 * expect.norm());
  CHECK_THROWS_AS(h_eq(ch, CMatrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("sum-gain scalar phase updates") {
  // S = 1, f = g = 1: best phase 0, value |1 + 1|^2 = 4.
  auto c1 = sumgain_cost(unit_channel(scalar(1.0), scalar(1.0), scalar(1.0)));
  GeodesicFrame frame = identity_frame(1);
  RealVector phases = RealVector::Zero(1);
  auto p1 = c1->phase_update(0, frame, phases);
  REQUIRE(p1.has_value());
  CHECK(oracles::phase_dist(*p1, 0.0) < 1e-12);
  CHECK(c1->value_at(scalar(std::polar(1.0, *p1))) == doctest::Approx(4.0));

  // S = j: best phase pi/2, value 4.
  auto c2 = sumgain_cost(unit_channel(scalar(kJ), scalar(1.0), scalar(1.0)));
  auto p2 = c2->phase_update(0, frame, phases);
  REQUIRE(p2.has_value());
  CHECK(oracles::phase_dist(*p2, M_PI / 2) < 1e-12);
  CHECK(c2->value_at(scalar(std::polar(1.0, *p2))) == doctest::Approx(4.0));
}

TEST_CASE("rate of a unit scalar channel is one bit") {
  auto cost = rate_cost(unit_channel(scalar(1.0), scalar(0.0), scalar(0.0)));
  CHECK(cost->value_at(scalar(1.0)) == doctest::Approx(1.0));
}

TEST_CASE("MSE trivial values") {
  auto c1 = mse_cost(unit_channel(scalar(1.0), scalar(0.0), scalar(0.0)));
  CHECK(c1->value_at(scalar(1.0)) == doctest::Approx(0.5));

  auto c2 = mse_cost(unit_channel(CMatrix::Zero(2, 2), CMatrix::Zero(2, 1),
                                  CMatrix::Zero(2, 1)));
  CHECK(c2->value_at(CMatrix::Identity(1, 1)) == doctest::Approx(2.0));
}

TEST_CASE("low_rank_reduce on unit-vector channels") {
  const int m = 8;
  CMatrix f = CMatrix::Zero(1, m);
  f(0, 0) = 1.0;
  CMatrix g = CMatrix::Zero(1, m);
  g(0, 1) = 1.0;
  MimoChannel ch = unit_channel(CMatrix::Zero(1, 1), f, g);
  LowRankReduction red = low_rank_reduce(ch);
  CHECK(red.r == 2);
  // u_z spans {e1, e2}: projector reproduces both.
  CMatrix p = red.u_z * red.u_z.adjoint();
  CHECK(std::abs(p(0, 0) - Complex(1.0, 0.0)) < 1e-10);
  CHECK(std::abs(p(1, 1) - Complex(1.0, 0.0)) < 1e-10);
  CHECK((red.f_tilde - f * red.u_z).norm() <= 1e-10);
  CHECK((red.g_tilde - g * red.u_z.conjugate()).norm() <= 1e-10);
}

TEST_CASE("low_rank_reduce generic and rank-deficient ranks") {
  CounterRng rng(4);
  MimoChannel ch = unit_channel(rng.cgaussian_matrix(2, 2),
                                rng.cgaussian_matrix(2, 16),
                                rng.cgaussian_matrix(2, 16));
  LowRankReduction red = low_rank_reduce(ch);
  CHECK(red.r == 4);
  CHECK((red.u_z.adjoint() * red.u_z - CMatrix::Identity(4, 4)).norm() < 1e-9);

  // Duplicate a row of F into G: Z loses one rank direction.
  MimoChannel dup = ch;
  dup.g.row(0) = ch.f.row(0).conjugate();
  LowRankReduction red2 = low_rank_reduce(dup);
  CHECK(red2.r == 3);
}

TEST_CASE("lift identity, channel equality, and contraction") {
  CounterRng rng(5);
  MimoChannel ch = unit_channel(rng.cgaussian_matrix(2, 2),
                                rng.cgaussian_matrix(2, 12),
                                rng.cgaussian_matrix(2, 12));
  LowRankReduction red = low_rank_reduce(ch);
  CMatrix lifted_id = lift(CMatrix::Identity(red.r, red.r), red);
  CHECK((lifted_id - red.u_z * red.u_z.transpose()).norm() < 1e-10);

  for (uint64_t s = 0; s < 20; ++s) {
    UsPoint theta = random_point(12, stream_key(6, s));
    CMatrix compressed = red.u_z.adjoint() * theta.u * red.u_z.conjugate();
    CMatrix theta_lr = lift(compressed, red);
    CMatrix lhs = ch.f * theta.u * ch.g.adjoint();
    CMatrix rhs = ch.f * theta_lr * ch.g.adjoint();
    CHECK((lhs - rhs).norm() <= 1e-9 * lhs.norm());
    SvdResult dec = svd(theta_lr);
    CHECK(dec.s(0) <= 1.0 + 1e-12);
  }

  CMatrix asym = CMatrix::Zero(red.r, red.r);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(lift(asym, red), NotSymmetric);
}

TEST_CASE("complete_full_rank edge cases") {
  const int m = 6, r = 2;
  CMatrix q = CMatrix::Identity(m, m).leftCols(r);
  UsPoint full = complete_full_rank(q);
  CHECK((full.u - CMatrix::Identity(m, m)).norm() < 1e-9);

  UsPoint sq = random_point(3, 7);
  UsPoint same = complete_full_rank(sq.q);
  CHECK((same.u - sq.q * sq.q.transpose()).norm() < 1e-9);

  CHECK_THROWS_AS(complete_full_rank(CMatrix(2.0 * q)), InvalidInput);
}

TEST_CASE("complete_full_rank preserves the channel for spans of U_Z") {
  CounterRng rng(8);
  MimoChannel ch = unit_channel(rng.cgaussian_matrix(2, 2),
                                rng.cgaussian_matrix(2, 10),
                                rng.cgaussian_matrix(2, 10));
  LowRankReduction red = low_rank_reduce(ch);
  UsPoint small = random_point(red.r, 8);
  CMatrix q = red.u_z * small.q;  // columns lie in span(U_Z)
  UsPoint full = complete_full_rank(q);
  CHECK(full.valid());
  CMatrix lhs = h_eq(ch, full.u);
  CMatrix rhs = h_eq(ch, lift(small.u, red));
  CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
}

TEST_CASE("low_cost_baseline degenerate and SISO grid check") {
  CounterRng rng(9);
  MimoChannel blocked = unit_channel(CMatrix::Zero(2, 2),
                                     rng.cgaussian_matrix(2, 4),
                                     rng.cgaussian_matrix(2, 4));
  CHECK_THROWS_AS(low_cost_baseline(blocked), DegenerateBaseline);

  MimoChannel siso = unit_channel(scalar(rng.cgaussian()), scalar(rng.cgaussian()),
                                  scalar(rng.cgaussian()));
  UsPoint base = low_cost_baseline(siso);
  auto gain = [&](double phi) {
    return std::norm(siso.h_d(0, 0) +
                     siso.f(0, 0) * std::polar(1.0, phi) * std::conj(siso.g(0, 0)));
  };
  double grid = oracles::grid_argmax(gain);
  CHECK(oracles::phase_dist(std::arg(base.u(0, 0)), grid) <=
        2.0 * M_PI / 4096 + 1e-9);
}

TEST_CASE("sum-gain objective is invariant to transmit-power rescaling") {
  CounterRng rng(10);
  MimoChannel ch = unit_channel(rng.cgaussian_matrix(2, 2),
                                rng.cgaussian_matrix(2, 6),
                                rng.cgaussian_matrix(2, 6), 1.0);
  MimoChannel scaled = ch;
  scaled.snr_linear = 100.0;
  UsPoint u0 = random_point(6, 10);
  OptimConfig cfg;
  cfg.eps = 1e-9;
  cfg.eps_relative = true;
  auto [ua, ra] = optimize_po(*sumgain_cost(ch), u0, cfg);
  auto [ub, rb] = optimize_po(*sumgain_cost(scaled), u0, cfg);
  double fa = sumgain_cost(ch)->value(ua);
  double fb = sumgain_cost(ch)->value(ub);
  CHECK(std::abs(fa / fb - 1.0) <= 1e-9);
}
