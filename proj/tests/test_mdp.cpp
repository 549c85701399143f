#include <doctest.h>

#include <random>

#include "drmdp/mdp.hpp"
#include "oracles.hpp"

using namespace drmdp;

namespace {

Mdp two_state() {
  Matrix<double> kernel(4, 2);
  kernel << 0.5, 0.5, 1.0, 0.0, 0.2, 0.8, 0.0, 1.0;
  Vector<double> reward(4);
  reward << 1.0, 0.0, -1.0, 2.0;
  return Mdp(2, 2, kernel, reward, 0.9);
}

}  // namespace

TEST_CASE("mdp construction validates shapes and distributions") {
  const Mdp mdp = two_state();
  CHECK(mdp.dim() == 4);
  CHECK(mdp.index(1, 0) == 2);
  CHECK(mdp.r_max() == doctest::Approx(2.0));

  Matrix<double> kernel = mdp.kernel();
  Vector<double> reward = mdp.reward();
  auto kind_of = [](auto&& make) {
    try {
      make();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind_of([&] { Mdp(2, 2, kernel.topRows(3), reward, 0.9); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { Mdp(2, 2, kernel, reward.head(3), 0.9); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { Mdp(2, 2, kernel, reward, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { Mdp(2, 2, kernel, reward, 0.0); }) == ErrorKind::InvalidArgument);

  Matrix<double> negative = kernel;
  negative(0, 0) = -0.1;
  negative(0, 1) = 1.1;
  CHECK(kind_of([&] { Mdp(2, 2, negative, reward, 0.9); }) == ErrorKind::InvalidDistribution);

  Matrix<double> short_row = kernel;
  short_row(0, 0) = 0.4;
  CHECK(kind_of([&] { Mdp(2, 2, short_row, reward, 0.9); }) == ErrorKind::InvalidDistribution);
}

TEST_CASE("rows within 1e-9 of stochastic are renormalized") {
  Matrix<double> kernel(2, 2);
  kernel << 0.5 + 4e-10, 0.5, 0.25, 0.75;
  const Mdp mdp(2, 1, kernel, Vector<double>::Zero(2), 0.5);
  CHECK(mdp.kernel().row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mdp.with_gamma(0.8).gamma() == 0.8);
}

TEST_CASE("v_max and greedy on a hand-built table") {
  Vector<double> u(6);
  u << 1.0, 3.0, 2.0, 5.0, 5.0, -1.0;
  const auto v = v_max(u, 3);
  CHECK(v(0) == 3.0);
  CHECK(v(1) == 5.0);

  const auto pol = greedy(u, 3, 1e-9);
  CHECK(pol.action[0] == 1);
  CHECK(pol.action[1] == 0);  // lowest index among tied maximizers
  CHECK(pol.gap(0) == doctest::Approx(1.0));
  CHECK(pol.gap(1) == 0.0);
  REQUIRE(pol.tied_states.size() == 1);
  CHECK(pol.tied_states[0] == 1);

  const auto single = greedy(Vector<double>(Vector<double>::Ones(2)), 1, 0.0);
  CHECK(std::isinf(single.gap(0)));
  CHECK_FALSE(single.has_tie());
  CHECK_THROWS_AS(v_max(u, 4), Error);
}

TEST_CASE("span and sup-norm distance") {
  Vector<double> a(3), b(3);
  a << 1.0, -2.0, 4.0;
  b << 0.0, 0.0, 0.0;
  CHECK(span(a) == 6.0);
  CHECK(inf_norm_diff(a, b) == 4.0);
  CHECK_THROWS_AS(inf_norm_diff(a, Vector<double>(Vector<double>::Zero(2))), Error);
}

TEST_CASE("property: v_max is 1-Lipschitz and greedy is shift/scale invariant") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    Vector<double> u1(12), u2(12);
    for (Index i = 0; i < 12; ++i) {
      u1(i) = normal(rng);
      u2(i) = normal(rng);
    }
    CHECK(inf_norm_diff(v_max(u1, 4), v_max(u2, 4)) <= inf_norm_diff(u1, u2) + 1e-15);

    const double shift = 10.0 * normal(rng);
    const double scale = std::exp(normal(rng));
    const auto base = greedy(u1, 4, 0.0);
    const Vector<double> moved = (scale * u1.array() + shift).matrix();
    CHECK(greedy(moved, 4, 0.0).action == base.action);
    CHECK(span(moved) == doctest::Approx(scale * span(u1)));
    CHECK(span(Vector<double>(u1.array() + shift)) == doctest::Approx(span(u1)));
  }
}

TEST_CASE("templated scalar types instantiate") {
  Matrix<float> kernel(2, 1);
  kernel << 1.0f, 1.0f;
  const TabularMdp<float> mdp(1, 2, kernel, Vector<float>::Ones(2), 0.5f);
  Vector<float> u(2);
  u << 0.25f, 0.5f;
  CHECK(v_max(mdp, u)(0) == 0.5f);
  CHECK(greedy(mdp, u, 0.0f).action[0] == 1);
}
