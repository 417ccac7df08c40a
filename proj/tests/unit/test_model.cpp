#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "ncorr/model.hpp"
#include "ncorr/rng.hpp"

using namespace ncorr;

TEST_SUITE_BEGIN("model");

TEST_CASE("alphabet maps round-trip and reject outsiders") {
  gf::Field f8(3);
  const auto ident = model::AlphabetMap::identity(f8);
  CHECK(ident.to_field(3) == 3);
  CHECK(ident.from_field(3) == 3);

  const auto shifted = model::AlphabetMap::offset_range(f8, -4, 3);
  CHECK(shifted.to_field(-4) == 0);
  CHECK(shifted.to_field(3) == 7);
  for (int x = -4; x <= 3; ++x) {
    CHECK(shifted.from_field(shifted.to_field(x)) == x);
  }
  CHECK_THROWS_AS(shifted.to_field(4), std::domain_error);
  CHECK_THROWS_AS(shifted.from_field(9), std::domain_error);

  gf::Field f4(2);
  CHECK_THROWS_AS(model::AlphabetMap::offset_range(f4, 0, 7), std::invalid_argument);
  // non-injective forward map
  CHECK_THROWS_AS(model::AlphabetMap({0, 1}, f4, {2, 2}), std::invalid_argument);
}

TEST_CASE("laplacian noise pmf values and symmetry") {
  // untruncated normalization: g(0) = (1-p)/(1+p)
  const auto wide = model::laplacian_noise_pmf(0.5, 60);
  CHECK(wide.at(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  for (int w = 1; w <= 10; ++w) CHECK(wide.at(w) == doctest::Approx(wide.at(-w)));

  // radius 1: masses {1/3, 1/6, 1/6} rescale to {1/2, 1/4, 1/4}
  const auto narrow = model::laplacian_noise_pmf(0.5, 1);
  CHECK(narrow.at(0) == doctest::Approx(0.5));
  CHECK(narrow.at(1) == doctest::Approx(0.25));
  CHECK(narrow.at(-1) == doctest::Approx(0.25));
  CHECK(narrow.total() == doctest::Approx(1.0));
  CHECK(narrow.at(2) == 0.0);

  CHECK_THROWS_AS(model::laplacian_noise_pmf(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(model::laplacian_noise_pmf(1.0, 3), std::invalid_argument);
}

TEST_CASE("chain laplacian conditionals") {
  const auto f = model::chain_laplacian_model(4, 0.5, 2);
  const auto& k = f.kernel();
  // conditional from state 0: weights {1, 0.5} -> {2/3, 1/3}
  CHECK(k[0] == doctest::Approx(2.0 / 3.0));
  CHECK(k[1] == doctest::Approx(1.0 / 3.0));

  SUBCASE("rows sum to one") {
    for (std::size_t q : {2u, 5u, 32u}) {
      const auto m = model::chain_laplacian_model(3, 0.3, q);
      for (std::size_t r = 0; r < q; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < q; ++c) s += m.kernel()[r * q + c];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  SUBCASE("tiny p concentrates on the previous symbol") {
    const auto m = model::chain_laplacian_model(3, 1e-6, 8);
    for (std::size_t r = 0; r < 8; ++r) {
      CHECK(m.kernel()[r * 8 + r] == doctest::Approx(1.0).epsilon(1e-5));
    }
  }

  SUBCASE("reflection symmetry of the conditionals") {
    const std::size_t q = 7;
    const auto m = model::chain_laplacian_model(3, 0.4, q);
    for (std::size_t r = 0; r < q; ++r) {
      for (std::size_t c = 0; c < q; ++c) {
        CHECK(m.kernel()[r * q + c] ==
              doctest::Approx(m.kernel()[(q - 1 - r) * q + (q - 1 - c)]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("explicit tables validate mass") {
  CHECK_THROWS_AS(model::JointPmf::explicit_table(1, 2, {0.5, 0.499}), std::invalid_argument);
  CHECK_THROWS_AS(model::JointPmf::explicit_table(1, 2, {1.2, -0.2}), std::invalid_argument);
  const auto f = model::JointPmf::explicit_table(2, 2, {0.5, 0.2, 0.1, 0.2});
  const int cfg01[] = {0, 1};
  CHECK(f.prob(cfg01) == doctest::Approx(0.2));
  const auto m0 = f.marginal(0);
  CHECK(m0[0] == doctest::Approx(0.7));
  const auto m1 = f.marginal(1);
  CHECK(m1[1] == doctest::Approx(0.4));
}

TEST_CASE("chain marginals and explicit expansion agree") {
  const auto f = model::chain_laplacian_model(5, 0.3, 4);
  const auto g = f.to_explicit();
  for (std::size_t i = 0; i < 5; ++i) {
    const auto a = f.marginal(i);
    const auto b = g.marginal(i);
    for (std::size_t k = 0; k < 4; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-9));
  }
  CHECK(f.entropy_bits() == doctest::Approx(g.entropy_bits()).epsilon(1e-9));
}

TEST_CASE("lifting preserves support, mass and entropy") {
  gf::Field f8(3);
  const auto map4in8 = model::AlphabetMap::offset_range(f8, 0, 3);
  const auto f = model::chain_laplacian_model(2, 0.25, 4);

  const auto lifted = model::lift_marginal(f, map4in8, 1);
  REQUIRE(lifted.size() == 8);
  std::size_t nonzero = 0;
  double mass = 0.0;
  for (double v : lifted) {
    if (v > 0.0) ++nonzero;
    mass += v;
  }
  CHECK(nonzero == 4);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  const auto joint = model::lift_joint(f, map4in8);
  REQUIRE(joint.size() == 64);
  double jm = 0.0;
  for (double v : joint) jm += v;
  CHECK(jm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model::entropy_bits(joint) ==
        doctest::Approx(f.to_explicit().entropy_bits()).epsilon(1e-9));

  SUBCASE("uniform source keeps its entropy under lifting") {
    const auto u = model::JointPmf::explicit_table(1, 4, {0.25, 0.25, 0.25, 0.25});
    const auto lifted_u = model::lift_joint(u, map4in8);
    CHECK(model::entropy_bits(lifted_u) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("correlation graph bookkeeping") {
  model::CorrelationGraph corr(4);
  corr.add_edge(0, 2, model::laplacian_noise_pmf(0.5, 3));
  CHECK(corr.correlated(0, 2));
  CHECK(corr.correlated(2, 0));
  CHECK_FALSE(corr.correlated(0, 1));
  CHECK(corr.edge_count() == 1);
  CHECK_THROWS_AS(corr.add_edge(2, 0, model::laplacian_noise_pmf(0.5, 3)), std::invalid_argument);

  // asymmetric pmf flips under direction reversal
  model::EdgeNoisePmf skew;
  skew.min_diff = -1;
  skew.mass = {0.2, 0.3, 0.5};
  model::CorrelationGraph g2(2);
  g2.add_edge(0, 1, skew);
  CHECK(g2.noise(0, 1)->at(1) == doctest::Approx(0.5));
  CHECK(g2.noise(1, 0)->at(-1) == doctest::Approx(0.5));
  CHECK(g2.noise(1, 0)->at(1) == doctest::Approx(0.2));

  model::EdgeNoisePmf bad = skew;
  bad.mass[0] = 0.21;  // mass 1.01
  CHECK_THROWS_AS(g2.add_edge(0, 1, bad), std::invalid_argument);
}

TEST_CASE("chain sampling matches the model statistics") {
  const auto f = model::chain_laplacian_model(2, 0.2, 4);
  std::mt19937_64 g = rng::make_stream(7);
  std::vector<std::size_t> hist(4, 0);
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const auto x = f.sample(g);
    ++hist[static_cast<std::size_t>(x[0])];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(static_cast<double>(hist[k]) / n == doctest::Approx(0.25).epsilon(0.02));
  }
}

TEST_SUITE_END();
