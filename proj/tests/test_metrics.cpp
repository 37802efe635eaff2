#include "catch_amalgamated.hpp"

#include "cast/metrics.hpp"

#include "oracles.hpp"

namespace {
std::vector<int> random_labels(cast::Rng& rng, std::size_t n, int k) {
  std::vector<int> l(n);
  for (auto& v : l) v = static_cast<int>(rng.next_index(static_cast<std::size_t>(k)));
  return l;
}
}  // namespace

TEST_CASE("purity basics") {
  REQUIRE(cast::purity({0, 1, 0, 2}, {0, 1, 0, 2}) == 1.0);
  REQUIRE(cast::purity({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.5);
  REQUIRE(cast::purity({0, 0, 1, 1}, {0, 0, 0, 0}) == 0.5);
  REQUIRE_THROWS_AS(cast::purity({0, 1}, {0}), cast::ParameterError);
}

TEST_CASE("purity is 1 iff every predicted cluster sits inside one true cluster") {
  // refinement of the truth: still purity 1
  REQUIRE(cast::purity({0, 0, 0, 1, 1}, {0, 1, 1, 2, 2}) == 1.0);
  // a predicted cluster straddling two true clusters drops below 1
  REQUIRE(cast::purity({0, 0, 1, 1}, {0, 0, 0, 1}) < 1.0);
}

TEST_CASE("purity is not symmetric") {
  const std::vector<int> a{0, 1, 2};
  const std::vector<int> b{0, 0, 0};
  REQUIRE(cast::purity(a, b) == Catch::Approx(1.0 / 3.0));
  REQUIRE(cast::purity(b, a) == 1.0);
}

TEST_CASE("rand_index hand-counted cases") {
  REQUIRE(cast::rand_index({0, 1, 1, 0}, {0, 1, 1, 0}) == 1.0);
  REQUIRE(cast::rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == Catch::Approx(1.0 / 3.0));
  REQUIRE(cast::rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);  // relabeled truth
  REQUIRE_THROWS_AS(cast::rand_index({0}, {0}), cast::ParameterError);
}

TEST_CASE("ami identities") {
  REQUIRE(cast::ami({0, 0, 1, 1}, {0, 0, 1, 1}) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(cast::ami({0, 0, 1, 1}, {1, 1, 0, 0}) == Catch::Approx(1.0).margin(1e-12));
  // worked example: MI = 0, EMI = ln2/3, H = ln2 gives exactly -1/2
  REQUIRE(cast::ami({0, 0, 1, 1}, {0, 1, 0, 1}) == Catch::Approx(-0.5).margin(1e-12));
  // both single-cluster: 1.0 by convention
  REQUIRE(cast::ami({0, 0, 0}, {5, 5, 5}) == 1.0);
}

TEST_CASE("ami matches exact hypergeometric enumeration on small inputs") {
  cast::Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.next_index(11);  // n <= 12
    const int kt = 1 + static_cast<int>(rng.next_index(4));
    const int kp = 1 + static_cast<int>(rng.next_index(4));
    const auto truth = random_labels(rng, n, kt);
    const auto pred = random_labels(rng, n, kp);
    const double got = cast::ami(truth, pred);
    const double want = oracles::ami_exact_small(truth, pred);
    REQUIRE(got == Catch::Approx(want).margin(1e-10));
  }
}

TEST_CASE("purity and rand_index match brute-force enumeration") {
  cast::Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.next_index(99);
    const int kt = 1 + static_cast<int>(rng.next_index(5));
    const int kp = 1 + static_cast<int>(rng.next_index(5));
    const auto truth = random_labels(rng, n, kt);
    const auto pred = random_labels(rng, n, kp);
    REQUIRE(cast::purity(truth, pred) == oracles::purity_bruteforce(truth, pred));
    REQUIRE(cast::rand_index(truth, pred) == oracles::rand_index_bruteforce(truth, pred));
  }
}

TEST_CASE("metric invariances: relabeling, symmetry") {
  cast::Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + rng.next_index(40);
    const auto truth = random_labels(rng, n, 3);
    const auto pred = random_labels(rng, n, 4);

    // permute pred's label alphabet
    std::vector<int> perm{0, 1, 2, 3};
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng.next_index(i)]);
    std::vector<int> renamed(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) renamed[i] = perm[pred[i]];

    REQUIRE(cast::purity(truth, renamed) == cast::purity(truth, pred));
    REQUIRE(cast::rand_index(truth, renamed) == cast::rand_index(truth, pred));
    REQUIRE(cast::ami(truth, renamed) == Catch::Approx(cast::ami(truth, pred)).margin(1e-12));

    REQUIRE(cast::rand_index(truth, pred) ==
            Catch::Approx(cast::rand_index(pred, truth)).margin(1e-12));
    REQUIRE(cast::ami(truth, pred) == Catch::Approx(cast::ami(pred, truth)).margin(1e-12));
  }
}

TEST_CASE("ami is near zero for independent partitions on average") {
  cast::Rng rng(41);
  double sum = 0.0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const auto truth = random_labels(rng, 60, 3);
    const auto pred = random_labels(rng, 60, 3);
    sum += cast::ami(truth, pred);
  }
  REQUIRE(std::abs(sum / trials) < 0.02);
}
