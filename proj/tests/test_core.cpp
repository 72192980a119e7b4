#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "drate/core.hpp"
#include "drate/io/csv.hpp"
#include "drate/rng.hpp"
#include "drate/stats.hpp"

using namespace drate;
using Catch::Approx;

namespace {

core::CausalDataset small_dataset(int n = 10) {
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd a(n), y(n);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    x(i, 0) = rng::normal_at(rng::key(101, k));
    x(i, 1) = rng::normal_at(rng::key(102, k));
    a[i] = static_cast<double>(i % 2);
    y[i] = static_cast<double>(i);
  }
  return core::validate_dataset(x, a, y, {"x1", "x2"});
}

}  // namespace

TEST_CASE("validate_dataset enforces the data contract", "[core][validate]") {
  auto d = small_dataset();

  SECTION("well-formed input round-trips and gets fresh sequential ids") {
    for (std::size_t i = 0; i < d.ids.size(); ++i)
      REQUIRE(d.ids[i] == static_cast<std::uint64_t>(i));
    const auto again = core::validate_dataset(d.x, d.a, d.y, d.covariate_names);
    REQUIRE(again == d);
    REQUIRE(d.n() == 10);
    REQUIRE(d.p() == 2);
    REQUIRE(d.n_treated() == 5);
    REQUIRE(d.n_control() == 5);
  }
  SECTION("mismatched lengths") {
    REQUIRE_THROWS_AS(
        core::validate_dataset(d.x.topRows(9), d.a, d.y), core::DataError);
    REQUIRE_THROWS_AS(
        core::validate_dataset(d.x, d.a.head(9), d.y), core::DataError);
  }
  SECTION("too few rows or columns") {
    REQUIRE_THROWS_AS(core::validate_dataset(d.x.topRows(1), d.a.head(1),
                                             d.y.head(1)),
                      core::DataError);
    REQUIRE_THROWS_AS(
        core::validate_dataset(Eigen::MatrixXd(10, 0), d.a, d.y),
        core::DataError);
  }
  SECTION("non-finite values carry their own type") {
    auto xx = d.x;
    xx(3, 1) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(core::validate_dataset(xx, d.a, d.y),
                      core::NonFiniteError);
    auto yy = d.y;
    yy[0] = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(core::validate_dataset(d.x, d.a, yy),
                      core::NonFiniteError);
  }
  SECTION("treatment must be exactly zero or one") {
    auto aa = d.a;
    aa[4] = 0.5;
    REQUIRE_THROWS_AS(core::validate_dataset(d.x, aa, d.y),
                      core::NonBinaryTreatmentError);
  }
  SECTION("both arms must be populated") {
    REQUIRE_THROWS_AS(
        core::validate_dataset(d.x, Eigen::VectorXd::Ones(10), d.y),
        core::EmptyArmError);
    REQUIRE_THROWS_AS(
        core::validate_dataset(d.x, Eigen::VectorXd::Zero(10), d.y),
        core::EmptyArmError);
  }
}

TEST_CASE("arm rows are ordered by unit id, not row position", "[core]") {
  auto d = small_dataset();
  // reverse the id labels; rows stay put
  for (std::size_t i = 0; i < d.ids.size(); ++i)
    d.ids[i] = static_cast<std::uint64_t>(9 - i);
  const auto treated = d.arm_rows_by_id(1);  // rows 1,3,5,7,9
  const std::vector<Eigen::Index> expect{9, 7, 5, 3, 1};  // ids 0,2,4,6,8
  REQUIRE(treated == expect);
}

TEST_CASE("compensated summation survives catastrophic cancellation",
          "[core][stats]") {
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  REQUIRE(stats::ksum(v) == 2.0);
  Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(v.data(), 4);
  REQUIRE(stats::ksum(ev) == 2.0);
  REQUIRE(stats::ksum(ev.data(), 4) == 2.0);
  // plain left-to-right addition loses the small terms
  REQUIRE(((1e16 + 1.0) - 1e16) + 1.0 != 2.0);
}

TEST_CASE("sample quantiles interpolate linearly", "[core][stats]") {
  const std::vector<double> v{3.0, 1.0, 4.0, 2.0};  // unsorted on purpose
  REQUIRE(stats::quantile(v, 0.0) == 1.0);
  REQUIRE(stats::quantile(v, 1.0) == 4.0);
  REQUIRE(stats::quantile(v, 0.5) == Approx(2.5));
  REQUIRE(stats::quantile(v, 0.25) == Approx(1.75));
  REQUIRE(std::isnan(stats::quantile(std::vector<double>{}, 0.5)));
  Eigen::VectorXd ev(4);
  ev << 3, 1, 4, 2;
  REQUIRE(stats::quantile(ev, 0.25) == stats::quantile(v, 0.25));
}

TEST_CASE("variance and mean helpers", "[core][stats]") {
  Eigen::VectorXd v(4);
  v << 2, 4, 4, 6;
  REQUIRE(stats::mean(v) == Approx(4.0));
  REQUIRE(stats::variance(v) == Approx(8.0 / 3.0));
  REQUIRE(stats::sd(v) == Approx(std::sqrt(8.0 / 3.0)));
  Eigen::VectorXd one(1);
  one << 5;
  REQUIRE(std::isnan(stats::variance(one)));
}

TEST_CASE("expit and logit are stable inverses", "[core][stats]") {
  for (const double z : {-5.0, -0.3, 0.0, 2.0, 7.5})
    REQUIRE(stats::logit(stats::expit(z)) == Approx(z).margin(1e-12));
  REQUIRE(stats::expit(0.0) == 0.5);
  REQUIRE(stats::expit(800.0) == 1.0);   // no overflow
  REQUIRE(stats::expit(-800.0) == 0.0);  // no underflow blowup
  REQUIRE(stats::clamp01(-0.2, 0.01) == 0.01);
  REQUIRE(stats::clamp01(1.3, 0.01) == 0.99);
  REQUIRE(stats::clamp01(0.5, 0.01) == 0.5);
}

TEST_CASE("keyed draws are order-sensitive and reproduce stream positions",
          "[core][rng]") {
  REQUIRE(rng::key(1, 2) != rng::key(2, 1));
  REQUIRE(rng::key(1, 2, 3) != rng::key(1, 3, 2));
  REQUIRE(rng::mix(1) != rng::mix(2));

  rng::Stream s(42);
  for (std::uint64_t step = 0; step < 6; ++step)
    REQUIRE(rng::u01_stream_at(42, step) == s.u01());

  for (std::uint64_t k = 0; k < 50; ++k) {
    const double u = rng::u01_at(rng::key(7, k));
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double r = rng::rademacher_at(rng::key(7, k));
    REQUIRE((r == 1.0 || r == -1.0));
  }

  rng::Stream t(43);
  for (int i = 0; i < 1000; ++i) REQUIRE(t.below(13) < 13);
}

TEST_CASE("keyed normal draws have the right moments", "[core][rng]") {
  const int n = 10'000;
  Eigen::VectorXd z(n), r(n);
  for (int i = 0; i < n; ++i) {
    z[i] = rng::normal_at(rng::key(55, static_cast<std::uint64_t>(i)));
    r[i] = rng::rademacher_at(rng::key(56, static_cast<std::uint64_t>(i)));
  }
  REQUIRE(std::abs(stats::mean(z)) < 0.04);
  REQUIRE(stats::variance(z) == Approx(1.0).margin(0.08));
  REQUIRE(std::abs(stats::mean(r)) < 0.05);
}

TEST_CASE("fold assignment is balanced and keyed to ids", "[core][rng]") {
  const int n = 103, v = 5;
  std::vector<std::uint64_t> keys(n);
  for (int i = 0; i < n; ++i) keys[static_cast<std::size_t>(i)] = 1000 + i;

  const auto fold = rng::fold_assignment(9, keys, v);
  std::vector<int> count(v, 0);
  for (const int f : fold) {
    REQUIRE(f >= 0);
    REQUIRE(f < v);
    ++count[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
  REQUIRE(*hi - *lo <= 1);

  // same ids in a different row order get the same folds
  auto shuffled = keys;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto fold2 = rng::fold_assignment(9, shuffled, v);
  std::map<std::uint64_t, int> by_key;
  for (int i = 0; i < n; ++i)
    by_key[keys[static_cast<std::size_t>(i)]] =
        fold[static_cast<std::size_t>(i)];
  for (int i = 0; i < n; ++i)
    REQUIRE(fold2[static_cast<std::size_t>(i)] ==
            by_key[shuffled[static_cast<std::size_t>(i)]]);

  REQUIRE(rng::fold_assignment(10, keys, v) != fold);
}

TEST_CASE("csv formatting round-trips doubles exactly", "[core][csv]") {
  for (const double v : {0.1, -3.5e-7, 12345.6789, 1e300, 0.0, -2.0}) {
    double back = 0.0;
    REQUIRE(io::parse_double(io::fmt(v), back));
    REQUIRE(back == v);
  }
  double out = 0.0;
  REQUIRE_FALSE(io::parse_double("", out));
  REQUIRE_FALSE(io::parse_double("NA", out));
  REQUIRE_FALSE(io::parse_double("nan", out));
  REQUIRE_FALSE(io::parse_double("1e999", out));
  REQUIRE_FALSE(io::parse_double("3.5abc", out));
  REQUIRE(io::parse_double("  42 ", out));
  REQUIRE(out == 42.0);
}

TEST_CASE("csv line splitting", "[core][csv]") {
  const auto f = io::split_csv_line("a,b,,d\r");
  REQUIRE(f == std::vector<std::string>{"a", "b", "", "d"});
  REQUIRE(io::split_csv_line("") == std::vector<std::string>{""});
  REQUIRE(io::split_csv_line("x") == std::vector<std::string>{"x"});
}
