#include <cmath>
#include <sstream>

#include "doctest.h"

#include "ncguard/cost.hpp"
#include "ncguard/intermac.hpp"
#include "ncguard/overhead.hpp"
#include "ncguard/protocols.hpp"

using namespace ncguard;

namespace {

template <class Fn>
Errc error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ncguard::Error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("offline bits at the default parameters") {
  OverheadParams p;
  // 20 * 1124 * 256 + 500 * 4 * 128
  CHECK(offline_bits(OverheadScheme::InterMacCpk, p) == doctest::Approx(5754880.0 + 256000.0));
  CHECK(offline_bits(OverheadScheme::SpaceMacPm, p) == doctest::Approx(5.0 * 1124 * 256));
  CHECK(offline_bits(OverheadScheme::Hash, p) == doctest::Approx(500.0 * 100 * 288));
  CHECK(error_code([&] { offline_bits(OverheadScheme::Baseline, p); }) == Errc::InvalidArgument);
  CHECK(bandwidth_saved(OverheadScheme::InterMacCpk, p) == doctest::Approx(1 - 6010880.0 / 65536000.0));
  CHECK(bandwidth_saved(OverheadScheme::InterMacCpk, p) > 0.90);
}

TEST_CASE("per-source-packet overhead spans 36% to 1%") {
  OverheadParams lo, hi;
  lo.q_bits = 32;
  hi.q_bits = 256;
  CHECK(std::round(100 * offline_per_source_packet(OverheadScheme::InterMacCpk, lo)) == 36);
  CHECK(std::round(100 * offline_per_source_packet(OverheadScheme::SpaceMacPm, hi)) == 1);
  CHECK(bandwidth_saved(OverheadScheme::SpaceMacPm, hi) == doctest::Approx(0.989).epsilon(0.002));
}

TEST_CASE("online overhead") {
  OverheadParams p;
  CHECK(online_single_tag(p) == doctest::Approx(1.0 / 1024));
  CHECK(online_ripple(p) == doctest::Approx(16.0 / 2048));
  CHECK(online_baseline(p) / online_ripple(p) == doctest::Approx(65600.0 / 2048.0));
  p.n = 267;
  CHECK(online_ripple(p) == doctest::Approx(0.03).epsilon(0.01));
}

TEST_CASE("compute cost") {
  OverheadParams p;
  const auto mac = compute_cost(OverheadScheme::SpaceMacPm, p);
  CHECK(mac.mults == doctest::Approx(1561.5));
  CHECK(mac.seconds == doctest::Approx(1561.5 / 2.5e5));
  const auto sig = compute_cost(OverheadScheme::Baseline, p);
  CHECK(sig.mults == doctest::Approx(192.0 * 1279));
  CHECK(sig.mults / mac.mults >= 100);
  const auto hash = compute_cost(OverheadScheme::Hash, p);
  CHECK(hash.mults == doctest::Approx(0.5 * 192 * 1274 + 40));
  CHECK(hash.mults / sig.mults == doctest::Approx(0.5).epsilon(0.1));
  p.decodable = 1;
  CHECK(compute_cost(OverheadScheme::Hash, p).mults == doctest::Approx(80));
}

TEST_CASE("parameter validation") {
  OverheadParams p;
  p.modulus_bits = 64;
  CHECK(error_code([&] { p.validate(); }) == Errc::InvalidArgument);
  p = {};
  p.n = 0;
  CHECK(error_code([&] { online_ripple(p); }) == Errc::InvalidArgument);
  p = {};
  p.decodable = 1.5;
  CHECK(error_code([&] { compute_cost(OverheadScheme::Hash, p); }) == Errc::InvalidArgument);
}

TEST_CASE("curve relations") {
  auto f5 = curve_dump("fig5");
  REQUIRE(f5.rows.size() == 8);
  for (std::size_t k = 1; k < f5.rows.size(); ++k) {
    CHECK(f5.rows[k][1] > f5.rows[k - 1][1]);
    CHECK(f5.rows[k][2] > f5.rows[k - 1][2]);
  }
  for (const auto& row : curve_dump("fig6").rows) {
    CHECK(row[1] < row[3]);
    CHECK(row[2] < row[3]);
  }
  auto f7 = curve_dump("fig7");
  for (const auto& row : f7.rows) {
    CHECK(row[1] < row[3]);
    CHECK(row[3] < row[5]);
    CHECK(std::round(row[2]) >= 4);
    CHECK(std::round(row[2]) <= 6);
  }
  CHECK(error_code([] { curve_dump("fig9"); }) == Errc::InvalidArgument);
}

TEST_CASE("csv output") {
  std::ostringstream out;
  curve_dump("fig7").write_csv(out);
  const auto text = out.str();
  CHECK(text.rfind("n,mac_mults,mac_ms,hash_mults,hash_ms,baseline_mults,baseline_ms\n", 0) == 0);
  CHECK(text.find("1024,1561.5,6.246,") != std::string::npos);
}

TEST_CASE("measured verify cost is exactly n + m multiplications per tag") {
  Rng rng(3);
  for (std::uint64_t q : {251ull, 1048573ull}) {
    Gf f(q);
    for (std::size_t n : {4u, 16u, 33u}) {
      GenerationParams params(f, 3, 2, n);
      const auto id = SpaceId::random(rng);
      const auto k = PrfKey::random(rng);
      SpaceMacVerifier v(k, id, params);
      Packet y(id, params, random_vector(f, params.width(), rng));
      y.tag = v.mac(y);
      cost::Scope scope;
      CHECK(v.verify(y));
      CHECK(scope.elapsed().field_mults == n + params.m());

      KeySum sum{{0}, {random_vector(f, params.width(), rng)}};
      cost::Scope scope2;
      (void)verify(sum, y);
      CHECK(scope2.elapsed().field_mults == n + params.m());
    }
  }
}

TEST_CASE("bench") {
  for (const char* op : {"mult", "exp"}) {
    auto r = bench(op, 128, 0.01);
    CHECK(r.ops > 0);
    CHECK(r.rate > 0);
    CHECK(r.q_bits == 128);
  }
  CHECK(error_code([] { bench("add", 128); }) == Errc::InvalidArgument);
}
