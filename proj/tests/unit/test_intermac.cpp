#include "doctest.h"
#include "hash_fixture.hpp"
#include "oracles.hpp"

#include <sstream>

#include "ncguard/intermac.hpp"

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

std::vector<std::uint64_t> coeffs(const Gf& f, std::size_t k, Rng& rng) {
  std::vector<std::uint64_t> c(k);
  for (auto& x : c) x = f.random(rng);
  return c;
}

std::vector<Packet> signed_basis(const SourceSpace& space, const KeySet& keys) {
  auto b = space.basis();
  for (std::size_t k = 0; k < b.size(); ++k) b[k].tag = sign(keys, space.params().source_of(k), b[k]);
  return b;
}

}  // namespace

TEST_CASE("toy trace over F_5") {
  Gf f(5);
  GenerationParams p(f, 2, 1, 1);
  const auto id = SpaceId::derive("toy");
  std::vector<std::vector<GfVector>> data{{GfVector(f, {2})}, {GfVector(f, {3})}};
  auto space = SourceSpace::from_data(id, p, data);
  CHECK(space.packet(0, 0).symbols() == GfVector(f, {2, 1, 0}));

  const std::vector<GfVector> basis1{GfVector(f, {1, 0, 2}), GfVector(f, {0, 1, 0})};
  const std::uint64_t r[] = {2, 3};
  auto k1 = key_from_basis(basis1, r);
  CHECK(k1 == GfVector(f, {2, 3, 4}));
  CHECK(dot(k1, space.packet(1, 0).symbols()) == 0);
  const GfVector k2(f, {1, 3, 1});
  CHECK(dot(k2, space.packet(0, 0).symbols()) == 0);

  CHECK(sign(k1, space.packet(0, 0)) == 2);
  CHECK(sign(k2, space.packet(1, 0)) == 4);
  CHECK(sign(k1, Packet(id, p)) == 0);

  std::vector<Tag> tags{Tag{{2}}, Tag{{4}}};
  const std::uint64_t ones[] = {1, 1};
  CHECK(combine_tags(tags, ones, f) == Tag{{1}});
  const std::uint64_t zeros[] = {0, 0};
  CHECK(combine_tags(tags, zeros, f) == Tag{{0}});
  const std::uint64_t one[] = {1};
  CHECK(combine_tags(std::span(tags).first(1), one, f) == Tag{{2}});

  KeySet keys({{k1}, {k2}});
  auto sum = keys.full_sum();
  CHECK(sum.slots[0] == GfVector(f, {3, 1, 0}));
  auto y = combine(space.basis(), ones);
  CHECK(y.symbols() == GfVector(f, {0, 1, 1}));
  CHECK(verify(sum, y, Tag{{1}}));
  CHECK_FALSE(verify(sum, y, Tag{{2}}));

  // the library's own basis for M_1 spans the same space as the hand-picked one
  auto lib_basis = key_basis(space, 0);
  REQUIRE(lib_basis.size() == 2);
  for (const auto& b : basis1) CHECK(in_row_space(GfMatrix::from_rows(f, 3, lib_basis), b));
}

TEST_CASE("gen keys annihilate foreign packets and have the right shape") {
  Rng rng(3);
  for (std::uint64_t q : {251ull, 2147483647ull}) {
    Gf f(q);
    for (int trial = 0; trial < 30; ++trial) {
      GenerationParams p(f, 2 + trial % 4, 1 + trial % 5, 1 + (trial * 7) % 20);
      auto space = SourceSpace::from_data(SpaceId::random(rng), p, testfx::make_data(p, rng));
      if (space.rank() < p.m()) continue;
      CHECK(key_basis(space, 0).size() == p.n + p.g);
      auto keys = gen(space.id(), PrfKey::random(rng), space, 1 + trial % 2);
      CHECK(keys.dim() == p.n + p.m());
      for (std::size_t owner = 0; owner < p.s; ++owner)
        for (std::size_t slot = 0; slot < keys.slots(); ++slot)
          for (std::size_t i = 0; i < p.s; ++i) {
            if (i == owner) continue;
            for (std::size_t j = 0; j < p.g; ++j)
              CHECK(oracle::dot(keys.key(owner, slot).values(), space.packet(i, j).symbols().values(), q) == 0);
          }
    }
  }
}

TEST_CASE("gen is deterministic in (key, id) and differs across keys") {
  Gf f(65521);
  Rng rng(4);
  GenerationParams p(f, 3, 2, 5);
  auto space = SourceSpace::from_data(SpaceId::random(rng), p, testfx::make_data(p, rng));
  const auto k = PrfKey::random(rng);
  auto a = gen(space.id(), k, space), b = gen(space.id(), k, space);
  auto c = gen(space.id(), PrfKey::random(rng), space);
  CHECK(a.key(1) == b.key(1));
  CHECK_FALSE(a.key(1) == c.key(1));
}

TEST_CASE("end-to-end correctness for random coefficients") {
  Rng rng(5);
  Gf f(2147483647);
  for (int trial = 0; trial < 40; ++trial) {
    GenerationParams p(f, 2 + trial % 3, 1 + trial % 4, 3 + trial % 8);
    auto space = SourceSpace::from_data(SpaceId::random(rng), p, testfx::make_data(p, rng));
    auto keys = gen(space.id(), PrfKey::random(rng), space, 1 + trial % 3);
    auto basis = signed_basis(space, keys);
    const auto sum = keys.full_sum();
    for (const auto& b : basis) CHECK(verify(sum, b));
    auto y = combine_signed(basis, coeffs(f, p.m(), rng));
    CHECK(verify(sum, y));
    // two levels of mixing
    std::vector<Packet> mid{y, combine_signed(basis, coeffs(f, p.m(), rng))};
    CHECK(verify(sum, combine_signed(mid, coeffs(f, 2, rng))));
    auto bad = y;
    bad.symbols().raw()[0] = f.add(bad.symbols()[0], 1);
    CHECK_FALSE(verify(sum, bad));  // fails only with probability q^-slots
  }
}

TEST_CASE("partial key sums") {
  // four sources, at most M = 2 of them malicious: receivers hold three keys
  Rng rng(6);
  Gf f(2147483647);
  GenerationParams p(f, 4, 2, 6);
  auto space = SourceSpace::from_data(SpaceId::random(rng), p, testfx::make_data(p, rng));
  auto keys = gen(space.id(), PrfKey::random(rng), space);
  auto basis = signed_basis(space, keys);
  const std::size_t r1[] = {0, 1, 2};
  auto partial = partial_key_sum(keys, r1, 2);
  const auto full = keys.full_sum();

  for (int t = 0; t < 20; ++t) {
    // benign traffic from S1 and S2 only
    std::vector<std::uint64_t> c(p.m(), 0);
    for (std::size_t k = 0; k < 2 * p.g; ++k) c[k] = f.random(rng);
    auto y = combine_signed(basis, c);
    CHECK(verify(partial, y) == verify(full, y));
    CHECK(verify(partial, y));
    auto bad = y;
    bad.symbols().raw()[1] = f.add(bad.symbols()[1], 3);
    CHECK(verify(partial, bad) == false);
  }
  const std::size_t all[] = {0, 1, 2, 3};
  CHECK(partial_key_sum(keys, all, 2).slots == full.slots);
  const std::size_t two[] = {0, 1};
  CHECK(error_code([&] { partial_key_sum(keys, two, 2); }) == Errc::SubsetTooSmall);
  const std::size_t dup[] = {0, 0, 1};
  CHECK(error_code([&] { partial_key_sum(keys, dup, 2); }) == Errc::InvalidArgument);
}

TEST_CASE("degenerate committed space") {
  Gf f(251);
  GenerationParams p(f, 2, 1, 2);
  std::vector<Packet> basis{augment(GfVector(f, {1, 2}), 0, 0, p, SpaceId::derive("d")),
                            augment(GfVector(f, {1, 2}), 0, 0, p, SpaceId::derive("d"))};
  SourceSpace space(p, basis);
  Rng rng(1);
  CHECK(error_code([&] { gen(space.id(), PrfKey::random(rng), space); }) == Errc::DegenerateSpace);
}

TEST_CASE("key distribution file round-trips") {
  Gf f(65521);
  Rng rng(7);
  GenerationParams p(f, 3, 1, 4);
  auto space = SourceSpace::from_data(SpaceId::random(rng), p, testfx::make_data(p, rng));
  auto keys = gen(space.id(), PrfKey::random(rng), space, 2);
  const std::size_t sub[] = {0, 2};
  std::vector<std::pair<std::string, KeySum>> sums{{"R1", keys.full_sum()}, {"R2", keys.sum(sub)}};
  std::stringstream ss;
  write_key_sums(ss, sums);
  auto back = read_key_sums(ss, f);
  REQUIRE(back.size() == 2);
  CHECK(back[1].first == "R2");
  CHECK(back[1].second.subset == std::vector<std::size_t>{0, 2});
  CHECK(back[1].second.slots == sums[1].second.slots);
}

TEST_CASE("attack game 1 smoke runs") {
  GameConfig cfg;
  cfg.trials = 20000;
  cfg.seed = 9;
  auto rt = attack_game_1(cfg);
  CHECK(rt.trials == 20000);
  CHECK(rt.within_sigmas(3));

  cfg.strategy = ForgeryStrategy::Algebraic;
  cfg.seed = 10;
  auto alg = attack_game_1(cfg);
  CHECK(alg.within_sigmas(3));
}
