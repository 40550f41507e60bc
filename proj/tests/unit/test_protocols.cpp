#include "doctest.h"
#include "hash_fixture.hpp"
#include "oracles.hpp"

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

const IpChannel& channel(std::uint64_t q) {
  static std::map<std::uint64_t, IpChannel> cache;
  auto it = cache.find(q);
  if (it == cache.end()) {
    Rng rng(q);
    it = cache.emplace(q, IpChannel::benaloh(benaloh_keygen(q, 256, rng))).first;
  }
  return it->second;
}

std::vector<std::vector<GfVector>> random_sources(const Gf& f, std::size_t s, std::size_t g, std::size_t n,
                                                  Rng& rng) {
  GenerationParams p(f, s, g, n);
  return testfx::make_data(p, rng);
}

std::vector<std::uint64_t> coeffs(const Gf& f, std::size_t k, Rng& rng) {
  std::vector<std::uint64_t> c(k);
  for (auto& x : c) x = f.random(rng);
  return c;
}

}  // namespace

TEST_CASE("padding solves the toy system") {
  Gf f(5);
  const GfVector r2(f, {1, 2, 4, 1});
  const std::uint64_t ip[] = {3};  // r2's data part (1) times v = (3)
  auto x = solve_padding(std::span(&r2, 1), ip, 1, 2, 0);
  CHECK(x == GfVector(f, {4}));
  const GfVector padded(f, {3, 4, 1, 0});
  CHECK(dot(r2, padded) == 0);

  const GfVector zero_block(f, {1, 0, 4, 1});
  CHECK(error_code([&] { solve_padding(std::span(&zero_block, 1), ip, 1, 2, 0); }) == Errc::SingularPaddingSystem);
}

TEST_CASE("cpk over a private channel: orthogonality and layout") {
  Rng rng(1);
  for (std::uint64_t q : {251ull, 65521ull}) {
    Gf f(q);
    for (int trial = 0; trial < 6; ++trial) {
      const std::size_t s = 2 + trial % 3, g = 1 + trial % 3, n = 2 + trial % 4;
      auto data = random_sources(f, s, g, n, rng);
      const auto id = SpaceId::random(rng);
      Transcript log;
      auto res = cpk_run(PrfKey::random(rng), id, f, data, channel(q), rng, &log);
      CHECK(res.participants.size() == s);
      CHECK(res.params.width() == n + s - 1 + s * g);
      CHECK(res.keys.dim() == n + s - 1 + s * g);
      for (std::size_t pos = 0; pos < res.packets.size(); ++pos) {
        const auto& p = res.packets[pos];
        CHECK(p.data() == data[pos / g][pos % g]);
        CHECK(p.unit_position() == pos);
        for (std::size_t a = 0; a < s; ++a) {
          if (a == pos / g) continue;
          CHECK(oracle::dot(res.keys.key(a).values(), p.symbols().values(), q) == 0);
        }
      }
      // the controller's vectors never appear in the sources' view: every
      // source-bound message is ciphertext, padding or the public key
      for (const auto& rec : log.records())
        if (rec.receiver != "controller")
          CHECK((rec.kind == MsgKind::EncryptedVector || rec.kind == MsgKind::Padding ||
                 rec.kind == MsgKind::PublicKey));
    }
  }
}

TEST_CASE("cpk keys work as multi-source MAC keys and match gen keys") {
  Rng rng(2);
  Gf f(251);
  for (int trial = 0; trial < 5; ++trial) {
    auto data = random_sources(f, 3, 2, 4, rng);
    const auto id = SpaceId::random(rng);
    auto res = cpk_run(PrfKey::random(rng), id, f, data, channel(251), rng);
    auto space = res.space();
    auto gen_keys = gen(id, PrfKey::random(rng), space);
    for (const KeySet* keys : {&res.keys, &gen_keys}) {
      auto basis = res.packets;
      for (std::size_t k = 0; k < basis.size(); ++k) basis[k].tag = sign(*keys, res.params.source_of(k), basis[k]);
      const auto sum = keys->full_sum();
      auto y = combine_signed(basis, coeffs(f, basis.size(), rng));
      CHECK(verify(sum, y));
      for (const auto& b : basis) CHECK(verify(sum, b));
    }
  }
}

TEST_CASE("cpk excludes a source whose reply does not decrypt") {
  Rng rng(3);
  Gf f(251);
  auto data = random_sources(f, 3, 2, 3, rng);
  for (auto bad : {SourceBehavior::Malformed, SourceBehavior::Withhold}) {
    CpkOptions opts;
    opts.behavior = {SourceBehavior::Honest, bad, SourceBehavior::Honest};
    auto res = cpk_run(PrfKey::random(rng), SpaceId::random(rng), f, data, channel(251), rng, nullptr, opts);
    CHECK(res.participants == std::vector<std::size_t>{0, 2});
    CHECK(res.excluded == std::vector<std::size_t>{1});
    CHECK(res.params.s == 2);
    CHECK(res.packets[2].data() == data[2][0]);
    CHECK(oracle::dot(res.keys.key(0).values(), res.packets[2].symbols().values(), 251) == 0);
  }
  CpkOptions all_bad;
  all_bad.behavior = {SourceBehavior::Malformed, SourceBehavior::Malformed, SourceBehavior::Honest};
  CHECK(error_code([&] { cpk_run(PrfKey::random(rng), SpaceId::random(rng), f, data, channel(251), rng, nullptr, all_bad); }) ==
        Errc::DecryptionFailure);
}

TEST_CASE("cpk over a clear channel for large fields") {
  Rng rng(4);
  Gf f(2147483647);
  auto data = random_sources(f, 4, 3, 8, rng);
  auto res = cpk_run(PrfKey::random(rng), SpaceId::random(rng), f, data, IpChannel::clear(f), rng);
  for (std::size_t pos = 0; pos < res.packets.size(); ++pos)
    for (std::size_t a = 0; a < 4; ++a)
      if (a != pos / 3) CHECK(dot(res.keys.key(a), res.packets[pos].symbols()) == 0);
}

TEST_CASE("cpk is deterministic in the key and rejects mismatched channels") {
  Rng rng(5);
  Gf f(251);
  auto data = random_sources(f, 2, 1, 2, rng);
  const auto k = PrfKey::random(rng);
  const auto id = SpaceId::random(rng);
  auto a = cpk_run(k, id, f, data, channel(251), rng);
  auto b = cpk_run(k, id, f, data, channel(251), rng);
  CHECK(a.packets == b.packets);
  CHECK(a.keys.key(1) == b.keys.key(1));
  Gf other(65521);
  auto d2 = random_sources(other, 2, 1, 2, rng);
  CHECK(error_code([&] { cpk_run(k, id, other, d2, channel(251), rng); }) == Errc::ModulusMismatch);
}

TEST_CASE("spacemac toy value and properties") {
  Gf f(7);
  GenerationParams p(f, 2, 1, 2);
  const auto id = SpaceId::derive("sm");
  const std::vector<GfVector> r{GfVector(f, {1, 2, 3, 4})};
  auto v = augment(GfVector(f, {2, 3}), 0, 0, p, id);
  CHECK(spacemac_mac_with(r, v) == Tag{{4}});
  CHECK(spacemac_mac_with(r, Packet(id, p)) == Tag{{0}});
  const std::vector<GfVector> r3{GfVector(f, {1, 2, 3})};
  CHECK(error_code([&] { spacemac_mac_with(r3, v); }) == Errc::DimMismatch);

  Rng rng(6);
  Gf big(2147483647);
  GenerationParams bp(big, 3, 2, 6);
  auto space = SourceSpace::from_data(SpaceId::random(rng), bp, testfx::make_data(bp, rng));
  const auto key = PrfKey::random(rng);
  auto basis = space.basis();
  for (auto& b : basis) b.tag = spacemac_mac(key, b, 2);
  for (int t = 0; t < 20; ++t) {
    auto c = coeffs(big, basis.size(), rng);
    auto y = combine(basis, c);
    std::vector<Tag> tags;
    for (const auto& b : basis) tags.push_back(b.tag);
    y.tag = spacemac_combine(tags, c, big);
    CHECK(spacemac_verify(key, y, y.tag));
    CHECK(SpaceMacVerifier(key, space.id(), bp, 2).verify(y));
    auto bad = y;
    bad.symbols().raw()[0] = big.add(bad.symbols()[0], 1);
    CHECK_FALSE(spacemac_verify(key, bad, y.tag));
  }
}

TEST_CASE("pm tags equal direct tags") {
  Rng rng(7);
  for (std::uint64_t q : {7ull, 251ull}) {
    Gf f(q);
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t s = 2 + trial % 2, g = 1 + trial % 5, n = 2 + trial % 3;
      auto data = random_sources(f, s, g, n, rng);
      const auto id = SpaceId::random(rng);
      const auto key = PrfKey::random(rng);
      auto res = pm_run(key, id, f, data, channel(q), rng);
      CHECK(res.missing.empty());
      auto space = SourceSpace::from_data(id, res.params, data);
      for (std::size_t pos = 0; pos < res.params.m(); ++pos) {
        REQUIRE(res.tags[pos].has_value());
        CHECK(*res.tags[pos] == spacemac_mac(key, space.basis()[pos]));
        CHECK(spacemac_verify(key, space.basis()[pos], *res.tags[pos]));
      }
    }
  }
}

TEST_CASE("pm s = 3, g = 5: every tag verifies; misbehaving sources get none") {
  Rng rng(8);
  Gf f(251);
  auto data = random_sources(f, 3, 5, 4, rng);
  const auto id = SpaceId::random(rng);
  const auto key = PrfKey::random(rng);
  PmOptions opts;
  opts.behavior = {SourceBehavior::Honest, SourceBehavior::Withhold, SourceBehavior::Malformed};
  Transcript log;
  auto res = pm_run(key, id, f, data, channel(251), rng, &log, opts);
  CHECK(res.missing.size() == 10);
  auto space = SourceSpace::from_data(id, res.params, data);
  for (std::size_t pos = 0; pos < 15; ++pos) {
    if (pos < 5) {
      REQUIRE(res.tags[pos].has_value());
      CHECK(spacemac_verify(key, space.basis()[pos], *res.tags[pos]));
    } else {
      CHECK_FALSE(res.tags[pos].has_value());
    }
  }
  std::size_t tags_sent = 0;
  for (const auto& rec : log.records())
    if (rec.kind == MsgKind::Tag) {
      ++tags_sent;
      CHECK(rec.receiver == "S1");
    }
  CHECK(tags_sent == 5);
}

TEST_CASE("attack game 2 smoke runs") {
  Game2Config cfg;
  cfg.trials = 3000;
  cfg.seed = 3;
  auto pm = attack_game_2(cfg);
  CHECK(pm.trials == 3000);
  CHECK(pm.within_sigmas(3));
  cfg.issuance = TagIssuance::Direct;
  cfg.trials = 20000;
  auto direct = attack_game_2(cfg);
  CHECK(direct.within_sigmas(3));
  cfg.tags = 2;
  cfg.issuance = TagIssuance::Pm;
  CHECK(error_code([&] { attack_game_2(cfg); }) == Errc::InvalidArgument);
}
