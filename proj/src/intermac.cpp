#include "ncguard/intermac.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace ncguard {

KeySet::KeySet(std::vector<std::vector<GfVector>> keys) : keys_(std::move(keys)) {
  require(!keys_.empty() && !keys_.front().empty(), Errc::InvalidArgument, "key set needs at least one key");
  for (const auto& per_source : keys_) {
    require(per_source.size() == keys_.front().size(), Errc::DimMismatch, "uneven tag slot counts");
    for (const auto& k : per_source)
      require(k.size() == keys_.front().front().size(), Errc::DimMismatch, "uneven key lengths");
  }
}

const GfVector& KeySet::key(std::size_t p, std::size_t slot) const {
  require(p < keys_.size() && slot < slots(), Errc::IndexOutOfRange, "no such key");
  return keys_[p][slot];
}

KeySum KeySet::sum(std::span<const std::size_t> subset) const {
  KeySum out;
  out.subset.assign(subset.begin(), subset.end());
  for (std::size_t slot = 0; slot < slots(); ++slot) {
    GfVector acc(field(), dim());
    for (auto p : subset) acc = acc + key(p, slot);
    out.slots.push_back(std::move(acc));
  }
  return out;
}

KeySum KeySet::full_sum() const {
  std::vector<std::size_t> all(sources());
  for (std::size_t p = 0; p < all.size(); ++p) all[p] = p;
  return sum(all);
}

GfMatrix foreign_matrix(const SourceSpace& space, std::size_t p) {
  const auto& params = space.params();
  require(p < params.s, Errc::IndexOutOfRange, "no such source");
  std::vector<GfVector> rows;
  rows.reserve(params.m() - params.g);
  for (std::size_t i = 0; i < params.s; ++i) {
    if (i == p) continue;
    for (std::size_t j = 0; j < params.g; ++j) rows.push_back(space.packet(i, j).symbols());
  }
  return GfMatrix::from_rows(params.field, params.width(), rows);
}

std::vector<GfVector> key_basis(const SourceSpace& space, std::size_t p) {
  require(space.rank() == space.params().m(), Errc::DegenerateSpace, "committed packets are not independent");
  return null_space_basis(foreign_matrix(space, p));
}

GfVector key_from_basis(std::span<const GfVector> basis, std::span<const std::uint64_t> r) {
  require(!basis.empty(), Errc::DegenerateSpace, "empty key basis");
  require(basis.size() == r.size(), Errc::DimMismatch, "one coefficient per basis vector");
  GfVector k(basis.front().field(), basis.front().size());
  for (std::size_t i = 0; i < basis.size(); ++i) axpy(k, r[i], basis[i]);
  return k;
}

std::vector<std::uint64_t> gen_counters(std::size_t p, std::size_t i, std::size_t slot) {
  if (slot == 0) return {p, i};
  return {p, i, slot};
}

KeySet gen_from_bases(const SpaceId& id, const Prf& prf, const std::vector<std::vector<GfVector>>& bases,
                      std::size_t tag_slots) {
  require(bases.size() >= 2, Errc::InvalidArgument, "need at least two sources");
  require(tag_slots >= 1, Errc::InvalidArgument, "need at least one tag slot");
  const Gf& f = bases.front().front().field();
  std::vector<std::vector<GfVector>> keys(bases.size());
  std::vector<std::uint64_t> r;
  for (std::size_t p = 0; p < bases.size(); ++p) {
    for (std::size_t slot = 0; slot < tag_slots; ++slot) {
      r.resize(bases[p].size());
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = prf.eval(id, PrfDomain::InterMacGen, gen_counters(p, i, slot), f);
      keys[p].push_back(key_from_basis(bases[p], r));
    }
  }
  return KeySet(std::move(keys));
}

KeySet gen(const SpaceId& id, const PrfKey& key, const SourceSpace& committed, std::size_t tag_slots) {
  require(committed.params().s >= 2, Errc::InvalidArgument, "need at least two sources");
  std::vector<std::vector<GfVector>> bases;
  for (std::size_t p = 0; p < committed.params().s; ++p) bases.push_back(key_basis(committed, p));
  return gen_from_bases(id, Prf(key), bases, tag_slots);
}

std::uint64_t sign(const GfVector& key, const Packet& v) {
  require(key.size() == v.symbols().size(), Errc::DimMismatch, "key and packet lengths differ");
  return dot(key, v.symbols());
}

Tag sign(const KeySet& keys, std::size_t p, const Packet& v) {
  Tag t;
  for (std::size_t slot = 0; slot < keys.slots(); ++slot) t.slots.push_back(sign(keys.key(p, slot), v));
  return t;
}

Tag combine_tags(std::span<const Tag> tags, std::span<const std::uint64_t> coeffs, const Gf& field) {
  require(!tags.empty(), Errc::InvalidArgument, "combine needs at least one tag");
  require(tags.size() == coeffs.size(), Errc::DimMismatch, "one coefficient per tag");
  Tag out;
  out.slots.assign(tags.front().slots.size(), 0);
  for (std::size_t k = 0; k < tags.size(); ++k) {
    require(tags[k].slots.size() == out.slots.size(), Errc::DimMismatch, "tags with different slot counts");
    const auto a = field.reduce(coeffs[k]);
    for (std::size_t s = 0; s < out.slots.size(); ++s)
      out.slots[s] = field.add(out.slots[s], field.mul(a, tags[k].slots[s]));
  }
  return out;
}

Packet combine_signed(std::span<const Packet> packets, std::span<const std::uint64_t> coeffs) {
  Packet out = combine(packets, coeffs);
  std::vector<Tag> tags;
  tags.reserve(packets.size());
  for (const auto& p : packets) tags.push_back(p.tag);
  out.tag = combine_tags(tags, coeffs, out.field());
  return out;
}

bool verify(const KeySum& key_sum, const Packet& y, const Tag& t) {
  require(t.slots.size() == key_sum.slots.size(), Errc::DimMismatch, "tag and key sum slot counts differ");
  for (std::size_t s = 0; s < t.slots.size(); ++s) {
    require(key_sum.slots[s].size() == y.symbols().size(), Errc::DimMismatch, "key and packet lengths differ");
    if (dot(key_sum.slots[s], y.symbols()) != t.slots[s]) return false;
  }
  return true;
}

KeySum partial_key_sum(const KeySet& keys, std::span<const std::size_t> subset, std::size_t max_malicious) {
  require(subset.size() >= max_malicious + 1, Errc::SubsetTooSmall,
          "subset of " + std::to_string(subset.size()) + " keys cannot tolerate " + std::to_string(max_malicious) +
              " malicious sources");
  std::vector<bool> seen(keys.sources(), false);
  for (auto p : subset) {
    require(p < keys.sources(), Errc::IndexOutOfRange, "no such source");
    require(!seen[p], Errc::InvalidArgument, "duplicate source in subset");
    seen[p] = true;
  }
  return keys.sum(subset);
}

void write_key_sums(std::ostream& out, const std::vector<std::pair<std::string, KeySum>>& sums) {
  for (const auto& [node, ks] : sums) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& v : ks.slots) slots.push_back(v.values());
    out << nlohmann::json{{"node", node}, {"subset", ks.subset}, {"slots", slots}}.dump() << '\n';
  }
}

std::vector<std::pair<std::string, KeySum>> read_key_sums(std::istream& in, const Gf& field) {
  std::vector<std::pair<std::string, KeySum>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      KeySum ks;
      ks.subset = rec.at("subset").get<std::vector<std::size_t>>();
      for (const auto& s : rec.at("slots")) {
        auto vals = s.get<std::vector<std::uint64_t>>();
        for (auto x : vals) require(x < field.modulus(), Errc::InvalidArgument, "key symbol out of range");
        ks.slots.emplace_back(field, std::move(vals));
      }
      out.emplace_back(rec.at("node").get<std::string>(), std::move(ks));
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::InvalidArgument, std::string("bad key record: ") + e.what());
    }
  }
  return out;
}

double GameResult::sigma() const {
  return trials ? std::sqrt(expected * (1 - expected) / double(trials)) : 0.0;
}

bool GameResult::within_sigmas(double k) const { return std::abs(rate() - expected) <= k * sigma(); }

GameResult attack_game_1(const GameConfig& cfg) {
  const Gf f(cfg.q);
  require(cfg.s >= 2, Errc::InvalidArgument, "the game needs at least two sources");
  require(cfg.withheld < cfg.s, Errc::IndexOutOfRange, "withheld key index out of range");
  require(cfg.tags >= 1, Errc::InvalidArgument, "need at least one tag slot");
  GenerationParams params(f, cfg.s, cfg.g, cfg.n);
  Rng rng(cfg.seed);
  GameResult res;
  res.expected = std::pow(1.0 / double(cfg.q), double(cfg.tags));

  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    // challenger: fresh generation, fresh PRF key
    const auto id = SpaceId::random(rng);
    std::vector<std::vector<GfVector>> data(cfg.s);
    for (auto& src : data)
      for (std::size_t j = 0; j < cfg.g; ++j) src.push_back(random_vector(f, cfg.n, rng));
    const auto space = SourceSpace::from_data(id, params, data);
    if (space.rank() < params.m()) {
      --trial;
      continue;
    }
    const auto keys = gen(id, PrfKey::random(rng), space, cfg.tags);
    const auto verifier = keys.full_sum();

    Packet forged(id, params);
    if (cfg.strategy == ForgeryStrategy::RandomTag) {
      do {
        forged = Packet(id, params, random_vector(f, params.width(), rng));
      } while (in_span(forged, space, SpanMode::WholePacket));
      for (std::size_t s = 0; s < cfg.tags; ++s) forged.tag.slots.push_back(f.random(rng));
    } else {
      // legitimately signed combination, shifted by delta; the tag is
      // corrected with every key the adversary knows
      std::vector<Packet> signed_basis = space.basis();
      for (std::size_t k = 0; k < signed_basis.size(); ++k)
        signed_basis[k].tag = sign(keys, params.source_of(k), signed_basis[k]);
      std::vector<std::uint64_t> alpha(params.m());
      for (auto& a : alpha) a = f.random(rng);
      const Packet y = combine_signed(signed_basis, alpha);
      GfVector delta(f, params.width());
      do {
        delta = random_vector(f, params.width(), rng);
        forged = Packet(id, params, y.symbols() + delta);
      } while (in_span(forged, space, SpanMode::WholePacket));
      forged.tag = y.tag;
      for (std::size_t s = 0; s < cfg.tags; ++s)
        for (std::size_t p = 0; p < cfg.s; ++p)
          if (p != cfg.withheld) forged.tag.slots[s] = f.add(forged.tag.slots[s], dot(delta, keys.key(p, s)));
    }
    ++res.trials;
    if (verify(verifier, forged)) ++res.wins;
  }
  return res;
}

}  // namespace ncguard
