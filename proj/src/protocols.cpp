#include "ncguard/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace ncguard {

namespace {

std::span<const std::uint64_t> head(const GfVector& v, std::size_t n) { return {v.values().data(), n}; }

void check_data(const std::vector<std::vector<GfVector>>& data, const Gf& field) {
  require(data.size() >= 2, Errc::InvalidArgument, "need at least two sources");
  require(!data.front().empty() && data.front().front().size() > 0, Errc::InvalidArgument, "empty generation");
  const std::size_t g = data.front().size(), n = data.front().front().size();
  for (const auto& src : data) {
    require(src.size() == g, Errc::DimMismatch, "every source needs g packets");
    for (const auto& v : src) {
      require(v.size() == n, Errc::DimMismatch, "every packet needs n symbols");
      require(v.field() == field, Errc::ModulusMismatch, "data over a different field");
    }
  }
}

SourceBehavior behavior_of(const std::vector<SourceBehavior>& b, std::size_t i) {
  return i < b.size() ? b[i] : SourceBehavior::Honest;
}

}  // namespace

std::string source_label(std::size_t i) { return "S" + std::to_string(i + 1); }

// ---------------------------------------------------------------- channel

IpChannel IpChannel::benaloh(BenalohKeyPair kp) {
  const Gf f(kp.pk().r);
  return IpChannel(std::move(kp), f);
}

IpChannel IpChannel::clear(Gf field) { return IpChannel(std::nullopt, field); }

std::size_t IpChannel::element_bytes() const {
  return kp_ ? kp_->pk().ciphertext_bytes() : field_.symbol_bytes();
}

const BenalohKeyPair& IpChannel::keypair() const {
  require(kp_.has_value(), Errc::InvalidArgument, "clear channel has no key pair");
  return *kp_;
}

void IpChannel::announce(const std::string& to, Transcript* log) const {
  if (!kp_ || !log) return;
  const auto& pk = kp_->pk();
  const mpz_class parts[] = {pk.N, pk.y};
  Bytes payload = encode_elements(parts, pk.ciphertext_bytes());
  append_be(payload, pk.r, 8);
  log->record(MsgKind::PublicKey, "controller", to, 1, payload);
}

IpChannel::Offer IpChannel::offer(std::span<const std::uint64_t> r, const std::string& to, Rng& rng,
                                  Transcript* log) const {
  Offer o;
  if (kp_) {
    o.items = pip_encrypt(kp_->pk(), r, rng);
  } else {
    for (auto x : r) o.items.emplace_back(static_cast<unsigned long>(x));
  }
  if (log) log->record(MsgKind::EncryptedVector, "controller", to, o.items.size(), encode_elements(o.items, element_bytes()));
  return o;
}

mpz_class IpChannel::respond(const Offer& offer, std::span<const std::uint64_t> v, const std::string& from, Rng& rng,
                             Transcript* log) const {
  mpz_class w;
  if (kp_) {
    w = pip_respond(kp_->pk(), offer.items, v, rng);
  } else {
    require(offer.items.size() == v.size(), Errc::DimMismatch, "vector lengths differ");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < v.size(); ++i) acc = field_.add(acc, field_.mul(offer.items[i].get_ui(), v[i]));
    w = static_cast<unsigned long>(acc);
  }
  if (log) log->record(MsgKind::EncryptedInnerProduct, from, "controller", 1, encode_elements(std::span(&w, 1), element_bytes()));
  return w;
}

std::uint64_t IpChannel::finish(const mpz_class& reply) const {
  if (kp_) return kp_->decrypt(reply);
  if (reply < 0 || reply >= field_.modulus_mpz()) fail(Errc::DecryptionFailure, "reply outside the field");
  return reply.get_ui();
}

// ---------------------------------------------------------------- CPK

GfVector cpk_vector(const Prf& prf, const SpaceId& id, std::size_t i, std::size_t width, const Gf& f,
                    std::uint64_t epoch) {
  GfVector r(f, width);
  for (std::size_t c = 0; c < width; ++c)
    r.raw()[c] = epoch == 0 ? prf.eval(id, PrfDomain::Cpk, {i, c}, f) : prf.eval(id, PrfDomain::Cpk, {i, c, epoch}, f);
  return r;
}

GfVector solve_padding(std::span<const GfVector> others, std::span<const std::uint64_t> ips, std::size_t n,
                       std::size_t s, std::size_t pos) {
  require(others.size() == s - 1 && ips.size() == s - 1, Errc::DimMismatch, "need one row per other source");
  const Gf& f = others.front().field();
  GfMatrix a(f, s - 1, s - 1);
  GfVector rhs(f, s - 1);
  for (std::size_t e = 0; e < s - 1; ++e) {
    for (std::size_t l = 0; l < s - 1; ++l) a(e, l) = others[e][n + l];
    rhs.raw()[e] = f.neg(f.add(f.reduce(ips[e]), others[e][n + s - 1 + pos]));
  }
  try {
    return solve_linear(a, rhs);
  } catch (const Error& err) {
    if (err.code() == Errc::Singular || err.code() == Errc::Inconsistent)
      fail(Errc::SingularPaddingSystem, "padding system for position " + std::to_string(pos) + " is singular");
    throw;
  }
}

namespace {

bool padding_blocks_regular(const std::vector<GfVector>& r, std::size_t n) {
  const std::size_t s = r.size();
  const Gf& f = r.front().field();
  for (std::size_t a = 0; a < s; ++a) {
    GfMatrix block(f, s - 1, s - 1);
    std::size_t row = 0;
    for (std::size_t o = 0; o < s; ++o) {
      if (o == a) continue;
      for (std::size_t l = 0; l < s - 1; ++l) block(row, l) = r[o][n + l];
      ++row;
    }
    if (rank(block) < s - 1) return false;
  }
  return true;
}

}  // namespace

CpkResult cpk_run(const PrfKey& k, const SpaceId& id, const Gf& field,
                  const std::vector<std::vector<GfVector>>& data, const IpChannel& channel, Rng& rng,
                  Transcript* log, const CpkOptions& opts) {
  check_data(data, field);
  if (channel.is_private())
    require(channel.keypair().pk().r == field.modulus(), Errc::ModulusMismatch,
            "encryption block size differs from the field");
  const std::size_t g = data.front().size(), n = data.front().front().size();
  const Prf prf(k);
  std::vector<std::size_t> participants(data.size()), excluded;
  for (std::size_t i = 0; i < participants.size(); ++i) participants[i] = i;

  for (;;) {
    const std::size_t s = participants.size();
    if (s < 2) fail(Errc::DecryptionFailure, "fewer than two sources completed the protocol");
    GenerationParams params(field, s, g, n, s - 1);

    std::vector<GfVector> r;
    std::uint64_t epoch = 0;
    for (;; ++epoch) {
      require(epoch < opts.max_epochs, Errc::SingularPaddingSystem, "no regular padding system within the epoch budget");
      r.clear();
      for (auto src : participants) r.push_back(cpk_vector(prf, id, src, params.width(), field, epoch));
      if (padding_blocks_regular(r, n)) break;
    }
    for (auto src : participants) channel.announce(source_label(src), log);

    std::vector<Packet> packets;
    std::optional<std::size_t> dropout;
    for (std::size_t a = 0; a < s && !dropout; ++a) {
      const std::size_t src = participants[a];
      const auto label = source_label(src);
      const auto mode = behavior_of(opts.behavior, src);
      std::vector<IpChannel::Offer> offers(s);
      std::vector<GfVector> others;
      for (std::size_t o = 0; o < s; ++o) {
        if (o == a) continue;
        offers[o] = channel.offer(head(r[o], n), label, rng, log);
        others.push_back(r[o]);
      }
      for (std::size_t j = 0; j < g && !dropout; ++j) {
        const auto& v = data[src][j];
        std::vector<std::uint64_t> ips;
        for (std::size_t o = 0; o < s && !dropout; ++o) {
          if (o == a) continue;
          if (mode == SourceBehavior::Withhold) {
            dropout = src;
            break;
          }
          mpz_class reply;
          if (mode == SourceBehavior::Malformed) {
            reply = 0;
            if (log) log->record(MsgKind::EncryptedInnerProduct, label, "controller", 1,
                                 encode_elements(std::span(&reply, 1), channel.element_bytes()));
          } else {
            reply = channel.respond(offers[o], v.values(), label, rng, log);
          }
          try {
            ips.push_back(channel.finish(reply));
          } catch (const Error& e) {
            if (e.code() != Errc::DecryptionFailure) throw;
            dropout = src;
          }
        }
        if (dropout) break;
        const std::size_t pos = params.position(a, j);
        const auto x = solve_padding(others, ips, n, s, pos);
        if (log) log->record(MsgKind::Padding, "controller", label, x.size(), encode_symbols(x.values(), field.symbol_bytes()));
        Packet p = augment(v, a, j, params, id);
        p.set_padding(x);
        packets.push_back(std::move(p));
      }
    }
    if (dropout) {
      participants.erase(std::find(participants.begin(), participants.end(), *dropout));
      excluded.push_back(*dropout);
      continue;
    }

    std::vector<std::vector<GfVector>> keys;
    for (auto& v : r) keys.push_back({std::move(v)});
    return CpkResult{params, participants, excluded, std::move(packets), KeySet(std::move(keys)), epoch};
  }
}

// ---------------------------------------------------------------- SpaceMac

GfVector spacemac_vector(const Prf& prf, const SpaceId& id, std::size_t width, const Gf& f, std::size_t slot) {
  GfVector r(f, width);
  for (std::size_t c = 0; c < width; ++c)
    r.raw()[c] = slot == 0 ? prf.eval(id, PrfDomain::SpaceMac, {c + 1}, f)
                           : prf.eval(id, PrfDomain::SpaceMac, {c + 1, slot}, f);
  return r;
}

Tag spacemac_mac_with(std::span<const GfVector> r, const Packet& y) {
  Tag t;
  for (const auto& v : r) {
    require(v.size() == y.symbols().size(), Errc::DimMismatch, "key vector and packet lengths differ");
    t.slots.push_back(dot(v, y.symbols()));
  }
  return t;
}

Tag spacemac_mac(const PrfKey& k, const Packet& y, std::size_t slots) {
  const Prf prf(k);
  std::vector<GfVector> r;
  for (std::size_t s = 0; s < slots; ++s) r.push_back(spacemac_vector(prf, y.gen_id(), y.symbols().size(), y.field(), s));
  return spacemac_mac_with(r, y);
}

Tag spacemac_combine(std::span<const Tag> tags, std::span<const std::uint64_t> coeffs, const Gf& field) {
  return combine_tags(tags, coeffs, field);
}

bool spacemac_verify(const PrfKey& k, const Packet& y, const Tag& t) {
  require(!t.slots.empty(), Errc::InvalidArgument, "tag has no slots");
  return spacemac_mac(k, y, t.slots.size()) == t;
}

SpaceMacVerifier::SpaceMacVerifier(const PrfKey& k, const SpaceId& id, const GenerationParams& params,
                                   std::size_t slots)
    : id_(id) {
  require(slots >= 1, Errc::InvalidArgument, "need at least one tag slot");
  const Prf prf(k);
  for (std::size_t s = 0; s < slots; ++s) r_.push_back(spacemac_vector(prf, id, params.width(), params.field, s));
}

bool SpaceMacVerifier::verify(const Packet& y, const Tag& t) const {
  if (y.gen_id() != id_ || t.slots.size() != r_.size()) return false;
  return spacemac_mac_with(r_, y) == t;
}

// ---------------------------------------------------------------- PM

PmResult pm_run(const PrfKey& k, const SpaceId& id, const Gf& field, const std::vector<std::vector<GfVector>>& data,
                const IpChannel& channel, Rng& rng, Transcript* log, const PmOptions& opts) {
  check_data(data, field);
  if (channel.is_private())
    require(channel.keypair().pk().r == field.modulus(), Errc::ModulusMismatch,
            "encryption block size differs from the field");
  const std::size_t s = data.size(), g = data.front().size(), n = data.front().front().size();
  GenerationParams params(field, s, g, n);
  const auto r = spacemac_vector(Prf(k), id, params.width(), field);
  PmResult res{params, std::vector<std::optional<Tag>>(params.m()), {}};

  for (std::size_t i = 0; i < s; ++i) {
    const auto label = source_label(i);
    const auto mode = behavior_of(opts.behavior, i);
    channel.announce(label, log);
    const auto offer = channel.offer(head(r, n), label, rng, log);
    for (std::size_t j = 0; j < g; ++j) {
      const std::size_t pos = params.position(i, j);
      if (mode == SourceBehavior::Withhold) {
        res.missing.push_back(pos);
        continue;
      }
      mpz_class reply;
      if (mode == SourceBehavior::Malformed) {
        reply = 0;
        if (log) log->record(MsgKind::EncryptedInnerProduct, label, "controller", 1,
                             encode_elements(std::span(&reply, 1), channel.element_bytes()));
      } else {
        reply = channel.respond(offer, data[i][j].values(), label, rng, log);
      }
      std::uint64_t ip;
      try {
        ip = channel.finish(reply);
      } catch (const Error& e) {
        if (e.code() != Errc::DecryptionFailure) throw;
        res.missing.push_back(pos);
        continue;
      }
      // the unit coefficient of packet (i, j) sits at n + pos
      Tag t{{field.add(ip, r[n + pos])}};
      if (log) log->record(MsgKind::Tag, "controller", label, 1, encode_symbols(t.slots, field.symbol_bytes()));
      res.tags[pos] = std::move(t);
    }
  }
  return res;
}

// ---------------------------------------------------------------- game 2

GameResult attack_game_2(const Game2Config& cfg) {
  const Gf f(cfg.q);
  require(cfg.s >= 1, Errc::InvalidArgument, "need at least one source");
  require(cfg.tags >= 1, Errc::InvalidArgument, "need at least one tag slot");
  require(cfg.issuance == TagIssuance::Direct || cfg.tags == 1, Errc::InvalidArgument,
          "PM issues single-slot tags; use direct issuance for more slots");
  require(cfg.issuance == TagIssuance::Direct || cfg.s >= 2, Errc::InvalidArgument, "PM needs two sources");
  GenerationParams params(f, cfg.s, cfg.g, cfg.n);
  Rng rng(cfg.seed);
  std::optional<IpChannel> channel;
  if (cfg.issuance == TagIssuance::Pm) channel = IpChannel::benaloh(benaloh_keygen(cfg.q, cfg.modulus_bits, rng));

  GameResult res;
  res.expected = std::pow(1.0 / double(cfg.q), double(cfg.tags));
  while (res.trials < cfg.trials) {
    const auto id = SpaceId::random(rng);
    std::vector<std::vector<GfVector>> data(cfg.s);
    for (auto& src : data)
      for (std::size_t j = 0; j < cfg.g; ++j) src.push_back(random_vector(f, cfg.n, rng));
    const auto space = SourceSpace::from_data(id, params, data);
    if (space.rank() < params.m()) continue;
    const auto key = PrfKey::random(rng);
    const SpaceMacVerifier verifier(key, id, params, cfg.tags);

    // the adversary's view: tags on every source packet
    std::vector<Tag> issued;
    if (channel) {
      auto pm = pm_run(key, id, f, data, *channel, rng);
      for (auto& t : pm.tags) issued.push_back(*t);
    } else {
      for (const auto& p : space.basis()) issued.push_back(verifier.mac(p));
    }

    Packet forged(id, params);
    do {
      forged = Packet(id, params, random_vector(f, params.width(), rng));
    } while (in_span(forged, space, SpanMode::WholePacket));
    for (std::size_t s = 0; s < cfg.tags; ++s) forged.tag.slots.push_back(f.random(rng));
    ++res.trials;
    if (verifier.verify(forged)) ++res.wins;
  }
  return res;
}

}  // namespace ncguard
