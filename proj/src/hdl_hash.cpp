#include "ncguard/hdl_hash.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"

namespace ncguard {

namespace {

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  cost::count_exp();
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

mpz_class multi_exp(const mpz_class& P, std::span<const mpz_class> bases, std::span<const mpz_class> exps) {
  mpz_class acc = 1;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (exps[k] == 0) continue;
    acc = acc * powm(bases[k], exps[k], P) % P;
  }
  return acc;
}

std::vector<mpz_class> to_mpz(const GfVector& v) {
  std::vector<mpz_class> out;
  out.reserve(v.size());
  for (auto x : v.values()) out.emplace_back(static_cast<unsigned long>(x));
  return out;
}

}  // namespace

std::size_t HdlParams::element_bytes() const { return (bit_length(P) + 7) / 8; }

unsigned hdl_group_bits(unsigned lambda) {
  if (lambda <= 160) return 1024;
  if (lambda <= 224) return 2048;
  return 3072;
}

mpz_class find_group_prime(const mpz_class& q, unsigned p_bits, Rng& rng) {
  const unsigned qb = bit_length(q);
  require(p_bits > qb + 1, Errc::InvalidArgument, "group prime must be longer than q");
  constexpr int kMaxCandidates = 200000;
  for (int attempt = 0; attempt < kMaxCandidates; ++attempt) {
    mpz_class k = random_bits_exact(rng, p_bits - qb);
    if (mpz_odd_p(k.get_mpz_t())) k += 1;
    const mpz_class P = k * q + 1;
    if (bit_length(P) != p_bits) continue;
    if (is_probable_prime(P)) return P;
  }
  fail(Errc::ParameterGenFailure, "no group prime of " + std::to_string(p_bits) + " bits found");
}

std::vector<mpz_class> derive_generators(const mpz_class& P, const mpz_class& q, std::size_t n, Rng& rng) {
  const mpz_class cofactor = (P - 1) / q;
  std::vector<mpz_class> gens;
  gens.reserve(n);
  int misses = 0;
  while (gens.size() < n) {
    const mpz_class h = 2 + uniform_below(rng, P - 3);
    mpz_class g;
    mpz_powm(g.get_mpz_t(), h.get_mpz_t(), cofactor.get_mpz_t(), P.get_mpz_t());
    if (g == 1) {
      require(++misses < 10000, Errc::ParameterGenFailure, "generator derivation keeps hitting 1");
      continue;
    }
    gens.push_back(std::move(g));
  }
  return gens;
}

HdlParams hdl_from_generators(const mpz_class& P, const mpz_class& q, std::vector<mpz_class> gens) {
  require(is_probable_prime(q), Errc::InvalidArgument, "subgroup order must be prime");
  require(is_probable_prime(P), Errc::InvalidArgument, "group modulus must be prime");
  require((P - 1) % q == 0, Errc::InvalidArgument, "q must divide P - 1");
  for (const auto& g : gens) {
    mpz_class t;
    mpz_powm(t.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), P.get_mpz_t());
    require(g > 1 && g < P && t == 1, Errc::InvalidArgument, "generator not of order q");
  }
  return {P, q, std::move(gens)};
}

HdlParams hdl_setup_group(const mpz_class& P, const mpz_class& q, std::size_t n, Rng& rng) {
  require(is_probable_prime(q) && is_probable_prime(P) && (P - 1) % q == 0, Errc::InvalidArgument,
          "need primes with q | P - 1");
  return {P, q, derive_generators(P, q, n, rng)};
}

HdlParams hdl_setup(unsigned lambda, std::size_t n, const mpz_class& q, Rng& rng, unsigned p_bits) {
  require(is_probable_prime(q), Errc::InvalidArgument, "q must be prime");
  require(bit_length(q) > lambda, Errc::InvalidArgument, "q must exceed 2^lambda");
  const mpz_class P = find_group_prime(q, p_bits ? p_bits : hdl_group_bits(lambda), rng);
  return {P, q, derive_generators(P, q, n, rng)};
}

HdlParams hdl_setup_nist_like(std::size_t n, Rng& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    mpz_class q = random_bits_exact(rng, 256);
    mpz_setbit(q.get_mpz_t(), 0);
    if (!is_probable_prime(q)) continue;
    const mpz_class P = find_group_prime(q, 2048, rng);
    return {P, q, derive_generators(P, q, n, rng)};
  }
  fail(Errc::ParameterGenFailure, "no 256-bit prime found");
}

mpz_class hdl_hash(const HdlParams& pp, std::span<const mpz_class> data) {
  require(data.size() == pp.n(), Errc::DimMismatch, "data length must equal generator count");
  return multi_exp(pp.P, pp.gens, data);
}

mpz_class hdl_hash(const HdlParams& pp, const GfVector& data) { return hdl_hash(pp, to_mpz(data)); }

bool hdl_test(const HdlParams& pp, std::span<const mpz_class> data, std::span<const mpz_class> beta,
              std::span<const mpz_class> hashes) {
  require(data.size() == pp.n(), Errc::DimMismatch, "data length must equal generator count");
  require(beta.size() == hashes.size(), Errc::DimMismatch, "one coefficient per committed hash");
  return multi_exp(pp.P, pp.gens, data) == multi_exp(pp.P, hashes, beta);
}

bool hdl_test(const HdlParams& pp, const GfVector& data, const GfVector& beta,
              std::span<const mpz_class> hashes) {
  return hdl_test(pp, to_mpz(data), to_mpz(beta), hashes);
}

Digest traditional_hash(std::span<const std::uint8_t> bytes) { return sha256(bytes); }

Digest traditional_hash(const GfVector& data) {
  Bytes buf;
  const std::size_t w = data.field().symbol_bytes();
  buf.reserve(data.size() * w);
  for (auto x : data.values()) append_be(buf, x, w);
  return sha256(buf);
}

HashCommitment::HashCommitment(SpaceId id, std::vector<CommitmentEntry> entries)
    : id_(id), entries_(std::move(entries)) {}

HashCommitment HashCommitment::build(const HdlParams& pp, const SourceSpace& space) {
  const auto& params = space.params();
  require(pp.q == params.field.modulus_mpz(), Errc::ModulusMismatch, "hash group order differs from field");
  std::vector<CommitmentEntry> entries;
  entries.reserve(params.m());
  for (std::size_t i = 0; i < params.s; ++i)
    for (std::size_t j = 0; j < params.g; ++j) {
      const auto data = space.packet(i, j).data();
      entries.push_back({i, j, hdl_hash(pp, data), traditional_hash(data)});
    }
  return HashCommitment(space.id(), std::move(entries));
}

const CommitmentEntry& HashCommitment::at(std::size_t position) const {
  require(position < entries_.size(), Errc::MissingCommitment, "no commitment for position " + std::to_string(position));
  return entries_[position];
}

std::vector<mpz_class> HashCommitment::hashes() const {
  std::vector<mpz_class> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.h);
  return out;
}

void HashCommitment::write_jsonl(std::ostream& out) const {
  for (const auto& e : entries_) {
    nlohmann::json rec = {{"gen_id", id_.hex()}, {"i", e.i},           {"j", e.j},
                          {"h", mpz_to_hex(e.h)}, {"hbar", to_hex(e.hbar)}};
    out << rec.dump() << '\n';
  }
}

HashCommitment HashCommitment::read_jsonl(std::istream& in, const GenerationParams& params) {
  std::vector<CommitmentEntry> entries(params.m());
  std::vector<bool> seen(params.m(), false);
  std::optional<SpaceId> id;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::InvalidArgument, std::string("bad commitment record: ") + e.what());
    }
    const auto rid = SpaceId::from_hex(rec.at("gen_id").get<std::string>());
    require(!id || *id == rid, Errc::GenerationMismatch, "commitment file mixes generations");
    id = rid;
    const auto i = rec.at("i").get<std::size_t>(), j = rec.at("j").get<std::size_t>();
    require(i < params.s && j < params.g, Errc::IndexOutOfRange, "commitment index outside s x g");
    const auto hbar = from_hex(rec.at("hbar").get<std::string>());
    require(hbar.size() == 32, Errc::InvalidArgument, "digest must be 32 bytes");
    auto& e = entries[params.position(i, j)];
    e.i = i;
    e.j = j;
    e.h = mpz_from_hex(rec.at("h").get<std::string>());
    std::copy(hbar.begin(), hbar.end(), e.hbar.begin());
    seen[params.position(i, j)] = true;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    require(seen[k], Errc::MissingCommitment, "no commitment for position " + std::to_string(k));
  return HashCommitment(*id, std::move(entries));
}

}  // namespace ncguard
