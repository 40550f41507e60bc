#include "ncguard/detector.hpp"

namespace ncguard {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::AcceptedViaTraditional: return "accepted_traditional";
    case Decision::AcceptedViaHomomorphic: return "accepted_homomorphic";
    case Decision::Dropped: return "dropped";
  }
  return "?";
}

const char* to_string(CheckPath p) {
  switch (p) {
    case CheckPath::None: return "none";
    case CheckPath::Traditional: return "traditional";
    case CheckPath::Homomorphic: return "homomorphic";
  }
  return "?";
}

HashVerifier::HashVerifier(HdlParams pp, HashCommitment commitment, GenerationParams params, bool decodes,
                           std::size_t capacity_factor)
    : pp_(std::move(pp)),
      commitment_(std::move(commitment)),
      hashes_(commitment_.hashes()),
      params_(std::move(params)),
      decodes_(decodes),
      capacity_(capacity_factor * params_.m()) {
  require(commitment_.size() == params_.m(), Errc::MissingCommitment, "commitment must cover all m packets");
  require(capacity_ > 0, Errc::InvalidArgument, "buffer capacity must be positive");
  require(pp_.n() == params_.n, Errc::DimMismatch, "hash parameters built for a different n");
}

bool HashVerifier::traditional_ok(std::size_t position, const GfVector& data) const {
  return traditional_hash(data) == commitment_.at(position).hbar;
}

bool HashVerifier::homomorphic_ok(const Packet& p) const { return hdl_test(pp_, p.data(), p.aug(), hashes_); }

void HashVerifier::admit(const Packet& p) {
  buffer_.push_back(p);
  if (buffer_.size() > capacity_) buffer_.pop_front();
}

Verdict HashVerifier::receive(const Packet& p) {
  Verdict v;
  if (p.gen_id() != commitment_.gen_id() || p.symbols().size() != params_.width() ||
      !(p.field() == params_.field))
    return v;

  if (decodes_) {
    std::vector<Recovered> fresh;
    if (auto pos = p.unit_position()) {
      fresh.push_back({*pos, p.data()});
    } else {
      std::vector<Packet> all(buffer_.begin(), buffer_.end());
      all.push_back(p);
      for (auto& r : decode(all, params_))
        if (!recovered_.contains(r.position)) fresh.push_back(std::move(r));
    }
    if (!fresh.empty()) {
      v.path = CheckPath::Traditional;
      for (const auto& r : fresh) {
        v.recovered.push_back(r.position);
        if (!traditional_ok(r.position, r.data)) return v;
      }
      for (auto pos : v.recovered) recovered_.insert(pos);
      admit(p);
      v.decision = Decision::AcceptedViaTraditional;
      return v;
    }
  }

  v.path = CheckPath::Homomorphic;
  if (!homomorphic_ok(p)) return v;
  admit(p);
  v.decision = Decision::AcceptedViaHomomorphic;
  return v;
}

}  // namespace ncguard
