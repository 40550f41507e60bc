#include "ncguard/transcript.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"
#include "ncguard/errors.hpp"

namespace ncguard {

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::PublicKey: return "public_key";
    case MsgKind::EncryptedVector: return "encrypted_vector";
    case MsgKind::EncryptedInnerProduct: return "encrypted_inner_product";
    case MsgKind::Padding: return "padding";
    case MsgKind::Tag: return "tag";
    case MsgKind::Key: return "key";
  }
  return "?";
}

MsgKind msg_kind_from_string(std::string_view s) {
  for (auto k : {MsgKind::PublicKey, MsgKind::EncryptedVector, MsgKind::EncryptedInnerProduct, MsgKind::Padding,
                 MsgKind::Tag, MsgKind::Key})
    if (s == to_string(k)) return k;
  fail(Errc::InvalidArgument, "unknown message kind '" + std::string(s) + "'");
}

void Transcript::record(MsgKind kind, std::string sender, std::string receiver, std::size_t items,
                        std::span<const std::uint8_t> payload) {
  records_.push_back({kind, std::move(sender), std::move(receiver), items, payload.size(), to_hex(sha256(payload))});
}

std::size_t Transcript::bytes(MsgKind kind) const {
  std::size_t total = 0;
  for (const auto& r : records_)
    if (r.kind == kind) total += r.bytes;
  return total;
}

std::size_t Transcript::offline_bytes() const {
  return bytes(MsgKind::EncryptedVector) + bytes(MsgKind::EncryptedInnerProduct) + bytes(MsgKind::Padding);
}

void Transcript::write_jsonl(std::ostream& out) const {
  for (const auto& r : records_) {
    nlohmann::json j{{"kind", to_string(r.kind)}, {"sender", r.sender}, {"receiver", r.receiver},
                     {"items", r.items},          {"bytes", r.bytes},   {"sha256", r.payload_sha256}};
    out << j.dump() << '\n';
  }
}

Transcript Transcript::read_jsonl(std::istream& in) {
  Transcript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      t.records_.push_back({msg_kind_from_string(j.at("kind").get<std::string>()), j.at("sender").get<std::string>(),
                            j.at("receiver").get<std::string>(), j.at("items").get<std::size_t>(),
                            j.at("bytes").get<std::size_t>(), j.at("sha256").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::InvalidArgument, std::string("bad transcript record: ") + e.what());
    }
  }
  return t;
}

Bytes encode_elements(std::span<const mpz_class> xs, std::size_t width) {
  Bytes out;
  out.reserve(xs.size() * width);
  for (const auto& x : xs) append_be(out, x, width);
  return out;
}

Bytes encode_symbols(std::span<const std::uint64_t> xs, std::size_t width) {
  Bytes out;
  out.reserve(xs.size() * width);
  for (auto x : xs) append_be(out, x, width);
  return out;
}

}  // namespace ncguard
