#pragma once

// Message log of the controller protocols. Each record keeps the byte length
// of the serialized payload and its SHA-256, never the payload itself.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ncguard/bytes.hpp"

namespace ncguard {

enum class MsgKind { PublicKey, EncryptedVector, EncryptedInnerProduct, Padding, Tag, Key };

const char* to_string(MsgKind k);
MsgKind msg_kind_from_string(std::string_view s);

struct TranscriptRecord {
  MsgKind kind;
  std::string sender;
  std::string receiver;
  std::size_t items = 0;
  std::size_t bytes = 0;
  std::string payload_sha256;
};

class Transcript {
 public:
  void record(MsgKind kind, std::string sender, std::string receiver, std::size_t items,
              std::span<const std::uint8_t> payload);

  const std::vector<TranscriptRecord>& records() const { return records_; }
  std::size_t bytes(MsgKind kind) const;
  /// Encrypted vectors, encrypted inner products and paddings: the traffic
  /// the offline bandwidth expressions count.
  std::size_t offline_bytes() const;

  void write_jsonl(std::ostream& out) const;
  static Transcript read_jsonl(std::istream& in);

 private:
  std::vector<TranscriptRecord> records_;
};

/// Fixed-width big-endian concatenation used for ciphertext payloads.
Bytes encode_elements(std::span<const mpz_class> xs, std::size_t width);
Bytes encode_symbols(std::span<const std::uint64_t> xs, std::size_t width);

}  // namespace ncguard
