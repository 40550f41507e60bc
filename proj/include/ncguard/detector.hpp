#pragma once

// Receive-and-verify procedure of the hash-based scheme: a node that can decode
// a new source packet checks it against the committed SHA-256 digest; any other
// packet goes through the homomorphic test against the committed hashes.

#include <cstddef>
#include <deque>
#include <set>
#include <vector>

#include "ncguard/coding.hpp"
#include "ncguard/hdl_hash.hpp"

namespace ncguard {

enum class Decision { AcceptedViaTraditional, AcceptedViaHomomorphic, Dropped };
enum class CheckPath { None, Traditional, Homomorphic };

const char* to_string(Decision d);
const char* to_string(CheckPath p);

struct Verdict {
  Decision decision = Decision::Dropped;
  CheckPath path = CheckPath::None;
  /// Source positions decoded (and checked) by this packet, if any.
  std::vector<std::size_t> recovered;

  bool accepted() const { return decision != Decision::Dropped; }
};

class HashVerifier {
 public:
  /// The verified buffer holds at most capacity_factor * m packets; the oldest
  /// is evicted first.
  HashVerifier(HdlParams pp, HashCommitment commitment, GenerationParams params, bool decodes,
               std::size_t capacity_factor = 3);

  Verdict receive(const Packet& p);

  bool decodes() const { return decodes_; }
  const std::deque<Packet>& buffer() const { return buffer_; }
  const std::set<std::size_t>& recovered_positions() const { return recovered_; }
  std::size_t capacity() const { return capacity_; }

 private:
  bool traditional_ok(std::size_t position, const GfVector& data) const;
  bool homomorphic_ok(const Packet& p) const;
  void admit(const Packet& p);

  HdlParams pp_;
  HashCommitment commitment_;
  std::vector<mpz_class> hashes_;
  GenerationParams params_;
  bool decodes_;
  std::size_t capacity_;
  std::deque<Packet> buffer_;
  std::set<std::size_t> recovered_;
};

}  // namespace ncguard
