#pragma once

// Round-based propagation of one generation over a DAG. Each round every node
// verifies what arrived in the previous round, then emits on its out-edges.
// Schemes plug in at the verification step; adversaries at the emission step.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncguard/coding.hpp"

namespace ncguard {

enum class Role { Source, Intermediate, Receiver, Controller };
enum class CodingPolicy { Forward, Combine };
enum class Scheme { None, Hash, InterMacCpk, SpaceMacPm };

const char* to_string(Role r);
const char* to_string(CodingPolicy p);
const char* to_string(Scheme s);
Role role_from_string(std::string_view s);
CodingPolicy policy_from_string(std::string_view s);
Scheme scheme_from_string(std::string_view s);

struct NodeSpec {
  std::string name;
  Role role = Role::Intermediate;
  CodingPolicy policy = CodingPolicy::Combine;
  bool decodes = false;
  /// Fixed local coefficient per in-neighbour; others draw uniform nonzero values.
  std::map<std::string, std::uint64_t> coeffs;
  /// Packets per out-edge per round for Combine nodes; 0 = as many as were
  /// newly accepted (1 when every in-neighbour has a fixed coefficient).
  std::size_t emit = 0;
  std::optional<std::size_t> source;       // sources: index in [0, s)
  std::optional<std::string> paired_with;  // receivers: the source they want
  std::vector<std::size_t> key_subset;     // MAC verifiers; empty = all sources
};

struct ConflictingSource {
  std::string node;
  std::vector<std::string> targets;  // out-neighbours that get the forged packets
};

struct RandomInjector {
  std::string node;
  double probability = 1.0;
};

struct AdversaryConfig {
  std::vector<ConflictingSource> conflicting;
  std::vector<RandomInjector> injectors;
  bool collude = false;

  bool empty() const { return conflicting.empty() && injectors.empty(); }
};

class Topology {
 public:
  Topology() = default;
  Topology(std::string name, std::vector<NodeSpec> nodes, std::vector<std::pair<std::string, std::string>> edges,
           std::size_t max_malicious = 0, AdversaryConfig adversary = {});

  const std::string& name() const { return name_; }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }
  std::size_t max_malicious() const { return max_malicious_; }
  const AdversaryConfig& adversary() const { return adversary_; }

  std::size_t sources() const;
  std::size_t index_of(const std::string& node) const;
  const NodeSpec& node(const std::string& name) const { return nodes_[index_of(name)]; }
  const std::vector<std::size_t>& in(std::size_t v) const { return in_[v]; }
  const std::vector<std::size_t>& out(std::size_t v) const { return out_[v]; }
  /// Node indices in a topological order (stable: ties by declaration order).
  const std::vector<std::size_t>& order() const { return order_; }
  bool reaches(std::size_t from, std::size_t to) const;

  /// Throws ConfigError on cycles, dangling edges, duplicate names, bad source
  /// numbering or unreachable receivers.
  void validate() const;

  void write_json(std::ostream& out) const;
  static Topology read_json(std::istream& in);

 private:
  void index();

  std::string name_;
  std::vector<NodeSpec> nodes_;
  std::vector<std::pair<std::string, std::string>> edges_;
  std::size_t max_malicious_ = 0;
  AdversaryConfig adversary_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<std::vector<std::size_t>> in_, out_;
  std::vector<std::size_t> order_;
};

struct RandomDagParams {
  std::size_t sources = 3;
  std::size_t layers = 2;
  std::size_t width = 3;
  std::size_t fan_in = 2;
  std::uint64_t seed = 1;
};

/// "butterfly", "four_pair" or "random_dag" (with params). Throws UnknownFixture.
Topology build_fixture(const std::string& name, const RandomDagParams& params = {});
Topology random_dag(const RandomDagParams& params);

/// "none", "fixture" (the topology's own block), or a list of clauses joined
/// by ';': conflict=S2>A|B, inject=N1@0.5, collude.
AdversaryConfig parse_adversary(const std::string& text, const Topology& topo);

struct SimConfig {
  Scheme scheme = Scheme::None;
  std::optional<std::uint64_t> q;  // default: 2^31-1 for hash/none, 1048573 for MAC schemes
  std::size_t n = 8;
  std::size_t g = 1;
  /// MAC schemes: give intermediate nodes verification keys and check at every
  /// hop (idealized; receivers always verify).
  bool hop_verification = false;
  unsigned hash_group_bits = 1024;
  unsigned he_modulus_bits = 512;

  std::uint64_t modulus() const;
};

struct NodeEvent {
  std::size_t round = 0;
  std::string from;
  std::string decision;  // accepted | accepted_traditional | accepted_homomorphic | dropped
  bool corrupted = false;
  std::optional<std::size_t> unit_position;
};

struct NodeReport {
  std::string name;
  Role role = Role::Intermediate;
  bool malicious = false;
  std::size_t received = 0, accepted = 0, dropped = 0;
  std::size_t corrupted_accepted = 0, corrupted_dropped = 0;
  std::uint64_t bytes_in = 0, bytes_out = 0;
  std::uint64_t field_mults = 0, modexps = 0;
  std::vector<NodeEvent> events;
  // receivers
  std::optional<std::size_t> paired_source;
  std::vector<Recovered> recovered;
  bool decoded_correct = false;  // every packet of the paired source recovered, all equal to the commitment
  bool decoded_wrong = false;    // some recovered packet differs from the commitment
};

struct SimReport {
  std::string topology;
  Scheme scheme = Scheme::None;
  std::uint64_t seed = 0;
  std::uint64_t q = 0;
  std::size_t s = 0, g = 0, n = 0;
  std::vector<NodeReport> nodes;
  std::uint64_t bytes_transmitted = 0;
  std::uint64_t setup_bytes = 0;
  std::uint64_t field_mults = 0, modexps = 0;
  std::size_t corrupted_accepted = 0;  // over honest nodes
  /// committed data per position, for checking decodes
  std::vector<GfVector> committed;
  /// data of every conflicting packet a malicious source sent, with its position
  std::vector<Recovered> forged;

  const NodeReport& node(const std::string& name) const;
  /// Conservation failures, and any corrupted acceptance under the hash scheme.
  std::vector<std::string> violations() const;
  void write_jsonl(std::ostream& out) const;
};

SimReport run(const Topology& topo, const SimConfig& cfg, const AdversaryConfig& adversary, std::uint64_t seed);

}  // namespace ncguard
