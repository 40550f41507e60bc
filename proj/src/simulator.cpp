#include "ncguard/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ncguard/detector.hpp"
#include "ncguard/hdl_hash.hpp"
#include "ncguard/he_pip.hpp"
#include "ncguard/intermac.hpp"
#include "ncguard/protocols.hpp"

namespace ncguard {

using json = nlohmann::json;

// ---------------------------------------------------------------- names

const char* to_string(Role r) {
  switch (r) {
    case Role::Source: return "source";
    case Role::Intermediate: return "intermediate";
    case Role::Receiver: return "receiver";
    case Role::Controller: return "controller";
  }
  return "?";
}

const char* to_string(CodingPolicy p) { return p == CodingPolicy::Forward ? "forward" : "combine"; }

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::None: return "none";
    case Scheme::Hash: return "hash";
    case Scheme::InterMacCpk: return "intermac_cpk";
    case Scheme::SpaceMacPm: return "spacemac_pm";
  }
  return "?";
}

Role role_from_string(std::string_view s) {
  for (auto r : {Role::Source, Role::Intermediate, Role::Receiver, Role::Controller})
    if (s == to_string(r)) return r;
  fail(Errc::ConfigError, "unknown role '" + std::string(s) + "'");
}

CodingPolicy policy_from_string(std::string_view s) {
  for (auto p : {CodingPolicy::Forward, CodingPolicy::Combine})
    if (s == to_string(p)) return p;
  fail(Errc::ConfigError, "unknown coding policy '" + std::string(s) + "'");
}

Scheme scheme_from_string(std::string_view s) {
  for (auto x : {Scheme::None, Scheme::Hash, Scheme::InterMacCpk, Scheme::SpaceMacPm})
    if (s == to_string(x)) return x;
  fail(Errc::ConfigError, "unknown scheme '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- topology

Topology::Topology(std::string name, std::vector<NodeSpec> nodes,
                   std::vector<std::pair<std::string, std::string>> edges, std::size_t max_malicious,
                   AdversaryConfig adversary)
    : name_(std::move(name)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      max_malicious_(max_malicious),
      adversary_(std::move(adversary)) {
  index();
}

void Topology::index() {
  by_name_.clear();
  for (std::size_t v = 0; v < nodes_.size(); ++v)
    require(by_name_.emplace(nodes_[v].name, v).second, Errc::ConfigError,
            "duplicate node '" + nodes_[v].name + "'");
  in_.assign(nodes_.size(), {});
  out_.assign(nodes_.size(), {});
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [a, b] : edges_) {
    const auto u = index_of(a), v = index_of(b);
    require(u != v, Errc::ConfigError, "self loop at '" + a + "'");
    require(seen.emplace(u, v).second, Errc::ConfigError, "duplicate edge " + a + " -> " + b);
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
  // Kahn's algorithm, smallest index first
  std::vector<std::size_t> indeg(nodes_.size());
  for (std::size_t v = 0; v < nodes_.size(); ++v) indeg[v] = in_[v].size();
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < nodes_.size(); ++v)
    if (indeg[v] == 0) ready.insert(v);
  order_.clear();
  while (!ready.empty()) {
    const auto v = *ready.begin();
    ready.erase(ready.begin());
    order_.push_back(v);
    for (auto w : out_[v])
      if (--indeg[w] == 0) ready.insert(w);
  }
}

std::size_t Topology::index_of(const std::string& node) const {
  auto it = by_name_.find(node);
  require(it != by_name_.end(), Errc::ConfigError, "unknown node '" + node + "'");
  return it->second;
}

std::size_t Topology::sources() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const NodeSpec& n) { return n.role == Role::Source; }));
}

bool Topology::reaches(std::size_t from, std::size_t to) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (auto w : out_[v])
      if (!seen[w]) seen[w] = true, stack.push_back(w);
  }
  return false;
}

void Topology::validate() const {
  require(order_.size() == nodes_.size(), Errc::ConfigError, "topology '" + name_ + "' has a cycle");
  const std::size_t s = sources();
  require(s >= 2, Errc::ConfigError, "need at least two sources");
  std::vector<bool> numbered(s, false);
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    const auto& n = nodes_[v];
    if (n.role == Role::Source) {
      require(n.source.has_value() && *n.source < s && !numbered[*n.source], Errc::ConfigError,
              "sources must be numbered 0..s-1 exactly once ('" + n.name + "')");
      numbered[*n.source] = true;
      require(in_[v].empty(), Errc::ConfigError, "source '" + n.name + "' has incoming edges");
    }
    if (n.role == Role::Controller)
      require(in_[v].empty() && out_[v].empty(), Errc::ConfigError, "controller takes no data edges");
    if (n.role == Role::Receiver && n.paired_with) {
      const auto p = index_of(*n.paired_with);
      require(nodes_[p].role == Role::Source, Errc::ConfigError,
              "receiver '" + n.name + "' is paired with a non-source");
      require(reaches(p, v), Errc::ConfigError, "receiver '" + n.name + "' is unreachable from its source");
    }
    for (auto k : n.key_subset) require(k < s, Errc::ConfigError, "key subset index out of range at '" + n.name + "'");
    for (const auto& [from, c] : n.coeffs) {
      const auto u = index_of(from);
      require(std::find(in_[v].begin(), in_[v].end(), u) != in_[v].end(), Errc::ConfigError,
              "coefficient for non-neighbour '" + from + "' at '" + n.name + "'");
      (void)c;
    }
  }
}

namespace {

json adversary_json(const AdversaryConfig& a) {
  json j = json::object();
  j["conflicting"] = json::array();
  for (const auto& c : a.conflicting) j["conflicting"].push_back({{"node", c.node}, {"targets", c.targets}});
  j["injectors"] = json::array();
  for (const auto& i : a.injectors) j["injectors"].push_back({{"node", i.node}, {"probability", i.probability}});
  j["collude"] = a.collude;
  return j;
}

AdversaryConfig adversary_from_json(const json& j) {
  AdversaryConfig a;
  for (const auto& c : j.value("conflicting", json::array()))
    a.conflicting.push_back({c.at("node").get<std::string>(), c.value("targets", std::vector<std::string>{})});
  for (const auto& i : j.value("injectors", json::array()))
    a.injectors.push_back({i.at("node").get<std::string>(), i.value("probability", 1.0)});
  a.collude = j.value("collude", false);
  return a;
}

}  // namespace

void Topology::write_json(std::ostream& out) const {
  json j;
  j["name"] = name_;
  j["max_malicious"] = max_malicious_;
  j["nodes"] = json::array();
  for (const auto& n : nodes_) {
    json x{{"name", n.name}, {"role", to_string(n.role)}, {"policy", to_string(n.policy)}, {"decode", n.decodes}};
    if (!n.coeffs.empty()) x["coeffs"] = n.coeffs;
    if (n.emit) x["emit"] = n.emit;
    if (n.source) x["source"] = *n.source;
    if (n.paired_with) x["pair"] = *n.paired_with;
    if (!n.key_subset.empty()) x["key_subset"] = n.key_subset;
    j["nodes"].push_back(std::move(x));
  }
  j["edges"] = json::array();
  for (const auto& [a, b] : edges_) j["edges"].push_back({a, b});
  if (!adversary_.empty() || adversary_.collude) j["adversary"] = adversary_json(adversary_);
  out << j.dump(2) << '\n';
}

Topology Topology::read_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
    std::vector<NodeSpec> nodes;
    for (const auto& x : j.at("nodes")) {
      NodeSpec n;
      n.name = x.at("name").get<std::string>();
      n.role = role_from_string(x.at("role").get<std::string>());
      n.policy = policy_from_string(x.value("policy", std::string("combine")));
      n.decodes = x.value("decode", n.role == Role::Receiver);
      if (x.contains("coeffs")) n.coeffs = x["coeffs"].get<std::map<std::string, std::uint64_t>>();
      n.emit = x.value("emit", std::size_t{0});
      if (x.contains("source")) n.source = x["source"].get<std::size_t>();
      if (x.contains("pair")) n.paired_with = x["pair"].get<std::string>();
      if (x.contains("key_subset")) n.key_subset = x["key_subset"].get<std::vector<std::size_t>>();
      nodes.push_back(std::move(n));
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    Topology t(j.value("name", std::string("custom")), std::move(nodes), std::move(edges),
               j.value("max_malicious", std::size_t{0}),
               j.contains("adversary") ? adversary_from_json(j["adversary"]) : AdversaryConfig{});
    t.validate();
    return t;
  } catch (const json::exception& e) {
    fail(Errc::ConfigError, std::string("bad topology file: ") + e.what());
  }
}

// ---------------------------------------------------------------- fixtures

namespace {

NodeSpec source(std::string name, std::size_t i) {
  NodeSpec n;
  n.name = std::move(name);
  n.role = Role::Source;
  n.policy = CodingPolicy::Forward;
  n.source = i;
  return n;
}

NodeSpec relay(std::string name, CodingPolicy policy) {
  NodeSpec n;
  n.name = std::move(name);
  n.role = Role::Intermediate;
  n.policy = policy;
  return n;
}

NodeSpec receiver(std::string name, std::string pair, std::vector<std::size_t> subset = {}) {
  NodeSpec n;
  n.name = std::move(name);
  n.role = Role::Receiver;
  n.decodes = true;
  n.paired_with = std::move(pair);
  n.key_subset = std::move(subset);
  return n;
}

Topology butterfly() {
  auto a = relay("A", CodingPolicy::Combine);
  a.coeffs = {{"S1", 1}, {"S2", 1}};
  std::vector<NodeSpec> nodes{source("S1", 0), source("S2", 1), a, relay("B", CodingPolicy::Forward),
                              receiver("R1", "S1"), receiver("R2", "S2")};
  std::vector<std::pair<std::string, std::string>> edges{{"S1", "A"}, {"S1", "R2"}, {"S2", "A"}, {"S2", "R1"},
                                                         {"A", "B"},  {"B", "R1"},  {"B", "R2"}};
  AdversaryConfig adv;
  adv.conflicting.push_back({"S2", {"A"}});
  Topology t("butterfly", std::move(nodes), std::move(edges), 1, adv);
  t.validate();
  return t;
}

Topology four_pair() {
  std::vector<NodeSpec> nodes{source("S1", 0),
                              source("S2", 1),
                              source("S3", 2),
                              source("S4", 3),
                              relay("N12", CodingPolicy::Combine),
                              relay("N34", CodingPolicy::Combine),
                              relay("N1234", CodingPolicy::Combine),
                              receiver("R1", "S1", {0, 1, 2}),
                              receiver("R2", "S2", {0, 1, 3}),
                              receiver("R3", "S3", {1, 2, 3}),
                              receiver("R4", "S4", {0, 1, 2, 3})};
  std::vector<std::pair<std::string, std::string>> edges{
      {"S1", "N12"},   {"S2", "N12"},   {"S3", "N34"},   {"S4", "N34"},   {"S1", "N1234"}, {"S2", "N1234"},
      {"S3", "N1234"}, {"S4", "N1234"}, {"N12", "R1"},   {"N12", "R2"},   {"N34", "R3"},   {"N1234", "R4"}};
  AdversaryConfig adv;
  adv.conflicting.push_back({"S4", {"N34"}});
  Topology t("four_pair", std::move(nodes), std::move(edges), 2, adv);
  t.validate();
  return t;
}

}  // namespace

Topology random_dag(const RandomDagParams& p) {
  require(p.sources >= 2 && p.layers >= 1 && p.width >= 1 && p.fan_in >= 1, Errc::ConfigError,
          "random_dag needs sources >= 2 and positive layers, width and fan_in");
  Rng rng(p.seed);
  std::vector<NodeSpec> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> earlier;
  for (std::size_t i = 0; i < p.sources; ++i) {
    nodes.push_back(source("S" + std::to_string(i + 1), i));
    earlier.push_back(nodes.back().name);
  }
  auto pick = [&](const std::vector<std::string>& pool, std::size_t k) {
    std::vector<std::string> c = pool;
    std::shuffle(c.begin(), c.end(), rng);
    c.resize(std::min(k, c.size()));
    std::sort(c.begin(), c.end());
    return c;
  };
  std::vector<std::string> last;
  for (std::size_t l = 0; l < p.layers; ++l) {
    std::vector<std::string> layer;
    for (std::size_t w = 0; w < p.width; ++w) {
      const std::string name = "I" + std::to_string(l + 1) + "_" + std::to_string(w + 1);
      nodes.push_back(relay(name, CodingPolicy::Combine));
      for (const auto& u : pick(earlier, p.fan_in)) edges.emplace_back(u, name);
      layer.push_back(name);
    }
    earlier.insert(earlier.end(), layer.begin(), layer.end());
    last = std::move(layer);
  }
  for (std::size_t i = 0; i < p.sources; ++i) {
    const std::string name = "R" + std::to_string(i + 1);
    nodes.push_back(receiver(name, "S" + std::to_string(i + 1)));
    for (const auto& u : pick(last, p.fan_in)) edges.emplace_back(u, name);
  }
  Topology t("random_dag", nodes, edges, p.sources - 1);
  // a receiver cut off from its source gets a direct edge
  bool patched = false;
  for (std::size_t i = 0; i < p.sources; ++i) {
    const auto s = t.index_of("S" + std::to_string(i + 1)), r = t.index_of("R" + std::to_string(i + 1));
    if (!t.reaches(s, r)) edges.emplace_back(nodes[s].name, nodes[r].name), patched = true;
  }
  if (patched) t = Topology("random_dag", std::move(nodes), std::move(edges), p.sources - 1);
  t.validate();
  return t;
}

Topology build_fixture(const std::string& name, const RandomDagParams& params) {
  if (name == "butterfly") return butterfly();
  if (name == "four_pair") return four_pair();
  if (name == "random_dag") return random_dag(params);
  fail(Errc::UnknownFixture, "no fixture named '" + name + "'");
}

AdversaryConfig parse_adversary(const std::string& text, const Topology& topo) {
  if (text.empty() || text == "none") return {};
  if (text == "fixture") return topo.adversary();
  AdversaryConfig a;
  std::stringstream ss(text);
  std::string clause;
  while (std::getline(ss, clause, ';')) {
    if (clause.empty()) continue;
    if (clause == "collude") {
      a.collude = true;
      continue;
    }
    const auto eq = clause.find('=');
    require(eq != std::string::npos, Errc::ConfigError, "bad adversary clause '" + clause + "'");
    const auto key = clause.substr(0, eq), val = clause.substr(eq + 1);
    if (key == "conflict") {
      const auto gt = val.find('>');
      require(gt != std::string::npos, Errc::ConfigError, "conflict needs SOURCE>TARGET[|TARGET]");
      ConflictingSource c{val.substr(0, gt), {}};
      std::stringstream ts(val.substr(gt + 1));
      std::string t;
      while (std::getline(ts, t, '|'))
        if (!t.empty()) c.targets.push_back(t);
      a.conflicting.push_back(std::move(c));
    } else if (key == "inject") {
      const auto at = val.find('@');
      RandomInjector inj{val.substr(0, at), 1.0};
      if (at != std::string::npos) {
        try {
          inj.probability = std::stod(val.substr(at + 1));
        } catch (const std::exception&) {
          fail(Errc::ConfigError, "bad injection probability in '" + clause + "'");
        }
      }
      require(inj.probability >= 0 && inj.probability <= 1, Errc::ConfigError, "probability outside [0, 1]");
      a.injectors.push_back(std::move(inj));
    } else {
      fail(Errc::ConfigError, "unknown adversary clause '" + key + "'");
    }
  }
  return a;
}

std::uint64_t SimConfig::modulus() const {
  if (q) return *q;
  return (scheme == Scheme::InterMacCpk || scheme == Scheme::SpaceMacPm) ? 1048573 : 2147483647;
}

// ---------------------------------------------------------------- report

const NodeReport& SimReport::node(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n;
  fail(Errc::ConfigError, "no node '" + name + "' in report");
}

std::vector<std::string> SimReport::violations() const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    if (n.accepted + n.dropped != n.received)
      out.push_back(n.name + ": accepted + dropped != received");
    if (scheme == Scheme::Hash && !n.malicious && n.corrupted_accepted > 0)
      out.push_back(n.name + ": accepted a corrupted packet under the hash scheme");
    if (scheme == Scheme::Hash && n.decoded_wrong) out.push_back(n.name + ": decoded wrong data under the hash scheme");
  }
  return out;
}

void SimReport::write_jsonl(std::ostream& out) const {
  json run{{"type", "run"},
           {"topology", topology},
           {"scheme", to_string(scheme)},
           {"seed", seed},
           {"q", q},
           {"s", s},
           {"g", g},
           {"n", n},
           {"bytes_transmitted", bytes_transmitted},
           {"setup_bytes", setup_bytes},
           {"field_mults", field_mults},
           {"modexps", modexps},
           {"corrupted_accepted", corrupted_accepted}};
  run["forged"] = json::array();
  for (const auto& f : forged) run["forged"].push_back({{"position", f.position}, {"data", f.data.values()}});
  out << run.dump() << '\n';
  for (const auto& nr : nodes) {
    json j{{"type", "node"},
           {"name", nr.name},
           {"role", to_string(nr.role)},
           {"malicious", nr.malicious},
           {"received", nr.received},
           {"accepted", nr.accepted},
           {"dropped", nr.dropped},
           {"corrupted_accepted", nr.corrupted_accepted},
           {"corrupted_dropped", nr.corrupted_dropped},
           {"bytes_in", nr.bytes_in},
           {"bytes_out", nr.bytes_out},
           {"field_mults", nr.field_mults},
           {"modexps", nr.modexps}};
    json ev = json::array();
    for (const auto& e : nr.events) {
      json x{{"round", e.round}, {"from", e.from}, {"decision", e.decision}, {"corrupted", e.corrupted}};
      if (e.unit_position) x["unit_position"] = *e.unit_position;
      ev.push_back(std::move(x));
    }
    j["events"] = std::move(ev);
    if (nr.role == Role::Receiver) {
      if (nr.paired_source) j["paired_source"] = *nr.paired_source;
      j["decoded_correct"] = nr.decoded_correct;
      j["decoded_wrong"] = nr.decoded_wrong;
      json rec = json::array();
      for (const auto& r : nr.recovered) rec.push_back({{"position", r.position}, {"data", r.data.values()}});
      j["recovered"] = std::move(rec);
    }
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------- run

namespace {

// Group and controller key pairs outlive a single run, as a deployed
// controller's would; caching them keeps repeated runs cheap.
std::mutex cache_mutex;

mpz_class cached_group(std::uint64_t q, unsigned bits) {
  static std::map<std::pair<std::uint64_t, unsigned>, mpz_class> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find({q, bits});
  if (it != cache.end()) return it->second;
  Rng rng(q * 1000003 + bits);
  const auto P = find_group_prime(mpz_class(std::to_string(q)), bits, rng);
  cache.emplace(std::make_pair(q, bits), P);
  return P;
}

BenalohKeyPair cached_keypair(std::uint64_t r, unsigned bits) {
  static std::map<std::pair<std::uint64_t, unsigned>, BenalohKeyPair> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find({r, bits});
  if (it != cache.end()) return it->second;
  Rng rng(r * 7919 + bits);
  auto kp = benaloh_keygen(r, bits, rng);
  cache.emplace(std::make_pair(r, bits), kp);
  return kp;
}

bool is_mac(Scheme s) { return s == Scheme::InterMacCpk || s == Scheme::SpaceMacPm; }

struct NodeState {
  std::vector<std::pair<std::size_t, Packet>> accepted;  // (sender, packet)
  std::optional<HashVerifier> hash;
  std::optional<KeySum> key_sum;
  bool spacemac = false;
  bool verifies = false;
  bool malicious = false;
  double inject_probability = 0;
  std::set<std::size_t> known_keys;  // InterMac key indices the node holds
  bool knows_spacemac_key = false;
};

class Simulation {
 public:
  Simulation(const Topology& topo, const SimConfig& cfg, const AdversaryConfig& adv, std::uint64_t seed)
      : topo_(topo), cfg_(cfg), adv_(adv), rng_(seed), field_(cfg.modulus()),
        params_(field_, topo.sources(), cfg.g, cfg.n), state_(topo.nodes().size()) {
    report_.topology = topo.name();
    report_.scheme = cfg.scheme;
    report_.seed = seed;
    report_.q = field_.modulus();
    report_.s = params_.s;
    report_.g = params_.g;
    report_.n = params_.n;
  }

  SimReport run() {
    check_adversary();
    make_data();
    setup();
    transmit();
    finish();
    return std::move(report_);
  }

 private:
  void check_adversary() {
    std::size_t malicious_sources = 0;
    for (const auto& c : adv_.conflicting) {
      const auto v = topo_.index_of(c.node);
      require(topo_.nodes()[v].role == Role::Source, Errc::ConfigError,
              "conflicting-commitment node '" + c.node + "' is not a source");
      for (const auto& t : c.targets) {
        const auto w = topo_.index_of(t);
        require(std::find(topo_.out(v).begin(), topo_.out(v).end(), w) != topo_.out(v).end(), Errc::ConfigError,
                "'" + t + "' is not an out-neighbour of '" + c.node + "'");
      }
      if (!state_[v].malicious) ++malicious_sources;
      state_[v].malicious = true;
      targets_[v].insert(c.targets.begin(), c.targets.end());
    }
    for (const auto& inj : adv_.injectors) {
      const auto v = topo_.index_of(inj.node);
      const auto role = topo_.nodes()[v].role;
      require(role != Role::Receiver, Errc::ConfigError, "receiver '" + inj.node + "' cannot be malicious");
      require(role == Role::Intermediate, Errc::ConfigError, "injector '" + inj.node + "' is not an intermediate node");
      state_[v].malicious = true;
      state_[v].inject_probability = inj.probability;
    }
    require(malicious_sources <= params_.s - 1, Errc::ConfigError, "at most s-1 sources may be malicious");
  }

  void make_data() {
    id_ = SpaceId::random(rng_);
    data_.assign(params_.s, {});
    for (auto& src : data_)
      for (std::size_t j = 0; j < params_.g; ++j) src.push_back(random_vector(field_, params_.n, rng_));
    for (const auto& src : data_)
      for (const auto& v : src) report_.committed.push_back(v);
  }

  std::string label(std::size_t v) const { return topo_.nodes()[v].name; }

  std::size_t source_node(std::size_t i) const {
    for (std::size_t v = 0; v < topo_.nodes().size(); ++v)
      if (topo_.nodes()[v].role == Role::Source && topo_.nodes()[v].source == i) return v;
    fail(Errc::ConfigError, "no source numbered " + std::to_string(i));
  }

  std::vector<std::size_t> subset_of(const NodeSpec& n) const {
    if (!n.key_subset.empty()) return n.key_subset;
    std::vector<std::size_t> all(params_.s);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }

  IpChannel channel() const {
    if (field_.modulus() <= kMaxBlockSize) return IpChannel::benaloh(cached_keypair(field_.modulus(), cfg_.he_modulus_bits));
    return IpChannel::clear(field_);
  }

  void setup() {
    const auto& nodes = topo_.nodes();
    Transcript log;
    switch (cfg_.scheme) {
      case Scheme::None: {
        for (std::size_t i = 0; i < params_.s; ++i)
          for (std::size_t j = 0; j < params_.g; ++j) packets_.push_back(augment(data_[i][j], i, j, params_, id_));
        mode_ = SpanMode::WholePacket;
        break;
      }
      case Scheme::Hash: {
        const mpz_class q(std::to_string(field_.modulus()));
        hdl_ = hdl_setup_group(cached_group(field_.modulus(), cfg_.hash_group_bits), q, params_.n, rng_);
        auto space = SourceSpace::from_data(id_, params_, data_);
        packets_ = space.basis();
        commitment_ = HashCommitment::build(*hdl_, space);
        const std::size_t per_node = commitment_->size() * (hdl_->element_bytes() + 32);
        for (std::size_t v = 0; v < nodes.size(); ++v) {
          if (nodes[v].role == Role::Source || nodes[v].role == Role::Controller) continue;
          state_[v].hash.emplace(*hdl_, *commitment_, params_, nodes[v].decodes);
          state_[v].verifies = true;
          report_.setup_bytes += per_node;
        }
        mode_ = SpanMode::DataOnly;
        break;
      }
      case Scheme::InterMacCpk: {
        const auto k = PrfKey::random(rng_);
        auto cpk = cpk_run(k, id_, field_, data_, channel(), rng_, &log);
        params_ = cpk.params;
        packets_ = cpk.packets;
        for (std::size_t pos = 0; pos < packets_.size(); ++pos)
          packets_[pos].tag = sign(cpk.keys, params_.source_of(pos), packets_[pos]);
        for (std::size_t i = 0; i < params_.s; ++i) {
          log.record(MsgKind::Key, "controller", label(source_node(i)), 1,
                     encode_symbols(cpk.keys.key(i).values(), field_.symbol_bytes()));
          state_[source_node(i)].known_keys.insert(i);
        }
        for (std::size_t v = 0; v < nodes.size(); ++v) {
          if (!takes_key(nodes[v])) continue;
          const auto subset = subset_of(nodes[v]);
          state_[v].key_sum = partial_key_sum(cpk.keys, subset, topo_.max_malicious());
          state_[v].verifies = true;
          state_[v].known_keys.insert(subset.begin(), subset.end());
          log.record(MsgKind::Key, "controller", label(v), 1,
                     encode_symbols(state_[v].key_sum->slots.front().values(), field_.symbol_bytes()));
        }
        keys_.emplace(std::move(cpk.keys));
        mode_ = SpanMode::WholePacket;
        break;
      }
      case Scheme::SpaceMacPm: {
        const auto k = PrfKey::random(rng_);
        auto pm = pm_run(k, id_, field_, data_, channel(), rng_, &log);
        for (std::size_t i = 0; i < params_.s; ++i)
          for (std::size_t j = 0; j < params_.g; ++j) {
            auto p = augment(data_[i][j], i, j, params_, id_);
            p.tag = *pm.tags[params_.position(i, j)];
            packets_.push_back(std::move(p));
          }
        smac_.emplace(k, id_, params_);
        for (std::size_t v = 0; v < nodes.size(); ++v) {
          if (!takes_key(nodes[v])) continue;
          state_[v].spacemac = state_[v].verifies = state_[v].knows_spacemac_key = true;
          log.record(MsgKind::Key, "controller", label(v), 1, k.bytes);
        }
        mode_ = SpanMode::WholePacket;
        break;
      }
    }
    for (const auto& r : log.records()) report_.setup_bytes += r.bytes;
    space_.emplace(params_, packets_);
    if (adv_.collude) {
      std::set<std::size_t> pool;
      bool spacemac_key = false;
      for (const auto& st : state_)
        if (st.malicious) pool.insert(st.known_keys.begin(), st.known_keys.end()), spacemac_key |= st.knows_spacemac_key;
      for (auto& st : state_)
        if (st.malicious) st.known_keys = pool, st.knows_spacemac_key = spacemac_key;
    }
  }

  bool takes_key(const NodeSpec& n) const {
    return n.role == Role::Receiver || (n.role == Role::Intermediate && cfg_.hop_verification);
  }

  Tag forged_tag(std::size_t v, const Packet& y, const Tag* fallback) {
    const auto& st = state_[v];
    if (cfg_.scheme == Scheme::InterMacCpk && !st.known_keys.empty()) {
      std::uint64_t t = 0;
      for (auto p : st.known_keys) t = field_.add(t, sign(keys_->key(p), y));
      return Tag{{t}};
    }
    if (cfg_.scheme == Scheme::SpaceMacPm && st.knows_spacemac_key) return smac_->mac(y);
    if (fallback) return *fallback;
    if (is_mac(cfg_.scheme)) return Tag{{field_.random(rng_)}};
    return {};
  }

  Packet conflicting_version(std::size_t v, const Packet& honest) {
    Packet p = honest;
    GfVector delta = random_vector(field_, params_.n, rng_);
    if (delta.is_zero()) delta.raw()[0] = 1;
    GfVector d = p.data();
    axpy(d, 1, delta);
    p.set_data(d);
    p.tag = forged_tag(v, p, cfg_.scheme == Scheme::SpaceMacPm ? &honest.tag : nullptr);
    report_.forged.push_back({*honest.unit_position(), d});
    return p;
  }

  Packet injected(std::size_t v) {
    Packet p(id_, params_, random_vector(field_, params_.width(), rng_));
    auto& raw = p.symbols().raw();
    bool nonzero = false;
    for (std::size_t k = params_.n + params_.pad; k < raw.size(); ++k) nonzero |= raw[k] != 0;
    if (!nonzero) raw.back() = 1;
    p.tag = forged_tag(v, p, nullptr);
    return p;
  }

  void deliver(std::size_t from, std::size_t to, Packet p) {
    const std::uint64_t w = wire_size(params_, p.tag.slots.size());
    report_.nodes[from].bytes_out += w;
    report_.nodes[to].bytes_in += w;
    report_.bytes_transmitted += w;
    next_[to].emplace_back(from, std::move(p));
  }

  void emit(std::size_t from, std::size_t to, Packet p) {
    const auto& st = state_[from];
    if (st.inject_probability > 0 && std::bernoulli_distribution(st.inject_probability)(rng_)) p = injected(from);
    deliver(from, to, std::move(p));
  }

  bool check(std::size_t v, const Packet& p, NodeEvent& ev) {
    auto& st = state_[v];
    if (st.hash) {
      const auto verdict = st.hash->receive(p);
      ev.decision = to_string(verdict.decision);
      return verdict.accepted();
    }
    bool ok = true;
    if (st.verifies) {
      if (p.tag.slots.empty()) ok = false;
      else if (st.key_sum) ok = verify(*st.key_sum, p);
      else if (st.spacemac) ok = smac_->verify(p);
    }
    ev.decision = ok ? "accepted" : "dropped";
    return ok;
  }

  Packet mix(std::size_t v, const std::vector<std::uint64_t>& coeffs) {
    const auto& acc = state_[v].accepted;
    std::vector<Packet> ps;
    ps.reserve(acc.size());
    for (const auto& [u, p] : acc) ps.push_back(p);
    if (is_mac(cfg_.scheme)) return combine_signed(ps, coeffs);
    return combine(ps, coeffs);
  }

  void transmit() {
    const auto& nodes = topo_.nodes();
    report_.nodes.resize(nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      auto& nr = report_.nodes[v];
      nr.name = nodes[v].name;
      nr.role = nodes[v].role;
      nr.malicious = state_[v].malicious;
    }
    next_.assign(nodes.size(), {});
    for (auto v : topo_.order()) {
      if (nodes[v].role != Role::Source) continue;
      const auto i = *nodes[v].source;
      for (auto w : topo_.out(v))
        for (std::size_t j = 0; j < params_.g; ++j) {
          const Packet& honest = packets_[params_.position(i, j)];
          const bool forged = targets_.count(v) && targets_[v].count(label(w));
          deliver(v, w, forged ? conflicting_version(v, honest) : honest);
        }
    }
    for (std::size_t round = 1;; ++round) {
      auto inbox = std::move(next_);
      next_.assign(nodes.size(), {});
      bool any = false;
      for (auto v : topo_.order()) {
        if (inbox[v].empty()) continue;
        any = true;
        cost::Scope scope;
        std::size_t fresh = 0;
        bool all_fixed = !nodes[v].coeffs.empty();
        for (auto& [u, p] : inbox[v]) {
          NodeEvent ev;
          ev.round = round;
          ev.from = label(u);
          ev.unit_position = p.unit_position();
          ev.corrupted = !space_->contains(p, mode_);
          auto& nr = report_.nodes[v];
          ++nr.received;
          if (check(v, p, ev)) {
            ++nr.accepted;
            if (ev.corrupted) ++nr.corrupted_accepted;
            state_[v].accepted.emplace_back(u, std::move(p));
            ++fresh;
          } else {
            ++nr.dropped;
            if (ev.corrupted) ++nr.corrupted_dropped;
          }
          nr.events.push_back(std::move(ev));
        }
        if (fresh > 0 && !topo_.out(v).empty()) {
          const auto& spec = nodes[v];
          const auto& acc = state_[v].accepted;
          if (spec.policy == CodingPolicy::Forward) {
            for (std::size_t k = acc.size() - fresh; k < acc.size(); ++k)
              for (auto w : topo_.out(v)) emit(v, w, acc[k].second);
          } else {
            for (const auto& [u, p] : acc) all_fixed = all_fixed && spec.coeffs.count(label(u));
            const std::size_t count = spec.emit ? spec.emit : (all_fixed ? 1 : fresh);
            for (auto w : topo_.out(v))
              for (std::size_t t = 0; t < count; ++t) {
                std::vector<std::uint64_t> coeffs;
                for (const auto& [u, p] : acc) {
                  auto it = spec.coeffs.find(label(u));
                  coeffs.push_back(it != spec.coeffs.end() ? field_.reduce(it->second) : field_.random_nonzero(rng_));
                }
                emit(v, w, mix(v, coeffs));
              }
          }
        }
        const auto spent = scope.elapsed();
        report_.nodes[v].field_mults += spent.field_mults;
        report_.nodes[v].modexps += spent.modexps;
      }
      if (!any) break;
    }
  }

  void finish() {
    const auto& nodes = topo_.nodes();
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      auto& nr = report_.nodes[v];
      report_.field_mults += nr.field_mults;
      report_.modexps += nr.modexps;
      if (!nr.malicious) report_.corrupted_accepted += nr.corrupted_accepted;
      if (nodes[v].role != Role::Receiver) continue;
      std::vector<Packet> got;
      for (const auto& [u, p] : state_[v].accepted) got.push_back(p);
      nr.recovered = decode(got, params_);
      for (const auto& r : nr.recovered)
        if (r.data != report_.committed[r.position]) nr.decoded_wrong = true;
      if (!nodes[v].paired_with) continue;
      const std::size_t i = *nodes[topo_.index_of(*nodes[v].paired_with)].source;
      nr.paired_source = i;
      std::size_t ok = 0;
      for (const auto& r : nr.recovered)
        if (params_.source_of(r.position) == i && r.data == report_.committed[r.position]) ++ok;
      nr.decoded_correct = ok == params_.g && !nr.decoded_wrong;
    }
  }

  const Topology& topo_;
  SimConfig cfg_;
  AdversaryConfig adv_;
  Rng rng_;
  Gf field_;
  GenerationParams params_;
  std::vector<NodeState> state_;
  std::map<std::size_t, std::set<std::string>> targets_;
  SpaceId id_;
  std::vector<std::vector<GfVector>> data_;
  std::vector<Packet> packets_;
  std::optional<SourceSpace> space_;
  SpanMode mode_ = SpanMode::WholePacket;
  std::optional<HdlParams> hdl_;
  std::optional<HashCommitment> commitment_;
  std::optional<KeySet> keys_;
  std::optional<SpaceMacVerifier> smac_;
  std::vector<std::vector<std::pair<std::size_t, Packet>>> next_;
  SimReport report_;
};

}  // namespace

SimReport run(const Topology& topo, const SimConfig& cfg, const AdversaryConfig& adversary, std::uint64_t seed) {
  topo.validate();
  require(cfg.n >= 1 && cfg.g >= 1, Errc::ConfigError, "n and g must be positive");
  return Simulation(topo, cfg, adversary, seed).run();
}

}  // namespace ncguard
