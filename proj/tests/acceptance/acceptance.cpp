// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "ncguard/hdl_hash.hpp"
#include "ncguard/he_pip.hpp"
#include "ncguard/intermac.hpp"
#include "ncguard/overhead.hpp"
#include "ncguard/protocols.hpp"
#include "ncguard/simulator.hpp"

using namespace ncguard;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

// independent of the library's dot product
std::uint64_t plain_dot(const GfVector& a, const GfVector& b) {
  const auto q = a.field().modulus();
  std::uint64_t acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc = (acc + mulmod(a[k], b[k], q)) % q;
  return acc;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + uniform_below(rng, hi - lo + 1); }

std::vector<std::vector<GfVector>> random_data(const Gf& f, std::size_t s, std::size_t g, std::size_t n, Rng& rng) {
  std::vector<std::vector<GfVector>> d(s);
  for (auto& src : d)
    for (std::size_t j = 0; j < g; ++j) src.push_back(random_vector(f, n, rng));
  return d;
}

std::vector<std::uint64_t> random_coeffs(const Gf& f, std::size_t k, Rng& rng) {
  std::vector<std::uint64_t> c(k);
  for (auto& x : c) x = f.random(rng);
  return c;
}

const IpChannel& benaloh_channel(std::uint64_t r, unsigned bits) {
  static std::map<std::pair<std::uint64_t, unsigned>, IpChannel> cache;
  auto it = cache.find({r, bits});
  if (it == cache.end()) {
    Rng rng(r * 31 + bits);
    it = cache.emplace(std::make_pair(r, bits), IpChannel::benaloh(benaloh_keygen(r, bits, rng))).first;
  }
  return it->second;
}

std::uint64_t random_prime_in(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  for (;;) {
    mpz_class c(std::to_string(lo + uniform_below(rng, hi - lo)));
    if (mpz_probab_prime_p(c.get_mpz_t(), 30)) return c.get_ui();
  }
}

// ---------------------------------------------------------------- 1

Outcome butterfly_attack() {
  Outcome o;
  const auto topo = build_fixture("butterfly");
  const auto adv = topo.adversary();
  int wrong = 0, restored[3] = {0, 0, 0}, dropped[3] = {0, 0, 0};
  const Scheme schemes[] = {Scheme::Hash, Scheme::InterMacCpk, Scheme::SpaceMacPm};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SimConfig none;
    auto r = run(topo, none, adv, seed);
    const auto& rx = r.node("R1");
    if (r.forged.size() == 1 && r.forged[0].position == 1) {
      GfVector expect = r.committed[0] + r.forged[0].data - r.committed[1];
      for (const auto& rec : rx.recovered)
        if (rec.position == 0 && rec.data == expect && rec.data != r.committed[0]) ++wrong;
    }
    for (int k = 0; k < 3; ++k) {
      SimConfig cfg;
      cfg.scheme = schemes[k];
      cfg.hop_verification = true;
      auto rs = run(topo, cfg, adv, seed);
      if (rs.node("R1").decoded_correct && rs.corrupted_accepted == 0) ++restored[k];
      for (const auto& e : rs.node("A").events)
        if (e.from == "S2" && e.decision == "dropped" && e.corrupted && e.unit_position == 1) {
          ++dropped[k];
          break;
        }
    }
  }
  o.pass = wrong == 100;
  o.detail = "none: R1 decodes v1+v2'-v2 in " + std::to_string(wrong) + "/100";
  for (int k = 0; k < 3; ++k) {
    o.pass = o.pass && restored[k] == 100 && dropped[k] == 100;
    o.detail += std::string("; ") + to_string(schemes[k]) + ": R1 correct " + std::to_string(restored[k]) +
                "/100, A drops " + std::to_string(dropped[k]) + "/100";
  }
  return o;
}

// ---------------------------------------------------------------- 2

Outcome cpk_orthogonality() {
  Outcome o;
  Rng rng(2024);
  std::size_t failures = 0, checks = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::uint64_t q = inst % 2 == 0 ? 251 : 2147483647;
    const Gf f(q);
    const std::size_t s = pick(rng, 2, 5), g = pick(rng, 1, 10), n = pick(rng, 1, 64);
    const auto data = random_data(f, s, g, n, rng);
    const auto id = SpaceId::random(rng);
    const auto channel = q <= kMaxBlockSize ? benaloh_channel(q, 256) : IpChannel::clear(f);
    auto res = cpk_run(PrfKey::random(rng), id, f, data, channel, rng);
    for (std::size_t p = 0; p < s; ++p)
      for (std::size_t pos = 0; pos < res.params.m(); ++pos) {
        if (res.params.source_of(pos) == p) continue;
        ++checks;
        if (plain_dot(res.keys.key(p), res.packets[pos].symbols()) != 0) ++failures;
      }
    auto basis = res.packets;
    for (std::size_t k = 0; k < basis.size(); ++k) basis[k].tag = sign(res.keys, res.params.source_of(k), basis[k]);
    const auto sum = res.keys.full_sum();
    for (int t = 0; t < 5; ++t) {
      ++checks;
      if (!verify(sum, combine_signed(basis, random_coeffs(f, basis.size(), rng)))) ++failures;
    }
  }
  o.pass = failures == 0;
  o.detail = "200 instances, " + std::to_string(checks) + " checks, " + std::to_string(failures) + " failures";
  return o;
}

// ---------------------------------------------------------------- 3

Outcome forgery_bound() {
  Outcome o;
  const double q = 251;
  GameConfig g1;
  g1.trials = 100000;
  const auto r1 = attack_game_1(g1);
  Game2Config g2;
  g2.trials = 100000;
  g2.issuance = TagIssuance::Pm;
  const auto r2 = attack_game_2(g2);
  GameConfig g1l;
  g1l.tags = 2;
  g1l.trials = 1000000;
  g1l.seed = 3;
  const auto r3 = attack_game_1(g1l);
  Game2Config g2l;
  g2l.tags = 2;
  g2l.trials = 1000000;
  g2l.issuance = TagIssuance::Direct;
  g2l.seed = 4;
  const auto r4 = attack_game_2(g2l);
  const double bound = 3 / (q * q);
  o.pass = r1.within_sigmas(3) && r2.within_sigmas(3) && r3.rate() <= bound && r4.rate() <= bound;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "game1 %.5f, game2(pm) %.5f vs 1/q = %.5f +- %.5f; l=2: game1 %.2e, game2(direct) %.2e <= %.2e",
                r1.rate(), r2.rate(), 1 / q, 3 * r1.sigma(), r3.rate(), r4.rate(), bound);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------- 4

Outcome hdl_properties() {
  Outcome o;
  Rng rng(44);
  std::size_t toy_fail = 0, big_fail = 0, off_accept = 0;
  {
    // P = 23, q = 11, generators 2 and 4
    const auto pp = hdl_from_generators(23, 11, {2, 4});
    const Gf f(11);
    GenerationParams params(f, 2, 1, 2);
    auto space = SourceSpace::from_data(SpaceId::random(rng), params, random_data(f, 2, 1, 2, rng));
    const auto hashes = HashCommitment::build(pp, space).hashes();
    for (int t = 0; t < 1000; ++t) {
      auto x = combine(space.basis(), random_coeffs(f, 2, rng));
      auto y = combine(space.basis(), random_coeffs(f, 2, rng));
      const std::uint64_t a = f.random(rng), b = f.random(rng);
      std::vector<Packet> two{x, y};
      const std::uint64_t ab[] = {a, b};
      auto z = combine(two, ab);
      mpz_class hx = hdl_hash(pp, x.data()), hy = hdl_hash(pp, y.data()), rhs;
      mpz_class ta, tb;
      mpz_powm_ui(ta.get_mpz_t(), hx.get_mpz_t(), a, pp.P.get_mpz_t());
      mpz_powm_ui(tb.get_mpz_t(), hy.get_mpz_t(), b, pp.P.get_mpz_t());
      rhs = ta * tb % pp.P;
      if (hdl_hash(pp, z.data()) != rhs || !hdl_test(pp, z.data(), z.aug(), hashes)) ++toy_fail;
    }
  }
  {
    auto pp = hdl_setup_nist_like(4, rng);
    BigField f(pp.q);
    for (int t = 0; t < 100; ++t) {
      std::vector<mpz_class> x, y, z;
      const mpz_class a = f.random(rng), b = f.random(rng);
      for (int k = 0; k < 4; ++k) {
        x.push_back(f.random(rng));
        y.push_back(f.random(rng));
        z.push_back(f.add(f.mul(a, x.back()), f.mul(b, y.back())));
      }
      const std::vector<mpz_class> hashes{hdl_hash(pp, x), hdl_hash(pp, y)}, beta{a, b};
      mpz_class ta, tb;
      mpz_powm(ta.get_mpz_t(), hashes[0].get_mpz_t(), a.get_mpz_t(), pp.P.get_mpz_t());
      mpz_powm(tb.get_mpz_t(), hashes[1].get_mpz_t(), b.get_mpz_t(), pp.P.get_mpz_t());
      if (hdl_hash(pp, z) != ta * tb % pp.P || !hdl_test(pp, z, beta, hashes)) ++big_fail;
    }
  }
  {
    const std::uint64_t q = (std::uint64_t{1} << 61) - 1;
    const Gf f(q);
    const auto pp = hdl_setup(30, 8, mpz_class(std::to_string(q)), rng, 512);
    GenerationParams params(f, 2, 2, 8);
    auto space = SourceSpace::from_data(SpaceId::random(rng), params, random_data(f, 2, 2, 8, rng));
    const auto hashes = HashCommitment::build(pp, space).hashes();
    int tried = 0;
    while (tried < 10000) {
      Packet p(space.id(), params, random_vector(f, params.width(), rng));
      if (in_span(p, space, SpanMode::DataOnly)) continue;
      ++tried;
      if (hdl_test(pp, p.data(), p.aug(), hashes)) ++off_accept;
    }
  }
  o.pass = toy_fail == 0 && big_fail == 0 && off_accept == 0;
  o.detail = "toy pairs failing " + std::to_string(toy_fail) + "/1000, 2048-bit pairs failing " +
             std::to_string(big_fail) + "/100, off-span accepted " + std::to_string(off_accept) +
             "/10000 (q = 2^61-1)";
  return o;
}

// ---------------------------------------------------------------- 5

Outcome two_path_equality() {
  Outcome o;
  Rng rng(55);
  int pm_ok = 0, cpk_ok = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::uint64_t q = inst % 2 ? 7 : 11;
    const Gf f(q);
    const std::size_t s = pick(rng, 2, 3), g = pick(rng, 1, 3), n = pick(rng, 1, 4);
    const auto data = random_data(f, s, g, n, rng);
    const auto id = SpaceId::random(rng);
    const auto key = PrfKey::random(rng);
    const auto& channel = benaloh_channel(q, 128);

    auto pm = pm_run(key, id, f, data, channel, rng);
    auto space = SourceSpace::from_data(id, pm.params, data);
    bool same = pm.missing.empty();
    for (std::size_t pos = 0; same && pos < pm.params.m(); ++pos)
      same = pm.tags[pos] && *pm.tags[pos] == spacemac_mac(key, space.basis()[pos]);
    pm_ok += same;

    auto cpk = cpk_run(key, id, f, data, channel, rng);
    auto padded = cpk.space();
    auto gen_keys = gen(id, PrfKey::random(rng), padded);
    bool inter = true;
    for (std::size_t p = 0; p < s && inter; ++p) {
      const auto basis = key_basis(padded, p);
      GfMatrix m = GfMatrix::from_rows(f, padded.params().width(), basis);
      inter = in_row_space(m, cpk.keys.key(p)) && in_row_space(m, gen_keys.key(p));
    }
    for (const KeySet* keys : {&cpk.keys, &gen_keys}) {
      auto signed_basis = cpk.packets;
      for (std::size_t k = 0; k < signed_basis.size(); ++k)
        signed_basis[k].tag = sign(*keys, cpk.params.source_of(k), signed_basis[k]);
      inter = inter && verify(keys->full_sum(), combine_signed(signed_basis, random_coeffs(f, signed_basis.size(), rng)));
    }
    cpk_ok += inter;
  }
  o.pass = pm_ok == 100 && cpk_ok == 100;
  o.detail = "pm == direct " + std::to_string(pm_ok) + "/100, cpk keys interchangeable with gen keys " +
             std::to_string(cpk_ok) + "/100";
  return o;
}

// ---------------------------------------------------------------- 6

Outcome overhead_formulas() {
  Outcome o;
  OverheadParams p;
  const double ratio = online_baseline(p) / online_ripple(p);
  const double single = 100 * online_single_tag(p);
  bool saved_ok = true;
  for (unsigned q = 128; q <= 256; q += 32) {
    auto x = p;
    x.q_bits = q;
    saved_ok = saved_ok && bandwidth_saved(OverheadScheme::InterMacCpk, x) > 0.9 &&
               bandwidth_saved(OverheadScheme::SpaceMacPm, x) > 0.9;
  }
  auto top = p;
  top.q_bits = 256;
  const double pm_saved = 100 * bandwidth_saved(OverheadScheme::SpaceMacPm, top);
  const auto mac = compute_cost(OverheadScheme::InterMacCpk, p);
  const auto sig = compute_cost(OverheadScheme::Baseline, p);
  const auto hash = compute_cost(OverheadScheme::Hash, p);
  bool band = true;
  for (const auto& row : curve_dump("fig7", p).rows) band = band && std::round(row[2]) >= 4 && std::round(row[2]) <= 6;
  const double hash_ratio = hash.mults / sig.mults;
  o.pass = std::abs(ratio - 32) <= 0.5 && std::abs(single - 0.1) < 0.005 && saved_ok && std::abs(pm_saved - 99) < 0.5 &&
           band && sig.mults / mac.mults >= 100 && std::abs(hash_ratio - 0.5) <= 0.05;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "online ratio %.2f, single tag %.3f%%, pm saved %.1f%% at |q|=N=256, mac %.0f mults = %.2f ms "
                "(%.0fx below baseline), hash/baseline %.3f",
                ratio, single, pm_saved, mac.mults, 1e3 * mac.seconds, sig.mults / mac.mults, hash_ratio);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------- 7

Outcome transcript_bytes() {
  Outcome o;
  Rng rng(77);
  int ok = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const bool wide = inst % 2;
    const std::uint64_t q = wide ? random_prime_in(rng, 32768, 65536) : random_prime_in(rng, 128, 256);
    const unsigned N = 8 * static_cast<unsigned>(pick(rng, 12, 32));
    const std::size_t s = pick(rng, 2, 5), g = pick(rng, 1, 4), n = pick(rng, 1, 16);
    const Gf f(q);
    const auto data = random_data(f, s, g, n, rng);
    const auto id = SpaceId::random(rng);
    const auto channel = IpChannel::benaloh(benaloh_keygen(q, N, rng));

    OverheadParams p;
    p.s = s;
    p.g = g;
    p.n = n;
    p.q_bits = wide ? 16 : 8;
    p.modulus_bits = N;

    Transcript cpk_log, pm_log;
    cpk_run(PrfKey::random(rng), id, f, data, channel, rng, &cpk_log);
    pm_run(PrfKey::random(rng), id, f, data, channel, rng, &pm_log);
    const double cpk_bits = 8.0 * cpk_log.offline_bytes(), pm_bits = 8.0 * pm_log.offline_bytes();
    ok += cpk_bits == offline_bits(OverheadScheme::InterMacCpk, p) && pm_bits == offline_bits(OverheadScheme::SpaceMacPm, p);
  }
  OverheadParams at128;
  o.pass = ok == 20;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d/20 settings exact; analytical at |q|=128: cpk %.0f bits, pm %.0f bits", ok,
                offline_bits(OverheadScheme::InterMacCpk, at128), offline_bits(OverheadScheme::SpaceMacPm, at128));
  o.detail = buf;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
    double limit_s;  // 0 = none
  };
  const Criterion all[] = {
      {1, "butterfly attack reproduction", butterfly_attack, 10},
      {2, "intermac/cpk orthogonality", cpk_orthogonality, 0},
      {3, "empirical forgery bound", forgery_bound, 120},
      {4, "h-dl properties", hdl_properties, 0},
      {5, "pip/pm/cpk two-path equality", two_path_equality, 0},
      {6, "overhead formula reproduction", overhead_formulas, 1},
      {7, "transcript byte cross-check", transcript_bytes, 0},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(int(c.limit_s)) + " s budget";
    }
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
