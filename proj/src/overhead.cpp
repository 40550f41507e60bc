#include "ncguard/overhead.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>

#include <gmpxx.h>

#include "ncguard/errors.hpp"
#include "ncguard/random.hpp"

namespace ncguard {

const char* to_string(OverheadScheme s) {
  switch (s) {
    case OverheadScheme::Hash: return "hash";
    case OverheadScheme::InterMacCpk: return "intermac_cpk";
    case OverheadScheme::SpaceMacPm: return "spacemac_pm";
    case OverheadScheme::Baseline: return "baseline";
  }
  return "?";
}

void OverheadParams::validate() const {
  require(s > 0 && g > 0 && n > 0 && q_bits > 0 && modulus_bits > 0 && levels > 0 && nodes > 0,
          Errc::InvalidArgument, "overhead counts must be positive");
  require(modulus_bits >= q_bits, Errc::InvalidArgument, "expansion factor N/|q| must be at least 1");
  require(mult_rate > 0 && combined >= 0 && traditional_mults >= 0 && dsa_exps >= 0, Errc::InvalidArgument,
          "rates and costs must be non-negative");
  require(decodable >= 0 && decodable <= 1, Errc::InvalidArgument, "decodable share outside [0, 1]");
}

double offline_bits(OverheadScheme scheme, const OverheadParams& p) {
  p.validate();
  const double s = p.s, g = p.g, n = p.n, q = p.q_bits, e = p.expansion();
  switch (scheme) {
    case OverheadScheme::Hash: return s * g * double(p.nodes) * (p.hash_bits + q);
    case OverheadScheme::InterMacCpk: return s * (s - 1) * (n * e * q + g * e * q) + s * g * (s - 1) * q;
    case OverheadScheme::SpaceMacPm: return s * (n * e * q + g * e * q);
    case OverheadScheme::Baseline: break;
  }
  fail(Errc::InvalidArgument, "the baseline has no offline phase");
}

double offline_per_source_packet(OverheadScheme scheme, const OverheadParams& p) {
  return offline_bits(scheme, p) / double(p.m()) / (double(p.n) * p.q_bits);
}

double bandwidth_saved(OverheadScheme scheme, const OverheadParams& p) {
  return 1.0 - offline_bits(scheme, p) / (double(p.m()) * double(p.n) * p.q_bits);
}

double online_single_tag(const OverheadParams& p) {
  p.validate();
  return 1.0 / double(p.n);
}

double online_ripple(const OverheadParams& p) {
  p.validate();
  return double(p.levels) / (2.0 * double(p.n));
}

double online_baseline(const OverheadParams& p) {
  p.validate();
  const double q = p.q_bits;
  return double(p.s) * (double(p.g) * q + p.sig_bits) / (2.0 * double(p.n) * q);
}

ComputeCost compute_cost(OverheadScheme scheme, const OverheadParams& p) {
  p.validate();
  const double n = p.n, m = double(p.m()), half_l = (double(p.levels) - 1) / 2, exp = 1.5 * p.q_bits;
  double mults = 0;
  switch (scheme) {
    case OverheadScheme::InterMacCpk:
    case OverheadScheme::SpaceMacPm: mults = p.combined * half_l + (n + m + half_l); break;
    case OverheadScheme::Baseline: mults = exp * (n + m / 2 + double(p.s) * p.dsa_exps / 2); break;
    case OverheadScheme::Hash:
      mults = (1 - p.decodable) * exp * (n + m / 2) + p.decodable * p.traditional_mults;
      break;
  }
  return {mults, mults / p.mult_rate};
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(10);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

Table curve_dump(std::string_view figure, const OverheadParams& base) {
  base.validate();
  Table t;
  if (figure == "fig5" || figure == "5") {
    t.header = {"q_bits", "intermac_cpk_saved_pct", "spacemac_pm_saved_pct", "intermac_cpk_per_packet_pct",
                "spacemac_pm_per_packet_pct"};
    for (unsigned q = 32; q <= 256; q += 32) {
      auto p = base;
      p.q_bits = q;
      t.rows.push_back({double(q), 100 * bandwidth_saved(OverheadScheme::InterMacCpk, p),
                        100 * bandwidth_saved(OverheadScheme::SpaceMacPm, p),
                        100 * offline_per_source_packet(OverheadScheme::InterMacCpk, p),
                        100 * offline_per_source_packet(OverheadScheme::SpaceMacPm, p)});
    }
  } else if (figure == "fig6" || figure == "6") {
    t.header = {"n", "ours_ripple_pct", "ours_single_tag_pct", "baseline_pct"};
    for (std::size_t n = 32; n <= 272; n += 16) {
      auto p = base;
      p.n = n;
      t.rows.push_back({double(n), 100 * online_ripple(p), 100 * online_single_tag(p), 100 * online_baseline(p)});
    }
  } else if (figure == "fig7" || figure == "7") {
    t.header = {"n", "mac_mults", "mac_ms", "hash_mults", "hash_ms", "baseline_mults", "baseline_ms"};
    for (std::size_t n = 512; n <= 1024; n += 64) {
      auto p = base;
      p.n = n;
      const auto mac = compute_cost(OverheadScheme::InterMacCpk, p);
      const auto hash = compute_cost(OverheadScheme::Hash, p);
      const auto sig = compute_cost(OverheadScheme::Baseline, p);
      t.rows.push_back({double(n), mac.mults, 1e3 * mac.seconds, hash.mults, 1e3 * hash.seconds, sig.mults,
                        1e3 * sig.seconds});
    }
  } else {
    fail(Errc::InvalidArgument, "unknown figure '" + std::string(figure) + "' (fig5, fig6 or fig7)");
  }
  return t;
}

BenchResult bench(std::string_view op, unsigned q_bits, double min_seconds, std::uint64_t seed) {
  require(op == "mult" || op == "exp", Errc::InvalidArgument, "bench op must be mult or exp");
  require(q_bits >= 8 && q_bits <= 4096, Errc::InvalidArgument, "q bits must lie in [8, 4096]");
  Rng rng(seed);
  mpz_class q;
  mpz_nextprime(q.get_mpz_t(), random_bits_exact(rng, q_bits).get_mpz_t());
  mpz_class a = uniform_below(rng, q), b = uniform_below(rng, q), e = uniform_below(rng, q);
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  std::uint64_t ops = 0;
  double elapsed = 0;
  const std::uint64_t batch = op == "mult" ? 4096 : 8;
  do {
    for (std::uint64_t k = 0; k < batch; ++k) {
      if (op == "mult") {
        a = a * b;
        a %= q;
      } else {
        mpz_powm(a.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
        b = a + 2;
      }
    }
    ops += batch;
    elapsed = std::chrono::duration<double>(clock::now() - start).count();
  } while (elapsed < min_seconds);
  return {std::string(op), q_bits, ops, elapsed, double(ops) / elapsed};
}

}  // namespace ncguard
