#pragma once

// Closed-form bandwidth and computation overhead of the three detection
// schemes and of the homomorphic-signature baseline, plus the sweeps behind
// the bandwidth-saved, per-packet-overhead and computation curves.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ncguard {

enum class OverheadScheme { Hash, InterMacCpk, SpaceMacPm, Baseline };

const char* to_string(OverheadScheme s);

struct OverheadParams {
  std::size_t s = 5, g = 100, n = 1024;
  unsigned q_bits = 128;
  unsigned modulus_bits = 256;  // N, the encryption modulus
  unsigned hash_bits = 160;     // traditional hash digest
  unsigned sig_bits = 320;      // DSA signature
  std::size_t levels = 16;      // L, tags carried from the first hop
  double combined = 4;          // w, packets combined per node on average
  std::size_t nodes = 100;      // |G|, nodes receiving the hash commitment
  double mult_rate = 2.5e5;     // field multiplications per second at |q| = 128
  double decodable = 0.5;       // share of packets checked with the traditional hash
  double traditional_mults = 80;
  double dsa_exps = 2;

  std::size_t m() const { return s * g; }
  double expansion() const { return double(modulus_bits) / q_bits; }
  /// Throws InvalidArgument unless every count is positive, e >= 1 and the
  /// decodable share lies in [0, 1].
  void validate() const;
};

/// Total offline bits. Baseline has no offline phase and throws InvalidArgument.
double offline_bits(OverheadScheme scheme, const OverheadParams& p);
/// Offline bits per source packet relative to the packet's data size n|q|.
double offline_per_source_packet(OverheadScheme scheme, const OverheadParams& p);
/// 1 - offline bits / (bits of all source packets, s g n |q|).
double bandwidth_saved(OverheadScheme scheme, const OverheadParams& p);

/// Per-packet online overhead as a fraction of the packet size.
double online_single_tag(const OverheadParams& p);  // |q| / (n|q|)
double online_ripple(const OverheadParams& p);      // L|q| / (2n|q|)
double online_baseline(const OverheadParams& p);    // s(g|q| + |sigma|) / (2n|q|)

struct ComputeCost {
  double mults = 0;
  double seconds = 0;
};

/// Average per-packet per-node cost. MAC schemes: w(L-1)/2 + n + m + (L-1)/2.
/// Baseline: (3/2)|q| (n + m/2 + s dsa_exps/2). Hash: a homomorphic check of
/// (3/2)|q| (n + m/2) with probability 1 - decodable, a traditional check otherwise.
ComputeCost compute_cost(OverheadScheme scheme, const OverheadParams& p);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& out) const;
};

/// fig5: saving vs |q| in {32, 64, ..., 256}; fig6: online overhead vs n in
/// {32, 48, ..., 272}; fig7: compute vs n in {512, 576, ..., 1024}.
/// Other fields come from `p`. Throws InvalidArgument on an unknown figure.
Table curve_dump(std::string_view figure, const OverheadParams& p = {});

struct BenchResult {
  std::string op;
  unsigned q_bits = 0;
  std::uint64_t ops = 0;
  double seconds = 0;
  double rate = 0;  // ops per second
};

/// Times field multiplications ("mult") or full-size exponentiations ("exp")
/// modulo a random prime of q_bits bits for at least min_seconds.
BenchResult bench(std::string_view op, unsigned q_bits, double min_seconds = 0.2, std::uint64_t seed = 1);

}  // namespace ncguard
