#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncguard/coding.hpp"
#include "ncguard/hdl_hash.hpp"
#include "ncguard/he_pip.hpp"
#include "ncguard/intermac.hpp"
#include "ncguard/overhead.hpp"
#include "ncguard/protocols.hpp"
#include "ncguard/simulator.hpp"

namespace py = pybind11;
using namespace ncguard;

namespace {

// Python ints cross the boundary as decimal strings.
mpz_class to_mpz(const py::int_& x) { return mpz_class(py::str(py::handle(x)).cast<std::string>()); }
py::int_ to_py(const mpz_class& x) { return py::int_(py::str(x.get_str())); }

OverheadParams overhead_params(std::size_t s, std::size_t g, std::size_t n, unsigned q_bits, unsigned modulus_bits) {
  OverheadParams p;
  p.s = s;
  p.g = g;
  p.n = n;
  p.q_bits = q_bits;
  p.modulus_bits = modulus_bits;
  return p;
}

OverheadScheme overhead_scheme(const std::string& s) {
  for (auto x : {OverheadScheme::Hash, OverheadScheme::InterMacCpk, OverheadScheme::SpaceMacPm, OverheadScheme::Baseline})
    if (s == to_string(x)) return x;
  fail(Errc::InvalidArgument, "unknown scheme '" + s + "'");
}

py::dict game_dict(const GameResult& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["wins"] = r.wins;
  d["rate"] = r.rate();
  d["expected"] = r.expected;
  d["sigma"] = r.sigma();
  d["within_3_sigma"] = r.within_sigmas(3);
  return d;
}

}  // namespace

PYBIND11_MODULE(_ncguard, m) {
  m.doc() = "Pollution detection for inter-session network coding";
  py::register_exception<Error>(m, "NcguardError", PyExc_ValueError);

  py::class_<Gf>(m, "Field")
      .def(py::init<std::uint64_t>(), py::arg("q"))
      .def_property_readonly("modulus", &Gf::modulus)
      .def_property_readonly("bits", &Gf::bits)
      .def("add", &Gf::add)
      .def("sub", &Gf::sub)
      .def("mul", &Gf::mul)
      .def("inv", &Gf::inv)
      .def("pow", &Gf::pow);

  m.def(
      "decode",
      [](std::uint64_t q, std::size_t s, std::size_t g, std::size_t n, const std::vector<std::vector<std::uint64_t>>& rows) {
        Gf f(q);
        GenerationParams params(f, s, g, n);
        const auto id = SpaceId::derive("python");
        std::vector<Packet> packets;
        for (const auto& r : rows) packets.emplace_back(id, params, GfVector(f, r));
        std::vector<std::pair<std::size_t, std::vector<std::uint64_t>>> out;
        for (const auto& rec : decode(packets, params)) out.emplace_back(rec.position, rec.data.values());
        return out;
      },
      py::arg("q"), py::arg("s"), py::arg("g"), py::arg("n"), py::arg("packets"),
      "Recover source packets from rows laid out as data | coefficients.");

  m.def(
      "hdl_hash",
      [](const py::int_& P, const py::int_& q, const std::vector<py::int_>& gens, const std::vector<py::int_>& data) {
        std::vector<mpz_class> g, d;
        for (const auto& x : gens) g.push_back(to_mpz(x));
        for (const auto& x : data) d.push_back(to_mpz(x));
        return to_py(hdl_hash(hdl_from_generators(to_mpz(P), to_mpz(q), g), d));
      },
      py::arg("P"), py::arg("q"), py::arg("gens"), py::arg("data"));

  py::class_<BenalohKeyPair>(m, "BenalohKeyPair")
      .def_property_readonly("N", [](const BenalohKeyPair& k) { return to_py(k.pk().N); })
      .def_property_readonly("r", [](const BenalohKeyPair& k) { return k.pk().r; })
      .def("decrypt", [](const BenalohKeyPair& k, const py::int_& c) { return k.decrypt(to_mpz(c)); });
  m.def(
      "benaloh_keygen",
      [](std::uint64_t r, unsigned bits, std::uint64_t seed) {
        Rng rng(seed);
        return benaloh_keygen(r, bits, rng);
      },
      py::arg("r"), py::arg("modulus_bits"), py::arg("seed") = 1);
  m.def(
      "benaloh_encrypt",
      [](const BenalohKeyPair& k, std::uint64_t msg, std::uint64_t seed) {
        Rng rng(seed);
        return to_py(he_enc(k.pk(), msg, rng));
      },
      py::arg("key"), py::arg("message"), py::arg("seed") = 1);
  m.def("benaloh_add", [](const BenalohKeyPair& k, const py::int_& a, const py::int_& b) {
    return to_py(he_add(k.pk(), to_mpz(a), to_mpz(b)));
  });

  m.def("fixture_json", [](const std::string& name) {
    std::ostringstream out;
    build_fixture(name).write_json(out);
    return out.str();
  });
  m.def(
      "simulate",
      [](const std::string& topology, const std::string& scheme, const std::string& adversary, std::uint64_t seed,
         bool hop_verification, std::size_t n, std::size_t g, std::uint64_t q) {
        Topology topo;
        if (!topology.empty() && topology.front() == '{') {
          std::istringstream in(topology);
          topo = Topology::read_json(in);
        } else {
          topo = build_fixture(topology);
        }
        SimConfig cfg;
        cfg.scheme = scheme_from_string(scheme);
        cfg.hop_verification = hop_verification;
        cfg.n = n;
        cfg.g = g;
        if (q) cfg.q = q;
        auto report = run(topo, cfg, parse_adversary(adversary, topo), seed);
        std::ostringstream out;
        report.write_jsonl(out);
        return py::make_tuple(out.str(), report.violations());
      },
      py::arg("topology"), py::arg("scheme"), py::arg("adversary") = "fixture", py::arg("seed") = 1,
      py::arg("hop_verification") = false, py::arg("n") = 8, py::arg("g") = 1, py::arg("q") = 0,
      "Run one generation; returns (JSONL report, violations). `topology` is a fixture name or topology JSON.");

  m.def(
      "game",
      [](const std::string& scheme, std::uint64_t q, std::uint64_t trials, std::size_t tags, std::uint64_t seed,
         const std::string& issuance) {
        if (scheme == "intermac_cpk") {
          GameConfig cfg;
          cfg.q = q;
          cfg.trials = trials;
          cfg.tags = tags;
          cfg.seed = seed;
          return game_dict(attack_game_1(cfg));
        }
        require(scheme == "spacemac_pm", Errc::InvalidArgument, "scheme must be intermac_cpk or spacemac_pm");
        Game2Config cfg;
        cfg.q = q;
        cfg.trials = trials;
        cfg.tags = tags;
        cfg.seed = seed;
        cfg.issuance = issuance == "pm" ? TagIssuance::Pm : TagIssuance::Direct;
        return game_dict(attack_game_2(cfg));
      },
      py::arg("scheme"), py::arg("q") = 251, py::arg("trials") = 10000, py::arg("tags") = 1, py::arg("seed") = 1,
      py::arg("issuance") = "pm");

  m.def(
      "offline_bits",
      [](const std::string& scheme, std::size_t s, std::size_t g, std::size_t n, unsigned q_bits, unsigned modulus_bits) {
        return offline_bits(overhead_scheme(scheme), overhead_params(s, g, n, q_bits, modulus_bits));
      },
      py::arg("scheme"), py::arg("s") = 5, py::arg("g") = 100, py::arg("n") = 1024, py::arg("q_bits") = 128,
      py::arg("modulus_bits") = 256);
  m.def(
      "compute_mults",
      [](const std::string& scheme) { return compute_cost(overhead_scheme(scheme), OverheadParams{}).mults; },
      py::arg("scheme"), "Average per-packet per-node multiplications at the default parameters.");
  m.def(
      "curve",
      [](const std::string& figure) {
        const auto t = curve_dump(figure);
        return py::make_tuple(t.header, t.rows);
      },
      py::arg("figure"));
}
