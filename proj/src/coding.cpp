#include "ncguard/coding.hpp"

namespace ncguard {

SpaceId SpaceId::derive(std::string_view label) {
  const auto d = sha256({reinterpret_cast<const std::uint8_t*>(label.data()), label.size()});
  SpaceId id;
  std::copy_n(d.begin(), id.bytes.size(), id.bytes.begin());
  return id;
}

SpaceId SpaceId::random(Rng& rng) {
  SpaceId id;
  for (auto& b : id.bytes) b = static_cast<std::uint8_t>(rng());
  return id;
}

SpaceId SpaceId::from_hex(std::string_view hex) {
  const auto raw = ncguard::from_hex(hex);
  require(raw.size() == 16, Errc::InvalidArgument, "space id must be 16 bytes");
  SpaceId id;
  std::copy(raw.begin(), raw.end(), id.bytes.begin());
  return id;
}

std::string SpaceId::hex() const { return to_hex(bytes); }

GenerationParams::GenerationParams(Gf field_, std::size_t s_, std::size_t g_, std::size_t n_,
                                   std::size_t pad_)
    : field(field_), s(s_), g(g_), n(n_), pad(pad_) {
  require(s >= 1 && g >= 1 && n >= 1, Errc::InvalidArgument, "s, g and n must be positive");
}

Packet::Packet(SpaceId id, const GenerationParams& params)
    : id_(id), n_(params.n), pad_(params.pad), m_(params.m()), sym_(params.field, params.width()) {}

Packet::Packet(SpaceId id, const GenerationParams& params, GfVector symbols)
    : id_(id), n_(params.n), pad_(params.pad), m_(params.m()), sym_(std::move(symbols)) {
  require(sym_.field() == params.field, Errc::ModulusMismatch, "packet symbols over a different field");
  require(sym_.size() == params.width(), Errc::DimMismatch, "packet width must be n + pad + m");
}

GfVector Packet::slice(std::size_t off, std::size_t len) const {
  const auto& v = sym_.values();
  return GfVector(sym_.field(), std::vector<std::uint64_t>(v.begin() + off, v.begin() + off + len));
}

void Packet::set_data(const GfVector& data) {
  require(data.size() == n_, Errc::DimMismatch, "data length must be n");
  require(data.field() == sym_.field(), Errc::ModulusMismatch, "data over a different field");
  std::copy(data.values().begin(), data.values().end(), sym_.raw().begin());
}

void Packet::set_padding(const GfVector& padding) {
  require(padding.size() == pad_, Errc::DimMismatch, "padding length must be pad");
  require(padding.field() == sym_.field(), Errc::ModulusMismatch, "padding over a different field");
  std::copy(padding.values().begin(), padding.values().end(), sym_.raw().begin() + n_);
}

std::optional<std::size_t> Packet::unit_position() const {
  std::optional<std::size_t> pos;
  const auto& v = sym_.values();
  for (std::size_t k = 0; k < m_; ++k) {
    const auto x = v[n_ + pad_ + k];
    if (x == 0) continue;
    if (x != 1 || pos) return std::nullopt;
    pos = k;
  }
  return pos;
}

Packet augment(const GfVector& data, std::size_t i, std::size_t j, const GenerationParams& params,
               const SpaceId& id) {
  require(i < params.s && j < params.g, Errc::IndexOutOfRange,
          "packet (" + std::to_string(i) + ", " + std::to_string(j) + ") outside s x g");
  Packet p(id, params);
  p.set_data(data);
  p.symbols().raw()[params.n + params.pad + params.position(i, j)] = 1;
  return p;
}

Packet combine(std::span<const Packet> packets, std::span<const std::uint64_t> coeffs) {
  require(!packets.empty(), Errc::InvalidArgument, "combine needs at least one packet");
  require(packets.size() == coeffs.size(), Errc::DimMismatch, "one coefficient per packet");
  const Packet& first = packets.front();
  const Gf& f = first.field();
  GfVector acc(f, first.symbols().size());
  for (std::size_t k = 0; k < packets.size(); ++k) {
    const Packet& p = packets[k];
    require(p.gen_id() == first.gen_id(), Errc::GenerationMismatch, "packets from different generations");
    require(p.n() == first.n() && p.pad() == first.pad() && p.m() == first.m(), Errc::DimMismatch,
            "packets with different layouts");
    axpy(acc, f.reduce(coeffs[k]), p.symbols());
  }
  GenerationParams layout(f, 1, first.m(), first.n(), first.pad());
  return Packet(first.gen_id(), layout, std::move(acc));
}

std::vector<Recovered> decode(std::span<const Packet> received, const GenerationParams& params) {
  std::vector<Recovered> out;
  if (received.empty()) return out;
  const Gf& f = params.field;
  const std::size_t m = params.m(), n = params.n, pad = params.pad;
  // coefficients first so that pivots land in the coefficient block
  GfMatrix mat(f, received.size(), m + n);
  for (std::size_t r = 0; r < received.size(); ++r) {
    const Packet& p = received[r];
    require(p.gen_id() == received.front().gen_id(), Errc::GenerationMismatch,
            "packets from different generations");
    require(p.symbols().size() == params.width(), Errc::DimMismatch, "packet width mismatch");
    const auto& v = p.symbols().values();
    for (std::size_t c = 0; c < m; ++c) mat(r, c) = v[n + pad + c];
    for (std::size_t c = 0; c < n; ++c) mat(r, m + c) = v[c];
  }
  auto red = rref(std::move(mat), m);
  for (std::size_t i = 0; i < red.rank; ++i) {
    const std::size_t pos = red.pivot_cols[i];
    auto row = red.reduced.row(i);
    bool unit = true;
    for (std::size_t c = 0; c < m && unit; ++c)
      if (c != pos && row[c] != 0) unit = false;
    if (!unit) continue;
    out.push_back({pos, GfVector(f, std::vector<std::uint64_t>(row.begin() + m, row.end()))});
  }
  return out;
}

SourceSpace SourceSpace::from_data(const SpaceId& id, const GenerationParams& params,
                                   const std::vector<std::vector<GfVector>>& data) {
  require(data.size() == params.s, Errc::DimMismatch, "need data for every source");
  std::vector<Packet> basis;
  basis.reserve(params.m());
  for (std::size_t i = 0; i < params.s; ++i) {
    require(data[i].size() == params.g, Errc::DimMismatch, "need g packets per source");
    for (std::size_t j = 0; j < params.g; ++j) basis.push_back(augment(data[i][j], i, j, params, id));
  }
  return SourceSpace(params, std::move(basis));
}

namespace {

GfMatrix stack(const GenerationParams& params, const std::vector<Packet>& basis, bool data_only) {
  const std::size_t cols = data_only ? params.n : params.width();
  GfMatrix m(params.field, basis.size(), cols);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    require(basis[r].symbols().size() == params.width(), Errc::DimMismatch, "basis packet width mismatch");
    const auto& v = basis[r].symbols().values();
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = v[c];
  }
  return m;
}

}  // namespace

SourceSpace::SourceSpace(const GenerationParams& params, std::vector<Packet> basis)
    : params_(params),
      basis_(std::move(basis)),
      whole_(stack(params_, basis_, false)),
      data_only_(stack(params_, basis_, true)) {
  require(basis_.size() == params_.m(), Errc::DimMismatch, "source space needs exactly m packets");
}

bool SourceSpace::contains(const Packet& p, SpanMode mode) const {
  if (mode == SpanMode::WholePacket) return whole_.contains(p.symbols());
  return data_only_.contains(p.data());
}

bool in_span(const Packet& p, const SourceSpace& space, SpanMode mode) { return space.contains(p, mode); }

std::size_t wire_size(const GenerationParams& params, std::size_t tag_slots) {
  return 16 + (params.width() + tag_slots) * params.field.symbol_bytes();
}

Bytes serialize(const Packet& p) {
  Bytes out(p.gen_id().bytes.begin(), p.gen_id().bytes.end());
  const std::size_t w = p.field().symbol_bytes();
  out.reserve(16 + (p.symbols().size() + p.tag.slots.size()) * w);
  for (auto x : p.symbols().values()) append_be(out, x, w);
  for (auto t : p.tag.slots) append_be(out, t, w);
  return out;
}

Packet deserialize(std::span<const std::uint8_t> bytes, const GenerationParams& params,
                   std::size_t tag_slots) {
  require(bytes.size() == wire_size(params, tag_slots), Errc::DimMismatch, "wrong serialized length");
  SpaceId id;
  std::copy_n(bytes.begin(), 16, id.bytes.begin());
  const std::size_t w = params.field.symbol_bytes();
  auto symbol = [&](std::size_t k) {
    const auto x = read_be_u64(bytes.subspan(16 + k * w, w));
    require(x < params.field.modulus(), Errc::InvalidArgument, "symbol out of range");
    return x;
  };
  std::vector<std::uint64_t> sym(params.width());
  for (std::size_t k = 0; k < sym.size(); ++k) sym[k] = symbol(k);
  Packet p(id, params, GfVector(params.field, std::move(sym)));
  for (std::size_t t = 0; t < tag_slots; ++t) p.tag.slots.push_back(symbol(params.width() + t));
  return p;
}

}  // namespace ncguard
