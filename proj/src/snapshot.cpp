#include "nitns/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "nitns/errors.hpp"

namespace nitns {

namespace {

constexpr char kMagic[8] = {'N', 'I', 'T', 'N', 'S', '0', '0', '1'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double x) {
    const auto v = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw SnapshotError("snapshot truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t formulation_tag(Formulation f) {
  switch (f) {
    case Formulation::direct:
      return 1;
    case Formulation::mollified:
      return 2;
    case Formulation::vortex:
      return 3;
    case Formulation::cotangent:
      return 4;
    case Formulation::eulerian_lagrangian:
      return 5;
  }
  return 0;
}

namespace {

Formulation formulation_from_tag(std::uint32_t tag) {
  switch (tag) {
    case 1:
      return Formulation::direct;
    case 2:
      return Formulation::mollified;
    case 3:
      return Formulation::vortex;
    case 4:
      return Formulation::cotangent;
    case 5:
      return Formulation::eulerian_lagrangian;
    default:
      throw SnapshotError("snapshot has unknown formulation tag " + std::to_string(tag));
  }
}

}  // namespace

Snapshot make_snapshot(const SimState& state, const SolverConfig& config) {
  Snapshot s;
  s.formulation = state.formulation;
  const SpectralField& any = state.el ? state.el->v : state.flow->field;
  s.dim = any.grid()->dim();
  s.n = any.grid()->n();
  s.nu = config.nu;
  s.delta = config.mollifier ? config.mollifier->delta : 0.0;
  s.g = config.g;
  s.t = state.t();
  if (state.el) {
    s.t1 = state.el->t1;
    s.restart_count = static_cast<std::uint32_t>(state.el->restart_count);
    s.fields.push_back(to_physical(state.el->ell));
    s.fields.push_back(to_physical(state.el->v));
    if (state.el->logdet) s.fields.push_back(to_physical(*state.el->logdet));
    if (state.el->zeta) s.fields.push_back(to_physical(*state.el->zeta));
  } else {
    s.t1 = s.t;
    s.fields.push_back(to_physical(state.flow->field));
  }
  return s;
}

SimState restore_state(const Snapshot& snap, const GridPtr& grid) {
  if (grid->dim() != snap.dim || grid->n() != snap.n) {
    throw SnapshotError("snapshot grid does not match");
  }
  SimState s;
  s.formulation = snap.formulation;
  if (snap.formulation == Formulation::eulerian_lagrangian) {
    if (snap.fields.size() < 2) throw SnapshotError("EL snapshot needs ell and v");
    ELState el;
    el.ell = to_spectral(snap.fields[0]);
    el.v = to_spectral(snap.fields[1]);
    for (std::size_t i = 2; i < snap.fields.size(); ++i) {
      if (snap.fields[i].ncomp() == 1) {
        el.logdet = to_spectral(snap.fields[i]);
      } else {
        el.zeta = to_spectral(snap.fields[i]);
      }
    }
    el.t = snap.t;
    el.t1 = snap.t1;
    el.g = snap.g;
    el.restart_count = static_cast<int>(snap.restart_count);
    s.el = std::move(el);
  } else {
    if (snap.fields.size() != 1) throw SnapshotError("snapshot field count mismatch");
    s.flow = FlowState{snap.formulation, to_spectral(snap.fields[0]), snap.t};
  }
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kSnapshotVersion);
  w.u32(static_cast<std::uint32_t>(snap.dim));
  w.u32(static_cast<std::uint32_t>(snap.n));
  w.u32(formulation_tag(snap.formulation));
  w.f64(snap.nu);
  w.f64(snap.delta);
  w.f64(snap.g);
  w.f64(snap.t);
  w.f64(snap.t1);
  w.u32(snap.restart_count);
  w.u32(static_cast<std::uint32_t>(snap.fields.size()));
  for (const auto& f : snap.fields) w.u32(static_cast<std::uint32_t>(f.ncomp()));
  for (const auto& f : snap.fields) {
    for (double x : f.data()) w.f64(x);
  }
  // Write to a sibling file first so a failed write never leaves a torn
  // snapshot under the final name.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open '" + tmp + "' for writing");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw SnapshotError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw SnapshotError("cannot move snapshot into place at '" + path + "'");
  }
}

Snapshot read_snapshot(const std::string& path, std::optional<Formulation> expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot '" + path + "'");
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw SnapshotError("bad snapshot magic");
  const auto version = r.u32();
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));
  }
  Snapshot s;
  s.dim = static_cast<int>(r.u32());
  s.n = static_cast<int>(r.u32());
  s.formulation = formulation_from_tag(r.u32());
  if (expect && *expect != s.formulation) {
    throw SnapshotError("snapshot formulation tag mismatch: file holds " +
                        to_string(s.formulation) + ", expected " + to_string(*expect));
  }
  s.nu = r.f64();
  s.delta = r.f64();
  s.g = r.f64();
  s.t = r.f64();
  s.t1 = r.f64();
  s.restart_count = r.u32();
  const auto nfields = r.u32();
  if (nfields > 16) throw SnapshotError("snapshot declares too many fields");
  std::vector<std::uint32_t> ncomp(nfields);
  for (auto& c : ncomp) {
    c = r.u32();
    if (c == 0 || c > 27) throw SnapshotError("snapshot declares an invalid component count");
  }
  GridPtr grid;
  try {
    grid = Grid::create(s.dim, s.n);
  } catch (const ConfigError& err) {
    throw SnapshotError(std::string("snapshot header: ") + err.what());
  }
  std::size_t total = 0;
  for (auto c : ncomp) total += c * grid->physical_size();
  if (r.remaining() < total * 8) throw SnapshotError("snapshot truncated");
  if (r.remaining() > total * 8) throw SnapshotError("snapshot has trailing bytes");
  for (auto c : ncomp) {
    PhysicalField f(grid, static_cast<int>(c));
    for (double& x : f.data()) x = r.f64();
    s.fields.push_back(std::move(f));
  }
  return s;
}

}  // namespace nitns
