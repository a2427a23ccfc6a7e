#include "crossdict/model_file.hpp"

#include <zlib.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace crossdict {

void validate(const SingleScaleModel& model) {
  if (!model.dictionary) throw ConfigError("single-scale model has no dictionary");
  if (shape_product(model.patch_shape) != model.dictionary->atom_dim()) {
    throw DimensionError("single-scale model: patch size does not match atom length");
  }
  if (model.sparsity < 1 ||
      model.sparsity > std::min(model.dictionary->atom_dim(), model.dictionary->num_atoms())) {
    throw ConfigError("single-scale model: sparsity outside [1, min(N, T)]");
  }
}

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'S', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

struct ScaleRecord {
  Shape patch;
  std::uint32_t k = 0;
  std::uint32_t q = 0;
  const Dictionary* dictionary = nullptr;
};

class Writer {
 public:
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}
  std::uint32_t u32() {
    std::uint32_t v = 0;
    bytes(&v, sizeof v);
    return v;
  }
  void bytes(void* p, std::size_t n) {
    if (pos_ + n > size_) throw FormatError("model file truncated");
    std::memcpy(p, data_ + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void write_scale(Writer& w, const ScaleRecord& s) {
  w.u32(static_cast<std::uint32_t>(s.patch.size()));
  for (std::size_t e : s.patch) w.u32(static_cast<std::uint32_t>(e));
  const Eigen::MatrixXd& atoms = s.dictionary->atoms();
  w.u32(static_cast<std::uint32_t>(atoms.rows()));
  w.u32(static_cast<std::uint32_t>(atoms.cols()));
  w.u32(s.k);
  w.u32(s.q);
  w.bytes(atoms.data(), static_cast<std::size_t>(atoms.size()) * sizeof(double));
}

struct LoadedScale {
  Shape patch;
  std::uint32_t k;
  std::uint32_t q;
  std::shared_ptr<const Dictionary> dictionary;
};

LoadedScale read_scale(Reader& r) {
  LoadedScale s;
  const std::uint32_t rank = r.u32();
  if (rank < 1 || rank > 4) throw FormatError("model file: patch rank out of range");
  s.patch.resize(rank);
  for (auto& e : s.patch) e = r.u32();
  const std::uint32_t n = r.u32();
  const std::uint32_t t = r.u32();
  s.k = r.u32();
  s.q = r.u32();
  if (n == 0 || t == 0 || n != shape_product(s.patch)) {
    throw FormatError("model file: atom length does not match patch extents");
  }
  const std::size_t count = static_cast<std::size_t>(n) * t;
  if (r.remaining() < count * sizeof(double)) throw FormatError("model file truncated");
  Eigen::MatrixXd atoms(n, t);
  r.bytes(atoms.data(), count * sizeof(double));
  try {
    s.dictionary = std::make_shared<const Dictionary>(std::move(atoms));
  } catch (const DegenerateError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  return s;
}

}  // namespace

void write_model(std::ostream& out, const Model& model) {
  Writer w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kVersion);
  if (const auto* single = std::get_if<SingleScaleModel>(&model)) {
    validate(*single);
    w.u32(1);
    write_scale(w, {single->patch_shape, static_cast<std::uint32_t>(single->sparsity), 0,
                    single->dictionary.get()});
  } else {
    const auto& cs = std::get<CrossScaleModel>(model);
    w.u32(2);
    write_scale(w, {cs.scale().coarse_shape(), static_cast<std::uint32_t>(cs.k_low()),
                    static_cast<std::uint32_t>(cs.q()), &cs.d_low()});
    write_scale(w, {cs.scale().fine_shape(), static_cast<std::uint32_t>(cs.k_high()), 0,
                    &cs.d_high()});
  }
  auto& buf = w.buffer();
  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size())));
  w.u32(crc);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("failed writing model stream");
}

Model read_model(std::istream& in) {
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kMagic.size() + 4 * sizeof(std::uint32_t)) throw FormatError("model file truncated");
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw FormatError("not a model file (bad magic)");
  }
  const std::size_t body = buf.size() - sizeof(std::uint32_t);
  std::uint32_t stored = 0;
  std::memcpy(&stored, buf.data() + body, sizeof stored);
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(body)));
  if (stored != actual) throw ChecksumError("model file checksum mismatch");

  Reader r(buf.data() + kMagic.size(), body - kMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw FormatError("unsupported model version " + std::to_string(version));
  const std::uint32_t scales = r.u32();
  if (scales == 1) {
    LoadedScale s = read_scale(r);
    if (r.remaining() != 0) throw FormatError("model file has trailing bytes");
    SingleScaleModel m{std::move(s.dictionary), std::move(s.patch), s.k};
    try {
      validate(m);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("model file: ") + e.what());
    }
    return m;
  }
  if (scales != 2) throw FormatError("model file: scale count must be 1 or 2");
  LoadedScale coarse = read_scale(r);
  LoadedScale fine = read_scale(r);
  if (r.remaining() != 0) throw FormatError("model file has trailing bytes");
  if (fine.q != 0 || coarse.q == 0 ||
      static_cast<std::size_t>(coarse.q) * coarse.dictionary->num_atoms() != fine.dictionary->num_atoms()) {
    throw FormatError("model file: T_high must equal Q * T_low");
  }
  if (coarse.patch.size() != fine.patch.size()) throw FormatError("model file: scale ranks differ");
  Shape factors(fine.patch.size());
  for (std::size_t a = 0; a < factors.size(); ++a) {
    if (coarse.patch[a] == 0 || fine.patch[a] % coarse.patch[a] != 0) {
      throw FormatError("model file: coarse extents do not divide fine extents");
    }
    factors[a] = fine.patch[a] / coarse.patch[a];
  }
  try {
    return CrossScaleModel(std::move(coarse.dictionary), std::move(fine.dictionary),
                           ScaleSpec(fine.patch, factors), coarse.k, fine.k);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_model(out, model);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_model(in);
}

}  // namespace crossdict
