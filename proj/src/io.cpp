#include "crossdict/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstring>
#include <string>
#include <fstream>
#include <istream>
#include <ostream>

namespace crossdict {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

constexpr std::array<char, 4> kTensorMagic = {'T', 'E', 'N', 'S'};
constexpr std::uint32_t kTensorVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw FormatError("unexpected end of tensor stream");
  }
  return v;
}

std::string extension_of(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string netpbm_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  if (tok.empty()) throw FormatError("truncated netpbm header");
  return tok;
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor& t) {
  out.write(kTensorMagic.data(), kTensorMagic.size());
  put_u32(out, kTensorVersion);
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape()) put_u32(out, static_cast<std::uint32_t>(e));
  out.write(reinterpret_cast<const char*>(t.data().data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!out) throw FormatError("failed writing tensor stream");
}

Tensor read_tensor(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kTensorMagic) {
    throw FormatError("not a tensor file (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kTensorVersion) {
    throw FormatError("unsupported tensor version " + std::to_string(version));
  }
  const std::uint32_t rank = get_u32(in);
  if (rank < 1 || rank > 4) throw FormatError("tensor rank out of range");
  Shape shape(rank);
  for (auto& e : shape) e = get_u32(in);
  if (std::find(shape.begin(), shape.end(), 0u) != shape.end()) {
    throw FormatError("tensor has a zero extent");
  }
  std::vector<double> data(shape_product(shape));
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw FormatError("tensor data truncated");
  }
  return Tensor(std::move(shape), std::move(data));
}

void save_tensor(const std::string& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_tensor(out, t);
}

Tensor load_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_tensor(in);
}

Tensor load_netpbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  const std::string magic = netpbm_token(in);
  std::size_t channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path + ": only binary P5/P6 netpbm files are supported");
  }
  const std::size_t cols = std::stoul(netpbm_token(in));
  const std::size_t rows = std::stoul(netpbm_token(in));
  const std::size_t maxval = std::stoul(netpbm_token(in));
  if (maxval == 0 || maxval > 255) throw FormatError(path + ": only 8-bit netpbm is supported");
  std::vector<unsigned char> raw(rows * cols * channels);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw FormatError(path + ": pixel data truncated");
  }
  std::vector<double> data(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) data[i] = raw[i] / static_cast<double>(maxval);
  Shape shape = channels == 1 ? Shape{rows, cols} : Shape{rows, cols, 3};
  return Tensor(std::move(shape), std::move(data));
}

void save_netpbm(const std::string& path, const Tensor& image) {
  const bool gray = image.rank() == 2;
  const bool rgb = image.rank() == 3 && image.extent(2) == 3;
  if (!gray && !rgb) throw DimensionError("netpbm output needs (rows, cols) or (rows, cols, 3)");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << (gray ? "P5" : "P6") << '\n' << image.extent(1) << ' ' << image.extent(0) << "\n255\n";
  std::vector<unsigned char> raw(image.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(image[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

Tensor load_signal(const std::string& path) {
  const std::string ext = extension_of(path);
  if (ext == "pgm" || ext == "ppm") return load_netpbm(path);
  return load_tensor(path);
}

void save_signal(const std::string& path, const Tensor& t) {
  const std::string ext = extension_of(path);
  if (ext == "pgm" || ext == "ppm") {
    save_netpbm(path, t);
  } else {
    save_tensor(path, t);
  }
}

}  // namespace crossdict
