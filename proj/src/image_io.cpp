#include "swta/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "swta/error.hpp"

namespace swta {

namespace fs = std::filesystem;

namespace {

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Unreadable, "cannot open " + quoted(path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_size(std::string_view tok, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::string trim(std::string tok) {
  tok.erase(0, tok.find_first_not_of(" \t\r"));
  tok.erase(tok.find_last_not_of(" \t\r") + 1);
  return tok;
}

bool parse_real(const std::string& raw, double& out) {
  const std::string tok = trim(raw);
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && std::isfinite(out);
}

// PGM header tokenizer: whitespace separated, `#` comments run to end of line.
class PgmHeader {
 public:
  PgmHeader(const std::string& data, const fs::path& path) : data_(data), path_(path) {}

  std::size_t next_number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    std::size_t v = 0;
    if (start == pos_ || !parse_size(std::string_view(data_).substr(start, pos_ - start), v))
      fail(ErrorKind::MalformedHeader, quoted(path_) + ": bad PGM " + what);
    return v;
  }

  // Exactly one whitespace byte separates maxval from binary raster data.
  std::size_t raster_offset() const { return pos_ + 1; }
  std::size_t position() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  const fs::path& path_;
  std::size_t pos_ = 2;
};

RawImage read_pgm(const std::string& data, const fs::path& path) {
  const bool binary = data[1] == '5';
  PgmHeader header(data, path);
  RawImage img;
  img.cols = header.next_number("width");
  img.rows = header.next_number("height");
  const std::size_t maxval = header.next_number("maxval");
  if (img.cols == 0 || img.rows == 0)
    fail(ErrorKind::MalformedHeader, quoted(path) + ": PGM has zero dimension");
  if (maxval == 0 || maxval > 255)
    fail(ErrorKind::MalformedHeader, quoted(path) + ": only 8-bit PGM (maxval 1..255) is supported");

  const std::size_t n = img.rows * img.cols;
  img.values.resize(n);
  if (binary) {
    const std::size_t off = header.raster_offset();
    if (off > data.size() || data.size() - off != n)
      fail(ErrorKind::DimensionMismatch,
           quoted(path) + ": raster holds " +
               std::to_string(off > data.size() ? 0 : data.size() - off) + " bytes, header declares " +
               std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto g = static_cast<unsigned char>(data[off + i]);
      if (g > maxval) fail(ErrorKind::MalformedData, quoted(path) + ": gray value above maxval");
      img.values[i] = static_cast<double>(g) / static_cast<double>(maxval);
    }
  } else {
    std::istringstream body(data.substr(header.position()));
    std::string tok;
    std::size_t count = 0;
    while (body >> tok) {
      std::size_t g = 0;
      if (!parse_size(tok, g) || g > maxval)
        fail(ErrorKind::MalformedData, quoted(path) + ": bad gray value '" + tok + "'");
      if (count < n) img.values[count] = static_cast<double>(g) / static_cast<double>(maxval);
      ++count;
    }
    if (count != n)
      fail(ErrorKind::DimensionMismatch, quoted(path) + ": " + std::to_string(count) +
                                             " gray values, header declares " + std::to_string(n));
  }
  return img;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

RawImage read_csv(const std::string& data, const fs::path& path) {
  std::istringstream in(data);
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorKind::MalformedHeader, quoted(path) + ": empty file");
  const auto head = split(line, ',');
  RawImage img;
  if (head.size() != 2 || !parse_size(trim(head[0]), img.rows) ||
      !parse_size(trim(head[1]), img.cols) || img.rows == 0 || img.cols == 0)
    fail(ErrorKind::MalformedHeader, quoted(path) + ": expected `rows,cols` header");
  img.values.reserve(img.rows * img.cols);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    const auto toks = split(line, ',');
    if (toks.size() != img.cols)
      fail(ErrorKind::DimensionMismatch, quoted(path) + ": row " + std::to_string(row) + " has " +
                                             std::to_string(toks.size()) + " values, expected " +
                                             std::to_string(img.cols));
    for (const auto& t : toks) {
      double v = 0.0;
      if (!parse_real(t, v) || v < 0.0)
        fail(ErrorKind::MalformedData, quoted(path) + ": bad value '" + t + "' in row " +
                                           std::to_string(row));
      img.values.push_back(v);
    }
  }
  if (row != img.rows)
    fail(ErrorKind::DimensionMismatch, quoted(path) + ": " + std::to_string(row) +
                                           " rows, header declares " + std::to_string(img.rows));
  return img;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

RawImage read_image(const fs::path& path) {
  const std::string data = slurp(path);
  if (data.empty()) fail(ErrorKind::MalformedHeader, quoted(path) + ": empty file");
  if (data.size() >= 2 && data[0] == 'P' && (data[1] == '2' || data[1] == '5'))
    return read_pgm(data, path);
  if (data[0] == 'P')
    fail(ErrorKind::MalformedHeader, quoted(path) + ": unsupported PNM variant");
  return read_csv(data, path);
}

Pattern load_image(const fs::path& path) {
  RawImage img = read_image(path);
  Pattern raw(std::move(img.values), Shape::grid2d(img.rows, img.cols), path.stem().string());
  if (raw.is_zero())
    fail(ErrorKind::Annihilated, "pattern annihilated: " + quoted(path) + " is all zero");
  return normalize(raw);
}

void save_image(const Pattern& p, const fs::path& path, const ImageWriteOptions& options) {
  const std::string ext = lower_extension(path);
  if (ext != ".csv" && ext != ".pgm")
    fail(ErrorKind::Parameter, "unknown image extension for " + quoted(path) + " (use .csv or .pgm)");
  const Shape s = p.shape();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + quoted(path));

  if (ext == ".csv") {
    out << s.rows << ',' << s.cols << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t r = 0; r < s.rows; ++r) {
      for (std::size_t c = 0; c < s.cols; ++c) {
        if (c) out << ',';
        out << p[r * s.cols + c];
      }
      out << '\n';
    }
  } else {
    const double peak = p.max();
    const double scale = options.scale_to_peak && peak > 0.0 ? 1.0 / peak : 1.0;
    auto gray = [&](double v) {
      return static_cast<unsigned>(std::lround(std::clamp(v * scale, 0.0, 1.0) * 255.0));
    };
    if (options.encoding == PgmEncoding::Binary) {
      out << "P5\n" << s.cols << ' ' << s.rows << "\n255\n";
      for (std::size_t i = 0; i < p.size(); ++i) out.put(static_cast<char>(gray(p[i])));
    } else {
      out << "P2\n" << s.cols << ' ' << s.rows << "\n255\n";
      for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) {
          if (c) out << ' ';
          out << gray(p[r * s.cols + c]);
        }
        out << '\n';
      }
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + quoted(path));
}

}  // namespace swta
