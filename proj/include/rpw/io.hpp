#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpw/exact_ot.hpp"
#include "rpw/metric.hpp"

namespace rpw {

/// Raised on unreadable or malformed input files.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trippable decimal form of a double; keeps emitted files
/// byte-stable across runs.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  for (int prec = 1; prec < 17; ++prec) {
    char probe[32];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& tok, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw io_error(context + ": bad number '" + tok + "'");
  }
}

}  // namespace detail

/// Distribution CSV: header row x_1,...,x_d,mass then one row per atom.
inline DiscreteDistribution read_distribution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.back() != "mass")
    throw io_error(path + ": header must be x_1,...,x_d,mass");
  const std::size_t dim = header.size() - 1;
  std::vector<double> coords, masses;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto toks = detail::split_csv_line(line);
    if (toks.size() != dim + 1)
      throw io_error(path + ": row " + std::to_string(row) + " has wrong column count");
    for (std::size_t c = 0; c < dim; ++c)
      coords.push_back(detail::parse_double(toks[c], path));
    masses.push_back(detail::parse_double(toks.back(), path));
  }
  if (masses.empty()) throw io_error(path + ": no atoms");
  try {
    return DiscreteDistribution::from_flat(std::move(coords), std::move(masses), dim);
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

inline void write_distribution_csv(const std::string& path, const DiscreteDistribution& d) {
  std::ostringstream out;
  for (std::size_t c = 0; c < d.dimension(); ++c) out << "x_" << (c + 1) << ",";
  out << "mass\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double x : d.point(i)) out << fmt_double(x) << ",";
    out << fmt_double(d.mass(i)) << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

/// PGM (P2 ascii or P5 raw, maxval <= 65535) into an intensity grid.
inline Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw io_error(path + ": not a P2/P5 PGM");
  auto next_int = [&]() -> long {
    // Skips whitespace and '#' comment lines.
    while (true) {
      const int ch = in.peek();
      if (ch == EOF) break;
      if (ch == '#') {
        std::string junk;
        std::getline(in, junk);
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        in.get();
      } else {
        break;
      }
    }
    long v = 0;
    if (!(in >> v)) throw io_error(path + ": truncated header");
    return v;
  };
  const long w = next_int(), h = next_int(), maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw io_error(path + ": bad dimensions or maxval");
  Image img;
  img.rows = static_cast<std::size_t>(h);
  img.cols = static_cast<std::size_t>(w);
  img.pixels.resize(img.rows * img.cols);
  if (magic == "P2") {
    for (double& px : img.pixels) {
      long v = 0;
      if (!(in >> v)) throw io_error(path + ": truncated pixel data");
      if (v < 0 || v > maxval) throw io_error(path + ": pixel out of range");
      px = static_cast<double>(v);
    }
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(img.pixels.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw io_error(path + ": truncated pixel data");
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      img.pixels[i] = bytes == 1 ? raw[i] : 256.0 * raw[2 * i] + raw[2 * i + 1];
  }
  return img;
}

inline void write_pgm(const std::string& path, const Image& img, long maxval = 255) {
  std::ostringstream out;
  out << "P2\n" << img.cols << " " << img.rows << "\n" << maxval << "\n";
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c)
      out << static_cast<long>(img.at(r, c) + 0.5) << (c + 1 == img.cols ? "" : " ");
    out << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

/// Plain CSV intensity grid, one image row per line.
inline Image read_image_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  Image img;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto toks = detail::split_csv_line(line);
    if (img.cols == 0)
      img.cols = toks.size();
    else if (toks.size() != img.cols)
      throw io_error(path + ": ragged rows");
    for (const auto& t : toks) img.pixels.push_back(detail::parse_double(t, path));
    ++img.rows;
  }
  if (img.rows == 0) throw io_error(path + ": empty image");
  return img;
}

inline Image read_image(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".csv") return read_image_csv(path);
  throw io_error(path + ": unsupported image extension (want .pgm or .csv)");
}

/// Profile CSV: mass, p_power_cost, wp_value (the p-th root).
inline void write_profile_csv(const std::string& path, const OTProfile& prof) {
  std::ostringstream out;
  out << "mass,p_power_cost,wp_value\n";
  for (std::size_t i = 0; i < prof.mass.size(); ++i)
    out << fmt_double(prof.mass[i]) << "," << fmt_double(prof.cost[i]) << ","
        << fmt_double(prof.value_at(prof.mass[i])) << "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

inline nlohmann::json result_to_json(const RPWResult& r, double wall_time_ms, std::size_t n_mu,
                                     std::size_t n_nu) {
  nlohmann::json j;
  j["epsilon"] = r.epsilon;
  j["x_star"] = r.x_star;
  j["y_star"] = r.y_star;
  if (std::isinf(r.p))
    j["p"] = "inf";
  else
    j["p"] = r.p;
  j["k"] = r.k;
  j["method"] = to_string(r.method);
  j["wall_time_ms"] = wall_time_ms;
  j["n_mu"] = n_mu;
  j["n_nu"] = n_nu;
  return j;
}

}  // namespace rpw
