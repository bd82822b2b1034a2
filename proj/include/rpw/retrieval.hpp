#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rpw/io.hpp"
#include "rpw/metric.hpp"
#include "rpw/parallel.hpp"
#include "rpw/samplers.hpp"

namespace rpw {

struct CorpusItem {
  int id = 0;
  std::string label;
  Image image;
};

struct QueryItem {
  int id = 0;
  std::string true_label;  // held out from ranking, used only for scoring
  Image image;
};

struct LabeledCorpus {
  std::vector<CorpusItem> items;
  std::vector<QueryItem> queries;
};

enum class Perturbation { none, noise, shift, noise_and_shift };

inline Perturbation perturbation_from_string(const std::string& s) {
  if (s == "none") return Perturbation::none;
  if (s == "noise") return Perturbation::noise;
  if (s == "shift") return Perturbation::shift;
  if (s == "noise_shift" || s == "noise_and_shift") return Perturbation::noise_and_shift;
  throw std::invalid_argument("unknown perturbation scenario: " + s);
}

inline const char* to_string(Perturbation p) {
  switch (p) {
    case Perturbation::none: return "none";
    case Perturbation::noise: return "noise";
    case Perturbation::shift: return "shift";
    case Perturbation::noise_and_shift: return "noise_shift";
  }
  return "?";
}

namespace detail {

inline void shift_up_two(Image& img) {
  if (img.rows <= 2) throw std::invalid_argument("perturb: shift exceeds image height");
  for (std::size_t r = 0; r + 2 < img.rows; ++r)
    for (std::size_t c = 0; c < img.cols; ++c) img.at(r, c) = img.at(r + 2, c);
  for (std::size_t r = img.rows - 2; r < img.rows; ++r)
    for (std::size_t c = 0; c < img.cols; ++c) img.at(r, c) = 0.0;
}

inline void add_pixel_noise(Image& img, std::mt19937_64& rng) {
  const double max_intensity = *std::max_element(img.pixels.begin(), img.pixels.end());
  std::uniform_int_distribution<std::size_t> pick(0, img.pixels.size() - 1);
  std::uniform_real_distribution<double> amount(0.0, 0.1 * max_intensity);
  img.pixels[pick(rng)] += amount(rng);
}

}  // namespace detail

/// Applies one of the perturbation scenarios to the labeled images; queries
/// are left untouched. noise adds U(0, 0.1*max_intensity) to one uniformly
/// chosen pixel per image; shift moves every image up two pixels (dropped at
/// the top, zero-filled at the bottom). Reproducible for a fixed seed.
inline LabeledCorpus perturb(const LabeledCorpus& corpus, Perturbation scenario,
                             std::uint64_t seed) {
  LabeledCorpus out = corpus;
  for (std::size_t i = 0; i < out.items.size(); ++i) {
    Image& img = out.items[i].image;
    if (scenario == Perturbation::shift || scenario == Perturbation::noise_and_shift)
      detail::shift_up_two(img);
    if (scenario == Perturbation::noise || scenario == Perturbation::noise_and_shift) {
      std::mt19937_64 rng(mix_seed(seed, i));
      detail::add_pixel_noise(img, rng);
    }
  }
  return out;
}

/// Per-metric precision@m curves for one perturbation scenario.
struct RetrievalReport {
  std::string scenario;
  std::size_t m_max = 0;
  // (metric name, accuracy at m = 1..m_max)
  std::vector<std::pair<std::string, std::vector<double>>> accuracy;

  double accuracy_at(const std::string& metric, std::size_t m) const {
    for (const auto& [name, acc] : accuracy)
      if (name == metric) return acc.at(m - 1);
    throw std::invalid_argument("accuracy_at: unknown metric " + metric);
  }
};

/// Ranks the corpus for every query under every metric and accumulates
/// precision@m. Distances use unit-square geometry normalized by sqrt(2);
/// RPW entries are computed through the truncated-profile approximation
/// with delta = 1e-3. Ties in distance break by corpus id.
inline RetrievalReport retrieve(const LabeledCorpus& corpus,
                                const std::vector<MetricSpec>& metrics, std::size_t m_max,
                                unsigned jobs = 1, const char* scenario_tag = "none") {
  if (corpus.items.empty() || corpus.queries.empty())
    throw std::invalid_argument("retrieve: empty corpus or queries");
  if (m_max == 0 || m_max > corpus.items.size())
    throw std::invalid_argument("retrieve: m_max outside [1, corpus size]");
  std::set<int> ids;
  for (const auto& it : corpus.items) ids.insert(it.id);
  for (const auto& q : corpus.queries)
    if (!ids.insert(q.id).second)
      throw std::invalid_argument("retrieve: corpus and query ids overlap");
  for (const auto& it : corpus.items)
    if (it.label.empty()) throw std::invalid_argument("retrieve: empty label");

  std::vector<DiscreteDistribution> item_dists, query_dists;
  item_dists.reserve(corpus.items.size());
  for (const auto& it : corpus.items)
    item_dists.push_back(DiscreteDistribution::from_image(it.image));
  query_dists.reserve(corpus.queries.size());
  for (const auto& q : corpus.queries)
    query_dists.push_back(DiscreteDistribution::from_image(q.image));
  const double ambient = std::sqrt(2.0);

  RetrievalReport report;
  report.scenario = scenario_tag;
  report.m_max = m_max;
  for (const auto& raw_spec : metrics) {
    MetricSpec spec = raw_spec;
    if (spec.kind == MetricSpec::Kind::rpw) {
      spec.mode = MetricSpec::Mode::approx;
      spec.delta = 1e-3;
    }
    const auto dist = pairwise_distances(query_dists, item_dists, spec, ambient, jobs);
    std::vector<double> hits(m_max, 0.0);
    for (std::size_t q = 0; q < corpus.queries.size(); ++q) {
      std::vector<std::size_t> order(corpus.items.size());
      std::iota(order.begin(), order.end(), 0);
      const double* row = dist.data() + q * corpus.items.size();
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] < row[b];
        return corpus.items[a].id < corpus.items[b].id;
      });
      std::size_t correct = 0;
      for (std::size_t m = 0; m < m_max; ++m) {
        if (corpus.items[order[m]].label == corpus.queries[q].true_label) ++correct;
        hits[m] += static_cast<double>(correct) / static_cast<double>(m + 1);
      }
    }
    for (double& h : hits) h /= static_cast<double>(corpus.queries.size());
    report.accuracy.emplace_back(raw_spec.name(), std::move(hits));
  }
  return report;
}

inline void write_retrieval_csv(const std::string& path, const RetrievalReport& report) {
  std::ostringstream out;
  out << "metric,scenario,m,accuracy\n";
  for (const auto& [metric, acc] : report.accuracy)
    for (std::size_t m = 0; m < acc.size(); ++m)
      out << metric << "," << report.scenario << "," << (m + 1) << "," << fmt_double(acc[m])
          << "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  f << out.str();
}

/// Synthetic stand-in for an image dataset: three classes of sharp intensity
/// blobs at class-specific locations with per-item subpixel jitter, plus a
/// couple of faint speckle pixels per image (dataset clutter), on a 14x14
/// canvas quantized to 8-bit levels. The tight blob makes plain overlap
/// fragile under shifts, and the speckles give partial transport genuine
/// junk mass to leave behind.
inline LabeledCorpus make_blob_corpus(std::size_t n_items, std::size_t n_queries,
                                      std::uint64_t seed) {
  const std::size_t side = 14;
  // One orientation per class, none parallel to the vertical shift, so a
  // two-pixel shift cuts across every blob's thin axis and wipes out most
  // of the pixelwise overlap while the geometry barely moves.
  const double angles[3] = {1.5707963267948966, 0.7853981633974483, 2.356194490192345};
  static const char* labels[3] = {"a", "b", "c"};
  const double sigma_major = 1.8, sigma_minor = 0.55;

  auto blob = [&](int cls, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(-1.2, 1.2);
    const double cr = 7.0 + jitter(rng);
    const double cc = 7.0 + jitter(rng);
    const double ca = std::cos(angles[cls]), sa = std::sin(angles[cls]);
    Image img;
    img.rows = img.cols = side;
    img.pixels.assign(side * side, 0.0);
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c) {
        const double u = (r - cr) * ca + (c - cc) * sa;   // along the major axis
        const double v = -(r - cr) * sa + (c - cc) * ca;  // across it
        const double q = u * u / (sigma_major * sigma_major) +
                         v * v / (sigma_minor * sigma_minor);
        const double val = 255.0 * std::exp(-q / 2.0);
        img.at(r, c) = val >= 20.0 ? std::floor(val) : 0.0;
      }
    std::uniform_int_distribution<std::size_t> pick(0, side * side - 1);
    std::uniform_real_distribution<double> faint(8.0, 45.0);
    for (int s = 0; s < 2; ++s) img.pixels[pick(rng)] += std::floor(faint(rng));
    return img;
  };

  LabeledCorpus corpus;
  for (std::size_t i = 0; i < n_items; ++i) {
    std::mt19937_64 rng(mix_seed(seed, 1, i));
    const int cls = static_cast<int>(i % 3);
    corpus.items.push_back({static_cast<int>(i), labels[cls], blob(cls, rng)});
  }
  for (std::size_t q = 0; q < n_queries; ++q) {
    std::mt19937_64 rng(mix_seed(seed, 2, q));
    const int cls = static_cast<int>(q % 3);
    corpus.queries.push_back(
        {static_cast<int>(n_items + q), labels[cls], blob(cls, rng)});
  }
  return corpus;
}

/// Loads a corpus directory: labels.csv (header id,label,path) plus the
/// referenced PGM/CSV images. Rows are shuffled with the seed, then split
/// into n_items labeled images and n_queries queries.
inline LabeledCorpus load_corpus_dir(const std::string& dir, std::size_t n_items,
                                     std::size_t n_queries, std::uint64_t seed) {
  std::ifstream in(dir + "/labels.csv");
  if (!in) throw io_error("cannot open " + dir + "/labels.csv");
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line) !=
                                     std::vector<std::string>{"id", "label", "path"})
    throw io_error(dir + "/labels.csv: header must be id,label,path");
  struct Row {
    int id;
    std::string label, path;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto toks = detail::split_csv_line(line);
    if (toks.size() != 3) throw io_error(dir + "/labels.csv: bad row");
    rows.push_back({static_cast<int>(detail::parse_double(toks[0], "labels.csv")), toks[1],
                    toks[2]});
  }
  if (rows.size() < n_items + n_queries)
    throw io_error(dir + ": corpus smaller than requested split");
  std::mt19937_64 rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  LabeledCorpus corpus;
  for (std::size_t i = 0; i < n_items; ++i)
    corpus.items.push_back({rows[i].id, rows[i].label, read_image(dir + "/" + rows[i].path)});
  for (std::size_t q = 0; q < n_queries; ++q) {
    const auto& r = rows[n_items + q];
    corpus.queries.push_back({r.id, r.label, read_image(dir + "/" + r.path)});
  }
  return corpus;
}

}  // namespace rpw
