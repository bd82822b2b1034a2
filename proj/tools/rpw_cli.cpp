// Command-line front end: distance computation between distribution files,
// OT-profile export, convergence experiments, and the retrieval benchmark.
// Exit codes: 0 ok, 2 I/O or parse failure, 3 parameter validation,
// 4 internal solver failure.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpw/experiments.hpp"
#include "rpw/io.hpp"
#include "rpw/retrieval.hpp"

namespace {

double parse_exponent(const std::string& text) {
  if (text == "inf") return rpw::kInfiniteP;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad exponent: " + text);
  }
  if (used != text.size() || !(v >= 1.0)) throw std::invalid_argument("p must be >= 1 or inf");
  return v;
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("RPW_SEED")) return std::strtoull(env, nullptr, 10);
  return flag_seed;
}

std::vector<rpw::MetricSpec> parse_metric_list(const std::string& text) {
  std::vector<rpw::MetricSpec> out;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(rpw::MetricSpec::parse(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(rpw::MetricSpec::parse(cur));
  if (out.empty()) throw std::invalid_argument("empty metric list");
  return out;
}

struct DistOptions {
  std::string metric = "rpw";
  std::string p_text = "2";
  double k = 1.0;
  double delta = 1e-3;
  std::string file_a, file_b;
  std::string out;
};

int run_dist(const DistOptions& opt) {
  const double p = parse_exponent(opt.p_text);
  const auto mu = rpw::read_distribution_csv(opt.file_a);
  const auto nu = rpw::read_distribution_csv(opt.file_b);
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json j;
  if (opt.metric == "rpw" || opt.metric == "rpw-bs" || opt.metric == "rpw-approx") {
    const auto cm = rpw::cost_matrix(mu, nu, p).normalized();
    rpw::RPWResult r;
    if (opt.metric == "rpw")
      r = rpw::rpw_distance(mu, nu, cm, opt.k);
    else if (opt.metric == "rpw-bs")
      r = rpw::rpw_binary_search(mu, nu, cm, opt.k, opt.delta);
    else
      r = rpw::rpw_approx(mu, nu, cm, opt.k, opt.delta);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    j = rpw::result_to_json(r, ms, mu.size(), nu.size());
  } else {
    double value = 0.0;
    if (opt.metric == "tv") {
      value = rpw::total_variation(mu, nu);
    } else if (opt.metric == "w") {
      value = rpw::wasserstein(mu, nu, rpw::cost_matrix(mu, nu, p).normalized());
    } else if (opt.metric == "lp") {
      value = rpw::levy_prokhorov(mu, nu,
                                  rpw::cost_matrix(mu, nu, rpw::kInfiniteP).normalized());
    } else {
      throw std::invalid_argument("unknown metric: " + opt.metric);
    }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    j["metric"] = opt.metric;
    j["value"] = value;
    if (std::isinf(p))
      j["p"] = "inf";
    else
      j["p"] = p;
    j["wall_time_ms"] = ms;
    j["n_mu"] = mu.size();
    j["n_nu"] = nu.size();
  }
  if (opt.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw rpw::io_error("cannot write " + opt.out);
    f << j.dump(2) << "\n";
  }
  return 0;
}

struct ProfileOptions {
  std::string p_text = "2";
  std::string file_a, file_b;
  std::string out;
};

int run_profile(const ProfileOptions& opt) {
  const double p = parse_exponent(opt.p_text);
  if (std::isinf(p)) throw std::invalid_argument("profile: p must be finite");
  const auto mu = rpw::read_distribution_csv(opt.file_a);
  const auto nu = rpw::read_distribution_csv(opt.file_b);
  const auto prof = rpw::ot_profile(mu, nu, rpw::cost_matrix(mu, nu, p).normalized());
  rpw::write_profile_csv(opt.out, prof);
  return 0;
}

struct ConvergeOptions {
  std::string dist = "two_point";
  std::string n_text = "10,100,1000,10000,100000";
  std::string metrics_text = "w2,tv,rpw(2,0.1),rpw(2,1),rpw(2,10)";
  std::uint64_t seed = 0;
  std::string out_prefix = "convergence";
  std::string svg;
  unsigned jobs = 1;
};

int run_converge(const ConvergeOptions& opt) {
  const rpw::SyntheticSampler sampler(rpw::sampler_kind_from_string(opt.dist));
  std::vector<std::size_t> n_list;
  for (const auto& tok : rpw::detail::split_csv_line(opt.n_text))
    n_list.push_back(static_cast<std::size_t>(rpw::detail::parse_double(tok, "--n-list")));
  const auto metrics = parse_metric_list(opt.metrics_text);
  const auto report = rpw::convergence_experiment(sampler, n_list, metrics,
                                                  effective_seed(opt.seed), opt.jobs);
  rpw::write_convergence_csv(opt.out_prefix + "_cells.csv", report);
  rpw::write_slope_csv(opt.out_prefix + "_slopes.csv", report);
  if (!opt.svg.empty()) rpw::write_convergence_svg(opt.svg, report);
  for (const auto& [metric, fit] : report.slopes)
    std::cout << metric << " slope " << rpw::fmt_double(fit.slope) << " stderr "
              << rpw::fmt_double(fit.stderr_) << "\n";
  return 0;
}

struct RetrieveOptions {
  std::string corpus_dir;
  std::size_t items = 200;
  std::size_t queries = 20;
  std::string scenario = "noise_shift";
  std::string metrics_text = "w2,tv,rpw(2,1)";
  std::size_t m_max = 100;
  std::uint64_t seed = 0;
  std::string out = "retrieval.csv";
  unsigned jobs = 1;
};

int run_retrieve(const RetrieveOptions& opt) {
  const std::uint64_t seed = effective_seed(opt.seed);
  rpw::LabeledCorpus corpus =
      opt.corpus_dir.empty()
          ? rpw::make_blob_corpus(opt.items, opt.queries, seed)
          : rpw::load_corpus_dir(opt.corpus_dir, opt.items, opt.queries, seed);
  const auto scenario = rpw::perturbation_from_string(opt.scenario);
  corpus = rpw::perturb(corpus, scenario, rpw::mix_seed(seed, 77));
  const auto metrics = parse_metric_list(opt.metrics_text);
  const std::size_t m_max = std::min(opt.m_max, corpus.items.size());
  const auto report =
      rpw::retrieve(corpus, metrics, m_max, opt.jobs, rpw::to_string(scenario));
  rpw::write_retrieval_csv(opt.out, report);
  for (const auto& [metric, acc] : report.accuracy) {
    const std::size_t probe = std::min<std::size_t>(10, m_max);
    std::cout << metric << " accuracy@" << probe << " " << rpw::fmt_double(acc[probe - 1])
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust partial Wasserstein distances between discrete distributions"};
  app.require_subcommand(1);

  DistOptions dist;
  auto* cmd_dist = app.add_subcommand("dist", "distance between two distribution CSV files");
  cmd_dist->add_option("--metric", dist.metric, "rpw | rpw-bs | rpw-approx | tv | lp | w");
  cmd_dist->add_option("--p", dist.p_text, "exponent p >= 1, or 'inf'");
  cmd_dist->add_option("--k", dist.k, "slope parameter k >= 0");
  cmd_dist->add_option("--delta", dist.delta, "additive tolerance for rpw-bs / rpw-approx");
  cmd_dist->add_option("--out", dist.out, "write JSON here instead of stdout");
  cmd_dist->add_option("a", dist.file_a, "first distribution CSV")->required();
  cmd_dist->add_option("b", dist.file_b, "second distribution CSV")->required();

  ProfileOptions prof;
  auto* cmd_profile = app.add_subcommand("profile", "export the exact OT-profile as CSV");
  cmd_profile->add_option("--p", prof.p_text, "exponent p >= 1 (finite)");
  cmd_profile->add_option("--out", prof.out, "output CSV path")->required();
  cmd_profile->add_option("a", prof.file_a, "first distribution CSV")->required();
  cmd_profile->add_option("b", prof.file_b, "second distribution CSV")->required();

  ConvergeOptions conv;
  auto* cmd_converge = app.add_subcommand("converge", "empirical convergence-rate experiment");
  cmd_converge->add_option("--dist", conv.dist, "two_point | grid4x4 | uniform_square");
  cmd_converge->add_option("--n-list", conv.n_text, "ascending sample sizes");
  cmd_converge->add_option("--metrics", conv.metrics_text, "comma-separated metric list");
  cmd_converge->add_option("--seed", conv.seed, "RNG seed (RPW_SEED env overrides)");
  cmd_converge->add_option("--out", conv.out_prefix, "output prefix for CSV files");
  cmd_converge->add_option("--svg", conv.svg, "optional log-log SVG plot path");
  cmd_converge->add_option("--jobs", conv.jobs, "worker threads");

  RetrieveOptions retr;
  auto* cmd_retrieve = app.add_subcommand("retrieve", "image retrieval benchmark");
  cmd_retrieve->add_option("--corpus", retr.corpus_dir,
                           "corpus directory (labels.csv + images); synthetic blobs if absent");
  cmd_retrieve->add_option("--items", retr.items, "labeled corpus size");
  cmd_retrieve->add_option("--queries", retr.queries, "query count");
  cmd_retrieve->add_option("--scenario", retr.scenario, "none | noise | shift | noise_shift");
  cmd_retrieve->add_option("--metrics", retr.metrics_text, "comma-separated metric list");
  cmd_retrieve->add_option("--m-max", retr.m_max, "largest retrieval depth");
  cmd_retrieve->add_option("--seed", retr.seed, "RNG seed (RPW_SEED env overrides)");
  cmd_retrieve->add_option("--out", retr.out, "report CSV path");
  cmd_retrieve->add_option("--jobs", retr.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (cmd_dist->parsed()) return run_dist(dist);
    if (cmd_profile->parsed()) return run_profile(prof);
    if (cmd_converge->parsed()) return run_converge(conv);
    if (cmd_retrieve->parsed()) return run_retrieve(retr);
  } catch (const rpw::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
