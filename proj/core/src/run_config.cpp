#include "imlg/run_config.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

#include "imlg/errors.hpp"
#include "text_util.hpp"

namespace imlg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view v, std::size_t line) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw FormatError(fmt::format("config key {}: invalid value '{}'", key, v), line);
  return out;
}

bool parse_flag(std::string_view key, std::string_view v, std::size_t line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw FormatError(fmt::format("config key {}: expected true or false, got '{}'", key, v), line);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "lr",           "weight_decay", "epochs",       "hidden_dim",         "lambda",
      "eta",          "smote_k",      "threshold",    "region_depth",       "L",
      "edge_cap",     "cluster_size", "clusters_per_batch", "seed",         "baseline_mode",
      "soft_edges",   "validation_clusters", "patience"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view value, std::size_t line) {
  value = trim(value);
  if (key == "lr") lr = parse_number<double>(key, value, line);
  else if (key == "weight_decay") weight_decay = parse_number<double>(key, value, line);
  else if (key == "epochs") epochs = parse_number<int>(key, value, line);
  else if (key == "hidden_dim") hidden_dim = parse_number<int>(key, value, line);
  else if (key == "lambda") lambda = parse_number<double>(key, value, line);
  else if (key == "eta") eta = parse_number<double>(key, value, line);
  else if (key == "smote_k") smote_k = parse_number<int>(key, value, line);
  else if (key == "threshold") threshold = parse_number<double>(key, value, line);
  else if (key == "region_depth") region_depth = parse_number<int>(key, value, line);
  else if (key == "L") L = parse_number<double>(key, value, line);
  else if (key == "edge_cap") edge_cap = parse_number<int>(key, value, line);
  else if (key == "cluster_size") cluster_size = parse_number<std::uint64_t>(key, value, line);
  else if (key == "clusters_per_batch") clusters_per_batch = parse_number<int>(key, value, line);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value, line);
  else if (key == "baseline_mode") baseline_mode = parse_flag(key, value, line);
  else if (key == "soft_edges") soft_edges = parse_flag(key, value, line);
  else if (key == "validation_clusters") validation_clusters = parse_number<int>(key, value, line);
  else if (key == "patience") patience = parse_number<int>(key, value, line);
  else throw FormatError(fmt::format("unknown config key {}", key), line);
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(detail::strip_comment(lines[i]));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected key=value", i + 1);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError("empty config key", i + 1);
    c.set(key, line.substr(eq + 1), i + 1);
  }
  c.validate();
  return c;
}

std::string RunConfig::get(std::string_view key) const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  if (key == "lr") return fmt::format("{}", lr);
  if (key == "weight_decay") return fmt::format("{}", weight_decay);
  if (key == "epochs") return fmt::format("{}", epochs);
  if (key == "hidden_dim") return fmt::format("{}", hidden_dim);
  if (key == "lambda") return fmt::format("{}", lambda);
  if (key == "eta") return fmt::format("{}", eta);
  if (key == "smote_k") return fmt::format("{}", smote_k);
  if (key == "threshold") return fmt::format("{}", threshold);
  if (key == "region_depth") return fmt::format("{}", region_depth);
  if (key == "L") return fmt::format("{}", L);
  if (key == "edge_cap") return fmt::format("{}", edge_cap);
  if (key == "cluster_size") return fmt::format("{}", cluster_size);
  if (key == "clusters_per_batch") return fmt::format("{}", clusters_per_batch);
  if (key == "seed") return fmt::format("{}", seed);
  if (key == "baseline_mode") return b(baseline_mode);
  if (key == "soft_edges") return b(soft_edges);
  if (key == "validation_clusters") return fmt::format("{}", validation_clusters);
  if (key == "patience") return fmt::format("{}", patience);
  throw FormatError(fmt::format("unknown config key {}", key));
}

std::string RunConfig::render() const {
  std::string out;
  for (const auto& k : keys()) out += fmt::format("{}={}\n", k, get(k));
  return out;
}

HyperParams RunConfig::hyper_params() const {
  HyperParams hp;
  hp.hidden_dim = hidden_dim;
  hp.lambda = lambda;
  hp.eta = eta;
  hp.smote_k = smote_k;
  hp.threshold = threshold;
  hp.soft_edges = soft_edges;
  return hp;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.lr = lr;
  t.weight_decay = weight_decay;
  t.cluster_size = cluster_size;
  t.clusters_per_batch = clusters_per_batch;
  t.seed = seed;
  t.baseline_mode = baseline_mode;
  t.validation_clusters = validation_clusters;
  t.patience = patience;
  return t;
}

BuildConfig RunConfig::build_config() const {
  BuildConfig b;
  b.L = L;
  b.edge_cap = edge_cap;
  b.encoder.region_depth = region_depth;
  return b;
}

void RunConfig::validate() const {
  try {
    hyper_params().validate();
    train_config().validate();
    build_config().validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(fmt::format("config: {}", e.what()));
  }
}

}  // namespace imlg
