#include "cli.hpp"

#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "imlg/design.hpp"
#include "imlg/errors.hpp"
#include "imlg/graph.hpp"
#include "imlg/metrics.hpp"
#include "imlg/packing.hpp"
#include "imlg/partition.hpp"
#include "imlg/run_config.hpp"
#include "imlg/synthetic.hpp"
#include "imlg/trainer.hpp"

namespace imlg::cli {

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

struct Overrides {
  std::optional<int> epochs;
  std::optional<std::uint64_t> cluster_size;
  std::optional<int> hidden_dim;
  std::optional<double> lambda;
  std::optional<double> eta;
  std::optional<double> lr;
  bool baseline_mode = false;
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--config", c.config_path, "key=value run configuration file");
  cmd->add_option("--seed", c.seed, "seed (overrides the config)");
  auto* o = cmd->add_option("--out", c.out, "output path");
  if (out_required) o->required();
  cmd->add_option("--set", c.sets, "config override key=value (repeatable)");
}

/// Reads `path` and parses it, prefixing failures with the path.
template <class F>
auto load(const std::string& path, F&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const LineError& e) {
    throw std::runtime_error(fmt::format("{}: {}", path, e.what()));
  }
}

RunConfig effective_config(const Common& c, const Overrides& o) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{}
                                        : load(c.config_path, [](const std::string& t) { return RunConfig::parse(t); });
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error(fmt::format("--set expects key=value, got '{}'", kv));
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.cluster_size) cfg.cluster_size = *o.cluster_size;
  if (o.hidden_dim) cfg.hidden_dim = *o.hidden_dim;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.eta) cfg.eta = *o.eta;
  if (o.lr) cfg.lr = *o.lr;
  if (o.baseline_mode) cfg.baseline_mode = true;
  cfg.validate();
  return cfg;
}

void print_config(std::ostream& out, std::string_view command, const RunConfig& cfg) {
  fmt::print(out, "# {} effective config\n{}", command, cfg.render());
}

GraphFile load_graph(const std::string& path) {
  return load(path, [](const std::string& t) { return parse_graph(t); });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unpacked-instance prediction on placed FPGA netlists", "imlg"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  GenConfig gen;
  std::string gen_labels;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic design and its packing labels");
  add_common(gen_cmd, gen_c, true);
  gen_cmd->add_option("--instances", gen.n_instances, "instance count");
  gen_cmd->add_option("--lut-ff-mix", gen.lut_ff_mix, "fraction of LUTs");
  gen_cmd->add_option("--target-minority", gen.target_minority, "target unpacked fraction");
  gen_cmd->add_option("--hotspots", gen.hotspot_count, "hotspot count (0 = auto)");
  gen_cmd->add_option("--labels", gen_labels, "label output path (default <out>.labels)");

  // build-graph
  Common bg_c;
  std::string bg_design, bg_labels;
  bool bg_partition = false;
  auto* bg_cmd = app.add_subcommand("build-graph", "build the circuit graph of a design");
  add_common(bg_cmd, bg_c, true);
  bg_cmd->add_option("--design", bg_design, "design file")->required();
  bg_cmd->add_option("--labels", bg_labels, "label file to attach");
  bg_cmd->add_flag("--partition", bg_partition, "append CLUSTER lines using cluster_size");

  // train
  Common tr_c;
  Overrides tr_o;
  std::vector<std::string> tr_graphs;
  std::string tr_log;
  auto* tr_cmd = app.add_subcommand("train", "train a model on one or more labeled graphs");
  add_common(tr_cmd, tr_c, true);
  tr_cmd->add_option("--graph", tr_graphs, "labeled graph file (repeatable; merged)")->required();
  tr_cmd->add_option("--log", tr_log, "train log path (default <out>.log)");
  tr_cmd->add_option("--epochs", tr_o.epochs, "epochs");
  tr_cmd->add_option("--cluster-size", tr_o.cluster_size, "partition target size");
  tr_cmd->add_option("--hidden-dim", tr_o.hidden_dim, "embedding width");
  tr_cmd->add_option("--lambda", tr_o.lambda, "reconstruction weight");
  tr_cmd->add_option("--eta", tr_o.eta, "edge-entry reconstruction penalty");
  tr_cmd->add_option("--lr", tr_o.lr, "learning rate");
  tr_cmd->add_flag("--baseline-mode", tr_o.baseline_mode, "disable oversampling and the decoder");

  // infer
  Common in_c;
  std::string in_ckpt, in_graph;
  auto* in_cmd = app.add_subcommand("infer", "score every node of a graph");
  add_common(in_cmd, in_c, true);
  in_cmd->add_option("--checkpoint", in_ckpt, "checkpoint file")->required();
  in_cmd->add_option("--graph", in_graph, "graph file")->required();

  // eval
  Common ev_c;
  std::string ev_pred, ev_labels, ev_roc;
  auto* ev_cmd = app.add_subcommand("eval", "evaluate predictions against labels");
  add_common(ev_cmd, ev_c, false);
  ev_cmd->add_option("--predictions", ev_pred, "prediction file")->required();
  ev_cmd->add_option("--labels", ev_labels, "label file")->required();
  ev_cmd->add_option("--roc", ev_roc, "write fpr,tpr points here");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen_cmd) {
      const RunConfig cfg = effective_config(gen_c, {});
      gen.seed = cfg.seed;
      gen.validate();
      print_config(out, "gen", cfg);
      fmt::print(out, "instances={}\nlut_ff_mix={}\ntarget_minority={}\nhotspots={}\n", gen.n_instances,
                 gen.lut_ff_mix, gen.target_minority, gen.resolved_hotspots());
      const TargetedDesign t = generate_targeted(gen);
      const std::string labels_path = gen_labels.empty() ? gen_c.out + ".labels" : gen_labels;
      write_file(gen_c.out, write_design(t.generated.design));
      write_file(labels_path, write_labels(t.labels));
      fmt::print(out, "wrote {} ({} instances, {} nets) and {} (minority {:.4f}, intensity {:.4f})\n", gen_c.out,
                 t.generated.design.instances.size(), t.generated.design.nets.size(), labels_path,
                 t.labels.minority_fraction(), t.hotspot_intensity);
    } else if (*bg_cmd) {
      const RunConfig cfg = effective_config(bg_c, {});
      print_config(out, "build-graph", cfg);
      const PlacementDesign design = load(bg_design, [](const std::string& t) { return parse_design(t); });
      std::optional<LabelSet> labels;
      if (!bg_labels.empty())
        labels = load(bg_labels, [&](const std::string& t) { return parse_labels(t, design); });
      const CircuitGraph g = build_graph(design, labels ? &*labels : nullptr, cfg.build_config());
      std::vector<int> clusters;
      if (bg_partition) clusters = partition_graph(g, cfg.cluster_size, mix_seed(cfg.seed, kPartitionStream)).assignment;
      write_file(bg_c.out, write_graph(g, clusters));
      fmt::print(out, "wrote {} ({} nodes, {} edges)\n", bg_c.out, g.size(), g.edges.size());
    } else if (*tr_cmd) {
      const RunConfig cfg = effective_config(tr_c, tr_o);
      print_config(out, "train", cfg);
      std::vector<GraphFile> files;
      for (const auto& p : tr_graphs) files.push_back(load_graph(p));
      CircuitGraph merged;
      std::optional<Partition> part;
      if (files.size() == 1) {
        merged = std::move(files[0].graph);
        if (!files[0].clusters.empty()) {
          Partition pre;
          pre.assignment = files[0].clusters;
          pre.k = 1 + *std::max_element(pre.assignment.begin(), pre.assignment.end());
          pre.cut = cut_size(merged.adj, pre.assignment);
          part = std::move(pre);
        }
      } else {
        std::vector<const CircuitGraph*> gs;
        for (const auto& f : files) gs.push_back(&f.graph);
        merged = merge_graphs(gs, true);
      }
      const TrainResult res = train(merged, cfg.hyper_params(), cfg.train_config(), part);
      const std::string log_path = tr_log.empty() ? tr_c.out + ".log" : tr_log;
      write_file(tr_c.out, save_checkpoint(res.model));
      write_file(log_path, res.log.to_csv());
      const auto obj = res.log.epoch_objectives();
      fmt::print(out, "trained {} epochs on {} nodes in {} clusters ({:.1f}s); final epoch objective {:.6g}\n",
                 res.epochs_run, merged.size(), res.partition.k, res.log.wall_seconds, obj.empty() ? 0.0 : obj.back());
      if (res.smote_skipped) fmt::print(out, "oversampling skipped on {} batches\n", res.smote_skipped);
      fmt::print(out, "wrote {} and {}\n", tr_c.out, log_path);
    } else if (*in_cmd) {
      const RunConfig cfg = effective_config(in_c, {});
      print_config(out, "infer", cfg);
      const Model model = load(in_ckpt, [](const std::string& t) { return load_checkpoint(t); });
      const GraphFile gf = load_graph(in_graph);
      const Predictions p = infer(gf.graph, model);
      write_file(in_c.out, p.to_csv());
      fmt::print(out, "wrote {} ({} predictions)\n", in_c.out, p.size());
    } else if (*ev_cmd) {
      const RunConfig cfg = effective_config(ev_c, {});
      print_config(out, "eval", cfg);
      const Predictions p = load(ev_pred, [](const std::string& t) { return parse_predictions(t); });
      const LabelSet truth = load(ev_labels, [](const std::string& t) { return parse_labels(t); });
      const EvalReport r = report(join_with_labels(p, truth), cfg.threshold);
      const std::string text = render_report(r);
      out << text;
      if (!ev_c.out.empty()) write_file(ev_c.out, text);
      if (!ev_roc.empty()) write_file(ev_roc, render_roc(r.roc));
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace imlg::cli
