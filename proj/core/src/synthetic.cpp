#include "imlg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "imlg/packing.hpp"
#include "imlg/rng.hpp"

namespace imlg {

void GenConfig::validate() const {
  if (n_instances < 10) throw GenConfigError(fmt::format("n_instances must be >= 10, got {}", n_instances));
  if (!(target_minority > 0.0 && target_minority < 0.5))
    throw GenConfigError(fmt::format("target_minority must be in (0, 0.5), got {}", target_minority));
  if (!(lut_ff_mix >= 0.0 && lut_ff_mix <= 1.0))
    throw GenConfigError(fmt::format("lut_ff_mix must be in [0, 1], got {}", lut_ff_mix));
  if (!(hotspot_intensity >= 0.0 && hotspot_intensity <= 1.0))
    throw GenConfigError(fmt::format("hotspot_intensity must be in [0, 1], got {}", hotspot_intensity));
  if (!(ff_driven_fraction >= 0.0 && ff_driven_fraction <= 1.0))
    throw GenConfigError("ff_driven_fraction must be in [0, 1]");
  if (layout_w < 0 || layout_h < 0) throw GenConfigError("layout extent must be >= 0 (0 = auto)");
  if (!(mean_cell_occupancy > 0.0)) throw GenConfigError("mean_cell_occupancy must be > 0");
  if (!(hotspot_sigma > 0.0)) throw GenConfigError("hotspot_sigma must be > 0");
  if (hotspot_count < 0 || clock_nets < 1 || reset_nets < 1)
    throw GenConfigError("hotspot_count >= 0, clock_nets >= 1 and reset_nets >= 1 required");
  const long long capacity = 1LL * resolved_width() * resolved_height() * kBlesPerCell *
                             (kLutsPerBle + kFfsPerBle);
  if (n_instances > capacity)
    throw GenConfigError(fmt::format("infeasible config: {} instances exceed total slice capacity {}",
                                     n_instances, capacity));
}

int GenConfig::resolved_width() const {
  if (layout_w > 0) return layout_w;
  return std::max(4, static_cast<int>(std::ceil(std::sqrt(n_instances / mean_cell_occupancy))));
}

int GenConfig::resolved_height() const {
  if (layout_h > 0) return layout_h;
  return resolved_width();
}

int GenConfig::resolved_hotspots() const {
  return hotspot_count > 0 ? hotspot_count : std::max(1, n_instances / 1000);
}

namespace {

double clamp_coord(double v, int extent) {
  const double hi = std::nextafter(static_cast<double>(extent), 0.0);
  return std::clamp(v, 0.0, hi);
}

struct Grid {
  int w, h;
  std::vector<std::vector<std::size_t>> cells;

  Grid(const std::vector<Instance>& inst, int w_, int h_) : w(w_), h(h_) {
    cells.resize(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < inst.size(); ++i) cells[cell(inst[i].x, inst[i].y)].push_back(i);
  }
  std::size_t cell(double x, double y) const {
    const int cx = std::clamp(static_cast<int>(x), 0, w - 1);
    const int cy = std::clamp(static_cast<int>(y), 0, h - 1);
    return static_cast<std::size_t>(cy) * w + cx;
  }
};

}  // namespace

GeneratedDesign generate_design(const GenConfig& cfg) {
  cfg.validate();
  const int w = cfg.resolved_width();
  const int h = cfg.resolved_height();
  const std::size_t n = static_cast<std::size_t>(cfg.n_instances);

  Rng main(mix_seed(cfg.seed, 0));
  struct Hotspot { double x, y; };
  std::vector<Hotspot> hotspots(static_cast<std::size_t>(cfg.resolved_hotspots()));
  const double mx = std::min(2.0, w / 4.0);
  const double my = std::min(2.0, h / 4.0);
  for (auto& hs : hotspots) {
    hs.x = main.uniform(mx, w - mx);
    hs.y = main.uniform(my, h - my);
  }

  std::vector<Instance> inst(n);
  std::vector<int> ck(n, -1), sr(n, -1);
  std::vector<char> wants_driver(n, 0);
  // Each instance draws from its own stream, so an instance's type and
  // candidate positions do not depend on hotspot_intensity.
  for (std::size_t i = 0; i < n; ++i) {
    Rng r(mix_seed(cfg.seed, i + 1));
    const bool lut = r.uniform() < cfg.lut_ff_mix;
    const auto lut_type = static_cast<InstanceType>(r.below(5));
    const double u_hot = r.uniform();
    const double bx = r.uniform(0.0, w);
    const double by = r.uniform(0.0, h);
    const auto& hs = hotspots[r.below(hotspots.size())];
    const double hx = hs.x + cfg.hotspot_sigma * r.normal();
    const double hy = hs.y + cfg.hotspot_sigma * r.normal();
    const int c = static_cast<int>(r.below(static_cast<std::uint64_t>(cfg.clock_nets)));
    const int s = static_cast<int>(r.below(static_cast<std::uint64_t>(cfg.reset_nets)));
    const bool driven = r.uniform() < cfg.ff_driven_fraction;

    Instance& in = inst[i];
    in.type = lut ? lut_type : InstanceType::FF;
    in.name = fmt::format("{}{:06d}", lut ? "l" : "f", i);
    const bool hot = u_hot < cfg.hotspot_intensity;
    in.x = clamp_coord(hot ? hx : bx, w);
    in.y = clamp_coord(hot ? hy : by, h);
    if (!lut) {
      ck[i] = c;
      sr[i] = s;
      wants_driver[i] = driven;
    }
  }

  const Grid grid(inst, w, h);
  // sinks[j]: pins driven by instance j's output.
  std::vector<std::vector<PinRef>> sinks(n);
  std::vector<char> drives_ff(n, 0);
  GeneratedDesign out;

  for (std::size_t f = 0; f < n; ++f) {
    if (!wants_driver[f]) continue;
    const int fx = std::clamp(static_cast<int>(inst[f].x), 0, w - 1);
    const int fy = std::clamp(static_cast<int>(inst[f].y), 0, h - 1);
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= 3 && best == n; ++ring) {
      for (int y = fy - ring; y <= fy + ring; ++y) {
        for (int x = fx - ring; x <= fx + ring; ++x) {
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          for (std::size_t l : grid.cells[static_cast<std::size_t>(y) * w + x]) {
            if (!is_lut(inst[l].type) || drives_ff[l]) continue;
            const double d = std::hypot(inst[l].x - inst[f].x, inst[l].y - inst[f].y);
            if (d < best_d || (d == best_d && l < best)) {
              best_d = d;
              best = l;
            }
          }
        }
      }
    }
    if (best == n) continue;
    drives_ff[best] = 1;
    sinks[best].push_back({inst[f].name, "d"});
    out.lut_ff_drivers.emplace_back(inst[best].name, inst[f].name);
  }

  for (std::size_t l = 0; l < n; ++l) {
    if (!is_lut(inst[l].type)) continue;
    Rng r(mix_seed(cfg.seed ^ 0x5eedf00dULL, l));
    const int lx = std::clamp(static_cast<int>(inst[l].x), 0, w - 1);
    const int ly = std::clamp(static_cast<int>(inst[l].y), 0, h - 1);
    std::vector<std::size_t> used;
    for (int k = 0; k < lut_inputs(inst[l].type); ++k) {
      std::size_t driver = n;
      for (int attempt = 0; attempt < 30 && driver == n; ++attempt) {
        const int x = lx + static_cast<int>(r.below(5)) - 2;
        const int y = ly + static_cast<int>(r.below(5)) - 2;
        if (x < 0 || y < 0 || x >= w || y >= h) continue;
        const auto& bucket = grid.cells[static_cast<std::size_t>(y) * w + x];
        if (bucket.empty()) continue;
        const std::size_t j = bucket[r.below(bucket.size())];
        if (j != l && std::find(used.begin(), used.end(), j) == used.end()) driver = j;
      }
      while (driver == n) {
        const std::size_t j = r.below(n);
        if (j != l && std::find(used.begin(), used.end(), j) == used.end()) driver = j;
      }
      used.push_back(driver);
      sinks[driver].push_back({inst[l].name, fmt::format("i{}", k)});
    }
  }

  PlacementDesign& d = out.design;
  d.layout_w = w;
  d.layout_h = h;
  for (std::size_t j = 0; j < n; ++j) {
    if (sinks[j].empty()) continue;
    Net net;
    net.name = "n_" + inst[j].name;
    net.pins.push_back({inst[j].name, is_lut(inst[j].type) ? "o" : "q"});
    net.pins.insert(net.pins.end(), sinks[j].begin(), sinks[j].end());
    d.nets.push_back(std::move(net));
  }
  auto add_control_nets = [&](const std::vector<int>& id, int count, const char* prefix,
                              const char* pin) {
    std::vector<Net> nets(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) nets[static_cast<std::size_t>(c)].name = fmt::format("{}{}", prefix, c);
    for (std::size_t i = 0; i < n; ++i)
      if (id[i] >= 0) nets[static_cast<std::size_t>(id[i])].pins.push_back({inst[i].name, pin});
    for (auto& net : nets)
      if (net.pins.size() >= 2) d.nets.push_back(std::move(net));
  };
  add_control_nets(ck, cfg.clock_nets, "ck", "ck");
  add_control_nets(sr, cfg.reset_nets, "sr", "sr");

  d.instances = std::move(inst);
  canonicalize(d);
  std::sort(out.lut_ff_drivers.begin(), out.lut_ff_drivers.end());
  validate(d);
  return out;
}

TargetedDesign generate_targeted(const GenConfig& cfg) {
  cfg.validate();
  TargetedDesign best;
  double best_err = std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0;
  constexpr int kMaxEvaluations = 12;
  for (int it = 0; it < kMaxEvaluations; ++it) {
    GenConfig c = cfg;
    c.hotspot_intensity = 0.5 * (lo + hi);
    GeneratedDesign g = generate_design(c);
    LabelSet labels = packing_oracle(g.design);
    const double frac = labels.minority_fraction();
    const double err = std::abs(frac - cfg.target_minority);
    if (err < best_err) {
      best_err = err;
      best.generated = std::move(g);
      best.labels = std::move(labels);
      best.hotspot_intensity = c.hotspot_intensity;
    }
    best.oracle_evaluations = it + 1;
    if (frac < cfg.target_minority) lo = c.hotspot_intensity;
    else hi = c.hotspot_intensity;
  }
  return best;
}

double cell_density_variance(const PlacementDesign& design) {
  std::vector<double> count(static_cast<std::size_t>(design.layout_w) * design.layout_h, 0.0);
  for (const auto& inst : design.instances) count[static_cast<std::size_t>(home_cell(design, inst))] += 1.0;
  double mean = 0.0;
  for (double c : count) mean += c;
  mean /= static_cast<double>(count.size());
  double var = 0.0;
  for (double c : count) var += (c - mean) * (c - mean);
  return var / static_cast<double>(count.size());
}

}  // namespace imlg
