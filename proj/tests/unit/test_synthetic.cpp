#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "imlg/packing.hpp"
#include "imlg/synthetic.hpp"

using namespace imlg;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(GenerateDesign, Deterministic) {
  GenConfig cfg;
  cfg.n_instances = 100;
  cfg.seed = 1;
  EXPECT_EQ(write_design(generate_design(cfg).design), write_design(generate_design(cfg).design));
  cfg.seed = 2;
  GenConfig other = cfg;
  other.seed = 1;
  EXPECT_NE(write_design(generate_design(cfg).design), write_design(generate_design(other).design));
}

TEST(GenerateDesign, ProducesValidCanonicalDesigns) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenConfig cfg;
    cfg.n_instances = 500;
    cfg.seed = seed;
    const PlacementDesign d = generate_design(cfg).design;
    EXPECT_NO_THROW(validate(d));
    EXPECT_EQ(d.instances.size(), 500u);
    EXPECT_TRUE(std::is_sorted(d.instances.begin(), d.instances.end(),
                               [](const Instance& a, const Instance& b) { return a.name < b.name; }));
  }
}

TEST(GenerateDesign, LutFfMixRespected) {
  GenConfig cfg;
  cfg.n_instances = 4000;
  cfg.lut_ff_mix = 0.55;
  cfg.seed = 3;
  const auto d = generate_design(cfg).design;
  const auto luts = std::count_if(d.instances.begin(), d.instances.end(), [](const Instance& i) { return is_lut(i.type); });
  EXPECT_NEAR(static_cast<double>(luts) / 4000.0, 0.55, 0.03);
}

TEST(GenerateDesign, DriverListMatchesNets) {
  GenConfig cfg;
  cfg.n_instances = 1000;
  cfg.seed = 5;
  const GeneratedDesign g = generate_design(cfg);
  std::map<std::string, std::string> net_of_pin;
  for (const auto& n : g.design.nets)
    for (const auto& p : n.pins) net_of_pin[p.instance + "." + p.pin] = n.name;
  ASSERT_FALSE(g.lut_ff_drivers.empty());
  for (const auto& [lut, ff] : g.lut_ff_drivers) {
    ASSERT_TRUE(net_of_pin.contains(lut + ".o"));
    ASSERT_TRUE(net_of_pin.contains(ff + ".d"));
    EXPECT_EQ(net_of_pin[lut + ".o"], net_of_pin[ff + ".d"]);
  }
}

TEST(GenerateDesign, HotspotsRaiseDensityVariance) {
  std::vector<double> flat, hot;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenConfig cfg;
    cfg.n_instances = 2000;
    cfg.seed = seed;
    cfg.hotspot_intensity = 0.0;
    flat.push_back(cell_density_variance(generate_design(cfg).design));
    cfg.hotspot_intensity = 0.3;
    hot.push_back(cell_density_variance(generate_design(cfg).design));
  }
  EXPECT_LT(median(flat), median(hot));
}

TEST(GenerateTargeted, HitsTargetMinority) {
  GenConfig cfg;
  cfg.n_instances = 5000;
  cfg.target_minority = 0.10;
  cfg.seed = 7;
  const TargetedDesign t = generate_targeted(cfg);
  EXPECT_NEAR(t.labels.minority_fraction(), 0.10, 0.03);
  EXPECT_LE(t.oracle_evaluations, 12);
  EXPECT_EQ(t.labels, packing_oracle(t.generated.design));
}

TEST(GenConfig, RejectsInvalid) {
  auto bad = [](auto mutate) {
    GenConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.validate(), GenConfigError);
  };
  bad([](GenConfig& c) { c.n_instances = 9; });
  bad([](GenConfig& c) { c.target_minority = 0.0; });
  bad([](GenConfig& c) { c.target_minority = 0.5; });
  bad([](GenConfig& c) { c.lut_ff_mix = 1.5; });
  bad([](GenConfig& c) { c.hotspot_intensity = -0.1; });
  bad([](GenConfig& c) {
    c.n_instances = 10000;
    c.layout_w = 4;
    c.layout_h = 4;
  });
  EXPECT_THROW(generate_design([] {
                 GenConfig c;
                 c.n_instances = 5;
                 return c;
               }()),
               GenConfigError);
}
