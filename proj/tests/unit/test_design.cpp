#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "fixtures.hpp"
#include "imlg/design.hpp"
#include "imlg/synthetic.hpp"

using namespace imlg;

namespace {

const char* kMinimal =
    "LAYOUT 4 4\n"
    "INSTANCE l0 LUT4 0.5 0.5\n"
    "INSTANCE f0 FF 1.0 0.5\n"
    "NET n0 2 l0.o f0.d\n";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

void expect_error(const std::string& doc, const std::string& fragment, std::size_t line = 0) {
  try {
    parse_design(doc);
    FAIL() << "expected DesignError containing '" << fragment << "'";
  } catch (const DesignError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    if (line) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  }
}

}  // namespace

TEST(InstanceType, PinTable) {
  EXPECT_TRUE(is_legal_pin(InstanceType::LUT2, "i1"));
  EXPECT_FALSE(is_legal_pin(InstanceType::LUT2, "i2"));
  EXPECT_TRUE(is_legal_pin(InstanceType::LUT6, "i5"));
  EXPECT_TRUE(is_legal_pin(InstanceType::LUT6, "o"));
  EXPECT_FALSE(is_legal_pin(InstanceType::LUT6, "d"));
  for (const char* p : {"d", "q", "ck", "sr"}) EXPECT_TRUE(is_legal_pin(InstanceType::FF, p));
  EXPECT_FALSE(is_legal_pin(InstanceType::FF, "o"));
  EXPECT_TRUE(is_output_pin(InstanceType::FF, "q"));
  EXPECT_TRUE(is_output_pin(InstanceType::LUT3, "o"));
  EXPECT_FALSE(is_output_pin(InstanceType::FF, "d"));
  for (int k = 2; k <= 6; ++k) EXPECT_EQ(lut_inputs(static_cast<InstanceType>(k - 2)), k);
  EXPECT_EQ(lut_inputs(InstanceType::FF), 0);
}

TEST(InstanceType, NamesRoundTrip) {
  for (int t = 0; t < kNumInstanceTypes; ++t) {
    const auto type = static_cast<InstanceType>(t);
    EXPECT_EQ(parse_instance_type(to_string(type)), type);
  }
  EXPECT_FALSE(parse_instance_type("LUT7").has_value());
}

TEST(ParseDesign, MinimalDocument) {
  const PlacementDesign d = parse_design(kMinimal);
  EXPECT_EQ(d.layout_w, 4);
  EXPECT_EQ(d.layout_h, 4);
  ASSERT_EQ(d.instances.size(), 2u);
  ASSERT_EQ(d.nets.size(), 1u);
  EXPECT_EQ(d.instances[0], test::inst("l0", InstanceType::LUT4, 0.5, 0.5));
  EXPECT_EQ(d.instances[1], test::inst("f0", InstanceType::FF, 1.0, 0.5));
  EXPECT_EQ(d.nets[0], test::net("n0", {"l0.o", "f0.d"}));
}

TEST(ParseDesign, IllegalPin) { expect_error(replace(kMinimal, "l0.o", "l0.i9"), "pin illegal for type", 4); }

TEST(ParseDesign, ErrorsNameLineOrEntity) {
  expect_error(replace(kMinimal, "LUT4", "LUT9"), "unknown type", 2);
  expect_error(replace(kMinimal, "INSTANCE f0 FF", "INSTANCE l0 FF"), "duplicate instance name", 3);
  expect_error(replace(kMinimal, "1.0 0.5", "4.0 0.5"), "out of extent", 3);
  expect_error(replace(kMinimal, "NET n0 2 l0.o f0.d", "NET n0 1 l0.o"), "at least 2", 4);
  expect_error(replace(kMinimal, "0.5 0.5", "0.5 x"), "syntax error", 2);
  expect_error(replace(kMinimal, "LAYOUT", "LAYUOT"), "unknown keyword", 1);
  expect_error(replace(kMinimal, "f0.d", "g0.d"), "g0", 4);
  expect_error(std::string(kMinimal) + "INSTANCE f1 FF 2 2\nNET n1 2 f0.q f1.q\n", "output", 6);
  expect_error(std::string(kMinimal) + "INSTANCE f1 FF 2 2\nNET n1 2 l0.o f1.d\n", "l0.o", 6);
  expect_error(replace(kMinimal, "NET n0 2", "NET n0 3"), "declares 3 pins", 4);
}

TEST(ParseDesign, CommentsAndBlankLines) {
  const std::string doc = std::string("# header\n\n") + replace(kMinimal, "LUT4 0.5 0.5", "LUT4 0.5 0.5  # placed");
  EXPECT_EQ(parse_design(doc), parse_design(kMinimal));
}

TEST(WriteDesign, CanonicalForm) {
  const std::string text = write_design(parse_design(kMinimal));
  EXPECT_EQ(text,
            "LAYOUT 4 4\n"
            "INSTANCE f0 FF 1 0.5\n"
            "INSTANCE l0 LUT4 0.5 0.5\n"
            "NET n0 2 l0.o f0.d\n");
  EXPECT_EQ(write_design(parse_design(text)), text);
}

TEST(WriteDesign, EmptyNetList) {
  const auto d = test::design(2, 2, {test::inst("a", InstanceType::LUT2, 0, 0)});
  EXPECT_EQ(write_design(d), "LAYOUT 2 2\nINSTANCE a LUT2 0 0\n");
}

TEST(WriteDesign, InstanceOrderIrrelevant) {
  PlacementDesign a = parse_design(kMinimal);
  PlacementDesign b = a;
  std::reverse(b.instances.begin(), b.instances.end());
  EXPECT_EQ(write_design(a), write_design(b));
}

TEST(WriteDesign, RoundTripsGeneratedDesigns) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenConfig cfg;
    cfg.n_instances = 60 + static_cast<int>(seed % 7) * 10;
    cfg.seed = seed;
    const PlacementDesign d = generate_design(cfg).design;
    const PlacementDesign back = parse_design(write_design(d));
    ASSERT_EQ(back, d) << "seed " << seed;
  }
}

TEST(Labels, ParseAgainstDesign) {
  const PlacementDesign d = parse_design(kMinimal);
  const LabelSet l = parse_labels("l0 0\nf0 1", d);
  EXPECT_EQ(l.labels.at("l0"), 0);
  EXPECT_EQ(l.labels.at("f0"), 1);
  EXPECT_DOUBLE_EQ(l.minority_fraction(), 0.5);
}

TEST(Labels, Errors) {
  const PlacementDesign d = parse_design(kMinimal);
  auto message = [&](const std::string& text) {
    try {
      parse_labels(text, d);
    } catch (const DesignError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("l0 0\n").find("missing instance f0"), std::string::npos);
  EXPECT_NE(message("l0 0\nf0 1\nx9 0\n").find("unknown instance x9"), std::string::npos);
  EXPECT_NE(message("l0 0\nf0 2\n").find("label not in {0,1}"), std::string::npos);
  EXPECT_NE(message("l0 0\nl0 1\nf0 1\n").find("duplicate"), std::string::npos);
}

TEST(Labels, TableScaleMinorityFraction) {
  // 8087 unpacked among 50K LUTs + 55K FFs.
  LabelSet l;
  for (int i = 0; i < 105000; ++i) l.labels.emplace("i" + std::to_string(i), i < 8087 ? 1 : 0);
  EXPECT_EQ(l.minority_count(), 8087u);
  EXPECT_NEAR(l.minority_fraction(), 0.0770, 5e-5);
}

TEST(Labels, WriteRoundTrip) {
  LabelSet l;
  l.labels = {{"b", 1}, {"a", 0}, {"c", 0}};
  EXPECT_EQ(write_labels(l), "a 0\nb 1\nc 0\n");
  EXPECT_EQ(parse_labels(write_labels(l)), l);
}
