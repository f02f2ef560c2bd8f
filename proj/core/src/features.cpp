#include "imlg/features.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace imlg {

std::array<double, kNumInstanceTypes> encode_type(InstanceType t) {
  std::array<double, kNumInstanceTypes> v{};
  v[static_cast<std::size_t>(t)] = 1.0;
  return v;
}

std::vector<double> encode_region(double x, double y, int layout_w, int layout_h, int depth) {
  if (depth < 1) throw std::invalid_argument(fmt::format("region depth must be >= 1, got {}", depth));
  if (!(x >= 0.0 && x < layout_w && y >= 0.0 && y < layout_h))
    throw std::out_of_range(
        fmt::format("({}, {}) outside layout [0,{})x[0,{})", x, y, layout_w, layout_h));
  std::vector<double> code(static_cast<std::size_t>(4 * depth), 0.0);
  double x0 = 0.0, x1 = layout_w, y0 = 0.0, y1 = layout_h;
  for (int level = 0; level < depth; ++level) {
    const double mx = 0.5 * (x0 + x1);
    const double my = 0.5 * (y0 + y1);
    const bool east = x > mx;
    const bool north = y > my;
    code[static_cast<std::size_t>(4 * level + (north ? 2 : 0) + (east ? 1 : 0))] = 1.0;
    (east ? x0 : x1) = mx;
    (north ? y0 : y1) = my;
  }
  return code;
}

Matrix build_feature_matrix(const PlacementDesign& design, const EncoderConfig& cfg) {
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(design.instances.size()), cfg.feature_dim());
  for (std::size_t i = 0; i < design.instances.size(); ++i) {
    const auto& inst = design.instances[i];
    const auto r = static_cast<Eigen::Index>(i);
    x(r, static_cast<Eigen::Index>(inst.type)) = 1.0;
    const auto code = encode_region(inst.x, inst.y, design.layout_w, design.layout_h, cfg.region_depth);
    for (std::size_t k = 0; k < code.size(); ++k)
      x(r, kNumInstanceTypes + static_cast<Eigen::Index>(k)) = code[k];
  }
  return x;
}

}  // namespace imlg
