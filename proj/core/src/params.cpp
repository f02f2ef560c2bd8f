#include "imlg/params.hpp"

#include <cmath>

#include <fmt/format.h>

#include "imlg/errors.hpp"
#include "text_util.hpp"

namespace imlg {

std::string_view to_string(Owner o) {
  switch (o) {
    case Owner::Enc: return "Enc";
    case Owner::Dec: return "Dec";
    case Owner::Clf: return "Clf";
  }
  return "?";
}

Owner parse_owner(std::string_view s) {
  if (s == "Enc") return Owner::Enc;
  if (s == "Dec") return Owner::Dec;
  if (s == "Clf") return Owner::Clf;
  throw FormatError(fmt::format("unknown parameter owner {}", s));
}

std::size_t ParamStore::add(Owner owner, std::string name, Matrix init) {
  for (const auto& p : params_)
    if (p.name == name) throw NumericError("duplicate parameter name " + name);
  params_.push_back({owner, std::move(name), std::move(init)});
  return params_.size() - 1;
}

std::size_t ParamStore::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  throw NumericError(fmt::format("no parameter named {}", name));
}

std::vector<Matrix> ParamStore::zeros_like() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  return out;
}

bool ParamStore::operator==(const ParamStore& o) const {
  if (params_.size() != o.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = o.params_[i];
    if (a.owner != b.owner || a.name != b.name || a.value.rows() != b.value.rows() ||
        a.value.cols() != b.value.cols() || a.value != b.value)
      return false;
  }
  return true;
}

Adam::Adam(const ParamStore& store, AdamConfig cfg)
    : cfg_(cfg), m_(store.zeros_like()), v_(store.zeros_like()), t_(store.size(), 0) {}

void Adam::step(ParamStore& store, const std::vector<Matrix>& grads,
                const std::vector<std::size_t>& indices) {
  if (grads.size() != store.size())
    throw NumericError(fmt::format("adam: {} gradients for {} parameters", grads.size(), store.size()));
  if (indices.empty()) {
    for (std::size_t i = 0; i < store.size(); ++i) step_one(store.params()[i].value, grads[i], i);
  } else {
    for (std::size_t i : indices) step_one(store.params()[i].value, grads[i], i);
  }
}

void Adam::step_one(Matrix& p, const Matrix& g, std::size_t i) {
  check_same_shape(p, g, "adam_update");
  check_same_shape(p, m_[i], "adam_update");
  const auto t = static_cast<double>(++t_[i]);
  m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
  v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(cfg_.beta1, t);
  const double c2 = 1.0 - std::pow(cfg_.beta2, t);
  const Matrix update =
      (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.eps) + cfg_.weight_decay * p.array();
  p -= cfg_.lr * update;
}

std::string write_checkpoint(const ParamStore& store, const HeaderFields& hp) {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "IMLG-CKPT v1\n");
  for (const auto& [k, v] : hp) fmt::format_to(it, "HP {} {}\n", k, v);
  for (const auto& p : store.params()) {
    fmt::format_to(it, "PARAM {} {} {} {}\n", to_string(p.owner), p.name, p.value.rows(),
                   p.value.cols());
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        if (c) out.push_back(' ');
        fmt::format_to(it, "{:.17g}", p.value(r, c));
      }
      out.push_back('\n');
    }
  }
  return fmt::to_string(out);
}

Checkpoint parse_checkpoint(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::tokenize(lines[0]) != std::vector<std::string_view>{"IMLG-CKPT", "v1"})
    throw FormatError("checkpoint version mismatch: expected 'IMLG-CKPT v1'", 1);
  Checkpoint ck;
  std::size_t i = 1;
  while (i < lines.size()) {
    const std::size_t lineno = i + 1;
    const auto tok = detail::tokenize(lines[i]);
    ++i;
    if (tok.empty()) continue;
    if (tok[0] == "HP") {
      if (tok.size() != 3) throw FormatError("HP expects <name> <value>", lineno);
      ck.hp.emplace_back(std::string(tok[1]), std::string(tok[2]));
    } else if (tok[0] == "PARAM") {
      if (tok.size() != 5) throw FormatError("PARAM expects <owner> <name> <rows> <cols>", lineno);
      Owner owner;
      try {
        owner = parse_owner(tok[1]);
      } catch (const FormatError& e) {
        throw FormatError(e.what(), lineno);
      }
      const int rows = detail::parse_int<FormatError>(tok[3], lineno);
      const int cols = detail::parse_int<FormatError>(tok[4], lineno);
      if (rows < 0 || cols < 0) throw FormatError("negative parameter shape", lineno);
      Matrix m(rows, cols);
      for (int r = 0; r < rows; ++r) {
        if (i >= lines.size())
          throw FormatError(fmt::format("truncated checkpoint: parameter {} expects {} rows, got {}",
                                        tok[2], rows, r),
                            i);
        const auto vals = detail::tokenize(lines[i]);
        if (vals.size() != static_cast<std::size_t>(cols))
          throw FormatError(fmt::format("parameter {} row {}: expected {} values, got {}", tok[2], r,
                                        cols, vals.size()),
                            i + 1);
        for (int c = 0; c < cols; ++c)
          m(r, c) = detail::parse_double<FormatError>(vals[static_cast<std::size_t>(c)], i + 1);
        ++i;
      }
      check_finite(m, std::string(tok[2]));
      ck.params.add(owner, std::string(tok[2]), std::move(m));
    } else {
      throw FormatError(fmt::format("unknown checkpoint record {}", tok[0]), lineno);
    }
  }
  return ck;
}

}  // namespace imlg
