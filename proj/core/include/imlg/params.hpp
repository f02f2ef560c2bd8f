#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imlg/numeric.hpp"

namespace imlg {

/// Which sub-network a parameter belongs to; gradients are routed per owner.
enum class Owner : std::uint8_t { Enc, Dec, Clf };

std::string_view to_string(Owner o);
Owner parse_owner(std::string_view s);

struct Param {
  Owner owner;
  std::string name;
  Matrix value;
};

/// Named parameter matrices. Names are unique and shapes are fixed once added.
class ParamStore {
public:
  std::size_t add(Owner owner, std::string name, Matrix init);

  std::size_t index_of(std::string_view name) const;
  Matrix& value(std::string_view name) { return params_[index_of(name)].value; }
  const Matrix& value(std::string_view name) const { return params_[index_of(name)].value; }

  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }

  /// Zero matrices shaped like each parameter, in store order.
  std::vector<Matrix> zeros_like() const;

  bool operator==(const ParamStore& o) const;

private:
  std::vector<Param> params_;
};

struct AdamConfig {
  double lr = 1e-3;
  double weight_decay = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with decoupled weight decay:
///   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)
/// Each parameter keeps its own step count, so a parameter that is never
/// stepped stays bit-identical.
class Adam {
public:
  Adam(const ParamStore& store, AdamConfig cfg);

  /// Updates the parameters at `indices` (all when empty) with `grads`
  /// (store-ordered).
  void step(ParamStore& store, const std::vector<Matrix>& grads,
            const std::vector<std::size_t>& indices = {});

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t steps(std::size_t param) const { return t_[param]; }

private:
  void step_one(Matrix& p, const Matrix& g, std::size_t i);

  AdamConfig cfg_;
  std::vector<Matrix> m_, v_;
  std::vector<std::uint64_t> t_;
};

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

/// `IMLG-CKPT v1`, `HP <name> <value>` lines, then per parameter
/// `PARAM <owner> <name> <rows> <cols>` followed by one line per row of
/// 17-significant-digit values.
std::string write_checkpoint(const ParamStore& store, const HeaderFields& hp);

struct Checkpoint {
  ParamStore params;
  HeaderFields hp;
};

/// Throws FormatError on a bad version line, truncation or malformed values.
Checkpoint parse_checkpoint(std::string_view text);

}  // namespace imlg
