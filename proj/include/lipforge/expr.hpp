#pragma once

#include "lipforge/types.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipforge {

struct ExprError : std::runtime_error {
  ExprError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), offset(pos) {}
  std::size_t offset;
};

struct EvalResult {
  double value = 0.0;
  Vec grad;          // d/dx_k, one-sided at kinks (positive-direction convention)
  bool kink = false; // an abs/min/max switched arguments within tolerance of x
};

namespace detail {
struct Node;
}

/// Immutable scalar expression tree over x_1..x_d.
/// Grammar: +, -, *, /, unary -, sin, cos, exp, abs, min, max, parentheses;
/// variables x, y, z or x1..x9; decimal numbers with optional exponent.
class ScalarExpr {
 public:
  ScalarExpr() = default;
  static ScalarExpr parse(const std::string& text);
  static ScalarExpr constant(double c);

  bool valid() const { return root_ != nullptr; }
  /// Highest variable index referenced, plus one.
  int min_dim() const;

  double eval(const Vec& x) const;
  EvalResult eval_grad(const Vec& x) const;

  std::string to_string() const;

  friend ScalarExpr max_combine(const ScalarExpr& f, const ScalarExpr& g);
  friend ScalarExpr min_combine(const ScalarExpr& f, const ScalarExpr& g);
  friend ScalarExpr operator+(const ScalarExpr& f, const ScalarExpr& g);
  friend ScalarExpr operator*(double c, const ScalarExpr& f);

 private:
  explicit ScalarExpr(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const detail::Node> root_;
};

ScalarExpr max_combine(const ScalarExpr& f, const ScalarExpr& g);
ScalarExpr min_combine(const ScalarExpr& f, const ScalarExpr& g);
ScalarExpr operator+(const ScalarExpr& f, const ScalarExpr& g);
ScalarExpr operator*(double c, const ScalarExpr& f);

/// Map V -> R^D as a tuple of scalar components.
class MapExpr {
 public:
  MapExpr() = default;
  explicit MapExpr(std::vector<ScalarExpr> components)
      : components_(std::move(components)) {}
  static MapExpr zero(int out_dim = 1);

  int out_dim() const { return static_cast<int>(components_.size()); }
  const ScalarExpr& component(int k) const { return components_[k]; }
  const std::vector<ScalarExpr>& components() const { return components_; }

  Vec eval(const Vec& x) const;
  /// D x d Jacobian; kink set if any component reports one.
  Mat jacobian(const Vec& x, bool* kink = nullptr) const;

 private:
  std::vector<ScalarExpr> components_;
};

}  // namespace lipforge
