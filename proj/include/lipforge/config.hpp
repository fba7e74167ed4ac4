#pragma once

#include "lipforge/expr.hpp"
#include "lipforge/geometry.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipforge {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_no, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ", column " +
                           std::to_string(col) + ")"),
        line(line_no),
        column(col) {}
  int line, column;
};

/// Parsed run configuration. Raw value strings are kept verbatim so that
/// parse -> serialize -> parse is the identity.
struct RunConfig {
  std::string box_text = "0 0 1 1";
  std::vector<std::string> gamma_shapes;  // descriptors, index order
  std::vector<std::string> f_exprs;       // component expressions, index order
  std::string psi_expr = "1";
  int imax = 4;
  double tol_root = 1e-3;
  double tol_sub = 0.03;
  int samples = 100000;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  bool baseline_enabled = false;
  double baseline_h = 1.0 / 256.0;

  /// Validated geometric domain. Shape descriptors:
  ///   exterior | interior   (the box exterior is / is not part of the data set)
  ///   point X Y | segment X0 Y0 X1 Y1 | disk CX CY R | circle CX CY R
  ///   box LO0 LO1 HI0 HI1 | halfspace NX NY C
  Domain domain() const;
  MapExpr f() const;    // zero map when no f.expr keys are present
  MapExpr psi() const;  // must be positive; checked by parse_config
};

/// Line-oriented `key = value` parser; `#` starts a comment. Unknown keys,
/// malformed values, d < 2, and sampled psi <= 0 are all errors.
RunConfig parse_config(const std::string& text);

std::string serialize_config(const RunConfig& cfg);

}  // namespace lipforge
