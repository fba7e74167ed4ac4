#include "lipforge/config.hpp"

#include "lipforge/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lipforge {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& text, int line, int col) {
  std::vector<double> out;
  std::istringstream ss(text);
  double v;
  while (ss >> v) out.push_back(v);
  std::string tail;
  if (ss.fail() && !ss.eof() && (ss.clear(), ss >> tail))
    throw ConfigError("expected a number, got '" + tail + "'", line, col);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Shape parse_shape(const std::string& desc, int line) {
  std::istringstream ss(desc);
  std::string kind;
  ss >> kind;
  std::vector<double> n;
  double v;
  while (ss >> v) n.push_back(v);
  auto need = [&](std::size_t k) {
    if (n.size() != k)
      throw ConfigError("shape '" + kind + "' expects " + std::to_string(k) +
                            " numbers, got " + std::to_string(n.size()),
                        line, 1);
  };
  auto vec2 = [](double a, double b) {
    Vec p(2);
    p << a, b;
    return p;
  };
  if (kind == "point") {
    need(2);
    return PointSet{{vec2(n[0], n[1])}};
  }
  if (kind == "segment") {
    need(4);
    return SegmentSet{{{vec2(n[0], n[1]), vec2(n[2], n[3])}}};
  }
  if (kind == "disk") {
    need(3);
    return DiskShape{vec2(n[0], n[1]), n[2]};
  }
  if (kind == "circle") {
    need(3);
    return CircleShape{vec2(n[0], n[1]), n[2]};
  }
  if (kind == "box") {
    need(4);
    return BoxShape{vec2(n[0], n[1]), vec2(n[2], n[3])};
  }
  if (kind == "halfspace") {
    need(3);
    Vec nrm = vec2(n[0], n[1]);
    double len = nrm.norm();
    if (len == 0.0) throw ConfigError("halfspace normal must be nonzero", line, 1);
    return HalfSpace{nrm / len, n[2] / len};
  }
  throw ConfigError("unknown shape kind '" + kind + "'", line, 1);
}

}  // namespace

Domain RunConfig::domain() const {
  auto nums = parse_numbers(box_text, 0, 0);
  if (nums.size() < 4 || nums.size() % 2 != 0)
    throw ConfigError("domain.box needs 2d numbers (lo then hi), d >= 2", 0, 0);
  const int d = static_cast<int>(nums.size()) / 2;
  DomainSpec spec;
  spec.box_lo = Vec(d);
  spec.box_hi = Vec(d);
  for (int k = 0; k < d; ++k) {
    spec.box_lo[k] = nums[k];
    spec.box_hi[k] = nums[d + k];
  }
  int line = 0;
  for (const auto& desc : gamma_shapes) {
    ++line;
    std::string t = trim(desc);
    if (t == "exterior") {
      spec.exterior_is_gamma = true;
    } else if (t == "interior") {
      spec.exterior_is_gamma = false;
    } else {
      spec.gamma.push_back(parse_shape(t, line));
    }
  }
  return Domain::make(spec);
}

MapExpr RunConfig::f() const {
  if (f_exprs.empty()) return MapExpr::zero(1);
  std::vector<ScalarExpr> comps;
  comps.reserve(f_exprs.size());
  for (const auto& e : f_exprs) comps.push_back(ScalarExpr::parse(e));
  return MapExpr(comps);
}

MapExpr RunConfig::psi() const {
  return MapExpr({ScalarExpr::parse(psi_expr)});
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<std::pair<int, std::string>> f_keyed, g_keyed;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no, 1);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    const int vcol = static_cast<int>(raw.find('=') + 2);
    auto as_double = [&] {
      auto v = parse_numbers(value, line_no, vcol);
      if (v.size() != 1) throw ConfigError("'" + key + "' expects one number", line_no, vcol);
      return v[0];
    };
    auto as_int = [&] {
      double v = as_double();
      if (v != std::floor(v)) throw ConfigError("'" + key + "' expects an integer", line_no, vcol);
      return static_cast<long long>(v);
    };
    auto indexed = [&](const std::string& prefix) -> int {
      std::string suffix = key.substr(prefix.size());
      int idx = 0;
      auto [p, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), idx);
      if (ec != std::errc() || p != suffix.data() + suffix.size() || idx < 0)
        throw ConfigError("bad index in key '" + key + "'", line_no, 1);
      return idx;
    };
    if (key == "domain.box") cfg.box_text = value;
    else if (key.starts_with("gamma.shape.")) g_keyed.emplace_back(indexed("gamma.shape."), value);
    else if (key.starts_with("f.expr.")) f_keyed.emplace_back(indexed("f.expr."), value);
    else if (key == "psi.expr") cfg.psi_expr = value;
    else if (key == "run.imax") cfg.imax = static_cast<int>(as_int());
    else if (key == "run.tol_root") cfg.tol_root = as_double();
    else if (key == "run.tol_sub") cfg.tol_sub = as_double();
    else if (key == "run.samples") cfg.samples = static_cast<int>(as_int());
    else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(as_int());
    else if (key == "out.dir") cfg.out_dir = value;
    else if (key == "baseline.enabled") {
      if (value == "true" || value == "1") cfg.baseline_enabled = true;
      else if (value == "false" || value == "0") cfg.baseline_enabled = false;
      else throw ConfigError("'baseline.enabled' expects true/false", line_no, vcol);
    } else if (key == "baseline.h") cfg.baseline_h = as_double();
    else throw ConfigError("unknown key '" + key + "'", line_no, 1);
  }
  std::stable_sort(f_keyed.begin(), f_keyed.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });
  std::stable_sort(g_keyed.begin(), g_keyed.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });
  for (auto& [i, v] : f_keyed) cfg.f_exprs.push_back(v);
  for (auto& [i, v] : g_keyed) cfg.gamma_shapes.push_back(v);

  if (!(cfg.tol_root > 0.0) || !(cfg.tol_sub > 0.0))
    throw ConfigError("tolerances must be positive", 0, 0);
  if (cfg.imax < 1) throw ConfigError("run.imax must be >= 1", 0, 0);
  if (cfg.samples < 1) throw ConfigError("run.samples must be >= 1", 0, 0);

  // Semantic checks: the domain must construct, expressions must parse, and
  // psi must be positive at low-discrepancy samples of the box.
  Domain dom = cfg.domain();
  MapExpr f = cfg.f();
  MapExpr psi = cfg.psi();
  const int d = dom.dim();
  Vec lo = dom.box_lo(), span = dom.box_hi() - dom.box_lo();
  for (std::uint64_t n = 0; n < 4096; ++n) {
    Vec x = lo + span.cwiseProduct(halton_point(n, d));
    double v = psi.component(0).eval(x);
    if (!(v > 0.0)) {
      std::string pt;
      for (int k = 0; k < d; ++k) pt += (k ? " " : "") + fmt(x[k]);
      throw ConfigError("psi must be positive; psi(" + pt + ") = " + fmt(v), 0, 0);
    }
  }
  (void)f;
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "domain.box = " << cfg.box_text << "\n";
  for (std::size_t k = 0; k < cfg.gamma_shapes.size(); ++k)
    out << "gamma.shape." << k << " = " << cfg.gamma_shapes[k] << "\n";
  for (std::size_t k = 0; k < cfg.f_exprs.size(); ++k)
    out << "f.expr." << k << " = " << cfg.f_exprs[k] << "\n";
  out << "psi.expr = " << cfg.psi_expr << "\n";
  out << "run.imax = " << cfg.imax << "\n";
  out << "run.tol_root = " << fmt(cfg.tol_root) << "\n";
  out << "run.tol_sub = " << fmt(cfg.tol_sub) << "\n";
  out << "run.samples = " << cfg.samples << "\n";
  out << "run.seed = " << cfg.seed << "\n";
  out << "out.dir = " << cfg.out_dir << "\n";
  out << "baseline.enabled = " << (cfg.baseline_enabled ? "true" : "false") << "\n";
  out << "baseline.h = " << fmt(cfg.baseline_h) << "\n";
  return out.str();
}

}  // namespace lipforge
