#include "lipforge/run.hpp"

#include "lipforge/field_io.hpp"
#include "lipforge/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lipforge {

namespace {

std::string hex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vec read_vec(std::istringstream& ss, int d) {
  Vec v(d);
  std::string tok;
  for (int k = 0; k < d; ++k) {
    if (!(ss >> tok)) throw std::runtime_error("truncated vector in run file");
    v[k] = std::strtod(tok.c_str(), nullptr);
  }
  return v;
}

/// Verification suite shared by execute_run and verify_run.
std::vector<Certificate> verify_suite(const BumpStack& u, const SegmentLedger& ledger,
                                      const Domain& dom, const MapExpr& f,
                                      const MapExpr& psi, const RunConfig& cfg,
                                      bool slow) {
  std::vector<Certificate> certs;
  const int imax = ledger.max_scale();
  for (int i = 1; i <= imax; ++i)
    certs.push_back(check_coverage(ledger, dom, i, std::min(cfg.samples, 20000)));
  certs.push_back(check_separation(ledger, imax));

  double content = 0.0, vol = 0.0;
  try {
    auto shapes = dom.boundary_shapes();
    content = minkowski_content(shapes, dom.dim(), {0.04, 0.02}).estimate;
    vol = dom.volume_estimate();
  } catch (const std::exception&) {
    // boundary content unavailable (d > 2); the volume bound rows are skipped
  }
  if (content > 0.0) {
    const int mc = slow ? 1000000 : 100000;
    for (int i = 1; i <= imax; ++i)
      certs.push_back(check_exceptional_volume(ledger, dom, i, content, vol, mc, cfg.seed));
  }

  SolutionReport sol = check_solution(u, psi, f, dom, ledger, cfg.tol_sub, cfg.seed,
                                      10000, std::min(cfg.samples, 20000));
  certs.push_back(sol.boundary);
  certs.push_back(sol.subsolution);
  double prev = 0.0;
  for (std::size_t k = 0; k < sol.attainment.size(); ++k) {
    Certificate c;
    c.name = "attainment";
    c.scale = static_cast<int>(k) + 1;
    c.measured = sol.attainment[k];
    c.bound = (k + 1 == sol.attainment.size()) ? std::max(prev, 0.0) : prev;
    c.pass = c.measured >= c.bound - 1e-12;
    prev = sol.attainment[k];
    certs.push_back(c);
  }
  return certs;
}

}  // namespace

RunArtifacts execute_run(const RunConfig& cfg, const RunOptions& opt) {
  RunArtifacts art;
  Domain dom = cfg.domain();
  MapExpr f = cfg.f();
  MapExpr psi = cfg.psi();

  // Precondition L f <= psi, sampled; a violation is reported with a witness.
  {
    Certificate pre;
    pre.name = "precondition";
    pre.pass = true;
    pre.bound = cfg.tol_root;
    pre.measured = -kInf;
    const int d = dom.dim();
    Vec lo = dom.box_lo(), span = dom.box_hi() - dom.box_lo();
    for (std::uint64_t n = 0; pre.samples < 4096; ++n) {
      Vec x = lo + span.cwiseProduct(halton_point(n, d));
      if (!dom.in_free_region(x)) continue;
      ++pre.samples;
      double gap = op_norm(f.jacobian(x)) - psi.component(0).eval(x);
      if (gap > pre.measured) {
        pre.measured = gap;
        if (gap > cfg.tol_root) {
          pre.pass = false;
          pre.witness = x;
        }
      }
    }
    art.certificates.push_back(pre);
    if (!pre.pass) {
      art.exit_code = 1;
      art.error = "precondition Lf <= psi fails";
      return art;
    }
  }

  ConstructConfig ccfg;
  ccfg.tol_root = cfg.tol_root;
  ccfg.seed = cfg.seed;
  ccfg.threads = opt.threads;
  try {
    art.iter = iterate(f, psi, dom, cfg.imax, ccfg);
  } catch (const std::exception& e) {
    Certificate c;
    c.name = "construct";
    c.pass = false;
    art.certificates.push_back(c);
    art.exit_code = 2;
    art.error = e.what();
    return art;
  }

  auto certs = verify_suite(art.iter->u, art.iter->ledger, dom, f, psi, cfg, opt.slow);
  art.certificates.insert(art.certificates.end(), certs.begin(), certs.end());

  if (cfg.baseline_enabled) {
    GridField base = fast_march(dom, psi, f, cfg.baseline_h);
    art.baseline = compare(art.iter->u, base, f);
  }

  for (const auto& c : art.certificates)
    if (!c.pass && !c.report_only) art.exit_code = 3;
  return art;
}

std::string certificates_csv(const std::vector<Certificate>& certs) {
  std::ostringstream out;
  out << "name,scale,bound,measured,pass,witness\n";
  for (const auto& c : certs) {
    out << c.name << ',' << c.scale << ',' << fmt(c.bound) << ',' << fmt(c.measured)
        << ',' << (c.pass ? (c.report_only ? "report" : "true") : "false") << ',';
    if (c.witness)
      for (int k = 0; k < c.witness->size(); ++k)
        out << (k ? " " : "") << fmt((*c.witness)[k]);
    out << '\n';
  }
  return out.str();
}

void save_run(const RunConfig& cfg, const RunArtifacts& art, const RunOptions& opt) {
  namespace fs = std::filesystem;
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_text(dir / "config.txt", serialize_config(cfg));
  write_text(dir / "certificates.csv", certificates_csv(art.certificates));

  if (!art.iter) return;
  const auto& iter = *art.iter;
  const int d = iter.u.dim();

  std::ostringstream ledger;
  for (int i = 1; i <= iter.ledger.max_scale(); ++i) {
    ledger << "scale " << i << "\n";
    for (const auto& s : iter.ledger.segments_at(i)) {
      ledger << "segment " << s.scale << ' ' << s.parent_ball;
      for (int k = 0; k < d; ++k) ledger << ' ' << hex(s.a[k]);
      for (int k = 0; k < d; ++k) ledger << ' ' << hex(s.b[k]);
      ledger << "\n";
    }
    const auto& centers = iter.ledger.centers_at(i);
    ledger << "centers " << i << ' ' << centers.size();
    for (const auto& c : centers)
      for (int k = 0; k < d; ++k) ledger << ' ' << hex(c[k]);
    ledger << "\n";
  }
  write_text(dir / "ledger.txt", ledger.str());

  std::ostringstream stack;
  stack << "dim " << d << "\n";
  for (const auto& b : iter.u.bumps()) {
    stack << "bump";
    for (int k = 0; k < d; ++k) stack << ' ' << hex(b.center[k]);
    stack << ' ' << hex(b.radius);
    for (int k = 0; k < d; ++k) stack << ' ' << hex(b.direction[k]);
    stack << ' ' << b.axis << ' ' << hex(b.amplitude) << ' ' << hex(b.t) << ' '
          << b.scale << ' ' << b.parent_ball << ' ' << hex(b.profile_lip) << "\n";
  }
  write_text(dir / "stack.txt", stack.str());

  if (art.baseline) {
    std::ostringstream b;
    b << "metric,value\n"
      << "sup_diff," << fmt(art.baseline->sup_diff) << "\n"
      << "mean_diff," << fmt(art.baseline->mean_diff) << "\n"
      << "stack_boundary_violation," << fmt(art.baseline->stack_boundary_violation) << "\n"
      << "base_boundary_violation," << fmt(art.baseline->base_boundary_violation) << "\n";
    write_text(dir / "baseline.csv", b.str());
  }

  if (opt.export_lattice) {
    Domain dom = cfg.domain();
    std::vector<std::uint32_t> counts(d, 2);
    counts[0] = static_cast<std::uint32_t>(opt.export_lattice->first);
    counts[d > 1 ? 1 : 0] = static_cast<std::uint32_t>(opt.export_lattice->second);
    write_field(sample_stack(iter.u, dom.box_lo(), dom.box_hi(), counts),
                (dir / "u.lipx").string());
  }
}

LoadedRun load_run(const std::string& dir) {
  namespace fs = std::filesystem;
  LoadedRun run;
  run.cfg = parse_config(slurp(fs::path(dir) / "config.txt"));
  Domain dom = run.cfg.domain();
  const int d = dom.dim();

  std::istringstream ledger(slurp(fs::path(dir) / "ledger.txt"));
  std::string line;
  while (std::getline(ledger, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "scale") {
      int i;
      ss >> i;
      run.ledger.begin_scale(i);
    } else if (tag == "segment") {
      Segment s;
      ss >> s.scale >> s.parent_ball;
      s.a = read_vec(ss, d);
      s.b = read_vec(ss, d);
      run.ledger.add_segment(s);
    } else if (tag == "centers") {
      int i;
      std::size_t n;
      ss >> i >> n;
      std::vector<Vec> centers(n);
      for (auto& c : centers) c = read_vec(ss, d);
      run.ledger.add_centers(i, centers);
    } else if (!tag.empty()) {
      throw std::runtime_error("bad ledger line: " + line);
    }
  }

  run.u = BumpStack(run.cfg.f(), d);
  run.u.set_bounds(dom.box_lo(), dom.box_hi());
  std::istringstream stack(slurp(fs::path(dir) / "stack.txt"));
  while (std::getline(stack, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "dim") {
      int dd;
      ss >> dd;
      if (dd != d) throw std::runtime_error("stack dimension mismatch");
    } else if (tag == "bump") {
      Bump b;
      std::string tok;
      b.center = read_vec(ss, d);
      ss >> tok;
      b.radius = std::strtod(tok.c_str(), nullptr);
      b.direction = read_vec(ss, d);
      ss >> b.axis >> tok;
      b.amplitude = std::strtod(tok.c_str(), nullptr);
      ss >> tok;
      b.t = std::strtod(tok.c_str(), nullptr);
      ss >> b.scale >> b.parent_ball >> tok;
      b.profile_lip = std::strtod(tok.c_str(), nullptr);
      if (!ss) throw std::runtime_error("bad bump line: " + line);
      run.u.append(b);
    } else if (!tag.empty()) {
      throw std::runtime_error("bad stack line: " + line);
    }
  }
  return run;
}

std::vector<Certificate> verify_run(const LoadedRun& run, bool slow) {
  Domain dom = run.cfg.domain();
  return verify_suite(run.u, run.ledger, dom, run.cfg.f(), run.cfg.psi(), run.cfg, slow);
}

}  // namespace lipforge
