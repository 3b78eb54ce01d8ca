#include "mlq/cli.hpp"

#include <cctype>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlq/formal_cas.hpp"
#include "mlq/operator_rep.hpp"
#include "mlq/oracle.hpp"
#include "mlq/states.hpp"
#include "mlq/verify.hpp"

namespace mlq::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_config(const RunConfig& cfg) {
  if (!(cfg.beta > 0) || !std::isfinite(cfg.beta)) throw UsageError("--beta must be positive");
  if (!(cfg.hbar > 0) || !std::isfinite(cfg.hbar)) throw UsageError("--hbar must be positive");
  if (!(cfg.lambda >= 0 && cfg.lambda <= 1)) throw UsageError("--lambda must lie in [0, 1]");
  if (cfg.grid_n < 4 || cfg.grid_n % 2) throw UsageError("--grid must be even and >= 4");
  if (!(cfg.tol_scale > 0)) throw UsageError("--tol-scale must be positive");
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out) / name).string(); }

void ensure_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.out + ": " + ec.message());
}

std::string lambda_tag(double l) {
  std::ostringstream s;
  s << l;
  return s.str();
}

// ---- formal expression grammar: sums of [rational] q^a p^b s^c factors

class ExprParser {
 public:
  explicit ExprParser(std::string text) : s_(std::move(text)) {}

  FormalPoly parse() {
    FormalPoly out;
    skip();
    if (pos_ >= s_.size()) fail("empty expression");
    bool first = true;
    while (pos_ < s_.size()) {
      int sign = 1;
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      FormalPoly t = term();
      out += sign < 0 ? -t : t;
      first = false;
      skip();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw UsageError("parse error at position " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  long long integer() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    if (pos_ - start > 18) fail("number too long");
    return std::stoll(s_.substr(start, pos_ - start));
  }

  FormalPoly term() {
    Rational coef = 1;
    bool any = false;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      coef = Rational(integer());
      skip();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        skip();
        const long long d = integer();
        if (d == 0) fail("zero denominator");
        coef /= d;
      }
      any = true;
    }
    Monomial m;
    for (;;) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        skip();
        if (pos_ >= s_.size() || std::string("qps").find(s_[pos_]) == std::string::npos) fail("expected q, p or s");
      }
      if (pos_ >= s_.size() || std::string("qps").find(s_[pos_]) == std::string::npos) break;
      const char v = s_[pos_++];
      int e = 1;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '^') {
        ++pos_;
        skip();
        const long long x = integer();
        if (x > 64) fail("exponent too large");
        e = int(x);
      }
      (v == 'q' ? m.q : v == 'p' ? m.p : m.s) += e;
      any = true;
    }
    if (!any) fail("expected a coefficient or one of q, p, s");
    return FormalPoly::monomial(m, {coef, 0});
  }

  std::string s_;
  std::size_t pos_ = 0;
};

// ---- field families for star and export

struct Operand {
  bool is_symbol = false;
  SymbolObservable symbol;
  AlgebraElement element;
};

Operand family(const RunConfig& cfg, const std::string& spec) {
  const BetaContext c = cfg.ctx();
  const int n = cfg.grid_n;
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto number = [&](double dflt) {
    if (arg.empty()) return dflt;
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size()) throw UsageError("bad argument in field spec '" + spec + "'");
    return x;
  };
  Operand o;
  if (name == "bump") {
    o.element = oracle::random_kernel_element(c, n, 3, 0.15, cfg.seed + std::uint64_t(number(0)));
  } else if (name == "rho_xi") {
    o.element = position_eigenvector(c, number(0), n).rho;
  } else if (name == "rho_ml") {
    o.element = ml_phase_state(c, number(0), n).rho;
  } else if (name == "q" || name == "symbol") {
    const double pw = name == "q" ? 1 : number(1);
    if (pw < 0 || pw != std::floor(pw)) throw UsageError("symbol power must be a nonnegative integer");
    o.is_symbol = true;
    o.symbol = SymbolObservable::q_power(int(pw), n);
  } else {
    throw UsageError("unknown field spec '" + spec + "' (bump[:k], rho_xi[:xi], rho_ml[:xi], q, symbol[:power])");
  }
  return o;
}

void write_element(const RunConfig& cfg, const std::string& stem, const AlgebraElement& f) {
  ensure_out(cfg);
  write_file_atomic(path_in(cfg, stem + "_torus.csv"), torus_csv(f.field));
  write_file_atomic(path_in(cfg, stem + "_lattice.csv"), lattice_csv(lattice_of(f.field, f.n() / 2 - 1)));
}

std::string checksum(const TorusField& f) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& v : f.values)
    for (double x : {v.real(), v.imag()}) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      h = (h ^ bits) * 1099511628211ull;
    }
  std::ostringstream s;
  s << std::hex << h;
  return s.str();
}

// ---- subcommands

int cmd_verify(const RunConfig& cfg, bool acceptance, std::ostream& out) {
  verify::Config vc{cfg.ctx(), cfg.grid_n, cfg.seed, cfg.tol_scale};
  std::vector<verify::Suite> suites = verify::module_suites(vc);
  if (acceptance)
    for (int id = 1; id <= 11; ++id) suites.push_back(verify::criterion(id, cfg.seed));
  bool ok = true;
  for (const auto& s : suites) ok = ok && s.pass();
  if (cfg.json) {
    json j = {{"seed", cfg.seed}, {"grid", cfg.grid_n}, {"beta", cfg.beta}, {"hbar", cfg.hbar},
              {"lambda", cfg.lambda}, {"pass", ok}, {"suites", json::array()}};
    for (const auto& s : suites) j["suites"].push_back(verify::to_json(s));
    out << j.dump(2) << "\n";
  } else {
    for (const auto& s : suites) {
      out << (s.pass() ? "PASS " : "FAIL ") << s.name << "\n";
      for (const auto& c : s.checks) {
        const char* tag = c.skipped ? "skip" : c.expected_fail ? (c.pass ? "XPASS" : "xfail") : c.pass ? "ok" : "FAIL";
        out << "  " << tag << "  " << c.name;
        if (!c.skipped) out << "  " << format_double(c.measured) << " " << c.relation << " " << format_double(c.tolerance);
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << "\n";
      }
    }
    out << (ok ? "all suites pass" : "failures present") << " (seed " << cfg.seed << ")\n";
  }
  return ok ? 0 : 1;
}

int cmd_eigenstate(const RunConfig& cfg, double xi, std::ostream& out) {
  const BetaContext c = cfg.ctx();
  const PositionEigenvector pe = position_eigenvector(c, xi, cfg.grid_n);
  const auto q = SymbolObservable::q_power(1, cfg.grid_n);
  const double s = max_abs(pe.rho.field.values);
  const double left = max_abs_diff(star_symbol_left(q, pe.rho).field.values, (cplx(xi) * pe.rho).field.values) / s;
  const double right = max_abs_diff(star_symbol_right(pe.rho, q).field.values, (cplx(xi) * pe.rho).field.values) / s;
  const double qh = max_abs_diff(qhat_apply(pe.psi).values, (cplx(xi) * pe.psi).values) / max_abs(pe.psi.values);
  const std::string stem = "rho_xi_" + lambda_tag(xi);
  write_element(cfg, stem, pe.rho);
  json j = {{"xi", xi}, {"twist", pe.closed.twist()}, {"q_star_rho", left}, {"rho_star_q", right},
            {"qhat_psi", qh}, {"files", {path_in(cfg, stem + "_torus.csv"), path_in(cfg, stem + "_lattice.csv")}}};
  if (cfg.json)
    out << j.dump(2) << "\n";
  else
    out << "rho_xi at xi=" << format_double(xi) << ": |q*rho - xi rho| = " << format_double(left)
        << ", |rho*q - xi rho| = " << format_double(right) << ", |q psi - xi psi| = " << format_double(qh) << "\n";
  return 0;
}

int cmd_star(const RunConfig& cfg, const std::string& fs_, const std::string& gs_, std::ostream& out) {
  const Operand f = family(cfg, fs_), g = family(cfg, gs_);
  AlgebraElement h;
  if (f.is_symbol && g.is_symbol) throw UsageError("star of two symbols is not a field; use the formal subcommand");
  if (f.is_symbol)
    h = star_symbol_left(f.symbol, g.element);
  else if (g.is_symbol)
    h = star_symbol_right(f.element, g.symbol);
  else
    h = star(f.element, g.element);
  write_element(cfg, "star", h);
  const std::string sum = checksum(h.field);
  if (cfg.json)
    out << json{{"f", fs_}, {"g", gs_}, {"lambda", cfg.lambda}, {"checksum", sum}, {"trace", {trace(h).real(), trace(h).imag()}},
                {"files", {path_in(cfg, "star_torus.csv"), path_in(cfg, "star_lattice.csv")}}}
               .dump(2)
        << "\n";
  else
    out << fs_ << " * " << gs_ << ": checksum " << sum << ", trace " << format_double(trace(h).real()) << "\n";
  return 0;
}

int cmd_formal(const RunConfig& cfg, const std::string& pair_name, const std::string& fe, const std::string& ge, int K,
               bool commutator, std::ostream& out) {
  DerivationPair pair;
  if (pair_name == "main")
    pair = DerivationPair::main();
  else if (pair_name == "alt")
    pair = DerivationPair::alt();
  else
    throw UsageError("--pair must be main or alt");
  if (K < 0) throw UsageError("--order must be nonnegative");
  const FormalPoly f = ExprParser(fe).parse(), g = ExprParser(ge).parse();
  const FormalStarResult res = formal_star(pair, f, g, K);
  const FormalPoly value = commutator ? formal_commutator(pair, f, g, K) : res.value;
  if (cfg.json)
    out << json{{"pair", pair_name}, {"f", fe}, {"g", ge}, {"commutator", commutator}, {"value", value.str()},
                {"terminated", res.terminated}, {"order", res.order}}
               .dump(2)
        << "\n";
  else
    out << value.str() << "\n" << (res.terminated ? "terminated" : "truncated") << " at order " << res.order << "\n";
  return 0;
}

int cmd_export(const RunConfig& cfg, const std::string& spec, std::ostream& out) {
  const Operand f = family(cfg, spec);
  if (f.is_symbol) throw UsageError("symbols have no field export");
  write_element(cfg, "export", f.element);
  out << path_in(cfg, "export_torus.csv") << "\n" << path_in(cfg, "export_lattice.csv") << "\n";
  return 0;
}

void print_mlstate(const RunConfig& cfg, const std::vector<MlstateGrid>& grids, std::ostream& out) {
  if (cfg.json) {
    json j = json::array();
    for (const auto& g : grids)
      j.push_back({{"lambda", g.lambda},
                   {"evaluator_csv", g.evaluator_csv},
                   {"wigner_csv", g.wigner_csv},
                   {"max_diff", g.max_diff},
                   {"max_imag_evaluator", g.max_imag_evaluator},
                   {"max_imag_wigner", g.max_imag_wigner},
                   {"max_real", g.max_real},
                   {"odd_residual_evaluator", g.odd_residual_evaluator},
                   {"odd_residual_wigner", g.odd_residual_wigner},
                   {"origin_value", g.origin_value}});
    out << j.dump(2) << "\n";
    return;
  }
  for (const auto& g : grids)
    out << "lambda=" << format_double(g.lambda) << ": " << g.evaluator_csv << ", " << g.wigner_csv
        << "\n  max |closed - wigner| = " << format_double(g.max_diff)
        << ", max |im| = " << format_double(g.max_imag_evaluator) << " / " << format_double(g.max_imag_wigner)
        << ", value at origin = " << format_double(g.origin_value) << "\n";
}

std::string grid_csv(const std::vector<double>& qs, const std::vector<double>& ps, const CVec& v) {
  std::string s = "q,p,re,im\n";
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j) {
      const cplx x = v[i * ps.size() + j];
      s += format_double(qs[i]) + "," + format_double(ps[j]) + "," + format_double(x.real()) + "," +
           format_double(x.imag()) + "\n";
    }
  return s;
}

double odd_residual(const CVec& v, std::size_t nq, std::size_t np) {
  double e = 0;
  for (std::size_t i = 0; i < nq; ++i)
    for (std::size_t j = 0; j < np; ++j)
      e = std::max(e, std::abs(v[i * np + j].imag() + v[i * np + (np - 1 - j)].imag()));
  return e;
}

}  // namespace

std::vector<double> linspace(double a, double b, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be positive");
  if (count == 1) return {a};
  // symmetric about the midpoint, so a = -b gives an exactly odd set
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = mid + half * double(2 * i - (count - 1)) / double(count - 1);
  return x;
}

std::vector<MlstateGrid> cmd_mlstate(const RunConfig& cfg, const MlstateOptions& opt) {
  check_config(cfg);
  if (opt.nq < 1 || opt.np < 1) throw UsageError("window sizes must be positive");
  ensure_out(cfg);
  const std::vector<double> qs = linspace(opt.q_min, opt.q_max, opt.nq), ps = linspace(opt.p_min, opt.p_max, opt.np);
  const std::vector<double> lambdas = cfg.lambda_set ? std::vector<double>{cfg.lambda} : std::vector<double>{0.5, 0.0};
  std::vector<MlstateGrid> out;
  for (double lam : lambdas) {
    const BetaContext c(cfg.beta, cfg.hbar, lam);
    MlstateGrid g;
    g.lambda = lam;
    const std::string stem = "ml_lambda" + lambda_tag(lam);
    g.evaluator_csv = path_in(cfg, stem + ".csv");
    g.wigner_csv = path_in(cfg, stem + "_wigner.csv");

    CVec closed(qs.size() * ps.size());
    for (std::size_t i = 0; i < qs.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) closed[i * ps.size() + j] = ml_phase_closed(c, opt.xi, qs[i], ps[j]);
    const MLPhaseState st = ml_phase_state(c, opt.xi, cfg.grid_n);
    const CVec wig = FieldEvaluator(st.rho.field, true).grid(qs, ps);

    for (std::size_t k = 0; k < closed.size(); ++k) {
      g.max_diff = std::max(g.max_diff, std::abs(closed[k] - wig[k]));
      g.max_imag_evaluator = std::max(g.max_imag_evaluator, std::abs(closed[k].imag()));
      g.max_imag_wigner = std::max(g.max_imag_wigner, std::abs(wig[k].imag()));
      g.max_real = std::max(g.max_real, std::abs(closed[k].real()));
    }
    g.odd_residual_evaluator = odd_residual(closed, qs.size(), ps.size());
    g.odd_residual_wigner = odd_residual(wig, qs.size(), ps.size());
    g.origin_value = ml_phase_closed(c, opt.xi, 0.0, 0.0).real();
    write_file_atomic(g.evaluator_csv, grid_csv(qs, ps, closed));
    write_file_atomic(g.wigner_csv, grid_csv(qs, ps, wig));
    out.push_back(std::move(g));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Minimal-length deformation quantization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--beta", cfg.beta, "deformation parameter beta")->capture_default_str();
  app.add_option("--hbar", cfg.hbar, "Planck constant")->capture_default_str();
  auto* lam = app.add_option("--lambda", cfg.lambda, "ordering parameter in [0, 1]")->capture_default_str();
  app.add_option("--grid", cfg.grid_n, "grid size n (even)")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for random test data")->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--tol-scale", cfg.tol_scale, "multiplier on verify tolerances")->capture_default_str();
  app.add_flag("--json", cfg.json, "JSON report on stdout");

  bool acceptance = false;
  auto* verify = app.add_subcommand("verify", "run the invariant suites of every module");
  verify->add_flag("--acceptance", acceptance, "also run acceptance criteria 1-11");

  MlstateOptions ml;
  auto* mlstate = app.add_subcommand("mlstate", "maximal-localization phase-space grids");
  mlstate->add_option("--xi", ml.xi, "position of the state")->capture_default_str();
  mlstate->add_option("--q-min", ml.q_min)->capture_default_str();
  mlstate->add_option("--q-max", ml.q_max)->capture_default_str();
  mlstate->add_option("--p-min", ml.p_min)->capture_default_str();
  mlstate->add_option("--p-max", ml.p_max)->capture_default_str();
  mlstate->add_option("--nq", ml.nq)->capture_default_str();
  mlstate->add_option("--np", ml.np)->capture_default_str();

  double xi = 0.0;
  auto* eigen = app.add_subcommand("eigenstate", "position eigenvector rho_xi and its eigen-relations");
  eigen->add_option("--xi", xi, "eigenvalue")->capture_default_str();

  std::string fspec, gspec;
  auto* starc = app.add_subcommand("star", "f * g for built-in field families");
  starc->add_option("f", fspec, "bump[:k] | rho_xi[:xi] | rho_ml[:xi] | q | symbol[:power]")->required();
  starc->add_option("g", gspec, "same families as f")->required();

  std::string pair = "main", fe, ge;
  int K = 8;
  bool commutator = false;
  auto* formal = app.add_subcommand("formal", "exact formal star product of polynomials");
  formal->add_option("f", fe, "expression like '3/2 q^2 p + s'")->required();
  formal->add_option("g", ge, "expression")->required();
  formal->add_option("--pair", pair, "main | alt")->capture_default_str();
  formal->add_option("--order", K, "highest hbar order")->capture_default_str();
  formal->add_flag("--commutator", commutator, "print f*g - g*f instead");

  std::string espec = "rho_ml";
  auto* exportc = app.add_subcommand("export", "write the torus and lattice CSVs of a field family");
  exportc->add_option("field", espec, "field family")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  cfg.lambda_set = lam->count() > 0;

  try {
    check_config(cfg);
    if (verify->parsed()) return cmd_verify(cfg, acceptance, std::cout);
    if (mlstate->parsed()) {
      print_mlstate(cfg, cmd_mlstate(cfg, ml), std::cout);
      return 0;
    }
    if (eigen->parsed()) return cmd_eigenstate(cfg, xi, std::cout);
    if (starc->parsed()) return cmd_star(cfg, fspec, gspec, std::cout);
    if (formal->parsed()) return cmd_formal(cfg, pair, fe, ge, K, commutator, std::cout);
    if (exportc->parsed()) return cmd_export(cfg, espec, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << " (seed " << cfg.seed << ")\n";
    return 1;
  }
  return 2;
}

}  // namespace mlq::cli
