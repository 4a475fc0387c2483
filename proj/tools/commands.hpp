#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cohcost/cohcost.hpp"
#include "json.hpp"

namespace cctool {

using namespace cohcost;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitViolation = 2;

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const char* fmt(bool b) { return b ? "true" : "false"; }

struct ModelSource {
  std::string path;
  std::string builtin;

  TargetSpec load() const {
    if (path.empty() == builtin.empty()) throw ValidationError("give exactly one of --model PATH or --builtin NAME");
    return path.empty() ? builtin_model(builtin) : load_model(path);
  }
};

struct RunConfig {
  ModelSource model;
  std::uint64_t seed = 42;
  std::string out;
  std::string svg;
  std::string norm = "given";

  NormConvention convention() const {
    if (norm == "given") return NormConvention::Given;
    if (norm == "shifted") return NormConvention::Shifted;
    throw ValidationError("--norm must be 'given' or 'shifted'");
  }
};

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("CC_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ValidationError("CC_SEED must be a non-negative integer");
    return v;
  }
  return 42;
}

/// Writes to the --out file when given, otherwise to `fallback`.
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ValidationError("failed writing '" + path + "'");
}

struct Fig2Row {
  double delta, region_a, region_b;
  bool domain_ok;
};

inline std::vector<Fig2Row> fig2_rows(const TargetSpec& t, NormConvention conv, double dmin, double dmax, int steps) {
  if (!(dmin > 0.0) || !(dmin < dmax) || dmax > std::sqrt(2.0) * (1.0 + 1e-12))
    throw ValidationError("fig2: need 0 < delta-min < delta-max <= sqrt(2)");
  if (steps < 2) throw ValidationError("fig2: steps must be at least 2");
  const double asym = gate_asymmetry(t.U_S, t.A_S);
  const double norm_a = charge_norm(t.A_S, conv);
  const double dlim = theorem2_delta_max(asym, norm_a);
  std::vector<Fig2Row> rows;
  const double lr = std::log(dmax / dmin);
  for (int i = 0; i < steps; ++i) {
    double d = i == steps - 1 ? dmax : dmin * std::exp(lr * i / (steps - 1));
    rows.push_back({d, region_a_boundary(asym, norm_a, d), region_b_boundary(asym, norm_a, d), d <= dlim});
  }
  return rows;
}

inline std::string fig2_svg(const std::vector<Fig2Row>& rows) {
  const double w = 640, h = 480, ml = 60, mr = 20, mt = 20, mb = 50;
  const double xmin = rows.front().delta, xmax = rows.back().delta;
  double ymax = 0.0;
  for (const auto& r : rows) ymax = std::max(ymax, r.region_b);
  ymax = std::max(ymax, 1.0);
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - std::min(y, ymax) / ymax * (h - mt - mb); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<polygon fill=\"#f4b6b6\" fill-opacity=\"0.6\" points=\"" << fmt(px(xmin)) << ',' << fmt(py(0.0));
  for (const auto& r : rows) s << ' ' << fmt(px(r.delta)) << ',' << fmt(py(r.region_a));
  s << ' ' << fmt(px(xmax)) << ',' << fmt(py(0.0)) << "\"/>\n";
  s << "<polygon fill=\"#b6d4f4\" fill-opacity=\"0.6\" points=\"" << fmt(px(xmin)) << ',' << fmt(py(ymax));
  for (const auto& r : rows) s << ' ' << fmt(px(r.delta)) << ',' << fmt(py(r.region_b));
  s << ' ' << fmt(px(xmax)) << ',' << fmt(py(ymax)) << "\"/>\n";
  for (int curve = 0; curve < 2; ++curve) {
    s << "<polyline fill=\"none\" stroke=\"" << (curve == 0 ? "#b00000" : "#0050b0") << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i)
      s << (i ? " " : "") << fmt(px(rows[i].delta)) << ',' << fmt(py(curve == 0 ? rows[i].region_a : rows[i].region_b));
    s << "\"/>\n";
  }
  s << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">delta (" << fmt(xmin) << " to "
    << fmt(xmax) << ")</text>\n";
  s << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
    << ")\" text-anchor=\"middle\">sqrt(F) (0 to " << fmt(ymax) << ")</text>\n";
  s << "<text x=\"" << ml + 10 << "\" y=\"" << h - mb - 10 << "\">A: impossible</text>\n";
  s << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 20 << "\">B: achievable</text>\n";
  s << "</svg>\n";
  return s.str();
}

inline int cmd_fig2(const RunConfig& cfg, double dmin, double dmax, int steps, std::ostream& out) {
  TargetSpec t = cfg.model.load();
  auto rows = fig2_rows(t, cfg.convention(), dmin, dmax, steps);
  std::ostringstream csv;
  csv << "delta,sqrtF_regionA_boundary,sqrtF_regionB_boundary,domain_ok\n";
  for (const auto& r : rows)
    csv << fmt(r.delta) << ',' << fmt(r.region_a) << ',' << fmt(r.region_b) << ',' << fmt(r.domain_ok) << '\n';
  emit(cfg.out, csv.str(), out);
  if (!cfg.svg.empty()) emit(cfg.svg, fig2_svg(rows), out);
  return kExitOk;
}

struct ProtocolRequest {
  std::optional<double> zeta, target_f, target_delta;
  double tail = 1e-12;
};

inline nlohmann::json protocol_report(const TargetSpec& t, const ProtocolRequest& req, NormConvention conv,
                                      std::uint64_t seed) {
  const int given = int(req.zeta.has_value()) + int(req.target_f.has_value()) + int(req.target_delta.has_value());
  if (given != 1) throw ValidationError("give exactly one of --zeta, --target-F, --target-delta");
  if (!(req.tail > 0.0 && req.tail < 1.0)) throw ValidationError("--tail must lie in (0, 1)");
  const double asym = gate_asymmetry(t.U_S, t.A_S);
  const double norm_a = charge_norm(t.A_S, conv);

  nlohmann::json j;
  double zeta = 0.0;
  if (req.zeta) {
    zeta = *req.zeta;
  } else if (req.target_f) {
    if (!(*req.target_f > 0.0)) throw ValidationError("--target-F must be positive");
    zeta = std::sqrt(*req.target_f) / 2.0;
  } else {
    const double d = *req.target_delta;
    auto t2 = theorem2_bound(asym, d, norm_a);
    zeta = t2.value / 2.0;
    j["target_delta"] = d;
    j["target_delta_in_domain"] = t2.domain_ok;
  }
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw ValidationError("zeta must be positive and finite");

  GaussianProtocol p = protocol_for_zeta(t, zeta, req.tail);
  WorstCaseOptions wopt;
  wopt.seed = seed;
  ErrorReport rep = worst_case_error(p.set, t, wopt);
  ConservationResidual res = conservation_residual(p.set, t.A_S);
  const double q = qfi(p.set.rho_E, p.set.A_E);
  const double threshold = lemma_threshold(asym);

  j["zeta"] = zeta;
  j["sqrtF_nominal"] = 2.0 * zeta;
  j["asymmetry"] = asym;
  j["norm_A_S"] = norm_a;
  j["lemma_threshold"] = threshold;
  j["lattice"] = {{"s", p.lattice.spacing}, {"N", p.lattice.half_width}, {"dim", p.lattice.dim()}};
  j["qfi_measured"] = q;
  const bool applicable = zeta >= threshold * (1.0 - 1e-12);
  j["delta_bound_applicable"] = applicable;
  if (applicable)
    j["delta_bound"] = protocol_error_bound(asym, norm_a, zeta);
  else
    j["delta_bound"] = nullptr;
  j["delta_measured"] = rep.worst_delta;
  const double sqrt_f = std::sqrt(std::max(0.0, q));
  if (rep.worst_delta > 0.0) {
    const double lower = theorem1_bound(asym, std::min(rep.worst_delta, std::sqrt(2.0)), norm_a);
    j["theorem1_check"] = {{"lower", lower}, {"sqrtF", sqrt_f}, {"holds", sqrt_f >= lower - 1e-6}};
  } else {
    j["theorem1_check"] = {{"lower", nullptr}, {"sqrtF", sqrt_f}, {"holds", asym == 0.0}};
  }
  j["conservation_residuals"] = {{"op_norm", res.op_norm}, {"state_weighted", res.state_weighted}};
  j["optimizer"] = {{"starts", rep.optimizer.starts},
                    {"iterations", rep.optimizer.iterations},
                    {"converged", rep.optimizer.converged},
                    {"final_gradient_norm", rep.optimizer.final_gradient_norm}};
  j["seed"] = seed;
  return j;
}

inline int cmd_protocol(const RunConfig& cfg, const ProtocolRequest& req, std::ostream& out, std::ostream& err) {
  TargetSpec t = cfg.model.load();
  nlohmann::json j = protocol_report(t, req, cfg.convention(), cfg.seed);
  if (!j["delta_bound_applicable"].get<bool>())
    err << "warning: zeta is below the threshold " << fmt(j["lemma_threshold"].get<double>())
        << "; the error bound does not apply\n";
  emit(cfg.out, j.dump(2) + "\n", out);
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::vector<std::string> suites, int trials, int dim_max,
                      std::ostream& out) {
  if (trials < 1) throw ValidationError("--trials must be at least 1");
  if (dim_max < 2) throw ValidationError("--dim-max must be at least 2");
  if (suites.empty()) suites = suite_names();
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ValidationError("unknown suite '" + s + "'");
  std::ostringstream csv;
  csv << "suite,trials,violations,worst_margin,seed\n";
  bool violated = false;
  for (const auto& s : suites) {
    CheckOutcome o = run_suite(s, trials, cfg.seed, std::size_t(dim_max));
    violated = violated || o.violations > 0;
    csv << o.suite_name << ',' << o.trials << ',' << o.violations << ',' << fmt(o.worst_margin) << ',' << o.seed
        << '\n';
  }
  emit(cfg.out, csv.str(), out);
  return violated ? kExitViolation : kExitOk;
}

struct SweepRow {
  double zeta, sqrt_f, delta, product, theorem1_lower, theorem2_upper;
  bool below_threshold;
};

inline SweepRow sweep_row(const TargetSpec& t, NormConvention conv, double zeta, std::uint64_t seed) {
  const double asym = gate_asymmetry(t.U_S, t.A_S);
  const double norm_a = charge_norm(t.A_S, conv);
  GaussianProtocol p = protocol_for_zeta(t, zeta);
  WorstCaseOptions wopt;
  wopt.seed = seed;
  const double delta = worst_case_error(p.set, t, wopt).worst_delta;
  const double sqrt_f = std::sqrt(std::max(0.0, qfi(p.set.rho_E, p.set.A_E)));
  SweepRow r{zeta, sqrt_f, delta, delta * sqrt_f, 0.0, std::numeric_limits<double>::infinity(),
             zeta < lemma_threshold(asym) * (1.0 - 1e-12)};
  if (delta > 0.0) {
    r.theorem1_lower = theorem1_bound(asym, std::min(delta, std::sqrt(2.0)), norm_a);
    r.theorem2_upper = theorem2_bound(asym, delta, norm_a).value;
  }
  return r;
}

inline int cmd_sweep(const RunConfig& cfg, const std::vector<double>& zetas, std::ostream& out, std::ostream& err) {
  if (zetas.empty()) throw ValidationError("--zetas must not be empty");
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    if (!(zetas[i] > 0.0) || !std::isfinite(zetas[i])) throw ValidationError("zeta values must be positive");
    if (i > 0 && !(zetas[i] > zetas[i - 1])) throw ValidationError("--zetas must be strictly ascending");
  }
  TargetSpec t = cfg.model.load();
  std::ostringstream csv;
  csv << "zeta,sqrtF,delta_measured,product_delta_times_sqrtF,theorem1_lower,theorem2_upper\n";
  for (double z : zetas) {
    SweepRow r = sweep_row(t, cfg.convention(), z, cfg.seed);
    if (r.below_threshold) err << "warning: zeta=" << fmt(z) << " is below the achievability threshold\n";
    csv << fmt(r.zeta) << ',' << fmt(r.sqrt_f) << ',' << fmt(r.delta) << ',' << fmt(r.product) << ','
        << fmt(r.theorem1_lower) << ',' << fmt(r.theorem2_upper) << '\n';
  }
  emit(cfg.out, csv.str(), out);
  return kExitOk;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherence cost of conservation-law-limited unitary gates", "cc"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<std::uint64_t> seed_flag;
  auto common = [&](CLI::App* sub, bool with_model) {
    if (with_model) {
      auto* m = sub->add_option("--model", cfg.model.path, "model JSON file");
      auto* b = sub->add_option("--builtin", cfg.model.builtin, "builtin model: bitflip or erasure");
      m->excludes(b);
      sub->add_option("--norm", cfg.norm, "norm convention for ||A_S||: given or shifted");
    }
    sub->add_option("--seed", seed_flag, "random seed (default 42, or CC_SEED)");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
  };

  double dmin = 0.05, dmax = 1.3;
  int steps = 100;
  auto* fig2 = app.add_subcommand("fig2", "region boundaries in the (delta, sqrt F) plane");
  common(fig2, true);
  fig2->add_option("--delta-min", dmin);
  fig2->add_option("--delta-max", dmax);
  fig2->add_option("--steps", steps);
  fig2->add_option("--svg", cfg.svg, "also write an SVG plot");

  ProtocolRequest req;
  auto* proto = app.add_subcommand("protocol", "build and measure the Gaussian-pointer protocol");
  common(proto, true);
  proto->add_option("--zeta", req.zeta);
  proto->add_option("--target-F", req.target_f);
  proto->add_option("--target-delta", req.target_delta);
  proto->add_option("--tail", req.tail);

  std::vector<std::string> suites;
  int trials = 1000, dim_max = 4;
  auto* verify = app.add_subcommand("verify", "run randomized inequality suites");
  common(verify, false);
  verify->add_option("--suites", suites)->delimiter(',');
  verify->add_option("--trials", trials);
  verify->add_option("--dim-max", dim_max);

  std::vector<double> zetas = {4, 8, 16, 32, 64};
  auto* sweep = app.add_subcommand("sweep", "measured error against zeta");
  common(sweep, true);
  sweep->add_option("--zetas", zetas)->delimiter(',');

  std::vector<std::string> argv_store = {"cc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    cfg.seed = seed_flag ? *seed_flag : default_seed();
    if (fig2->parsed()) return cmd_fig2(cfg, dmin, dmax, steps, out);
    if (proto->parsed()) return cmd_protocol(cfg, req, out, err);
    if (verify->parsed()) return cmd_verify(cfg, suites, trials, dim_max, out);
    if (sweep->parsed()) return cmd_sweep(cfg, zetas, out, err);
  } catch (const cohcost::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace cctool
