#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jscc/dmc_analysis.hpp"
#include "jscc/errors.hpp"
#include "jscc/finite_blocklength_lab.hpp"
#include "jscc/json_io.hpp"
#include "jscc/markov_info.hpp"
#include "jscc/rate_calculator.hpp"
#include "jscc/special_dists.hpp"
#include "jscc/version.hpp"

namespace jscc::cli {

namespace {

using nlohmann::json;

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Rounds every float in a JSON tree to 12 significant digits so dumps stay
// stable across platforms and reruns.
json round12(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return j;
    return json(std::strtod(fmt12(v).c_str(), nullptr));
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& item : j) out.push_back(round12(item));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      out[it.key()] = round12(it.value());
    }
    return out;
  }
  return j;
}

double parse_number(const std::string& s, const char* what) {
  const char* c = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(c, &end);
  if (end == c || *end != '\0') {
    throw ConfigError(std::string(what) + ": cannot parse number \"" + s +
                      "\"");
  }
  return v;
}

// Variance arguments accept "inf" for the saturating branch.
double parse_variance(const std::string& s, const char* what) {
  if (s == "inf" || s == "INF" || s == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  return parse_number(s, what);
}

json variance_echo(double v) {
  if (std::isinf(v)) return json("inf");
  return json(v);
}

std::vector<double> grid_points(const std::string& spec) {
  std::istringstream in(spec);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') ||
      !std::getline(in, c) || in.rdbuf()->in_avail() != 0) {
    throw ConfigError("grid must look like lo:hi:step, got \"" + spec + "\"");
  }
  const double lo = parse_number(a, "grid lo");
  const double hi = parse_number(b, "grid hi");
  const double step = parse_number(c, "grid step");
  if (!(step > 0) || hi < lo) {
    throw ConfigError("grid needs step > 0 and hi >= lo, got \"" + spec +
                      "\"");
  }
  const double span = (hi - lo) / step;
  if (span > 100000) throw ConfigError("grid has more than 100001 points");
  const int count = static_cast<int>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + i * step;
  return out;
}

json jvec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vec_from_json(const json& j, const char* ctx) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(std::string(ctx) + " must be a nonempty array");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) {
      throw ConfigError(std::string(ctx) + " entries must be numbers");
    }
    out(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  }
  return out;
}

std::vector<int> ivec_from_json(const json& j, const char* ctx) {
  if (!j.is_array()) {
    throw ConfigError(std::string(ctx) + " must be an array");
  }
  std::vector<int> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number_integer()) {
      throw ConfigError(std::string(ctx) + " entries must be integers");
    }
    out.push_back(static_cast<int>(j.at(i).get<long long>()));
  }
  return out;
}

const json& need_key(const json& j, const char* key, const char* ctx) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(ctx) + ": missing required key \"" + key +
                      "\"");
  }
  return j.at(key);
}

// Every generated table opens with the tool version and the invocation, so a
// stray CSV can always be traced back to the exact command that made it.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config,
            const std::uint64_t* seed) {
    file_.open(path);
    if (!file_) throw ConfigError(path + ": cannot open for writing");
    file_ << "# jscc " << kVersion << "\n";
    file_ << "# config: " << config << "\n";
    if (seed != nullptr) file_ << "# seed: " << *seed << "\n";
  }

  void header(const std::vector<std::string>& cols) { line(cols); }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) file_ << ',';
      file_ << fmt12(vals[i]);
    }
    file_ << '\n';
  }

 private:
  void line(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) file_ << ',';
      file_ << cols[i];
    }
    file_ << '\n';
  }

  std::ofstream file_;
};

void emit_json(const json& j, const std::string& out_path, std::ostream& out) {
  const std::string text = round12(j).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw ConfigError(out_path + ": cannot open for writing");
  f << text;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ' ';
    out += args[i];
  }
  return out;
}

json mc_echo(int n, long long samples, std::uint64_t seed, int workers) {
  return json{{"n", n},
              {"samples", samples},
              {"seed", seed},
              {"workers", workers}};
}

rates::RateProblem dmc_problem(const markov::NonHiddenChain& source,
                               const dmc::DmcChannel& channel) {
  const markov::InfoRates src = markov::info_rates(source);
  const dmc::CapacityResult cap = dmc::capacity(channel);
  const dmc::DispersionExtremes ext = dmc::dispersion_extremes(channel, cap);
  rates::RateProblem p;
  p.source = {src.entropy, src.varentropy};
  p.channel = {rates::ChannelKind::dmc, cap.capacity, 0.0, ext.v_plus,
               ext.v_minus};
  return p;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"finite-blocklength joint source-channel coding toolkit",
               "jscc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  const std::string config_echo = join_args(args);

  // ---- info ----
  auto* info = app.add_subcommand(
      "info", "entropy and varentropy rates of a (pair) Markov chain");
  std::string info_chain, info_out;
  info->add_option("--chain", info_chain, "chain JSON file")->required();
  info->add_option("--out", info_out, "write the JSON report to this file");

  // ---- capacity ----
  auto* capacity = app.add_subcommand(
      "capacity", "DMC capacity and dispersion extremes");
  std::string cap_channel, cap_out;
  double cap_gap_tol = 1e-10, cap_support_tol = 1e-7;
  capacity->add_option("--channel", cap_channel, "channel JSON file")
      ->required();
  capacity->add_option("--gap-tol", cap_gap_tol,
                       "duality gap target for the capacity iteration");
  capacity->add_option("--support-tol", cap_support_tol,
                       "slack threshold classifying the optimal support");
  capacity->add_option("--out", cap_out, "write the JSON report to this file");

  // ---- dist ----
  auto* dist = app.add_subcommand(
      "dist", "switched-convolution and star-product distributions");
  dist->require_subcommand(1);

  auto* dist_psi = dist->add_subcommand(
      "psi", "two-branch Gaussian convolution CDF/density/quantile");
  double psi_v1 = 1;
  std::string psi_v2 = "1", psi_v3 = "1";
  double psi_at = 0, psi_eps = 0;
  dist_psi->add_option("--v1", psi_v1, "source variance (finite, > 0)");
  dist_psi->add_option("--v2", psi_v2, "branch variance (>= 0 or inf)");
  dist_psi->add_option("--v3", psi_v3, "branch variance (>= 0 or inf)");
  auto* psi_at_opt =
      dist_psi->add_option("--at", psi_at, "evaluate CDF and density here");
  auto* psi_eps_opt =
      dist_psi->add_option("--eps", psi_eps, "invert the CDF at this level");
  std::string psi_grid, psi_out;
  auto* psi_grid_opt = dist_psi->add_option(
      "--grid", psi_grid, "tabulate the CDF over lo:hi:step as CSV");
  dist_psi->add_option("--out", psi_out, "CSV output file for --grid");
  psi_at_opt->excludes(psi_eps_opt)->excludes(psi_grid_opt);
  psi_eps_opt->excludes(psi_at_opt)->excludes(psi_grid_opt);
  psi_grid_opt->excludes(psi_at_opt)->excludes(psi_eps_opt);

  auto* dist_star = dist->add_subcommand(
      "star", "star-product CDF/quantile with the optimizing error split");
  double star_v1 = 1, star_v2 = 1, star_at = 0, star_eps = 0;
  dist_star->add_option("--v1", star_v1, "first variance (>= 0)");
  dist_star->add_option("--v2", star_v2, "second variance (>= 0)");
  auto* star_at_opt =
      dist_star->add_option("--at", star_at, "evaluate the CDF here");
  auto* star_eps_opt =
      dist_star->add_option("--eps", star_eps, "invert the CDF at this level");
  std::string star_grid, star_out;
  auto* star_grid_opt = dist_star->add_option(
      "--grid", star_grid, "tabulate the CDF over lo:hi:step as CSV");
  dist_star->add_option("--out", star_out, "CSV output file for --grid");
  star_at_opt->excludes(star_eps_opt)->excludes(star_grid_opt);
  star_eps_opt->excludes(star_at_opt)->excludes(star_grid_opt);
  star_grid_opt->excludes(star_at_opt)->excludes(star_eps_opt);

  auto* dist_floor = dist->add_subcommand(
      "floor", "universal normalized floor of the star-product quantile");
  double floor_eps = 0;
  dist_floor->add_option("--eps", floor_eps, "error budget in (0, 1)")
      ->required();

  // ---- rates ----
  auto* rates_cmd = app.add_subcommand(
      "rates", "second-order error curves and blocklength expansions");
  rates_cmd->require_subcommand(1);

  auto* rates_curve = rates_cmd->add_subcommand(
      "curve", "tabulate all error curves over a grid of rate offsets");
  std::string curve_problem, curve_grid = "-6:6:0.05", curve_out;
  rates_curve->add_option("--problem", curve_problem, "problem JSON file")
      ->required();
  rates_curve->add_option("--grid", curve_grid, "offset grid lo:hi:step");
  rates_curve->add_option("--out", curve_out, "output CSV path")->required();

  auto* rates_point = rates_cmd->add_subcommand(
      "point", "all error quantities at a single rate offset");
  std::string point_problem, point_out;
  double point_at = 0;
  rates_point->add_option("--problem", point_problem, "problem JSON file")
      ->required();
  rates_point->add_option("--at", point_at, "rate offset")->required();
  rates_point->add_option("--out", point_out,
                          "write the JSON report to this file");

  auto* rates_k = rates_cmd->add_subcommand(
      "k", "second-order expansion of the supported message block length");
  std::string k_problem, k_scheme = "joint", k_out;
  double k_n = 0, k_eps = 0;
  rates_k->add_option("--problem", k_problem, "problem JSON file")->required();
  rates_k->add_option("--n", k_n, "channel block length")->required();
  rates_k->add_option("--eps", k_eps, "target error in (0, 1)")->required();
  rates_k->add_option("--scheme", k_scheme, "joint or separation")
      ->check(CLI::IsMember({"joint", "separation"}));
  rates_k->add_option("--out", k_out, "write the JSON report to this file");

  // ---- figures ----
  auto* figures = app.add_subcommand(
      "figures", "pinned CSV datasets behind the standard plots");
  std::string fig_preset, fig_out;
  figures->add_option("preset", fig_preset, "psi, sandwich, or ratio")
      ->required()
      ->check(CLI::IsMember({"psi", "sandwich", "ratio"}));
  figures->add_option("--out", fig_out, "output CSV path")->required();

  // ---- sim ----
  auto* sim = app.add_subcommand("sim", "Monte Carlo experiments");
  sim->require_subcommand(1);

  auto* sim_clt = sim->add_subcommand(
      "clt", "empirical law of the normalized conditional information");
  std::string clt_chain, clt_out, clt_dump;
  int clt_n = 0, clt_workers = 1;
  long long clt_samples = 100000;
  std::uint64_t clt_seed = 1;
  sim_clt->add_option("--chain", clt_chain, "pair chain JSON file")
      ->required();
  sim_clt->add_option("--n", clt_n, "path length")->required();
  sim_clt->add_option("--samples", clt_samples, "sample paths");
  sim_clt->add_option("--seed", clt_seed, "RNG seed");
  sim_clt->add_option("--workers", clt_workers, "worker threads");
  sim_clt->add_option("--out", clt_out, "write the JSON report to this file");
  sim_clt->add_option("--dump", clt_dump,
                      "also write the sorted samples as CSV");

  auto* sim_bounds = sim->add_subcommand(
      "bounds", "achievability/converse pair for a conditional-additive code");
  std::string bounds_source, bounds_noise, bounds_out;
  int bounds_k = 0, bounds_n = 0, bounds_workers = 1;
  long long bounds_samples = 100000;
  std::uint64_t bounds_seed = 1;
  sim_bounds->add_option("--source", bounds_source, "source chain JSON file")
      ->required();
  sim_bounds->add_option("--noise", bounds_noise, "noise pair chain JSON file")
      ->required();
  sim_bounds->add_option("--k", bounds_k, "source block length")->required();
  sim_bounds->add_option("--n", bounds_n, "channel block length")->required();
  sim_bounds->add_option("--samples", bounds_samples, "sample paths");
  sim_bounds->add_option("--seed", bounds_seed, "RNG seed");
  sim_bounds->add_option("--workers", bounds_workers, "worker threads");
  sim_bounds->add_option("--out", bounds_out,
                         "write the JSON report to this file");

  auto* sim_two = sim->add_subcommand(
      "two-regime", "simulate the regime-switching joint scheme");
  std::string two_source, two_channel, two_out;
  double two_offset = 0;
  int two_n = 0, two_workers = 1;
  long long two_samples = 100000;
  std::uint64_t two_seed = 1;
  sim_two->add_option("--source", two_source, "source chain JSON file")
      ->required();
  sim_two->add_option("--channel", two_channel, "channel JSON file")
      ->required();
  sim_two->add_option("--offset", two_offset, "rate offset r")->required();
  sim_two->add_option("--n", two_n, "channel block length")->required();
  sim_two->add_option("--samples", two_samples, "sample paths");
  sim_two->add_option("--seed", two_seed, "RNG seed");
  sim_two->add_option("--workers", two_workers, "worker threads");
  sim_two->add_option("--out", two_out, "write the JSON report to this file");

  auto* sim_single = sim->add_subcommand(
      "singleshot", "exhaustive one-shot optimum with bound cross-checks");
  std::string single_instance, single_out;
  double single_c = 0;
  sim_single
      ->add_option("--instance", single_instance,
                   "instance JSON file with p_m and matrix")
      ->required();
  auto* single_c_opt = sim_single->add_option(
      "--threshold", single_c, "also evaluate both bounds at this c > 0");
  sim_single->add_option("--out", single_out,
                         "write the JSON report to this file");

  auto* sim_sep = sim->add_subcommand(
      "sep-identity", "interleaved-separation error product identity");
  std::string sep_scheme, sep_out;
  sim_sep->add_option("--scheme", sep_scheme, "scheme JSON file")->required();
  sim_sep->add_option("--out", sep_out, "write the JSON report to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*info) {
      const markov::NonHiddenChain chain =
          io::pair_chain_from_json(io::load_json_file(info_chain));
      const markov::InfoRates rates = markov::info_rates(chain);
      json samples = json::array();
      for (const auto& s : rates.theta_samples) {
        samples.push_back(json{{"theta", s.theta},
                               {"lambda", s.lambda},
                               {"renyi", s.renyi}});
      }
      emit_json(json{{"alphabet_x", chain.nx},
                     {"alphabet_z", chain.nz},
                     {"entropy", rates.entropy},
                     {"entropy_bits", rates.entropy / std::log(2.0)},
                     {"varentropy", rates.varentropy},
                     {"theta_samples", samples}},
                info_out, out);
    } else if (*capacity) {
      const dmc::DmcChannel ch =
          io::dmc_from_json(io::load_json_file(cap_channel));
      const dmc::CapacityResult cap =
          dmc::capacity(ch, cap_gap_tol, cap_support_tol);
      const dmc::DispersionExtremes ext = dmc::dispersion_extremes(ch, cap);
      emit_json(json{{"capacity", cap.capacity},
                     {"capacity_bits", cap.capacity / std::log(2.0)},
                     {"v_minus", ext.v_minus},
                     {"v_plus", ext.v_plus},
                     {"support", cap.support},
                     {"saddle_output", jvec(cap.saddle_output)},
                     {"p_minus", jvec(ext.p_minus)},
                     {"p_plus", jvec(ext.p_plus)}},
                cap_out, out);
    } else if (*dist) {
      if (*dist_psi) {
        const dists::SwitchedConvSpec spec{
            psi_v1, parse_variance(psi_v2, "--v2"),
            parse_variance(psi_v3, "--v3")};
        json o{{"v1", spec.v1},
               {"v2", variance_echo(spec.v2)},
               {"v3", variance_echo(spec.v3)}};
        if (psi_grid_opt->count()) {
          if (psi_out.empty()) throw ConfigError("--grid needs --out");
          CsvWriter csv(psi_out, config_echo, nullptr);
          csv.header({"r", "cdf"});
          for (double r : grid_points(psi_grid)) {
            csv.row({r, dists::switched_cdf(spec, r)});
          }
          return 0;
        }
        if (psi_eps_opt->count()) {
          o["eps"] = psi_eps;
          o["quantile"] = dists::switched_quantile(spec, psi_eps);
        } else if (psi_at_opt->count()) {
          o["r"] = psi_at;
          o["cdf"] = dists::switched_cdf(spec, psi_at);
          o["density"] = dists::switched_density(spec, psi_at);
        } else {
          throw ConfigError("dist psi needs --at, --eps, or --grid");
        }
        emit_json(o, "", out);
      } else if (*dist_star) {
        const dists::StarProductSpec spec{star_v1, star_v2};
        json o{{"v1", spec.v1}, {"v2", spec.v2}};
        if (star_grid_opt->count()) {
          if (star_out.empty()) throw ConfigError("--grid needs --out");
          CsvWriter csv(star_out, config_echo, nullptr);
          csv.header({"r", "cdf"});
          for (double r : grid_points(star_grid)) {
            csv.row({r, dists::star_cdf(spec, r)});
          }
          return 0;
        }
        if (star_eps_opt->count()) {
          const dists::StarSplit split =
              dists::star_quantile_split(spec, star_eps);
          o["eps"] = star_eps;
          o["quantile"] = split.quantile;
          o["eps_source"] = split.eps_source;
          o["eps_channel"] = split.eps_channel;
          o["normalized"] = split.quantile / std::sqrt(spec.v1 + spec.v2);
          o["floor"] = dists::separation_quantile_floor(star_eps);
        } else if (star_at_opt->count()) {
          const dists::SandwichBounds sb =
              dists::sandwich_bounds(spec.v1, spec.v2, star_at);
          o["r"] = star_at;
          o["cdf"] = dists::star_cdf(spec, star_at);
          o["sandwich_lower"] = sb.lower;
          o["sandwich_upper"] = sb.upper;
        } else {
          throw ConfigError("dist star needs --at, --eps, or --grid");
        }
        emit_json(o, "", out);
      } else if (*dist_floor) {
        emit_json(json{{"eps", floor_eps},
                       {"floor", dists::separation_quantile_floor(floor_eps)}},
                  "", out);
      }
    } else if (*rates_cmd) {
      if (*rates_curve) {
        const rates::RateProblem problem =
            io::problem_from_json(io::load_json_file(curve_problem));
        const bool is_dmc = problem.channel.kind == rates::ChannelKind::dmc;
        const std::vector<double> grid = grid_points(curve_grid);
        CsvWriter csv(curve_out, config_echo, nullptr);
        csv.header({"r", "eps_joint", "eps_kv", "eps_sep", "ratio_kv",
                    "ratio_sep", "bound_kv", "bound_sep"});
        for (double r : grid) {
          const double ej = rates::joint_error(problem, r);
          const double ek = is_dmc ? rates::kv_bound(problem, r) : ej;
          const double es = rates::sep_error(problem, r);
          csv.row({r, ej, ek, es, is_dmc ? ek / ej : 1.0, es / ek,
                   rates::kv_ratio_upper(problem, r),
                   rates::sep_kv_ratio_upper(problem, r)});
        }
      } else if (*rates_point) {
        const rates::RateProblem problem =
            io::problem_from_json(io::load_json_file(point_problem));
        const bool is_dmc = problem.channel.kind == rates::ChannelKind::dmc;
        const double r = point_at;
        const double ej = rates::joint_error(problem, r);
        const double ek = is_dmc ? rates::kv_bound(problem, r) : ej;
        const double es = rates::sep_error(problem, r);
        json o{{"r", r},
               {"source_term", problem.source_term()},
               {"eps_joint", ej},
               {"eps_kv", ek},
               {"eps_sep", es},
               {"ratio_kv", is_dmc ? ek / ej : 1.0},
               {"ratio_sep", es / ek},
               {"bound_kv", rates::kv_ratio_upper(problem, r)},
               {"bound_sep", rates::sep_kv_ratio_upper(problem, r)}};
        try {
          const rates::RatioBounds rb =
              rates::sep_joint_ratio_bounds(problem, r);
          o["sep_joint_lower"] = rb.lower;
          o["sep_joint_upper"] = rb.upper;
        } catch (const DegenerateSourceError&) {
          o["sep_joint_lower"] = nullptr;
          o["sep_joint_upper"] = nullptr;
        }
        emit_json(o, point_out, out);
      } else if (*rates_k) {
        const rates::RateProblem problem =
            io::problem_from_json(io::load_json_file(k_problem));
        const rates::Scheme scheme = k_scheme == "joint"
                                         ? rates::Scheme::joint
                                         : rates::Scheme::separation;
        const double k = rates::k_expansion(problem, k_n, k_eps, scheme);
        emit_json(json{{"n", k_n},
                       {"eps", k_eps},
                       {"scheme", k_scheme},
                       {"k", k},
                       {"k_floor", std::floor(k)}},
                  k_out, out);
      }
    } else if (*figures) {
      const double inf = std::numeric_limits<double>::infinity();
      if (fig_preset == "psi") {
        const std::vector<std::pair<std::string, double>> arms = {
            {"v3_0", 0.0},     {"v3_1over9", 1.0 / 9.0}, {"v3_1", 1.0},
            {"v3_4", 4.0},     {"v3_25", 25.0},          {"v3_625", 625.0},
            {"v3_inf", inf}};
        CsvWriter csv(fig_out, config_echo, nullptr);
        std::vector<std::string> cols = {"r"};
        for (const auto& arm : arms) cols.push_back(arm.first);
        csv.header(cols);
        for (double r : grid_points("-6:6:0.05")) {
          std::vector<double> vals = {r};
          for (const auto& arm : arms) {
            vals.push_back(dists::switched_cdf({1.0, 1.0, arm.second}, r));
          }
          csv.row(vals);
        }
      } else if (fig_preset == "sandwich") {
        CsvWriter csv(fig_out, config_echo, nullptr);
        csv.header({"r", "lower_gaussian", "star_199_001", "star_19_01",
                    "star_15_05", "upper_envelope"});
        for (double r : grid_points("-6:0:0.025")) {
          const double wide = dists::gaussian_cdf(4.0, r);
          csv.row({r, dists::gaussian_cdf(2.0, r),
                   dists::star_cdf({1.99, 0.01}, r),
                   dists::star_cdf({1.9, 0.1}, r),
                   dists::star_cdf({1.5, 0.5}, r),
                   2.0 * wide - wide * wide});
        }
      } else {
        rates::RateProblem a, b;
        a.source = {1.0, 1.0};
        a.channel = {rates::ChannelKind::dmc, 1.0, 0.0, 10.0, 0.1};
        b.source = {1.0, 1.0};
        b.channel = {rates::ChannelKind::dmc, 1.0, 0.0, 1.5, 0.5};
        CsvWriter csv(fig_out, config_echo, nullptr);
        csv.header({"r", "joint_wide", "kv_wide", "ratio_wide", "joint_mild",
                    "kv_mild", "ratio_mild", "ratio_bound"});
        for (double r : grid_points("-6:6:0.05")) {
          const double ja = rates::joint_dmc_error(a, r);
          const double ka = rates::kv_bound(a, r);
          const double jb = rates::joint_dmc_error(b, r);
          const double kb = rates::kv_bound(b, r);
          csv.row({r, ja, ka, ka / ja, jb, kb, kb / jb,
                   rates::kv_ratio_upper(a, r)});
        }
      }
    } else if (*sim) {
      if (*sim_clt) {
        const markov::NonHiddenChain chain =
            io::pair_chain_from_json(io::load_json_file(clt_chain));
        const std::vector<double> xs = lab::sample_info_density(
            chain, clt_n, clt_samples, clt_seed, clt_workers);
        const double v = markov::varentropy_rate(chain);
        double mean = 0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(xs.size());
        json o = mc_echo(clt_n, clt_samples, clt_seed, clt_workers);
        o["mean"] = mean;
        o["variance"] = var;
        o["varentropy"] = v;
        if (v > 0) {
          double ks = 0;
          const double n = static_cast<double>(xs.size());
          for (std::size_t i = 0; i < xs.size(); ++i) {
            const double f = dists::gaussian_cdf(v, xs[i]);
            ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
            ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
          }
          o["ks_gaussian"] = ks;
        } else {
          o["ks_gaussian"] = nullptr;
        }
        if (!clt_dump.empty()) {
          CsvWriter csv(clt_dump, config_echo, &clt_seed);
          csv.header({"sample"});
          for (double x : xs) csv.row({x});
        }
        emit_json(o, clt_out, out);
      } else if (*sim_bounds) {
        const markov::TransitionMatrix source =
            io::chain_from_json(io::load_json_file(bounds_source));
        const markov::NonHiddenChain noise =
            io::pair_chain_from_json(io::load_json_file(bounds_noise));
        const lab::BoundPair pair =
            lab::ca_bound_pair(source, noise, bounds_k, bounds_n,
                               bounds_samples, bounds_seed, bounds_workers);
        json o = mc_echo(bounds_n, bounds_samples, bounds_seed,
                         bounds_workers);
        o["k"] = bounds_k;
        o["achievability"] = json{{"value", pair.achievability.value},
                                  {"half_width", pair.achievability.half_width}};
        o["converse"] = json{{"value", pair.converse.value},
                             {"half_width", pair.converse.half_width}};
        emit_json(o, bounds_out, out);
      } else if (*sim_two) {
        const markov::TransitionMatrix source =
            io::chain_from_json(io::load_json_file(two_source));
        const dmc::DmcChannel channel =
            io::dmc_from_json(io::load_json_file(two_channel));
        const lab::TwoRegimeResult res = lab::two_regime_estimate(
            source, channel, two_offset, two_n, two_samples, two_seed,
            two_workers);
        const rates::RateProblem problem =
            dmc_problem(markov::as_non_hidden(source), channel);
        json o = mc_echo(two_n, two_samples, two_seed, two_workers);
        o["offset"] = two_offset;
        o["k"] = res.k;
        o["value"] = res.value;
        o["half_width"] = res.half_width;
        o["predicted"] = rates::joint_dmc_error(problem, two_offset);
        emit_json(o, two_out, out);
      } else if (*sim_single) {
        const json j = io::load_json_file(single_instance);
        lab::SingleShotInstance inst;
        inst.p_m = vec_from_json(need_key(j, "p_m", "instance"), "p_m");
        inst.channel.w = io::dmc_from_json(j).w;
        const lab::SingleShotCode code = lab::exact_single_shot_code(inst);
        json o{{"exact", code.error}, {"encoder", code.encoder}};
        if (single_c_opt->count()) {
          Eigen::VectorXd p_x;
          if (j.contains("p_x")) {
            p_x = vec_from_json(j.at("p_x"), "p_x");
          } else {
            p_x = Eigen::VectorXd::Constant(
                inst.channel.num_inputs(),
                1.0 / static_cast<double>(inst.channel.num_inputs()));
          }
          Eigen::VectorXd q_y;
          if (j.contains("q_y")) {
            q_y = vec_from_json(j.at("q_y"), "q_y");
          } else {
            q_y = dmc::output_distribution(p_x, inst.channel);
          }
          o["threshold"] = single_c;
          o["achievability"] = lab::achievability_rhs(inst, p_x, single_c);
          o["converse"] =
              lab::converse_rhs(inst, code.encoder, q_y, single_c);
        }
        emit_json(o, single_out, out);
      } else if (*sim_sep) {
        const json j = io::load_json_file(sep_scheme);
        lab::SeparationScheme scheme;
        scheme.p_m = vec_from_json(need_key(j, "p_m", "scheme"), "p_m");
        scheme.source_enc =
            ivec_from_json(need_key(j, "source_enc", "scheme"), "source_enc");
        scheme.source_dec =
            ivec_from_json(need_key(j, "source_dec", "scheme"), "source_dec");
        scheme.channel.w = io::dmc_from_json(j).w;
        scheme.channel_enc = ivec_from_json(
            need_key(j, "channel_enc", "scheme"), "channel_enc");
        scheme.channel_dec = ivec_from_json(
            need_key(j, "channel_dec", "scheme"), "channel_dec");
        const lab::SeparationCheck chk = lab::separation_product_check(scheme);
        emit_json(json{{"averaged", chk.averaged},
                       {"product", chk.product},
                       {"difference", chk.averaged - chk.product},
                       {"p_source", chk.p_source},
                       {"p_channel", chk.p_channel}},
                  sep_out, out);
      }
    }
    return 0;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace jscc::cli
