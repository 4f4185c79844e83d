#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "covo/covariogram.hpp"
#include "covo/grid.hpp"
#include "covo/json_io.hpp"
#include "covo/models.hpp"
#include "covo/polytope.hpp"
#include "covo/rng.hpp"
#include "covo/version.hpp"

namespace {

using namespace covo;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// "lo1,lo2:hi1,hi2" in real coordinates, pixel-aligned at resolution n.
Window parse_window_spec(const std::string& spec, int dim, std::int64_t n) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("window spec must be 'lo,..:hi,..', got '" + spec + "'");
  }
  auto parse_side = [&](const std::string& side) {
    std::vector<std::int32_t> out;
    std::istringstream ss(side);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const Rat r = Rat::parse(tok);
      const std::int64_t scaled = r.num * n;
      if (scaled % r.den != 0) {
        throw std::runtime_error("window bound " + tok +
                                 " is not a multiple of 1/" + std::to_string(n));
      }
      out.push_back(static_cast<std::int32_t>(scaled / r.den));
    }
    return out;
  };
  const std::vector<std::int32_t> lo = parse_side(spec.substr(0, colon));
  const std::vector<std::int32_t> hi = parse_side(spec.substr(colon + 1));
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim) {
    throw std::runtime_error("window spec has wrong dimension");
  }
  return Window::box(n, lo, hi);
}

// "lattice:K" (all grid shifts with |k_i| <= K) or "y1,y2;y3,y4;..".
std::vector<Shift> parse_shifts_spec(const std::string& spec, int dim,
                                     std::int64_t n) {
  std::vector<Shift> shifts;
  if (spec.rfind("lattice:", 0) == 0) {
    const std::int64_t K = std::stoll(spec.substr(8));
    std::vector<std::int64_t> k(static_cast<std::size_t>(dim), -K);
    while (true) {
      shifts.push_back(Shift::of_cells(k, n));
      int axis = 0;
      while (axis < dim) {
        const auto u = static_cast<std::size_t>(axis);
        ++k[u];
        if (k[u] <= K) break;
        k[u] = -K;
        ++axis;
      }
      if (axis == dim) break;
    }
    return shifts;
  }
  std::istringstream ss(spec);
  std::string group;
  while (std::getline(ss, group, ';')) {
    std::vector<Rat> coords;
    std::istringstream gs(group);
    std::string tok;
    while (std::getline(gs, tok, ',')) coords.push_back(Rat::parse(tok));
    if (static_cast<int>(coords.size()) != dim) {
      throw std::runtime_error("shift '" + group + "' has wrong dimension");
    }
    shifts.push_back(Shift(std::move(coords)));
  }
  return shifts;
}

void write_manifest(const std::string& output_path, const std::string& command,
                    const Json& options) {
  write_text_file(output_path + ".manifest.json",
                  dump_json(make_manifest(command, options)));
}

// S2 CSV: "y,value" or "y,estimate,stderr,R" with a header line.
S2Curve read_s2_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot open");
  std::string line;
  int line_no = 0;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  ++line_no;
  struct Row {
    double y, value;
    std::optional<double> se;
  };
  std::vector<Row> rows;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() < 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected at least 2 comma-separated fields");
    }
    try {
      Row r{std::stod(fields[0]), std::stod(fields[1]), std::nullopt};
      if (fields.size() >= 3 && !fields[2].empty()) r.se = std::stod(fields[2]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed number");
    }
  }
  if (rows.empty()) throw std::runtime_error(path + ": no samples");
  double step = 0.0;
  for (const Row& r : rows) {
    const double a = std::abs(r.y);
    if (a > 1e-12 && (step == 0.0 || a < step)) step = a;
  }
  if (step == 0.0) step = 1.0;
  S2Curve curve(1, step);
  for (const Row& r : rows) {
    const double idx_f = r.y / step;
    const double idx_r = std::nearbyint(idx_f);
    if (std::abs(idx_f - idx_r) > 1e-6) {
      throw std::runtime_error(path + ": sample y=" + fmt17(r.y) +
                               " is off the lattice of step " + fmt17(step));
    }
    curve.set_sample({static_cast<std::int32_t>(idx_r)}, r.value, r.se);
  }
  return curve;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
  return out;
}

int cmd_covariogram(const std::string& input, const std::string& window_file,
                    const std::string& window_spec, const std::string& shifts_spec,
                    const std::string& output) {
  const PixelSet a = read_rams1_file(input);
  Window w = Window::unit(a.dim(), a.resolution());
  if (!window_file.empty()) {
    w = read_win1_file(window_file);
  } else if (!window_spec.empty()) {
    w = parse_window_spec(window_spec, a.dim(), a.resolution());
  }
  const std::vector<Shift> shifts =
      parse_shifts_spec(shifts_spec, a.dim(), a.resolution());

  std::ostringstream csv;
  for (int i = 0; i < a.dim(); ++i) csv << "y_" << (i + 1) << ",";
  csv << "delta\n";
  for (const Shift& y : shifts) {
    for (int i = 0; i < a.dim(); ++i) csv << fmt17(y.value(i)) << ",";
    csv << fmt17(local_covariogram(a, y, w)) << "\n";
  }
  write_text_file(output, csv.str());
  write_manifest(output, "covariogram",
                 {{"input", input},
                  {"window_file", window_file},
                  {"window", window_spec},
                  {"shifts", shifts_spec},
                  {"output", output}});
  return 0;
}

int cmd_perimeter(const std::string& input, std::int64_t depth,
                  const std::string& output) {
  const PixelSet a = read_rams1_file(input);
  const WeightedPerimeterValue wp = weighted_perimeter(a);
  const std::int64_t p = depth > 0 ? depth : wp.m_star;
  const Window enclosing = Window::centered_cube(a.dim(), a.resolution(),
                                                 std::max(wp.m_star, p) + 1);
  const PerimeterValue pb = perimeter_B(a, enclosing);
  const GnpValue gnp = g_np(a, a.resolution(), p);
  const PixelSet clipped =
      restrict_to(a, Window::centered_cube(a.dim(), a.resolution(), p));
  const GnpValue gnp_clipped = g_np(clipped, a.resolution(), p);
  const double clip_lhs = std::abs(gnp.value - gnp_clipped.value);
  const double bound = E_np(a.resolution(), p, a.dim());

  Json rep;
  rep["per_B"] = pb.value;
  rep["per_B_beta"] = wp.value;
  rep["face_count_per_axis"] = pb.face_count_per_axis;
  rep["tail_remainder"] = wp.tail_remainder;
  rep["g_np"] = {{"value", gnp.value},
                 {"p", p},
                 {"tail_coefficient", gnp.tail_coefficient},
                 {"tail_remainder", gnp.tail_remainder}};
  rep["clipping_check"] = {{"lhs", clip_lhs},
                           {"E_np", bound},
                           {"holds", clip_lhs <= bound + 1e-12}};
  write_text_file(output, dump_json(rep));
  write_manifest(output, "perimeter",
                 {{"input", input}, {"depth", p}, {"output", output}});
  return 0;
}

int cmd_minimize(const std::string& input, std::uint64_t budget,
                 const std::string& output, const std::string& argmin_path) {
  const Functional g = functional_from_json(parse_json_file(input));
  const MinimizeResult m = minimize_functional(g, budget);
  Json rep;
  rep["min"] = m.value;
  rep["exact"] = m.exact;
  rep["evaluations"] = m.evaluations;
  Json cells = Json::array();
  for (const Cell& c : m.argmin.cells()) {
    Json cc = Json::array();
    for (int i = 0; i < m.argmin.dim(); ++i) cc.push_back(c[i]);
    cells.push_back(cc);
  }
  rep["argmin_cells"] = cells;
  write_text_file(output, dump_json(rep));
  if (!argmin_path.empty()) write_text_file(argmin_path, write_rams1(m.argmin));
  write_manifest(output, "minimize",
                 {{"input", input}, {"budget", budget}, {"output", output}});
  return 0;
}

S2Curve make_builtin_curve(const std::string& name, double lambda, double ell,
                           double step, std::int32_t max_index) {
  if (name == "boolean1d") {
    return boolean1d_closed_form_curve(lambda, ell, step, max_index);
  }
  if (name == "gaussian") {
    S2Curve curve(1, step);
    for (std::int32_t i = -max_index; i <= max_index; ++i) {
      curve.set_sample({i}, std::exp(-(i * step) * (i * step)));
    }
    curve.set_callback([](const std::vector<double>& y) {
      return std::exp(-y[0] * y[0]);
    });
    return curve;
  }
  if (name == "constant") {
    S2Curve curve(1, step);
    for (std::int32_t i = -max_index; i <= max_index; ++i) {
      curve.set_sample({i}, lambda);  // reuse --lambda as the constant level
    }
    curve.set_callback([lambda](const std::vector<double>&) { return lambda; });
    return curve;
  }
  throw std::runtime_error("unknown builtin curve '" + name + "'");
}

int run_check(const S2Curve& curve, const std::string& scales_spec,
              std::int64_t max_cells, double tolerance, std::uint64_t seed,
              std::uint64_t budget, const std::string& output,
              const Json& manifest_options) {
  RealisabilityOptions opts;
  opts.scales = default_scales(curve.dim(), parse_int_list(scales_spec), max_cells);
  opts.tolerance = tolerance;
  opts.probe_seed = seed;
  opts.budget = budget;
  opts.lattice.tolerance = tolerance;

  const RealisabilityReport rep = realisability_report(curve, opts);
  write_text_file(output, dump_json(realisability_report_to_json(rep, curve)));
  write_manifest(output, "check", manifest_options);
  return rep.rejected ? 2 : 0;
}

int cmd_simulate(const std::string& config_path, const std::string& prefix,
                 std::uint32_t replicates_override, std::uint64_t seed_override,
                 bool has_seed_override) {
  ModelConfig cfg = model_config_from_json(parse_json_file(config_path));
  if (replicates_override > 0) cfg.replicates = replicates_override;
  if (has_seed_override) {
    cfg.model1d.seed = seed_override;
    cfg.model2d.seed = seed_override;
  }
  if (cfg.type == "boolean1d") {
    const IntervalSet x = simulate(cfg.model1d, 0.0, 1.0, 0);
    write_text_file(prefix + ".realization.txt", write_ivls1(x));

    std::vector<std::int32_t> indices;
    for (std::int32_t i = -cfg.max_index; i <= cfg.max_index; ++i)
      indices.push_back(i);
    const S2Estimate est = estimate_specific_covariogram(
        cfg.model1d, cfg.step, indices, cfg.replicates);
    std::ostringstream csv;
    csv << "y,estimate,stderr,R\n";
    csv << "# rng=" << kRngName << " seed=" << cfg.model1d.seed << "\n";
    for (const Cell& idx : est.curve.indices()) {
      csv << fmt17(idx[0] * cfg.step) << "," << fmt17(est.curve.value_at_index(idx))
          << "," << fmt17(est.curve.stderr_at_index(idx)) << "," << cfg.replicates
          << "\n";
    }
    write_text_file(prefix + ".estimates.csv", csv.str());

    const EstimateStats per = estimate_specific_perimeter(cfg.model1d, cfg.replicates);
    Json perj;
    perj["rng"] = kRngName;
    perj["seed"] = cfg.model1d.seed;
    perj["per_s"] = {{"estimate", per.mean},
                     {"stderr", per.stderr_of_mean},
                     {"R", per.replicates}};
    perj["volume_fraction"] = {{"estimate", est.volume_fraction.mean},
                               {"stderr", est.volume_fraction.stderr_of_mean},
                               {"R", est.volume_fraction.replicates}};
    perj["truncation_bias_bound"] = cfg.model1d.truncation_bias_bound();
    write_text_file(prefix + ".perimeter.json", dump_json(perj));
  } else {
    const Window unit = Window::unit(2, cfg.model2d.resolution);
    const PixelSet x = simulate(cfg.model2d, unit, 0);
    write_text_file(prefix + ".realization.rams", write_rams1(x));
    const EstimateStats per = estimate_specific_perimeter(cfg.model2d, cfg.replicates);
    Json perj;
    perj["rng"] = kRngName;
    perj["seed"] = cfg.model2d.seed;
    perj["per_B_s_pixel"] = {{"estimate", per.mean},
                             {"stderr", per.stderr_of_mean},
                             {"R", per.replicates}};
    write_text_file(prefix + ".perimeter.json", dump_json(perj));
  }
  write_manifest(prefix, "simulate",
                 {{"config", model_config_to_json(cfg)}, {"output", prefix}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local covariograms, variational perimeters and covariogram "
               "realisability screening on pixel grids"};
  app.set_version_flag("--version", std::string(covo::kToolVersion));
  app.require_subcommand(1);

  // covariogram
  std::string cov_input, cov_window_file, cov_window, cov_shifts = "lattice:2",
              cov_output = "covariogram.csv";
  CLI::App* cov = app.add_subcommand("covariogram",
                                     "Tabulate delta_{y;W}(A) over shifts");
  cov->add_option("--input", cov_input, "RAMS1 pixel-set file")->required();
  cov->add_option("--window-file", cov_window_file, "WIN1 window file");
  cov->add_option("--window", cov_window, "inline window 'lo,..:hi,..' (real units)");
  cov->add_option("--shifts", cov_shifts, "'lattice:K' or 'y1,y2;y3,y4;..'");
  cov->add_option("--output", cov_output, "CSV output path");

  // perimeter
  std::string per_input, per_output = "perimeter.json";
  std::int64_t per_depth = 0;
  CLI::App* per = app.add_subcommand("perimeter",
                                     "Perimeter report (Per_B, Per_B^beta, g_np)");
  per->add_option("--input", per_input, "RAMS1 pixel-set file")->required();
  per->add_option("--depth", per_depth, "truncation depth p (default: enclosing)");
  per->add_option("--output", per_output, "JSON output path");

  // minimize
  std::string min_input, min_output = "minimize.json", min_argmin;
  std::uint64_t min_budget = 1ULL << 24;
  CLI::App* mini = app.add_subcommand("minimize",
                                      "Exact minimization of a covariogram functional");
  mini->add_option("--input", min_input, "functional JSON file")->required();
  mini->add_option("--budget", min_budget, "max evaluated subsets");
  mini->add_option("--output", min_output, "JSON output path");
  mini->add_option("--argmin", min_argmin, "write the argmin as RAMS1");

  // check
  std::string chk_input, chk_curve, chk_scales = "1,2,3",
              chk_output = "report.json";
  double chk_lambda = 1.0, chk_ell = 1.0, chk_step = 1.0 / 60.0, chk_tol = 1e-9;
  std::int32_t chk_max_index = 720;
  std::int64_t chk_max_cells = 12;
  std::uint64_t chk_seed = 7, chk_budget = 1ULL << 24;
  CLI::App* chk = app.add_subcommand("check",
                                     "Screen an S2 curve for realisability "
                                     "necessary conditions (exit 2 = rejected)");
  chk->add_option("--input", chk_input, "S2 CSV file (y,value[,stderr,R])");
  chk->add_option("--curve", chk_curve, "builtin curve: boolean1d|gaussian|constant");
  chk->add_option("--lambda", chk_lambda, "builtin curve intensity / level");
  chk->add_option("--ell", chk_ell, "builtin curve grain length");
  chk->add_option("--step", chk_step, "builtin curve lattice step");
  chk->add_option("--max-index", chk_max_index, "builtin curve lattice half-width");
  chk->add_option("--scales", chk_scales, "comma-separated probe resolutions");
  chk->add_option("--max-window-cells", chk_max_cells, "probe window size cap");
  chk->add_option("--tolerance", chk_tol, "probe comparison tolerance");
  chk->add_option("--seed", chk_seed, "probe stream seed");
  chk->add_option("--budget", chk_budget, "enumeration budget per probe");
  chk->add_option("--output", chk_output, "JSON report path");

  // simulate
  std::string sim_config, sim_output = "sim";
  std::uint32_t sim_replicates = 0;
  std::uint64_t sim_seed = 0;
  CLI::App* sim = app.add_subcommand("simulate",
                                     "Boolean-model realization + estimates");
  sim->add_option("--config", sim_config, "model config JSON")->required();
  sim->add_option("--output", sim_output, "output path prefix");
  sim->add_option("--replicates", sim_replicates,
                  "override the config's replicate count");
  CLI::Option* sim_seed_opt =
      sim->add_option("--seed", sim_seed, "override the config's seed");

  // report: screening of an estimated curve (stderr-aware slack)
  std::string repin, rep_scales = "1,2", rep_output = "report.json";
  double rep_tol = 1e-9;
  std::int64_t rep_max_cells = 12;
  std::uint64_t rep_seed = 7, rep_budget = 1ULL << 24;
  CLI::App* repc = app.add_subcommand("report",
                                      "Screen a Monte Carlo estimate CSV "
                                      "(exit 2 = rejected)");
  repc->add_option("--input", repin, "estimates CSV (y,estimate,stderr,R)")
      ->required();
  repc->add_option("--scales", rep_scales, "comma-separated probe resolutions");
  repc->add_option("--max-window-cells", rep_max_cells, "probe window size cap");
  repc->add_option("--tolerance", rep_tol, "probe comparison tolerance");
  repc->add_option("--seed", rep_seed, "probe stream seed");
  repc->add_option("--budget", rep_budget, "enumeration budget per probe");
  repc->add_option("--output", rep_output, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cov->parsed()) {
      return cmd_covariogram(cov_input, cov_window_file, cov_window, cov_shifts,
                             cov_output);
    }
    if (per->parsed()) return cmd_perimeter(per_input, per_depth, per_output);
    if (mini->parsed()) {
      return cmd_minimize(min_input, min_budget, min_output, min_argmin);
    }
    if (chk->parsed()) {
      S2Curve curve = chk_curve.empty()
                          ? read_s2_csv(chk_input)
                          : make_builtin_curve(chk_curve, chk_lambda, chk_ell,
                                               chk_step, chk_max_index);
      return run_check(curve, chk_scales, chk_max_cells, chk_tol, chk_seed,
                       chk_budget, chk_output,
                       {{"input", chk_input},
                        {"curve", chk_curve},
                        {"lambda", chk_lambda},
                        {"ell", chk_ell},
                        {"step", chk_step},
                        {"scales", chk_scales},
                        {"max_window_cells", chk_max_cells},
                        {"tolerance", chk_tol},
                        {"seed", chk_seed},
                        {"budget", chk_budget},
                        {"output", chk_output}});
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_config, sim_output, sim_replicates, sim_seed,
                          sim_seed_opt->count() > 0);
    }
    if (repc->parsed()) {
      const S2Curve curve = read_s2_csv(repin);
      return run_check(curve, rep_scales, rep_max_cells, rep_tol, rep_seed,
                       rep_budget, rep_output,
                       {{"input", repin},
                        {"scales", rep_scales},
                        {"max_window_cells", rep_max_cells},
                        {"tolerance", rep_tol},
                        {"seed", rep_seed},
                        {"budget", rep_budget},
                        {"output", rep_output}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
