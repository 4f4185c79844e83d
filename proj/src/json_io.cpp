#include "covo/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "covo/rng.hpp"
#include "covo/version.hpp"

namespace covo {

namespace {

std::vector<std::int32_t> int_vec(const Json& j) {
  std::vector<std::int32_t> out;
  for (const auto& v : j) out.push_back(v.get<std::int32_t>());
  return out;
}

// Shift coordinates arrive as reals; they must sit on the 1/n grid.
Shift shift_from_reals(const Json& j, std::int64_t n) {
  std::vector<Rat> coords;
  for (const auto& v : j) {
    const double y = v.get<double>();
    const double scaled = y * static_cast<double>(n);
    const double rounded = std::nearbyint(scaled);
    if (std::abs(scaled - rounded) > 1e-9) {
      throw std::runtime_error(
          "shift coordinate " + std::to_string(y) +
          " is not a multiple of 1/" + std::to_string(n) +
          "; refine the resolution");
    }
    coords.push_back(Rat(static_cast<std::int64_t>(rounded), n));
  }
  return Shift(std::move(coords));
}

Json shift_to_json(const Shift& y) {
  Json out = Json::array();
  for (int i = 0; i < y.dim(); ++i) out.push_back(y.value(i));
  return out;
}

}  // namespace

Json window_to_json(const Window& w) {
  Json out;
  out["n"] = w.resolution();
  if (w.boxes().size() == 1) {
    out["lo"] = w.boxes().front().lo;
    out["hi"] = w.boxes().front().hi;
  } else {
    Json boxes = Json::array();
    for (const Box& b : w.boxes()) {
      boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});
    }
    out["boxes"] = boxes;
    out["d"] = w.dim();
  }
  return out;
}

Window window_from_json(const Json& j) {
  const std::int64_t n = j.at("n").get<std::int64_t>();
  if (j.contains("lo")) {
    return Window::box(n, int_vec(j.at("lo")), int_vec(j.at("hi")));
  }
  std::vector<Box> boxes;
  for (const auto& b : j.at("boxes")) {
    boxes.push_back(Box{int_vec(b.at("lo")), int_vec(b.at("hi"))});
  }
  const int d = j.contains("d") ? j.at("d").get<int>()
                                : static_cast<int>(boxes.at(0).lo.size());
  return Window(d, n, std::move(boxes));
}

Json functional_to_json(const Functional& g) {
  Json out;
  out["c"] = g.constant();
  out["n"] = g.resolution();
  out["d"] = g.dim();
  Json terms = Json::array();
  for (const FunctionalTerm& t : g.terms()) {
    Json jt;
    jt["a"] = t.coefficient;
    jt["y"] = shift_to_json(t.shift);
    jt["W"] = window_to_json(t.window);
    terms.push_back(jt);
  }
  out["terms"] = terms;
  return out;
}

Functional functional_from_json(const Json& j) {
  const std::int64_t n = j.at("n").get<std::int64_t>();
  const double c = j.value("c", 0.0);
  std::vector<FunctionalTerm> terms;
  int dim = j.value("d", 0);
  for (const auto& jt : j.at("terms")) {
    FunctionalTerm t;
    t.coefficient = jt.at("a").get<double>();
    t.window = window_from_json(jt.at("W"));
    if (t.window.resolution() != n) {
      throw std::runtime_error("term window resolution differs from functional n");
    }
    t.shift = shift_from_reals(jt.at("y"), n);
    if (dim == 0) dim = t.window.dim();
    terms.push_back(std::move(t));
  }
  if (dim == 0) throw std::runtime_error("functional needs 'd' or at least one term");
  return Functional(dim, n, c, std::move(terms));
}

Json realisability_report_to_json(const RealisabilityReport& rep,
                                  const S2Curve& s2) {
  Json out;
  out["verdict"] = rep.rejected ? "REJECTED" : "CONSISTENT";
  out["notes"] = rep.notes;
  out["probe_families"] = rep.probe_families;
  out["probes_evaluated"] = rep.probes_evaluated;
  out["per_s_lower_bound"] = rep.per_s_lower_bound;

  Json lips = Json::array();
  for (const LipschitzAtZero& l : rep.lipschitz) {
    lips.push_back({{"sup_quotient", l.sup_quotient},
                    {"smallest_t_quotient", l.smallest_t_quotient},
                    {"smallest_t", l.smallest_t},
                    {"unbounded", l.unbounded}});
  }
  out["lipschitz"] = lips;

  Json scales = Json::array();
  for (const ProbeScale& s : rep.scales_tested) {
    scales.push_back({{"n", s.n}, {"window", window_to_json(s.window)}});
  }
  out["scales_tested"] = scales;

  // The lattice scan can produce thousands of overlapping triples; the
  // report keeps the first few dozen and states the total.
  constexpr std::size_t kMaxListed = 32;
  out["witness_count"] =
      rep.lattice_violations.size() + rep.functional_witnesses.size();
  Json witnesses = Json::array();
  std::size_t listed = 0;
  for (const S2Violation& v : rep.lattice_violations) {
    if (listed++ >= kMaxListed) break;
    Json w;
    switch (v.kind) {
      case S2Violation::Kind::Range:
        w["kind"] = "range";
        break;
      case S2Violation::Kind::Evenness:
        w["kind"] = "evenness";
        break;
      case S2Violation::Kind::Triangle:
        w["kind"] = "triangle-bound";
        break;
    }
    Json y = Json::array(), z = Json::array(), d = Json::array();
    for (int i = 0; i < s2.dim(); ++i) {
      y.push_back(v.y[i] * s2.step());
      z.push_back(v.z[i] * s2.step());
      d.push_back((v.y[i] - v.z[i]) * s2.step());
    }
    w["y"] = y;
    if (v.kind != S2Violation::Kind::Range) {
      w["z"] = z;
      w["y_minus_z"] = d;
    }
    w["lhs"] = v.lhs;
    w["rhs"] = v.rhs;
    w["description"] = v.describe(s2.step(), s2.dim());
    witnesses.push_back(w);
  }
  for (const FunctionalWitness& fw : rep.functional_witnesses) {
    if (listed++ >= kMaxListed) break;
    Json w;
    w["kind"] = "functional-probe";
    w["family"] = fw.family;
    w["scale"] = {{"n", fw.scale.n}, {"window", window_to_json(fw.scale.window)}};
    w["functional"] = functional_to_json(fw.probe);
    w["min_value"] = fw.min_value;
    w["phi"] = fw.phi;
    witnesses.push_back(w);
  }
  out["witnesses"] = witnesses;
  return out;
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig cfg;
  cfg.type = j.at("type").get<std::string>();
  cfg.replicates = j.value("replicates", 1000u);
  cfg.step = j.value("step", 0.1);
  cfg.max_index = j.value("max_index", 20);
  const Json& grain = j.at("grain");
  const std::string kind = grain.at("kind").get<std::string>();
  const double param = grain.at("param").get<double>();
  if (cfg.type == "boolean1d") {
    cfg.model1d.lambda = j.at("lambda").get<double>();
    cfg.model1d.seed = j.value("seed", 1ull);
    if (kind == "fixed") {
      cfg.model1d.grain = GrainKind1D::FixedLength;
    } else if (kind == "exponential") {
      cfg.model1d.grain = GrainKind1D::ExponentialLength;
    } else {
      throw std::runtime_error("unknown 1-D grain kind '" + kind + "'");
    }
    cfg.model1d.grain_param = param;
  } else if (cfg.type == "boolean2d") {
    cfg.model2d.lambda = j.at("lambda").get<double>();
    cfg.model2d.seed = j.value("seed", 1ull);
    cfg.model2d.resolution = j.value("n", 16ll);
    if (kind == "square") {
      cfg.model2d.grain = GrainKind2D::Square;
    } else if (kind == "disk") {
      cfg.model2d.grain = GrainKind2D::Disk;
    } else {
      throw std::runtime_error("unknown 2-D grain kind '" + kind + "'");
    }
    cfg.model2d.grain_param = param;
  } else {
    throw std::runtime_error("unknown model type '" + cfg.type + "'");
  }
  return cfg;
}

Json model_config_to_json(const ModelConfig& cfg) {
  Json j;
  j["type"] = cfg.type;
  j["replicates"] = cfg.replicates;
  j["step"] = cfg.step;
  j["max_index"] = cfg.max_index;
  if (cfg.type == "boolean1d") {
    j["lambda"] = cfg.model1d.lambda;
    j["seed"] = cfg.model1d.seed;
    j["grain"] = {{"kind", cfg.model1d.grain == GrainKind1D::FixedLength
                               ? "fixed"
                               : "exponential"},
                  {"param", cfg.model1d.grain_param}};
  } else {
    j["lambda"] = cfg.model2d.lambda;
    j["seed"] = cfg.model2d.seed;
    j["n"] = cfg.model2d.resolution;
    j["grain"] = {
        {"kind", cfg.model2d.grain == GrainKind2D::Square ? "square" : "disk"},
        {"param", cfg.model2d.grain_param}};
  }
  return j;
}

Json make_manifest(const std::string& command, const Json& options) {
  Json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["rng"] = kRngName;
  m["command"] = command;
  m["options"] = options;
  return m;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot open");
  Json j;
  try {
    f >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << content;
}

}  // namespace covo
