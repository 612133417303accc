#include "ginv/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace ginv {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void dump_scalar(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::number_float: out += format_double(j.get<double>()); break;
    default: out += j.dump(); break;
  }
}

void dump_rec(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += Json(it.key()).dump();
      out += ": ";
      dump_rec(it.value(), indent + 2, out);
    }
    out += "\n" + close + "}";
    return;
  }
  if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    bool flat = true;
    for (const auto& e : j) flat = flat && scalar(e);
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        dump_scalar(j[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      dump_rec(j[i], indent + 2, out);
    }
    out += "\n" + close + "]";
    return;
  }
  dump_scalar(j, out);
}

double number(const Json& j, const char* what) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw ConfigError(std::string("expected a number for '") + what + "'");
  return j.get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

WeightKind weight_kind_from(std::string_view s) {
  for (WeightKind k : {WeightKind::zero, WeightKind::cerami, WeightKind::derived_from_map, WeightKind::custom}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown weight kind '" + std::string(s) + "'");
}

DivergenceStatus divergence_from(const Json& j) {
  DivergenceStatus s;
  const std::string state = field(j, "state").get<std::string>();
  bool known = false;
  for (auto st : {DivergenceStatus::State::proved, DivergenceStatus::State::not_falsified,
                  DivergenceStatus::State::falsified}) {
    if (to_string(st) == state) {
      s.state = st;
      known = true;
    }
  }
  if (!known) throw ConfigError("unknown divergence state '" + state + "'");
  if (j.contains("radius")) s.radius = number(j.at("radius"), "radius");
  return s;
}

Json divergence_json(const DivergenceStatus& s) {
  Json j;
  j["state"] = to_string(s.state);
  j["radius"] = s.radius;
  return j;
}

bool agrees(double stored, double recomputed) {
  if (std::isnan(stored) && std::isnan(recomputed)) return true;
  return std::abs(stored - recomputed) <= 1e-9 * std::max(1.0, std::abs(stored));
}

struct ReplayContext {
  std::optional<MapUnderTest> map;
  std::optional<Vec> target;
  std::optional<Weight> weight;
};

bool is_sequence(const Json& j) {
  return j.is_object() && j.contains("points") && j.contains("f_values") && j.contains("weighted_criticalities") &&
         j.contains("level") && j.contains("classification");
}

void replay_rec(const Json& j, ReplayContext ctx, const std::string& path, ReplayResult& r) {
  if (!r.ok) return;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size() && r.ok; ++i) replay_rec(j[i], ctx, path + "/" + std::to_string(i), r);
    return;
  }
  if (!j.is_object()) return;
  if (j.contains("map") && j.at("map").is_string()) ctx.map = make_map(j.at("map").get<std::string>());
  if (j.contains("target") && j.at("target").is_array()) ctx.target = vec_from_json(j.at("target"));
  if (j.contains("weight") && j.at("weight").is_object()) ctx.weight = weight_from_json(j.at("weight"));

  auto fail = [&](std::ptrdiff_t index, double stored, double recomputed, std::string msg) {
    r.ok = false;
    r.path = path;
    r.index = index;
    r.stored = stored;
    r.recomputed = recomputed;
    r.message = std::move(msg);
  };

  if (is_sequence(j)) {
    if (!ctx.map || !ctx.target || !ctx.weight) throw ConfigError("sequence witness at " + path + " lacks map, target or weight");
    const CriticalSequenceWitness w = witness_from_json(j);
    const TargetFunctional F(*ctx.map, *ctx.target);
    for (std::size_t i = 0; i < w.points.size(); ++i) {
      const double f = F.value(w.points[i]);
      const double wc = weighted_criticality(F, *ctx.weight, w.points[i]);
      r.checked += 2;
      if (!agrees(w.f_values[i], f)) return fail(static_cast<std::ptrdiff_t>(i), w.f_values[i], f, "f_values");
      if (!agrees(w.weighted_criticalities[i], wc)) {
        return fail(static_cast<std::ptrdiff_t>(i), w.weighted_criticalities[i], wc, "weighted_criticalities");
      }
    }
    return;
  }
  if (j.contains("kind") && j.at("kind") == "probes") {
    if (!ctx.map) throw ConfigError("probe witness at " + path + " lacks a map");
    const Json& probes = field(j, "probes");
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Json& pj = probes[i];
      Probe p;
      p.quantity = field(pj, "quantity").get<std::string>();
      p.x = vec_from_json(field(pj, "x"));
      if (pj.contains("u")) p.u = vec_from_json(pj.at("u"));
      if (pj.contains("y")) p.y = vec_from_json(pj.at("y"));
      p.value = number(field(pj, "value"), "value");
      const double v = evaluate_probe(*ctx.map, p);
      ++r.checked;
      if (!agrees(p.value, v)) return fail(static_cast<std::ptrdiff_t>(i), p.value, v, "probe " + p.quantity);
    }
    return;
  }
  for (auto it = j.begin(); it != j.end() && r.ok; ++it) {
    if (it.key() == "config") continue;
    replay_rec(it.value(), ctx, path + "/" + it.key(), r);
  }
}

std::string tri_string(Tri t) { return std::string(to_string(t)); }

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_rec(j, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Vec& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], "vector entry");
  return v;
}

Json to_json(const CriticalSequenceWitness& w) {
  Json j;
  Json pts = Json::array();
  for (const Vec& p : w.points) pts.push_back(to_json(p));
  j["points"] = std::move(pts);
  j["f_values"] = w.f_values;
  j["weighted_criticalities"] = w.weighted_criticalities;
  j["level"] = w.level;
  j["classification"] = to_string(w.classification);
  return j;
}

CriticalSequenceWitness witness_from_json(const Json& j) {
  CriticalSequenceWitness w;
  for (const auto& p : field(j, "points")) w.points.push_back(vec_from_json(p));
  for (const auto& v : field(j, "f_values")) w.f_values.push_back(number(v, "f_values"));
  for (const auto& v : field(j, "weighted_criticalities")) w.weighted_criticalities.push_back(number(v, "weighted_criticalities"));
  if (w.points.size() != w.f_values.size() || w.points.size() != w.weighted_criticalities.size()) {
    throw ConfigError("witness lists differ in length");
  }
  w.level = number(field(j, "level"), "level");
  const auto c = classification_from_string(field(j, "classification").get<std::string>());
  if (!c) throw ConfigError("unknown witness classification");
  w.classification = *c;
  return w;
}

Json to_json(const Weight& w) {
  Json j;
  j["kind"] = to_string(w.kind());
  if (w.kind() != WeightKind::zero && w.kind() != WeightKind::cerami) {
    Json grid = Json::array();
    for (std::size_t i = 0; i < w.grid_rho().size(); ++i) grid.push_back(Json::array({w.grid_rho()[i], w.grid_h()[i]}));
    j["grid"] = std::move(grid);
  }
  j["divergence_status"] = divergence_json(w.divergence());
  return j;
}

Weight weight_from_json(const Json& j) {
  const WeightKind kind = weight_kind_from(field(j, "kind").get<std::string>());
  if (kind == WeightKind::zero) return Weight::zero();
  if (kind == WeightKind::cerami) return Weight::cerami();
  std::vector<double> rho, h;
  for (const auto& row : field(j, "grid")) {
    if (!row.is_array() || row.size() != 2) throw ConfigError("weight grid rows must be [rho, h]");
    rho.push_back(number(row[0], "rho"));
    h.push_back(number(row[1], "h"));
  }
  DivergenceStatus status{DivergenceStatus::State::not_falsified, rho.empty() ? 0.0 : rho.back()};
  if (j.contains("divergence_status")) status = divergence_from(j.at("divergence_status"));
  return Weight::tabulated(kind, std::move(rho), std::move(h), status);
}

Json to_json(const Probe& p) {
  Json j;
  j["quantity"] = p.quantity;
  j["x"] = to_json(p.x);
  if (p.u) j["u"] = to_json(*p.u);
  if (p.y) j["y"] = to_json(*p.y);
  j["value"] = p.value;
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["status"] = to_string(v.status);
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (!v.parts.empty()) {
    Json parts;
    for (const auto& [k, s] : v.parts) parts[k] = to_string(s);
    j["parts"] = std::move(parts);
  }
  Json metrics = Json::object();
  for (const auto& [k, m] : v.metrics) metrics[k] = m;
  j["metrics"] = std::move(metrics);
  if (v.sequence) {
    Json w;
    w["kind"] = "sequence";
    w["label"] = v.sequence->label;
    w["target"] = to_json(v.sequence->target);
    w["weight"] = to_json(v.sequence->weight);
    w["sequence"] = to_json(v.sequence->witness);
    j["witness"] = std::move(w);
  } else if (!v.probes.empty()) {
    Json w;
    w["kind"] = "probes";
    Json probes = Json::array();
    for (const auto& p : v.probes) probes.push_back(to_json(p));
    w["probes"] = std::move(probes);
    j["witness"] = std::move(w);
  }
  return j;
}

Json to_json(const HadamardProfile& p) {
  Json rows = Json::array();
  for (const auto& r : p.rows) rows.push_back(Json::array({r.rho, r.inf_estimate, r.varrho}));
  Json j;
  j["columns"] = Json::array({"rho", "inf_estimate", "varrho"});
  j["rows"] = std::move(rows);
  j["samples"] = p.samples;
  return j;
}

Json to_json(const CriteriaReport& r) {
  Json j;
  j["map"] = r.map_name;
  Json verdicts = Json::object();
  for (Condition c : kChainOrder) {
    if (r[c]) verdicts[std::string(condition_key(c))] = to_json(*r[c]);
  }
  j["verdicts"] = std::move(verdicts);
  Json sampling;
  sampling["radius"] = r.radius;
  sampling["samples"] = r.samples;
  sampling["seed"] = r.seed;
  j["sampling"] = std::move(sampling);
  j["derived_weight"] = r.derived_weight ? to_json(*r.derived_weight) : Json(nullptr);
  j["star_weight"] = r.star_weight ? to_json(*r.star_weight) : Json(nullptr);
  j["profile"] = r.profile ? to_json(*r.profile) : Json(nullptr);
  Json notes = Json::array();
  for (const auto& n : r.review_notes) {
    notes.push_back(Json{{"falsified", condition_key(n.falsified)}, {"certified", condition_key(n.certified)}});
  }
  j["review_notes"] = std::move(notes);
  return j;
}

Json to_json(const Anomaly& a) {
  return Json{{"map", a.map},
              {"upstream", condition_key(a.upstream)},
              {"downstream", condition_key(a.downstream)},
              {"kind", a.kind}};
}

Json to_json(const MinimizeResult& r) {
  Json j;
  j["start"] = to_json(r.witness.points.front());
  j["witness"] = to_json(r.witness);
  j["final_point"] = to_json(r.final_point);
  j["final_value"] = r.final_value;
  j["final_weighted_criticality"] = r.final_weighted_criticality;
  j["iterations"] = r.iterations;
  j["diagnostic"] = r.diagnostic;
  return j;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["solution"] = r.solution ? to_json(*r.solution) : Json(nullptr);
  j["solved_start"] = r.solution ? Json(r.solved_start) : Json(nullptr);
  j["contradicts_local_diffeomorphism"] = r.contradicts_local_diffeomorphism;
  j["all_escaped"] = r.all_escaped();
  Json runs = Json::array();
  for (const auto& run : r.runs) runs.push_back(to_json(run));
  j["runs"] = std::move(runs);
  return j;
}

Json to_json(const MountainPassGeometry& g) {
  return Json{{"u", to_json(g.base)}, {"e", to_json(g.offset)}, {"r", g.radius}, {"alpha", g.alpha}, {"rho", g.rho}};
}

Json to_json(const InjectivityVerdict& v) {
  Json j;
  j["two_preimages_found"] = v.two_preimages_found;
  Json pre = Json::array();
  for (const Vec& p : v.preimages) pre.push_back(to_json(p));
  j["preimages"] = std::move(pre);
  j["geometry"] = v.geometry ? to_json(*v.geometry) : Json(nullptr);
  if (v.margin) {
    j["sphere_margin"] = Json{{"min_value", v.margin->min_value}, {"margin", v.margin->margin}, {"probes", v.margin->probes}};
  } else {
    j["sphere_margin"] = nullptr;
  }
  if (v.band) {
    Json b;
    b["witness"] = to_json(v.band->witness);
    b["final_level"] = v.band->level_history.empty() ? v.band->witness.level : v.band->level_history.back();
    b["iterations"] = v.band->level_history.size();
    b["reparametrizations"] = v.band->reparametrizations;
    b["rejected_reparametrizations"] = v.band->rejected_reparametrizations;
    j["band"] = std::move(b);
  } else {
    j["band"] = nullptr;
  }
  j["solves"] = to_json(v.solves);
  return j;
}

Json to_json(const GridVerdict& v) {
  Json j;
  j["box"] = Json{{"radius", v.radius}, {"dim", v.dim}};
  j["resolution"] = v.resolution;
  j["injective_on_box"] = v.injective_on_box;
  if (v.collision) {
    j["collision"] = Json{{"a", to_json(v.collision->a)},
                          {"b", to_json(v.collision->b)},
                          {"f_a", to_json(v.collision->fa)},
                          {"f_b", to_json(v.collision->fb)}};
  } else {
    j["collision"] = nullptr;
  }
  j["covered_targets"] = v.covered_targets;
  j["min_f_norm_on_boundary"] = v.min_f_norm_on_boundary;
  j["max_image_tol"] = v.max_image_tol;
  return j;
}

Json to_json(const Truth& t) {
  Json j;
  j["injective"] = tri_string(t.injective);
  j["surjective"] = tri_string(t.surjective);
  j["norm_coercive"] = tri_string(t.norm_coercive);
  for (Condition c : kChainOrder) j[std::string(condition_key(c))] = tri_string(t[c]);
  return j;
}

Json gallery_json() {
  Json arr = Json::array();
  for (const auto& e : register_gallery()) {
    arr.push_back(Json{{"name", e.map.name}, {"dim", e.map.dim}, {"truth", to_json(e.truth)}, {"rationale", e.rationale}});
  }
  return arr;
}

ReplayResult replay(const Json& report) {
  if (!report.is_object()) throw ConfigError("report must be a JSON object");
  if (!report.contains("schema_version") || report.at("schema_version") != kSchemaVersion) {
    throw ConfigError("unsupported or missing schema_version");
  }
  ReplayResult r;
  replay_rec(report, {}, "", r);
  return r;
}

void write_profile_csv(std::ostream& out, const HadamardProfile& p) {
  out << "rho,inf_estimate,varrho\n";
  for (const auto& r : p.rows) {
    out << format_double(r.rho) << ',' << format_double(r.inf_estimate) << ',' << format_double(r.varrho) << '\n';
  }
}

void write_witness_csv(std::ostream& out, const CriticalSequenceWitness& w) {
  const Eigen::Index n = w.points.empty() ? 0 : w.points.front().size();
  out << "index";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  out << ",f_value,weighted_criticality\n";
  for (std::size_t k = 0; k < w.points.size(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(w.points[k][i]);
    out << ',' << format_double(w.f_values[k]) << ',' << format_double(w.weighted_criticalities[k]) << '\n';
  }
}

}  // namespace ginv
