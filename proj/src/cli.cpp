#include "ginv/cli.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ginv {

namespace {

struct Table {
  std::string suffix;
  std::string content;
};

struct Output {
  Json report;
  std::vector<Table> tables;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r");
  return std::string(s.substr(b, e - b + 1));
}

double effective_radius(const RunConfig& cfg, const MapUnderTest& map) {
  return cfg.radius > 0.0 ? cfg.radius : map.domain_radius;
}

Weight load_weight(const RunConfig& cfg, const MapUnderTest& map, std::string_view fallback) {
  const std::string spec = cfg.weight.empty() ? std::string(fallback) : cfg.weight;
  if (spec == "zero") return Weight::zero();
  if (spec == "cerami") return Weight::cerami();
  if (spec == "derived") {
    const double R = effective_radius(cfg, map);
    return derive_weight(map, cfg.r_max > 0.0 ? cfg.r_max : 2.0 * R, cfg.shells, cfg.per_shell, cfg.seed,
                         cfg.serial ? Exec::serial : Exec::parallel);
  }
  std::ifstream in(spec);
  if (!in) throw ConfigError("cannot read weight file '" + spec + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("weight file '" + spec + "' is not valid JSON: " + e.what());
  }
  Weight w = weight_from_json(j);
  if (w.kind() == WeightKind::derived_from_map) return w;
  return Weight::tabulated(WeightKind::custom, w.grid_rho(), w.grid_h(), w.divergence());
}

MapUnderTest load_map(const RunConfig& cfg) {
  if (cfg.map.empty()) throw ConfigError("--map is required for '" + cfg.command + "'");
  return make_map(cfg.map);
}

Vec require_target(const RunConfig& cfg, const MapUnderTest& map) {
  if (!cfg.target) throw ConfigError("--target is required for '" + cfg.command + "'");
  if (cfg.target->size() != map.dim) throw ConfigError("target dimension does not match the map");
  return *cfg.target;
}

std::vector<Vec> effective_starts(const RunConfig& cfg, const MapUnderTest& map, bool spread) {
  for (const Vec& s : cfg.starts) {
    if (s.size() != map.dim) throw ConfigError("start dimension does not match the map");
  }
  if (!cfg.starts.empty()) return cfg.starts;
  std::vector<Vec> starts{Vec::Zero(map.dim)};
  if (spread) {
    for (double s : {6.0, -6.0}) {
      Vec p = Vec::Zero(map.dim);
      p[map.dim - 1] = s;
      starts.push_back(p);
    }
  }
  return starts;
}

DescentConfig descent_config(const RunConfig& cfg, const MapUnderTest& map) {
  DescentConfig d;
  d.residual_tol = cfg.tol_residual;
  d.max_iters = cfg.max_iters;
  d.escape_norm = cfg.escape_norm > 0.0 ? cfg.escape_norm : 2.0 * effective_radius(cfg, map);
  d.validate();
  return d;
}

std::string csv(const CriticalSequenceWitness& w) {
  std::ostringstream s;
  write_witness_csv(s, w);
  return s.str();
}

std::string csv(const HadamardProfile& p) {
  std::ostringstream s;
  write_profile_csv(s, p);
  return s.str();
}

CriteriaOptions criteria_options(const RunConfig& cfg) {
  CriteriaOptions o;
  o.radius = cfg.radius;
  o.samples = cfg.samples;
  o.seed = cfg.seed;
  o.profile_radius = cfg.r_max;
  o.profile_shells = cfg.shells;
  o.profile_per_shell = cfg.per_shell;
  o.target = cfg.target;
  o.residual_tol = cfg.tol_residual;
  o.escape_norm = cfg.escape_norm;
  o.band_nodes = cfg.band_nodes;
  o.band_iterations = cfg.band_iterations;
  o.criteria = parse_criteria(cfg.criteria);
  o.exec = cfg.serial ? Exec::serial : Exec::parallel;
  const std::string w = cfg.weight.empty() ? "derived" : cfg.weight;
  if (w == "derived") {
    o.weight = WeightChoice::derived;
  } else if (w == "zero") {
    o.weight = WeightChoice::zero;
  } else if (w == "cerami") {
    o.weight = WeightChoice::cerami;
  }
  return o;
}

Output solve_command(const RunConfig& cfg) {
  const MapUnderTest map = load_map(cfg);
  const Vec y = require_target(cfg, map);
  const Weight w = load_weight(cfg, map, "zero");
  const SolveReport rep =
      solve(map, y, w, effective_starts(cfg, map, false), descent_config(cfg, map), cfg.serial ? Exec::serial : Exec::parallel);
  Output o;
  o.report["map"] = cfg.map;
  o.report["target"] = to_json(y);
  o.report["weight"] = to_json(w);
  o.report["solve"] = to_json(rep);
  o.report["residual"] = rep.solution ? Json((map(*rep.solution) - y).norm()) : Json(nullptr);
  for (std::size_t k = 0; k < rep.runs.size(); ++k) o.tables.push_back({"_run" + std::to_string(k) + ".csv", csv(rep.runs[k].witness)});
  return o;
}

Output mpass_command(const RunConfig& cfg) {
  const MapUnderTest map = load_map(cfg);
  const Vec y = require_target(cfg, map);
  const Weight w = load_weight(cfg, map, "zero");
  InjectivityOptions opts;
  opts.descent = descent_config(cfg, map);
  opts.band_nodes = cfg.band_nodes;
  opts.band_iterations = cfg.band_iterations;
  const InjectivityVerdict v =
      injectivity_falsifier(map, y, effective_starts(cfg, map, true), w, opts, cfg.serial ? Exec::serial : Exec::parallel);
  Output o;
  o.report["map"] = cfg.map;
  o.report["target"] = to_json(y);
  o.report["weight"] = to_json(w);
  o.report["verdict"] = v.two_preimages_found ? "two_preimages_found" : "no_evidence";
  o.report["injectivity"] = to_json(v);
  if (v.band) o.tables.push_back({"_band.csv", csv(v.band->witness)});
  return o;
}

Weight custom_weight_if_any(const RunConfig& cfg, const MapUnderTest& map, CriteriaOptions& o) {
  const std::string w = cfg.weight.empty() ? "derived" : cfg.weight;
  if (w == "derived" || w == "zero" || w == "cerami") return Weight::zero();
  Weight custom = load_weight(cfg, map, "zero");
  o.weight = WeightChoice::custom;
  o.custom_weight = custom;
  return custom;
}

Output check_command(const RunConfig& cfg) {
  const MapUnderTest map = load_map(cfg);
  if (cfg.target && cfg.target->size() != map.dim) throw ConfigError("target dimension does not match the map");
  CriteriaOptions o = criteria_options(cfg);
  o.map_spec = cfg.map;
  custom_weight_if_any(cfg, map, o);
  const CriteriaReport rep = evaluate_criteria(map, o);
  Output out;
  out.report["report"] = to_json(rep);
  if (rep.profile) out.tables.push_back({"_profile.csv", csv(*rep.profile)});
  for (Condition c : kChainOrder) {
    if (rep[c] && rep[c]->sequence) {
      out.tables.push_back({"_witness_" + std::string(condition_key(c)) + ".csv", csv(rep[c]->sequence->witness)});
    }
  }
  return out;
}

Output gallery_audit_command(const RunConfig& cfg) {
  if (cfg.target) throw ConfigError("gallery-audit does not take --target");
  std::vector<CriteriaReport> reports;
  for (const auto& entry : register_gallery()) {
    CriteriaOptions o = criteria_options(cfg);
    o.map_spec = entry.map.name;
    custom_weight_if_any(cfg, entry.map, o);
    reports.push_back(evaluate_criteria(entry.map, o));
  }
  Output out;
  Json arr = Json::array();
  Json equivalence = Json::object();
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    Json block;
    bool any_f = false, any_c = false;
    for (Condition c : {Condition::plastock, Condition::katriel, Condition::star, Condition::rabier}) {
      if (!r[c]) continue;
      block[std::string(condition_key(c))] = to_string(r[c]->status);
      any_f = any_f || r[c]->status == Status::falsified;
      any_c = any_c || r[c]->status == Status::certified_sampled;
    }
    block["consistent"] = !(any_f && any_c);
    equivalence[r.map_name] = std::move(block);
  }
  out.report["reports"] = std::move(arr);
  Json anomalies = Json::array();
  for (const auto& a : audit_implications(reports)) anomalies.push_back(to_json(a));
  out.report["anomalies"] = std::move(anomalies);
  out.report["equivalence"] = std::move(equivalence);
  return out;
}

Output profile_command(const RunConfig& cfg) {
  const MapUnderTest map = load_map(cfg);
  const double R = effective_radius(cfg, map);
  const double r_max = cfg.r_max > 0.0 ? cfg.r_max : 2.0 * R;
  const HadamardProfile p =
      hadamard_profile(map, r_max, cfg.shells, cfg.per_shell, cfg.seed, cfg.serial ? Exec::serial : Exec::parallel);
  Output out;
  out.report["map"] = cfg.map;
  out.report["profile"] = to_json(p);
  try {
    const Weight w = derive_weight(map, p);
    const DivergenceCheck d = check_integral_divergence(w, r_max);
    out.report["derived_weight"] = to_json(w);
    out.report["divergence"] = Json{{"state", to_string(d.status.state)},
                                    {"radius", d.status.radius},
                                    {"integral", d.integral},
                                    {"half_integral", d.half_integral}};
  } catch (const NumericalError& e) {
    out.report["derived_weight"] = nullptr;
    out.report["derived_weight_error"] = e.what();
  }
  out.tables.push_back({"_profile.csv", csv(p)});
  return out;
}

Output replay_command(const RunConfig& cfg) {
  if (cfg.report.empty()) throw ConfigError("replay needs a report path");
  std::ifstream in(cfg.report);
  if (!in) throw ConfigError("cannot read report '" + cfg.report + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("report is not valid JSON: ") + e.what());
  }
  const ReplayResult r = replay(j);
  Output out;
  out.report["status"] = r.ok ? "ok" : "mismatch";
  out.report["checked"] = r.checked;
  if (!r.ok) {
    out.report["first_mismatch"] = Json{{"path", r.path},
                                        {"index", r.index},
                                        {"field", r.message},
                                        {"stored", r.stored},
                                        {"recomputed", r.recomputed}};
  }
  return out;
}

std::string csv_stem(const std::string& out) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot);
  return out;
}

}  // namespace

Vec parse_vector(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("malformed vector '" + std::string(text) + "'");
    s = trim(std::string_view(s).substr(1, s.size() - 2));
  }
  if (s.empty()) throw ConfigError("empty vector");
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string item = trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (item.empty()) throw ConfigError("malformed vector '" + std::string(text) + "'");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(item.c_str(), &end);
    if (errno != 0 || end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw ConfigError("malformed vector entry '" + item + "'");
    }
    vals.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::vector<Vec> parse_vector_list(std::string_view text) {
  std::vector<Vec> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto semi = text.find(';', pos);
    const auto item = text.substr(pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
    if (!trim(item).empty()) out.push_back(parse_vector(item));
    if (semi == std::string_view::npos) break;
    pos = semi + 1;
  }
  if (out.empty()) throw ConfigError("empty start list");
  return out;
}

std::vector<Condition> parse_criteria(std::string_view text) {
  const std::string s = trim(text);
  if (s == "all" || s.empty()) return {kChainOrder.begin(), kChainOrder.end()};
  std::vector<Condition> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string key = trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    const auto c = condition_from_key(key);
    if (!c) throw ConfigError("unknown criterion '" + key + "'");
    if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  std::sort(out.begin(), out.end(), [](Condition a, Condition b) { return chain_index(a) < chain_index(b); });
  return out;
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["map"] = cfg.map;
  j["target"] = cfg.target ? to_json(*cfg.target) : Json(nullptr);
  j["weight"] = cfg.weight.empty() ? Json(nullptr) : Json(cfg.weight);
  j["radius"] = cfg.radius;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["tol_residual"] = cfg.tol_residual;
  j["criteria"] = cfg.criteria;
  Json starts = Json::array();
  for (const Vec& s : cfg.starts) starts.push_back(to_json(s));
  j["starts"] = std::move(starts);
  j["escape_norm"] = cfg.escape_norm;
  j["max_iters"] = cfg.max_iters;
  j["band_nodes"] = cfg.band_nodes;
  j["band_iterations"] = cfg.band_iterations;
  j["shells"] = cfg.shells;
  j["per_shell"] = cfg.per_shell;
  j["r_max"] = cfg.r_max;
  if (!cfg.report.empty()) j["report"] = cfg.report;
  return j;
}

namespace {

Output dispatch(const RunConfig& cfg) {
  if (cfg.samples < 2) throw ConfigError("--samples must be at least 2");
  if (!(cfg.tol_residual > 0.0)) throw ConfigError("--tol-residual must be positive");
  if (cfg.radius < 0.0) throw ConfigError("--radius must be positive");
  if (cfg.command == "solve") return solve_command(cfg);
  if (cfg.command == "mpass") return mpass_command(cfg);
  if (cfg.command == "check") return check_command(cfg);
  if (cfg.command == "gallery-audit") return gallery_audit_command(cfg);
  if (cfg.command == "profile") return profile_command(cfg);
  if (cfg.command == "replay") return replay_command(cfg);
  if (cfg.command == "gallery") {
    Output o;
    o.report["gallery"] = gallery_json();
    return o;
  }
  throw ConfigError("unknown command '" + cfg.command + "'");
}

Json wrap(const RunConfig& cfg, const Json& body) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = cfg.command;
  j["config"] = config_json(cfg);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

}  // namespace

Json build_report(const RunConfig& cfg) { return wrap(cfg, dispatch(cfg).report); }

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Output o = dispatch(cfg);
    const Json j = wrap(cfg, o.report);
    const std::string text = dump_json(j);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write output '" + cfg.out + "'");
      f << text;
      const std::string stem = csv_stem(cfg.out);
      for (const auto& t : o.tables) {
        std::ofstream c(stem + t.suffix, std::ios::binary);
        if (!c) throw ConfigError("cannot write table '" + stem + t.suffix + "'");
        c << t.content;
      }
    }
    if (cfg.command == "replay" && j.at("status") != "ok") return static_cast<int>(ExitCode::mismatch);
    return static_cast<int>(ExitCode::ok);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config_error);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical_failure);
  } catch (const PreconditionError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical_failure);
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Global-inversion diagnostics for maps R^n -> R^n"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string target, starts;

  auto common = [&](CLI::App* sub, bool map_flags) {
    sub->add_option("--seed", cfg.seed, "Seed of every sampling stream");
    sub->add_option("--out", cfg.out, "JSON report path (stdout when absent); CSV tables go next to it");
    sub->add_flag("--serial", cfg.serial, "Run every kernel on one thread");
    if (!map_flags) return;
    sub->add_option("--map", cfg.map, "Map name, optionally with coefficients: name:key=value,...");
    sub->add_option("--target", target, "Target y, e.g. 1,0 or [1,0]");
    sub->add_option("--weight", cfg.weight, "zero | cerami | derived | path to a weight JSON file");
    sub->add_option("--radius", cfg.radius, "Sampling radius R (default: the map's domain radius)");
    sub->add_option("--samples", cfg.samples, "Samples or pairs per check");
    sub->add_option("--tol-residual", cfg.tol_residual, "Residual tolerance for declaring a solution");
    sub->add_option("--criteria", cfg.criteria, "all or a comma list of 1,2,3,starstar,4,5,star,6");
    sub->add_option("--starts", starts, "Start points separated by ';', e.g. '0,0;0,6'");
    sub->add_option("--escape-norm", cfg.escape_norm, "Norm beyond which escape is suspected (default 2R)");
    sub->add_option("--max-iters", cfg.max_iters, "Descent iteration budget");
    sub->add_option("--band-nodes", cfg.band_nodes, "Elastic band node count");
    sub->add_option("--band-iterations", cfg.band_iterations, "Elastic band iterations");
    sub->add_option("--shells", cfg.shells, "Hadamard profile shells");
    sub->add_option("--per-shell", cfg.per_shell, "Random samples per shell");
    sub->add_option("--r-max", cfg.r_max, "Hadamard profile radius (default 2R)");
  };
  for (const char* name : {"solve", "mpass", "check", "gallery-audit", "profile"}) {
    common(app.add_subcommand(name, std::string("Run ") + name), true);
  }
  auto* rp = app.add_subcommand("replay", "Re-evaluate every witness stored in a report");
  rp->add_option("report", cfg.report, "Report path")->required();
  common(rp, false);
  common(app.add_subcommand("gallery", "List the gallery maps and their known properties"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (!target.empty()) cfg.target = parse_vector(target);
    if (!starts.empty()) cfg.starts = parse_vector_list(starts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config_error);
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace ginv
