#include "ginv/map_model.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace ginv {

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ']';
  return os.str();
}

std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    case Tri::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view condition_key(Condition c) {
  switch (c) {
    case Condition::isometry: return "1";
    case Condition::expansive: return "2";
    case Condition::uniform_bound: return "3";
    case Condition::integral: return "starstar";
    case Condition::plastock: return "4";
    case Condition::katriel: return "5";
    case Condition::star: return "star";
    case Condition::rabier: return "6";
  }
  return "?";
}

std::optional<Condition> condition_from_key(std::string_view key) {
  for (Condition c : kChainOrder) {
    if (condition_key(c) == key) return c;
  }
  return std::nullopt;
}

std::optional<std::pair<Condition, Condition>> truth_inconsistency(const Truth& t) {
  for (std::size_t i = 0; i < kChainOrder.size(); ++i) {
    if (t.conditions[i] != Tri::yes) continue;
    for (std::size_t j = i + 1; j < kChainOrder.size(); ++j) {
      if (t.conditions[j] == Tri::no) return std::make_pair(kChainOrder[i], kChainOrder[j]);
    }
  }
  return std::nullopt;
}

namespace {

MapUnderTest scalar_map(std::string name, std::function<double(double)> f, std::function<double(double)> df) {
  MapUnderTest m;
  m.name = std::move(name);
  m.dim = 1;
  m.eval = [f](const Vec& x) {
    Vec out(1);
    out[0] = f(x[0]);
    return out;
  };
  m.jacobian = [df](const Vec& x) {
    Mat out(1, 1);
    out(0, 0) = df(x[0]);
    return out;
  };
  return m;
}

Truth all_conditions(Tri value, Tri first) {
  Truth t;
  t.conditions.fill(value);
  t[Condition::isometry] = first;
  return t;
}

Truth global_diffeo(bool isometry) {
  Truth t = all_conditions(Tri::yes, isometry ? Tri::yes : Tri::no);
  t.injective = Tri::yes;
  t.surjective = Tri::yes;
  t.norm_coercive = Tri::yes;
  return t;
}

std::vector<GalleryEntry> build_gallery() {
  std::vector<GalleryEntry> g;
  g.push_back({make_identity(2), global_diffeo(true), "isometry; every condition holds trivially"});
  g.push_back({make_diagonal({2.0, 3.0}), global_diffeo(false),
               "linear with singular values 2 and 3: expansive with rate 2, not distance preserving"});
  g.push_back({make_shifted_sine(2.0), global_diffeo(false),
               "f'(t) = 2 + cos t >= 1, so expansive; |f(1) - f(0)| = 2 + sin 1 != 1"});
  g.push_back({make_cubic_drift(1.0), global_diffeo(false),
               "f'(t) = 1 + 3t^2 >= 1, so expansive; strictly increasing and coercive"});

  {
    Truth t = all_conditions(Tri::no, Tri::no);
    t.injective = Tri::yes;
    t.surjective = Tri::no;
    t.norm_coercive = Tri::no;
    g.push_back({make_arctan(), t, "strictly increasing with range (-pi/2, pi/2); f' = 1/(1+t^2) -> 0"});
  }
  {
    Truth t = all_conditions(Tri::no, Tri::no);
    t.injective = Tri::yes;
    t.surjective = Tri::no;
    t.norm_coercive = Tri::no;
    g.push_back({make_saturating(), t, "strictly increasing with range (-inf, 1); f' = e^{-t} -> 0 as t -> inf"});
  }
  {
    Truth t = all_conditions(Tri::no, Tri::no);
    t.injective = Tri::no;
    t.surjective = Tri::no;
    t.norm_coercive = Tri::no;
    g.push_back({make_complex_exp(), t,
                 "e^{x1} > 0 so the origin is never hit; 2pi-periodic in x2 so (0,0) and (0,2pi) share the image (1,0)"});
  }
  return g;
}

std::map<std::string, double> parse_params(std::string_view text) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw ConfigError("malformed map parameter '" + std::string(item) + "'");
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      out[key] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("map parameter '" + key + "' is not a number: '" + value + "'");
    }
    pos = end + 1;
  }
  return out;
}

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

}  // namespace

MapUnderTest make_identity(int dim) {
  if (dim < 1) throw ConfigError("identity dimension must be positive");
  MapUnderTest m;
  m.name = "identity";
  m.dim = dim;
  m.eval = [](const Vec& x) { return Vec(x); };
  m.jacobian = [dim](const Vec&) { return Mat(Mat::Identity(dim, dim)); };
  return m;
}

MapUnderTest make_diagonal(std::vector<double> diagonal) {
  if (diagonal.empty()) throw ConfigError("diagonal map needs at least one entry");
  const int n = static_cast<int>(diagonal.size());
  Vec d = Eigen::Map<const Vec>(diagonal.data(), n);
  MapUnderTest m;
  m.name = "diagonal";
  m.dim = n;
  m.local_diffeomorphism = (d.array() != 0.0).all();
  m.eval = [d](const Vec& x) { return Vec(d.cwiseProduct(x)); };
  m.jacobian = [d](const Vec&) { return Mat(d.asDiagonal()); };
  return m;
}

MapUnderTest make_shifted_sine(double slope) {
  auto m = scalar_map(
      "shifted-sine", [slope](double t) { return slope * t + std::sin(t); },
      [slope](double t) { return slope + std::cos(t); });
  m.local_diffeomorphism = std::abs(slope) > 1.0;
  return m;
}

MapUnderTest make_cubic_drift(double cubic) {
  auto m = scalar_map(
      "cubic-drift", [cubic](double t) { return t + cubic * t * t * t; },
      [cubic](double t) { return 1.0 + 3.0 * cubic * t * t; });
  m.local_diffeomorphism = cubic >= 0.0;
  return m;
}

MapUnderTest make_arctan() {
  return scalar_map(
      "arctan", [](double t) { return std::atan(t); }, [](double t) { return 1.0 / (1.0 + t * t); });
}

MapUnderTest make_saturating() {
  return scalar_map(
      "saturating", [](double t) { return 1.0 - std::exp(-t); }, [](double t) { return std::exp(-t); });
}

MapUnderTest make_complex_exp() {
  MapUnderTest m;
  m.name = "complex-exp";
  m.dim = 2;
  m.eval = [](const Vec& x) {
    const double r = std::exp(x[0]);
    Vec out(2);
    out << r * std::cos(x[1]), r * std::sin(x[1]);
    return out;
  };
  m.jacobian = [](const Vec& x) {
    const double r = std::exp(x[0]);
    const double c = r * std::cos(x[1]);
    const double s = r * std::sin(x[1]);
    Mat j(2, 2);
    j << c, -s, s, c;
    return j;
  };
  return m;
}

MapUnderTest translate(const MapUnderTest& map, const Vec& u) {
  MapUnderTest m = map;
  m.name = map.name + "@" + format_vec(u);
  m.eval = [f = map.eval, u](const Vec& x) { return f(Vec(u + x)); };
  m.jacobian = [j = map.jacobian, u](const Vec& x) { return j(Vec(u + x)); };
  return m;
}

const std::vector<GalleryEntry>& register_gallery() {
  static const std::vector<GalleryEntry> gallery = build_gallery();
  return gallery;
}

const GalleryEntry* find_gallery_entry(std::string_view name) {
  for (const auto& e : register_gallery()) {
    if (e.map.name == name) return &e;
  }
  return nullptr;
}

MapUnderTest make_map(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  auto params = colon == std::string_view::npos ? std::map<std::string, double>{} : parse_params(spec.substr(colon + 1));

  MapUnderTest m;
  if (name == "identity") {
    m = make_identity(static_cast<int>(take(params, "dim", 2)));
  } else if (name == "diagonal") {
    const double d1 = take(params, "d1", 2.0);
    const double d2 = take(params, "d2", 3.0);
    m = make_diagonal({d1, d2});
  } else if (name == "shifted-sine") {
    m = make_shifted_sine(take(params, "slope", 2.0));
  } else if (name == "cubic-drift") {
    m = make_cubic_drift(take(params, "cubic", 1.0));
  } else if (name == "arctan") {
    m = make_arctan();
  } else if (name == "saturating") {
    m = make_saturating();
  } else if (name == "complex-exp") {
    m = make_complex_exp();
  } else {
    throw ConfigError("unknown map '" + name + "'");
  }
  m.domain_radius = take(params, "radius", m.domain_radius);
  if (!params.empty()) throw ConfigError("unknown parameter '" + params.begin()->first + "' for map '" + name + "'");
  if (!(m.domain_radius > 0.0)) throw ConfigError("map radius must be positive");
  return m;
}

JacobianDeviation jacobian_check(const MapUnderTest& map, const std::vector<Vec>& points, double step) {
  if (!(step > 0.0)) throw ConfigError("jacobian_check step must be positive");
  if (points.empty()) throw ConfigError("jacobian_check needs at least one point");
  JacobianDeviation out;
  out.worst_point = points.front();
  for (const Vec& x : points) {
    const Mat analytic = map.jacobian(x);
    if (!all_finite(analytic)) throw NumericalError("non-finite Jacobian at " + format_vec(x), x);
    for (int k = 0; k < map.dim; ++k) {
      Vec xp = x, xm = x;
      xp[k] += step;
      xm[k] -= step;
      const Vec fp = map(xp);
      const Vec fm = map(xm);
      if (!all_finite(fp)) throw NumericalError("non-finite map value at " + format_vec(xp), xp);
      if (!all_finite(fm)) throw NumericalError("non-finite map value at " + format_vec(xm), xm);
      const Vec column = (fp - fm) / (2.0 * step);
      for (int i = 0; i < map.dim; ++i) {
        const double dev = std::abs(analytic(i, k) - column[i]) / (1.0 + std::abs(analytic(i, k)));
        if (dev > out.max_deviation) {
          out.max_deviation = dev;
          out.worst_point = x;
        }
      }
    }
  }
  return out;
}

}  // namespace ginv
