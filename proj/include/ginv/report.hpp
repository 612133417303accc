#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ginv/criteria_chain.hpp"
#include "ginv/test_oracle.hpp"

namespace ginv {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Two-space indented JSON with every double printed as %.17g, arrays of
/// scalars on one line, non-finite numbers as null, trailing newline.
std::string dump_json(const Json& j);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

Json to_json(const CriticalSequenceWitness& w);
CriticalSequenceWitness witness_from_json(const Json& j);

Json to_json(const Weight& w);
/// Accepts {"kind": "zero" | "cerami"} or a tabulated {"kind", "grid": [[rho, h], ...]}.
Weight weight_from_json(const Json& j);

Json to_json(const Probe& p);
Json to_json(const Verdict& v);
Json to_json(const HadamardProfile& p);
Json to_json(const CriteriaReport& r);
Json to_json(const Anomaly& a);
Json to_json(const MinimizeResult& r);
Json to_json(const SolveReport& r);
Json to_json(const MountainPassGeometry& g);
Json to_json(const InjectivityVerdict& v);
Json to_json(const GridVerdict& v);
Json to_json(const Truth& t);
Json gallery_json();

struct ReplayResult {
  bool ok = true;
  /// Number of re-evaluated values.
  std::size_t checked = 0;
  /// JSON pointer of the first mismatching witness and the offending index within it.
  std::string path;
  std::ptrdiff_t index = -1;
  double stored = 0.0;
  double recomputed = 0.0;
  std::string message;
};

/// Re-evaluates every witness in a report: sequences need the nearest
/// enclosing "map", "target" and "weight"; probe lists need the nearest "map".
/// Values must agree within 1e-9 max(1, |stored|). Throws ConfigError when the
/// report does not follow the schema.
ReplayResult replay(const Json& report);

void write_profile_csv(std::ostream& out, const HadamardProfile& p);
void write_witness_csv(std::ostream& out, const CriticalSequenceWitness& w);

}  // namespace ginv
