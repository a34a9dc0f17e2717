#pragma once

// Problem files: JSON documents naming algebras, morphisms, complexes and
// local systems, plus one task with its parameters.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cdgakit/cdga.hpp"
#include "cdgakit/complex.hpp"
#include "cdgakit/localsys.hpp"

namespace cdgakit::cli {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "cdgakit/1";

/// Rationals are JSON integers or strings "p" / "p/q"; floats are rejected.
Rational rational_from_json(const json& j, std::string_view where);
json rational_to_json(const Rational& q);

QMatrix matrix_from_json(const json& rows, std::size_t n_rows, std::size_t n_cols, std::string_view where);
json matrix_to_json(const QMatrix& m);

json algebra_to_json(const FreeCDGA& f);
json algebra_to_json(const TruncatedDGA& a);
FreeCDGA free_from_json(const json& spec, std::string_view name);
TruncatedDGA truncated_from_json(const json& spec, std::string_view name);

/// Parses text, reporting syntax errors as InputError with line and column.
json parse_document(std::string_view text);

class Problem {
public:
  /// Checks the version tag and the task name.
  explicit Problem(json doc);

  const std::string& task() const noexcept { return task_; }
  const json& parameters() const noexcept { return params_; }
  const json& document() const noexcept { return doc_; }

  std::optional<int> int_parameter(std::string_view key) const;
  int int_parameter(std::string_view key, int fallback) const;
  std::string string_parameter(std::string_view key) const;

  /// The free presentation of a "free" algebra.
  FreeCDGA free_algebra(const std::string& name) const;
  /// The algebra truncated at its own "cutoff" if given, else at the fallback.
  /// One shared pointer per name.
  DGAPtr algebra(const std::string& name, int fallback_cutoff);
  DGMorphism morphism(const std::string& name, int fallback_cutoff);
  SimplicialComplexK complex(const std::string& name) const;
  /// Systems with fibers truncated at the given cutoff.
  SystemPtr system(const std::string& name, int cutoff);

private:
  const json& section(std::string_view kind, const std::string& name) const;

  json doc_;
  json params_;
  std::string task_;
  std::map<std::string, DGAPtr> algebras_;
  std::map<std::string, DGMorphism> morphisms_;
};

}  // namespace cdgakit::cli
