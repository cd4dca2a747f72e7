#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pacurves {

/// One checked quantity: the largest and rms deviation from its reference.
struct Quantity {
  std::string name;
  double max_err = 0.0;
  double rms = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Builds a quantity from pointwise errors. Empty input counts as a failure.
Quantity make_quantity(std::string name, std::span<const double> errors, double tolerance);
/// A scalar check, e.g. a fitted constant against its expected value.
Quantity make_scalar_quantity(std::string name, double error, double tolerance);

/// Verification report written by the golden runner, the analyzer and synthesis.
struct Report {
  /// "fixture" for golden runs, "inputs" otherwise.
  std::string subject_key = "inputs";
  std::vector<std::pair<std::string, std::string>> subject;
  std::vector<Quantity> quantities;
  std::vector<std::string> notes;

  void add(Quantity q) { quantities.push_back(std::move(q)); }
  void append(const Report& other);
  bool pass() const;
  const Quantity* find(const std::string& name) const;
};

/// Deterministic JSON rendering (fixed key order, round-trip precision).
std::string to_json(const Report& report);

}  // namespace pacurves
