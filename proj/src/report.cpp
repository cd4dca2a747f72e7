#include "pacurves/report.hpp"

#include "pacurves/numerics.hpp"

#include <json.hpp>

#include <cmath>

namespace pacurves {

Quantity make_quantity(std::string name, std::span<const double> errors, double tolerance) {
  Quantity q{std::move(name), 0.0, 0.0, tolerance, false};
  if (errors.empty()) return q;
  q.max_err = max_abs(errors);
  q.rms = rms(errors);
  q.pass = std::isfinite(q.max_err) && q.max_err <= tolerance;
  return q;
}

Quantity make_scalar_quantity(std::string name, double error, double tolerance) {
  const double e = std::abs(error);
  return Quantity{std::move(name), e, e, tolerance, std::isfinite(e) && e <= tolerance};
}

void Report::append(const Report& other) {
  quantities.insert(quantities.end(), other.quantities.begin(), other.quantities.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

bool Report::pass() const {
  for (const Quantity& q : quantities) {
    if (!q.pass) return false;
  }
  return !quantities.empty();
}

const Quantity* Report::find(const std::string& name) const {
  for (const Quantity& q : quantities) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

std::string to_json(const Report& report) {
  // ordered_json keeps insertion order, so identical reports serialize identically.
  nlohmann::ordered_json subject = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.subject) subject[key] = value;

  nlohmann::ordered_json quantities = nlohmann::ordered_json::array();
  for (const Quantity& q : report.quantities) {
    nlohmann::ordered_json item;
    item["name"] = q.name;
    // Non-finite errors are not representable in JSON; they are reported as null.
    item["max_err"] = std::isfinite(q.max_err) ? nlohmann::ordered_json(q.max_err) : nlohmann::ordered_json();
    item["rms"] = std::isfinite(q.rms) ? nlohmann::ordered_json(q.rms) : nlohmann::ordered_json();
    item["tolerance"] = q.tolerance;
    item["pass"] = q.pass;
    quantities.push_back(std::move(item));
  }

  nlohmann::ordered_json doc;
  doc[report.subject_key] = std::move(subject);
  doc["quantities"] = std::move(quantities);
  if (!report.notes.empty()) doc["notes"] = report.notes;
  doc["verdict"] = report.pass() ? "pass" : "fail";
  return doc.dump(2) + "\n";
}

}  // namespace pacurves
