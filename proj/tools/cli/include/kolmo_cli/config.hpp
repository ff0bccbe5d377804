#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kolmo/expression.hpp"
#include "kolmo/field.hpp"
#include "kolmo/grid.hpp"
#include "kolmo/meanfield.hpp"
#include "kolmo/oscillation.hpp"

namespace kolmo::cli {

using Json = nlohmann::json;

/// Schema or range failure; `field` is the dotted path of the offending key.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"dini", "solve", "poisson", "stability", "meanfield", "sweep"};
  return names;
}

/// A validated configuration tree. Construction checks every key against the
/// schema and range-checks every number; nothing is solved here.
struct ExperimentConfig {
  Json tree;
  std::string command;
  std::string source_text;  // raw bytes of the file, for the digest

  static ExperimentConfig parse(const std::string& text, const std::string& command);
  static ExperimentConfig load(const std::string& path, const std::string& command);

  const Json& model() const { return tree.at("model"); }
  const Json& grid_block() const { return tree.at("grid"); }
  const Json& run() const { return tree.at("run"); }

  double run_number(const std::string& key, double fallback) const;
  bool run_flag(const std::string& key, bool fallback) const;
  std::uint64_t seed() const;
  bool strict() const;

  int dimension() const;
  fpk::GridSpec grid() const;
  ParameterMap params() const;
  DiffusionMatrixField diffusion(const ParameterMap& extra = {}) const;
  DriftField drift(const ParameterMap& extra = {}) const;
  ScalarField field() const;  // the scalar field for `dini`
  ScalarField psi() const;
  meanfield::InteractionKernel kernel() const;
  coeffs::SamplingSpec sampling() const;
};

/// Validates `tree` for `command`; throws ValidationError.
void validate(const Json& tree, const std::string& command);

/// Hex SHA-256 of the canonical (key-sorted, compact) serialization.
std::string digest(const Json& tree);

}  // namespace kolmo::cli
