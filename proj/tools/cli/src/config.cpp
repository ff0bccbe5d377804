#include "kolmo_cli/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "kolmo/error.hpp"
#include "kolmo/field_library.hpp"
#include "kolmo/models.hpp"

namespace kolmo::cli {

namespace {

using Check = std::function<void(const std::string& path, const Json& value)>;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

Check number(double lo, double hi, bool lo_open = false, bool hi_open = false) {
  return [=](const std::string& path, const Json& v) {
    if (!v.is_number()) throw ValidationError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo) || (hi_open && x == hi)) {
      std::ostringstream os;
      os << "value " << x << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi
         << (hi_open ? ")" : "]");
      throw ValidationError(path, os.str());
    }
  };
}

Check integer(long long lo, long long hi) {
  return [=](const std::string& path, const Json& v) {
    if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      throw ValidationError(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                                      ", " + std::to_string(hi) + "]");
    }
  };
}

Check string_value(std::vector<std::string> allowed = {}) {
  return [allowed](const std::string& path, const Json& v) {
    if (!v.is_string()) throw ValidationError(path, "expected a string");
    if (!allowed.empty() &&
        std::find(allowed.begin(), allowed.end(), v.get<std::string>()) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ValidationError(path, "'" + v.get<std::string>() + "' is not one of: " + list);
    }
  };
}

Check boolean() {
  return [](const std::string& path, const Json& v) {
    if (!v.is_boolean()) throw ValidationError(path, "expected true or false");
  };
}

Check array_of(Check item, std::size_t min_size = 0, std::size_t max_size = 1000000) {
  return [=](const std::string& path, const Json& v) {
    if (!v.is_array()) throw ValidationError(path, "expected an array");
    if (v.size() < min_size || v.size() > max_size) {
      throw ValidationError(path, "expected between " + std::to_string(min_size) + " and " +
                                      std::to_string(max_size) + " entries");
    }
    for (std::size_t i = 0; i < v.size(); ++i) item(path + "[" + std::to_string(i) + "]", v[i]);
  };
}

Check string_or_strings(std::size_t max_size) {
  return [=](const std::string& path, const Json& v) {
    if (v.is_string()) return;
    array_of(string_value(), 1, max_size)(path, v);
  };
}

Check object(std::map<std::string, Check> fields) {
  return [fields](const std::string& path, const Json& v) {
    if (!v.is_object()) throw ValidationError(path, "expected an object");
    for (auto it = v.begin(); it != v.end(); ++it) {
      const auto f = fields.find(it.key());
      if (f == fields.end()) {
        std::string list;
        for (const auto& [k, _] : fields) list += (list.empty() ? "" : ", ") + k;
        throw ValidationError(join(path, it.key()),
                              "unknown key '" + it.key() + "' (allowed: " + list + ")");
      }
      f->second(join(path, it.key()), it.value());
    }
  };
}

Check number_map() {
  return [](const std::string& path, const Json& v) {
    if (!v.is_object()) throw ValidationError(path, "expected an object of numbers");
    for (auto it = v.begin(); it != v.end(); ++it) number(-1e300, 1e300)(join(path, it.key()), it.value());
  };
}

const double kInf = std::numeric_limits<double>::infinity();

Check schema() {
  const Check drift_params = object({{"beta", number(1.0, 1e6)},
                                     {"beta1", number(0.0, kInf, true)},
                                     {"beta2", number(0.0, kInf, true)},
                                     {"beta3", number(0.0, kInf, true)}});
  const Check kernel = object({{"q", array_of(string_value(), 1, 3)},
                               {"h", array_of(string_value(), 1, 2)},
                               {"q_bound", number(0.0, kInf)},
                               {"h_bound", number(0.0, kInf)},
                               {"lipschitz_n", number(0.0, kInf, true)},
                               {"lipschitz_m", number(0.0, 1e3)}});
  const Check model = object({
      {"builtin", string_value()},
      {"family", string_value({"ou-drift", "ou-diffusion"})},
      {"diffusion", string_or_strings(3)},
      {"lambda", number(0.0, 1.0, true)},
      {"drift", string_or_strings(2)},
      {"drift_params", drift_params},
      {"params", number_map()},
      {"field", string_value()},
      {"smoothness", string_value({"smooth", "holder", "dini-log", "rough"})},
      {"smoothness_exponent", number(0.0, 10.0)},
      {"example", object({{"name", string_value()}, {"params", number_map()}})},
      {"psi", string_value()},
      {"kernel", kernel},
  });
  const Check grid = object({{"dimension", integer(1, 2)},
                             {"radius", number(4.0, 1e4)},
                             {"cells", [](const std::string& path, const Json& v) {
                                integer(16, 8192)(path, v);
                                const long long n = v.get<long long>();
                                if ((n & (n - 1)) != 0) throw ValidationError(path, "cells must be a power of two");
                              }}});
  const Check sampling = object({{"centers", integer(1, 1000000)},
                                 {"points_per_ball", integer(4, 1000000)},
                                 {"box", array_of(number(-1e6, 1e6), 2, 2)},
                                 {"focus", array_of(array_of(number(-1e6, 1e6), 1, 2))},
                                 {"focus_centers", integer(0, 100000)}});
  const Check run = object({
      {"k", number(1.0, 20.0)},
      {"r", number(1.0, 1e3, true)},
      {"p", number(1.0, 1e3, true)},
      {"s", number(0.0, 1e4)},
      {"tolerance", number(0.0, 1.0, true)},
      {"max_iter", integer(1, 100000)},
      {"seed", integer(0, std::numeric_limits<long long>::max())},
      {"deltas", array_of(number(0.0, 1.0), 1)},
      {"epsilon", number(0.0, 1.0)},
      {"epsilons", array_of(number(0.0, 1.0), 1)},
      {"radii", array_of(number(0.0, kInf, true), 1)},
      {"t0", number(0.0, kInf, true)},
      {"method", string_value({"grid", "exact", "quadrature"})},
      {"strict", boolean()},
      {"sampling", sampling},
      {"start_means", array_of(number(-1e3, 1e3), 1)},
      {"threshold", boolean()},
      {"moments", array_of(number(0.0, 100.0), 1)},
      {"harnack_radius", number(0.0, kInf, true)},
      {"refine", boolean()},
  });
  const Check sweep = object({{"target", string_value({"dini", "solve", "poisson", "stability", "meanfield"})},
                              {"axis", string_value()},
                              {"values", array_of(number(-1e300, 1e300), 3)},
                              {"lenient", boolean()}});
  return object({{"command", string_value(subcommands())},
                 {"model", model},
                 {"grid", grid},
                 {"run", run},
                 {"sweep", sweep},
                 {"output", object({{"plots", boolean()}})}});
}

void require(const Json& tree, const std::string& block, const std::string& key) {
  if (!tree.contains(block) || !tree.at(block).contains(key)) {
    throw ValidationError(join(block, key), "required for this command");
  }
}

void validate_command(const Json& tree, const std::string& command) {
  const Json model = tree.value("model", Json::object());
  const bool has_builtin = model.contains("builtin");
  if (command == "dini") {
    if (!model.contains("field") && !model.contains("example")) {
      throw ValidationError("model.field", "dini needs model.field or model.example");
    }
    return;
  }
  if (command == "sweep") {
    if (!tree.contains("sweep")) throw ValidationError("sweep", "required for the sweep command");
    require(tree, "sweep", "target");
    require(tree, "sweep", "axis");
    require(tree, "sweep", "values");
    validate_command(tree, tree.at("sweep").at("target").get<std::string>());
    return;
  }
  if (command == "stability" && model.contains("family")) return;
  if (!has_builtin) {
    require(tree, "model", "drift");
  }
  if (command == "poisson") require(tree, "model", "psi");
  if (command == "meanfield") require(tree, "model", "kernel");
}

std::vector<std::string> strings_of(const Json& v) {
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

Smoothness smoothness_of(const Json& model) {
  const std::string kind = model.value("smoothness", std::string("smooth"));
  const double e = model.value("smoothness_exponent", 0.0);
  if (kind == "holder") return Smoothness::holder(e);
  if (kind == "dini-log") return Smoothness::dini_log(e);
  if (kind == "rough") return Smoothness::rough();
  return Smoothness::smooth();
}

}  // namespace

void validate(const Json& tree, const std::string& command) {
  schema()("", tree);
  if (tree.contains("command") && tree.at("command").get<std::string>() != command) {
    throw ValidationError("command", "config is for '" + tree.at("command").get<std::string>() +
                                         "' but the subcommand is '" + command + "'");
  }
  validate_command(tree, command);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& command) {
  ExperimentConfig cfg;
  cfg.source_text = text;
  try {
    cfg.tree = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("", std::string("malformed config: ") + e.what());
  }
  if (!cfg.tree.is_object()) throw ValidationError("", "config must be an object");
  for (const char* block : {"model", "grid", "run"}) {
    if (!cfg.tree.contains(block)) cfg.tree[block] = Json::object();
  }
  validate(cfg.tree, command);
  cfg.command = command;
  // Fail on expressions and names now rather than mid-run.
  std::string target = command;
  ParameterMap extra;
  if (command == "sweep") {
    target = cfg.tree.at("sweep").at("target").get<std::string>();
    const std::string axis = cfg.tree.at("sweep").at("axis").get<std::string>();
    if (axis != "delta" && axis != "epsilon") extra[axis] = cfg.tree.at("sweep").at("values")[0].get<double>();
  }
  if (target == "stability") extra["delta"] = 0.0;
  try {
    if (target != "dini" && !(target == "stability" && cfg.model().contains("family"))) {
      (void)cfg.grid();
      (void)cfg.diffusion(extra);
      (void)cfg.drift(extra);
    }
    if (target == "dini") (void)cfg.field();
    if (target == "poisson") (void)cfg.psi();
    if (target == "meanfield") (void)cfg.kernel();
  } catch (const ParseError& e) {
    throw ValidationError("model", e.what());
  } catch (const UnknownNameError& e) {
    throw ValidationError("model", e.what());
  } catch (const DomainError& e) {
    throw ValidationError("model", e.what());
  } catch (const ShapeError& e) {
    throw ValidationError("model", e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path, const std::string& command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), command);
}

double ExperimentConfig::run_number(const std::string& key, double fallback) const {
  return run().contains(key) ? run().at(key).get<double>() : fallback;
}

bool ExperimentConfig::run_flag(const std::string& key, bool fallback) const {
  return run().contains(key) ? run().at(key).get<bool>() : fallback;
}

std::uint64_t ExperimentConfig::seed() const {
  return run().contains("seed") ? run().at("seed").get<std::uint64_t>() : 1;
}

bool ExperimentConfig::strict() const { return run_flag("strict", false); }

int ExperimentConfig::dimension() const {
  return grid_block().value("dimension", 1);
}

ParameterMap ExperimentConfig::params() const {
  ParameterMap out;
  if (model().contains("params")) {
    for (auto it = model().at("params").begin(); it != model().at("params").end(); ++it) {
      out[it.key()] = it.value().get<double>();
    }
  }
  return out;
}

fpk::GridSpec ExperimentConfig::grid() const {
  double beta2 = 1.0;
  if (model().contains("drift_params")) beta2 = model().at("drift_params").value("beta2", 1.0);
  const double radius = grid_block().value("radius", std::max(4.0, 8.0 / std::sqrt(beta2)));
  return fpk::GridSpec(dimension(), radius, grid_block().value("cells", 512));
}

DiffusionMatrixField ExperimentConfig::diffusion(const ParameterMap& extra) const {
  const int d = dimension();
  if (model().contains("builtin") && !model().contains("diffusion")) {
    return make_model(model().at("builtin").get<std::string>(), d).a;
  }
  if (!model().contains("diffusion")) return DiffusionMatrixField::identity(d);
  ParameterMap p = params();
  for (const auto& [k, v] : extra) p[k] = v;
  const auto texts = strings_of(model().at("diffusion"));
  const double lambda = model().value("lambda", 1.0);
  const Smoothness sm = smoothness_of(model());
  auto f = [&](const std::string& t) { return ScalarField::from_expression(d, Expression::parse(t, p), sm); };
  if (texts.size() == 1) return DiffusionMatrixField::scalar(f(texts[0]), lambda);
  if (d != 2 || texts.size() != 3) {
    throw ValidationError("model.diffusion", "give one scalar entry, or a11, a12, a22 in d = 2");
  }
  return DiffusionMatrixField::matrix(f(texts[0]), f(texts[1]), f(texts[2]), lambda);
}

DriftField ExperimentConfig::drift(const ParameterMap& extra) const {
  const int d = dimension();
  DriftParams dp;
  if (model().contains("builtin") && !model().contains("drift")) {
    dp = make_model(model().at("builtin").get<std::string>(), d).b.params();
  }
  if (model().contains("drift_params")) {
    const Json& j = model().at("drift_params");
    dp.beta = j.value("beta", dp.beta);
    dp.beta1 = j.value("beta1", dp.beta1);
    dp.beta2 = j.value("beta2", dp.beta2);
    dp.beta3 = j.value("beta3", dp.beta3);
  }
  if (model().contains("builtin") && !model().contains("drift")) {
    return make_model(model().at("builtin").get<std::string>(), d).b.with_params(dp);
  }
  ParameterMap p = params();
  for (const auto& [k, v] : extra) p[k] = v;
  const auto texts = strings_of(model().at("drift"));
  if (static_cast<int>(texts.size()) != d) {
    throw ValidationError("model.drift", "expected " + std::to_string(d) + " drift components");
  }
  std::vector<ScalarField> comps;
  for (const auto& t : texts) comps.push_back(ScalarField::from_expression(d, Expression::parse(t, p)));
  return DriftField(std::move(comps), dp);
}

ScalarField ExperimentConfig::field() const {
  const int d = dimension();
  if (model().contains("example")) {
    const Json& ex = model().at("example");
    ParameterMap p;
    if (ex.contains("params")) {
      for (auto it = ex.at("params").begin(); it != ex.at("params").end(); ++it) p[it.key()] = it.value().get<double>();
    }
    if (!p.count("dimension")) p["dimension"] = d;
    auto made = coeffs::make_example_field(ex.value("name", std::string()), p);
    if (!std::holds_alternative<ScalarField>(made)) {
      throw ValidationError("model.example.name", "dini needs a scalar field, not a drift");
    }
    return std::get<ScalarField>(made);
  }
  return ScalarField::from_expression(d, Expression::parse(model().at("field").get<std::string>(), params()),
                                      smoothness_of(model()));
}

ScalarField ExperimentConfig::psi() const {
  return ScalarField::from_expression(dimension(),
                                      Expression::parse(model().at("psi").get<std::string>(), params()));
}

meanfield::InteractionKernel ExperimentConfig::kernel() const {
  const Json& k = model().at("kernel");
  std::vector<std::string> q;
  std::vector<std::string> h;
  if (k.contains("q")) q = k.at("q").get<std::vector<std::string>>();
  if (k.contains("h")) h = k.at("h").get<std::vector<std::string>>();
  return meanfield::InteractionKernel::from_expressions(dimension(), q, h, params(),
                                                        k.value("q_bound", 0.0), k.value("h_bound", 0.0));
}

coeffs::SamplingSpec ExperimentConfig::sampling() const {
  coeffs::SamplingSpec s;
  const int d = dimension();
  s.box = Box{d, -1.0, 1.0};
  s.seed = seed();
  if (run().contains("sampling")) {
    const Json& j = run().at("sampling");
    s.centers = j.value("centers", s.centers);
    s.points_per_ball = j.value("points_per_ball", s.points_per_ball);
    s.focus_centers = j.value("focus_centers", s.focus_centers);
    if (j.contains("box")) {
      s.box.lo = j.at("box")[0].get<double>();
      s.box.hi = j.at("box")[1].get<double>();
      if (!(s.box.lo < s.box.hi)) throw ValidationError("run.sampling.box", "box needs lo < hi");
    }
    if (j.contains("focus")) {
      for (const auto& f : j.at("focus")) {
        Point p{};
        for (std::size_t i = 0; i < f.size() && i < 2; ++i) p[i] = f[i].get<double>();
        s.focus.push_back(p);
      }
    }
  }
  return s;
}

std::string digest(const Json& tree) {
  const std::string canonical = tree.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(canonical.data(), canonical.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace kolmo::cli
