#include "occuval/f16/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace occuval::f16 {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

template <int R, int C>
json matrix_json(const Eigen::Matrix<double, R, C>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

template <int R, int C>
void matrix_from(const json& j, Eigen::Matrix<double, R, C>& m,
                 const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != R) {
    throw std::invalid_argument("problem file: '" + field + "' must have " +
                                std::to_string(R) + " rows");
  }
  for (int i = 0; i < R; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != C) {
      throw std::invalid_argument("problem file: '" + field + "' row " +
                                  std::to_string(i) + " must have " +
                                  std::to_string(C) + " columns");
    }
    for (int k = 0; k < C; ++k) m(i, k) = j[i][k].get<double>();
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw std::invalid_argument("problem file: missing field '" + where + key + "'");
  }
  return j.at(key);
}

std::string error_model_name(ErrorModel m) {
  return m == ErrorModel::kExact ? "exact" : "steady-state";
}

ErrorModel parse_error_model(const std::string& s) {
  if (s == "exact") return ErrorModel::kExact;
  if (s == "steady-state") return ErrorModel::kSteadyState;
  throw std::invalid_argument("problem file: unknown error model '" + s + "'");
}

}  // namespace

void ProblemFile::validate() const {
  auto check_len = [](const std::vector<double>& v, const char* what) {
    if (v.size() != 9) {
      throw std::invalid_argument(std::string("problem file: '") + what +
                                  "' needs 9 entries");
    }
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument(std::string("problem file: '") + what +
                                    "' entries must be finite and >= 0");
      }
    }
  };
  check_len(initial_half_width, "initial_half_width");
  check_len(state_half_width, "state_half_width");
  check_len(normalization, "normalization");
  for (double a : normalization) {
    if (a <= 0.0) throw std::invalid_argument("problem file: normalization must be > 0");
  }
  if (grid.size() != 4) {
    throw std::invalid_argument("problem file: 'sweep.grid' needs 4 entries");
  }
  if (!(threshold > 0.0)) throw std::invalid_argument("problem file: threshold must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("problem file: horizon must be > 0");
  for (const auto& o : {lqr_orders, mrac_orders}) {
    if (o[0] < 1 || o[1] < o[0]) {
      throw std::invalid_argument("problem file: order ranges must satisfy 1 <= lo <= hi");
    }
  }
}

double ProblemFile::phi_max(const std::string& preset) const {
  if (preset == "nominal") return phi_max_nominal;
  if (preset == "degraded") return phi_max_degraded;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(preset, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != preset.size() || !(v > 0.0)) {
    throw std::invalid_argument("phi-max must be 'nominal', 'degraded' or a positive angle in rad, got '" +
                                preset + "'");
  }
  return v;
}

ProblemFile default_problem() {
  ProblemFile p;
  const double a10 = 10.0 * kDeg;
  const double tiny = 0.001 * kDeg;
  p.initial_half_width = {a10, a10, a10, a10, 0.001, tiny, tiny, tiny, tiny};
  const double a30 = 30.0 * kDeg;
  p.state_half_width = {a30, a30, a30, a30, 80.0, a30, a30, a30, a30};
  const double a60 = 60.0 * kDeg;
  p.normalization = {a60, a60, a60, a60, 160.0, a60, a60, a60, a60};
  return p;
}

std::string problem_to_json(const ProblemFile& p) {
  json j;
  j["schema"] = kProblemSchema;
  j["name"] = p.name;
  j["plant"] = {{"A", matrix_json(p.plant.A)},
                {"B", matrix_json(p.plant.B)},
                {"C", matrix_json(p.plant.C)}};
  j["gains"] = {{"Kx", matrix_json(p.gains.Kx)},
                {"Kr", matrix_json(p.gains.Kr)},
                {"gamma", p.gains.gamma},
                {"q_scale", p.gains.q_scale}};
  const auto& u = p.uncertainty;
  j["uncertainty"] = {{"dead_zone", u.dead_zone},
                      {"aileron_terms", u.aileron_terms},
                      {"rudder_terms", u.rudder_terms},
                      {"row_gains", u.row_gains},
                      {"roll_rate_poly", u.roll_rate_poly},
                      {"yaw_factor", u.yaw_factor}};
  j["loop"] = {{"lambda", p.lambda},
               {"phi_max", {{"nominal", p.phi_max_nominal}, {"degraded", p.phi_max_degraded}}},
               {"command_rad", {p.command(0), p.command(1)}},
               {"horizon", p.horizon},
               {"sigmoid_degree", p.sigmoid_degree},
               {"mrac_error_model", error_model_name(p.mrac_error_model)}};
  j["states"] = {"beta", "phi", "p", "r", "W", "beta_r", "phi_r", "p_r", "r_r"};
  j["initial_half_width"] = p.initial_half_width;
  j["state_half_width"] = p.state_half_width;
  j["normalization"] = p.normalization;
  j["threshold"] = p.threshold;
  j["sweep"] = {{"grid", p.grid}, {"dt", p.dt}, {"method", sim::to_string(p.method)}};
  j["orders"] = {{"lqr", p.lqr_orders}, {"mrac", p.mrac_orders}};
  return j.dump(2) + "\n";
}

ProblemFile parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("problem file: invalid JSON: ") + e.what());
  }
  const std::string schema = field(j, "schema", "").get<std::string>();
  if (schema != kProblemSchema) {
    throw std::invalid_argument("problem file: unsupported schema '" + schema +
                                "' (expected " + kProblemSchema + ")");
  }
  ProblemFile p;
  try {
    p.name = j.value("name", p.name);
    const auto& plant = field(j, "plant", "");
    matrix_from(field(plant, "A", "plant."), p.plant.A, "plant.A");
    matrix_from(field(plant, "B", "plant."), p.plant.B, "plant.B");
    matrix_from(field(plant, "C", "plant."), p.plant.C, "plant.C");
    const auto& gains = field(j, "gains", "");
    matrix_from(field(gains, "Kx", "gains."), p.gains.Kx, "gains.Kx");
    matrix_from(field(gains, "Kr", "gains."), p.gains.Kr, "gains.Kr");
    p.gains.gamma = field(gains, "gamma", "gains.").get<double>();
    p.gains.q_scale = field(gains, "q_scale", "gains.").get<double>();
    const auto& u = field(j, "uncertainty", "");
    p.uncertainty.dead_zone = field(u, "dead_zone", "uncertainty.").get<double>();
    p.uncertainty.aileron_terms = field(u, "aileron_terms", "uncertainty.").get<std::vector<double>>();
    p.uncertainty.rudder_terms = field(u, "rudder_terms", "uncertainty.").get<std::vector<double>>();
    p.uncertainty.row_gains = field(u, "row_gains", "uncertainty.").get<std::array<double, 2>>();
    p.uncertainty.roll_rate_poly = field(u, "roll_rate_poly", "uncertainty.").get<std::array<double, 3>>();
    p.uncertainty.yaw_factor = field(u, "yaw_factor", "uncertainty.").get<std::array<double, 2>>();
    const auto& loop = field(j, "loop", "");
    p.lambda = field(loop, "lambda", "loop.").get<std::array<double, 2>>();
    const auto& pm = field(loop, "phi_max", "loop.");
    p.phi_max_nominal = field(pm, "nominal", "loop.phi_max.").get<double>();
    p.phi_max_degraded = field(pm, "degraded", "loop.phi_max.").get<double>();
    const auto c = field(loop, "command_rad", "loop.").get<std::array<double, 2>>();
    p.command = {c[0], c[1]};
    p.horizon = field(loop, "horizon", "loop.").get<double>();
    p.sigmoid_degree = field(loop, "sigmoid_degree", "loop.").get<int>();
    p.mrac_error_model = parse_error_model(loop.value("mrac_error_model", "steady-state"));
    p.initial_half_width = field(j, "initial_half_width", "").get<std::vector<double>>();
    p.state_half_width = field(j, "state_half_width", "").get<std::vector<double>>();
    p.normalization = field(j, "normalization", "").get<std::vector<double>>();
    p.threshold = field(j, "threshold", "").get<double>();
    const auto& sweep = field(j, "sweep", "");
    p.grid = field(sweep, "grid", "sweep.").get<std::vector<std::size_t>>();
    p.dt = field(sweep, "dt", "sweep.").get<double>();
    p.method = sim::parse_method(field(sweep, "method", "sweep.").get<std::string>());
    if (j.contains("orders")) {
      p.lqr_orders = j["orders"].value("lqr", p.lqr_orders);
      p.mrac_orders = j["orders"].value("mrac", p.mrac_orders);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("problem file: ") + e.what());
  }
  p.validate();
  return p;
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read problem file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

void save_problem(const ProblemFile& p, const std::filesystem::path& path) {
  p.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("I/O error: cannot write " + path.string());
  out << problem_to_json(p);
  if (!out) throw std::runtime_error("I/O error: write failed for " + path.string());
}

}  // namespace occuval::f16
