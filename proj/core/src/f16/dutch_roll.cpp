#include "occuval/f16/dutch_roll.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace occuval::f16 {

using poly::Polynomial;
using poly::PolyVector;
using poly::Var;

PlantMatrices PlantMatrices::f16() {
  PlantMatrices m;
  m.A << -0.3220, 0.0640, 0.0364, -0.9917,  //
      0.0, 0.0, 1.0, 0.0393,                //
      -30.6490, 0.0, -3.6784, -0.6646,      //
      8.3595, 0.0, -0.0254, -0.4764;
  m.B << 0.0, 0.0,  //
      0.0, 0.0,     //
      -0.7331, 0.1315,  //
      -0.0319, -0.0620;
  m.C << 1.0, 0.0, 0.0, 0.0,  //
      0.0, 1.0, 0.0, 0.0;
  return m;
}

GainSet GainSet::f16() {
  GainSet g;
  g.Kx << 10.6901, -9.5824, -2.0328, -6.1944,  //
      -0.3982, -0.2043, -0.4170, -27.0142;
  g.Kr << -2.9031, -9.9924,  //
      156.5907, -2.4300;
  return g;
}

double UncertaintyModel::aileron_gain() const {
  return std::accumulate(aileron_terms.begin(), aileron_terms.end(), 0.0);
}

double UncertaintyModel::rudder_gain() const {
  return std::accumulate(rudder_terms.begin(), rudder_terms.end(), 0.0);
}

void LoopConfig::validate() const {
  if (!(phi_max > 0.0)) throw std::invalid_argument("phi_max must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(lambda[0] > 0.0) || !(lambda[1] > 0.0)) {
    throw std::invalid_argument("control effectiveness must be positive");
  }
  if (sigmoid_degree != 1 && sigmoid_degree != 3 && sigmoid_degree != 5) {
    throw std::invalid_argument("sigmoid degree must be 1, 3 or 5");
  }
}

std::vector<Var> StateVars::full_state(LoopMode mode) const {
  std::vector<Var> out(plant.begin(), plant.end());
  if (mode == LoopMode::kMrac) {
    out.push_back(weight);
    out.insert(out.end(), reference.begin(), reference.end());
  }
  return out;
}

Eigen::VectorXcd eigenvalues(const Eigen::Matrix4d& A) {
  return Eigen::EigenSolver<Eigen::Matrix4d>(A, false).eigenvalues();
}

bool is_hurwitz(const Eigen::Matrix4d& A) {
  return (eigenvalues(A).real().array() < 0.0).all();
}

Eigen::Matrix4d solve_lyapunov(const Eigen::Matrix4d& A,
                               const Eigen::Matrix4d& Q) {
  if (!is_hurwitz(A)) {
    std::ostringstream os;
    os << "solve_lyapunov: matrix is not Hurwitz; eigenvalues:";
    for (const auto& ev : eigenvalues(A)) os << " " << ev;
    throw std::invalid_argument(os.str());
  }
  // vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P)
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  Eigen::Matrix<double, 16, 16> K;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      K.block<4, 4>(4 * i, 4 * j) = I(i, j) * A.transpose() + A(j, i) * I;
    }
  }
  Eigen::Matrix<double, 16, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 16, 1>>(Q.data());
  Eigen::Matrix<double, 16, 1> vecP = K.fullPivLu().solve(rhs);
  Eigen::Matrix4d P = Eigen::Map<Eigen::Matrix4d>(vecP.data());
  return 0.5 * (P + P.transpose());
}

DutchRollModel::DutchRollModel(PlantMatrices plant, GainSet gains,
                               UncertaintyModel uncertainty)
    : plant_(std::move(plant)),
      gains_(std::move(gains)),
      uncertainty_(std::move(uncertainty)) {
  const Eigen::Matrix4d minus = plant_.A - plant_.B * gains_.Kx;
  const Eigen::Matrix4d plus = plant_.A + plant_.B * gains_.Kx;
  if (is_hurwitz(minus)) {
    feedback_sign_ = -1;
    Ar_ = minus;
  } else if (is_hurwitz(plus)) {
    feedback_sign_ = +1;
    Ar_ = plus;
  } else {
    std::ostringstream os;
    os << "neither A - B Kx nor A + B Kx is Hurwitz; eigenvalues(A - B Kx):";
    for (const auto& ev : eigenvalues(minus)) os << " " << ev;
    throw std::invalid_argument(os.str());
  }
  Br_ = plant_.B * gains_.Kr;
  P_ = solve_lyapunov(Ar_, gains_.q_scale * Eigen::Matrix4d::Identity());
}

Eigen::Matrix2d DutchRollModel::dc_gain() const {
  return plant_.C * (-Ar_).partialPivLu().solve(Br_);
}

Eigen::Vector2d delta_uncertainty(const UncertaintyModel& m,
                                  const Eigen::Vector4d& xq,
                                  const Eigen::Vector2d& u) {
  const double beta = xq(0);
  const double p = xq(2);
  const double r = xq(3);
  const double effectiveness = 1.0 - m.dead_zone * beta * beta;
  const double rate =
      m.roll_rate_poly[0] + m.roll_rate_poly[1] * p + m.roll_rate_poly[2] * p * p;
  const double yaw = m.yaw_factor[0] + m.yaw_factor[1] * r;
  return {effectiveness * m.aileron_gain() * u(0) + m.row_gains[0] * rate * yaw,
          effectiveness * m.rudder_gain() * u(1) + m.row_gains[1] * rate * yaw};
}

PolyVector delta_uncertainty(const UncertaintyModel& m, const PolyVector& xq,
                             const PolyVector& u) {
  if (xq.size() != 4 || u.size() != 2) {
    throw std::invalid_argument("delta_uncertainty: expected 4 states, 2 inputs");
  }
  const Polynomial& beta = xq[0];
  const Polynomial& p = xq[2];
  const Polynomial& r = xq[3];
  const Polynomial effectiveness = 1.0 - m.dead_zone * (beta * beta);
  const Polynomial rate = m.roll_rate_poly[0] + m.roll_rate_poly[1] * p +
                          m.roll_rate_poly[2] * (p * p);
  const Polynomial yaw = m.yaw_factor[0] + m.yaw_factor[1] * r;
  Polynomial aileron(0.0);
  for (double c : m.aileron_terms) aileron += c * u[0];
  Polynomial rudder(0.0);
  for (double c : m.rudder_terms) rudder += c * u[1];
  return {effectiveness * aileron + m.row_gains[0] * (rate * yaw),
          effectiveness * rudder + m.row_gains[1] * (rate * yaw)};
}

Eigen::Vector2d baseline_control(const DutchRollModel& model,
                                 const Eigen::Vector4d& xq,
                                 const Eigen::Vector2d& c) {
  return static_cast<double>(model.feedback_sign()) * (model.gains().Kx * xq) + model.gains().Kr * c;
}

Eigen::Vector2d adaptive_control(const Eigen::Vector4d& xq, double W,
                                 const LoopConfig& cfg) {
  if (cfg.mode != LoopMode::kMrac) {
    throw std::invalid_argument("adaptive_control requires MRAC mode");
  }
  static const Var x("sigmoid_arg");
  const double basis =
      poly::sigmoid_taylor(cfg.sigmoid_degree, x).evaluate({{x, xq(1)}});
  return {-W * basis, 0.0};
}

double weight_update(const DutchRollModel& model, const Eigen::Vector4d& xq,
                     const Eigen::Vector4d& e, int sigmoid_degree) {
  static const Var x("sigmoid_arg");
  const double basis =
      poly::sigmoid_taylor(sigmoid_degree, x).evaluate({{x, xq(1)}});
  return model.gains().gamma * basis *
         e.dot(model.P() * model.plant().aileron_column());
}

SteadyReference steady_reference(const DutchRollModel& model,
                                 const Eigen::Vector2d& c) {
  Eigen::FullPivLU<Eigen::Matrix4d> lu(model.Ar());
  if (!lu.isInvertible()) {
    throw std::invalid_argument("steady_reference: A_r is singular");
  }
  SteadyReference s;
  s.x_ss = lu.solve(-model.Br() * c);
  s.beta_ss = s.x_ss(0);
  s.r_ss = s.x_ss(3);
  return s;
}

namespace {

PolyVector mat_vec(const Eigen::MatrixXd& M, const PolyVector& x) {
  PolyVector out(static_cast<std::size_t>(M.rows()), Polynomial(0.0));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (M(i, j) != 0.0) out[i] += M(i, j) * x[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace

model::PiecewiseSystem closed_loop_field(const DutchRollModel& model,
                                         const LoopConfig& cfg,
                                         const StateVars& vars) {
  cfg.validate();
  const bool mrac = cfg.mode == LoopMode::kMrac;
  model::PiecewiseSystem sys;
  sys.time = vars.time;
  sys.states = vars.full_state(cfg.mode);
  const poly::Universe u = poly::make_universe(sys.states);

  PolyVector xq;
  for (Var v : vars.plant) xq.push_back(Polynomial::variable(v, u));
  PolyVector xr;
  for (Var v : vars.reference) {
    xr.push_back(mrac ? Polynomial::variable(v, u) : Polynomial(0.0));
  }
  const Polynomial W = mrac ? Polynomial::variable(vars.weight, u) : Polynomial(0.0);

  const auto& A = model.plant().A;
  const auto& B = model.plant().B;
  const auto& g = model.gains();

  // u = S Kx x_q + Kr c - W Phi(phi) e_aileron
  PolyVector control = mat_vec(static_cast<double>(model.feedback_sign()) * g.Kx, xq);
  const Eigen::Vector2d ff = g.Kr * cfg.command;
  control[0] += ff(0);
  control[1] += ff(1);
  Polynomial basis(0.0);
  if (mrac) {
    basis = poly::sigmoid_taylor(cfg.sigmoid_degree, vars.plant[1])
                .with_universe(u);
    control[0] -= W * basis;
  }
  const PolyVector delta = delta_uncertainty(model.uncertainty(), xq, control);
  const PolyVector drift = mat_vec(A, xq);
  PolyVector actuation{control[0] + delta[0], control[1] + delta[1]};
  const PolyVector forced = mat_vec(B, actuation);

  PolyVector tail;
  if (mrac) {
    PolyVector err(4);
    if (cfg.error_model == ErrorModel::kExact) {
      for (int i = 0; i < 4; ++i) err[i] = xq[i] - xr[i];
    } else {
      const SteadyReference ss = steady_reference(model, cfg.command);
      err[0] = xq[0] - ss.beta_ss;
      err[1] = xq[1] - xr[1];
      err[2] = xq[2] - xr[2];
      err[3] = xq[3] - ss.r_ss;
    }
    const Eigen::Vector4d pb = model.P() * model.plant().aileron_column();
    Polynomial projection(0.0);
    for (int i = 0; i < 4; ++i) projection += pb(i) * err[i];
    tail.push_back(g.gamma * (basis * projection));
    PolyVector ref = mat_vec(model.Ar(), xr);
    const Eigen::Vector4d rc = model.Br() * cfg.command;
    for (int i = 0; i < 4; ++i) tail.push_back(ref[i] + rc(i));
  }

  const Polynomial phi = Polynomial::variable(vars.plant[1], u);
  const Polynomial phi_sq = phi * phi;
  const double bound_sq = cfg.phi_max * cfg.phi_max;
  const std::array<model::SemialgebraicSet, 2> guards{
      model::SemialgebraicSet{{bound_sq - phi_sq}},
      model::SemialgebraicSet{{phi_sq - bound_sq}}};
  const std::array<const char*, 2> names{"nominal", "degraded"};
  for (int j = 0; j < 2; ++j) {
    model::Cell cell;
    cell.name = names[j];
    cell.lambda = cfg.lambda[j];
    cell.guard = guards[j];
    for (int i = 0; i < 4; ++i) {
      cell.field.push_back((drift[i] + cfg.lambda[j] * forced[i]).with_universe(u));
    }
    for (const auto& t : tail) cell.field.push_back(t.with_universe(u));
    sys.cells.push_back(std::move(cell));
  }
  sys.validate();
  return sys;
}

double tracking_cost(const Eigen::Vector4d& xq, const Eigen::Vector2d& c) {
  const double e0 = c(0) - xq(0);
  const double e1 = c(1) - xq(1);
  return e0 * e0 + e1 * e1;
}

Polynomial tracking_cost_polynomial(const Eigen::Vector2d& c,
                                    const StateVars& vars) {
  const poly::Universe u{vars.plant[0], vars.plant[1]};
  const Polynomial e0 = c(0) - Polynomial::variable(vars.plant[0], poly::make_universe(u));
  const Polynomial e1 = c(1) - Polynomial::variable(vars.plant[1], poly::make_universe(u));
  return e0 * e0 + e1 * e1;
}

}  // namespace occuval::f16
