#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "occuval/model/system.hpp"

namespace occuval::f16 {

using Matrix42 = Eigen::Matrix<double, 4, 2>;
using Matrix24 = Eigen::Matrix<double, 2, 4>;

/// Lateral-directional plant x_q' = A x_q + B Lambda (u + Delta), y = C x_q
/// with x_q = (beta, phi, p, r) and u = (aileron, rudder).
struct PlantMatrices {
  Eigen::Matrix4d A;
  Matrix42 B;
  Matrix24 C;

  /// Trimmed F-16 at 502 ft/s, alpha = 2.11 deg.
  static PlantMatrices f16();
  Eigen::Vector4d aileron_column() const { return B.col(0); }
};

struct GainSet {
  Matrix24 Kx;
  Eigen::Matrix2d Kr;
  /// Surviving (roll-channel) adaptation gain.
  double gamma = 300.0;
  /// Q = q_scale * I in the Lyapunov equation.
  double q_scale = 100.0;

  static GainSet f16();
};

/// Unmodeled actuator dynamics, one row per control channel:
///   (1 - k beta^2) (sum of channel terms) u_i
///     + g_i (h0 + h1 p + h2 p^2)(m0 + m1 r).
/// Channel term lists are kept uncollected, as tabulated.
struct UncertaintyModel {
  double dead_zone = 4.2646;
  std::vector<double> aileron_terms{9.0028e-7, -6.0019e-7, 0.001};
  std::vector<double> rudder_terms{3.6317e-4, 2.4205e-4, 0.001};
  std::array<double, 2> row_gains{0.0750, 0.4500};
  std::array<double, 3> roll_rate_poly{-0.125, 0.07854, -0.0013708};
  std::array<double, 2> yaw_factor{1.0, 0.05236};

  double aileron_gain() const;
  double rudder_gain() const;
};

enum class LoopMode { kLqr, kMrac };
/// How the adaptive law sees the tracking error.
enum class ErrorModel {
  kExact,        // e = x_q - x_r
  kSteadyState,  // (beta - beta_ss, phi - phi_r, p - p_r, r - r_ss)
};

struct LoopConfig {
  LoopMode mode = LoopMode::kLqr;
  double phi_max = 1.0;
  std::array<double, 2> lambda{1.0, 0.2};
  Eigen::Vector2d command{0.0, 0.17453292519943295};
  double horizon = 10.0;
  int sigmoid_degree = 3;
  ErrorModel error_model = ErrorModel::kExact;

  void validate() const;
};

struct SteadyReference {
  Eigen::Vector4d x_ss;
  double beta_ss = 0.0;
  double r_ss = 0.0;
};

/// State variable names: beta phi p r | W | beta_r phi_r p_r r_r, time t.
struct StateVars {
  poly::Var time{"t"};
  std::array<poly::Var, 4> plant{poly::Var("beta"), poly::Var("phi"),
                                 poly::Var("p"), poly::Var("r")};
  poly::Var weight{"W"};
  std::array<poly::Var, 4> reference{poly::Var("beta_r"), poly::Var("phi_r"),
                                     poly::Var("p_r"), poly::Var("r_r")};

  /// x_q (LQR) or [x_q W x_r] (MRAC).
  std::vector<poly::Var> full_state(LoopMode mode) const;
};

/// The closed loop with its derived quantities (sign choice, A_r, B_r, P).
class DutchRollModel {
 public:
  DutchRollModel(PlantMatrices plant, GainSet gains,
                 UncertaintyModel uncertainty = {});

  const PlantMatrices& plant() const { return plant_; }
  const GainSet& gains() const { return gains_; }
  const UncertaintyModel& uncertainty() const { return uncertainty_; }

  /// S in A_r = A + S B K_x, picked so that A_r is Hurwitz.
  int feedback_sign() const { return feedback_sign_; }
  const Eigen::Matrix4d& Ar() const { return Ar_; }
  const Matrix42& Br() const { return Br_; }
  const Eigen::Matrix4d& P() const { return P_; }

  /// C (-A_r)^-1 B_r.
  Eigen::Matrix2d dc_gain() const;

 private:
  PlantMatrices plant_;
  GainSet gains_;
  UncertaintyModel uncertainty_;
  int feedback_sign_ = -1;
  Eigen::Matrix4d Ar_;
  Matrix42 Br_;
  Eigen::Matrix4d P_;
};

Eigen::Vector2d delta_uncertainty(const UncertaintyModel& m,
                                  const Eigen::Vector4d& xq,
                                  const Eigen::Vector2d& u);
poly::PolyVector delta_uncertainty(const UncertaintyModel& m,
                                   const poly::PolyVector& xq,
                                   const poly::PolyVector& u);

/// u_n = S K_x x_q + K_r c.
Eigen::Vector2d baseline_control(const DutchRollModel& model,
                                 const Eigen::Vector4d& xq,
                                 const Eigen::Vector2d& c);

/// u_a = (-W Phi(phi), 0) with Phi the truncated sigmoid.
Eigen::Vector2d adaptive_control(const Eigen::Vector4d& xq, double W,
                                 const LoopConfig& cfg);

/// Solves A^T P + P A + Q = 0; throws if A is not Hurwitz.
Eigen::Matrix4d solve_lyapunov(const Eigen::Matrix4d& A,
                               const Eigen::Matrix4d& Q);

/// dW/dt = gamma Phi(phi) e^T P b_ail.
double weight_update(const DutchRollModel& model, const Eigen::Vector4d& xq,
                     const Eigen::Vector4d& e, int sigmoid_degree);

SteadyReference steady_reference(const DutchRollModel& model,
                                 const Eigen::Vector2d& c);

/// Two-cell closed loop: |phi| <= phi_max (lambda_1) and |phi| >= phi_max
/// (lambda_2). LQR mode keeps only x_q; MRAC mode carries [x_q W x_r].
model::PiecewiseSystem closed_loop_field(const DutchRollModel& model,
                                         const LoopConfig& cfg,
                                         const StateVars& vars = {});

/// Eigenvalues of A (for reports and diagnostics).
Eigen::VectorXcd eigenvalues(const Eigen::Matrix4d& A);
bool is_hurwitz(const Eigen::Matrix4d& A);

/// ||c - C x_q||^2, nonnegative tracking cost.
double tracking_cost(const Eigen::Vector4d& xq, const Eigen::Vector2d& c);
/// Same, as a polynomial over (beta, phi).
poly::Polynomial tracking_cost_polynomial(const Eigen::Vector2d& c,
                                          const StateVars& vars = {});

}  // namespace occuval::f16
