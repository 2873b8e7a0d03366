#include "schur_ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCore>

namespace occuval::sdp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Entry {
  Index a, b;
  double coef;
};

struct Block {
  Index n = 0;
  MatrixXd C;
  std::vector<std::size_t> vars;        // global variable ids
  std::vector<std::vector<Entry>> fv;   // full symmetric entries per var
  std::size_t comp = 0;
};

/// S = D^1/2 L L' D^1/2 with D = diag(S) (Jacobi scaling before Cholesky).
struct Component {
  std::vector<std::size_t> vars;
  MatrixXd S;
  VectorXd dinv_sqrt;
  Eigen::LLT<MatrixXd> llt;
  std::vector<Index> rows;  // equality rows touching the component
  MatrixXd G;               // (D^1/2 L)^-1 E_c' restricted to `rows`

  VectorXd half(const VectorXd& r) const {
    return llt.matrixL().solve(dinv_sqrt.cwiseProduct(r));
  }
  VectorXd half_back(VectorXd t) const {
    llt.matrixU().solveInPlace(t);
    return dinv_sqrt.cwiseProduct(t);
  }
  VectorXd solve(const VectorXd& r) const { return half_back(half(r)); }
};

struct Iterate {
  std::vector<MatrixXd> X, Z;
  VectorXd y, w;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Largest alpha with M + alpha dM >= 0 given the Cholesky factor of M.
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dM) {
  const auto& L = chol.matrixL();
  MatrixXd t = L.solve(dM);
  t = L.solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

class Ipm {
 public:
  Ipm(const ConicProblem& p, const SolverOptions& o) : p_(p), opts_(o) {
    m_ = p.num_vars;
    build_blocks();
    build_rows();
    build_components();
    b_ = VectorXd::Zero(static_cast<Index>(m_));
    for (const auto& t : p.objective) b_(static_cast<Index>(t.var)) += t.coeff;
  }

  SolveResult run();

 private:
  void build_blocks();
  void build_rows();
  void build_components();

  MatrixXd apply_F(const Block& bk, const VectorXd& y) const;
  void add_adjoint(const Block& bk, const MatrixXd& M, VectorXd& out) const;
  VectorXd E_times(const VectorXd& y) const;
  VectorXd Et_times(const VectorXd& w) const;

  bool factor(const Iterate& it, const std::vector<MatrixXd>& Zi);
  void factor_rows();
  VectorXd solve_K(const VectorXd& r) const;
  bool presolve_rows(SolveResult& res);
  void solve_newton(const VectorXd& r1, const VectorXd& re, VectorXd& dy,
                    VectorXd& dw) const;

  const ConicProblem& p_;
  SolverOptions opts_;
  std::size_t m_ = 0;
  std::vector<Block> blocks_;
  std::vector<Component> comps_;
  std::vector<std::size_t> comp_of_;
  std::vector<Index> local_of_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> E_;
  VectorXd f_;
  VectorXd b_;
  MatrixXd K_;
  VectorXd kscale_;
  Eigen::LDLT<MatrixXd> kfac_;
};

void Ipm::build_blocks() {
  blocks_.reserve(p_.blocks.size());
  for (const auto& pb : p_.blocks) {
    Block bk;
    bk.n = static_cast<Index>(pb.side);
    bk.C = MatrixXd::Zero(bk.n, bk.n);
    std::unordered_map<std::size_t, std::size_t> slot;
    for (const auto& e : pb.entries) {
      const auto r = static_cast<Index>(e.row);
      const auto c = static_cast<Index>(e.col);
      bk.C(r, c) += e.constant;
      if (r != c) bk.C(c, r) += e.constant;
      for (const auto& t : e.terms) {
        if (t.coeff == 0.0) continue;
        auto [it, fresh] = slot.emplace(t.var, bk.vars.size());
        if (fresh) {
          bk.vars.push_back(t.var);
          bk.fv.emplace_back();
        }
        auto& list = bk.fv[it->second];
        list.push_back({r, c, t.coeff});
        if (r != c) list.push_back({c, r, t.coeff});
      }
    }
    blocks_.push_back(std::move(bk));
  }
}

void Ipm::build_rows() {
  std::vector<Eigen::Triplet<double>> trips;
  f_.resize(static_cast<Index>(p_.rows.size()));
  for (std::size_t i = 0; i < p_.rows.size(); ++i) {
    const auto& r = p_.rows[i];
    double scale = 0.0;
    for (const auto& t : r.terms) scale = std::max(scale, std::abs(t.coeff));
    if (scale == 0.0) scale = 1.0;
    for (const auto& t : r.terms) {
      trips.emplace_back(static_cast<Index>(i), static_cast<Index>(t.var), t.coeff / scale);
    }
    f_(static_cast<Index>(i)) = r.rhs / scale;
  }
  E_.resize(static_cast<Index>(p_.rows.size()), static_cast<Index>(m_));
  E_.setFromTriplets(trips.begin(), trips.end());
  E_.makeCompressed();
}

void Ipm::build_components() {
  UnionFind uf(m_);
  for (const auto& bk : blocks_) {
    for (std::size_t k = 1; k < bk.vars.size(); ++k) uf.unite(bk.vars[0], bk.vars[k]);
  }
  std::unordered_map<std::size_t, std::size_t> root_to_comp;
  comp_of_.resize(m_);
  local_of_.resize(m_);
  for (std::size_t v = 0; v < m_; ++v) {
    auto [it, fresh] = root_to_comp.emplace(uf.find(v), comps_.size());
    if (fresh) comps_.emplace_back();
    auto& c = comps_[it->second];
    comp_of_[v] = it->second;
    local_of_[v] = static_cast<Index>(c.vars.size());
    c.vars.push_back(v);
  }
  for (auto& bk : blocks_) {
    if (!bk.vars.empty()) bk.comp = comp_of_[bk.vars[0]];
  }
  std::vector<std::vector<char>> touches(comps_.size());
  for (auto& c : touches) c.assign(static_cast<std::size_t>(E_.rows()), 0);
  for (Index i = 0; i < E_.outerSize(); ++i) {
    for (decltype(E_)::InnerIterator it(E_, i); it; ++it) {
      touches[comp_of_[static_cast<std::size_t>(it.col())]][static_cast<std::size_t>(i)] = 1;
    }
  }
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    for (Index i = 0; i < E_.rows(); ++i) {
      if (touches[c][static_cast<std::size_t>(i)]) comps_[c].rows.push_back(i);
    }
  }
}

MatrixXd Ipm::apply_F(const Block& bk, const VectorXd& y) const {
  MatrixXd M = MatrixXd::Zero(bk.n, bk.n);
  for (std::size_t k = 0; k < bk.vars.size(); ++k) {
    const double v = y(static_cast<Index>(bk.vars[k]));
    if (v == 0.0) continue;
    for (const auto& e : bk.fv[k]) M(e.a, e.b) += e.coef * v;
  }
  return M;
}

void Ipm::add_adjoint(const Block& bk, const MatrixXd& M, VectorXd& out) const {
  for (std::size_t k = 0; k < bk.vars.size(); ++k) {
    double s = 0.0;
    for (const auto& e : bk.fv[k]) s += e.coef * M(e.a, e.b);
    out(static_cast<Index>(bk.vars[k])) += s;
  }
}

VectorXd Ipm::E_times(const VectorXd& y) const { return E_ * y; }
VectorXd Ipm::Et_times(const VectorXd& w) const { return E_.transpose() * w; }

bool Ipm::factor(const Iterate& it, const std::vector<MatrixXd>& Zi) {
  for (auto& c : comps_) {
    const auto mc = static_cast<Index>(c.vars.size());
    c.S.setZero(mc, mc);
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Block& bk = blocks_[k];
    if (bk.vars.empty()) continue;
    MatrixXd& S = comps_[bk.comp].S;
    const MatrixXd& X = it.X[k];
    const MatrixXd& Z = Zi[k];
    for (std::size_t u = 0; u < bk.vars.size(); ++u) {
      const auto& fu = bk.fv[u];
      const auto cu = static_cast<Index>(fu.size());
      MatrixXd Xg(bk.n, cu), Zg(cu, bk.n);
      for (Index q = 0; q < cu; ++q) {
        Xg.col(q) = fu[static_cast<std::size_t>(q)].coef * X.col(fu[static_cast<std::size_t>(q)].b);
        Zg.row(q) = Z.row(fu[static_cast<std::size_t>(q)].a);
      }
      const MatrixXd H = Xg * Zg;
      const Index lu = local_of_[bk.vars[u]];
      for (std::size_t v = 0; v < bk.vars.size(); ++v) {
        double s = 0.0;
        for (const auto& e : bk.fv[v]) s += e.coef * H(e.a, e.b);
        S(lu, local_of_[bk.vars[v]]) += s;
      }
    }
  }
  for (auto& c : comps_) {
    c.S = sym(c.S);
    const double dmax = std::max(1e-300, c.S.diagonal().maxCoeff());
    c.dinv_sqrt = c.S.diagonal().cwiseMax(1e-30 * dmax).cwiseSqrt().cwiseInverse();
    const MatrixXd scaled = c.dinv_sqrt.asDiagonal() * c.S * c.dinv_sqrt.asDiagonal();
    double delta = 1e-14;
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      MatrixXd reg = scaled;
      reg.diagonal().array() += delta;
      c.llt.compute(reg);
      ok = c.llt.info() == Eigen::Success;
      delta *= 1e3;
    }
    if (!ok) return false;
  }
  factor_rows();
  return true;
}

void Ipm::factor_rows() {
  const Index p = E_.rows();
  if (p == 0) return;
  K_.setZero(p, p);
  for (auto& c : comps_) {
    if (c.rows.empty()) continue;
    const auto mc = static_cast<Index>(c.vars.size());
    const auto pc = static_cast<Index>(c.rows.size());
    MatrixXd Et = MatrixXd::Zero(mc, pc);
    for (Index q = 0; q < pc; ++q) {
      for (decltype(E_)::InnerIterator it(E_, c.rows[static_cast<std::size_t>(q)]); it; ++it) {
        const auto v = static_cast<std::size_t>(it.col());
        if (comp_of_[v] == static_cast<std::size_t>(&c - comps_.data())) {
          Et(local_of_[v], q) = it.value();
        }
      }
    }
    Et = c.dinv_sqrt.asDiagonal() * Et;
    c.llt.matrixL().solveInPlace(Et);
    c.G = std::move(Et);
    MatrixXd Kc = MatrixXd::Zero(pc, pc);
    Kc.selfadjointView<Eigen::Lower>().rankUpdate(c.G.transpose());
    Kc = Kc.selfadjointView<Eigen::Lower>();
    for (Index a = 0; a < pc; ++a) {
      for (Index b = 0; b < pc; ++b) {
        K_(c.rows[static_cast<std::size_t>(a)], c.rows[static_cast<std::size_t>(b)]) += Kc(a, b);
      }
    }
  }
  const double kmax = std::max(1e-300, K_.diagonal().maxCoeff());
  kscale_ = K_.diagonal().cwiseMax(1e-30 * kmax).cwiseSqrt().cwiseInverse();
  MatrixXd reg = kscale_.asDiagonal() * K_ * kscale_.asDiagonal();
  reg.diagonal().array() += 1e-13;
  kfac_.compute(reg);
}

VectorXd Ipm::solve_K(const VectorXd& r) const {
  return kscale_.cwiseProduct(kfac_.solve(kscale_.cwiseProduct(r)));
}

void Ipm::solve_newton(const VectorXd& r1, const VectorXd& re, VectorXd& dy,
                       VectorXd& dw) const {
  const Index p = E_.rows();
  dy.resize(static_cast<Index>(m_));
  auto gather = [&](const Component& c, const VectorXd& v) {
    VectorXd out(static_cast<Index>(c.vars.size()));
    for (std::size_t k = 0; k < c.vars.size(); ++k) out(static_cast<Index>(k)) = v(static_cast<Index>(c.vars[k]));
    return out;
  };
  if (p == 0) {
    dw.resize(0);
    for (const auto& c : comps_) {
      const VectorXd s = c.solve(gather(c, r1));
      for (std::size_t k = 0; k < c.vars.size(); ++k) dy(static_cast<Index>(c.vars[k])) = s(static_cast<Index>(k));
    }
    return;
  }
  // rhs_w = E S^-1 r1 - re, using E S^-1 r1 = sum_c G_c' L_c^-1 r1_c.
  VectorXd rhs = -re;
  std::vector<VectorXd> half(comps_.size());
  for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
    const auto& c = comps_[ci];
    half[ci] = c.half(gather(c, r1));
    if (c.rows.empty()) continue;
    const VectorXd g = c.G.transpose() * half[ci];
    for (std::size_t q = 0; q < c.rows.size(); ++q) rhs(c.rows[q]) += g(static_cast<Index>(q));
  }
  dw = solve_K(rhs);
  for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
    const auto& c = comps_[ci];
    VectorXd t = half[ci];
    if (!c.rows.empty()) {
      VectorXd dwc(static_cast<Index>(c.rows.size()));
      for (std::size_t q = 0; q < c.rows.size(); ++q) dwc(static_cast<Index>(q)) = dw(c.rows[q]);
      t -= c.G * dwc;
    }
    t = c.half_back(std::move(t));
    for (std::size_t k = 0; k < c.vars.size(); ++k) dy(static_cast<Index>(c.vars[k])) = t(static_cast<Index>(k));
  }
}

/// Drops linearly dependent equality rows; flags inconsistent systems.
bool Ipm::presolve_rows(SolveResult& res) {
  const Index p = E_.rows();
  if (p == 0) return true;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(K_);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  if (rank == p) return true;
  std::vector<Index> keep;
  for (Index i = 0; i < rank; ++i) keep.push_back(qr.colsPermutation().indices()(i));
  std::sort(keep.begin(), keep.end());

  // Weighted least-norm solution of the kept rows, then check all rows.
  MatrixXd Kii(rank, rank);
  VectorXd fi(rank);
  for (Index a = 0; a < rank; ++a) {
    fi(a) = f_(keep[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < rank; ++b) Kii(a, b) = K_(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  }
  const VectorXd lam = Kii.ldlt().solve(fi);
  VectorXd wfull = VectorXd::Zero(p);
  for (Index a = 0; a < rank; ++a) wfull(keep[static_cast<std::size_t>(a)]) = lam(a);
  VectorXd ystar = VectorXd::Zero(static_cast<Index>(m_));
  const VectorXd etw = Et_times(wfull);
  for (const auto& c : comps_) {
    VectorXd g(static_cast<Index>(c.vars.size()));
    for (std::size_t k = 0; k < c.vars.size(); ++k) g(static_cast<Index>(k)) = etw(static_cast<Index>(c.vars[k]));
    const VectorXd s = c.solve(g);
    for (std::size_t k = 0; k < c.vars.size(); ++k) ystar(static_cast<Index>(c.vars[k])) = s(static_cast<Index>(k));
  }
  const VectorXd resid = E_times(ystar) - f_;
  if (resid.cwiseAbs().maxCoeff() > 1e-7 * (1.0 + f_.cwiseAbs().maxCoeff())) {
    res.status = SolveStatus::kInfeasible;
    res.message = "equality rows are inconsistent";
    return false;
  }

  std::vector<Eigen::Triplet<double>> trips;
  VectorXd f2(rank);
  for (Index a = 0; a < rank; ++a) {
    for (decltype(E_)::InnerIterator it(E_, keep[static_cast<std::size_t>(a)]); it; ++it) {
      trips.emplace_back(a, it.col(), it.value());
    }
    f2(a) = f_(keep[static_cast<std::size_t>(a)]);
  }
  E_.resize(rank, static_cast<Index>(m_));
  E_.setFromTriplets(trips.begin(), trips.end());
  E_.makeCompressed();
  f_ = f2;
  for (auto& c : comps_) c.rows.clear();
  for (Index i = 0; i < E_.outerSize(); ++i) {
    std::vector<std::size_t> seen;
    for (decltype(E_)::InnerIterator it(E_, i); it; ++it) {
      const auto c = comp_of_[static_cast<std::size_t>(it.col())];
      if (std::find(seen.begin(), seen.end(), c) == seen.end()) {
        seen.push_back(c);
        comps_[c].rows.push_back(i);
      }
    }
  }
  res.message = "dropped " + std::to_string(p - rank) + " dependent equality rows";
  factor_rows();
  return true;
}

SolveResult Ipm::run() {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  const std::size_t nb = blocks_.size();
  Index total_dim = 0;
  for (const auto& bk : blocks_) total_dim += bk.n;

  Iterate it;
  it.y = VectorXd::Zero(static_cast<Index>(m_));
  it.w = VectorXd::Zero(E_.rows());
  double normb = b_.norm();
  double normC = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const Block& bk = blocks_[k];
    double fmax = 0.0, bmax = 0.0;
    for (std::size_t v = 0; v < bk.vars.size(); ++v) {
      double fn = 0.0;
      for (const auto& e : bk.fv[v]) fn += e.coef * e.coef;
      fmax = std::max(fmax, std::sqrt(fn));
      bmax = std::max(bmax, (1.0 + std::abs(b_(static_cast<Index>(bk.vars[v])))) / (1.0 + std::sqrt(fn)));
    }
    const double rn = std::sqrt(static_cast<double>(bk.n));
    const double xi = std::max({10.0, rn, rn * bmax});
    const double eta = std::max({10.0, rn, bk.C.norm(), fmax});
    it.X.push_back(xi * MatrixXd::Identity(bk.n, bk.n));
    it.Z.push_back(eta * MatrixXd::Identity(bk.n, bk.n));
    normC += bk.C.squaredNorm();
  }
  normC = std::sqrt(normC);
  const double normf = f_.norm();

  std::vector<MatrixXd> Zi(nb);
  std::vector<Eigen::LLT<MatrixXd>> cholX(nb), cholZ(nb);
  bool presolved = false;
  std::string stop = "iteration limit reached";
  double pobj = 0.0, dobj = 0.0, pinf = 0.0, dinf = 0.0, relgap = 0.0;

  auto measure = [&]() {
    VectorXd rp = b_ - Et_times(it.w);
    double rd2 = 0.0;
    pobj = it.w.dot(f_);
    double xz = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      add_adjoint(blocks_[k], it.X[k], rp);
      const MatrixXd rd = blocks_[k].C + apply_F(blocks_[k], it.y) - it.Z[k];
      rd2 += rd.squaredNorm();
      pobj += (blocks_[k].C.array() * it.X[k].array()).sum();
      xz += (it.X[k].array() * it.Z[k].array()).sum();
    }
    const VectorXd re = f_ - E_times(it.y);
    dobj = b_.dot(it.y);
    pinf = rp.norm() / (1.0 + normb);
    dinf = (std::sqrt(rd2) + re.norm()) / (1.0 + normC + normf);
    relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    return xz;
  };

  int iter = 0;
  int flat = 0;
  double last_dobj = std::numeric_limits<double>::quiet_NaN();
  for (; iter < opts_.max_iter; ++iter) {
    const double xz = measure();
    if (opts_.verbose) {
      double xn = 0.0, zn = 0.0;
      for (std::size_t k = 0; k < nb; ++k) { xn = std::max(xn, it.X[k].norm()); zn = std::max(zn, it.Z[k].norm()); }
      std::fprintf(stderr, "ipm %3d pobj % .10e dobj % .10e gap %.2e pinf %.2e dinf %.2e |X| %.1e |Z| %.1e |w| %.1e |y| %.1e\n",
                   iter, pobj, dobj, relgap, pinf, dinf, xn, zn, it.w.norm(), it.y.norm());
    }
    if (relgap <= opts_.tol_gap && pinf <= opts_.tol_feas && dinf <= opts_.tol_feas) {
      stop.clear();
      break;
    }
    if (dinf <= opts_.tol_feas && relgap <= opts_.tol_near &&
        std::abs(dobj - last_dobj) <= 1e-9 * (1.0 + std::abs(dobj))) {
      if (++flat >= 10) {
        stop = "dual objective stalled";
        break;
      }
    } else {
      flat = 0;
    }
    last_dobj = dobj;
    double xnorm = it.w.norm();
    for (const auto& X : it.X) xnorm = std::max(xnorm, X.norm());
    // a diverging certificate proves infeasibility only if its normalized
    // objective stays negative; otherwise it is merely not attained
    const bool farkas = pobj < -1e-6 * xnorm;
    if (xnorm > 1e10 && !farkas && (dinf > opts_.tol_feas || relgap > opts_.tol_near)) {
      stop = "certificate iterates diverge without an infeasibility certificate";
      break;
    }
    if (xnorm > 1e10 && farkas && dinf > opts_.tol_feas) {
      res.status = SolveStatus::kInfeasible;
      res.message = "primal iterates diverge: no feasible moment vector";
      res.iterations = iter;
      res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return res;
    }
    if (it.y.norm() > 1e10 && pinf > opts_.tol_feas) {
      res.status = SolveStatus::kUnbounded;
      res.message = "dual iterates diverge: objective unbounded";
      res.iterations = iter;
      res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return res;
    }

    bool chol_ok = true;
    for (std::size_t k = 0; k < nb; ++k) {
      cholZ[k].compute(it.Z[k]);
      cholX[k].compute(it.X[k]);
      if (cholZ[k].info() != Eigen::Success || cholX[k].info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      Zi[k] = cholZ[k].solve(MatrixXd::Identity(blocks_[k].n, blocks_[k].n));
      Zi[k] = sym(Zi[k]);
    }
    if (!chol_ok || !factor(it, Zi)) {
      if (opts_.verbose) std::fprintf(stderr, "ipm breakdown: %s\n", chol_ok ? "schur" : "cholesky");
      stop = "numerical breakdown in the Newton system";
      break;
    }
    if (!presolved) {
      presolved = true;
      if (!presolve_rows(res)) {
        res.iterations = iter;
        res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
      }
      if (it.w.size() != E_.rows()) it.w = VectorXd::Zero(E_.rows());
    }

    const double mu = total_dim > 0 ? xz / static_cast<double>(total_dim) : 0.0;
    VectorXd rp = b_ - Et_times(it.w);
    std::vector<MatrixXd> rd(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      add_adjoint(blocks_[k], it.X[k], rp);
      rd[k] = blocks_[k].C + apply_F(blocks_[k], it.y) - it.Z[k];
    }
    const VectorXd re = f_ - E_times(it.y);

    // Q_k = R_k Z^-1 - X rd Z^-1 with R = sigma mu I - X Z - corr.
    auto direction = [&](double sigma, const std::vector<MatrixXd>* corr,
                         VectorXd& dy, VectorXd& dw, std::vector<MatrixXd>& dX,
                         std::vector<MatrixXd>& dZ) {
      std::vector<MatrixXd> Q(nb);
      VectorXd r1 = rp;
      for (std::size_t k = 0; k < nb; ++k) {
        MatrixXd q = sigma * mu * Zi[k] - it.X[k] - it.X[k] * rd[k] * Zi[k];
        if (corr) q -= (*corr)[k] * Zi[k];
        Q[k] = sym(q);
        add_adjoint(blocks_[k], Q[k], r1);
      }
      solve_newton(r1, re, dy, dw);
      // Iterative refinement against S dy + E'dw = r1, E dy = re, with S
      // applied through the blocks rather than its (regularized) factor.
      const double rhs_norm = r1.norm() + re.norm();
      for (int pass = 0; pass < opts_.refine_steps; ++pass) {
        VectorXd rho1 = r1 - Et_times(dw);
        for (std::size_t k = 0; k < nb; ++k) {
          add_adjoint(blocks_[k], -(it.X[k] * apply_F(blocks_[k], dy) * Zi[k]), rho1);
        }
        const VectorXd rho2 = re - E_times(dy);
        if (opts_.verbose && std::getenv("OCCUVAL_IPM_DEBUG")) {
          std::fprintf(stderr, "  refine %d rho %.2e rhs %.2e\n", pass, rho1.norm() + rho2.norm(), rhs_norm);
        }
        if (rho1.norm() + rho2.norm() <= 1e-14 * (1.0 + rhs_norm)) break;
        VectorXd ey, ew;
        solve_newton(rho1, rho2, ey, ew);
        dy += ey;
        dw += ew;
      }
      dX.resize(nb);
      dZ.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        const MatrixXd Fdy = apply_F(blocks_[k], dy);
        dZ[k] = Fdy + rd[k];
        dX[k] = Q[k] - sym(it.X[k] * Fdy * Zi[k]);
      }
    };
    auto steps = [&](const std::vector<MatrixXd>& dX, const std::vector<MatrixXd>& dZ) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = ap;
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(cholX[k], dX[k]));
        ad = std::min(ad, max_step(cholZ[k], dZ[k]));
      }
      return std::pair{ap, ad};
    };

    VectorXd dy, dw;
    std::vector<MatrixXd> dX, dZ;
    direction(0.0, nullptr, dy, dw, dX, dZ);
    auto [ap_a, ad_a] = steps(dX, dZ);
    ap_a = std::min(1.0, ap_a);
    ad_a = std::min(1.0, ad_a);
    double sigma = 0.0;
    if (total_dim > 0 && mu > 0.0) {
      double xz_aff = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        xz_aff += ((it.X[k] + ap_a * dX[k]).array() * (it.Z[k] + ad_a * dZ[k]).array()).sum();
      }
      sigma = std::clamp(std::pow(xz_aff / static_cast<double>(total_dim) / mu, 3.0), 0.0, 1.0);
    }
    std::vector<MatrixXd> corr(nb);
    for (std::size_t k = 0; k < nb; ++k) corr[k] = dX[k] * dZ[k];
    direction(sigma, &corr, dy, dw, dX, dZ);
    auto [ap, ad] = steps(dX, dZ);
    ap = std::min(1.0, opts_.step_fraction * ap);
    ad = std::min(1.0, opts_.step_fraction * ad);
    if (ap < 1e-12 && ad < 1e-12) {
      stop = "step length collapsed";
      break;
    }
    // Rounding can leave the full step just outside the cone; back off.
    auto shrink = [&](const std::vector<MatrixXd>& M, const std::vector<MatrixXd>& dM,
                      double a) {
      for (int tries = 0; tries < 30; ++tries, a *= 0.7) {
        bool pd = true;
        for (std::size_t k = 0; k < nb && pd; ++k) {
          Eigen::LLT<MatrixXd> t(sym(M[k] + a * dM[k]));
          pd = t.info() == Eigen::Success;
        }
        if (pd) return a;
      }
      return 0.0;
    };
    ap = shrink(it.X, dX, ap);
    ad = shrink(it.Z, dZ, ad);
    if (opts_.verbose && std::getenv("OCCUVAL_IPM_DEBUG")) {
      std::fprintf(stderr, "  steps ap %.2e ad %.2e sigma %.2e mu %.2e\n", ap, ad, sigma, mu);
    }
    if (ap == 0.0 && ad == 0.0) {
      stop = "step length collapsed";
      break;
    }
    for (std::size_t k = 0; k < nb; ++k) {
      it.X[k] = sym(it.X[k] + ap * dX[k]);
      it.Z[k] = sym(it.Z[k] + ad * dZ[k]);
    }
    it.w += ap * dw;
    it.y += ad * dy;
  }
  if (iter == opts_.max_iter) measure();
  if (opts_.verbose && std::getenv("OCCUVAL_IPM_DEBUG")) {
    for (std::size_t k = 0; k < nb; ++k) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> ez(it.Z[k]), ex(it.X[k]);
      std::fprintf(stderr, "block %-28s n=%3ld |X|=%.2e X[min,max]=[%.1e,%.1e] Z[min,max]=[%.1e,%.1e]\n",
                   p_.blocks[k].label.c_str(), static_cast<long>(blocks_[k].n), it.X[k].norm(),
                   ex.eigenvalues().minCoeff(), ex.eigenvalues().maxCoeff(),
                   ez.eigenvalues().minCoeff(), ez.eigenvalues().maxCoeff());
    }
  }

  res.iterations = iter;
  res.y = it.y;
  res.primal_objective = pobj + p_.objective_constant;
  res.dual_objective = dobj + p_.objective_constant;
  res.gap = std::abs(pobj - dobj);
  res.primal_infeasibility = pinf;
  res.dual_infeasibility = dinf;
  res.bound = res.dual_objective;
  if (stop.empty()) {
    res.status = SolveStatus::kOptimal;
  } else if (relgap <= opts_.tol_near && pinf <= opts_.tol_near_primal &&
             dinf <= opts_.tol_near) {
    res.status = SolveStatus::kNearOptimal;
    res.message = res.message.empty() ? stop : res.message + "; " + stop;
  } else {
    res.status = SolveStatus::kSolverFailure;
    res.message = stop;
  }
  res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

SolveResult SchurIpmSolver::solve_raw(const ConicProblem& p,
                                      const SolverOptions& opts) const {
  Ipm ipm(p, opts);
  return ipm.run();
}

}  // namespace occuval::sdp
