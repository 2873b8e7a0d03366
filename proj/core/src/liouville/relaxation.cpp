#include "occuval/liouville/relaxation.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace occuval::liouville {

using poly::Monomial;
using poly::Polynomial;
using poly::Var;

std::string to_string(TimeChart c) {
  return c == TimeChart::kUnit ? "unit" : "symmetric";
}

std::pair<double, double> chart_interval(TimeChart c) {
  return c == TimeChart::kUnit ? std::pair{0.0, 1.0} : std::pair{-1.0, 1.0};
}

model::PiecewiseSystem to_chart(const model::PiecewiseSystem& sys, TimeChart c) {
  if (c == TimeChart::kUnit) return sys;
  // s = (sigma + 1) / 2 and dx/dsigma = f / 2.
  const Polynomial sigma = Polynomial::variable(sys.time);
  const std::unordered_map<Var, Polynomial> sub{{sys.time, 0.5 * (sigma + 1.0)}};
  model::PiecewiseSystem out = sys;
  for (auto& cell : out.cells) {
    for (auto& f : cell.field) {
      if (f.degree_in(sys.time) > 0) f = f.substitute(sub);
      f = 0.5 * f;
    }
    for (auto& g : cell.guard.inequalities) {
      if (g.degree_in(sys.time) > 0) g = g.substitute(sub);
    }
  }
  return out;
}

const MomentSpace& MomentRelaxation::measure(std::string_view name) const {
  for (const auto& m : measures) {
    if (m.name() == name) return m;
  }
  throw AssemblyError("no measure named '" + std::string(name) + "'");
}

namespace {

Polynomial lift(const Polynomial& p, const poly::Universe& u) {
  return p.with_universe(poly::universe_union(u, p.universe()));
}

void add_unit_box(model::SemialgebraicSet& s, const std::vector<Var>& vars) {
  for (Var v : vars) {
    const Polynomial x = Polynomial::variable(v);
    s.inequalities.push_back(1.0 - x * x);
  }
}

void append(model::SemialgebraicSet& s, const model::SemialgebraicSet& t) {
  s.inequalities.insert(s.inequalities.end(), t.inequalities.begin(),
                        t.inequalities.end());
}

struct TestFunction {
  Monomial v;
  std::vector<Polynomial> generator;  // L_j v per cell
};

std::vector<TestFunction> test_functions(const model::PiecewiseSystem& sys,
                                         int d) {
  std::vector<Var> vars{sys.time};
  vars.insert(vars.end(), sys.states.begin(), sys.states.end());
  const poly::MonomialBasis cand(vars, 2 * d + 1);
  poly::Universe u = sys.universe();
  for (const auto& c : sys.cells) {
    for (const auto& f : c.field) u = poly::universe_union(u, f.universe());
  }
  std::vector<std::vector<Polynomial>> fields;
  for (const auto& c : sys.cells) {
    std::vector<Polynomial> fs;
    for (const auto& f : c.field) fs.push_back(lift(f, u));
    fields.push_back(std::move(fs));
  }

  std::vector<TestFunction> out;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    const Monomial v = cand.monomial(k);
    const int ds = v.exponent(sys.time);
    if (v.degree() - ds > 2 * d) continue;
    const Polynomial vp = Polynomial::monomial(v, 1.0, u);
    TestFunction tf{v, {}};
    bool ok = true;
    for (const auto& fs : fields) {
      Polynomial lv = vp.differentiate(sys.time);
      for (std::size_t i = 0; i < sys.states.size(); ++i) {
        if (v.exponent(sys.states[i]) == 0) continue;
        lv += vp.differentiate(sys.states[i]) * fs[i];
      }
      if (lv.degree() > 2 * d) {
        ok = false;
        break;
      }
      tf.generator.push_back(std::move(lv));
    }
    if (ok) out.push_back(std::move(tf));
  }
  return out;
}

std::string monomial_string(const Monomial& m) {
  if (m.is_constant()) return "1";
  std::vector<Var> vs;
  for (const auto& f : m.factors()) vs.push_back(f.first);
  return Polynomial::monomial(m, 1.0, poly::make_universe(vs)).to_string();
}

/// v(value, x) for a monomial v and value in {-1, 0, 1}.
Polynomial at_time(const Monomial& v, Var time, double value) {
  const int e = v.exponent(time);
  if (e > 0 && value == 0.0) return Polynomial(0.0);
  const double coeff = (value < 0.0 && e % 2 == 1) ? -1.0 : 1.0;
  std::vector<Monomial::Factor> fs;
  for (const auto& f : v.factors()) {
    if (f.first != time) fs.push_back(f);
  }
  Monomial m(std::move(fs));
  std::vector<Var> vs;
  for (const auto& f : m.factors()) vs.push_back(f.first);
  return Polynomial::monomial(m, coeff, poly::make_universe(vs));
}

void accumulate(std::map<std::size_t, double>& acc,
                const std::vector<sdp::Term>& terms, double sign) {
  for (const auto& t : terms) acc[t.var] += sign * t.coeff;
}

std::vector<sdp::Term> flatten(const std::map<std::size_t, double>& acc) {
  std::vector<sdp::Term> out;
  for (const auto& [v, c] : acc) {
    if (c != 0.0) out.push_back({v, c});
  }
  return out;
}

}  // namespace

std::size_t declare_measures(const Subsystem& sub, const std::string& prefix,
                             const model::SemialgebraicSet& input_set, int d,
                             std::size_t offset, std::vector<MomentSpace>& out,
                             SubsystemMeasures& ids, TimeChart chart) {
  const auto& sys = sub.system;
  {
    MeasureDecl m{prefix + "0", MeasureRole::kInitial, sys.states, {}, sub.name, {}};
    append(m.support, sub.initial_set);
    add_unit_box(m.support, sys.states);
    ids.initial = out.size();
    out.emplace_back(std::move(m), d, offset);
    offset += out.back().size();
  }
  ids.occupation.clear();
  for (std::size_t j = 0; j < sys.cells.size(); ++j) {
    std::vector<Var> cluster{sys.time};
    cluster.insert(cluster.end(), sys.states.begin(), sys.states.end());
    cluster.insert(cluster.end(), sys.inputs.begin(), sys.inputs.end());
    MeasureDecl m{prefix + std::to_string(j + 1), MeasureRole::kOccupation,
                  cluster, {}, sub.name, j};
    const Polynomial s = Polynomial::variable(sys.time);
    m.support.inequalities.push_back(chart == TimeChart::kUnit ? s * (1.0 - s)
                                                               : 1.0 - s * s);
    append(m.support, sub.state_set);
    append(m.support, sys.cells[j].guard);
    append(m.support, input_set);
    add_unit_box(m.support, sys.states);
    add_unit_box(m.support, sys.inputs);
    ids.occupation.push_back(out.size());
    out.emplace_back(std::move(m), d, offset);
    offset += out.back().size();
  }
  {
    MeasureDecl m{prefix + "T", MeasureRole::kTerminal, sys.states, {}, sub.name, {}};
    append(m.support, sub.terminal_set);
    add_unit_box(m.support, sys.states);
    ids.terminal = out.size();
    out.emplace_back(std::move(m), d, offset);
    offset += out.back().size();
  }
  return offset;
}

std::vector<Polynomial> liouville_test_functions(
    const model::PiecewiseSystem& sys, int d) {
  std::vector<Polynomial> out;
  for (const auto& tf : test_functions(sys, d)) {
    std::vector<Var> vs{sys.time};
    vs.insert(vs.end(), sys.states.begin(), sys.states.end());
    out.push_back(Polynomial::monomial(tf.v, 1.0, poly::make_universe(vs)));
  }
  return out;
}

std::vector<sdp::EqualityRow> liouville_rows(
    const model::PiecewiseSystem& sys, int d,
    const std::vector<MomentSpace>& measures, const SubsystemMeasures& ids,
    TimeChart chart) {
  if (ids.occupation.size() != sys.cells.size()) {
    throw AssemblyError("one occupation measure per cell is required");
  }
  const MomentSpace& mu0 = measures.at(ids.initial);
  const MomentSpace& muT = measures.at(ids.terminal);
  const auto [s0, s1] = chart_interval(chart);
  std::vector<sdp::EqualityRow> rows;
  for (const auto& tf : test_functions(sys, d)) {
    std::map<std::size_t, double> acc;
    accumulate(acc, muT.integrate(at_time(tf.v, sys.time, s1)), 1.0);
    accumulate(acc, mu0.integrate(at_time(tf.v, sys.time, s0)), -1.0);
    for (std::size_t j = 0; j < sys.cells.size(); ++j) {
      accumulate(acc, measures.at(ids.occupation[j]).integrate(tf.generator[j]), -1.0);
    }
    auto terms = flatten(acc);
    if (terms.empty()) continue;
    rows.push_back({std::move(terms), 0.0, sdp::RowKind::kLiouville,
                    "liouville:" + muT.decl().subsystem + ":" +
                        monomial_string(tf.v)});
  }
  return rows;
}

std::vector<sdp::EqualityRow> marginal_rows(
    const std::vector<MomentSpace>& measures, const SubsystemMeasures& plant,
    const SubsystemMeasures& reference, Var plant_time, Var reference_time,
    const std::vector<Var>& coupled, const poly::PolyVector& output_map,
    int d) {
  if (coupled.size() != output_map.size()) {
    throw AssemblyError("coupled variables and output map differ in length");
  }
  std::vector<Var> vars{plant_time};
  vars.insert(vars.end(), coupled.begin(), coupled.end());
  const poly::MonomialBasis basis(vars, 2 * d);
  std::unordered_map<Var, Polynomial> image;
  for (std::size_t k = 0; k < coupled.size(); ++k) image.emplace(coupled[k], output_map[k]);
  if (plant_time != reference_time) {
    image.emplace(plant_time, Polynomial::variable(reference_time));
  }
  std::vector<sdp::EqualityRow> rows;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Monomial m = basis.monomial(k);
    std::vector<Var> used;
    for (const auto& f : m.factors()) used.push_back(f.first);
    const Polynomial mp = m.is_constant()
                              ? Polynomial(1.0)
                              : Polynomial::monomial(m, 1.0, poly::make_universe(used));
    const Polynomial mr = image.empty() ? mp : mp.substitute(image);
    if (mr.degree() > 2 * d) {
      throw AssemblyError("output map image of " + mp.to_string() +
                          " exceeds the moment truncation");
    }
    std::map<std::size_t, double> acc;
    for (auto j : plant.occupation) accumulate(acc, measures.at(j).integrate(mp), 1.0);
    for (auto j : reference.occupation) accumulate(acc, measures.at(j).integrate(mr), -1.0);
    auto terms = flatten(acc);
    if (terms.empty()) continue;
    rows.push_back({std::move(terms), 0.0, sdp::RowKind::kMarginal,
                    "marginal:" + monomial_string(m)});
  }
  return rows;
}

int minimum_order(const ValidationProblem& prob) {
  int d = 1;
  d = std::max(d, (std::max(0, prob.terminal_cost.degree()) + 1) / 2);
  d = std::max(d, (std::max(0, prob.running_cost.degree()) + 1) / 2);
  return d;
}

MomentRelaxation assemble_relaxation(const ValidationProblem& input, int d,
                                     bool sparse) {
  return assemble_relaxation(input, d, RelaxationOptions{sparse, TimeChart::kUnit});
}

MomentRelaxation assemble_relaxation(const ValidationProblem& input, int d,
                                     const RelaxationOptions& opts) {
  input.validate();
  const bool sparse = opts.sparse;
  const TimeChart chart = opts.chart;
  const int dmin = minimum_order(input);
  if (d < dmin) {
    throw AssemblyError("relaxation order " + std::to_string(d) +
                        " is below the minimum admissible order " +
                        std::to_string(dmin));
  }
  const bool split = sparse && input.split.has_value();
  ValidationProblem prob = split ? input : merge_split(input);
  prob.plant.system = to_chart(prob.plant.system, chart);
  if (split) prob.split->reference.system = to_chart(prob.split->reference.system, chart);
  Polynomial running = prob.running_cost;
  if (chart == TimeChart::kSymmetric && !running.is_zero()) {
    // ds = dsigma / 2
    const Polynomial sigma = Polynomial::variable(prob.plant.system.time);
    if (running.degree_in(prob.plant.system.time) > 0) {
      running = running.substitute({{prob.plant.system.time, 0.5 * (sigma + 1.0)}});
    }
    running = 0.5 * running;
  }

  MomentRelaxation r;
  r.order = d;
  r.sparse = split;
  r.chart = chart;
  std::size_t offset = declare_measures(prob.plant, "mu", prob.input_set, d, 0,
                                        r.measures, r.plant, chart);
  if (split) {
    SubsystemMeasures ref;
    offset = declare_measures(prob.split->reference, "nu", {}, d, offset,
                              r.measures, ref, chart);
    r.reference = ref;
  }

  auto& cp = r.problem;
  cp.num_vars = offset;
  cp.var_names.reserve(offset);
  for (const auto& mu : r.measures) {
    for (std::size_t k = 0; k < mu.size(); ++k) {
      cp.var_names.push_back(mu.name() + "[" +
                             monomial_string(mu.moments().monomial(k)) + "]");
    }
  }

  for (const auto& mu : r.measures) {
    BlockSummary s{mu.name(), mu.decl().cluster.size(), 0, 0, mu.size()};
    auto mm = moment_matrix(mu, d);
    s.moment_side = mm.side;
    cp.blocks.push_back(std::move(mm));
    for (const auto& g : mu.decl().support.inequalities) {
      auto lb = localizing_matrix(mu, g, d);
      if (!lb) {
        r.warnings.push_back("measure " + mu.name() + ": constraint " +
                             g.to_string() + " of degree " +
                             std::to_string(g.degree()) + " exceeds 2d = " +
                             std::to_string(2 * d) + " and was skipped");
        continue;
      }
      cp.blocks.push_back(std::move(*lb));
      ++s.localizing_blocks;
    }
    r.summary.push_back(std::move(s));
  }

  auto mass_row = [&](const MomentSpace& mu) {
    cp.rows.push_back({{{mu.var(Monomial()), 1.0}}, 1.0, sdp::RowKind::kMass,
                       "mass:" + mu.name()});
  };
  mass_row(r.measures[r.plant.initial]);
  if (r.reference) mass_row(r.measures[r.reference->initial]);

  for (auto& row : liouville_rows(prob.plant.system, d, r.measures, r.plant, chart)) {
    cp.rows.push_back(std::move(row));
  }
  if (split) {
    for (auto& row : liouville_rows(prob.split->reference.system, d, r.measures,
                                    *r.reference, chart)) {
      cp.rows.push_back(std::move(row));
    }
    for (auto& row :
         marginal_rows(r.measures, r.plant, *r.reference, prob.plant.system.time,
                       prob.split->reference.system.time, prob.split->coupled,
                       prob.split->output_map, d)) {
      cp.rows.push_back(std::move(row));
    }
  }

  std::map<std::size_t, double> obj;
  accumulate(obj, r.measures[r.plant.terminal].integrate(prob.terminal_cost), 1.0);
  if (!running.is_zero()) {
    for (auto j : r.plant.occupation) {
      accumulate(obj, r.measures[j].integrate(running), 1.0);
    }
  }
  cp.objective = flatten(obj);
  cp.validate();
  return r;
}

}  // namespace occuval::liouville
