#include "occuval/liouville/moments.hpp"

#include <algorithm>

namespace occuval::liouville {

using poly::Exponents;

std::string to_string(MeasureRole r) {
  switch (r) {
    case MeasureRole::kInitial: return "initial";
    case MeasureRole::kOccupation: return "occupation";
    case MeasureRole::kTerminal: return "terminal";
  }
  return "?";
}

MomentSpace::MomentSpace(MeasureDecl decl, int order, std::size_t offset)
    : decl_(std::move(decl)),
      order_(order),
      offset_(offset),
      moments_(decl_.cluster, 2 * order) {
  if (order < 0) throw AssemblyError("relaxation order must be >= 0");
}

std::size_t MomentSpace::var(const Exponents& alpha) const {
  auto idx = moments_.index_of(alpha);
  if (!idx) {
    throw AssemblyError("moment of degree > " + std::to_string(2 * order_) +
                        " requested from measure '" + decl_.name + "'");
  }
  return offset_ + *idx;
}

Exponents MomentSpace::exponents(const poly::Monomial& m) const {
  Exponents e(decl_.cluster.size(), 0);
  for (const auto& [v, p] : m.factors()) {
    auto it = std::find(decl_.cluster.begin(), decl_.cluster.end(), v);
    if (it == decl_.cluster.end()) {
      throw AssemblyError("variable '" + v.name() +
                          "' is not in the cluster of measure '" + decl_.name +
                          "'");
    }
    e[static_cast<std::size_t>(it - decl_.cluster.begin())] =
        static_cast<std::uint8_t>(p);
  }
  return e;
}

std::size_t MomentSpace::var(const poly::Monomial& m) const {
  return var(exponents(m));
}

std::vector<sdp::Term> MomentSpace::integrate(const poly::Polynomial& p) const {
  std::vector<sdp::Term> out;
  out.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) out.push_back({var(m), c});
  std::sort(out.begin(), out.end(),
            [](const sdp::Term& a, const sdp::Term& b) { return a.var < b.var; });
  return out;
}

namespace {

Exponents add(const Exponents& a, const Exponents& b) {
  Exponents r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] = static_cast<std::uint8_t>(a[i] + b[i]);
  }
  return r;
}

}  // namespace

sdp::PsdBlock moment_matrix(const MomentSpace& mu, int d) {
  if (d > mu.order()) throw AssemblyError("moment matrix order exceeds the moment truncation");
  const std::size_t n = mu.moments().prefix_size(d);
  sdp::PsdBlock b;
  b.label = mu.name() + ":moment";
  b.side = n;
  b.entries.reserve(n * (n + 1) / 2);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const auto e = add(mu.moments().exponents(i), mu.moments().exponents(j));
      b.entries.push_back({i, j, {{mu.var(e), 1.0}}, 0.0});
    }
  }
  return b;
}

std::optional<sdp::PsdBlock> localizing_matrix(const MomentSpace& mu,
                                               const poly::Polynomial& g,
                                               int d) {
  const int dg = std::max(0, g.degree());
  if (dg > 2 * d) return std::nullopt;
  if (d > mu.order()) throw AssemblyError("localizing order exceeds the moment truncation");
  const int k = d - (dg + 1) / 2;
  std::vector<std::pair<Exponents, double>> gt;
  for (const auto& [m, c] : g.terms()) gt.emplace_back(mu.exponents(m), c);

  const std::size_t n = mu.moments().prefix_size(k);
  sdp::PsdBlock b;
  b.label = mu.name() + ":localize[" + g.to_string() + "]";
  b.side = n;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const auto ab = add(mu.moments().exponents(i), mu.moments().exponents(j));
      sdp::BlockEntry entry{i, j, {}, 0.0};
      for (const auto& [ge, gc] : gt) entry.terms.push_back({mu.var(add(ab, ge)), gc});
      std::sort(entry.terms.begin(), entry.terms.end(),
                [](const sdp::Term& a, const sdp::Term& c) { return a.var < c.var; });
      b.entries.push_back(std::move(entry));
    }
  }
  return b;
}

}  // namespace occuval::liouville
