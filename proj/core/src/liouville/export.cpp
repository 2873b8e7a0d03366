#include "occuval/liouville/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace occuval::liouville {

using nlohmann::json;

namespace {

json terms_json(const std::vector<sdp::Term>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back(json::array({t.var, t.coeff}));
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("I/O error: cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("I/O error: write failed for " + path.string());
}

}  // namespace

std::string relaxation_json(const MomentRelaxation& r) {
  const auto& p = r.problem;
  json j;
  j["schema"] = kRelaxationSchema;
  j["hash"] = sdp::hex64(p.hash());
  j["order"] = r.order;
  j["sparse"] = r.sparse;
  j["time_chart"] = to_string(r.chart);

  json measures = json::array();
  json variables = json::array();
  for (const auto& mu : r.measures) {
    const auto& d = mu.decl();
    json cluster = json::array();
    for (const auto& v : d.cluster) cluster.push_back(v.name());
    json support = json::array();
    for (const auto& g : d.support.inequalities) support.push_back(g.to_string());
    json m = {{"name", d.name},
              {"role", to_string(d.role)},
              {"subsystem", d.subsystem},
              {"cluster", cluster},
              {"support", support},
              {"offset", mu.offset()},
              {"size", mu.size()}};
    if (d.cell) m["cell"] = *d.cell;
    measures.push_back(std::move(m));
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const auto& e = mu.moments().exponents(k);
      variables.push_back({{"index", mu.offset() + k},
                           {"measure", d.name},
                           {"exponents", std::vector<int>(e.begin(), e.end())}});
    }
  }
  j["measures"] = std::move(measures);
  j["variables"] = std::move(variables);

  json rows = json::array();
  for (const auto& row : p.rows) {
    rows.push_back({{"kind", sdp::to_string(row.kind)},
                    {"label", row.label},
                    {"rhs", row.rhs},
                    {"terms", terms_json(row.terms)}});
  }
  j["rows"] = std::move(rows);

  json blocks = json::array();
  for (const auto& b : p.blocks) {
    json entries = json::array();
    for (const auto& e : b.entries) {
      entries.push_back({{"row", e.row},
                         {"col", e.col},
                         {"constant", e.constant},
                         {"terms", terms_json(e.terms)}});
    }
    blocks.push_back({{"label", b.label}, {"side", b.side}, {"entries", entries}});
  }
  j["blocks"] = std::move(blocks);
  j["objective"] = {{"sense", "maximize"},
                    {"constant", p.objective_constant},
                    {"terms", terms_json(p.objective)}};
  j["warnings"] = r.warnings;
  return j.dump(1) + "\n";
}

std::string sdpa_text(const sdp::ConicProblem& p) {
  p.validate();
  std::ostringstream os;
  os << "* occuval conic problem, hash " << sdp::hex64(p.hash()) << "\n";
  os << "* minimize c'y s.t. sum F_i y_i - F_0 psd; c = -objective";
  if (p.objective_constant != 0.0) {
    os << " (constant " << num(p.objective_constant) << " omitted)";
  }
  os << "\n";
  os << "* equality rows are split into pairs of LP entries in block 1\n";
  const bool lp = !p.rows.empty();
  os << p.num_vars << "\n";
  os << p.blocks.size() + (lp ? 1 : 0) << "\n";
  if (lp) os << "-" << 2 * p.rows.size();
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    os << ((lp || k > 0) ? " " : "") << p.blocks[k].side;
  }
  os << "\n";
  std::vector<double> c(p.num_vars, 0.0);
  for (const auto& t : p.objective) c[t.var] -= t.coeff;
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << num(c[i]);
  os << "\n";

  // F_0 = -C for the PSD blocks; LP rows read E y - f >= 0 and f - E y >= 0.
  std::size_t blk = 1;
  if (lp) {
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      const auto& row = p.rows[r];
      const std::size_t a = 2 * r + 1, b = 2 * r + 2;
      if (row.rhs != 0.0) {
        os << "0 " << blk << " " << a << " " << a << " " << num(row.rhs) << "\n";
        os << "0 " << blk << " " << b << " " << b << " " << num(-row.rhs) << "\n";
      }
      for (const auto& t : row.terms) {
        os << t.var + 1 << " " << blk << " " << a << " " << a << " " << num(t.coeff) << "\n";
        os << t.var + 1 << " " << blk << " " << b << " " << b << " " << num(-t.coeff) << "\n";
      }
    }
    ++blk;
  }
  for (const auto& b : p.blocks) {
    for (const auto& e : b.entries) {
      if (e.constant != 0.0) {
        os << "0 " << blk << " " << e.row + 1 << " " << e.col + 1 << " "
           << num(-e.constant) << "\n";
      }
      for (const auto& t : e.terms) {
        os << t.var + 1 << " " << blk << " " << e.row + 1 << " " << e.col + 1
           << " " << num(t.coeff) << "\n";
      }
    }
    ++blk;
  }
  return os.str();
}

void write_relaxation_json(const MomentRelaxation& r,
                           const std::filesystem::path& path) {
  write_text(relaxation_json(r), path);
}

void write_sdpa(const sdp::ConicProblem& p, const std::filesystem::path& path) {
  write_text(sdpa_text(p), path);
}

}  // namespace occuval::liouville
