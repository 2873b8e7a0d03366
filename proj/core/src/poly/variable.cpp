#include "occuval/poly/variable.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace occuval::poly {
namespace {

struct Registry {
  std::mutex mutex;
  // deque keeps references stable while new names are appended.
  std::deque<std::string> names;
  std::unordered_map<std::string, std::uint32_t> ids;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Var::Var(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("variable name is empty");
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.ids.find(std::string(name));
  if (it != r.ids.end()) {
    id_ = it->second;
    return;
  }
  id_ = static_cast<std::uint32_t>(r.names.size());
  r.names.emplace_back(name);
  r.ids.emplace(std::string(name), id_);
}

const std::string& Var::name() const {
  static const std::string kInvalidName = "<invalid>";
  if (!valid()) return kInvalidName;
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.names[id_];
}

Universe make_universe(std::vector<Var> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

Universe universe_union(const Universe& a, const Universe& b) {
  Universe out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

bool universe_contains(const Universe& u, Var v) {
  return std::binary_search(u.begin(), u.end(), v);
}

bool universe_subset(const Universe& small, const Universe& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<Var> make_vars(std::initializer_list<std::string_view> names) {
  std::vector<Var> out;
  out.reserve(names.size());
  for (auto n : names) out.emplace_back(n);
  return out;
}

}  // namespace occuval::poly
