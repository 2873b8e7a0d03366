#pragma once

#include <compare>
#include <functional>
#include <initializer_list>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace occuval::poly {

/// Interned polynomial indeterminate. Two Vars constructed from the same name
/// are the same variable; the process-wide registry is thread safe.
class Var {
 public:
  Var() = default;
  explicit Var(std::string_view name);

  std::uint32_t id() const { return id_; }
  const std::string& name() const;
  bool valid() const { return id_ != kInvalid; }

  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var&, const Var&) = default;

 private:
  static constexpr std::uint32_t kInvalid = 0xffffffffu;
  std::uint32_t id_ = kInvalid;
};

/// Ordered (by interning id) duplicate-free variable list.
using Universe = std::vector<Var>;

Universe make_universe(std::vector<Var> vars);
Universe universe_union(const Universe& a, const Universe& b);
bool universe_contains(const Universe& u, Var v);
bool universe_subset(const Universe& small, const Universe& big);

std::vector<Var> make_vars(std::initializer_list<std::string_view> names);

}  // namespace occuval::poly

template <>
struct std::hash<occuval::poly::Var> {
  std::size_t operator()(const occuval::poly::Var& v) const noexcept {
    return std::hash<std::uint32_t>{}(v.id());
  }
};
