#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace distopt {

// Thrown for malformed inputs: bad scenario files, infeasible plans, parameter
// values outside their documented domain. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a computation cannot proceed numerically: non-convergence,
// overflow, a perturbation step that cannot be made feasible. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Voter groups. mD: minority Democrats, nD: nonminority Democrats,
// R: nonminority Republicans.
enum class Group : int { mD = 0, nD = 1, R = 2 };

inline constexpr std::array<Group, 3> kGroups{Group::mD, Group::nD, Group::R};
inline constexpr std::size_t kGroupCount = 3;

constexpr std::size_t index_of(Group g) { return static_cast<std::size_t>(g); }

constexpr std::string_view group_name(Group g) {
  switch (g) {
    case Group::mD: return "mD";
    case Group::nD: return "nD";
    case Group::R: return "R";
  }
  return "?";
}

Group parse_group(std::string_view name);

// The three head-to-head contests. The primary pits the minority-Democrat
// candidate against the nonminority-Democrat candidate; each general pits the
// surviving Democrat against the Republican candidate.
enum class Matchup : int {
  primary_mD_nD = 0,
  general_mD_R = 1,
  general_nD_R = 2,
};

inline constexpr std::array<Matchup, 3> kMatchups{
    Matchup::primary_mD_nD, Matchup::general_mD_R, Matchup::general_nD_R};

constexpr std::size_t index_of(Matchup m) { return static_cast<std::size_t>(m); }

constexpr std::string_view matchup_name(Matchup m) {
  switch (m) {
    case Matchup::primary_mD_nD: return "primary_mD_nD";
    case Matchup::general_mD_R: return "general_mD_R";
    case Matchup::general_nD_R: return "general_nD_R";
  }
  return "?";
}

Matchup parse_matchup(std::string_view name);

// Who votes in the primary: closed restricts it to the two Democratic groups,
// open admits everyone. Generals always use the full electorate.
enum class PrimaryRule : int { closed = 0, open = 1 };

constexpr std::string_view primary_rule_name(PrimaryRule r) {
  return r == PrimaryRule::closed ? "closed" : "open";
}

PrimaryRule parse_primary_rule(std::string_view name);

// One double per voter group, indexable by Group.
struct GroupVals {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  constexpr GroupVals() = default;
  constexpr GroupVals(double md, double nd, double r) : v{md, nd, r} {}

  constexpr double& operator[](Group g) { return v[index_of(g)]; }
  constexpr double operator[](Group g) const { return v[index_of(g)]; }

  constexpr double sum() const { return v[0] + v[1] + v[2]; }

  friend constexpr bool operator==(const GroupVals&, const GroupVals&) = default;
};

// One value per matchup, indexable by Matchup.
template <typename T>
struct PerMatchup {
  std::array<T, 3> v{};

  constexpr T& operator[](Matchup m) { return v[index_of(m)]; }
  constexpr const T& operator[](Matchup m) const { return v[index_of(m)]; }
};

// Subset of groups admitted to a contest.
class Electorate {
 public:
  static constexpr Electorate full() { return Electorate{{true, true, true}}; }
  // Closed Democratic primary: minority and nonminority Democrats only.
  static constexpr Electorate democratic_primary() {
    return Electorate{{true, true, false}};
  }

  constexpr bool contains(Group g) const { return in_[index_of(g)]; }

  // The electorate that votes in `m` under primary rule `rule`.
  static constexpr Electorate for_matchup(Matchup m, PrimaryRule rule) {
    if (m == Matchup::primary_mD_nD && rule == PrimaryRule::closed) {
      return democratic_primary();
    }
    return full();
  }

  friend constexpr bool operator==(const Electorate&, const Electorate&) = default;

 private:
  constexpr explicit Electorate(std::array<bool, 3> in) : in_(in) {}
  std::array<bool, 3> in_;
};

}  // namespace distopt
