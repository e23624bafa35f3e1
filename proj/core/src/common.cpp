#include "distopt/common.hpp"

namespace distopt {

Group parse_group(std::string_view name) {
  if (name == "mD") return Group::mD;
  if (name == "nD") return Group::nD;
  if (name == "R") return Group::R;
  throw ValidationError("unknown group '" + std::string(name) + "' (expected mD, nD or R)");
}

Matchup parse_matchup(std::string_view name) {
  if (name == "primary_mD_nD") return Matchup::primary_mD_nD;
  if (name == "general_mD_R") return Matchup::general_mD_R;
  if (name == "general_nD_R") return Matchup::general_nD_R;
  throw ValidationError("unknown matchup '" + std::string(name) +
                        "' (expected primary_mD_nD, general_mD_R or general_nD_R)");
}

PrimaryRule parse_primary_rule(std::string_view name) {
  if (name == "closed") return PrimaryRule::closed;
  if (name == "open") return PrimaryRule::open;
  throw ValidationError("unknown primary rule '" + std::string(name) +
                        "' (expected closed or open)");
}

}  // namespace distopt
