#include "constikit/material_api.hpp"

#include <algorithm>
#include <sstream>

#include "constikit/errors.hpp"

namespace constikit {

const char* to_string(Regime r) { return r == Regime::SmallStrain ? "small" : "finite"; }

Regime regime_from_string(const std::string& s) {
  if (s == "small" || s == "small_strain") return Regime::SmallStrain;
  if (s == "finite" || s == "finite_strain") return Regime::FiniteStrain;
  throw ContractViolation("unknown regime '" + s + "' (expected 'small' or 'finite')");
}

std::vector<double> pack_state(const StateLayout& layout, double time, const UmatStress& stress,
                               const std::optional<UmatStrain>& stran,
                               std::span<const double> user) {
  const bool small = layout.regime == Regime::SmallStrain;
  if (small != stran.has_value()) {
    throw ContractViolation(small ? "pack_state: small-strain layout needs the total strain"
                                  : "pack_state: finite-strain layout stores no total strain");
  }
  if (static_cast<int>(user.size()) != layout.nstatv_user) {
    std::ostringstream msg;
    msg << "pack_state: " << user.size() << " user slots given, layout declares "
        << layout.nstatv_user;
    throw ContractViolation(msg.str());
  }
  std::vector<double> out(static_cast<std::size_t>(layout.total_length()), 0.0);
  out[StateLayout::kTimeSlot] = time;
  std::copy(stress.c.begin(), stress.c.end(), out.begin() + StateLayout::kStressSlot);
  if (small) std::copy(stran->c.begin(), stran->c.end(), out.begin() + StateLayout::kStrainSlot);
  std::copy(user.begin(), user.end(), out.begin() + layout.header_length());
  return out;
}

UnpackedState unpack_state(const StateLayout& layout, std::span<const double> state) {
  if (static_cast<int>(state.size()) != layout.total_length()) {
    std::ostringstream msg;
    msg << "unpack_state: state has " << state.size() << " slots, layout expects "
        << layout.total_length();
    throw ContractViolation(msg.str());
  }
  UnpackedState out;
  out.time = state[StateLayout::kTimeSlot];
  std::copy_n(state.begin() + StateLayout::kStressSlot, 6, out.stress.c.begin());
  if (layout.regime == Regime::SmallStrain) {
    UmatStrain e;
    std::copy_n(state.begin() + StateLayout::kStrainSlot, 6, e.c.begin());
    out.stran = e;
  }
  out.user.assign(state.begin() + layout.header_length(), state.end());
  return out;
}

}  // namespace constikit
