#pragma once

namespace sbg {

enum class Orientation { Infimum, Supremum };

/// (terminal value, running extremum, time the extremum is attained) of a
/// path over [0, T]. For infimum orientation, extremum <= min(0, terminal);
/// mirrored for supremum.
struct ExtremumTriplet {
  double terminal = 0.0;
  double extremum = 0.0;
  double tau = 0.0;
  Orientation orientation = Orientation::Infimum;
};

/// (x, m, tau) -> (-x, -m, tau): maps the infimum triplet of -X to the
/// supremum triplet of X.
inline ExtremumTriplet to_supremum(const ExtremumTriplet& t) {
  return {-t.terminal, -t.extremum, t.tau, Orientation::Supremum};
}

}  // namespace sbg
