#pragma once

#include <string>

namespace smile {

/// An asymptotic implied-volatility (or price) value, tagged with the
/// formula that produced it and the regime in which it is valid.
struct AsymptoticQuote {
  double value = 0.0;
  std::string formula;  ///< identifier, e.g. "thm2.2-general", "cw-right"
  std::string regime;   ///< textual validity condition
  double kappa = 0.0;   ///< inputs echo
  double t = 0.0;
  double aux = 0.0;  ///< formula-dependent auxiliary (L, p*, f(a), ...)
};

}  // namespace smile
