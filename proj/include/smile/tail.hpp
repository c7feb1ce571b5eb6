#pragma once

namespace smile {

enum class TailSide { right, left };
enum class TailMethod { closed_sum, quadrature, asymptotic, monte_carlo };

/// A tail probability with provenance and an absolute error bound.
/// log_value stays usable when value underflows to zero.
struct TailEstimate {
  double value;
  double log_value;
  TailSide side;
  TailMethod method;
  double abs_error_bound;
};

inline const char* tail_method_name(TailMethod m) {
  switch (m) {
    case TailMethod::closed_sum: return "closed-sum";
    case TailMethod::quadrature: return "quadrature";
    case TailMethod::asymptotic: return "asymptotic";
    case TailMethod::monte_carlo: return "monte-carlo";
  }
  return "?";
}

}  // namespace smile
