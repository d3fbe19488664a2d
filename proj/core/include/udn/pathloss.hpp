#pragma once

#include <string_view>
#include <vector>

namespace udn {

enum class PathLossVariant {
  BoundedDualSlope,
  BoundedSingleSlope,
  UnboundedSingleSlope,
  UnboundedDualSlope,
};

std::string_view to_string(PathLossVariant v);
PathLossVariant path_loss_variant_from_string(std::string_view name);

/// Piecewise distance-power attenuation law with an optional constant-gain
/// core (radius r_b) and an optional near/far exponent break at r_c.
///
/// All lengths are in meters. Attenuation is a linear power gain, i.e. the
/// received power is tx_power * attenuation(d).
class PathLossModel {
 public:
  static PathLossModel bounded_dual_slope(double r_b, double r_c,
                                          double near_exponent,
                                          double far_exponent);
  static PathLossModel bounded_single_slope(double r_b, double exponent);
  static PathLossModel unbounded_single_slope(double exponent);
  static PathLossModel unbounded_dual_slope(double r_c, double near_exponent,
                                            double far_exponent);

  /// Build a model of the given variant from the full parameter set;
  /// parameters that the variant ignores are dropped.
  static PathLossModel make(PathLossVariant variant, double r_b, double r_c,
                            double near_exponent, double far_exponent);

  /// Power gain at distance d (meters). Bounded variants return values in
  /// (0, 1]; unbounded variants exceed 1 for d < 1.
  double attenuation(double d) const;

  PathLossVariant variant() const { return variant_; }
  double bounded_radius() const { return r_b_; }   // 0 for unbounded variants
  double critical_radius() const { return r_c_; }  // == r_b for single slope
  double near_exponent() const { return near_exponent_; }
  double far_exponent() const { return far_exponent_; }

  /// Continuity constant r_c^(far - near) that stitches the two slopes.
  double continuity_constant() const { return continuity_; }

  bool is_bounded() const { return r_b_ > 0.0; }
  bool is_dual_slope() const { return r_c_ > r_b_; }

  /// A bounded law with r_b != 1 jumps from 1 to r_b^(-near_exponent) at the
  /// core boundary. We evaluate the law as written; callers that accept user
  /// input should surface a warning when this returns true.
  bool discontinuous_at_bound() const;

  /// Distances at which the law changes branch, ascending, zero-free.
  std::vector<double> breakpoints() const;

  /// Beyond this distance the law is far_field_coefficient() * d^-far.
  double far_field_start() const { return r_c_; }
  double far_field_coefficient() const { return continuity_; }

 private:
  PathLossModel(PathLossVariant variant, double r_b, double r_c,
                double near_exponent, double far_exponent);

  PathLossVariant variant_;
  double r_b_;            // constant-gain core radius, 0 when absent
  double r_c_;            // slope break, == r_b_ when single slope
  double near_exponent_;  // == far_exponent_ when single slope
  double far_exponent_;
  double continuity_;
};

}  // namespace udn
