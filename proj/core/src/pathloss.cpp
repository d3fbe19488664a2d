#include "udn/pathloss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace udn {

std::string_view to_string(PathLossVariant v) {
  switch (v) {
    case PathLossVariant::BoundedDualSlope:
      return "bounded_dual_slope";
    case PathLossVariant::BoundedSingleSlope:
      return "bounded_single_slope";
    case PathLossVariant::UnboundedSingleSlope:
      return "unbounded_single_slope";
    case PathLossVariant::UnboundedDualSlope:
      return "unbounded_dual_slope";
  }
  return "unknown";
}

PathLossVariant path_loss_variant_from_string(std::string_view name) {
  if (name == "bounded_dual_slope") return PathLossVariant::BoundedDualSlope;
  if (name == "bounded_single_slope")
    return PathLossVariant::BoundedSingleSlope;
  if (name == "unbounded_single_slope")
    return PathLossVariant::UnboundedSingleSlope;
  if (name == "unbounded_dual_slope")
    return PathLossVariant::UnboundedDualSlope;
  throw std::invalid_argument("unknown path loss variant: " +
                              std::string(name));
}

namespace {

void check_exponents(double near_exponent, double far_exponent) {
  if (!(std::isfinite(near_exponent) && std::isfinite(far_exponent))) {
    throw std::domain_error("path loss exponents must be finite");
  }
  if (!(near_exponent > 2.0)) {
    throw std::domain_error("near-field exponent must exceed 2");
  }
  if (!(far_exponent >= near_exponent)) {
    throw std::domain_error(
        "far-field exponent must be >= near-field exponent");
  }
}

}  // namespace

PathLossModel::PathLossModel(PathLossVariant variant, double r_b, double r_c,
                             double near_exponent, double far_exponent)
    : variant_(variant),
      r_b_(r_b),
      r_c_(r_c),
      near_exponent_(near_exponent),
      far_exponent_(far_exponent),
      continuity_(r_c > 0.0 ? std::pow(r_c, far_exponent - near_exponent)
                            : 1.0) {}

PathLossModel PathLossModel::bounded_dual_slope(double r_b, double r_c,
                                                double near_exponent,
                                                double far_exponent) {
  check_exponents(near_exponent, far_exponent);
  if (!(std::isfinite(r_b) && std::isfinite(r_c) && r_b > 0.0 && r_c >= r_b)) {
    throw std::domain_error("bounded dual slope requires 0 < r_b <= r_c");
  }
  return PathLossModel(PathLossVariant::BoundedDualSlope, r_b, r_c,
                       near_exponent, far_exponent);
}

PathLossModel PathLossModel::bounded_single_slope(double r_b,
                                                  double exponent) {
  check_exponents(exponent, exponent);
  if (!(std::isfinite(r_b) && r_b > 0.0)) {
    throw std::domain_error("bounded single slope requires r_b > 0");
  }
  return PathLossModel(PathLossVariant::BoundedSingleSlope, r_b, r_b, exponent,
                       exponent);
}

PathLossModel PathLossModel::unbounded_single_slope(double exponent) {
  check_exponents(exponent, exponent);
  return PathLossModel(PathLossVariant::UnboundedSingleSlope, 0.0, 0.0,
                       exponent, exponent);
}

PathLossModel PathLossModel::unbounded_dual_slope(double r_c,
                                                  double near_exponent,
                                                  double far_exponent) {
  check_exponents(near_exponent, far_exponent);
  if (!(std::isfinite(r_c) && r_c > 0.0)) {
    throw std::domain_error("unbounded dual slope requires r_c > 0");
  }
  return PathLossModel(PathLossVariant::UnboundedDualSlope, 0.0, r_c,
                       near_exponent, far_exponent);
}

PathLossModel PathLossModel::make(PathLossVariant variant, double r_b,
                                  double r_c, double near_exponent,
                                  double far_exponent) {
  switch (variant) {
    case PathLossVariant::BoundedDualSlope:
      return bounded_dual_slope(r_b, r_c, near_exponent, far_exponent);
    case PathLossVariant::BoundedSingleSlope:
      return bounded_single_slope(r_b, far_exponent);
    case PathLossVariant::UnboundedSingleSlope:
      return unbounded_single_slope(far_exponent);
    case PathLossVariant::UnboundedDualSlope:
      return unbounded_dual_slope(r_c, near_exponent, far_exponent);
  }
  throw std::invalid_argument("bad path loss variant");
}

double PathLossModel::attenuation(double d) const {
  if (!std::isfinite(d) || d < 0.0) {
    throw std::domain_error("distance must be finite and non-negative");
  }
  if (d <= r_b_) {
    if (r_b_ == 0.0) {
      throw std::domain_error(
          "unbounded path loss is undefined at zero distance");
    }
    return 1.0;
  }
  if (d <= r_c_) {
    return std::pow(d, -near_exponent_);
  }
  if (far_exponent_ == 4.0) {
    // hot path for the common inverse-fourth far field
    const double d2 = d * d;
    return continuity_ / (d2 * d2);
  }
  return continuity_ * std::pow(d, -far_exponent_);
}

bool PathLossModel::discontinuous_at_bound() const {
  return r_b_ > 0.0 && r_b_ != 1.0;
}

std::vector<double> PathLossModel::breakpoints() const {
  std::vector<double> pts;
  if (r_b_ > 0.0) pts.push_back(r_b_);
  if (r_c_ > r_b_) pts.push_back(r_c_);
  return pts;
}

}  // namespace udn
