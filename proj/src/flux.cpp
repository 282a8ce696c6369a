#include "destflow/flux.hpp"

#include <algorithm>
#include <string>

#include "destflow/error.hpp"

namespace destflow {

namespace {

void check_domain(double u, const FluxParams& p) {
  if (!(u >= -kDensityDomainTol && u <= p.rho_max + kDensityDomainTol)) {
    throw NumericalError("density " + std::to_string(u) + " outside [0, " +
                         std::to_string(p.rho_max) + "]");
  }
}

inline double raw_flux(double u, const FluxParams& p) {
  return u * p.v_max * (1.0 - u / p.rho_max);
}

}  // namespace

double velocity(double u, const FluxParams& p) {
  check_domain(u, p);
  return p.v_max * (1.0 - u / p.rho_max);
}

double flux(double u, const FluxParams& p) {
  check_domain(u, p);
  return raw_flux(u, p);
}

double demand(double u, const FluxParams& p) {
  check_domain(u, p);
  return raw_flux(std::min(u, 0.5 * p.rho_max), p);
}

double supply(double u, const FluxParams& p) {
  check_domain(u, p);
  return raw_flux(std::max(u, 0.5 * p.rho_max), p);
}

double godunov_flux(double u_left, double u_right, const FluxParams& p) {
  return std::min(demand(u_left, p), supply(u_right, p));
}

double godunov_flux(double u_left, const FluxParams& p_left, double u_right,
                    const FluxParams& p_right) {
  return std::min(demand(u_left, p_left), supply(u_right, p_right));
}

}  // namespace destflow
