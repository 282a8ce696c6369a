#ifndef DESTFLOW_FLUX_HPP_
#define DESTFLOW_FLUX_HPP_

namespace destflow {

// Greenshields parameters: jam density and free-flow speed.
struct FluxParams {
  double rho_max = 1.0;
  double v_max = 1.0;
};

inline constexpr double kDensityDomainTol = 1e-12;

// All four throw NumericalError when a density lies outside
// [0, rho_max] by more than kDensityDomainTol.
double velocity(double u, const FluxParams& p);
double flux(double u, const FluxParams& p);

// Increasing and decreasing envelopes of the concave flux.
double demand(double u, const FluxParams& p);
double supply(double u, const FluxParams& p);

// min over [u_left, u_right] of f if u_left <= u_right, max over
// [u_right, u_left] otherwise. For a concave flux this is
// min(demand(u_left), supply(u_right)).
double godunov_flux(double u_left, double u_right, const FluxParams& p);

// Interface between cells carrying different road parameters (a junction
// path crossing from one road onto another).
double godunov_flux(double u_left, const FluxParams& p_left, double u_right,
                    const FluxParams& p_right);

}  // namespace destflow

#endif  // DESTFLOW_FLUX_HPP_
