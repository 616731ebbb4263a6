#pragma once

// Flux kernels for the 2D shallow water equations on a Cartesian grid:
// physical flux, HLL and Rusanov interface fluxes, hydrostatic interface
// reconstruction and the minmod/MUSCL face reconstruction. All interface
// math is written for the 1D normal/transverse decomposition; the sweep in
// solver.hpp maps (u,v) onto (normal, transverse) per axis.

#include <algorithm>
#include <array>
#include <cmath>

#include "swegsa/swe/types.hpp"

namespace swegsa::swe {

/// Cell state seen by an interface: depth, normal and transverse velocity.
struct CellState {
    double h = 0.0;
    double un = 0.0;
    double ut = 0.0;
};

using FluxVector = std::array<double, 3>;  // (mass, normal momentum, transverse momentum)

/// F(U) = (h*un, h*un^2 + g*h^2/2, h*un*ut)
inline FluxVector physical_flux(const CellState& s, double g) {
    const double q = s.h * s.un;
    return {q, q * s.un + 0.5 * g * s.h * s.h, q * s.ut};
}

/// Pressure part of the momentum flux; used by the well-balanced corrections.
/// Must stay the exact expression used inside physical_flux.
inline double pressure_term(double h, double g) { return 0.5 * g * h * h; }

inline FluxVector rusanov_flux(const CellState& l, const CellState& r, double g) {
    const FluxVector fl = physical_flux(l, g);
    const FluxVector fr = physical_flux(r, g);
    const double cl = std::sqrt(g * l.h);
    const double cr = std::sqrt(g * r.h);
    const double lambda = std::max(std::fabs(l.un) + cl, std::fabs(r.un) + cr);
    FluxVector out;
    const double ql = l.h * l.un, qr = r.h * r.un;
    out[0] = 0.5 * (fl[0] + fr[0]) - 0.5 * lambda * (r.h - l.h);
    out[1] = 0.5 * (fl[1] + fr[1]) - 0.5 * lambda * (qr - ql);
    out[2] = 0.5 * (fl[2] + fr[2]) - 0.5 * lambda * (r.h * r.ut - l.h * l.ut);
    return out;
}

inline FluxVector hll_flux(const CellState& l, const CellState& r, double g) {
    const double cl = std::sqrt(g * l.h);
    const double cr = std::sqrt(g * r.h);
    const double sl = std::min(l.un - cl, r.un - cr);
    const double sr = std::max(l.un + cl, r.un + cr);
    if (sl >= 0.0) return physical_flux(l, g);
    if (sr <= 0.0) return physical_flux(r, g);
    const FluxVector fl = physical_flux(l, g);
    const FluxVector fr = physical_flux(r, g);
    const double inv = 1.0 / (sr - sl);
    FluxVector out;
    out[0] = (sr * fl[0] - sl * fr[0] + sl * sr * (r.h - l.h)) * inv;
    out[1] = (sr * fl[1] - sl * fr[1] + sl * sr * (r.h * r.un - l.h * l.un)) * inv;
    out[2] = (sr * fl[2] - sl * fr[2] + sl * sr * (r.h * r.ut - l.h * l.ut)) * inv;
    return out;
}

/// Interface flux. Identical states short-circuit to the physical flux, which
/// keeps flux(U,U) == F(U) exact and lake-at-rest interfaces strictly silent.
inline FluxVector numerical_flux(const CellState& l, const CellState& r, FluxScheme scheme,
                                 double g) {
    if (l.h == 0.0 && r.h == 0.0) return {0.0, 0.0, 0.0};
    if (l.h == r.h && l.un == r.un && l.ut == r.ut) return physical_flux(l, g);
    return scheme == FluxScheme::Hll ? hll_flux(l, r, g) : rusanov_flux(l, r, g);
}

struct ReconstructedInterface {
    CellState left, right;
    double h_star_l = 0.0;  // hydrostatically reconstructed depths
    double h_star_r = 0.0;
};

/// Hydrostatic reconstruction (interface depths from free surface and the
/// higher bank): h* = max(0, eta - max(z_l, z_r)). Velocities carry over.
inline ReconstructedInterface hydrostatic_reconstruction(const CellState& l, double eta_l,
                                                         const CellState& r, double eta_r,
                                                         double z_l, double z_r) {
    ReconstructedInterface out;
    const double z_face = std::max(z_l, z_r);
    out.h_star_l = std::max(0.0, eta_l - z_face);
    out.h_star_r = std::max(0.0, eta_r - z_face);
    out.left = {out.h_star_l, l.un, l.ut};
    out.right = {out.h_star_r, r.un, r.ut};
    return out;
}

/// Convenience overload taking depths and bed levels directly.
inline ReconstructedInterface hydrostatic_reconstruction(const CellState& l, double z_l,
                                                         const CellState& r, double z_r) {
    return hydrostatic_reconstruction(l, l.h + z_l, r, r.h + z_r, z_l, z_r);
}

/// minmod(a,b): 0 on sign change, else the argument of smaller magnitude.
inline double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

/// Limited linear reconstruction of a cell from its (previous, centre, next)
/// values: returns the (left face, right face) pair. TVD by construction.
inline std::array<double, 2> muscl_reconstruct(double prev, double centre, double next) {
    const double slope = minmod(centre - prev, next - centre);
    const double half = 0.5 * slope;
    return {centre - half, centre + half};
}

/// Semi-implicit friction update: velocities are damped, never flipped.
/// Returns the new (u, v) pair; h below h_dry is the caller's problem.
inline std::array<double, 2> friction_source(double h, double u, double v,
                                             const FrictionModel& model, double coeff,
                                             double dt, double g) {
    if (model.law == FrictionLaw::None || coeff <= 0.0) return {u, v};
    const double speed = std::sqrt(u * u + v * v);
    if (speed == 0.0) return {u, v};
    double denom = 1.0;
    switch (model.law) {
        case FrictionLaw::Manning:
            denom = 1.0 + dt * g * coeff * coeff * speed / std::pow(h, 4.0 / 3.0);
            break;
        case FrictionLaw::Strickler: {
            const double n = 1.0 / coeff;
            denom = 1.0 + dt * g * n * n * speed / std::pow(h, 4.0 / 3.0);
            break;
        }
        case FrictionLaw::Chezy:
            denom = 1.0 + dt * g * speed / (coeff * coeff * h);
            break;
        case FrictionLaw::None:
            break;
    }
    return {u / denom, v / denom};
}

}  // namespace swegsa::swe
