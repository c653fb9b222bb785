#pragma once

#include <array>
#include <string>
#include <vector>

namespace quenchmap {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class ScheduleKind { linear, tabulated };
enum class EnergyUnit { ghz, rad_per_ns };

/// Annealing envelopes A(s), B(s) over normalized time s in [0,1], plus the
/// total physical duration. Units are fixed: hbar = 1, energies in rad/ns,
/// time in ns.
struct AnnealSchedule {
    ScheduleKind kind = ScheduleKind::linear;
    double gamma0 = kTwoPi; // A scale, rad/ns
    double beta0 = kTwoPi;  // B scale, rad/ns
    std::vector<std::array<double, 3>> table; // (s, A, B), tabulated kind only
    double tau_ns = 20.0;

    /// Transverse-dominated start, problem-dominated end; throws otherwise.
    void validate() const;
};

struct Envelopes {
    double a = 0.0; // rad/ns
    double b = 0.0; // rad/ns
};

/// A(s), B(s) at one point. Linear kind: A = gamma0*(1-s), B = beta0*s.
/// Tabulated kind: piecewise-linear interpolation. s outside [0,1] throws.
Envelopes evaluate(const AnnealSchedule& schedule, double s);

/// Load a tabulated schedule from a CSV with columns s, A, B. Values given in
/// GHz are converted to rad/ns (factor 2*pi). Requires strictly increasing s
/// covering both endpoints and non-negative envelopes.
AnnealSchedule load_schedule_csv(const std::string& path, EnergyUnit unit);

/// Compact one-line description used in provenance records and cache keys.
std::string schedule_descriptor(const AnnealSchedule& schedule);

} // namespace quenchmap
