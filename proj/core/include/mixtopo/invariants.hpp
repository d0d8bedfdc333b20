#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixtopo/models.hpp"
#include "mixtopo/transport.hpp"

namespace mixtopo {

// Orientation convention for every signed invariant:
//   * plaquettes are traversed counterclockwise in (k_x, k_y);
//   * fast loops run in increasing coordinate;
//   * the y-axis winding is reported with the sign of the (k_x, k_y)
//     orientation, i.e. minus the raw winding of phi_U^{k_y} in k_y, so all
//     four integer invariants agree in the zero-temperature limit.

struct GridInfo {
    int nx = 0;
    int ny = 0;
    int loop_points = 0;
    int slow_count = 0;
};

struct InvariantReport {
    std::string name;  // chern_pure, c_uhlmann_x, chern_mixed(n=..), beta_critical_x, ...
    double value = 0.0;
    bool integer = false;
    double raw = 0.0;        // unrounded value for integer invariants
    double tolerance = 0.0;  // |raw - round(raw)| for integers, bracket width for beta_critical
    GridInfo grid;
    std::optional<KPoint> location;  // argmin / worst point where meaningful
    std::vector<std::pair<std::string, double>> details;
};

struct PhaseProfile {
    Axis axis = Axis::x;               // slow coordinate
    std::vector<double> slow_samples;  // increasing, within [-pi, pi)
    std::vector<double> phases;        // principal branch (-pi, pi]; NaN where undefined
    double footpoint = -kPi;           // start of the fast loop
    int loop_points = 0;
    std::vector<std::string> errors;   // one entry per failed slow sample

    bool partial() const noexcept { return !errors.empty(); }
};

struct SubspaceSelector {
    std::size_t count = 1;  // n largest rho eigenvalues
    double min_gap = 1e-6;  // required purity gap
};

// threads == 0 picks std::thread::hardware_concurrency().
struct RunOptions {
    unsigned threads = 0;
};

/// phi_U = arg Tr[rho(k_0) H_U] for a closed loop. ZeroTrace when |Tr| < 1e-12.
double uhlmann_phase(const StateRule& rule, const KPath& loop);

/// phi_U of fast loops (M steps, starting at `footpoint`) at `slow_count`
/// equidistant values of the slow coordinate `axis`. Per-sample failures are
/// recorded and the profile is marked partial.
PhaseProfile phase_profile(const StateRule& rule, Axis axis, double footpoint, int loop_points, int slow_count,
                           RunOptions opts = {});

/// Bisects every gap between neighbouring slow samples (cyclically) whose
/// principal-branch phase difference exceeds pi/2, up to `max_depth` levels.
/// Returns the number of samples added.
std::size_t refine_profile(PhaseProfile& profile, const StateRule& rule, int max_depth, RunOptions opts = {});

/// Winding of the profile: branch jumps (|difference| > pi) are unwrapped by
/// +-2 pi. UnderResolved if an unwrapped step still exceeds pi/2;
/// std::invalid_argument for partial profiles.
InvariantReport winding_number(const PhaseProfile& profile);

/// p_n - p_{n+1} for rho eigenvalues sorted descending.
double purity_gap(const StateRule& rule, KPoint k, const SubspaceSelector& sel);

/// Integer Chern number of a two-band d-vector model: signed solid angle of
/// the triangulated d-hat map over 4 pi. GapClosed if |d| <= 1e-10.
InvariantReport chern_dvector(const BlochModel& model, const KGrid& grid);

struct ChernOptions {
    unsigned threads = 0;
    // Multiplies every eigenvector by a random phase (seeded) before
    // transport; the result must not change.
    std::optional<std::uint64_t> scramble_seed;
};

/// Mixed-state Chern number of the subspace of the `sel.count` largest rho
/// eigenvalues: sum over plaquettes of arg det of the projected plaquette
/// Uhlmann holonomy, over 2 pi. SpectralConstraintViolated if the purity gap
/// drops below sel.min_gap anywhere; PlaquetteOverflow if a plaquette flux
/// reaches pi.
InvariantReport uhlmann_chern(const StateRule& rule, const KGrid& grid, const SubspaceSelector& sel,
                              ChernOptions opts = {});

/// Chern number of each one-dimensional rho eigenlevel (largest first). All
/// levels must be pairwise separated by at least 1e-6. The values sum to 0.
std::vector<InvariantReport> band_chern_sum(const StateRule& rule, const KGrid& grid, ChernOptions opts = {});

/// min over footpoints (k_x, k_y0) of | |l1| - |l2| | for the eigenvalues of
/// rho(k_x, k_y0) H_U of the k_y-loop starting at k_y0. Two-band only.
InvariantReport holonomy_gap(const StateRule& rule, const KGrid& footpoints, int loop_points, RunOptions opts = {});

struct BetaScanOptions {
    int loop_points = 500;
    int slow_count = 500;
    double footpoint = -kPi;
    double tolerance = 1e-3;  // final bracket width
    int refine_depth = 40;
    // rho floor (see StateRule::with_floor) so low-temperature bracket ends
    // stay transportable; 0 disables it.
    double floor = 1e-10;
    unsigned threads = 0;
};

/// Bisection in beta for the jump of the thermal-state winding number along
/// `axis`. NoTransition if the bracket ends carry the same winding.
InvariantReport critical_beta(const BlochModel& model, Axis axis, double beta_lo, double beta_hi,
                              BetaScanOptions opts = {});

}  // namespace mixtopo
