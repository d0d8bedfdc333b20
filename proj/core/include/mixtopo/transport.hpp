#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mixtopo/cmatrix.hpp"
#include "mixtopo/models.hpp"

namespace mixtopo {

// Ordered samples k_0 .. k_M. A path is closed when k_M equals k_0 modulo
// 2*pi in each coordinate; transport along a closed path reuses the state at
// k_0 for the final sample so the loop closes exactly.
class KPath {
public:
    explicit KPath(std::vector<KPoint> samples);

    // k_fast = footpoint + 2*pi*i/M (i = 0..M) at fixed k_other = `fixed`.
    static KPath coordinate_loop(Axis fast, double fixed, double footpoint, int steps);
    // Closed polygon through `corners`, `per_edge` straight steps per edge.
    static KPath polygon(const std::vector<KPoint>& corners, int per_edge);

    const std::vector<KPoint>& samples() const noexcept { return samples_; }
    std::size_t steps() const noexcept { return samples_.size() - 1; }
    bool closed() const noexcept { return closed_; }
    KPoint footpoint() const noexcept { return samples_.front(); }

    KPath reversed() const;
    // Same closed loop started at sample `start`.
    KPath rotated(std::size_t start) const;

private:
    std::vector<KPoint> samples_;
    bool closed_ = false;
};

struct Holonomy {
    CMatrix matrix;
    KPath path;
    KPoint footpoint;
    std::size_t discretization = 0;  // number of steps M
    bool reunitarized = true;        // accumulated product re-polarised per step
};

struct TransportOptions {
    bool reunitarize = true;
};

// k -> sqrt(rho(k)); lets callers transport arbitrary state fields.
using RootField = std::function<CMatrix(KPoint)>;

/// One discrete Uhlmann step rho1 -> rho2: the unitary factor L R^dag of
/// sqrt(rho2) sqrt(rho1) = L D R^dag. Throws RankDeficient when the product
/// is singular.
CMatrix uhlmann_step(const CMatrix& rho1, const CMatrix& rho2);
CMatrix uhlmann_step_from_roots(const CMatrix& sqrt_rho1, const CMatrix& sqrt_rho2);

/// Ordered product prod_{i=M..1} step(rho(k_{i-1}), rho(k_i)), later steps on
/// the left. RankDeficient carries the failing segment index.
Holonomy uhlmann_holonomy(const StateRule& rule, const KPath& path, TransportOptions opts = {});
Holonomy uhlmann_holonomy(const RootField& roots, const KPath& path, TransportOptions opts = {});

struct ConnectionSample {
    CMatrix value;  // anti-Hermitian, per unit k
    Axis direction = Axis::x;
};

/// Closed-form two-band Uhlmann connection -[(d_mu sqrt rho), sqrt rho] with
/// a central difference of step h. Requires N = 2 and a trace-normalised
/// rule. Satisfies step(rho(k), rho(k + h e_mu)) = 1 - h A + O(h^2).
ConnectionSample two_band_connection(const StateRule& rule, KPoint k, Axis mu, double h = 1e-4);

/// Berry phase -arg prod_i <u(k_i)|u(k_{i+1})> of energy band `band`
/// (0 = lowest) around a closed loop, in (-pi, pi]. Gauge invariant.
double berry_phase(const BlochModel& model, std::size_t band, const KPath& loop);

/// Discrete Wilson line of the lowest `occupied` bands: prod_i
/// polar(F^dag(k_{i+1}) F(k_i)), expressed in the frame at the footpoint.
Holonomy kato_holonomy(const BlochModel& model, std::size_t occupied, const KPath& loop);

// Contiguous block of rho eigenlevels in descending-weight order.
struct LevelRange {
    std::size_t first = 0;
    std::size_t count = 1;
};

/// Uhlmann holonomy of the projected, trace-renormalised state
/// P rho P / Tr(P rho P) around a closed loop, represented in the eigenframe
/// of the footpoint: (H)_{ij} = <psi_i|H_U|psi_j>. `frames` holds the rho
/// spectra at k_0 .. k_{M-1}; the loop closes back onto frames[0]. Each step
/// is the polar factor of the count x count core S' (F'^dag F) S.
CMatrix projected_uhlmann_holonomy(std::span<const WeightedBasis> frames, LevelRange levels);

}  // namespace mixtopo
