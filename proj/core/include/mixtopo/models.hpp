#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mixtopo/cmatrix.hpp"

namespace mixtopo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct KPoint {
    double kx = 0.0;
    double ky = 0.0;
    friend bool operator==(const KPoint&, const KPoint&) = default;
};

enum class Axis { x, y };

inline Axis other(Axis a) { return a == Axis::x ? Axis::y : Axis::x; }
inline const char* to_string(Axis a) { return a == Axis::x ? "x" : "y"; }
inline double coordinate(KPoint k, Axis a) { return a == Axis::x ? k.kx : k.ky; }
inline KPoint shifted(KPoint k, Axis a, double dk) {
    return a == Axis::x ? KPoint{k.kx + dk, k.ky} : KPoint{k.kx, k.ky + dk};
}

// Degeneracy threshold for GapClosed errors.
inline constexpr double kDegeneracyTol = 1e-10;

enum class TermKind { cos, sin };

// amplitude * cos|sin(nx*kx + ny*ky)
struct FourierTerm {
    double amplitude = 0.0;
    int nx = 0;
    int ny = 0;
    TermKind kind = TermKind::cos;
    double operator()(KPoint k) const;
};

// d(k) with each component a finite Fourier sum. H(k) = d(k) . sigma.
class DVector {
public:
    void add_term(int component, FourierTerm t);
    const std::vector<FourierTerm>& terms(int component) const { return comp_.at(component); }
    std::array<double, 3> operator()(KPoint k) const;

private:
    std::array<std::vector<FourierTerm>, 3> comp_;
};

// d1 = a1 sin kx, d2 = a2 sin ky, d3 = m - cos kx - cos ky.
// Defaults (1, 3, 1) are the anisotropic thermal Chern insulator.
struct AnisoQahParams {
    double a1 = 1.0;
    double a2 = 3.0;
    double m = 1.0;
};

DVector aniso_qah_dvector(const AnisoQahParams& p = {});

CMatrix pauli_hamiltonian(const std::array<double, 3>& d);

class BlochModel {
public:
    using Fn = std::function<CMatrix(KPoint)>;

    BlochModel(std::size_t dim, Fn h, std::string name = "custom");

    static BlochModel two_band(DVector d, std::string name = "two-band");
    static BlochModel aniso_qah(const AnisoQahParams& p = {});

    std::size_t dim() const noexcept { return dim_; }
    const std::string& name() const noexcept { return name_; }
    CMatrix hamiltonian(KPoint k) const { return h_(k); }
    // Present for two-band models built from a d-vector.
    const std::optional<DVector>& dvector() const noexcept { return d_; }

private:
    std::size_t dim_;
    Fn h_;
    std::string name_;
    std::optional<DVector> d_;
};

CMatrix eval_hamiltonian(const BlochModel& model, KPoint k);

// Eigenlevels of H(k), energies ascending.
struct EnergyBasis {
    std::vector<double> energies;
    CMatrix vectors;  // column j <-> energies[j]
};

EnergyBasis energy_basis(const BlochModel& model, KPoint k);

// rho(k) eigen-data in descending weight order (largest rho eigenvalue
// first). Vectors are the Hamiltonian eigenvectors carrying those weights.
struct WeightedBasis {
    std::vector<double> weights;
    CMatrix vectors;
};

struct Thermal {
    double beta = 0.0;
};
struct PureGround {
    // Number of occupied (lowest) bands; default: count of negative energies.
    std::optional<std::size_t> occupied;
};
struct Spectral {
    // Weights on energy-sorted levels, lowest energy first.
    std::vector<double> weights;
};

using StateKind = std::variant<Thermal, PureGround, Spectral>;

// Rule producing rho(k) from a model. All constructions go through the
// Hamiltonian eigenbasis so rho, sqrt(rho) and their spectra are consistent.
class StateRule {
public:
    StateRule(BlochModel model, StateKind kind, bool normalize = true);

    const BlochModel& model() const noexcept { return model_; }
    const StateKind& kind() const noexcept { return kind_; }
    bool normalized() const noexcept { return normalize_; }

    // Opt-in floor rho -> (1 - eta) rho + eta Tr(rho) / N, keeping the
    // Uhlmann step defined for (numerically) pure states.
    StateRule with_floor(double eta) const;
    double floor() const noexcept { return floor_; }

    // Weights on energy-ascending levels (before any reordering).
    std::vector<double> level_weights(const EnergyBasis& basis) const;

    CMatrix density(KPoint k) const;
    CMatrix sqrt_density(KPoint k) const;
    WeightedBasis spectrum(KPoint k) const;

private:
    BlochModel model_;
    StateKind kind_;
    bool normalize_;
    double floor_ = 0.0;
};

CMatrix thermal_state(const BlochModel& model, double beta, KPoint k);
CMatrix pure_ground_state(const BlochModel& model, KPoint k, std::optional<std::size_t> occupied = {});
CMatrix spectral_state(const BlochModel& model, const std::vector<double>& weights, KPoint k,
                       bool normalize = true);

// Uniform periodic grid on [-pi, pi)^2; index n is identified with 0.
struct KGrid {
    int nx = 1;
    int ny = 1;

    KGrid(int nx_, int ny_);
    KPoint at(int i, int j) const;
    double spacing_x() const { return kTwoPi / nx; }
    double spacing_y() const { return kTwoPi / ny; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

}  // namespace mixtopo
