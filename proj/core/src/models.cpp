#include "mixtopo/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "mixtopo/error.hpp"
#include "mixtopo/matcore.hpp"

namespace mixtopo {

double FourierTerm::operator()(KPoint k) const {
    const double arg = nx * k.kx + ny * k.ky;
    return amplitude * (kind == TermKind::cos ? std::cos(arg) : std::sin(arg));
}

void DVector::add_term(int component, FourierTerm t) {
    if (component < 0 || component > 2) throw std::out_of_range("DVector: component must be 0, 1 or 2");
    comp_[component].push_back(t);
}

std::array<double, 3> DVector::operator()(KPoint k) const {
    std::array<double, 3> d{0.0, 0.0, 0.0};
    for (int c = 0; c < 3; ++c)
        for (const auto& t : comp_[c]) d[c] += t(k);
    return d;
}

DVector aniso_qah_dvector(const AnisoQahParams& p) {
    DVector d;
    d.add_term(0, {p.a1, 1, 0, TermKind::sin});
    d.add_term(1, {p.a2, 0, 1, TermKind::sin});
    d.add_term(2, {p.m, 0, 0, TermKind::cos});
    d.add_term(2, {-1.0, 1, 0, TermKind::cos});
    d.add_term(2, {-1.0, 0, 1, TermKind::cos});
    return d;
}

CMatrix pauli_hamiltonian(const std::array<double, 3>& d) {
    // d1 sx + d2 sy + d3 sz
    return CMatrix(2, {cplx{d[2], 0.0}, cplx{d[0], -d[1]}, cplx{d[0], d[1]}, cplx{-d[2], 0.0}});
}

BlochModel::BlochModel(std::size_t dim, Fn h, std::string name)
    : dim_(dim), h_(std::move(h)), name_(std::move(name)) {
    if (dim_ == 0) throw std::invalid_argument("BlochModel: dimension must be positive");
}

BlochModel BlochModel::two_band(DVector d, std::string name) {
    BlochModel m(2, [d](KPoint k) { return pauli_hamiltonian(d(k)); }, std::move(name));
    m.d_ = std::move(d);
    return m;
}

BlochModel BlochModel::aniso_qah(const AnisoQahParams& p) {
    return two_band(aniso_qah_dvector(p), "aniso-qah");
}

CMatrix eval_hamiltonian(const BlochModel& model, KPoint k) { return model.hamiltonian(k); }

EnergyBasis energy_basis(const BlochModel& model, KPoint k) {
    const auto e = herm_eig(model.hamiltonian(k));
    const std::size_t n = e.values.size();
    EnergyBasis out;
    out.energies.resize(n);
    out.vectors = CMatrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.energies[j] = e.values[n - 1 - j];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = e.vectors(i, n - 1 - j);
    }
    return out;
}

namespace {

CMatrix assemble(const CMatrix& v, const std::vector<double>& w) {
    const std::size_t n = v.dim();
    CMatrix r(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (w[k] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = v(i, k) * w[k];
            for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(v(j, k));
        }
    }
    return r;
}

std::size_t default_occupied(const EnergyBasis& b) {
    return static_cast<std::size_t>(
        std::count_if(b.energies.begin(), b.energies.end(), [](double e) { return e < 0.0; }));
}

}  // namespace

StateRule::StateRule(BlochModel model, StateKind kind, bool normalize)
    : model_(std::move(model)), kind_(std::move(kind)), normalize_(normalize) {
    if (const auto* t = std::get_if<Thermal>(&kind_)) {
        if (!(t->beta >= 0.0) || !std::isfinite(t->beta))
            throw std::invalid_argument("StateRule: beta must be finite and >= 0");
    }
    if (const auto* s = std::get_if<Spectral>(&kind_)) {
        if (s->weights.size() != model_.dim())
            throw std::invalid_argument("StateRule: need one weight per band");
        for (double w : s->weights)
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("StateRule: weights must be >= 0");
        if (std::accumulate(s->weights.begin(), s->weights.end(), 0.0) <= 0.0)
            throw std::invalid_argument("StateRule: weights must not all vanish");
    }
}

StateRule StateRule::with_floor(double eta) const {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("StateRule: floor must lie in [0, 1)");
    StateRule r = *this;
    r.floor_ = eta;
    return r;
}

std::vector<double> StateRule::level_weights(const EnergyBasis& basis) const {
    const std::size_t n = basis.energies.size();
    std::vector<double> w(n, 0.0);

    if (const auto* t = std::get_if<Thermal>(&kind_)) {
        const double e0 = basis.energies.front();
        for (std::size_t j = 0; j < n; ++j)
            w[j] = normalize_ ? std::exp(-t->beta * (basis.energies[j] - e0)) : std::exp(-t->beta * basis.energies[j]);
    } else if (const auto* p = std::get_if<PureGround>(&kind_)) {
        const std::size_t occ = p->occupied.value_or(default_occupied(basis));
        if (occ == 0 || occ > n) throw std::invalid_argument("pure ground state: occupied count out of range");
        if (occ < n && basis.energies[occ] - basis.energies[occ - 1] < kDegeneracyTol)
            throw GapClosed("pure ground state: occupied bands touch the empty bands");
        for (std::size_t j = 0; j < occ; ++j) w[j] = 1.0;
    } else {
        const auto& sw = std::get<Spectral>(kind_).weights;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (sw[j] != sw[j + 1] && basis.energies[j + 1] - basis.energies[j] < kDegeneracyTol)
                throw GapClosed("spectral state: degenerate levels carry different weights");
        }
        w = sw;
    }

    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (normalize_)
        for (double& x : w) x /= total;
    if (floor_ > 0.0) {
        const double tr = normalize_ ? 1.0 : total;
        for (double& x : w) x = (1.0 - floor_) * x + floor_ * tr / static_cast<double>(n);
    }
    return w;
}

CMatrix StateRule::density(KPoint k) const {
    const auto b = energy_basis(model_, k);
    return assemble(b.vectors, level_weights(b));
}

CMatrix StateRule::sqrt_density(KPoint k) const {
    const auto b = energy_basis(model_, k);
    auto w = level_weights(b);
    for (double& x : w) x = std::sqrt(x);
    return assemble(b.vectors, w);
}

WeightedBasis StateRule::spectrum(KPoint k) const {
    const auto b = energy_basis(model_, k);
    const auto w = level_weights(b);
    const std::size_t n = w.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return w[a] > w[c]; });
    WeightedBasis out;
    out.weights.resize(n);
    out.vectors = CMatrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.weights[j] = w[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = b.vectors(i, order[j]);
    }
    return out;
}

CMatrix thermal_state(const BlochModel& model, double beta, KPoint k) {
    return StateRule(model, Thermal{beta}).density(k);
}

CMatrix pure_ground_state(const BlochModel& model, KPoint k, std::optional<std::size_t> occupied) {
    return StateRule(model, PureGround{occupied}, false).density(k);
}

CMatrix spectral_state(const BlochModel& model, const std::vector<double>& weights, KPoint k, bool normalize) {
    return StateRule(model, Spectral{weights}, normalize).density(k);
}

KGrid::KGrid(int nx_, int ny_) : nx(nx_), ny(ny_) {
    if (nx <= 0 || ny <= 0) throw std::invalid_argument("KGrid: sizes must be positive");
}

KPoint KGrid::at(int i, int j) const {
    i = ((i % nx) + nx) % nx;
    j = ((j % ny) + ny) % ny;
    return {-kPi + kTwoPi * i / nx, -kPi + kTwoPi * j / ny};
}

}  // namespace mixtopo
