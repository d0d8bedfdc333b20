#include "mixtopo/transport.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mixtopo/error.hpp"
#include "mixtopo/matcore.hpp"

namespace mixtopo {

namespace {

bool same_mod_2pi(double a, double b) {
    const double t = (b - a) / kTwoPi;
    return std::abs(t - std::round(t)) * kTwoPi < 1e-9;
}

void check_gap(const EnergyBasis& b, std::size_t lo, std::size_t hi, const char* who) {
    // Levels [lo, hi) must be separated from their neighbours.
    if (lo > 0 && b.energies[lo] - b.energies[lo - 1] < kDegeneracyTol)
        throw GapClosed(std::string(who) + ": band touches the band below");
    if (hi < b.energies.size() && b.energies[hi] - b.energies[hi - 1] < kDegeneracyTol)
        throw GapClosed(std::string(who) + ": band touches the band above");
}

}  // namespace

KPath::KPath(std::vector<KPoint> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 3) throw std::invalid_argument("KPath: need at least 2 steps");
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (samples_[i] == samples_[i - 1]) throw std::invalid_argument("KPath: consecutive samples coincide");
    closed_ = same_mod_2pi(samples_.front().kx, samples_.back().kx) &&
              same_mod_2pi(samples_.front().ky, samples_.back().ky);
}

KPath KPath::coordinate_loop(Axis fast, double fixed, double footpoint, int steps) {
    if (steps < 2) throw std::invalid_argument("KPath: loop needs at least 2 steps");
    std::vector<KPoint> s(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        const double k = footpoint + kTwoPi * i / steps;
        s[i] = fast == Axis::x ? KPoint{k, fixed} : KPoint{fixed, k};
    }
    return KPath(std::move(s));
}

KPath KPath::polygon(const std::vector<KPoint>& corners, int per_edge) {
    if (corners.size() < 2 || per_edge < 1) throw std::invalid_argument("KPath: bad polygon");
    std::vector<KPoint> s;
    const std::size_t m = corners.size();
    for (std::size_t e = 0; e < m; ++e) {
        const KPoint a = corners[e];
        const KPoint b = corners[(e + 1) % m];
        for (int t = 0; t < per_edge; ++t) {
            const double f = static_cast<double>(t) / per_edge;
            s.push_back({a.kx + (b.kx - a.kx) * f, a.ky + (b.ky - a.ky) * f});
        }
    }
    s.push_back(corners.front());
    return KPath(std::move(s));
}

KPath KPath::reversed() const { return KPath(std::vector<KPoint>(samples_.rbegin(), samples_.rend())); }

KPath KPath::rotated(std::size_t start) const {
    if (!closed_) throw std::invalid_argument("KPath::rotated: path is not closed");
    const std::size_t m = steps();
    start %= m;
    const double dx = samples_.back().kx - samples_.front().kx;
    const double dy = samples_.back().ky - samples_.front().ky;
    std::vector<KPoint> s;
    s.reserve(m + 1);
    for (std::size_t i = start; i <= m; ++i) s.push_back(samples_[i]);
    for (std::size_t i = 1; i <= start; ++i) s.push_back({samples_[i].kx + dx, samples_[i].ky + dy});
    return KPath(std::move(s));
}

CMatrix uhlmann_step_from_roots(const CMatrix& sqrt_rho1, const CMatrix& sqrt_rho2) {
    return unitary_polar(sqrt_rho2 * sqrt_rho1);
}

CMatrix uhlmann_step(const CMatrix& rho1, const CMatrix& rho2) {
    return uhlmann_step_from_roots(sqrt_psd(rho1), sqrt_psd(rho2));
}

Holonomy uhlmann_holonomy(const RootField& roots, const KPath& path, TransportOptions opts) {
    const auto& k = path.samples();
    const std::size_t m = path.steps();
    const CMatrix first = roots(k[0]);
    CMatrix prev = first;
    CMatrix u = CMatrix::identity(first.dim());
    for (std::size_t i = 1; i <= m; ++i) {
        const CMatrix cur = (path.closed() && i == m) ? first : roots(k[i]);
        try {
            u = uhlmann_step_from_roots(prev, cur) * u;
        } catch (const RankDeficient&) {
            throw RankDeficient("uhlmann_holonomy: singular overlap on segment " + std::to_string(i) +
                                    " (purity gap closing or singular state)",
                                static_cast<long>(i));
        }
        if (opts.reunitarize) u = unitary_polar(u);
        prev = cur;
    }
    return Holonomy{std::move(u), path, path.footpoint(), m, opts.reunitarize};
}

Holonomy uhlmann_holonomy(const StateRule& rule, const KPath& path, TransportOptions opts) {
    return uhlmann_holonomy([&rule](KPoint k) { return rule.sqrt_density(k); }, path, opts);
}

ConnectionSample two_band_connection(const StateRule& rule, KPoint k, Axis mu, double h) {
    if (rule.model().dim() != 2) throw std::invalid_argument("two_band_connection: model must have N = 2");
    if (!(h > 0.0)) throw std::invalid_argument("two_band_connection: step must be positive");
    const CMatrix s = rule.sqrt_density(k);
    const CMatrix ds = (1.0 / (2.0 * h)) * (rule.sqrt_density(shifted(k, mu, h)) - rule.sqrt_density(shifted(k, mu, -h)));
    return ConnectionSample{-1.0 * commutator(ds, s), mu};
}

double berry_phase(const BlochModel& model, std::size_t band, const KPath& loop) {
    if (!loop.closed()) throw std::invalid_argument("berry_phase: loop is not closed");
    if (band >= model.dim()) throw std::out_of_range("berry_phase: band index out of range");
    const auto& k = loop.samples();
    const std::size_t m = loop.steps();
    const std::size_t n = model.dim();

    std::vector<cplx> first;
    std::vector<cplx> prev;
    cplx prod = 1.0;
    for (std::size_t i = 0; i <= m; ++i) {
        std::vector<cplx> cur;
        if (i == m) {
            cur = first;
        } else {
            const auto b = energy_basis(model, k[i]);
            check_gap(b, band, band + 1, "berry_phase");
            cur = b.vectors.column(band);
        }
        if (i == 0) {
            first = cur;
        } else {
            cplx ov = 0.0;
            for (std::size_t r = 0; r < n; ++r) ov += std::conj(prev[r]) * cur[r];
            // Normalise each factor so long loops cannot underflow.
            const double a = std::abs(ov);
            if (a == 0.0) throw RankDeficient("berry_phase: orthogonal neighbouring states", static_cast<long>(i));
            prod *= ov / a;
        }
        prev = std::move(cur);
    }
    return -std::arg(prod);
}

Holonomy kato_holonomy(const BlochModel& model, std::size_t occupied, const KPath& loop) {
    if (!loop.closed()) throw std::invalid_argument("kato_holonomy: loop is not closed");
    const std::size_t n = model.dim();
    if (occupied == 0 || occupied > n) throw std::out_of_range("kato_holonomy: occupied count out of range");
    const auto& k = loop.samples();
    const std::size_t m = loop.steps();

    auto frame = [&](KPoint p) {
        const auto b = energy_basis(model, p);
        check_gap(b, 0, occupied, "kato_holonomy");
        return b.vectors;
    };
    const CMatrix first = frame(k[0]);
    CMatrix prev = first;
    CMatrix u = CMatrix::identity(occupied);
    for (std::size_t i = 1; i <= m; ++i) {
        const CMatrix cur = (i == m) ? first : frame(k[i]);
        CMatrix ov(occupied);
        for (std::size_t a = 0; a < occupied; ++a)
            for (std::size_t b = 0; b < occupied; ++b) {
                cplx s = 0.0;
                for (std::size_t r = 0; r < n; ++r) s += std::conj(cur(r, a)) * prev(r, b);
                ov(a, b) = s;
            }
        try {
            u = unitary_polar(ov) * u;
        } catch (const RankDeficient&) {
            throw RankDeficient("kato_holonomy: singular frame overlap on segment " + std::to_string(i),
                                static_cast<long>(i));
        }
        prev = cur;
    }
    return Holonomy{std::move(u), loop, loop.footpoint(), m, false};
}

CMatrix projected_uhlmann_holonomy(std::span<const WeightedBasis> frames, LevelRange levels) {
    if (frames.empty()) throw std::invalid_argument("projected_uhlmann_holonomy: empty loop");
    const std::size_t n = frames.front().weights.size();
    const std::size_t c = levels.count;
    if (c == 0 || levels.first + c > n) throw std::out_of_range("projected_uhlmann_holonomy: level range");

    auto scales = [&](const WeightedBasis& f) {
        // A single level renormalises to a projector whatever its weight.
        if (c == 1) return std::vector<double>{1.0};
        double tot = 0.0;
        for (std::size_t j = 0; j < c; ++j) tot += f.weights[levels.first + j];
        if (!(tot > 0.0)) throw RankDeficient("projected_uhlmann_holonomy: projected state vanishes");
        std::vector<double> s(c);
        for (std::size_t j = 0; j < c; ++j) s[j] = std::sqrt(std::max(f.weights[levels.first + j], 0.0) / tot);
        return s;
    };

    CMatrix u = CMatrix::identity(c);
    const std::size_t m = frames.size();
    std::vector<double> sa = scales(frames[0]);
    for (std::size_t i = 0; i < m; ++i) {
        const WeightedBasis& a = frames[i];
        const WeightedBasis& b = frames[(i + 1) % m];
        const std::vector<double> sb = scales(b);
        CMatrix core(c);
        for (std::size_t p = 0; p < c; ++p)
            for (std::size_t q = 0; q < c; ++q) {
                cplx s = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    s += std::conj(b.vectors(r, levels.first + p)) * a.vectors(r, levels.first + q);
                core(p, q) = sb[p] * s * sa[q];
            }
        try {
            u = unitary_polar(core) * u;
        } catch (const RankDeficient&) {
            throw RankDeficient("projected_uhlmann_holonomy: singular overlap on segment " + std::to_string(i + 1),
                                static_cast<long>(i + 1));
        }
        sa = sb;
    }
    return u;
}

}  // namespace mixtopo
