#include "mixtopo/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mixtopo/error.hpp"
#include "mixtopo/matcore.hpp"
#include "parallel.hpp"

namespace mixtopo {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

// Principal branch (-pi, pi].
double wrap_phase(double x) {
    double r = std::remainder(x, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

std::string describe(KPoint k) {
    std::ostringstream os;
    os.precision(6);
    os << "k = (" << k.kx << ", " << k.ky << ")";
    return os.str();
}

double slow_value(int i, int count) { return -kPi + kTwoPi * i / count; }

KPath fast_loop(Axis slow_axis, double slow, double footpoint, int loop_points) {
    return KPath::coordinate_loop(other(slow_axis), slow, footpoint, loop_points);
}

double profile_phase(const StateRule& rule, Axis axis, double slow, double footpoint, int loop_points) {
    return uhlmann_phase(rule, fast_loop(axis, slow, footpoint, loop_points));
}

// rho spectra on the whole grid, indexed i * ny + j.
struct SpectrumGrid {
    KGrid grid;
    std::vector<WeightedBasis> spectra;

    const WeightedBasis& at(int i, int j) const {
        i = ((i % grid.nx) + grid.nx) % grid.nx;
        j = ((j % grid.ny) + grid.ny) % grid.ny;
        return spectra[static_cast<std::size_t>(i) * grid.ny + j];
    }
};

SpectrumGrid sample_spectra(const StateRule& rule, const KGrid& grid, unsigned threads) {
    SpectrumGrid sg{grid, std::vector<WeightedBasis>(grid.size())};
    detail::parallel_for(grid.size(), threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / grid.ny);
        const int j = static_cast<int>(idx % grid.ny);
        const KPoint k = grid.at(i, j);
        try {
            sg.spectra[idx] = rule.spectrum(k);
        } catch (const GapClosed& e) {
            throw SpectralConstraintViolated(std::string("state undefined at ") + describe(k) + ": " + e.what());
        }
    });
    return sg;
}

void scramble(SpectrumGrid& sg, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (auto& s : sg.spectra)
        for (std::size_t j = 0; j < s.vectors.dim(); ++j) {
            const cplx ph = std::polar(1.0, angle(gen));
            for (std::size_t i = 0; i < s.vectors.dim(); ++i) s.vectors(i, j) *= ph;
        }
}

// Smallest weight separation at the boundaries of `levels` over the grid.
void require_separated(const SpectrumGrid& sg, LevelRange levels, double min_gap) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_idx = 0;
    for (std::size_t idx = 0; idx < sg.spectra.size(); ++idx) {
        const auto& w = sg.spectra[idx].weights;
        double g = std::numeric_limits<double>::infinity();
        if (levels.first > 0) g = std::min(g, w[levels.first - 1] - w[levels.first]);
        const std::size_t end = levels.first + levels.count;
        if (end < w.size()) g = std::min(g, w[end - 1] - w[end]);
        if (g < worst) {
            worst = g;
            worst_idx = idx;
        }
    }
    if (worst < min_gap) {
        const KPoint k = sg.grid.at(static_cast<int>(worst_idx / sg.grid.ny), static_cast<int>(worst_idx % sg.grid.ny));
        std::ostringstream os;
        os << "purity gap " << worst << " below required " << min_gap << " at " << describe(k);
        throw SpectralConstraintViolated(os.str());
    }
}

InvariantReport chern_for_levels(const SpectrumGrid& sg, LevelRange levels, unsigned threads, std::string name) {
    const KGrid& g = sg.grid;
    std::vector<double> flux(g.size());
    detail::parallel_for(g.size(), threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / g.ny);
        const int j = static_cast<int>(idx % g.ny);
        // Counterclockwise in (k_x, k_y).
        const WeightedBasis corners[4] = {sg.at(i, j), sg.at(i + 1, j), sg.at(i + 1, j + 1), sg.at(i, j + 1)};
        const CMatrix h = projected_uhlmann_holonomy(corners, levels);
        const double f = std::arg(det(h));
        if (std::abs(f) >= kPi) {
            throw PlaquetteOverflow("plaquette flux reaches pi at " + describe(g.at(i, j)) + "; refine the grid");
        }
        flux[idx] = f;
    });
    double sum = 0.0;
    for (double f : flux) sum += f;
    const double raw = sum / kTwoPi;
    InvariantReport r;
    r.name = std::move(name);
    r.integer = true;
    r.raw = raw;
    r.value = std::round(raw) + 0.0;
    r.tolerance = std::abs(raw - r.value);
    r.grid = GridInfo{g.nx, g.ny, 4, 0};
    return r;
}

std::vector<double> evaluate_phases(const StateRule& rule, Axis axis, const std::vector<double>& slows,
                                    double footpoint, int loop_points, unsigned threads,
                                    std::vector<std::string>& errors) {
    std::vector<double> out(slows.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> err(slows.size());
    detail::parallel_for(slows.size(), threads, [&](std::size_t i) {
        try {
            out[i] = profile_phase(rule, axis, slows[i], footpoint, loop_points);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "k_" << to_string(axis) << " = " << slows[i] << ": " << e.what();
            err[i] = os.str();
        }
    });
    for (auto& e : err)
        if (!e.empty()) errors.push_back(std::move(e));
    return out;
}

// Two eigenvalues of a 2x2 complex matrix.
std::pair<cplx, cplx> eig2(const CMatrix& a) {
    const cplx tr = a(0, 0) + a(1, 1);
    const cplx dt = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const cplx disc = std::sqrt(tr * tr - 4.0 * dt);
    cplx l1 = 0.5 * (tr + disc);
    cplx l2 = 0.5 * (tr - disc);
    // Use the larger root and the determinant for the other one.
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
    if (std::abs(l1) > 0.0) l2 = dt / l1;
    return {l1, l2};
}

}  // namespace

double uhlmann_phase(const StateRule& rule, const KPath& loop) {
    if (!loop.closed()) throw std::invalid_argument("uhlmann_phase: loop is not closed");
    const Holonomy h = uhlmann_holonomy(rule, loop);
    const cplx t = (rule.density(loop.footpoint()) * h.matrix).trace();
    if (std::abs(t) < 1e-12) throw ZeroTrace("uhlmann_phase: Tr[rho H] vanishes at footpoint " + describe(loop.footpoint()));
    return wrap_phase(std::arg(t));
}

PhaseProfile phase_profile(const StateRule& rule, Axis axis, double footpoint, int loop_points, int slow_count,
                           RunOptions opts) {
    if (slow_count < 2) throw std::invalid_argument("phase_profile: need at least 2 slow samples");
    if (loop_points < 2) throw std::invalid_argument("phase_profile: need at least 2 loop steps");
    PhaseProfile p;
    p.axis = axis;
    p.footpoint = footpoint;
    p.loop_points = loop_points;
    p.slow_samples.resize(slow_count);
    for (int i = 0; i < slow_count; ++i) p.slow_samples[i] = slow_value(i, slow_count);
    p.phases = evaluate_phases(rule, axis, p.slow_samples, footpoint, loop_points, opts.threads, p.errors);
    return p;
}

std::size_t refine_profile(PhaseProfile& p, const StateRule& rule, int max_depth, RunOptions opts) {
    if (p.partial()) throw std::invalid_argument("refine_profile: profile is partial");
    std::size_t added = 0;
    for (int depth = 0; depth < max_depth; ++depth) {
        const std::size_t n = p.phases.size();
        std::vector<std::size_t> gaps;  // index i: gap between i and i+1 (cyclic)
        for (std::size_t i = 0; i < n; ++i) {
            const double d = wrap_phase(p.phases[(i + 1) % n] - p.phases[i]);
            if (std::abs(d) > kHalfPi) gaps.push_back(i);
        }
        if (gaps.empty()) break;
        std::vector<double> mids;
        for (std::size_t i : gaps) {
            const double a = p.slow_samples[i];
            const double b = (i + 1 < n) ? p.slow_samples[i + 1] : p.slow_samples.front() + kTwoPi;
            mids.push_back(0.5 * (a + b));
        }
        std::vector<std::string> errors;
        const auto vals = evaluate_phases(rule, p.axis, mids, p.footpoint, p.loop_points, opts.threads, errors);
        if (!errors.empty()) {
            p.errors = std::move(errors);
            return added;
        }
        std::vector<std::pair<double, double>> merged;
        merged.reserve(n + mids.size());
        for (std::size_t i = 0; i < n; ++i) merged.emplace_back(p.slow_samples[i], p.phases[i]);
        for (std::size_t j = 0; j < mids.size(); ++j) {
            // Midpoints of the closing gap lie beyond pi; map them back.
            double s = mids[j];
            if (s >= kPi) s -= kTwoPi;
            merged.emplace_back(s, vals[j]);
        }
        std::sort(merged.begin(), merged.end());
        p.slow_samples.clear();
        p.phases.clear();
        for (const auto& [s, ph] : merged) {
            p.slow_samples.push_back(s);
            p.phases.push_back(ph);
        }
        added += mids.size();
    }
    return added;
}

InvariantReport winding_number(const PhaseProfile& p) {
    if (p.partial()) throw std::invalid_argument("winding_number: profile is partial: " + p.errors.front());
    const std::size_t n = p.phases.size();
    if (n < 2) throw std::invalid_argument("winding_number: profile too short");
    double total = 0.0;
    double worst = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = wrap_phase(p.phases[(i + 1) % n] - p.phases[i]);
        if (std::abs(d) > worst) {
            worst = std::abs(d);
            worst_i = i;
        }
        total += d;
    }
    if (worst > kHalfPi) {
        std::ostringstream os;
        os << "winding_number: unwrapped phase step " << worst << " > pi/2 after k_" << to_string(p.axis) << " = "
           << p.slow_samples[worst_i] << "; increase the slow resolution";
        throw UnderResolved(os.str());
    }
    double raw = total / kTwoPi;
    if (p.axis == Axis::y) raw = -raw;
    InvariantReport r;
    r.name = p.axis == Axis::x ? "c_uhlmann_x" : "c_uhlmann_y";
    r.integer = true;
    r.raw = raw;
    r.value = std::round(raw) + 0.0;
    r.tolerance = std::abs(raw - r.value);
    r.grid = GridInfo{0, 0, p.loop_points, static_cast<int>(n)};
    r.details.emplace_back("max_step", worst);
    return r;
}

double purity_gap(const StateRule& rule, KPoint k, const SubspaceSelector& sel) {
    const auto s = rule.spectrum(k);
    if (sel.count < 1 || sel.count >= s.weights.size())
        throw std::invalid_argument("purity_gap: subspace size must satisfy 1 <= n < N");
    return s.weights[sel.count - 1] - s.weights[sel.count];
}

InvariantReport chern_dvector(const BlochModel& model, const KGrid& grid) {
    if (!model.dvector()) throw std::invalid_argument("chern_dvector: model is not a two-band d-vector model");
    const DVector& d = *model.dvector();
    std::vector<std::array<double, 3>> hat(grid.size());
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            const KPoint k = grid.at(i, j);
            const auto v = d(k);
            const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            if (n <= kDegeneracyTol) throw GapClosed("chern_dvector: |d| vanishes at " + describe(k));
            hat[static_cast<std::size_t>(i) * grid.ny + j] = {v[0] / n, v[1] / n, v[2] / n};
        }
    auto at = [&](int i, int j) -> const std::array<double, 3>& {
        return hat[static_cast<std::size_t>(i % grid.nx) * grid.ny + (j % grid.ny)];
    };
    auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    // Signed solid angle of the spherical triangle (a, b, c).
    auto solid = [&](const std::array<double, 3>& a, const std::array<double, 3>& b, const std::array<double, 3>& c) {
        const double triple = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                              a[2] * (b[0] * c[1] - b[1] * c[0]);
        return 2.0 * std::atan2(triple, 1.0 + dot(a, b) + dot(b, c) + dot(c, a));
    };
    double sum = 0.0;
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            const auto& a = at(i, j);
            const auto& b = at(i + 1, j);
            const auto& c = at(i + 1, j + 1);
            const auto& e = at(i, j + 1);
            const double o1 = solid(a, b, c);
            const double o2 = solid(a, c, e);
            if (std::abs(o1) >= kPi || std::abs(o2) >= kPi)
                throw PlaquetteOverflow("chern_dvector: d-hat triangle too large at " + describe(grid.at(i, j)));
            sum += o1 + o2;
        }
    InvariantReport r;
    r.name = "chern_pure";
    r.integer = true;
    r.raw = sum / (4.0 * kPi);
    r.value = std::round(r.raw) + 0.0;
    r.tolerance = std::abs(r.raw - r.value);
    r.grid = GridInfo{grid.nx, grid.ny, 0, 0};
    return r;
}

InvariantReport uhlmann_chern(const StateRule& rule, const KGrid& grid, const SubspaceSelector& sel,
                              ChernOptions opts) {
    const std::size_t n = rule.model().dim();
    if (sel.count < 1 || sel.count >= n) throw std::invalid_argument("uhlmann_chern: subspace size must satisfy 1 <= n < N");
    SpectrumGrid sg = sample_spectra(rule, grid, opts.threads);
    const LevelRange levels{0, sel.count};
    require_separated(sg, levels, sel.min_gap);
    if (opts.scramble_seed) scramble(sg, *opts.scramble_seed);
    auto r = chern_for_levels(sg, levels, opts.threads, "chern_mixed(n=" + std::to_string(sel.count) + ")");
    r.details.emplace_back("subspace", static_cast<double>(sel.count));
    r.details.emplace_back("min_gap", sel.min_gap);
    return r;
}

std::vector<InvariantReport> band_chern_sum(const StateRule& rule, const KGrid& grid, ChernOptions opts) {
    constexpr double kMinPairGap = 1e-6;
    const std::size_t n = rule.model().dim();
    SpectrumGrid sg = sample_spectra(rule, grid, opts.threads);
    for (std::size_t a = 0; a + 1 < n; ++a) require_separated(sg, LevelRange{a, 1}, kMinPairGap);
    if (opts.scramble_seed) scramble(sg, *opts.scramble_seed);
    std::vector<InvariantReport> out;
    for (std::size_t a = 0; a < n; ++a)
        out.push_back(chern_for_levels(sg, LevelRange{a, 1}, opts.threads, "chern_level(" + std::to_string(a) + ")"));
    return out;
}

InvariantReport holonomy_gap(const StateRule& rule, const KGrid& fp, int loop_points, RunOptions opts) {
    if (rule.model().dim() != 2) throw std::invalid_argument("holonomy_gap: two-band models only");
    std::vector<double> gaps(fp.size());
    detail::parallel_for(fp.size(), opts.threads, [&](std::size_t idx) {
        const KPoint foot = fp.at(static_cast<int>(idx / fp.ny), static_cast<int>(idx % fp.ny));
        const KPath loop = KPath::coordinate_loop(Axis::y, foot.kx, foot.ky, loop_points);
        const Holonomy h = uhlmann_holonomy(rule, loop);
        const auto [l1, l2] = eig2(rule.density(foot) * h.matrix);
        gaps[idx] = std::abs(std::abs(l1) - std::abs(l2));
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < gaps.size(); ++i)
        if (gaps[i] < gaps[best]) best = i;
    InvariantReport r;
    r.name = "holonomy_gap";
    r.value = gaps[best];
    r.raw = gaps[best];
    r.grid = GridInfo{fp.nx, fp.ny, loop_points, 0};
    r.location = fp.at(static_cast<int>(best / fp.ny), static_cast<int>(best % fp.ny));
    return r;
}

InvariantReport critical_beta(const BlochModel& model, Axis axis, double beta_lo, double beta_hi,
                              BetaScanOptions opts) {
    if (!(beta_lo >= 0.0 && beta_hi > beta_lo)) throw std::invalid_argument("critical_beta: need 0 <= lo < hi");
    const RunOptions run{opts.threads};
    int evaluations = 0;
    auto winding_at = [&](double beta) {
        const StateRule rule = StateRule(model, Thermal{beta}).with_floor(opts.floor);
        PhaseProfile p = phase_profile(rule, axis, opts.footpoint, opts.loop_points, opts.slow_count, run);
        if (!p.partial()) refine_profile(p, rule, opts.refine_depth, run);
        ++evaluations;
        if (p.partial()) {
            std::ostringstream os;
            os << "beta = " << beta << ": " << p.errors.front();
            throw SpectralConstraintViolated(os.str());
        }
        try {
            return winding_number(p).value;
        } catch (const UnderResolved& e) {
            std::ostringstream os;
            os << "beta = " << beta << ": " << e.what();
            throw UnderResolved(os.str());
        }
    };

    double lo = beta_lo;
    double hi = beta_hi;
    const double w_lo = winding_at(lo);
    const double w_hi = winding_at(hi);
    if (w_lo == w_hi) {
        std::ostringstream os;
        os << "critical_beta: winding is " << w_lo << " at both beta = " << lo << " and beta = " << hi;
        throw NoTransition(os.str());
    }
    while (hi - lo >= opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (winding_at(mid) == w_lo)
            lo = mid;
        else
            hi = mid;
    }
    InvariantReport r;
    r.name = axis == Axis::x ? "beta_critical_x" : "beta_critical_y";
    r.value = 0.5 * (lo + hi);
    r.raw = r.value;
    r.tolerance = hi - lo;
    r.grid = GridInfo{0, 0, opts.loop_points, opts.slow_count};
    r.details = {{"bracket_lo", lo},
                 {"bracket_hi", hi},
                 {"winding_lo", w_lo},
                 {"winding_hi", w_hi},
                 {"evaluations", static_cast<double>(evaluations)}};
    return r;
}

}  // namespace mixtopo
