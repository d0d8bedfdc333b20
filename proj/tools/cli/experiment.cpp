#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mixtopo/error.hpp"
#include "mixtopo/keyvalue.hpp"
#include "mixtopo/model_file.hpp"

#ifndef MIXTOPO_VERSION
#define MIXTOPO_VERSION "0.0.0"
#endif

namespace mixtopo::cli {

using nlohmann::json;

namespace {

constexpr int kRefineDepth = 40;

std::string fmt(double v, int digits = 12) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string exact(double v) { return fmt(v, 17); }

bool needs_beta(const std::string& e) {
    return e == "uhlmann-wind" || e == "uhlmann-chern" || e == "phase-profile" || e == "gap-scan" || e == "band-sum";
}

std::pair<int, int> default_grid(const std::string& e) {
    if (e == "chern") return {200, 200};
    return {100, 100};
}

Axis parse_axis(const std::string& s) { return s == "y" ? Axis::y : Axis::x; }

KGrid grid_of(const ExperimentConfig& c) {
    const auto g = c.grid.value_or(default_grid(c.experiment));
    return KGrid(g.first, g.second);
}

StateRule thermal_rule(const BlochModel& m, double beta, const ExperimentConfig& c) {
    return StateRule(m, Thermal{beta}).with_floor(c.floor.value_or(0.0));
}

double max_abs_phase(const PhaseProfile& p) {
    double m = 0.0;
    for (double v : p.phases)
        if (!std::isnan(v)) m = std::max(m, std::abs(v));
    return m;
}

void require_complete(const PhaseProfile& p) {
    if (p.partial()) throw SpectralConstraintViolated("phase profile undefined at " + p.errors.front());
}

InvariantReport wind(const StateRule& rule, Axis axis, const ExperimentConfig& c, PhaseProfile* keep = nullptr) {
    const RunOptions run{c.threads};
    PhaseProfile p = phase_profile(rule, axis, c.footpoint, c.loop_points, c.slow_count, run);
    require_complete(p);
    const double peak = max_abs_phase(p);
    if (keep) *keep = p;
    const std::size_t added = refine_profile(p, rule, kRefineDepth, run);
    require_complete(p);
    InvariantReport r = winding_number(p);
    r.details.emplace_back("max_abs_phase", peak);
    r.details.emplace_back("refined_samples", static_cast<double>(added));
    return r;
}

void run_repro(const ExperimentConfig& c, const BlochModel& m, ResultEnvelope& env) {
    const ChernOptions copt{c.threads, std::nullopt};
    env.reports.push_back(chern_dvector(m, KGrid(200, 200)));
    const StateRule warm = thermal_rule(m, 1.3, c);
    for (Axis a : {Axis::x, Axis::y}) {
        PhaseProfile p;
        env.reports.push_back(wind(warm, a, c, &p));
        env.profiles.push_back(std::move(p));
    }
    BetaScanOptions bopt;
    bopt.loop_points = c.loop_points;
    bopt.slow_count = c.slow_count;
    bopt.footpoint = c.footpoint;
    bopt.threads = c.threads;
    env.reports.push_back(critical_beta(m, Axis::x, 0.5, 1.5, bopt));
    env.reports.push_back(critical_beta(m, Axis::y, 0.5, 2.0, bopt));
    env.reports.push_back(holonomy_gap(warm, KGrid(100, 100), c.loop_points, RunOptions{c.threads}));
    env.reports.push_back(uhlmann_chern(warm, KGrid(100, 100), SubspaceSelector{}, copt));
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? out.substr(0, dot) : out;
    return stem + suffix;
}

void write_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diags)
    : std::runtime_error([&] {
          std::string s = "invalid configuration";
          for (const auto& d : diags) s += "\n  " + d.field + ": " + d.message;
          return s;
      }()),
      diags_(std::move(diags)) {}

std::string version() { return MIXTOPO_VERSION; }

ExperimentConfig parse_config(std::string_view text) {
    const KeyValueDoc doc = KeyValueDoc::parse(text);
    ExperimentConfig c;
    for (const auto& e : doc.entries()) {
        const auto& k = e.key;
        const auto& v = e.value;
        auto pair_of = [&](auto conv) {
            const auto parts = split_list(v);
            if (parts.size() != 2) throw ParseError(k + ": expected two comma-separated values", e.line);
            return std::make_pair(conv(parts[0]), conv(parts[1]));
        };
        auto dbl = [&](const std::string& s) { return parse_double(s, e.line, k); };
        auto integer = [&](const std::string& s) { return static_cast<int>(parse_long(s, e.line, k)); };
        if (k == "model") c.model = v;
        else if (k == "experiment") c.experiment = v;
        else if (k == "beta") c.beta = dbl(v);
        else if (k == "beta-bracket") c.beta_bracket = pair_of(dbl);
        else if (k == "grid") c.grid = pair_of(integer);
        else if (k == "loop-points") c.loop_points = integer(v);
        else if (k == "slow-count") c.slow_count = integer(v);
        else if (k == "axis") c.axis = v;
        else if (k == "footpoint") c.footpoint = dbl(v);
        else if (k == "subspace") c.subspace = integer(v);
        else if (k == "min-gap") c.min_gap = dbl(v);
        else if (k == "floor") c.floor = dbl(v);
        else if (k == "out") c.out = v;
        else if (k == "format") c.format = v;
        else if (k == "threads") {
            const long t = parse_long(v, e.line, k);
            if (t < 0) throw ParseError("threads: must be >= 0", e.line);
            c.threads = static_cast<unsigned>(t);
        } else {
            throw ParseError("unknown key '" + k + "'", e.line);
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "'", 0);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "model = \"" << c.model << "\"\n";
    os << "experiment = \"" << c.experiment << "\"\n";
    if (c.beta) os << "beta = " << exact(*c.beta) << "\n";
    if (c.beta_bracket) os << "beta-bracket = " << exact(c.beta_bracket->first) << ", " << exact(c.beta_bracket->second) << "\n";
    if (c.grid) os << "grid = " << c.grid->first << ", " << c.grid->second << "\n";
    os << "loop-points = " << c.loop_points << "\n";
    os << "slow-count = " << c.slow_count << "\n";
    os << "axis = \"" << c.axis << "\"\n";
    os << "footpoint = " << exact(c.footpoint) << "\n";
    os << "subspace = " << c.subspace << "\n";
    os << "min-gap = " << exact(c.min_gap) << "\n";
    if (c.floor) os << "floor = " << exact(*c.floor) << "\n";
    if (!c.out.empty()) os << "out = \"" << c.out << "\"\n";
    os << "format = \"" << c.format << "\"\n";
    os << "threads = " << c.threads << "\n";
    return os.str();
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = c.model;
    j["experiment"] = c.experiment;
    if (c.beta) j["beta"] = *c.beta;
    if (c.beta_bracket) j["beta-bracket"] = {c.beta_bracket->first, c.beta_bracket->second};
    if (c.grid) j["grid"] = {c.grid->first, c.grid->second};
    j["loop-points"] = c.loop_points;
    j["slow-count"] = c.slow_count;
    j["axis"] = c.axis;
    j["footpoint"] = c.footpoint;
    j["subspace"] = c.subspace;
    j["min-gap"] = c.min_gap;
    if (c.floor) j["floor"] = *c.floor;
    j["out"] = c.out;
    j["format"] = c.format;
    j["threads"] = c.threads;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.model = j.at("model").get<std::string>();
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("beta-bracket")) c.beta_bracket = {j["beta-bracket"][0].get<double>(), j["beta-bracket"][1].get<double>()};
    if (j.contains("grid")) c.grid = {j["grid"][0].get<int>(), j["grid"][1].get<int>()};
    c.loop_points = j.at("loop-points").get<int>();
    c.slow_count = j.at("slow-count").get<int>();
    c.axis = j.at("axis").get<std::string>();
    c.footpoint = j.at("footpoint").get<double>();
    c.subspace = j.at("subspace").get<int>();
    c.min_gap = j.at("min-gap").get<double>();
    if (j.contains("floor")) c.floor = j["floor"].get<double>();
    c.out = j.value("out", std::string{});
    c.format = j.at("format").get<std::string>();
    c.threads = j.at("threads").get<unsigned>();
    return c;
}

std::vector<Diagnostic> validate(const ExperimentConfig& c) {
    std::vector<Diagnostic> d;
    const std::string& e = c.experiment;
    if (e.empty()) {
        d.push_back({"experiment", "required (one of chern, uhlmann-wind, uhlmann-chern, phase-profile, beta-scan, "
                                   "gap-scan, band-sum, repro)"});
    } else if (std::find(kExperiments.begin(), kExperiments.end(), e) == kExperiments.end()) {
        d.push_back({"experiment", "unknown experiment '" + e + "'"});
    }

    std::optional<BlochModel> model;
    try {
        model = resolve_model(c.model);
    } catch (const std::exception& ex) {
        d.push_back({"model", ex.what()});
    }

    if (c.axis != "x" && c.axis != "y") d.push_back({"axis", "must be x or y, got '" + c.axis + "'"});
    if (c.format != "csv" && c.format != "json") d.push_back({"format", "must be csv or json, got '" + c.format + "'"});

    if (needs_beta(e) && !c.beta) d.push_back({"beta", "required for experiment '" + e + "'"});
    if (c.beta && !(std::isfinite(*c.beta) && *c.beta >= 0.0)) d.push_back({"beta", "must be finite and >= 0"});
    if (e == "beta-scan" && !c.beta_bracket) d.push_back({"beta-bracket", "required for experiment 'beta-scan'"});
    if (c.beta_bracket) {
        const auto [lo, hi] = *c.beta_bracket;
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi > lo))
            d.push_back({"beta-bracket", "must satisfy 0 <= lo < hi"});
    }
    if (c.grid && (c.grid->first < 2 || c.grid->second < 2)) d.push_back({"grid", "both sizes must be >= 2"});
    if (c.loop_points < 2) d.push_back({"loop-points", "must be >= 2"});
    if (c.slow_count < 2) d.push_back({"slow-count", "must be >= 2"});
    if (!std::isfinite(c.footpoint)) d.push_back({"footpoint", "must be finite"});
    if (!(c.min_gap > 0.0 && std::isfinite(c.min_gap))) d.push_back({"min-gap", "must be positive"});
    if (c.floor && !(*c.floor >= 0.0 && *c.floor < 1.0)) d.push_back({"floor", "must lie in [0, 1)"});

    if (model) {
        const auto n = static_cast<int>(model->dim());
        if (c.subspace < 1 || c.subspace >= n)
            d.push_back({"subspace", "must satisfy 1 <= n < " + std::to_string(n)});
        if ((e == "chern" || e == "repro") && !model->dvector())
            d.push_back({"model", "experiment '" + e + "' needs a two-band d-vector model"});
        if (e == "gap-scan" && n != 2) d.push_back({"model", "gap-scan needs a two-band model"});
    } else if (c.subspace < 1) {
        d.push_back({"subspace", "must be >= 1"});
    }
    return d;
}

ResultEnvelope run(const ExperimentConfig& c) {
    if (auto diags = validate(c); !diags.empty()) throw ConfigError(std::move(diags));
    const auto t0 = std::chrono::steady_clock::now();
    ResultEnvelope env;
    env.config = c;
    env.version = version();
    const BlochModel m = resolve_model(c.model);
    const Axis axis = parse_axis(c.axis);
    const ChernOptions copt{c.threads, std::nullopt};
    const RunOptions ropt{c.threads};
    const std::string& e = c.experiment;

    if (e == "chern") {
        env.reports.push_back(chern_dvector(m, grid_of(c)));
    } else if (e == "uhlmann-wind") {
        env.reports.push_back(wind(thermal_rule(m, *c.beta, c), axis, c));
    } else if (e == "uhlmann-chern") {
        const SubspaceSelector sel{static_cast<std::size_t>(c.subspace), c.min_gap};
        env.reports.push_back(uhlmann_chern(thermal_rule(m, *c.beta, c), grid_of(c), sel, copt));
    } else if (e == "phase-profile") {
        const StateRule rule = thermal_rule(m, *c.beta, c);
        PhaseProfile p = phase_profile(rule, axis, c.footpoint, c.loop_points, c.slow_count, ropt);
        if (p.partial()) {
            env.warnings = p.errors;
            env.status = kSpectralConstraint;
        } else {
            try {
                InvariantReport r = winding_number(p);
                r.details.emplace_back("max_abs_phase", max_abs_phase(p));
                env.reports.push_back(std::move(r));
            } catch (const UnderResolved& ex) {
                env.warnings.push_back(ex.what());
            }
        }
        env.profiles.push_back(std::move(p));
    } else if (e == "beta-scan") {
        BetaScanOptions bopt;
        bopt.loop_points = c.loop_points;
        bopt.slow_count = c.slow_count;
        bopt.footpoint = c.footpoint;
        bopt.threads = c.threads;
        if (c.floor) bopt.floor = *c.floor;
        env.reports.push_back(critical_beta(m, axis, c.beta_bracket->first, c.beta_bracket->second, bopt));
    } else if (e == "gap-scan") {
        env.reports.push_back(holonomy_gap(thermal_rule(m, *c.beta, c), grid_of(c), c.loop_points, ropt));
    } else if (e == "band-sum") {
        env.reports = band_chern_sum(thermal_rule(m, *c.beta, c), grid_of(c), copt);
    } else if (e == "repro") {
        run_repro(c, m, env);
    }
    env.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return env;
}

std::string reports_csv(const std::vector<InvariantReport>& reports) {
    std::ostringstream os;
    os << "name,value,raw,tolerance,nx,ny,loop_points,slow_count,kx,ky\n";
    for (const auto& r : reports) {
        os << r.name << ',' << fmt(r.value) << ',' << fmt(r.raw) << ',' << fmt(r.tolerance) << ',' << r.grid.nx << ','
           << r.grid.ny << ',' << r.grid.loop_points << ',' << r.grid.slow_count << ',';
        if (r.location)
            os << fmt(r.location->kx) << ',' << fmt(r.location->ky);
        else
            os << ',';
        os << '\n';
    }
    return os.str();
}

std::string profile_csv(const PhaseProfile& p) {
    std::ostringstream os;
    os << "k,phi_u\n";
    for (std::size_t i = 0; i < p.phases.size(); ++i) os << fmt(p.slow_samples[i]) << ',' << fmt(p.phases[i]) << '\n';
    return os.str();
}

json to_json(const InvariantReport& r) {
    json j;
    j["name"] = r.name;
    j["value"] = r.value;
    j["integer"] = r.integer;
    j["raw"] = r.raw;
    j["tolerance"] = r.tolerance;
    j["grid"] = {{"nx", r.grid.nx}, {"ny", r.grid.ny}, {"loop_points", r.grid.loop_points}, {"slow_count", r.grid.slow_count}};
    if (r.location) j["location"] = {r.location->kx, r.location->ky};
    json det = json::object();
    for (const auto& [k, v] : r.details) det[k] = v;
    j["details"] = det;
    return j;
}

json to_json(const PhaseProfile& p) {
    json j;
    j["axis"] = to_string(p.axis);
    j["footpoint"] = p.footpoint;
    j["loop_points"] = p.loop_points;
    j["k"] = p.slow_samples;
    json ph = json::array();
    for (double v : p.phases) ph.push_back(std::isnan(v) ? json(nullptr) : json(v));
    j["phi_u"] = ph;
    j["errors"] = p.errors;
    return j;
}

json to_json(const ResultEnvelope& e, bool include_timing) {
    json j;
    j["config"] = to_json(e.config);
    j["version"] = e.version;
    json reps = json::array();
    for (const auto& r : e.reports) reps.push_back(to_json(r));
    j["results"] = reps;
    if (!e.profiles.empty()) {
        json profs = json::array();
        for (const auto& p : e.profiles) profs.push_back(to_json(p));
        j["profiles"] = profs;
    }
    j["warnings"] = e.warnings;
    if (include_timing) j["wall_time_s"] = e.wall_time_s;
    return j;
}

std::string render(const ResultEnvelope& e) {
    if (e.config.format == "json") return to_json(e).dump(2) + "\n";
    if (e.config.experiment == "phase-profile" && !e.profiles.empty()) return profile_csv(e.profiles.front());
    return reports_csv(e.reports);
}

void write_outputs(const ResultEnvelope& e) {
    const std::string text = render(e);
    if (e.config.out.empty()) {
        std::cout << text;
        return;
    }
    write_file(e.config.out, text);
    if (e.config.experiment == "repro" && e.config.format == "csv") {
        for (const auto& p : e.profiles)
            write_file(sibling_path(e.config.out, std::string("_profile_") + to_string(p.axis) + ".csv"), profile_csv(p));
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kConfigError;
    if (dynamic_cast<const SpectralConstraintViolated*>(&e) || dynamic_cast<const GapClosed*>(&e) ||
        dynamic_cast<const RankDeficient*>(&e) || dynamic_cast<const ZeroTrace*>(&e) ||
        dynamic_cast<const NotPositive*>(&e))
        return kSpectralConstraint;
    if (dynamic_cast<const UnderResolved*>(&e) || dynamic_cast<const PlaquetteOverflow*>(&e)) return kUnderResolved;
    if (dynamic_cast<const NoTransition*>(&e)) return kNoTransition;
    return kFailure;
}

}  // namespace mixtopo::cli
