// dirstat: command-line front end.
//
//   dirstat synth  --model {uniform,watson,mixture,fntf-mixture} ...
//   dirstat test   --in FILE --method {rayleigh,modified-rayleigh,bingham,all}
//   dirstat frame  {bounds,check,harmonic,tighten,potential} ...
//   dirstat order  --in RODS [--field-out FILE]
//   dirstat fit    --in FILE --components N
//
// Every command prints a JSON run report on standard output. Exit codes:
// 0 success, 1 usage, 2 data or schema error, 3 numeric-domain error.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirstat/dirstat.hpp"

#ifndef DIRSTAT_VERSION
#define DIRSTAT_VERSION "0.0.0"
#endif

namespace {

using json = nlohmann::ordered_json;
using namespace dirstat;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numbers go into reports at 12 significant digits.
json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(io::format_number(v).c_str(), nullptr);
}

json num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json nums(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
    return out;
}

json report(const std::string& command, json inputs, json results, std::optional<std::uint64_t> seed) {
    json r;
    r["command"] = command;
    r["inputs"] = std::move(inputs);
    r["results"] = std::move(results);
    r["seed"] = seed ? json(*seed) : json(nullptr);
    r["tool_version"] = DIRSTAT_VERSION;
    return r;
}

void emit(const json& r, std::ostream& out = std::cout) { out << r.dump(2) << '\n'; }

double to_radians(double v, bool degrees) { return degrees ? v * std::numbers::pi / 180.0 : v; }

double axial_angle(const UnitVector& z) { return reduce_axial(std::atan2(z[1], z[0])); }

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string model = "uniform";
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    int dim = 2;
    std::vector<double> kappa{10.0};
    int components = 3;
    std::vector<double> directors;
    std::vector<double> director;
    std::vector<double> weights;
    bool degrees = false;
    unsigned threads = 1;
    std::string out;
};

int run_synth(const SynthArgs& a) {
    json inputs;
    inputs["model"] = a.model;
    inputs["n"] = a.n;
    inputs["threads"] = a.threads;
    json results;
    std::optional<SampleSet> sample;

    auto planar_directors = [&] {
        std::vector<UnitVector> dirs;
        for (double t : a.directors) dirs.push_back(UnitVector::from_angle(to_radians(t, a.degrees)));
        return dirs;
    };

    if (a.model == "uniform") {
        inputs["dim"] = a.dim;
        sample = sample_uniform(a.n, a.dim, a.seed, a.threads);
    } else if (a.model == "watson") {
        if (a.kappa.size() != 1) throw UsageError("watson takes a single --kappa");
        Vector z = Vector::Zero(a.dim);
        if (!a.director.empty()) {
            if (static_cast<int>(a.director.size()) != a.dim) throw UsageError("--director needs --dim coordinates");
            for (int i = 0; i < a.dim; ++i) z[i] = a.director[static_cast<std::size_t>(i)];
        } else if (a.directors.size() == 1 && a.dim == 2) {
            z = UnitVector::from_angle(to_radians(a.directors[0], a.degrees)).coords();
        } else {
            z[0] = 1.0;
        }
        const WatsonParams p(UnitVector::normalized(z), a.kappa[0]);
        inputs["dim"] = a.dim;
        inputs["kappa"] = num(a.kappa[0]);
        inputs["director"] = vector_json(p.director().coords());
        sample = sample_watson(p, a.n, a.seed, a.threads);
    } else if (a.model == "mixture" || a.model == "fntf-mixture") {
        std::vector<UnitVector> dirs;
        if (a.model == "fntf-mixture") {
            dirs = harmonic_fntf_r2(a.components);
            inputs["components"] = a.components;
        } else {
            if (a.directors.empty()) throw UsageError("mixture needs --directors");
            dirs = planar_directors();
        }
        const WatsonMixture mix(dirs, a.kappa, a.weights);
        json angles = json::array();
        for (const auto& z : mix.directors()) angles.push_back(num(axial_angle(z)));
        inputs["directors"] = std::move(angles);
        inputs["kappa"] = nums(mix.kappas());
        inputs["weights"] = nums(mix.weights());
        sample = sample_mixture(mix, a.n, a.seed, a.threads);
    } else {
        throw UsageError("unknown model " + a.model);
    }

    results["rows"] = sample->size();
    results["dim"] = sample->dim();
    if (a.out.empty()) {
        io::write_samples(std::cout, *sample);
        results["out"] = nullptr;
        emit(report("synth", inputs, results, a.seed), std::cerr);
    } else {
        io::write_samples_file(a.out, *sample);
        results["out"] = a.out;
        emit(report("synth", inputs, results, a.seed));
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct TestArgs {
    std::string in;
    std::string method = "all";
    double level = 0.05;
    bool degrees = false;
};

json test_json(const TestResult& r, double level) {
    json t;
    t["method"] = std::string(to_string(r.method));
    t["statistic"] = num(r.statistic);
    t["df"] = r.df;
    t["p_value"] = num(r.p_value);
    t["reject"] = r.rejects(level);
    return t;
}

int run_test(const TestArgs& a) {
    if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
    const auto sample = io::read_samples_file(a.in, {.degrees = a.degrees});
    std::vector<TestMethod> methods;
    if (a.method == "all") {
        methods = {TestMethod::Rayleigh, TestMethod::ModifiedRayleigh, TestMethod::Bingham};
    } else if (a.method == "rayleigh") {
        methods = {TestMethod::Rayleigh};
    } else if (a.method == "modified-rayleigh") {
        methods = {TestMethod::ModifiedRayleigh};
    } else if (a.method == "bingham") {
        methods = {TestMethod::Bingham};
    }
    json inputs;
    inputs["in"] = a.in;
    inputs["method"] = a.method;
    inputs["level"] = num(a.level);
    json results;
    results["n"] = sample.size();
    results["dim"] = sample.dim();
    json tests = json::array();
    for (auto m : methods) tests.push_back(test_json(dirstat::run_test(m, sample), a.level));
    results["tests"] = std::move(tests);
    emit(report("test", inputs, results, std::nullopt));
    return 0;
}

// ---------------------------------------------------------------------------

struct FrameArgs {
    std::string in;
    std::string out;
    int n = 3;
    double tol = 1e-10;
    int max_steps = 10000;
    double step_size = 0.25;
    std::uint64_t seed = 0;
    bool degrees = false;
};

json bounds_json(const FrameBounds& b) {
    json j;
    j["lower"] = num(b.lower);
    j["upper"] = num(b.upper);
    j["is_frame"] = b.is_frame();
    j["is_tight"] = b.is_tight();
    return j;
}

int run_frame(const std::string& sub, const FrameArgs& a) {
    json inputs;
    json results;
    std::optional<std::uint64_t> seed;
    if (sub == "harmonic") {
        inputs["n"] = a.n;
        const auto angles = harmonic_angles_r2(a.n);
        results["angles"] = nums(angles);
        results["defect"] = num(fntf_defect_r2(angles));
        results["bounds"] = bounds_json(frame_bounds(harmonic_fntf_r2(a.n)));
        if (!a.out.empty()) {
            io::write_samples_file(a.out, SampleSet(harmonic_fntf_r2(a.n)));
            results["out"] = a.out;
        }
        emit(report("frame harmonic", inputs, results, seed));
        return 0;
    }

    inputs["in"] = a.in;
    const auto sample = io::read_samples_file(a.in, {.degrees = a.degrees});
    const auto vectors = sample.to_vectors();
    results["n"] = sample.size();
    results["dim"] = sample.dim();
    if (sub == "bounds") {
        results["bounds"] = bounds_json(frame_bounds(vectors));
    } else if (sub == "check") {
        inputs["tol"] = num(a.tol);
        results["is_fntf"] = is_fntf(vectors, a.tol);
        results["bounds"] = bounds_json(frame_bounds(vectors));
        results["tight_bound"] = num(static_cast<double>(sample.size()) / sample.dim());
        results["moment_deviation"] = num(moment_deviation(DiscreteMeasure::counting(sample)));
    } else if (sub == "potential") {
        const auto p = potential_report(DiscreteMeasure::counting(sample));
        results["frame_potential"] = num(p.frame_potential);
        results["riesz_potential"] = num(p.riesz_potential);
        results["fractional_potential"] = num(p.fractional);
        results["moment_deviation"] = num(p.moment_deviation);
    } else if (sub == "tighten") {
        inputs["tol"] = num(a.tol);
        inputs["max_steps"] = a.max_steps;
        inputs["step_size"] = num(a.step_size);
        seed = a.seed;
        const auto r = gradient_tighten(vectors, {.max_steps = a.max_steps, .step_size = a.step_size,
                                                  .tol = a.tol, .seed = a.seed});
        results["target"] = num(1.0 / sample.dim());
        results["initial_frame_potential"] = num(r.trace.front());
        results["final_frame_potential"] = num(r.trace.back());
        results["converged"] = r.converged;
        results["steps"] = r.steps;
        results["max_tangential_force"] = num(r.max_tangential_force);
        results["trace"] = nums(r.trace);
        if (!a.out.empty()) {
            io::write_samples_file(a.out, SampleSet(r.vectors));
            results["out"] = a.out;
        }
    } else {
        throw UsageError("unknown frame subcommand " + sub);
    }
    emit(report("frame " + sub, inputs, results, seed));
    return 0;
}

// ---------------------------------------------------------------------------

struct OrderArgs {
    std::string in;
    double radius = 1.0;
    double cell_size = 1.0;
    int min_count = 5;
    std::string field_out;
    bool degrees = false;
    unsigned threads = 1;
};

int run_order(const OrderArgs& a) {
    const auto rods = io::read_rods_file(a.in, a.degrees);
    json inputs;
    inputs["in"] = a.in;
    inputs["radius"] = num(a.radius);
    inputs["cell_size"] = num(a.cell_size);
    inputs["min_count"] = a.min_count;
    inputs["threads"] = a.threads;

    const auto global = order_parameter(rod_directions(rods));
    const auto field = local_order_field(
        rods, {.radius = a.radius, .cell_size = a.cell_size, .min_count = a.min_count, .threads = a.threads});

    json results;
    results["n"] = rods.size();
    results["order_parameter"] = num(global.order_parameter);
    results["director_angle"] = num(global.director_angle());
    results["q2"] = matrix_json(global.q2);
    int populated = 0;
    for (const auto& c : field.cells) populated += c.order_parameter ? 1 : 0;
    json f;
    f["nx"] = field.nx;
    f["ny"] = field.ny;
    f["cells"] = field.cells.size();
    f["populated"] = populated;
    f["out"] = a.field_out.empty() ? json(nullptr) : json(a.field_out);
    results["field"] = std::move(f);

    if (!a.field_out.empty()) {
        std::ofstream out(a.field_out);
        if (!out) detail::throw_data("cannot write " + a.field_out);
        out << "cx,cy,lambda,director_angle,count\n";
        for (const auto& c : field.cells) {
            out << io::format_number(c.center.x()) << ',' << io::format_number(c.center.y()) << ',';
            if (c.order_parameter) out << io::format_number(*c.order_parameter);
            out << ',';
            if (c.director) out << io::format_number(axial_angle(*c.director));
            out << ',' << c.count << '\n';
        }
    }
    emit(report("order", inputs, results, std::nullopt));
    return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string in;
    int components = 1;
    bool per_component_kappa = false;
    bool free_weights = false;
    std::uint64_t seed = 0;
    int max_iters = 500;
    double tol = 1e-10;
    bool degrees = false;
};

int run_fit(const FitArgs& a) {
    const auto sample = io::read_samples_file(a.in, {.degrees = a.degrees});
    const EmOptions opt{.components = a.components,
                        .shared_kappa = !a.per_component_kappa,
                        .equal_weights = !a.free_weights,
                        .max_iters = a.max_iters,
                        .tol = a.tol,
                        .seed = a.seed};
    const auto fit = fit_watson_mixture_em(sample, opt);
    for (const auto& w : fit.warnings) std::cerr << "dirstat fit: " << w << '\n';

    json inputs;
    inputs["in"] = a.in;
    inputs["components"] = a.components;
    inputs["shared_kappa"] = opt.shared_kappa;
    inputs["equal_weights"] = opt.equal_weights;
    inputs["max_iters"] = a.max_iters;
    inputs["tol"] = num(a.tol);

    const auto& mix = fit.mixture;
    json directors = json::array();
    for (const auto& z : mix.directors()) directors.push_back(num(axial_angle(z)));
    json widths = json::array();
    for (const auto& m : mode_widths(mix)) widths.push_back(num(m.width));
    json flags_uniform = json::array();
    json flags_degenerate = json::array();
    for (std::size_t i = 0; i < mix.size(); ++i) {
        flags_uniform.push_back(static_cast<bool>(fit.near_uniform[i]));
        flags_degenerate.push_back(static_cast<bool>(fit.degenerate[i]));
    }

    json results;
    results["n"] = sample.size();
    results["directors"] = std::move(directors);
    results["kappa"] = mix.shared_kappa() ? num(mix.kappas().front()) : nums(mix.kappas());
    results["weights"] = nums(mix.weights());
    results["widths"] = std::move(widths);
    results["log_likelihood"] = num(fit.log_likelihood);
    results["iterations"] = fit.iterations;
    results["converged"] = fit.converged;
    results["near_uniform"] = std::move(flags_uniform);
    results["degenerate"] = std::move(flags_degenerate);
    results["warnings"] = fit.warnings;
    emit(report("fit", inputs, results, a.seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directional statistics, tight frames and Watson mixtures", "dirstat"};
    app.set_version_flag("--version", std::string(DIRSTAT_VERSION));
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic sample as CSV");
    synth_cmd->add_option("--model", synth.model, "Generating model")
        ->check(CLI::IsMember({"uniform", "watson", "mixture", "fntf-mixture"}));
    synth_cmd->add_option("--n", synth.n, "Number of points")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--dim", synth.dim, "Ambient dimension (watson: 2 or 3)")->check(CLI::Range(2, 16));
    synth_cmd->add_option("--kappa", synth.kappa, "Concentration, shared or one per director")->delimiter(',');
    synth_cmd->add_option("--components", synth.components, "Directors of the fntf-mixture")->check(CLI::Range(2, 1000));
    synth_cmd->add_option("--directors", synth.directors, "Planar director angles (radians)")->delimiter(',');
    synth_cmd->add_option("--director", synth.director, "Watson director coordinates")->delimiter(',');
    synth_cmd->add_option("--weights", synth.weights, "Mixture weights summing to 1")->delimiter(',');
    synth_cmd->add_flag("--degrees", synth.degrees, "Director angles are in degrees");
    synth_cmd->add_option("--threads", synth.threads, "Worker threads (0: all cores)");
    synth_cmd->add_option("--out", synth.out, "Output CSV (default: standard output, report on standard error)");

    TestArgs test;
    auto* test_cmd = app.add_subcommand("test", "Test a sample for uniformity");
    test_cmd->add_option("--in", test.in, "Sample CSV")->required();
    test_cmd->add_option("--method", test.method, "Test to run")
        ->check(CLI::IsMember({"rayleigh", "modified-rayleigh", "bingham", "all"}));
    test_cmd->add_option("--level", test.level, "Significance level");
    test_cmd->add_flag("--degrees", test.degrees, "theta column is in degrees");

    FrameArgs frame;
    auto* frame_cmd = app.add_subcommand("frame", "Frame bounds, tightness, potentials and tightening");
    frame_cmd->require_subcommand(1);
    auto add_in = [&](CLI::App* c) {
        c->add_option("--in", frame.in, "Sample CSV")->required();
        c->add_flag("--degrees", frame.degrees, "theta column is in degrees");
    };
    auto* f_bounds = frame_cmd->add_subcommand("bounds", "Optimal frame bounds");
    add_in(f_bounds);
    auto* f_check = frame_cmd->add_subcommand("check", "Is the set a finite unit norm tight frame");
    add_in(f_check);
    f_check->add_option("--tol", frame.tol, "Tolerance on the frame operator");
    auto* f_harmonic = frame_cmd->add_subcommand("harmonic", "Harmonic tight frame of R^2");
    f_harmonic->add_option("--n", frame.n, "Number of vectors")->required()->check(CLI::Range(2, 1000000));
    f_harmonic->add_option("--out", frame.out, "Write the vectors as CSV");
    auto* f_tighten = frame_cmd->add_subcommand("tighten", "Gradient descent on the frame potential");
    add_in(f_tighten);
    f_tighten->add_option("--tol", frame.tol, "Stop when the potential is within tol of 1/d");
    f_tighten->add_option("--max-steps", frame.max_steps, "Step limit")->check(CLI::NonNegativeNumber);
    f_tighten->add_option("--step-size", frame.step_size, "Initial step size")->check(CLI::PositiveNumber);
    f_tighten->add_option("--seed", frame.seed, "Seed for saddle perturbations");
    f_tighten->add_option("--out", frame.out, "Write the tightened vectors as CSV");
    auto* f_potential = frame_cmd->add_subcommand("potential", "Frame, Riesz and fractional potentials");
    add_in(f_potential);

    OrderArgs order;
    auto* order_cmd = app.add_subcommand("order", "Global and local nematic order of rods");
    order_cmd->add_option("--in", order.in, "Rod CSV with columns x,y,theta")->required();
    order_cmd->add_option("--radius", order.radius, "Neighborhood radius");
    order_cmd->add_option("--cell-size", order.cell_size, "Grid spacing");
    order_cmd->add_option("--min-count", order.min_count, "Fewest rods for a populated cell");
    order_cmd->add_option("--field-out", order.field_out, "Write the local field as CSV");
    order_cmd->add_flag("--degrees", order.degrees, "theta column is in degrees");
    order_cmd->add_option("--threads", order.threads, "Worker threads (0: all cores)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a planar Watson mixture by EM");
    fit_cmd->add_option("--in", fit.in, "Planar sample CSV")->required();
    fit_cmd->add_option("--components", fit.components, "Number of components");
    fit_cmd->add_flag("--per-component-kappa", fit.per_component_kappa, "One concentration per component");
    fit_cmd->add_flag("--free-weights", fit.free_weights, "Estimate mixture weights");
    fit_cmd->add_option("--seed", fit.seed, "Initialization seed");
    fit_cmd->add_option("--max-iters", fit.max_iters, "Iteration limit");
    fit_cmd->add_option("--tol", fit.tol, "Relative log-likelihood gain to stop at");
    fit_cmd->add_flag("--degrees", fit.degrees, "theta column is in degrees");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*test_cmd) return run_test(test);
        if (*frame_cmd) {
            for (auto* sub : {f_bounds, f_check, f_harmonic, f_tighten, f_potential})
                if (*sub) return run_frame(sub->get_name(), frame);
        }
        if (*order_cmd) return run_order(order);
        if (*fit_cmd) return run_fit(fit);
    } catch (const UsageError& e) {
        std::cerr << "dirstat: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "dirstat: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "dirstat: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
