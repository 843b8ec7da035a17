#include "ginidyn/cli.hpp"

#include "ginidyn/error.hpp"
#include "ginidyn/log.hpp"
#include "ginidyn/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace ginidyn::cli {
namespace {

namespace fs = std::filesystem;

// Typed access to a config object; finish() rejects keys nobody asked for.
class ConfigReader {
public:
    ConfigReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) {
            fail("expected a JSON object");
        }
    }

    const json* node(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <typename T>
    std::optional<T> get(const std::string& key) {
        const json* n = node(key);
        if (!n) {
            return std::nullopt;
        }
        if (!matches<T>(*n)) {
            fail("\"" + key + "\" has the wrong type");
        }
        return n->get<T>();
    }

    template <typename T>
    T require(const std::string& key) {
        auto v = get<T>(key);
        if (!v) {
            fail("missing \"" + key + "\"");
        }
        return *v;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                fail("unknown key \"" + key + "\"");
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::ParseError, where_ + ": " + what);
    }

private:
    template <typename T>
    static bool matches(const json& n) {
        if constexpr (std::is_same_v<T, bool>) {
            return n.is_boolean();
        } else if constexpr (std::is_same_v<T, std::string>) {
            return n.is_string();
        } else if constexpr (std::is_integral_v<T>) {
            return n.is_number_unsigned() || (n.is_number_integer() && n.get<long long>() >= 0);
        } else if constexpr (std::is_floating_point_v<T>) {
            return n.is_number();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            return n.is_array() && std::all_of(n.begin(), n.end(), [](const json& x) { return x.is_number(); });
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            return n.is_array() && std::all_of(n.begin(), n.end(), [](const json& x) { return x.is_string(); });
        } else {
            return false;
        }
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

fs::path resolve(const fs::path& base_dir, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

std::vector<Check> parse_checks(const std::vector<std::string>& names, const ConfigReader& where) {
    std::vector<Check> checks;
    for (const auto& n : names) {
        const auto c = parse_check(n);
        if (!c) {
            where.fail("unknown check \"" + n + "\"");
        }
        checks.push_back(*c);
    }
    return checks;
}

Format parse_format(const std::string& s) {
    if (s == "csv") {
        return Format::Csv;
    }
    if (s == "json") {
        return Format::Json;
    }
    throw Error(ErrorCode::ParseError, "format must be csv or json, got \"" + s + "\"");
}

Dist parse_initial(const json& j, const fs::path& base_dir, std::optional<std::size_t> trunc,
                   const Tolerances& tol) {
    ConfigReader r(j, "initial");
    const json* probs = r.node("probs");
    const auto file = r.get<std::string>("file");
    const auto preset = r.get<std::string>("preset");
    const auto preset_mean = r.get<double>("mean");
    r.finish();
    if ((probs != nullptr) + file.has_value() + preset.has_value() != 1) {
        r.fail("give exactly one of \"probs\", \"file\", \"preset\"");
    }
    if (probs) {
        if (!probs->is_array() || probs->empty() ||
            !std::all_of(probs->begin(), probs->end(), [](const json& x) { return x.is_number(); })) {
            r.fail("\"probs\" must be a nonempty array of numbers");
        }
        return make_dist(probs->get<std::vector<double>>(), tol);
    }
    if (file) {
        return read_dist_file(resolve(base_dir, *file), tol);
    }
    if (!trunc) {
        r.fail("presets need a top-level \"trunc\"");
    }
    if (*preset == "uniform") {
        return uniform(*trunc);
    }
    if (*preset == "geometric") {
        return geometric(preset_mean.value_or(1.0), *trunc);
    }
    r.fail("unknown preset \"" + *preset + "\"");
}

}  // namespace

SimulateRun parse_simulate_config(const json& j, const fs::path& base_dir) {
    ConfigReader r(j, "simulate config");

    ModelSpec model;
    {
        const json* m = r.node("model");
        if (!m) {
            r.fail("missing \"model\"");
        }
        ConfigReader mr(*m, "model");
        const auto kind_name = mr.require<std::string>("kind");
        const auto kind = parse_model(kind_name);
        if (!kind) {
            mr.fail("unknown model \"" + kind_name + "\"");
        }
        model.kind = *kind;
        if (model.kind == ModelKind::PersuasionPolarization) {
            model.k = mr.require<std::size_t>("k");
        }
        if (model.kind == ModelKind::StickyDispersion) {
            model.mu = mr.require<double>("mu");
        }
        mr.finish();
    }

    SimConfig sim;
    sim.trunc = r.get<std::size_t>("trunc");
    sim.dt = r.get<double>("dt").value_or(sim.dt);
    sim.t_end = r.get<double>("t_end").value_or(sim.t_end);
    sim.record_every = r.get<std::size_t>("record_every").value_or(sim.record_every);
    sim.tol_mass = r.get<double>("tol_mass").value_or(sim.tol_mass);
    sim.tol_mean = r.get<double>("tol_mean").value_or(sim.tol_mean);
    sim.tol_neg = r.get<double>("tol_neg").value_or(sim.tol_neg);
    sim.tail_warn = r.get<double>("tail_warn").value_or(sim.tail_warn);
    sim.stop_on_convergence = r.get<bool>("stop_on_convergence").value_or(false);
    if (const auto integ = r.get<std::string>("integrator")) {
        if (*integ == "rk4") {
            sim.integrator = Integrator::Rk4;
        } else if (*integ == "euler") {
            sim.integrator = Integrator::Euler;
        } else {
            r.fail("integrator must be rk4 or euler");
        }
    }
    if (const auto bounds = r.get<std::vector<std::string>>("bounds")) {
        sim.bounds = parse_checks(*bounds, r);
    }

    const json* initial = r.node("initial");
    if (!initial) {
        r.fail("missing \"initial\"");
    }
    std::optional<std::size_t> preset_trunc = sim.trunc;
    if (!preset_trunc && model.kind == ModelKind::PersuasionPolarization) {
        preset_trunc = 2 * model.k;
    }
    Dist d0 = parse_initial(*initial, base_dir, preset_trunc, Tolerances{sim.tol_mass, sim.tol_neg});

    std::optional<fs::path> output;
    if (const auto o = r.get<std::string>("output")) {
        output = resolve(base_dir, *o);
    }
    Format format = Format::Csv;
    if (const auto f = r.get<std::string>("format")) {
        format = parse_format(*f);
    }
    r.finish();
    return SimulateRun{model, sim, std::move(d0), output, format};
}

VerifyRun parse_verify_config(const json& j, const fs::path& base_dir) {
    ConfigReader r(j, "verify config");
    VerifyRun run;
    run.sweep.mu_grid = r.require<std::vector<double>>("mu_grid");
    run.sweep.trunc = r.get<std::size_t>("trunc").value_or(run.sweep.trunc);
    run.sweep.n_samples = r.get<std::size_t>("n_samples").value_or(run.sweep.n_samples);
    run.sweep.seed = r.get<std::uint64_t>("seed").value_or(0);
    run.sweep.threads = r.get<unsigned>("threads").value_or(0);
    run.sweep.witness_limit = r.get<std::size_t>("witness_limit").value_or(run.sweep.witness_limit);
    if (const auto checks = r.get<std::vector<std::string>>("checks")) {
        run.sweep.checks = parse_checks(*checks, r);
    }
    if (const auto flip = r.get<std::string>("self_test_flip")) {
        const auto c = parse_check(*flip);
        if (!c) {
            r.fail("unknown check \"" + *flip + "\"");
        }
        run.sweep.flip = c;
    }
    if (const auto o = r.get<std::string>("output")) {
        run.output = resolve(base_dir, *o);
    }
    r.finish();
    for (double mu : run.sweep.mu_grid) {
        if (!(mu > 0.0) || !(mu < static_cast<double>(run.sweep.trunc))) {
            r.fail("every mu_grid value must lie in (0, trunc)");
        }
    }
    return run;
}

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<double> mu;
    std::optional<std::size_t> trunc;
    std::vector<std::string> files;
};

void emit(const std::optional<fs::path>& path, const std::string& contents, std::ostream& out) {
    if (path) {
        write_file_atomic(*path, contents);
    } else {
        out << contents;
    }
}

std::optional<fs::path> out_path(const Options& opt, const std::optional<fs::path>& from_config) {
    if (!opt.out.empty()) {
        return fs::path(opt.out);
    }
    return from_config;
}

fs::path config_dir(const std::string& config) {
    const auto parent = fs::path(config).parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::PositivityViolation:
    case ErrorCode::MassDrift:
    case ErrorCode::MeanDrift:
    case ErrorCode::ZeroMean:
    case ErrorCode::SupportTooLarge:
        return kNumerical;
    default:
        return kUsage;
    }
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
    auto run = parse_simulate_config(read_json_file(opt.config), config_dir(opt.config));
    if (!opt.format.empty()) {
        run.format = parse_format(opt.format);
    }
    const auto record = simulate(run.model, run.initial, run.sim);
    const std::string text =
        run.format == Format::Csv ? trajectory_csv(record) : trajectory_json(record).dump(2) + "\n";
    emit(out_path(opt, run.output), text, out);
    if (record.bound_failures > 0) {
        err << "simulate: " << record.bound_failures << " bound evaluation(s) failed\n";
        return kBoundFailure;
    }
    return kOk;
}

int cmd_metrics(const Options& opt, std::ostream& out) {
    if (opt.files.empty() || opt.files.size() > 2) {
        throw Error(ErrorCode::InvalidArgument, "metrics takes one or two distribution files");
    }
    std::vector<Dist> dists;
    for (const auto& f : opt.files) {
        dists.push_back(read_dist_file(f));
    }
    std::vector<std::pair<std::string, double>> table;
    const bool pair = dists.size() == 2;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        const std::string prefix = pair ? (i == 0 ? "a." : "b.") : "";
        table.emplace_back(prefix + "mean", mean(dists[i]));
        table.emplace_back(prefix + "gini_double_sum", gini_double_sum(dists[i]));
        table.emplace_back(prefix + "gini_cdf", gini_cdf(dists[i]));
    }
    if (pair) {
        table.emplace_back("w1", wasserstein1(dists[0], dists[1]));
        table.emplace_back("l1", lp_distance(dists[0], dists[1], 1.0));
    }
    std::string text;
    if (opt.format == "json") {
        json j = json::object();
        for (const auto& [k, v] : table) {
            j[k] = v;
        }
        text = j.dump(2) + "\n";
    } else {
        if (!opt.format.empty() && opt.format != "csv") {
            parse_format(opt.format);
        }
        text = "metric,value\n";
        for (const auto& [k, v] : table) {
            text += k + "," + format_double(v) + "\n";
        }
    }
    emit(out_path(opt, std::nullopt), text, out);
    return kOk;
}

int cmd_equilibrium(const Options& opt, std::ostream& out, std::ostream& err) {
    if (!opt.mu) {
        throw Error(ErrorCode::InvalidArgument, "equilibrium needs --mu");
    }
    const double mu = *opt.mu;
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorCode::InvalidArgument, "--mu must be a finite nonnegative number");
    }
    const std::size_t trunc = opt.trunc.value_or(static_cast<std::size_t>(std::floor(mu)) + 2);
    if (mu > static_cast<double>(trunc) - 1.0) {
        throw Error(ErrorCode::TruncationTooSmall, "need mu <= trunc - 1");
    }
    const Dist eq = shifted_bernoulli(mu, trunc);
    const std::string g_line = "gini_equilibrium," + format_double(gini_equilibrium_value(mu)) + "\n";
    if (!opt.out.empty()) {
        write_dist_file(opt.out, eq);
        out << g_line;
    } else {
        out << dist_to_json(eq).dump(2) << "\n";
        err << g_line;
    }
    return kOk;
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
    auto run = parse_verify_config(read_json_file(opt.config), config_dir(opt.config));
    if (opt.seed) {
        run.sweep.seed = *opt.seed;
    }
    const auto report = sweep(run.sweep);
    emit(out_path(opt, run.output), sweep_report_json(report).dump(2) + "\n", out);
    const auto failures = total_failures(report);
    if (failures > 0) {
        for (const auto& [name, entry] : report) {
            if (entry.failures > 0) {
                err << "verify: " << name << " failed " << entry.failures << " of " << entry.count
                    << " (min slack " << format_double(entry.min_slack) << ")\n";
            }
        }
        return kBoundFailure;
    }
    return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gini-index dynamics: mean-field simulation, metrics and inequality verification", "ginidyn"};
    app.require_subcommand(1);
    Options opt;

    auto* sim = app.add_subcommand("simulate", "integrate a mean-field model and write its trajectory");
    sim->add_option("--config", opt.config, "simulate config (JSON)")->required();
    sim->add_option("--out", opt.out, "trajectory output path (default: config \"output\" or stdout)");
    sim->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* met = app.add_subcommand("metrics", "mean, Gini, and with two inputs W1 and l1");
    met->add_option("files", opt.files, "one or two distribution files")->required()->expected(1, 2);
    met->add_option("--out", opt.out, "output path (default stdout)");
    met->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* eq = app.add_subcommand("equilibrium", "write the shifted Bernoulli equilibrium for a mean");
    eq->add_option("--mu", opt.mu, "mean value")->required();
    eq->add_option("--trunc", opt.trunc, "largest state (default floor(mu) + 2)");
    eq->add_option("--out", opt.out, "distribution file to write (default stdout)");

    auto* ver = app.add_subcommand("verify", "randomized sweep of every inequality over V_mu");
    ver->add_option("--config", opt.config, "verify config (JSON)")->required();
    ver->add_option("--out", opt.out, "report path (default: config \"output\" or stdout)");
    ver->add_option("--seed", opt.seed, "override the config seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            return cmd_simulate(opt, out, err);
        }
        if (*met) {
            return cmd_metrics(opt, out);
        }
        if (*eq) {
            return cmd_equilibrium(opt, out, err);
        }
        return cmd_verify(opt, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
}

}  // namespace ginidyn::cli
