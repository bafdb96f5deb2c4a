#include "hawkes/commands.hpp"

#include "hawkes/control.hpp"
#include "hawkes/csv.hpp"
#include "hawkes/diagnostics.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/experiments.hpp"
#include "hawkes/lift.hpp"
#include "hawkes/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace hawkes {

namespace {

namespace fs = std::filesystem;

const std::string kAuto = "auto";

void require(bool ok, const ConfigSection& s, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(s.where(key) + ": " + what);
}

double positive(const ConfigSection& s, const std::string& key, double fallback) {
    const double v = s.get_double(key, fallback);
    require(std::isfinite(v) && v > 0.0, s, key, "must be a finite number > 0");
    return v;
}

double nonnegative(const ConfigSection& s, const std::string& key, double fallback) {
    const double v = s.get_double(key, fallback);
    require(std::isfinite(v) && v >= 0.0, s, key, "must be a finite number >= 0");
    return v;
}

double finite(const ConfigSection& s, const std::string& key, double fallback) {
    const double v = s.get_double(key, fallback);
    require(std::isfinite(v), s, key, "must be finite");
    return v;
}

double window(const ConfigSection& s, const std::string& key) {
    const double v = s.get_double(key, kInfiniteHorizon);
    require(v > 0.0, s, key, "must be > 0 or inf");
    return v;
}

std::size_t count_at_least(const ConfigSection& s, const std::string& key, std::uint64_t fallback,
                           std::uint64_t minimum) {
    const auto v = s.get_uint(key, fallback);
    require(v >= minimum, s, key, "must be >= " + std::to_string(minimum));
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> ladder_sizes(const ConfigSection& s, const std::string& key) {
    const auto list = s.get_sizes(key);
    require(!list.empty(), s, key, "must list at least one ladder size");
    for (const auto n : list) require(n >= 1, s, key, "ladder sizes must be >= 1");
    return list;
}

FitMethod method_of(const ConfigSection& s) {
    const std::string m = s.get_string("method", "l1");
    require(m == "l1" || m == "l2", s, "method", "must be l1 or l2, got '" + m + "'");
    return fit_method_from_string(m);
}

JumpRate psi_of(const ConfigSection& s) {
    const std::string name = s.get_string("psi", "identity");
    if (name == "identity") return JumpRate::identity();
    if (name == "positive_part") return JumpRate::positive_part();
    if (name == "capped") return JumpRate::capped(positive(s, "psi_cap", 7.0));
    if (name == "zero") return JumpRate::zero();
    if (name == "shifted_positive") return JumpRate::shifted_positive(finite(s, "psi_shift", 0.0));
    throw ConfigError(s.where("psi") + ": unknown jump-rate function '" + name +
                      "' (identity, positive_part, capped, zero, shifted_positive)");
}

MarkDistribution marks_of(const ConfigSection& s) {
    const std::string name = s.get_string("marks", "point_mass");
    if (name == "point_mass") return MarkDistribution::point_mass(finite(s, "mark_value", 1.0));
    if (name == "exponential") return MarkDistribution::exponential(positive(s, "mark_rate", 1.0));
    if (name == "normal") return MarkDistribution::normal(finite(s, "mark_mean", 0.0), positive(s, "mark_sd", 1.0));
    throw ConfigError(s.where("marks") + ": unknown mark distribution '" + name + "' (point_mass, exponential, normal)");
}

MarkTransform transform_of(const ConfigSection& s) {
    const std::string name = s.get_string("b", "one");
    try {
        return mark_transform_from_string(name);
    } catch (const std::exception&) {
        throw ConfigError(s.where("b") + ": unknown mark transform '" + name + "' (one, identity, absolute)");
    }
}

struct DriverSettings {
    std::uint64_t seed = 0;
    double dt = 0.01;
    double horizon = 10.0;
    double lambda_max = 10.0;
};

DriverSettings driver_of(const Config& cfg, const Overrides& ov) {
    const auto& s = cfg.section_or_empty("driver");
    DriverSettings d;
    d.seed = s.get_uint("seed", 0);
    if (ov.seed) d.seed = *ov.seed;
    d.dt = positive(s, "dt", 0.01);
    d.horizon = positive(s, "horizon", 10.0);
    d.lambda_max = positive(s, "lambda_max", 10.0);
    if (d.dt > d.horizon) throw ConfigError(s.where("dt") + ": must not exceed horizon");
    return d;
}

struct RunSettings {
    fs::path out;
    std::size_t threads = 1;
};

RunSettings run_of(const Config& cfg, const Overrides& ov) {
    const auto& s = cfg.section_or_empty("run");
    RunSettings r;
    r.out = s.get_string("out", "out");
    r.threads = s.has("threads") && s.get_string("threads") != kAuto ? count_at_least(s, "threads", 1, 1)
                                                                      : default_threads();
    if (ov.out_dir) r.out = *ov.out_dir;
    if (ov.threads) r.threads = *ov.threads;
    if (r.threads == 0) throw ConfigError("--threads must be >= 1");
    return r;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

void write_common_meta(std::ostream& os, const std::string& command, const Config& cfg) {
    csv::write_meta(os, "command", command);
    csv::write_meta(os, "config", fs::path(cfg.origin()).filename().string());
}

struct FitPlan {
    StudyOptions study;
    double curve_step = 0.01;
    double curve_end = 10.0;
};

void read_fit_options(const ConfigSection& s, StudyOptions& study, const std::string& horizon_key) {
    study.n_list = ladder_sizes(s, "n_list");
    study.beta_base = positive(s, "beta", 0.5);
    study.method = method_of(s);
    study.fit.horizon = window(s, horizon_key);
    study.fit.condition_threshold = positive(s, "condition_threshold", 1e12);
    study.warm_start = s.get_bool("warm_start", true);
}

void reject_unknown(const Config& cfg);

std::string verdict_word(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"run", "out", "out", "output directory, created when missing; --out overrides"},
        {"run", "threads", "auto", "worker threads >= 1 or auto (hardware); results do not depend on it; --threads overrides"},
        {"driver", "seed", "0", "unsigned 64-bit; path i of a Monte Carlo run uses seed + i; --seed overrides"},
        {"driver", "dt", "0.01", "grid step > 0, at most horizon"},
        {"driver", "horizon", "10", "simulation horizon T > 0"},
        {"driver", "lambda_max", "10", "dominating intensity > 0; must exceed lambda_inf + psi along every path"},
        {"model", "builtin", "hawkes_ou", "hawkes_ou | affine | linear_hawkes | poisson"},
        {"model", "x0", "0", "initial state, finite"},
        {"model", "mean_reversion", "0.5", "hawkes_ou: drift -a x, finite"},
        {"model", "sigma", "1 (hawkes_ou), 0 (affine)", "diffusion coefficient >= 0"},
        {"model", "gamma_scale", "40", "hawkes_ou: jump size -s x / (1 + c x^2), finite"},
        {"model", "gamma_curvature", "16", "hawkes_ou: c >= 0"},
        {"model", "lambda_inf", "1", "hawkes_ou, affine: baseline intensity >= 0"},
        {"model", "psi_cap", "7", "hawkes_ou, affine with psi = capped: cap > 0"},
        {"model", "nu_floor", "0.2", "hawkes_ou: nu(x) = f + (1 - f) exp(-w x^2), f in [0, 1]"},
        {"model", "nu_width", "0.1", "hawkes_ou: w >= 0"},
        {"model", "drift_const", "0", "affine: drift c + d x, finite"},
        {"model", "drift_linear", "0", "affine: d, finite"},
        {"model", "gamma", "1", "affine: constant jump size, finite"},
        {"model", "nu", "1", "affine: constant excitation weight, finite"},
        {"model", "psi", "identity", "affine: identity | positive_part | capped | zero | shifted_positive"},
        {"model", "psi_shift", "0", "affine with psi = shifted_positive: max(u + shift, 0)"},
        {"model", "lambda0", "1", "linear_hawkes: baseline intensity >= 0"},
        {"model", "rate", "1", "poisson: constant intensity >= 0"},
        {"model", "marks", "point_mass", "point_mass | exponential | normal"},
        {"model", "mark_value", "1", "point_mass: mark value, finite"},
        {"model", "mark_rate", "1", "exponential: rate > 0"},
        {"model", "mark_mean", "0", "normal: mean, finite"},
        {"model", "mark_sd", "1", "normal: standard deviation > 0"},
        {"model", "b", "one", "mark transform: one | identity | absolute"},
        {"kernel", "type", "", "expsum | ladder | builtin | tabulated; the kernel must be finite and integrable"},
        {"kernel", "eta", "", "expsum, ladder: coefficient list, finite"},
        {"kernel", "beta", "", "expsum: strictly increasing positive rates, same length as eta"},
        {"kernel", "beta_base", "", "ladder: rates beta_base * k, k = 1..n, beta_base > 0"},
        {"kernel", "name", "", "builtin: nonmonotone | power_law"},
        {"kernel", "exponent", "2", "power_law: (1 + t)^(-exponent), exponent > 1"},
        {"kernel", "file", "", "tabulated: two-column CSV (t, phi) starting at t = 0, path relative to the config"},
        {"kernel", "scale", "1", "multiplies the kernel, finite"},
        {"kernels.<name>", "(any [kernel] key)", "", "additional named kernel for simulate"},
        {"fit", "n_list", "", "nonempty list of ladder sizes n >= 1"},
        {"fit", "beta", "0.5", "ladder base rate beta > 0 (rates beta * k)"},
        {"fit", "method", "l1", "l1 | l2"},
        {"fit", "horizon", "inf", "fit window [0, H], H > 0 or inf"},
        {"fit", "condition_threshold", "1e12", "largest accepted Gram condition number > 0"},
        {"fit", "warm_start", "true", "l1: also start each fit from the previous ladder"},
        {"fit", "curve_step", "0.01", "kernel_curves.csv grid step > 0"},
        {"fit", "curve_end", "10", "kernel_curves.csv grid end > 0"},
        {"simulate", "kernels", "kernel", "list of kernel names: kernel or a [kernels.<name>] block"},
        {"simulate", "engine", "auto", "auto | volterra | lifted (lifted needs exponential sums)"},
        {"check", "t_min", "0", "sampling box, t_min <= t_max"},
        {"check", "t_max", "10", "sampling box"},
        {"check", "t_samples", "11", ">= 1"},
        {"check", "x_min", "-10", "sampling box, x_min < x_max"},
        {"check", "x_max", "10", "sampling box"},
        {"check", "x_samples", "401", ">= 2"},
        {"check", "u_min", "auto", "psi argument range start; auto: 0 for nonnegative excitation, -u_max otherwise"},
        {"check", "u_max", "20", "psi argument range end > 0"},
        {"check", "u_samples", "4001", ">= 2"},
        {"converge", "n_list", "", "nonempty list of ladder sizes n >= 1"},
        {"converge", "beta", "0.5", "ladder base rate > 0"},
        {"converge", "method", "l1", "l1 | l2"},
        {"converge", "fit_horizon", "inf", "fit window > 0 or inf"},
        {"converge", "condition_threshold", "1e12", "largest accepted Gram condition number > 0"},
        {"converge", "warm_start", "true", "l1: also start each fit from the previous ladder"},
        {"converge", "n_paths", "1000", "coupled path pairs >= 1 (1 path: standard errors NA)"},
        {"converge", "allow_unstable", "false", "skip the stability precondition L_psi ||phi||_1 E|b| < 1"},
        {"converge", "max_rejection_rate", "0.01", "tolerated share of domination-violating paths in [0, 1)"},
        {"market", "mu", "0.13", "asset drift, finite"},
        {"market", "r", "0.03", "risk-free rate, finite"},
        {"market", "sigma", "0.4", "volatility > 0"},
        {"market", "gamma", "-0.1", "relative jump size > -1"},
        {"market", "rho", "0.2", "discount rate > 0"},
        {"market", "x0", "1", "initial wealth > 0"},
        {"market", "lambda0", "0.5", "baseline intensity >= 0; lambda = max(lambda0 + eta . xi, 0)"},
        {"portfolio", "n_list", "(unset)", "ladder sizes >= 1 fitted to [kernel]; unset uses [kernel] itself (must be an exponential sum)"},
        {"portfolio", "beta", "0.5", "ladder base rate > 0"},
        {"portfolio", "method", "l1", "l1 | l2"},
        {"portfolio", "fit_horizon", "inf", "fit window > 0 or inf"},
        {"portfolio", "condition_threshold", "1e12", "largest accepted Gram condition number > 0"},
        {"portfolio", "warm_start", "true", "l1: also start each fit from the previous ladder"},
        {"portfolio", "horizon_trunc", "40", "truncation horizon > 0; its tail bound must not exceed tail_tolerance"},
        {"portfolio", "dt", "0.01", "time step > 0"},
        {"portfolio", "lambda_max", "12", "dominating intensity > 0"},
        {"portfolio", "n_paths", "10000", "Monte Carlo paths >= 1"},
        {"portfolio", "seed", "0", "unsigned 64-bit; --seed overrides"},
        {"portfolio", "tail_tolerance", "0.001", "largest accepted truncation tail bound > 0"},
        {"portfolio", "policies", "true", "also run the policy-simulation checks"},
        {"portfolio", "suboptimal_fraction", "0.3", "constant fraction in [0, 1] for the suboptimal policy"},
    };
    return keys;
}

namespace {

void reject_unknown(const Config& cfg) {
    std::string msg;
    for (const auto& name : cfg.section_names()) {
        const std::string doc = name.rfind("kernels.", 0) == 0 ? "kernel" : name;
        const auto& s = cfg.section(name);
        bool known_section = false;
        for (const auto& k : config_keys()) known_section = known_section || k.section == doc;
        if (!known_section) {
            msg += (msg.empty() ? "" : "; ") + cfg.origin() + ": unknown section [" + name + "]";
            continue;
        }
        for (const auto& key : s.keys()) {
            const bool known = std::any_of(config_keys().begin(), config_keys().end(),
                                           [&](const ConfigKey& k) { return k.section == doc && k.key == key; });
            if (!known) msg += (msg.empty() ? "" : "; ") + s.where(key) + ": unknown key";
        }
    }
    if (!msg.empty()) throw ConfigError(msg);
}

}  // namespace

std::string config_reference() {
    std::ostringstream os;
    os << "Config file: [section] blocks of key = value lines, '#' comments, comma-separated lists.\n";
    std::string current;
    for (const auto& k : config_keys()) {
        if (k.section != current) {
            current = k.section;
            os << "\n[" << current << "]\n";
        }
        os << "  " << k.key;
        for (std::size_t pad = k.key.size(); pad < 20; ++pad) os << ' ';
        os << ' ' << (k.fallback.empty() ? "(required)" : "default " + k.fallback) << "; " << k.precondition << '\n';
    }
    return os.str();
}

ModelSpec model_from_config(const ConfigSection& s) {
    const std::string builtin = s.get_string("builtin", "hawkes_ou");
    ModelSpec model;
    if (builtin == "hawkes_ou") {
        HawkesOuParams p;
        p.mean_reversion = finite(s, "mean_reversion", p.mean_reversion);
        p.sigma = nonnegative(s, "sigma", p.sigma);
        p.gamma_scale = finite(s, "gamma_scale", p.gamma_scale);
        p.gamma_curvature = nonnegative(s, "gamma_curvature", p.gamma_curvature);
        p.lambda_inf = nonnegative(s, "lambda_inf", p.lambda_inf);
        p.psi_cap = positive(s, "psi_cap", p.psi_cap);
        p.nu_floor = nonnegative(s, "nu_floor", p.nu_floor);
        require(p.nu_floor <= 1.0, s, "nu_floor", "must lie in [0, 1]");
        p.nu_width = nonnegative(s, "nu_width", p.nu_width);
        p.x0 = finite(s, "x0", p.x0);
        model = hawkes_ou(p);
    } else if (builtin == "affine") {
        AffineParams p;
        p.drift_const = finite(s, "drift_const", p.drift_const);
        p.drift_linear = finite(s, "drift_linear", p.drift_linear);
        p.sigma = nonnegative(s, "sigma", p.sigma);
        p.gamma = finite(s, "gamma", p.gamma);
        p.nu = finite(s, "nu", p.nu);
        p.lambda_inf = nonnegative(s, "lambda_inf", p.lambda_inf);
        p.psi = psi_of(s);
        p.x0 = finite(s, "x0", p.x0);
        model = affine_model(p);
    } else if (builtin == "linear_hawkes") {
        model = linear_hawkes(nonnegative(s, "lambda0", 1.0));
        model.x0 = finite(s, "x0", 0.0);
    } else if (builtin == "poisson") {
        model = poisson_model(nonnegative(s, "rate", 1.0));
        model.x0 = finite(s, "x0", 0.0);
    } else {
        throw ConfigError(s.where("builtin") + ": unknown model '" + builtin +
                          "' (hawkes_ou, affine, linear_hawkes, poisson)");
    }
    if (s.has("marks")) model.marks = marks_of(s);
    if (s.has("b")) model.b = transform_of(s);
    return model;
}

Kernel kernel_from_config(const ConfigSection& s, const std::string& base_dir) {
    const std::string type = s.get_string("type");
    Kernel k = Kernel::zero();
    try {
        if (type == "expsum") {
            k = Kernel::exp_sum(s.get_doubles("eta"), s.get_doubles("beta"));
        } else if (type == "ladder") {
            k = Kernel::ladder(s.get_doubles("eta"), positive(s, "beta_base", 0.5));
        } else if (type == "builtin") {
            const std::string name = s.get_string("name");
            if (name == "nonmonotone") {
                k = nonmonotone_kernel();
            } else if (name == "power_law") {
                const double e = s.get_double("exponent", 2.0);
                require(e > 1.0 && std::isfinite(e), s, "exponent", "must be a finite number > 1");
                k = power_law_kernel(1.0, e);
            } else {
                throw ConfigError(s.where("name") + ": unknown builtin kernel '" + name + "' (nonmonotone, power_law)");
            }
        } else if (type == "tabulated") {
            fs::path file = s.get_string("file");
            if (file.is_relative() && !base_dir.empty()) file = fs::path(base_dir) / file;
            const auto rows = csv::read_numeric(file.string());
            std::vector<double> t, v;
            for (const auto& row : rows) {
                if (row.size() < 2) throw ConfigError(s.where("file") + ": rows need two columns");
                t.push_back(row[0]);
                v.push_back(row[1]);
            }
            k = Kernel::tabulated(std::move(t), std::move(v));
        } else {
            throw ConfigError(s.where("type") + ": unknown kernel type '" + type + "' (expsum, ladder, builtin, tabulated)");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(s.where("type") + ": " + e.what());
    }
    const double scale = finite(s, "scale", 1.0);
    if (scale != 1.0) k = k.scaled(scale);
    static_cast<void>(l1_norm(k));
    return k;
}

int cmd_fit(const Config& cfg, const Overrides& ov, std::ostream& log) {
    reject_unknown(cfg);
    const RunSettings run = run_of(cfg, ov);
    const Kernel phi = kernel_from_config(cfg.section("kernel"), cfg.base_dir());
    const auto& s = cfg.section("fit");
    FitPlan plan;
    read_fit_options(s, plan.study, "horizon");
    plan.curve_step = positive(s, "curve_step", 0.01);
    plan.curve_end = positive(s, "curve_end", 10.0);

    const auto fits = fit_ladder(phi, plan.study);
    std::size_t n_max = 0;
    for (const auto& f : fits) n_max = std::max(n_max, f.n);

    auto fit_os = open_output(run.out, "fit.csv");
    write_common_meta(fit_os, "fit-kernel", cfg);
    csv::write_meta(fit_os, "kernel", phi.describe());
    csv::write_meta(fit_os, "method", to_string(plan.study.method));
    csv::write_meta(fit_os, "fit_horizon", csv::number(plan.study.fit.horizon));
    std::vector<std::string> header = {"n", "beta"};
    for (std::size_t k = 1; k <= n_max; ++k) header.push_back("eta_" + std::to_string(k));
    for (const char* h : {"l1_error", "l2_error_sq", "condition"}) header.emplace_back(h);
    csv::write_row(fit_os, header);
    for (const auto& f : fits) {
        std::vector<std::string> row = {std::to_string(f.n), csv::number(f.beta_base)};
        for (std::size_t k = 0; k < n_max; ++k) row.push_back(k < f.n ? csv::number(f.eta[k]) : "");
        row.push_back(csv::number(f.l1_error));
        row.push_back(csv::number(f.l2_error_sq));
        row.push_back(csv::number(f.hilbert_condition));
        csv::write_row(fit_os, row);
        log << "n=" << f.n << " l1_error=" << csv::number(f.l1_error) << " l2_error_sq=" << csv::number(f.l2_error_sq)
            << '\n';
        if (!f.converged) log << "warning: n=" << f.n << " search stopped at the evaluation limit\n";
    }

    auto curve_os = open_output(run.out, "kernel_curves.csv");
    write_common_meta(curve_os, "fit-kernel", cfg);
    std::vector<std::string> curve_header = {"t", "phi"};
    std::vector<Kernel> approx;
    for (const auto& f : fits) {
        curve_header.push_back("phi_" + std::to_string(f.n));
        approx.push_back(f.kernel());
    }
    csv::write_row(curve_os, curve_header);
    const auto steps = static_cast<std::size_t>(std::llround(plan.curve_end / plan.curve_step));
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * plan.curve_step;
        std::vector<std::string> row = {csv::number(t), csv::number(phi(t))};
        for (const auto& a : approx) row.push_back(csv::number(a(t)));
        csv::write_row(curve_os, row);
    }
    return exit_codes::ok;
}

int cmd_simulate(const Config& cfg, const Overrides& ov, std::ostream& log) {
    reject_unknown(cfg);
    const RunSettings run = run_of(cfg, ov);
    const DriverSettings d = driver_of(cfg, ov);
    const ModelSpec model = model_from_config(cfg.section_or_empty("model"));
    const auto& s = cfg.section_or_empty("simulate");
    std::vector<std::string> names = s.has("kernels") ? s.get_strings("kernels") : std::vector<std::string>{"kernel"};
    require(!names.empty(), s, "kernels", "must name at least one kernel");
    const std::string engine = s.get_string("engine", kAuto);
    require(engine == kAuto || engine == "volterra" || engine == "lifted", s, "engine",
            "must be auto, volterra or lifted");
    std::vector<Kernel> kernels;
    for (const auto& name : names) {
        if (name == "kernel") {
            kernels.push_back(kernel_from_config(cfg.section("kernel"), cfg.base_dir()));
        } else {
            kernels.push_back(kernel_from_config(cfg.section("kernels." + name), cfg.base_dir()));
        }
        if (engine == "lifted" && !kernels.back().is_exp_sum())
            throw ConfigError(s.where("engine") + ": kernel '" + name + "' is not an exponential sum");
    }

    const NoiseDriver driver = make_driver(d.seed, d.dt, d.horizon, d.lambda_max, model.marks);
    std::vector<PathRecord> paths;
    for (const auto& k : kernels) {
        if (engine == "volterra") {
            paths.push_back(simulate_volterra(model, k, driver));
        } else if (engine == "lifted") {
            paths.push_back(simulate_lifted(model, k, driver));
        } else {
            paths.push_back(simulate_path(model, k, driver));
        }
    }

    auto summary = open_output(run.out, "simulate_summary.csv");
    write_common_meta(summary, "simulate", cfg);
    csv::write_meta(summary, "seed", std::to_string(d.seed));
    csv::write_meta(summary, "model", model.name);
    csv::write_row(summary, {"kernel", "description", "jumps", "candidates", "same_events_as_first", "x_T", "lambda_T"});
    for (std::size_t i = 0; i < names.size(); ++i) {
        const PathRecord& p = paths[i];
        for (const auto& [file, writer] :
             {std::pair{"path_" + names[i] + ".csv", &write_path_csv}, std::pair{"jumps_" + names[i] + ".csv", &write_jumps_csv}}) {
            auto os = open_output(run.out, file);
            write_common_meta(os, "simulate", cfg);
            csv::write_meta(os, "seed", std::to_string(d.seed));
            csv::write_meta(os, "kernel", kernels[i].describe());
            writer(os, p);
        }
        bool same = p.jumps.size() == paths[0].jumps.size();
        for (std::size_t j = 0; same && j < p.jumps.size(); ++j) same = p.jumps[j].point_index == paths[0].jumps[j].point_index;
        csv::write_row(summary, {names[i], kernels[i].describe(), std::to_string(p.jumps.size()),
                                 std::to_string(p.candidates), same ? "true" : "false", csv::number(p.x.back()),
                                 csv::number(p.lambda.back())});
        log << names[i] << ": " << p.jumps.size() << " jumps, X_T=" << csv::number(p.x.back()) << '\n';
    }
    return exit_codes::ok;
}

int cmd_check(const Config& cfg, const Overrides& ov, std::ostream& log) {
    reject_unknown(cfg);
    const RunSettings run = run_of(cfg, ov);
    const ModelSpec model = model_from_config(cfg.section_or_empty("model"));
    const Kernel phi = kernel_from_config(cfg.section("kernel"), cfg.base_dir());
    const auto& s = cfg.section_or_empty("check");
    SamplingBox box;
    box.t_min = finite(s, "t_min", box.t_min);
    box.t_max = finite(s, "t_max", box.t_max);
    require(box.t_min <= box.t_max, s, "t_max", "must be >= t_min");
    box.t_samples = count_at_least(s, "t_samples", box.t_samples, 1);
    box.x_min = finite(s, "x_min", box.x_min);
    box.x_max = finite(s, "x_max", box.x_max);
    require(box.x_min < box.x_max, s, "x_max", "must be > x_min");
    box.x_samples = count_at_least(s, "x_samples", box.x_samples, 2);
    if (s.has("u_min") && s.get_string("u_min") != kAuto) box.u_min = finite(s, "u_min", 0.0);
    box.u_max = positive(s, "u_max", box.u_max);
    if (!std::isnan(box.u_min)) require(box.u_min < box.u_max, s, "u_min", "must be < u_max");
    box.u_samples = count_at_least(s, "u_samples", box.u_samples, 2);

    const AssumptionReport report = check_assumptions(model, phi, box);
    write_report_text(log, report);
    auto txt = open_output(run.out, "check.txt");
    write_report_text(txt, report);
    auto os = open_output(run.out, "check.csv");
    write_common_meta(os, "check", cfg);
    csv::write_meta(os, "model", model.name);
    csv::write_meta(os, "kernel", phi.describe());
    write_report_csv(os, report);
    return exit_code(report.overall);
}

int cmd_converge(const Config& cfg, const Overrides& ov, std::ostream& log) {
    reject_unknown(cfg);
    const RunSettings run = run_of(cfg, ov);
    const DriverSettings d = driver_of(cfg, ov);
    const ModelSpec model = model_from_config(cfg.section_or_empty("model"));
    const Kernel phi = kernel_from_config(cfg.section("kernel"), cfg.base_dir());
    const auto& s = cfg.section("converge");
    StudyOptions study;
    read_fit_options(s, study, "fit_horizon");
    study.coupling.horizon = d.horizon;
    study.coupling.dt = d.dt;
    study.coupling.lambda_max = d.lambda_max;
    study.coupling.seed0 = d.seed;
    study.coupling.threads = run.threads;
    study.coupling.n_paths = count_at_least(s, "n_paths", 1000, 1);
    study.coupling.allow_unstable = s.get_bool("allow_unstable", false);
    study.coupling.max_rejection_rate = nonnegative(s, "max_rejection_rate", 0.01);
    require(study.coupling.max_rejection_rate < 1.0, s, "max_rejection_rate", "must be < 1");

    if (study.coupling.n_paths == 1)
        log << "warning: n_paths = 1, standard errors are reported as " << kMissing << '\n';
    const ConvergenceStudy result = convergence_study(model, phi, study);

    auto os = open_output(run.out, "convergence.csv");
    write_common_meta(os, "converge", cfg);
    csv::write_meta(os, "model", model.name);
    csv::write_meta(os, "kernel", phi.describe());
    csv::write_meta(os, "seed0", std::to_string(d.seed));
    csv::write_meta(os, "method", to_string(study.method));
    csv::write_meta(os, "beta", csv::number(study.beta_base));
    csv::write_meta(os, "dt", csv::number(d.dt));
    csv::write_meta(os, "lambda_max", csv::number(d.lambda_max));
    write_convergence_csv(os, result);
    auto samples = open_output(run.out, "convergence_samples.csv");
    write_common_meta(samples, "converge", cfg);
    csv::write_meta(samples, "seed0", std::to_string(d.seed));
    write_samples_csv(samples, result);
    for (const auto& row : result.rows)
        log << "n=" << row.n << " l1_dist=" << csv::number(row.l1_dist) << " err_X=" << csv::number(row.err_X)
            << " err_lambda=" << csv::number(row.err_lambda) << " rejected=" << row.rejected << '\n';
    return exit_codes::ok;
}

int cmd_portfolio(const Config& cfg, const Overrides& ov, std::ostream& log) {
    reject_unknown(cfg);
    const RunSettings run = run_of(cfg, ov);
    const auto& m = cfg.section("market");
    MarketSpec mkt;
    mkt.mu = finite(m, "mu", mkt.mu);
    mkt.r = finite(m, "r", mkt.r);
    mkt.sigma = positive(m, "sigma", mkt.sigma);
    mkt.gamma_jump = finite(m, "gamma", mkt.gamma_jump);
    require(mkt.gamma_jump > -1.0, m, "gamma", "must be > -1");
    mkt.rho = positive(m, "rho", mkt.rho);
    mkt.x0_wealth = positive(m, "x0", mkt.x0_wealth);
    mkt.lambda0 = nonnegative(m, "lambda0", mkt.lambda0);
    const Kernel target = kernel_from_config(cfg.section("kernel"), cfg.base_dir());

    const auto& s = cfg.section("portfolio");
    StudyOptions study;
    const bool fit_kernels = s.has("n_list");
    if (fit_kernels) {
        read_fit_options(s, study, "fit_horizon");
    } else if (!target.is_exp_sum()) {
        throw ConfigError(cfg.origin() + " [portfolio]: n_list is required when [kernel] is not an exponential sum");
    }
    ValueOptions vo;
    vo.horizon_trunc = positive(s, "horizon_trunc", vo.horizon_trunc);
    vo.dt = positive(s, "dt", vo.dt);
    vo.lambda_max = positive(s, "lambda_max", vo.lambda_max);
    vo.n_paths = count_at_least(s, "n_paths", vo.n_paths, 1);
    vo.seed0 = s.get_uint("seed", 0);
    if (ov.seed) vo.seed0 = *ov.seed;
    vo.tail_tolerance = positive(s, "tail_tolerance", vo.tail_tolerance);
    vo.threads = run.threads;
    const bool policies = s.get_bool("policies", true);
    const double sub_fraction = nonnegative(s, "suboptimal_fraction", 0.3);
    require(sub_fraction <= 1.0, s, "suboptimal_fraction", "must lie in [0, 1]");
    mkt.kernel = target;
    try {
        validate(mkt);
    } catch (const DomainError& e) {
        throw ConfigError(cfg.origin() + " [market]: " + e.what());
    }

    std::vector<std::pair<std::size_t, Kernel>> ladder;
    std::vector<double> distances;
    if (fit_kernels) {
        for (const auto& f : fit_ladder(target, study)) {
            ladder.emplace_back(f.n, f.kernel());
            distances.push_back(kernel_distance(target, ladder.back().second).l1);
        }
    } else {
        ladder.emplace_back(target.as_exp_sum().size(), target);
        distances.push_back(0.0);
    }

    const PsiHat at_lambda0 = psi_hat(mkt.lambda0, mkt);
    auto os = open_output(run.out, "portfolio.csv");
    write_common_meta(os, "portfolio", cfg);
    csv::write_meta(os, "kernel", target.describe());
    csv::write_meta(os, "seed0", std::to_string(vo.seed0));
    csv::write_meta(os, "horizon_trunc", csv::number(vo.horizon_trunc));
    csv::write_meta(os, "dt", csv::number(vo.dt));
    csv::write_meta(os, "n_paths", std::to_string(vo.n_paths));
    csv::write_row(os, {"n", "V0n", "se", "tail_bound", "omega_star_at_lambda0", "l1_dist", "gap", "cauchy"});
    std::vector<ValueEstimate> values;
    double prev_gap = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        MarketSpec mk = mkt;
        mk.kernel = ladder[i].second;
        values.push_back(value_closed_form(mk, vo));
        const ValueEstimate& v = values.back();
        std::string gap = kMissing;
        std::string cauchy = kMissing;
        if (i > 0) {
            const double g = std::abs(v.value - values[i - 1].value);
            gap = csv::number(g);
            if (i > 1) cauchy = verdict_word(g < prev_gap);
            prev_gap = g;
        }
        csv::write_row(os, {std::to_string(ladder[i].first), csv::number(v.value),
                            vo.n_paths > 1 ? csv::number(v.se) : kMissing, csv::number(v.tail_bound),
                            csv::number(at_lambda0.omega), csv::number(distances[i]), gap, cauchy});
        log << "n=" << ladder[i].first << " V0n=" << csv::number(v.value) << " se=" << csv::number(v.se) << '\n';
    }
    if (!policies) return exit_codes::ok;

    MarketSpec mk = mkt;
    mk.kernel = ladder.back().second;
    const ValueEstimate& cf = values.back();
    auto pos = open_output(run.out, "portfolio_policies.csv");
    write_common_meta(pos, "portfolio", cfg);
    csv::write_meta(pos, "kernel", mk.kernel.describe());
    csv::write_meta(pos, "seed0", std::to_string(vo.seed0));
    csv::write_row(pos, {"policy", "value", "se", "tail_bound", "check", "reference", "reference_se", "status"});
    auto se_text = [&](double se) { return vo.n_paths > 1 ? csv::number(se) : std::string(kMissing); };
    auto combined = [](double a, double b) { return std::isfinite(a) && std::isfinite(b) ? std::hypot(a, b) : 0.0; };

    const ValueEstimate opt = policy_simulation_value(mk, optimal_policy(mk), vo);
    const bool agree = std::abs(opt.value - cf.value) <= 3.0 * combined(opt.se, cf.se) + opt.tail_bound + cf.tail_bound;
    csv::write_row(pos, {"optimal", csv::number(opt.value), se_text(opt.se), csv::number(opt.tail_bound),
                         "matches_closed_form", csv::number(cf.value), se_text(cf.se), verdict_word(agree)});
    log << "optimal policy " << csv::number(opt.value) << " vs closed form " << csv::number(cf.value) << ": "
        << verdict_word(agree) << '\n';

    if (mkt.gamma_jump == 0.0) {
        const double w = std::clamp((mkt.mu - mkt.r) / (mkt.sigma * mkt.sigma), 0.0, 1.0);
        const double gain = (mkt.mu - mkt.r) * w - 0.5 * mkt.sigma * mkt.sigma * w * w;
        const double merton = (std::log(mkt.x0_wealth) + std::log(mkt.rho)) / mkt.rho + (mkt.r - mkt.rho + gain) / (mkt.rho * mkt.rho);
        const bool ok = std::abs(cf.value - merton) <= 3.0 * combined(cf.se, 0.0) + cf.tail_bound + 1e-9 * std::abs(merton);
        csv::write_row(pos, {"closed_form", csv::number(cf.value), se_text(cf.se), csv::number(cf.tail_bound),
                             "matches_merton", csv::number(merton), "0", verdict_word(ok)});
    }

    const std::vector<Policy> others = {
        constant_policy(mkt.rho, sub_fraction),
        consumption_policy(mk, 0.5 * mkt.rho),
        consumption_policy(mk, 2.0 * mkt.rho),
    };
    const std::vector<std::string> labels = {"constant_fraction_" + csv::number(sub_fraction), "consumption_half_rho",
                                             "consumption_double_rho"};
    for (std::size_t i = 0; i < others.size(); ++i) {
        const ValueEstimate v = policy_simulation_value(mk, others[i], vo);
        const bool dominated = v.value <= opt.value + 3.0 * combined(v.se, opt.se) + v.tail_bound + opt.tail_bound;
        csv::write_row(pos, {labels[i], csv::number(v.value), se_text(v.se), csv::number(v.tail_bound),
                             "dominated_by_optimal", csv::number(opt.value), se_text(opt.se), verdict_word(dominated)});
        log << labels[i] << ' ' << csv::number(v.value) << ": " << verdict_word(dominated) << '\n';
    }
    return exit_codes::ok;
}

}  // namespace hawkes
