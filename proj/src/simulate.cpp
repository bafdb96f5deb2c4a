#include "hawkes/simulate.hpp"

#include "engine.hpp"
#include "hawkes/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hawkes {

namespace {

class VolterraMemory {
public:
    static constexpr bool kLifted = false;

    explicit VolterraMemory(const Kernel& kernel) : kernel_(kernel) {}

    void advance(double) {}

    double excitation(double t, std::size_t& terms) const {
        double total = 0.0;
        for (const auto& [s, weight] : history_) total += kernel_(t - s) * weight;
        terms += history_.size();
        return total;
    }

    void add(double t, double weight) { history_.emplace_back(t, weight); }

    [[nodiscard]] std::vector<double> state() const { return {}; }
    [[nodiscard]] std::span<const double> state_view() const { return {}; }

private:
    const Kernel& kernel_;
    std::vector<std::pair<double, double>> history_;
};

}  // namespace

PathRecord simulate_volterra(const ModelSpec& model, const Kernel& kernel, const NoiseDriver& driver,
                             const SimulationOptions& opts) {
    VolterraMemory memory(kernel);
    detail::EngineStart start;
    start.x = model.x0;
    return detail::run_engine(model, driver, memory, start, opts);
}

MomentAccumulator::MomentAccumulator(double p) : p_(p) {
    if (!(p >= 1.0)) throw DomainError("moment order p must be >= 1");
}

void MomentAccumulator::add(const PathRecord& path) {
    if (count_ == 0) {
        lambda_sum_.assign(path.lambda.size(), 0.0);
        lambda_sum_sq_.assign(path.lambda.size(), 0.0);
        lambda2_sum_.assign(path.lambda.size(), 0.0);
        lambda2_sum_sq_.assign(path.lambda.size(), 0.0);
    } else if (path.lambda.size() != lambda_sum_.size()) {
        throw DomainError("estimate_moments: paths do not share a grid");
    }
    double sup = 0.0;
    for (double v : path.x) sup = std::max(sup, std::abs(v));
    for (double v : path.node_x) sup = std::max(sup, std::abs(v));
    const double sup_p = std::pow(sup, p_);
    sup_sum_ += sup_p;
    sup_sum_sq_ += sup_p * sup_p;
    for (std::size_t i = 0; i < path.lambda.size(); ++i) {
        const double l = path.lambda[i];
        lambda_sum_[i] += l;
        lambda_sum_sq_[i] += l * l;
        lambda2_sum_[i] += l * l;
        lambda2_sum_sq_[i] += l * l * l * l;
    }
    ++count_;
}

namespace {

double standard_error(double sum, double sum_sq, std::size_t n) {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(sum_sq / nn - mean * mean, 0.0) * nn / (nn - 1.0);
    return std::sqrt(var / nn);
}

}  // namespace

std::vector<double> MomentAccumulator::mean_lambda() const {
    std::vector<double> out(lambda_sum_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda_sum_[i] / static_cast<double>(count_);
    return out;
}

std::vector<double> MomentAccumulator::mean_lambda_se() const {
    std::vector<double> out(lambda_sum_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = standard_error(lambda_sum_[i], lambda_sum_sq_[i], count_);
    return out;
}

MomentSummary MomentAccumulator::summary() const {
    if (count_ == 0) throw DomainError("estimate_moments: empty path collection");
    const double n = static_cast<double>(count_);
    MomentSummary s;
    s.p = p_;
    s.n_paths = count_;
    s.sup_abs_x_p = sup_sum_ / n;
    s.sup_abs_x_p_se = standard_error(sup_sum_, sup_sum_sq_, count_);
    std::size_t arg1 = 0;
    std::size_t arg2 = 0;
    for (std::size_t i = 0; i < lambda_sum_.size(); ++i) {
        if (lambda_sum_[i] > lambda_sum_[arg1]) arg1 = i;
        if (lambda2_sum_[i] > lambda2_sum_[arg2]) arg2 = i;
    }
    if (!lambda_sum_.empty()) {
        s.sup_mean_lambda = lambda_sum_[arg1] / n;
        s.sup_mean_lambda_se = standard_error(lambda_sum_[arg1], lambda_sum_sq_[arg1], count_);
        s.sup_mean_lambda_sq = lambda2_sum_[arg2] / n;
        s.sup_mean_lambda_sq_se = standard_error(lambda2_sum_[arg2], lambda2_sum_sq_[arg2], count_);
    }
    return s;
}

MomentSummary estimate_moments(std::span<const PathRecord> paths, double p) {
    if (paths.empty()) throw DomainError("estimate_moments: empty path collection");
    MomentAccumulator acc(p);
    for (const auto& path : paths) acc.add(path);
    auto s = acc.summary();
    if (!paths.front().times.empty()) {
        const auto mean = acc.mean_lambda();
        const auto it = std::max_element(mean.begin(), mean.end());
        s.sup_mean_lambda_time = paths.front().times[static_cast<std::size_t>(it - mean.begin())];
    }
    return s;
}

void write_path_csv(std::ostream& os, const PathRecord& path) {
    const std::size_t n_xi = path.xi.empty() ? 0 : path.xi.front().size();
    std::vector<std::string> header{"t", "x", "lambda"};
    for (std::size_t k = 0; k < n_xi; ++k) header.push_back("xi_" + std::to_string(k + 1));
    csv::write_row(os, header);
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        std::vector<std::string> row{csv::number(path.times[i]), csv::number(path.x[i]), csv::number(path.lambda[i])};
        for (std::size_t k = 0; k < n_xi; ++k) row.push_back(csv::number(path.xi[i][k]));
        csv::write_row(os, row);
    }
}

void write_jumps_csv(std::ostream& os, const PathRecord& path) {
    csv::write_row(os, {"t", "y", "dx"});
    for (const auto& j : path.jumps) csv::write_row(os, {csv::number(j.t), csv::number(j.y), csv::number(j.dx)});
}

}  // namespace hawkes
