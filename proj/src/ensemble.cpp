#include "rapport/learn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "rapport/common.hpp"
#include "rapport/eval/ap.hpp"
#include "rapport/learn/platt.hpp"

namespace rapport::learn {

using nlohmann::json;

double scaled_gamma(const Matrix& standardized) {
    if (standardized.cols == 0) throw EmptyMatrix("scaled_gamma: no features");
    double var_sum = 0.0;
    for (std::size_t c = 0; c < standardized.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < standardized.rows; ++r) mean += standardized.at(r, c);
        mean /= static_cast<double>(standardized.rows);
        double m2 = 0.0;
        for (std::size_t r = 0; r < standardized.rows; ++r) {
            double d = standardized.at(r, c) - mean;
            m2 += d * d;
        }
        var_sum += m2 / static_cast<double>(standardized.rows);
    }
    double pooled = var_sum / static_cast<double>(standardized.cols);
    double denom = static_cast<double>(standardized.cols) * pooled;
    if (denom <= 1e-12) return 1.0 / static_cast<double>(standardized.cols);
    return 1.0 / denom;
}

namespace {

void class_weights(const std::vector<int>& y, bool enabled, double& w_pos, double& w_neg) {
    w_pos = 1.0;
    w_neg = 1.0;
    if (!enabled) return;
    double pos = 0.0, neg = 0.0;
    for (int v : y) (v > 0 ? pos : neg) += 1.0;
    if (pos == 0.0 || neg == 0.0) return;
    double n = pos + neg;
    w_pos = n / (2.0 * pos);
    w_neg = n / (2.0 * neg);
}

// Trains one calibrated member on a precomputed kernel matrix.
SvmModel train_member(const Matrix& kernel, const std::vector<int>& y, double cost, double gamma,
                      const EnsembleConfig& config, std::uint64_t seed) {
    SmoParams p;
    p.cost = cost;
    p.gamma = gamma;
    p.tol = config.smo_tol;
    p.seed = seed;
    class_weights(y, config.class_weight, p.weight_pos, p.weight_neg);
    SvmModel model = smo_train_kernel(kernel, y, p);

    // calibration on the training-fold decision values
    std::vector<double> decisions(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double f = model.bias;
        for (std::size_t j = 0; j < y.size(); ++j) f += model.coef[j] * kernel.at(i, j);
        decisions[i] = f;
    }
    auto [a, b] = platt_fit(decisions, y);
    model.calibration_a = a;
    model.calibration_b = b;
    return model;
}

Matrix select_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), x.cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(x.row(rows[r]), x.row(rows[r]) + x.cols, out.row(r));
    return out;
}

}  // namespace

double tune_cost(const Matrix& x_missing, const std::vector<int>& y,
                 const std::vector<std::string>& groups, const std::vector<double>& grid,
                 const EnsembleConfig& config, std::vector<double>* inner_ap_out) {
    if (grid.empty()) throw InvalidConfig("tune_cost: empty grid");
    if (grid.size() == 1) {
        if (inner_ap_out) inner_ap_out->assign(1, kMissing);
        return grid[0];
    }

    // group list in first-appearance order
    std::vector<std::string> group_ids;
    for (const std::string& g : groups)
        if (std::find(group_ids.begin(), group_ids.end(), g) == group_ids.end())
            group_ids.push_back(g);
    if (group_ids.size() < 2) throw TooFewSessions("tune_cost: need >= 2 groups");

    // inner folds usable iff the inner training part keeps both classes
    struct InnerFold {
        std::vector<std::size_t> train_rows;
        std::vector<std::size_t> test_rows;
    };
    std::vector<InnerFold> folds;
    for (const std::string& held : group_ids) {
        InnerFold fold;
        bool pos = false, neg = false;
        for (std::size_t r = 0; r < groups.size(); ++r) {
            if (groups[r] == held) {
                fold.test_rows.push_back(r);
            } else {
                fold.train_rows.push_back(r);
                (y[r] > 0 ? pos : neg) = true;
            }
        }
        if (pos && neg && !fold.test_rows.empty()) folds.push_back(std::move(fold));
    }
    if (folds.empty()) throw SingleClass("tune_cost: every inner fold is degenerate");

    // pooled inner predictions per grid value; fold-major work order with
    // per-(fold, cost, member) seeds keeps results job-count independent
    std::vector<std::vector<double>> scores(grid.size());
    std::vector<int> pooled_labels;
    for (const InnerFold& fold : folds)
        for (std::size_t r : fold.test_rows) pooled_labels.push_back(y[r]);
    for (auto& s : scores) s.assign(pooled_labels.size(), 0.0);

    std::vector<std::size_t> offsets(folds.size() + 1, 0);
    for (std::size_t f = 0; f < folds.size(); ++f)
        offsets[f + 1] = offsets[f] + folds[f].test_rows.size();

    parallel_for(folds.size(), config.jobs, [&](std::size_t f) {
        const InnerFold& fold = folds[f];
        Matrix x_train = select_rows(x_missing, fold.train_rows);
        std::vector<int> y_train;
        y_train.reserve(fold.train_rows.size());
        for (std::size_t r : fold.train_rows) y_train.push_back(y[r]);

        Standardizer stats = fit_standardizer(x_train);
        Matrix z_train = apply_standardizer(stats, x_train);
        double gamma = config.gamma_policy == GammaPolicy::Scaled ? scaled_gamma(z_train)
                                                                  : config.gamma_value;
        Matrix kernel = rbf_kernel_matrix(z_train, gamma);

        std::vector<std::vector<double>> z_test;
        for (std::size_t r : fold.test_rows) {
            std::vector<double> row(x_missing.cols);
            apply_standardizer_row(stats, x_missing.row(r), row.data());
            z_test.push_back(std::move(row));
        }

        for (std::size_t c = 0; c < grid.size(); ++c) {
            int members = std::max(1, config.tune_members);
            std::vector<double> prob(fold.test_rows.size(), 0.0);
            for (int m = 0; m < members; ++m) {
                std::uint64_t seed =
                    derive_seed(config.seed, 0x74756e65ULL,
                                derive_seed(static_cast<std::uint64_t>(f),
                                            static_cast<std::uint64_t>(c),
                                            static_cast<std::uint64_t>(m)));
                SvmModel model = train_member(kernel, y_train, grid[c], gamma, config, seed);
                for (std::size_t t = 0; t < fold.test_rows.size(); ++t)
                    prob[t] += model.probability(z_train, z_test[t].data());
            }
            for (std::size_t t = 0; t < fold.test_rows.size(); ++t)
                scores[c][offsets[f] + t] = prob[t] / static_cast<double>(members);
        }
    });

    double best_cost = grid[0];
    double best_ap = -1.0;
    std::vector<double> aps(grid.size(), 0.0);
    for (std::size_t c = 0; c < grid.size(); ++c) {
        aps[c] = eval::average_precision(scores[c], pooled_labels);
        // strict improvement keeps ties at the smaller cost seen first
        bool better = aps[c] > best_ap || (aps[c] == best_ap && grid[c] < best_cost);
        if (better) {
            best_ap = aps[c];
            best_cost = grid[c];
        }
    }
    if (inner_ap_out) *inner_ap_out = aps;
    return best_cost;
}

TrainedEnsemble train_ensemble(const Matrix& x_missing, const std::vector<int>& y,
                               const std::vector<std::string>& groups,
                               const EnsembleConfig& config) {
    if (config.members < 1) throw InvalidConfig("train_ensemble: members must be >= 1");
    if (x_missing.rows != y.size()) throw EmptyMatrix("train_ensemble: rows != labels");

    TrainedEnsemble e;
    e.seed = config.seed;
    e.standardizer = fit_standardizer(x_missing);
    e.train = apply_standardizer(e.standardizer, x_missing);
    e.gamma = config.gamma_policy == GammaPolicy::Scaled ? scaled_gamma(e.train)
                                                         : config.gamma_value;
    e.cost = config.cost_grid.size() == 1
                 ? config.cost_grid[0]
                 : tune_cost(x_missing, y, groups, config.cost_grid, config);

    Matrix kernel = rbf_kernel_matrix(e.train, e.gamma);
    e.members.resize(static_cast<std::size_t>(config.members));
    parallel_for(e.members.size(), config.jobs, [&](std::size_t i) {
        std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
        e.members[i] = train_member(kernel, y, e.cost, e.gamma, config, seed);
    });
    return e;
}

double ensemble_prob(const TrainedEnsemble& e, const double* raw_row) {
    std::vector<double> z(e.standardizer.mean.size());
    apply_standardizer_row(e.standardizer, raw_row, z.data());
    double sum = 0.0;
    for (const SvmModel& m : e.members) sum += m.probability(e.train, z.data());
    return sum / static_cast<double>(e.members.size());
}

std::string ensemble_to_json(const TrainedEnsemble& e) {
    json j;
    j["seed"] = e.seed;
    j["gamma"] = e.gamma;
    j["cost"] = e.cost;
    j["standardizer"] = {{"mean", e.standardizer.mean},
                         {"stddev", e.standardizer.stddev},
                         {"imputation", e.standardizer.imputation}};
    j["train"] = {{"rows", e.train.rows}, {"cols", e.train.cols}, {"data", e.train.data}};
    json members = json::array();
    for (const SvmModel& m : e.members)
        members.push_back({{"coef", m.coef},
                           {"bias", m.bias},
                           {"calibration_a", m.calibration_a},
                           {"calibration_b", m.calibration_b}});
    j["members"] = std::move(members);
    return j.dump(2);
}

TrainedEnsemble ensemble_from_json(const std::string& text) {
    json j = json::parse(text);
    TrainedEnsemble e;
    e.seed = j.at("seed").get<std::uint64_t>();
    e.gamma = j.at("gamma").get<double>();
    e.cost = j.at("cost").get<double>();
    e.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    e.standardizer.stddev = j.at("standardizer").at("stddev").get<std::vector<double>>();
    e.standardizer.imputation = j.at("standardizer").at("imputation").get<std::vector<double>>();
    e.train.rows = j.at("train").at("rows").get<std::size_t>();
    e.train.cols = j.at("train").at("cols").get<std::size_t>();
    e.train.data = j.at("train").at("data").get<std::vector<double>>();
    for (const auto& jm : j.at("members")) {
        SvmModel m;
        m.coef = jm.at("coef").get<std::vector<double>>();
        m.bias = jm.at("bias").get<double>();
        m.calibration_a = jm.at("calibration_a").get<double>();
        m.calibration_b = jm.at("calibration_b").get<double>();
        m.gamma = e.gamma;
        m.cost = e.cost;
        e.members.push_back(std::move(m));
    }
    return e;
}

}  // namespace rapport::learn
