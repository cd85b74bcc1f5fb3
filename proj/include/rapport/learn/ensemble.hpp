#ifndef RAPPORT_LEARN_ENSEMBLE_HPP
#define RAPPORT_LEARN_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rapport/learn/svm.hpp"

namespace rapport::learn {

enum class GammaPolicy {
    Scaled,  // 1 / (feature count * mean feature variance after standardization)
    Fixed,
};

struct EnsembleConfig {
    int members = 1000;
    std::uint64_t seed = 0;
    // paper-free defaults: powers of two around C = 1
    std::vector<double> cost_grid = {0.03125, 0.125, 0.5, 2.0, 8.0, 32.0};
    GammaPolicy gamma_policy = GammaPolicy::Scaled;
    double gamma_value = 1.0;  // used by GammaPolicy::Fixed
    int tune_members = 1;      // ensemble size during inner cost tuning
    bool class_weight = false; // inverse-frequency weighting of C
    double smo_tol = 1e-8;
    int jobs = 0;
};

// K models sharing standardization, imputation and the (standardized)
// training points. Member i is trained with seed derive_seed(seed, i); the
// only randomness is the SMO working-set examination order.
struct TrainedEnsemble {
    Standardizer standardizer;
    Matrix train;  // standardized training matrix, shared by all members
    std::vector<SvmModel> members;
    double gamma = 1.0;
    double cost = 1.0;
    std::uint64_t seed = 0;
};

// gamma under the Scaled policy, computed on an already-standardized matrix.
double scaled_gamma(const Matrix& standardized);

// Inner leave-one-group-out cost selection over the training fold only.
// Returns the grid value with the highest pooled inner AP, ties broken
// toward the smaller cost. Degenerate inner folds (single-class inner
// training set) are skipped; at least one usable fold is required.
// inner_ap_out (optional) receives the pooled AP per grid value.
double tune_cost(const Matrix& x_missing, const std::vector<int>& y,
                 const std::vector<std::string>& groups, const std::vector<double>& grid,
                 const EnsembleConfig& config, std::vector<double>* inner_ap_out = nullptr);

// Full training pipeline on one fold: standardize/impute, resolve gamma,
// tune the cost when the grid has more than one value, then train `members`
// calibrated SVMs in parallel (reduction order is fixed, so any job count
// yields bit-identical results).
TrainedEnsemble train_ensemble(const Matrix& x_missing, const std::vector<int>& y,
                               const std::vector<std::string>& groups,
                               const EnsembleConfig& config);

// Mean calibrated probability over members, averaged in member order.
// The input row is raw (possibly missing) and is standardized internally.
double ensemble_prob(const TrainedEnsemble& e, const double* raw_row);

// JSON model bundle (standardization stats, per-member alpha*y and bias,
// gamma, cost, calibration, seed, training points); round-trips exactly.
std::string ensemble_to_json(const TrainedEnsemble& e);
TrainedEnsemble ensemble_from_json(const std::string& text);

}  // namespace rapport::learn

#endif  // RAPPORT_LEARN_ENSEMBLE_HPP
