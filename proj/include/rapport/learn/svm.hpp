#ifndef RAPPORT_LEARN_SVM_HPP
#define RAPPORT_LEARN_SVM_HPP

#include <cstdint>
#include <vector>

namespace rapport::learn {

// Dense row-major numeric matrix; the learner's working representation.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Per-feature z-scoring statistics, fitted on a training fold only. Missing
// cells are imputed with the training mean before scaling; zero-variance
// features map to 0.
struct Standardizer {
    std::vector<double> mean;        // of non-missing entries
    std::vector<double> stddev;      // population, after imputation
    std::vector<double> imputation;  // equals mean; kept explicit for serialization
};

Standardizer fit_standardizer(const Matrix& x_with_missing);
Matrix apply_standardizer(const Standardizer& s, const Matrix& x_with_missing);
void apply_standardizer_row(const Standardizer& s, const double* in, double* out);

// RBF kernel matrix K_ij = exp(-gamma * ||x_i - x_j||^2).
Matrix rbf_kernel_matrix(const Matrix& x, double gamma);

struct SmoParams {
    double cost = 1.0;       // box constraint C
    double gamma = 1.0;      // RBF width
    double tol = 1e-8;       // KKT tolerance; loop stops below it
    double eps = 1e-14;      // minimum alpha progress per step
    std::uint64_t seed = 0;  // shuffles the working-set examination order
    std::size_t max_steps = 20'000'000;
    double weight_pos = 1.0;  // optional class-dependent C multipliers
    double weight_neg = 1.0;
};

// Soft-margin RBF SVM trained with sequential minimal optimization.
// Decision value f(x) = sum_i coef_i k(x_i, x) + bias with coef = alpha*y.
struct SvmModel {
    std::vector<double> coef;  // alpha_i * y_i over training points
    double bias = 0.0;
    double gamma = 1.0;
    double cost = 1.0;
    double calibration_a = 0.0;  // Platt sigmoid p = 1/(1+exp(a*f + b))
    double calibration_b = 0.0;

    // Decision value against an explicit training matrix (rows must match
    // coef). Ensembles share one copy of the training points.
    double decision(const Matrix& train, const double* x) const;
    double probability(const Matrix& train, const double* x) const;
};

// Solves the dual on a precomputed kernel matrix. y entries must be +-1 and
// both classes present (SingleClass otherwise); non-finite inputs raise
// NonFinite. alphas_out (optional) receives the raw alpha values.
SvmModel smo_train_kernel(const Matrix& kernel, const std::vector<int>& y, const SmoParams& p,
                          std::vector<double>* alphas_out = nullptr);

// Convenience: builds the kernel matrix from feature rows first.
SvmModel smo_train(const Matrix& x, const std::vector<int>& y, const SmoParams& p,
                   std::vector<double>* alphas_out = nullptr);

// Dual objective value sum(alpha) - 0.5 * sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const Matrix& kernel, const std::vector<int>& y,
                      const std::vector<double>& alphas);

// Largest KKT violation of the trained solution, for diagnostics and tests.
double kkt_violation(const Matrix& kernel, const std::vector<int>& y,
                     const std::vector<double>& alphas, double bias, double cost);

}  // namespace rapport::learn

#endif  // RAPPORT_LEARN_SVM_HPP
