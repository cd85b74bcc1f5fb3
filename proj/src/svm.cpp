#include "rapport/learn/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rapport/common.hpp"

namespace rapport::learn {

Standardizer fit_standardizer(const Matrix& x) {
    if (x.rows == 0 || x.cols == 0) throw EmptyMatrix("fit_standardizer: empty matrix");

    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.stddev.assign(x.cols, 0.0);
    s.imputation.assign(x.cols, 0.0);

    for (std::size_t c = 0; c < x.cols; ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < x.rows; ++r) {
            double v = x.at(r, c);
            if (is_missing(v)) continue;
            sum += v;
            ++n;
        }
        double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
        s.mean[c] = mean;
        s.imputation[c] = mean;
        // population variance of the imputed column; imputed cells sit at the
        // mean and contribute zero deviation
        double m2 = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) {
            double v = x.at(r, c);
            if (is_missing(v)) continue;
            double d = v - mean;
            m2 += d * d;
        }
        s.stddev[c] = std::sqrt(m2 / static_cast<double>(x.rows));
    }
    return s;
}

void apply_standardizer_row(const Standardizer& s, const double* in, double* out) {
    for (std::size_t c = 0; c < s.mean.size(); ++c) {
        double v = is_missing(in[c]) ? s.imputation[c] : in[c];
        out[c] = s.stddev[c] > 0.0 ? (v - s.mean[c]) / s.stddev[c] : 0.0;
    }
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
    if (x.cols != s.mean.size()) throw EmptyMatrix("apply_standardizer: column mismatch");
    Matrix out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) apply_standardizer_row(s, x.row(r), out.row(r));
    return out;
}

Matrix rbf_kernel_matrix(const Matrix& x, double gamma) {
    Matrix k(x.rows, x.rows);
    std::vector<double> sq(x.rows, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* row = x.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) acc += row[c] * row[c];
        sq[r] = acc;
    }
    for (std::size_t i = 0; i < x.rows; ++i) {
        k.at(i, i) = 1.0;
        const double* xi = x.row(i);
        for (std::size_t j = i + 1; j < x.rows; ++j) {
            const double* xj = x.row(j);
            double dot = 0.0;
            for (std::size_t c = 0; c < x.cols; ++c) dot += xi[c] * xj[c];
            double d2 = std::max(0.0, sq[i] + sq[j] - 2.0 * dot);
            double v = std::exp(-gamma * d2);
            k.at(i, j) = v;
            k.at(j, i) = v;
        }
    }
    return k;
}

double SvmModel::decision(const Matrix& train, const double* x) const {
    double f = bias;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        if (coef[i] == 0.0) continue;
        const double* xi = train.row(i);
        double d2 = 0.0;
        for (std::size_t c = 0; c < train.cols; ++c) {
            double d = xi[c] - x[c];
            d2 += d * d;
        }
        f += coef[i] * std::exp(-gamma * d2);
    }
    return f;
}

namespace {

double sigmoid_prob(double a, double b, double f) {
    double z = a * f + b;
    // p = 1 / (1 + exp(z)), evaluated without overflow
    if (z >= 0.0) {
        double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

double SvmModel::probability(const Matrix& train, const double* x) const {
    return sigmoid_prob(calibration_a, calibration_b, decision(train, x));
}

// ---------------------------------------------------------------------------
// Sequential minimal optimization (Platt's algorithm with an error cache,
// maximal |E1-E2| second-choice heuristic and seeded examination order).

namespace {

class SmoSolver {
public:
    SmoSolver(const Matrix& kernel, const std::vector<int>& y, const SmoParams& p)
        : k_(kernel), y_(y), p_(p), n_(y.size()), rng_(derive_seed(p.seed, 0x534d4fULL)) {
        alpha_.assign(n_, 0.0);
        error_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) error_[i] = -static_cast<double>(y_[i]);
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    }

    void solve() {
        std::size_t num_changed = 0;
        bool examine_all = true;
        while (num_changed > 0 || examine_all) {
            num_changed = 0;
            rng_.shuffle(order_);
            for (std::size_t idx : order_) {
                if (steps_ >= p_.max_steps) return;
                if (!examine_all && !is_free(idx)) continue;
                num_changed += examine(idx) ? 1 : 0;
            }
            if (examine_all)
                examine_all = false;
            else if (num_changed == 0)
                examine_all = true;
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return bias_; }

private:
    double cost_of(std::size_t i) const {
        return p_.cost * (y_[i] > 0 ? p_.weight_pos : p_.weight_neg);
    }
    bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < cost_of(i); }

    bool examine(std::size_t i2) {
        double y2 = y_[i2];
        double e2 = error_[i2];
        double r2 = e2 * y2;
        bool violates = (r2 < -p_.tol && alpha_[i2] < cost_of(i2)) || (r2 > p_.tol && alpha_[i2] > 0.0);
        if (!violates) return false;

        // 1) partner maximizing |E1 - E2| among free alphas
        std::size_t best = n_;
        double best_gap = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!is_free(i)) continue;
            double gap = std::fabs(error_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return true;

        // 2) remaining free alphas from a random start
        std::size_t start = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t off = 0; off < n_; ++off) {
            std::size_t i1 = (start + off) % n_;
            if (is_free(i1) && take_step(i1, i2)) return true;
        }
        // 3) everything else
        start = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t off = 0; off < n_; ++off) {
            std::size_t i1 = (start + off) % n_;
            if (take_step(i1, i2)) return true;
        }
        return false;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        ++steps_;

        double a1 = alpha_[i1], a2 = alpha_[i2];
        double y1 = y_[i1], y2 = y_[i2];
        double e1 = error_[i1], e2 = error_[i2];
        double s = y1 * y2;
        double c1 = cost_of(i1), c2 = cost_of(i2);

        double lo, hi;
        if (s > 0.0) {
            lo = std::max(0.0, a1 + a2 - c1);
            hi = std::min(c2, a1 + a2);
        } else {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c2, c1 + a2 - a1);
        }
        if (lo >= hi) return false;

        double k11 = k_.at(i1, i1), k12 = k_.at(i1, i2), k22 = k_.at(i2, i2);
        double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // flat direction: evaluate the objective at both clip ends
            double g1 = e1 + y1 - bias_;  // sum_j alpha_j y_j K_1j
            double g2 = e2 + y2 - bias_;
            double f1 = y1 * g1 - 1.0 - a1 * k11 - s * a2 * k12;
            double f2 = y2 * g2 - 1.0 - s * a1 * k12 - a2 * k22;
            double l1 = a1 + s * (a2 - lo);
            double h1 = a1 + s * (a2 - hi);
            double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
            double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
            if (obj_lo < obj_hi - p_.eps)
                a2_new = lo;
            else if (obj_lo > obj_hi + p_.eps)
                a2_new = hi;
            else
                return false;
        }

        if (std::fabs(a2_new - a2) < p_.eps * (a2_new + a2 + p_.eps)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        if (a1_new < 0.0) {
            a2_new += s * a1_new;
            a1_new = 0.0;
        } else if (a1_new > c1) {
            a2_new += s * (a1_new - c1);
            a1_new = c1;
        }

        double d1 = y1 * (a1_new - a1);
        double d2 = y2 * (a2_new - a2);
        double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < c1)
            b_new = b1;
        else if (a2_new > 0.0 && a2_new < c2)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        double db = b_new - bias_;
        const double* row1 = k_.row(i1);
        const double* row2 = k_.row(i2);
        for (std::size_t i = 0; i < n_; ++i) error_[i] += d1 * row1[i] + d2 * row2[i] + db;

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        bias_ = b_new;
        return true;
    }

    const Matrix& k_;
    const std::vector<int>& y_;
    const SmoParams& p_;
    std::size_t n_;
    Rng rng_;
    std::vector<double> alpha_;
    std::vector<double> error_;
    std::vector<std::size_t> order_;
    double bias_ = 0.0;
    std::size_t steps_ = 0;
};

// Recomputed threshold from the final alphas: mean over free vectors, or the
// midpoint of the feasible interval when everything sits at a bound.
double recompute_bias(const Matrix& k, const std::vector<int>& y,
                      const std::vector<double>& alpha, const SmoParams& p) {
    std::size_t n = y.size();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lb = -std::numeric_limits<double>::infinity();
    double ub = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double g = 0.0;
        for (std::size_t j = 0; j < n; ++j) g += alpha[j] * y[j] * k.at(i, j);
        double ci = p.cost * (y[i] > 0 ? p.weight_pos : p.weight_neg);
        double target = static_cast<double>(y[i]) - g;
        if (alpha[i] > 0.0 && alpha[i] < ci) {
            free_sum += target;
            ++free_count;
        } else if ((alpha[i] == 0.0 && y[i] > 0) || (alpha[i] >= ci && y[i] < 0)) {
            lb = std::max(lb, target);  // f_i may exceed the margin
        } else {
            ub = std::min(ub, target);
        }
    }
    if (free_count > 0) return free_sum / static_cast<double>(free_count);
    if (std::isfinite(lb) && std::isfinite(ub)) return 0.5 * (lb + ub);
    if (std::isfinite(lb)) return lb;
    if (std::isfinite(ub)) return ub;
    return 0.0;
}

}  // namespace

SvmModel smo_train_kernel(const Matrix& kernel, const std::vector<int>& y, const SmoParams& p,
                          std::vector<double>* alphas_out) {
    std::size_t n = y.size();
    if (n < 2 || kernel.rows != n || kernel.cols != n)
        throw EmptyMatrix("smo_train: bad problem size");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1) has_pos = true;
        else if (v == -1) has_neg = true;
        else throw NonFinite("smo_train: labels must be +-1");
    }
    if (!has_pos || !has_neg) throw SingleClass("smo_train: single-class training set");
    for (double v : kernel.data)
        if (!std::isfinite(v)) throw NonFinite("smo_train: non-finite kernel entry");

    SmoSolver solver(kernel, y, p);
    solver.solve();

    SvmModel model;
    model.gamma = p.gamma;
    model.cost = p.cost;
    model.coef.resize(n);
    const std::vector<double>& alpha = solver.alphas();
    for (std::size_t i = 0; i < n; ++i) model.coef[i] = alpha[i] * y[i];
    model.bias = recompute_bias(kernel, y, alpha, p);
    if (alphas_out) *alphas_out = alpha;
    return model;
}

SvmModel smo_train(const Matrix& x, const std::vector<int>& y, const SmoParams& p,
                   std::vector<double>* alphas_out) {
    for (double v : x.data)
        if (!std::isfinite(v)) throw NonFinite("smo_train: non-finite feature");
    return smo_train_kernel(rbf_kernel_matrix(x, p.gamma), y, p, alphas_out);
}

double dual_objective(const Matrix& kernel, const std::vector<int>& y,
                      const std::vector<double>& alphas) {
    std::size_t n = y.size();
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        linear += alphas[i];
        for (std::size_t j = 0; j < n; ++j)
            quad += alphas[i] * alphas[j] * y[i] * y[j] * kernel.at(i, j);
    }
    return linear - 0.5 * quad;
}

double kkt_violation(const Matrix& kernel, const std::vector<int>& y,
                     const std::vector<double>& alphas, double bias, double cost) {
    std::size_t n = y.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = bias;
        for (std::size_t j = 0; j < n; ++j) f += alphas[j] * y[j] * kernel.at(i, j);
        double r = y[i] * f - 1.0;
        if (alphas[i] <= 0.0)
            worst = std::max(worst, -r);  // require y f >= 1
        else if (alphas[i] >= cost)
            worst = std::max(worst, r);  // require y f <= 1
        else
            worst = std::max(worst, std::fabs(r));
    }
    return worst;
}

}  // namespace rapport::learn
