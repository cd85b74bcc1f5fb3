#include "rapport/learn/platt.hpp"

#include <cmath>

#include "rapport/common.hpp"

namespace rapport::learn {

namespace {

double objective(const std::vector<double>& f, const std::vector<double>& t, double a, double b) {
    double val = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double z = a * f[i] + b;
        if (z >= 0.0)
            val += t[i] * z + std::log1p(std::exp(-z));
        else
            val += (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return val;
}

}  // namespace

std::pair<double, double> platt_fit(const std::vector<double>& decision_values,
                                    const std::vector<int>& labels) {
    std::size_t n = decision_values.size();
    std::size_t num_pos = 0, num_neg = 0;
    for (int y : labels) (y > 0 ? num_pos : num_neg) += 1;
    if (num_pos == 0 || num_neg == 0) throw SingleClass("platt_fit: single-class labels");

    double hi_target = (static_cast<double>(num_pos) + 1.0) / (static_cast<double>(num_pos) + 2.0);
    double lo_target = 1.0 / (static_cast<double>(num_neg) + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi_target : lo_target;

    const double grad_eps = 1e-8;
    const double min_step = 1e-12;
    const double hessian_floor = 1e-12;

    double a = 0.0;
    double b = std::log((static_cast<double>(num_neg) + 1.0) / (static_cast<double>(num_pos) + 1.0));
    double fval = objective(decision_values, t, a, b);

    for (int iter = 0; iter < 200; ++iter) {
        double h11 = hessian_floor, h22 = hessian_floor, h21 = 0.0;
        double g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = a * decision_values[i] + b;
            double p, q;
            if (z >= 0.0) {
                double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            double d2 = p * q;
            h11 += decision_values[i] * decision_values[i] * d2;
            h22 += d2;
            h21 += decision_values[i] * d2;
            double d1 = t[i] - p;
            g1 += decision_values[i] * d1;
            g2 += d1;
        }
        if (std::sqrt(g1 * g1 + g2 * g2) <= grad_eps) break;

        double det = h11 * h22 - h21 * h21;
        double da = -(h22 * g1 - h21 * g2) / det;
        double db = -(-h21 * g1 + h11 * g2) / det;
        double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= min_step) {
            double na = a + step * da;
            double nb = b + step * db;
            double nf = objective(decision_values, t, na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step *= 0.5;
        }
        if (step < min_step) break;  // no descent possible
    }
    return {a, b};
}

double platt_prob(double a, double b, double decision_value) {
    double z = a * decision_value + b;
    if (z >= 0.0) {
        double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

}  // namespace rapport::learn
