#include "quenchmap/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace quenchmap {

namespace {

struct SmoState {
    std::vector<double> alpha;
    std::vector<double> grad;  // d/d_alpha of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    std::size_t iterations = 0;
    bool converged = false;
};

// Maximal-violating-pair SMO on a precomputed kernel. `shift` is added to the
// kernel diagonal (0 for the first attempt).
SmoState run_smo(const Matrix& k, std::span<const std::int8_t> y, double c, double tol,
                 std::size_t max_iter, double shift) {
    const std::size_t n = y.size();
    SmoState s;
    s.alpha.assign(n, 0.0);
    s.grad.assign(n, -1.0); // alpha = 0 start
    auto kk = [&](std::size_t i, std::size_t j) {
        return k(i, j) + (i == j ? shift : 0.0);
    };

    for (; s.iterations < max_iter; ++s.iterations) {
        // i: largest -y*grad over I_up, j: smallest over I_low
        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -static_cast<double>(y[t]) * s.grad[t];
            const bool in_up = (y[t] > 0 && s.alpha[t] < c) || (y[t] < 0 && s.alpha[t] > 0);
            const bool in_low = (y[t] < 0 && s.alpha[t] < c) || (y[t] > 0 && s.alpha[t] > 0);
            if (in_up && v > up_best) {
                up_best = v;
                i = t;
            }
            if (in_low && v < low_best) {
                low_best = v;
                j = t;
            }
        }
        if (i == n || j == n || up_best - low_best <= tol) {
            s.converged = true; // empty working set = no violating pair left
            break;
        }

        // curvature along the feasible direction d = e_i - y_i*y_j e_j; the
        // label signs cancel against Q = yy' o K, leaving the plain kernel form
        const double yiyj = static_cast<double>(y[i]) * static_cast<double>(y[j]);
        double quad = kk(i, i) + kk(j, j) - 2.0 * kk(i, j);
        if (quad <= 0.0) quad = 1e-12; // non-PSD direction; take a tiny stabilized step

        // delta along alpha_i, with alpha_j moving to keep sum(alpha*y) = 0
        double delta = (up_best - low_best) * static_cast<double>(y[i]) / quad;
        double lo = -s.alpha[i], hi = c - s.alpha[i];
        if (yiyj > 0) {
            lo = std::max(lo, s.alpha[j] - c);
            hi = std::min(hi, s.alpha[j]);
        } else {
            lo = std::max(lo, -s.alpha[j]);
            hi = std::min(hi, c - s.alpha[j]);
        }
        delta = std::clamp(delta, lo, hi);
        if (delta == 0.0) {
            s.converged = true; // boxed in; the pair cannot move
            break;
        }

        s.alpha[i] += delta;
        s.alpha[j] -= yiyj * delta;
        const double di = delta;
        const double dj = -yiyj * delta;
        for (std::size_t t = 0; t < n; ++t)
            s.grad[t] += static_cast<double>(y[t]) *
                         (static_cast<double>(y[i]) * kk(t, i) * di +
                          static_cast<double>(y[j]) * kk(t, j) * dj);
    }
    return s;
}

double bias_from(const SmoState& s, std::span<const std::int8_t> y, double c) {
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double v = -static_cast<double>(y[t]) * s.grad[t];
        if (s.alpha[t] > 0.0 && s.alpha[t] < c) {
            free_sum += v;
            ++free_count;
        }
        const bool in_up = (y[t] > 0 && s.alpha[t] < c) || (y[t] < 0 && s.alpha[t] > 0);
        const bool in_low = (y[t] < 0 && s.alpha[t] < c) || (y[t] > 0 && s.alpha[t] > 0);
        if (in_up) up_best = std::max(up_best, v);
        if (in_low) low_best = std::min(low_best, v);
    }
    if (free_count) return free_sum / static_cast<double>(free_count);
    return (up_best + low_best) / 2.0;
}

struct Certificate {
    double dual = 0.0; // maximized dual value: sum(alpha) - 1/2 a'Qa
    double gap = 0.0;  // primal minus dual, >= 0 up to round-off
};

Certificate certify(const Matrix& k, std::span<const std::int8_t> y, const SmoState& s, double c,
                    double bias, double shift) {
    double sum_alpha = 0.0, alpha_grad = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        sum_alpha += s.alpha[t];
        alpha_grad += s.alpha[t] * s.grad[t];
    }
    // grad = Q alpha - e, so a'Qa = a'grad + sum(alpha)
    const double quad = alpha_grad + sum_alpha;
    Certificate cert;
    cert.dual = sum_alpha - 0.5 * quad;

    double hinge = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        // decision on training row t: grad identity gives f - b = y*(grad + 1)
        const double f = static_cast<double>(y[t]) * (s.grad[t] + 1.0) + bias;
        hinge += std::max(0.0, 1.0 - static_cast<double>(y[t]) * f);
    }
    const double primal = 0.5 * quad + c * hinge;
    cert.gap = primal - cert.dual;
    (void)k;
    (void)shift;
    return cert;
}

} // namespace

SvmModel svm_train(const Matrix& kernel, std::span<const int> labels, const SvmOptions& options) {
    const std::size_t n = labels.size();
    if (kernel.rows != n || kernel.cols != n)
        throw std::runtime_error("svm: kernel must be square over the training rows");
    if (n < 2) throw std::runtime_error("svm: need at least 2 rows");
    if (options.c <= 0.0) throw std::runtime_error("svm: C must be positive");

    int lo = labels[0], hi = labels[0];
    for (int v : labels) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw std::runtime_error("svm: need two classes");
    std::vector<std::int8_t> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] != lo && labels[t] != hi) throw std::runtime_error("svm: more than two classes");
        y[t] = labels[t] == hi ? std::int8_t{1} : std::int8_t{-1};
    }

    // Converge at the requested pair tolerance, then tighten until the
    // primal-dual gap certificate holds. A kernel that still will not
    // certify gets one retry with a small diagonal shift.
    double shift = 0.0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        double tol = options.tol;
        SmoState state;
        std::size_t used = 0;
        bool certified = false;
        double bias = 0.0;
        Certificate cert;
        while (true) {
            state = run_smo(kernel, y, options.c, tol, options.max_iter - used, shift);
            used += state.iterations;
            bias = bias_from(state, y, options.c);
            cert = certify(kernel, y, state, options.c, bias, shift);
            if (state.converged && cert.gap <= options.gap_tol) {
                certified = true;
                break;
            }
            if (!state.converged || tol <= 1e-12 || used >= options.max_iter) break;
            tol *= 0.1;
        }
        if (!certified && attempt == 0) {
            double trace = 0.0;
            for (std::size_t t = 0; t < n; ++t) trace += kernel(t, t);
            shift = 1e-8 * std::max(trace / static_cast<double>(n), 1.0);
            continue;
        }

        SvmModel model;
        model.alphas = state.alpha;
        model.labels = y;
        model.bias = bias;
        model.c = options.c;
        model.dual_objective = cert.dual;
        model.duality_gap = cert.gap;
        model.iterations = used;
        model.shifted = shift != 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (state.alpha[t] > 0.0) model.support_rows.push_back(t);
        return model;
    }
    throw std::runtime_error("svm: unreachable");
}

SvmPrediction svm_predict(const SvmModel& model, const Matrix& kernel_test) {
    if (kernel_test.cols != model.alphas.size())
        throw std::runtime_error("svm: test kernel columns must index the training rows");
    SvmPrediction pred;
    pred.decision.resize(kernel_test.rows);
    pred.labels.resize(kernel_test.rows);
    for (std::size_t t = 0; t < kernel_test.rows; ++t) {
        double f = model.bias;
        for (std::size_t i : model.support_rows)
            f += model.alphas[i] * static_cast<double>(model.labels[i]) * kernel_test(t, i);
        pred.decision[t] = f;
        pred.labels[t] = f >= 0.0 ? 1 : -1;
    }
    return pred;
}

void save_svm(const SvmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("svm: cannot write " + path);
    out.precision(17);
    out << "svm " << model.alphas.size() << '\n';
    out << "c " << model.c << '\n';
    out << "bias " << model.bias << '\n';
    out << "dual " << model.dual_objective << '\n';
    out << "gap " << model.duality_gap << '\n';
    out << "iterations " << model.iterations << '\n';
    out << "shifted " << (model.shifted ? 1 : 0) << '\n';
    for (std::size_t t = 0; t < model.alphas.size(); ++t)
        out << "row " << t << ' ' << static_cast<int>(model.labels[t]) << ' ' << model.alphas[t]
            << '\n';
}

SvmModel load_svm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("svm: cannot open " + path);
    SvmModel model;
    std::string tag;
    std::size_t n = 0;
    if (!(in >> tag >> n) || tag != "svm") throw std::runtime_error("svm: bad model file " + path);
    model.alphas.assign(n, 0.0);
    model.labels.assign(n, 0);
    int shifted = 0;
    while (in >> tag) {
        if (tag == "c") in >> model.c;
        else if (tag == "bias") in >> model.bias;
        else if (tag == "dual") in >> model.dual_objective;
        else if (tag == "gap") in >> model.duality_gap;
        else if (tag == "iterations") in >> model.iterations;
        else if (tag == "shifted") in >> shifted;
        else if (tag == "row") {
            std::size_t t;
            int y;
            double a;
            if (!(in >> t >> y >> a) || t >= n) throw std::runtime_error("svm: bad row in " + path);
            model.labels[t] = static_cast<std::int8_t>(y);
            model.alphas[t] = a;
        } else {
            throw std::runtime_error("svm: unknown tag '" + tag + "' in " + path);
        }
    }
    model.shifted = shifted != 0;
    for (std::size_t t = 0; t < n; ++t)
        if (model.alphas[t] > 0.0) model.support_rows.push_back(t);
    return model;
}

} // namespace quenchmap
