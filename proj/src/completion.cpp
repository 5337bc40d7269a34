#include "rbtr/completion.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <fftw3.h>
#include <json.hpp>

#include "rbtr/errors.hpp"

namespace rbtr {

CompletionConfig resolve_config(const CompletionConfig& cfg, std::size_t n_modes) {
    if (n_modes < 2) throw std::invalid_argument("completion needs a tensor of order >= 2");
    CompletionConfig out = cfg;
    if (out.alphas.empty()) out.alphas.assign(n_modes, 1.0 / static_cast<double>(n_modes));
    if (out.alphas.size() != n_modes) {
        throw std::invalid_argument("expected " + std::to_string(n_modes) + " alpha weights, got " +
                                    std::to_string(out.alphas.size()));
    }
    double total = 0.0;
    for (double a : out.alphas) {
        if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("alpha weights must be positive");
        total += a;
    }
    for (double& a : out.alphas) a /= total;
    if (!(out.lambda >= 0.0) || !std::isfinite(out.lambda)) throw std::invalid_argument("lambda must be >= 0");
    for (double b : {out.beta1, out.beta2, out.beta3}) {
        if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("beta parameters must be positive");
    }
    if (out.d == 0) out.d = static_cast<std::size_t>(std::lround(static_cast<double>(n_modes) / 2.0));
    if (out.d < 1 || out.d + 1 > n_modes) {
        throw std::invalid_argument("circular width d must lie in 1.." + std::to_string(n_modes - 1));
    }
    if (out.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(out.rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    return out;
}

CompletionState init_state(const RBTensor& t_obs, const IndexMask& mask, const CompletionConfig& cfg) {
    const CompletionConfig c = resolve_config(cfg, t_obs.order());
    CompletionState s;
    s.X = project_mask(t_obs, mask, true);
    const std::size_t n = t_obs.order();
    s.A.assign(n, s.X);
    s.Z = s.X;
    s.B.assign(n, RBTensor(t_obs.dims()));
    s.Q = RBTensor(t_obs.dims());
    const auto rows = static_cast<Eigen::Index>(t_obs.dim(0));
    const auto cols = static_cast<Eigen::Index>(t_obs.size() / t_obs.dim(0));
    s.E1 = s.E2 = s.F1 = s.F2 = RBMatrix(rows, cols);
    s.iter = 0;
    (void)c;
    return s;
}

namespace {

template <typename Op>
RBMatrix per_channel(const RBMatrix& x, Op op) {
    return {op(x.c1()), op(x.c2())};
}

Eigen::MatrixXcd diff_cols(const Eigen::MatrixXcd& m) {
    const Eigen::Index t = m.cols();
    Eigen::MatrixXcd out(m.rows(), t);
    if (t == 1) return Eigen::MatrixXcd::Zero(m.rows(), 1);
    out.leftCols(t - 1) = m.rightCols(t - 1) - m.leftCols(t - 1);
    out.col(t - 1) = m.col(0) - m.col(t - 1);
    return out;
}

Eigen::MatrixXcd diff_cols_adjoint(const Eigen::MatrixXcd& y) {
    const Eigen::Index t = y.cols();
    Eigen::MatrixXcd out(y.rows(), t);
    if (t == 1) return Eigen::MatrixXcd::Zero(y.rows(), 1);
    out.rightCols(t - 1) = y.leftCols(t - 1) - y.rightCols(t - 1);
    out.col(0) = y.col(t - 1) - y.col(0);
    return out;
}

Eigen::MatrixXcd diff_rows(const Eigen::MatrixXcd& m) {
    const Eigen::Index r = m.rows();
    Eigen::MatrixXcd out(r, m.cols());
    if (r == 1) return Eigen::MatrixXcd::Zero(1, m.cols());
    out.topRows(r - 1) = m.bottomRows(r - 1) - m.topRows(r - 1);
    out.row(r - 1) = m.row(0) - m.row(r - 1);
    return out;
}

Eigen::MatrixXcd diff_rows_adjoint(const Eigen::MatrixXcd& y) {
    const Eigen::Index r = y.rows();
    Eigen::MatrixXcd out(r, y.cols());
    if (r == 1) return Eigen::MatrixXcd::Zero(1, y.cols());
    out.bottomRows(r - 1) = y.topRows(r - 1) - y.bottomRows(r - 1);
    out.row(0) = y.row(r - 1) - y.row(0);
    return out;
}

// Per-entry RB squared modulus of a matrix.
Eigen::ArrayXXd abs2(const RBMatrix& m) {
    return 0.5 * (m.c1().array().abs2() + m.c2().array().abs2());
}

void require_finite(const RBTensor& t, const char* update, std::size_t iter) {
    if (!t.all_finite()) {
        throw NumericalError(std::string("non-finite values after the ") + update + " update at iteration " +
                             std::to_string(iter));
    }
}

void require_finite(const RBMatrix& m, const char* update, std::size_t iter) {
    if (!m.c1().allFinite() || !m.c2().allFinite()) {
        throw NumericalError(std::string("non-finite values after the ") + update + " update at iteration " +
                             std::to_string(iter));
    }
}

} // namespace

RBMatrix grad_horizontal(const RBMatrix& x) { return per_channel(x, diff_cols); }
RBMatrix grad_vertical(const RBMatrix& x) { return per_channel(x, diff_rows); }
RBMatrix grad_horizontal_adjoint(const RBMatrix& y) { return per_channel(y, diff_cols_adjoint); }
RBMatrix grad_vertical_adjoint(const RBMatrix& y) { return per_channel(y, diff_rows_adjoint); }

double tv_value(const RBTensor& x) {
    const RBMatrix x1 = unfold_classical(x, 1);
    return (abs2(grad_horizontal(x1)) + abs2(grad_vertical(x1))).sqrt().sum();
}

double objective_value(const RBTensor& x, const CompletionConfig& cfg) {
    const CompletionConfig c = resolve_config(cfg, x.order());
    double value = 0.0;
    for (std::size_t k = 1; k <= x.order(); ++k) {
        value += c.alphas[k - 1] * nuclear_norm(unfold_circular(x, k, c.d));
    }
    return value + c.lambda * tv_value(x);
}

RBTensor update_x(const CompletionState& s, const RBTensor& t_obs, const IndexMask& mask,
                  const CompletionConfig& cfg) {
    const std::size_t n = s.A.size();
    RBTensor acc = cfg.beta2 * s.Z;
    acc -= s.Q;
    for (std::size_t k = 0; k < n; ++k) {
        acc += cfg.beta1 * s.A[k];
        acc -= s.B[k];
    }
    acc *= 1.0 / (static_cast<double>(n) * cfg.beta1 + cfg.beta2);
    if (mask.observed.size() != acc.size()) throw DimensionError("update_x: mask dims do not match");
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (mask.observed[i]) acc.set(i, t_obs[i]);
    }
    return acc;
}

RBTensor update_a(const CompletionState& s, std::size_t k, const CompletionConfig& cfg) {
    const CompletionConfig c = resolve_config(cfg, s.X.order());
    if (k < 1 || k > s.X.order()) throw DimensionError("update_a: mode out of range");
    RBTensor gamma = s.X + (1.0 / c.beta1) * s.B[k - 1];
    const RBMatrix shrunk = svt(unfold_circular(gamma, k, c.d), c.alphas[k - 1] / c.beta1);
    return fold_circular(shrunk, k, c.d, s.X.dims());
}

Eigen::ArrayXXd build_gradient_spectrum(std::size_t rows, std::size_t cols, const CompletionConfig& cfg) {
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(cols);
    Eigen::ArrayXXd spectrum(r, c);
    const double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index v = 0; v < c; ++v) {
        const double wv = 2.0 - 2.0 * std::cos(two_pi * static_cast<double>(v) / static_cast<double>(c));
        for (Eigen::Index u = 0; u < r; ++u) {
            const double wu = 2.0 - 2.0 * std::cos(two_pi * static_cast<double>(u) / static_cast<double>(r));
            spectrum(u, v) = cfg.beta2 + cfg.beta3 * (wu + wv);
        }
    }
    return spectrum;
}

RBMatrix z_rhs(const CompletionState& s, const CompletionConfig& cfg) {
    RBMatrix rhs = cfg.beta2 * unfold_classical(s.X, 1);
    rhs += unfold_classical(s.Q, 1);
    rhs += grad_horizontal_adjoint(cfg.beta3 * s.E1 - s.F1);
    rhs += grad_vertical_adjoint(cfg.beta3 * s.E2 - s.F2);
    return rhs;
}

struct CirculantSolver::Plans {
    std::size_t rows = 0, cols = 0;
    fftw_complex* buf = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Plans(std::size_t r, std::size_t c) : rows(r), cols(c) {
        buf = fftw_alloc_complex(r * c);
        if (buf == nullptr) throw std::bad_alloc();
        // column-major r x c: rows vary fastest, so FFTW sees a c x r row-major array
        forward = fftw_plan_dft_2d(static_cast<int>(c), static_cast<int>(r), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(static_cast<int>(c), static_cast<int>(r), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (forward == nullptr || backward == nullptr) {
            release();
            throw NumericalError("FFTW could not create a plan");
        }
    }
    ~Plans() { release(); }
    void release() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buf) fftw_free(buf);
        forward = backward = nullptr;
        buf = nullptr;
    }
};

CirculantSolver::CirculantSolver(std::size_t rows, std::size_t cols, const CompletionConfig& cfg)
    : plans_(std::make_unique<Plans>(rows, cols)), spectrum_(build_gradient_spectrum(rows, cols, cfg)) {}

CirculantSolver::~CirculantSolver() = default;

RBMatrix CirculantSolver::solve(const RBMatrix& rhs) {
    const auto r = static_cast<Eigen::Index>(plans_->rows);
    const auto c = static_cast<Eigen::Index>(plans_->cols);
    if (rhs.rows() != r || rhs.cols() != c) throw DimensionError("CirculantSolver: rhs shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(r * c);
    auto channel = [&](const Eigen::MatrixXcd& b) {
        auto* data = reinterpret_cast<cplx*>(plans_->buf);
        Eigen::Map<Eigen::MatrixXcd> work(data, r, c);
        work = b;
        fftw_execute(plans_->forward);
        work.array() /= spectrum_.cast<cplx>();
        fftw_execute(plans_->backward);
        return Eigen::MatrixXcd(work * inv_n);
    };
    return {channel(rhs.c1()), channel(rhs.c2())};
}

RBTensor update_z(const CompletionState& s, const CompletionConfig& cfg) {
    const std::size_t rows = s.X.dim(0);
    const std::size_t cols = s.X.size() / rows;
    CirculantSolver solver(rows, cols, cfg);
    return fold_classical(solver.solve(z_rhs(s, cfg)), 1, s.X.dims());
}

namespace {

std::pair<RBMatrix, RBMatrix> shrink_gradients(const RBMatrix& z1, const CompletionState& s,
                                               const CompletionConfig& cfg) {
    RBMatrix w1 = grad_horizontal(z1) + (1.0 / cfg.beta3) * s.F1;
    RBMatrix w2 = grad_vertical(z1) + (1.0 / cfg.beta3) * s.F2;
    const Eigen::ArrayXXd norm = (abs2(w1) + abs2(w2)).sqrt();
    Eigen::ArrayXXd factor(norm.rows(), norm.cols());
    for (Eigen::Index j = 0; j < norm.cols(); ++j)
        for (Eigen::Index i = 0; i < norm.rows(); ++i)
            factor(i, j) = group_shrink_factor(norm(i, j), cfg.lambda, cfg.beta3);
    const Eigen::ArrayXXcd f = factor.cast<cplx>();
    w1.c1().array() *= f;
    w1.c2().array() *= f;
    w2.c1().array() *= f;
    w2.c2().array() *= f;
    return {std::move(w1), std::move(w2)};
}

} // namespace

std::pair<RBMatrix, RBMatrix> update_e(const CompletionState& s, const CompletionConfig& cfg) {
    return shrink_gradients(unfold_classical(s.Z, 1), s, cfg);
}

void update_multipliers(CompletionState& s, const CompletionConfig& cfg) {
    for (std::size_t k = 0; k < s.B.size(); ++k) s.B[k] += cfg.beta1 * (s.X - s.A[k]);
    s.Q += cfg.beta2 * (s.X - s.Z);
    const RBMatrix z1 = unfold_classical(s.Z, 1);
    s.F1 += cfg.beta3 * (grad_horizontal(z1) - s.E1);
    s.F2 += cfg.beta3 * (grad_vertical(z1) - s.E2);
}

FeasibilityResiduals feasibility(const CompletionState& s) {
    FeasibilityResiduals r;
    for (const auto& a : s.A) r.x_a = std::max(r.x_a, tensor_frobenius(s.X - a));
    r.x_z = tensor_frobenius(s.X - s.Z);
    const RBMatrix z1 = unfold_classical(s.Z, 1);
    const double g1 = frobenius(grad_horizontal(z1) - s.E1);
    const double g2 = frobenius(grad_vertical(z1) - s.E2);
    r.grad_e = std::sqrt(g1 * g1 + g2 * g2);
    return r;
}

std::string SolveReport::to_json() const {
    nlohmann::ordered_json j;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["rel_change"] = rel_change;
    if (rse) j["rse"] = *rse;
    if (psnr) {
        if (std::isfinite(*psnr)) j["psnr"] = *psnr;
        else j["psnr"] = "inf";
    }
    j["objective"] = objective;
    j["residuals"] = {{"x_a", res_x_a}, {"x_z", res_x_z}, {"grad_e", res_grad_e}};
    return j.dump(2);
}

SolveResult solve(const RBTensor& t_obs, const IndexMask& mask, const CompletionConfig& cfg,
                  const ProgressFn& progress) {
    if (mask.dims != t_obs.dims() || mask.observed.size() != t_obs.size()) {
        throw DimensionError("solve: mask dims do not match the observed tensor");
    }
    for (std::size_t i = 0; i < t_obs.size(); ++i) {
        if (mask.observed[i]) {
            const RBScalar v = t_obs[i];
            if (!std::isfinite(std::abs(v.c1)) || !std::isfinite(std::abs(v.c2))) {
                throw std::invalid_argument("solve: observed entries must be finite");
            }
        }
    }
    const CompletionConfig c = resolve_config(cfg, t_obs.order());
    const std::size_t n = t_obs.order();
    CompletionState s = init_state(t_obs, mask, c);
    const bool fully_observed = mask.observed_count() == mask.observed.size();
    CirculantSolver z_solver(t_obs.dim(0), t_obs.size() / t_obs.dim(0), c);

    SolveReport report;
    while (s.iter < c.max_iter) {
        const std::size_t p = s.iter + 1;
        RBTensor x_next = update_x(s, t_obs, mask, c);
        require_finite(x_next, "X", p);
        const double prev_norm = tensor_frobenius(s.X);
        const double step = tensor_frobenius(x_next - s.X);
        const double rel = prev_norm > 0.0 ? step / prev_norm : (step > 0.0 ? INFINITY : 0.0);
        s.X = std::move(x_next);

        for (std::size_t k = 1; k <= n; ++k) {
            try {
                s.A[k - 1] = update_a(s, k, c);
            } catch (const NumericalError& e) {
                throw NumericalError(std::string("A update failed at iteration ") + std::to_string(p) + ": " +
                                     e.what());
            }
            require_finite(s.A[k - 1], "A", p);
        }
        s.Z = fold_classical(z_solver.solve(z_rhs(s, c)), 1, s.X.dims());
        require_finite(s.Z, "Z", p);
        std::tie(s.E1, s.E2) = update_e(s, c);
        require_finite(s.E1, "E", p);
        require_finite(s.E2, "E", p);
        update_multipliers(s, c);
        for (const auto& b : s.B) require_finite(b, "B", p);
        require_finite(s.Q, "Q", p);
        require_finite(s.F1, "F", p);
        require_finite(s.F2, "F", p);
        s.iter = p;

        const FeasibilityResiduals res = feasibility(s);
        report.rel_change.push_back(rel);
        report.res_x_a.push_back(res.x_a);
        report.res_x_z.push_back(res.x_z);
        report.res_grad_e.push_back(res.grad_e);
        if (c.track_objective) report.objective.push_back(objective_value(s.X, c));
        if (progress) progress(p, rel, res);
        // X^1 = X^0 whenever A, Z equal X^0 and the multipliers vanish
        if ((p > 1 || fully_observed) && rel < c.rel_tol) {
            report.converged = true;
            break;
        }
    }
    if (!c.track_objective) report.objective.push_back(objective_value(s.X, c));
    report.iterations = s.iter;
    return {std::move(s.X), std::move(report)};
}

} // namespace rbtr
