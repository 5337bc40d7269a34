#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rbtr/rb_matrix.hpp"
#include "rbtr/rb_tensor.hpp"

namespace rbtr {

/**
 * Parameters of the RBTR-TV completion model
 *
 *   min_X  sum_k alpha_k |X_<k,d>|_*  +  lambda TV(X)   s.t.  P_Omega(X) = P_Omega(T)
 *
 * solved by ADMM with penalties beta1 (X = A_k), beta2 (X = Z) and
 * beta3 (D_i Z_(1) = E_i). Defaults are the image-completion settings.
 */
struct CompletionConfig {
    std::vector<double> alphas;  ///< empty means uniform 1/N; normalised to sum 1
    double lambda = 0.3;
    double beta1 = 5e-3;
    double beta2 = 0.1;
    double beta3 = 5e-3;
    std::size_t d = 0;  ///< circular-unfolding width; 0 means round(N/2)
    std::size_t max_iter = 300;
    double rel_tol = 1e-5;
    std::uint64_t seed = 0;
    bool track_objective = true;
};

/// Fills defaults for an order-N problem, normalises alphas and validates
/// every field. Throws std::invalid_argument on bad values.
CompletionConfig resolve_config(const CompletionConfig& cfg, std::size_t n_modes);

struct CompletionState {
    RBTensor X;
    std::vector<RBTensor> A;
    RBTensor Z;
    RBMatrix E1, E2;
    std::vector<RBTensor> B;
    RBTensor Q;
    RBMatrix F1, F2;
    std::size_t iter = 0;
};

/// X = P_Omega(T_obs), A_k = Z = X, all multipliers and E zero.
CompletionState init_state(const RBTensor& t_obs, const IndexMask& mask, const CompletionConfig& cfg);

// Periodic forward differences on an I1 x t matrix. D1 acts along the row
// (difference to the next column), D2 along the column (next row).
RBMatrix grad_horizontal(const RBMatrix& x);
RBMatrix grad_vertical(const RBMatrix& x);
RBMatrix grad_horizontal_adjoint(const RBMatrix& y);
RBMatrix grad_vertical_adjoint(const RBMatrix& y);

/// Isotropic TV of the classical mode-1 unfolding with periodic boundaries.
double tv_value(const RBTensor& x);

/// sum_k alpha_k |X_<k,d>|_* + lambda TV(X)
double objective_value(const RBTensor& x, const CompletionConfig& cfg);

RBTensor update_x(const CompletionState& s, const RBTensor& t_obs, const IndexMask& mask,
                  const CompletionConfig& cfg);

/// A_k for the 1-based mode k: fold(svt(X_<k,d> + B_k,<k,d> / beta1, alpha_k / beta1)).
RBTensor update_a(const CompletionState& s, std::size_t k, const CompletionConfig& cfg);

/// Eigenvalues beta2 + beta3 (|1 - e^{-2 pi i u/I1}|^2 + |1 - e^{-2 pi i v/t}|^2) of
/// beta2 I + beta3 (D1^T D1 + D2^T D2) under the 2-D DFT.
Eigen::ArrayXXd build_gradient_spectrum(std::size_t rows, std::size_t cols, const CompletionConfig& cfg);

/// Right-hand side beta2 X + Q + D1^T (beta3 E1 - F1) + D2^T (beta3 E2 - F2) on the mode-1 unfolding.
RBMatrix z_rhs(const CompletionState& s, const CompletionConfig& cfg);

/// Solves (beta2 I + beta3 (D1^T D1 + D2^T D2)) Z = rhs channel-wise with 2-D FFTs.
class CirculantSolver {
public:
    CirculantSolver(std::size_t rows, std::size_t cols, const CompletionConfig& cfg);
    ~CirculantSolver();
    CirculantSolver(const CirculantSolver&) = delete;
    CirculantSolver& operator=(const CirculantSolver&) = delete;

    RBMatrix solve(const RBMatrix& rhs);

private:
    struct Plans;
    std::unique_ptr<Plans> plans_;
    Eigen::ArrayXXd spectrum_;
};

RBTensor update_z(const CompletionState& s, const CompletionConfig& cfg);

std::pair<RBMatrix, RBMatrix> update_e(const CompletionState& s, const CompletionConfig& cfg);

/// B_k += beta1 (X - A_k); Q += beta2 (X - Z); F_i += beta3 (D_i Z_(1) - E_i).
void update_multipliers(CompletionState& s, const CompletionConfig& cfg);

struct FeasibilityResiduals {
    double x_a = 0.0;     ///< max_k |X - A_k|_F
    double x_z = 0.0;     ///< |X - Z|_F
    double grad_e = 0.0;  ///< sqrt(sum_i |D_i Z_(1) - E_i|_F^2)
};

FeasibilityResiduals feasibility(const CompletionState& s);

struct SolveReport {
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> rel_change;
    std::vector<double> objective;
    std::vector<double> res_x_a;
    std::vector<double> res_x_z;
    std::vector<double> res_grad_e;
    std::optional<double> rse;
    std::optional<double> psnr;

    /// {iterations, rel_change[], rse?, psnr?, objective[], residuals{x_a[], x_z[], grad_e[]}}
    std::string to_json() const;
};

struct SolveResult {
    RBTensor X;
    SolveReport report;
};

using ProgressFn = std::function<void(std::size_t iter, double rel_change, const FeasibilityResiduals&)>;

/// Runs the ADMM iterations until the relative change of X drops below
/// rel_tol or max_iter is reached. Throws NumericalError naming the update
/// that first produced a non-finite value.
SolveResult solve(const RBTensor& t_obs, const IndexMask& mask, const CompletionConfig& cfg,
                  const ProgressFn& progress = {});

} // namespace rbtr
