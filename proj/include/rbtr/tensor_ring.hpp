#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "rbtr/rb_tensor.hpp"

namespace rbtr {

/**
 * Tensor-ring format over RB cores. Core k (0-based here) has shape
 * r_k x I_k x r_{k+1} with the ring closed by r_N = r_0, and
 *
 *   T(i_1, ..., i_N) = Tr( Z_1(i_1) Z_2(i_2) ... Z_N(i_N) )
 *
 * where Z_k(i) is the r_k x r_{k+1} lateral slice of core k.
 */
class TRCores {
public:
    TRCores() = default;
    /// Validates N >= 2 and adjacent-rank chaining; throws DimensionError otherwise.
    explicit TRCores(std::vector<RBTensor> cores);

    std::size_t order() const { return cores_.size(); }
    const std::vector<RBTensor>& cores() const { return cores_; }
    const RBTensor& core(std::size_t k0) const { return cores_.at(k0); }
    /// [r_1, ..., r_N]
    const std::vector<std::size_t>& ranks() const { return ranks_; }
    /// [I_1, ..., I_N]
    Dims dims() const;

    /// Lateral slice Z_k(i) as an r_k x r_{k+1} RB matrix (k0 is 0-based).
    RBMatrix slice(std::size_t k0, std::size_t i) const;

private:
    std::vector<RBTensor> cores_;
    std::vector<std::size_t> ranks_;
};

/// Cores Z_{shift+1}, ..., Z_N, Z_1, ..., Z_shift. Reconstructs the tensor with
/// modes moved circularly by `shift` steps.
TRCores rotate_cores(const TRCores& cores, std::size_t shift);

/// Single entry from the trace of slice products. `idx` is a 0-based multi-index.
RBScalar tr_element(const TRCores& cores, std::span<const std::size_t> idx);

/// Full dense tensor by chained subchain contraction.
RBTensor tr_reconstruct(const TRCores& cores);

/// Z^{<=k}: the first k cores merged, shape r_1 x (I_1...I_k) x r_{k+1}; 1 <= k <= N-1.
RBTensor subchain_le(const TRCores& cores, std::size_t k);
/// Z^{>k}: the last N-k cores merged, shape r_{k+1} x (I_{k+1}...I_N) x r_1; 1 <= k <= N-1.
RBTensor subchain_gt(const TRCores& cores, std::size_t k);

/// Closest factor pair r1 * r2 = rank with r1 <= r2.
std::pair<std::size_t, std::size_t> split_rank(std::size_t rank);

/// RBTR-SVD: sequential truncated RB SVDs with thresholds
/// delta_1 = sqrt(2) eps |T|_F / sqrt(N) and delta_k = eps |T|_F / sqrt(N).
/// Each step keeps the smallest rank whose discarded tail has Frobenius norm
/// at most delta_k, so the overall relative error stays below eps.
TRCores rbtr_svd(const RBTensor& t, double eps);

/// Number of RB entries held by the cores, sum_k r_k I_k r_{k+1}.
std::size_t storage_cost(const TRCores& cores);
/// prod(original_dims) / storage_cost(cores)
double compression_ratio(const TRCores& cores, std::span<const std::size_t> original_dims);

/// Writes core_1.rbt ... core_N.rbt and cores.json {ranks, dims, eps} into `dir`.
void save_cores(const std::filesystem::path& dir, const TRCores& cores, double eps);
TRCores load_cores(const std::filesystem::path& dir);

} // namespace rbtr
