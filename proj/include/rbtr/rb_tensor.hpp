#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rbtr/rb_matrix.hpp"
#include "rbtr/rb_scalar.hpp"

namespace rbtr {

using Dims = std::vector<std::size_t>;

std::size_t num_elements(std::span<const std::size_t> dims);

/**
 * Dense N-th order RB tensor in split storage.
 *
 * Entries are stored in column-major linear order: the entry at the 0-based
 * multi-index (i_1, ..., i_N) lives at i_1 + I_1 (i_2 + I_2 (i_3 + ...)), so
 * the first index runs fastest.
 */
class RBTensor {
public:
    RBTensor() = default;
    explicit RBTensor(Dims dims);
    RBTensor(Dims dims, Eigen::VectorXcd c1, Eigen::VectorXcd c2);

    const Dims& dims() const { return dims_; }
    std::size_t order() const { return dims_.size(); }
    std::size_t dim(std::size_t mode0) const { return dims_.at(mode0); }
    std::size_t size() const { return static_cast<std::size_t>(c1_.size()); }

    const Eigen::VectorXcd& c1() const { return c1_; }
    const Eigen::VectorXcd& c2() const { return c2_; }
    Eigen::VectorXcd& c1() { return c1_; }
    Eigen::VectorXcd& c2() { return c2_; }

    RBScalar operator[](std::size_t linear) const {
        const auto l = static_cast<Eigen::Index>(linear);
        return {c1_[l], c2_[l]};
    }
    void set(std::size_t linear, const RBScalar& v) {
        const auto l = static_cast<Eigen::Index>(linear);
        c1_[l] = v.c1;
        c2_[l] = v.c2;
    }

    std::size_t linear_index(std::span<const std::size_t> idx) const;
    RBScalar at(std::span<const std::size_t> idx) const { return (*this)[linear_index(idx)]; }

    bool all_finite() const { return c1_.allFinite() && c2_.allFinite(); }

    RBTensor& operator+=(const RBTensor& o);
    RBTensor& operator-=(const RBTensor& o);
    RBTensor& operator*=(double s);

    friend bool operator==(const RBTensor& a, const RBTensor& b) {
        return a.dims_ == b.dims_ && a.c1_ == b.c1_ && a.c2_ == b.c2_;
    }

private:
    Dims dims_;
    Eigen::VectorXcd c1_;
    Eigen::VectorXcd c2_;
};

RBTensor operator+(RBTensor a, const RBTensor& b);
RBTensor operator-(RBTensor a, const RBTensor& b);
RBTensor operator*(double s, RBTensor a);

/// Observed-entry set over the linear indices of a tensor with the same dims.
struct IndexMask {
    Dims dims;
    std::vector<std::uint8_t> observed;

    static IndexMask full(Dims dims);
    static IndexMask empty(Dims dims);

    std::size_t observed_count() const;
    double sampling_rate() const;
    IndexMask complement() const;
};

// Unfoldings. The mode argument k (and the circular width d) follow the usual
// 1-based mathematical convention: 1 <= k <= N.

/// Classical (Kolda-Bader) mode-k unfolding: rows i_k, columns the other modes in natural order.
RBMatrix unfold_classical(const RBTensor& t, std::size_t k);
/// Mode-k unfolding with cyclic column order i_{k+1}, ..., i_N, i_1, ..., i_{k-1}.
RBMatrix unfold_mode(const RBTensor& t, std::size_t k);
/// k-mode unfolding: rows modes 1..k, columns modes k+1..N (a plain reshape).
RBMatrix unfold_kmode(const RBTensor& t, std::size_t k);
/// Circular unfolding <k,d>: rows the d cyclic modes m..k, columns modes k+1..m-1.
/// Requires 1 <= d <= N-1.
RBMatrix unfold_circular(const RBTensor& t, std::size_t k, std::size_t d);

RBTensor fold_classical(const RBMatrix& m, std::size_t k, const Dims& dims);
RBTensor fold_mode(const RBMatrix& m, std::size_t k, const Dims& dims);
RBTensor fold_kmode(const RBMatrix& m, std::size_t k, const Dims& dims);
RBTensor fold_circular(const RBMatrix& m, std::size_t k, std::size_t d, const Dims& dims);

/// First row mode m (1-based) of the circular unfolding <k,d>.
std::size_t circular_first_mode(std::size_t n_modes, std::size_t k, std::size_t d);

/// Mode permutation: result dim q is t.dim(order[q]) (0-based modes).
RBTensor permute(const RBTensor& t, std::span<const std::size_t> order);
/// Same linear data, new dims with equal element count.
RBTensor reshape(const RBTensor& t, Dims dims);

/// Zero every entry outside the observed set (keep_observed) or inside it (!keep_observed).
RBTensor project_mask(const RBTensor& t, const IndexMask& mask, bool keep_observed = true);

double tensor_frobenius(const RBTensor& t);

} // namespace rbtr
