#include "rbtr/rb_tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "rbtr/errors.hpp"

namespace rbtr {

std::size_t num_elements(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

RBTensor::RBTensor(Dims dims)
    : dims_(std::move(dims)),
      c1_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(num_elements(dims_)))),
      c2_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(num_elements(dims_)))) {}

RBTensor::RBTensor(Dims dims, Eigen::VectorXcd c1, Eigen::VectorXcd c2)
    : dims_(std::move(dims)), c1_(std::move(c1)), c2_(std::move(c2)) {
    const auto n = static_cast<Eigen::Index>(num_elements(dims_));
    if (c1_.size() != n || c2_.size() != n) {
        throw DimensionError("RBTensor: channel length does not match dims");
    }
}

std::size_t RBTensor::linear_index(std::span<const std::size_t> idx) const {
    if (idx.size() != dims_.size()) throw DimensionError("RBTensor: index order mismatch");
    std::size_t lin = 0;
    for (std::size_t q = dims_.size(); q-- > 0;) {
        if (idx[q] >= dims_[q]) throw DimensionError("RBTensor: index out of range");
        lin = lin * dims_[q] + idx[q];
    }
    return lin;
}

RBTensor& RBTensor::operator+=(const RBTensor& o) {
    if (dims_ != o.dims_) throw DimensionError("RBTensor: dims mismatch in +");
    c1_ += o.c1_;
    c2_ += o.c2_;
    return *this;
}

RBTensor& RBTensor::operator-=(const RBTensor& o) {
    if (dims_ != o.dims_) throw DimensionError("RBTensor: dims mismatch in -");
    c1_ -= o.c1_;
    c2_ -= o.c2_;
    return *this;
}

RBTensor& RBTensor::operator*=(double s) {
    c1_ *= s;
    c2_ *= s;
    return *this;
}

RBTensor operator+(RBTensor a, const RBTensor& b) { return a += b; }
RBTensor operator-(RBTensor a, const RBTensor& b) { return a -= b; }
RBTensor operator*(double s, RBTensor a) { return a *= s; }

IndexMask IndexMask::full(Dims dims) {
    const std::size_t n = num_elements(dims);
    return {std::move(dims), std::vector<std::uint8_t>(n, 1)};
}

IndexMask IndexMask::empty(Dims dims) {
    const std::size_t n = num_elements(dims);
    return {std::move(dims), std::vector<std::uint8_t>(n, 0)};
}

std::size_t IndexMask::observed_count() const {
    std::size_t n = 0;
    for (auto v : observed) n += v != 0;
    return n;
}

double IndexMask::sampling_rate() const {
    return observed.empty() ? 0.0 : static_cast<double>(observed_count()) / static_cast<double>(observed.size());
}

IndexMask IndexMask::complement() const {
    IndexMask out{dims, observed};
    for (auto& v : out.observed) v = v ? 0 : 1;
    return out;
}

RBTensor permute(const RBTensor& t, std::span<const std::size_t> order) {
    const std::size_t n = t.order();
    if (order.size() != n) throw DimensionError("permute: order has wrong length");
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t q = 1; q < n; ++q) stride[q] = stride[q - 1] * t.dim(q - 1);

    Dims out_dims(n);
    std::vector<std::size_t> out_stride(n);
    std::vector<bool> seen(n, false);
    for (std::size_t q = 0; q < n; ++q) {
        if (order[q] >= n || seen[order[q]]) throw DimensionError("permute: order is not a permutation");
        seen[order[q]] = true;
        out_dims[q] = t.dim(order[q]);
        out_stride[q] = stride[order[q]];
    }

    RBTensor out(out_dims);
    const std::size_t total = t.size();
    if (total == 0) return out;
    std::vector<std::size_t> idx(n, 0);
    std::size_t src = 0;
    for (std::size_t dst = 0; dst < total; ++dst) {
        const auto s = static_cast<Eigen::Index>(src);
        const auto d = static_cast<Eigen::Index>(dst);
        out.c1()[d] = t.c1()[s];
        out.c2()[d] = t.c2()[s];
        for (std::size_t q = 0; q < n; ++q) {
            src += out_stride[q];
            if (++idx[q] < out_dims[q]) break;
            src -= out_stride[q] * out_dims[q];
            idx[q] = 0;
        }
    }
    return out;
}

RBTensor reshape(const RBTensor& t, Dims dims) {
    if (num_elements(dims) != t.size()) throw DimensionError("reshape: element count changes");
    return {std::move(dims), t.c1(), t.c2()};
}

namespace {

struct Layout {
    std::vector<std::size_t> order;  // 0-based source modes in permuted order
    std::size_t row_modes = 1;
};

void check_mode(std::size_t n, std::size_t k, const char* what) {
    if (n == 0 || k < 1 || k > n) {
        throw DimensionError(std::string(what) + ": mode " + std::to_string(k) + " outside 1.." + std::to_string(n));
    }
}

Layout classical_layout(std::size_t n, std::size_t k) {
    check_mode(n, k, "classical unfolding");
    Layout l;
    l.order.push_back(k - 1);
    for (std::size_t q = 0; q < n; ++q)
        if (q != k - 1) l.order.push_back(q);
    return l;
}

Layout mode_layout(std::size_t n, std::size_t k) {
    check_mode(n, k, "mode unfolding");
    Layout l;
    for (std::size_t q = 0; q < n; ++q) l.order.push_back((k - 1 + q) % n);
    return l;
}

Layout kmode_layout(std::size_t n, std::size_t k) {
    check_mode(n, k, "k-mode unfolding");
    Layout l;
    l.order.resize(n);
    std::iota(l.order.begin(), l.order.end(), std::size_t{0});
    l.row_modes = k;
    return l;
}

Layout circular_layout(std::size_t n, std::size_t k, std::size_t d) {
    const std::size_t m = circular_first_mode(n, k, d);
    Layout l;
    for (std::size_t q = 0; q < n; ++q) l.order.push_back((m - 1 + q) % n);
    l.row_modes = d;
    return l;
}

RBMatrix unfold_with(const RBTensor& t, const Layout& l) {
    const bool identity = std::is_sorted(l.order.begin(), l.order.end());
    const RBTensor p = identity ? t : permute(t, l.order);
    std::size_t rows = 1;
    for (std::size_t q = 0; q < l.row_modes; ++q) rows *= p.dim(q);
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(rows == 0 ? 0 : p.size() / rows);
    return {Eigen::Map<const Eigen::MatrixXcd>(p.c1().data(), r, c),
            Eigen::Map<const Eigen::MatrixXcd>(p.c2().data(), r, c)};
}

RBTensor fold_with(const RBMatrix& m, const Layout& l, const Dims& dims) {
    if (l.order.size() != dims.size()) throw DimensionError("fold: dims order mismatch");
    Dims pdims(dims.size());
    for (std::size_t q = 0; q < dims.size(); ++q) pdims[q] = dims[l.order[q]];
    std::size_t rows = 1;
    for (std::size_t q = 0; q < l.row_modes; ++q) rows *= pdims[q];
    const std::size_t total = num_elements(dims);
    if (static_cast<std::size_t>(m.rows()) != rows ||
        static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()) != total) {
        throw DimensionError("fold: matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             " does not match the target dims");
    }
    const auto n = static_cast<Eigen::Index>(total);
    RBTensor p(pdims, Eigen::Map<const Eigen::VectorXcd>(m.c1().data(), n),
               Eigen::Map<const Eigen::VectorXcd>(m.c2().data(), n));
    if (std::is_sorted(l.order.begin(), l.order.end())) return p;
    std::vector<std::size_t> inverse(l.order.size());
    for (std::size_t q = 0; q < l.order.size(); ++q) inverse[l.order[q]] = q;
    return permute(p, inverse);
}

} // namespace

std::size_t circular_first_mode(std::size_t n, std::size_t k, std::size_t d) {
    check_mode(n, k, "circular unfolding");
    if (d < 1 || d + 1 > n) {
        throw DimensionError("circular unfolding: width d=" + std::to_string(d) + " outside 1.." +
                             std::to_string(n == 0 ? 0 : n - 1));
    }
    return d <= k ? k - d + 1 : k - d + 1 + n;
}

RBMatrix unfold_classical(const RBTensor& t, std::size_t k) { return unfold_with(t, classical_layout(t.order(), k)); }
RBMatrix unfold_mode(const RBTensor& t, std::size_t k) { return unfold_with(t, mode_layout(t.order(), k)); }
RBMatrix unfold_kmode(const RBTensor& t, std::size_t k) { return unfold_with(t, kmode_layout(t.order(), k)); }
RBMatrix unfold_circular(const RBTensor& t, std::size_t k, std::size_t d) {
    return unfold_with(t, circular_layout(t.order(), k, d));
}

RBTensor fold_classical(const RBMatrix& m, std::size_t k, const Dims& dims) {
    return fold_with(m, classical_layout(dims.size(), k), dims);
}
RBTensor fold_mode(const RBMatrix& m, std::size_t k, const Dims& dims) {
    return fold_with(m, mode_layout(dims.size(), k), dims);
}
RBTensor fold_kmode(const RBMatrix& m, std::size_t k, const Dims& dims) {
    return fold_with(m, kmode_layout(dims.size(), k), dims);
}
RBTensor fold_circular(const RBMatrix& m, std::size_t k, std::size_t d, const Dims& dims) {
    return fold_with(m, circular_layout(dims.size(), k, d), dims);
}

RBTensor project_mask(const RBTensor& t, const IndexMask& mask, bool keep_observed) {
    if (mask.dims != t.dims() || mask.observed.size() != t.size()) {
        throw DimensionError("project_mask: mask dims do not match tensor");
    }
    RBTensor out = t;
    const std::uint8_t drop = keep_observed ? 0 : 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if ((mask.observed[i] != 0 ? 1 : 0) == drop) {
            const auto l = static_cast<Eigen::Index>(i);
            out.c1()[l] = 0.0;
            out.c2()[l] = 0.0;
        }
    }
    return out;
}

double tensor_frobenius(const RBTensor& t) {
    return std::sqrt(0.5 * (t.c1().squaredNorm() + t.c2().squaredNorm()));
}

} // namespace rbtr
