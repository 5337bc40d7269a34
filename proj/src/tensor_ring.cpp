#include "rbtr/tensor_ring.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rbtr/errors.hpp"
#include "rbtr/rb_matrix.hpp"
#include "rbtr/tensor_io.hpp"

namespace rbtr {

TRCores::TRCores(std::vector<RBTensor> cores) : cores_(std::move(cores)) {
    const std::size_t n = cores_.size();
    if (n < 2) throw DimensionError("TRCores: need at least two cores");
    ranks_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (cores_[k].order() != 3) throw DimensionError("TRCores: core " + std::to_string(k + 1) + " is not third order");
        ranks_[k] = cores_[k].dim(0);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (cores_[k].dim(2) != ranks_[(k + 1) % n]) {
            throw DimensionError("TRCores: core " + std::to_string(k + 1) + " trailing rank does not chain");
        }
    }
}

Dims TRCores::dims() const {
    Dims d;
    for (const auto& c : cores_) d.push_back(c.dim(1));
    return d;
}

RBMatrix TRCores::slice(std::size_t k0, std::size_t i) const {
    const RBTensor& c = cores_.at(k0);
    const auto r0 = static_cast<Eigen::Index>(c.dim(0));
    const auto len = static_cast<Eigen::Index>(c.dim(1));
    const auto r1 = static_cast<Eigen::Index>(c.dim(2));
    if (i >= c.dim(1)) throw DimensionError("TRCores::slice: index out of range");
    const auto off = static_cast<Eigen::Index>(i) * r0;
    using Strided = Eigen::Map<const Eigen::MatrixXcd, 0, Eigen::OuterStride<>>;
    return {Strided(c.c1().data() + off, r0, r1, Eigen::OuterStride<>(r0 * len)),
            Strided(c.c2().data() + off, r0, r1, Eigen::OuterStride<>(r0 * len))};
}

TRCores rotate_cores(const TRCores& cores, std::size_t shift) {
    const std::size_t n = cores.order();
    std::vector<RBTensor> out;
    for (std::size_t q = 0; q < n; ++q) out.push_back(cores.core((shift + q) % n));
    return TRCores(std::move(out));
}

RBScalar tr_element(const TRCores& cores, std::span<const std::size_t> idx) {
    if (idx.size() != cores.order()) throw DimensionError("tr_element: index order mismatch");
    RBMatrix prod = cores.slice(0, idx[0]);
    for (std::size_t k = 1; k < cores.order(); ++k) prod = matmul(prod, cores.slice(k, idx[k]));
    return trace(prod);
}

namespace {

// Merges cores first..last (0-based, inclusive) into r_first x (I_first...I_last) x r_{last+1}.
// With the subchain viewed as an (r_first * M) x r matrix and the next core as an
// r x (I * r') matrix, their product's column-major data is the grown subchain.
RBTensor merge_range(const TRCores& cores, std::size_t first, std::size_t last) {
    RBTensor acc = cores.core(first);
    const auto lead = static_cast<Eigen::Index>(acc.dim(0));
    Eigen::Index middle = static_cast<Eigen::Index>(acc.dim(1));
    for (std::size_t k = first + 1; k <= last; ++k) {
        const RBTensor& z = cores.core(k);
        const auto r = static_cast<Eigen::Index>(z.dim(0));
        const auto len = static_cast<Eigen::Index>(z.dim(1));
        const auto r_next = static_cast<Eigen::Index>(z.dim(2));
        const Eigen::Index rows = lead * middle;
        Eigen::VectorXcd c1(rows * len * r_next), c2(rows * len * r_next);
        Eigen::Map<Eigen::MatrixXcd>(c1.data(), rows, len * r_next).noalias() =
            Eigen::Map<const Eigen::MatrixXcd>(acc.c1().data(), rows, r) *
            Eigen::Map<const Eigen::MatrixXcd>(z.c1().data(), r, len * r_next);
        Eigen::Map<Eigen::MatrixXcd>(c2.data(), rows, len * r_next).noalias() =
            Eigen::Map<const Eigen::MatrixXcd>(acc.c2().data(), rows, r) *
            Eigen::Map<const Eigen::MatrixXcd>(z.c2().data(), r, len * r_next);
        middle *= len;
        acc = RBTensor({static_cast<std::size_t>(lead), static_cast<std::size_t>(middle),
                        static_cast<std::size_t>(r_next)},
                       std::move(c1), std::move(c2));
    }
    return acc;
}

void check_split(const TRCores& cores, std::size_t k, const char* what) {
    if (k < 1 || k + 1 > cores.order()) {
        throw DimensionError(std::string(what) + ": k=" + std::to_string(k) + " outside 1.." +
                             std::to_string(cores.order() - 1));
    }
}

// Closes the ring: T(m, i) = sum_{a,b} S(a, m, b) Z_N(b, i, a) for one channel.
Eigen::MatrixXcd close_ring(const Eigen::VectorXcd& s, const Eigen::VectorXcd& z, Eigen::Index r1, Eigen::Index m,
                            Eigen::Index rn, Eigen::Index len) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, len);
    using Strided = Eigen::Map<const Eigen::MatrixXcd, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    for (Eigen::Index a = 0; a < r1; ++a) {
        Strided sa(s.data() + a, m, rn, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(r1 * m, r1));
        Eigen::Map<const Eigen::MatrixXcd> za(z.data() + a * rn * len, rn, len);
        out.noalias() += sa * za;
    }
    return out;
}

struct Truncated {
    RBMatrix u;       // rows x rank
    RBMatrix sv;      // rank x cols, diag(sigma) V^H
    std::size_t rank;
};

Truncated truncated_rbsvd(const RBMatrix& m, double delta) {
    RBSvdResult s = rbsvd(m);
    const Eigen::VectorXd mod2 = s.moduli().array().square().matrix();
    const auto full = static_cast<std::size_t>(mod2.size());
    // smallest rank whose discarded tail has energy <= delta^2
    std::size_t rank = full;
    double tail = 0.0;
    while (rank > 1) {
        const double next = tail + mod2[static_cast<Eigen::Index>(rank - 1)];
        if (next > delta * delta) break;
        tail = next;
        --rank;
    }
    const auto r = static_cast<Eigen::Index>(rank);
    Eigen::MatrixXcd sv1 = s.sigma1.head(r).cast<cplx>().asDiagonal() * s.V.c1().leftCols(r).adjoint();
    Eigen::MatrixXcd sv2 = s.sigma2.head(r).cast<cplx>().asDiagonal() * s.V.c2().leftCols(r).adjoint();
    return {RBMatrix(s.U.c1().leftCols(r), s.U.c2().leftCols(r)), RBMatrix(std::move(sv1), std::move(sv2)), rank};
}

RBTensor as_tensor(const RBMatrix& m, Dims dims) {
    const auto n = m.rows() * m.cols();
    return {std::move(dims), Eigen::Map<const Eigen::VectorXcd>(m.c1().data(), n),
            Eigen::Map<const Eigen::VectorXcd>(m.c2().data(), n)};
}

RBMatrix as_matrix(const RBTensor& t, Eigen::Index rows) {
    const auto cols = static_cast<Eigen::Index>(t.size()) / rows;
    return {Eigen::Map<const Eigen::MatrixXcd>(t.c1().data(), rows, cols),
            Eigen::Map<const Eigen::MatrixXcd>(t.c2().data(), rows, cols)};
}

} // namespace

RBTensor tr_reconstruct(const TRCores& cores) {
    const std::size_t n = cores.order();
    const RBTensor s = merge_range(cores, 0, n - 2);
    const RBTensor& zn = cores.core(n - 1);
    const auto r1 = static_cast<Eigen::Index>(s.dim(0));
    const auto m = static_cast<Eigen::Index>(s.dim(1));
    const auto rn = static_cast<Eigen::Index>(s.dim(2));
    const auto len = static_cast<Eigen::Index>(zn.dim(1));
    Eigen::MatrixXcd t1 = close_ring(s.c1(), zn.c1(), r1, m, rn, len);
    Eigen::MatrixXcd t2 = close_ring(s.c2(), zn.c2(), r1, m, rn, len);
    const auto total = m * len;
    return {cores.dims(), Eigen::Map<const Eigen::VectorXcd>(t1.data(), total),
            Eigen::Map<const Eigen::VectorXcd>(t2.data(), total)};
}

RBTensor subchain_le(const TRCores& cores, std::size_t k) {
    check_split(cores, k, "subchain_le");
    return merge_range(cores, 0, k - 1);
}

RBTensor subchain_gt(const TRCores& cores, std::size_t k) {
    check_split(cores, k, "subchain_gt");
    return merge_range(cores, k, cores.order() - 1);
}

std::pair<std::size_t, std::size_t> split_rank(std::size_t rank) {
    if (rank == 0) return {1, 1};
    auto r1 = static_cast<std::size_t>(std::sqrt(static_cast<double>(rank)));
    while (r1 * r1 > rank) --r1;
    while ((r1 + 1) * (r1 + 1) <= rank) ++r1;
    while (rank % r1 != 0) --r1;
    return {r1, rank / r1};
}

TRCores rbtr_svd(const RBTensor& t, double eps) {
    const std::size_t n = t.order();
    if (n < 2) throw DimensionError("rbtr_svd: tensor order must be at least 2");
    if (!(eps > 0.0)) throw std::invalid_argument("rbtr_svd: eps must be positive");
    const Dims& dims = t.dims();

    const double scale = eps * tensor_frobenius(t) / std::sqrt(static_cast<double>(n));
    const double delta_first = std::sqrt(2.0) * scale;

    std::vector<RBTensor> cores(n);

    // First core from the 1-mode unfolding, rank split as r1 * r2.
    Truncated first = truncated_rbsvd(unfold_kmode(t, 1), delta_first);
    const auto [r1, r2] = split_rank(first.rank);
    const std::size_t rest = t.size() / dims[0];
    {
        const RBTensor u = as_tensor(first.u, {dims[0], r1, r2});
        const std::size_t order[] = {1, 0, 2};
        cores[0] = permute(u, order);
    }
    RBTensor remainder;
    {
        const RBTensor w = as_tensor(first.sv, {r1, r2, rest});
        const std::size_t order[] = {1, 2, 0};
        remainder = permute(w, order);  // r2 x (I_2 ... I_N) x r1
    }

    std::size_t r_cur = r2;
    std::size_t tail = rest;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        tail /= dims[k];
        const RBMatrix m = as_matrix(remainder, static_cast<Eigen::Index>(r_cur * dims[k]));
        Truncated step = truncated_rbsvd(m, scale);
        cores[k] = as_tensor(step.u, {r_cur, dims[k], step.rank});
        remainder = as_tensor(step.sv, {step.rank, tail, r1});
        r_cur = step.rank;
    }
    cores[n - 1] = reshape(remainder, {r_cur, dims[n - 1], r1});
    return TRCores(std::move(cores));
}

std::size_t storage_cost(const TRCores& cores) {
    std::size_t s = 0;
    for (const auto& c : cores.cores()) s += c.size();
    return s;
}

double compression_ratio(const TRCores& cores, std::span<const std::size_t> original_dims) {
    return static_cast<double>(num_elements(original_dims)) / static_cast<double>(storage_cost(cores));
}

void save_cores(const std::filesystem::path& dir, const TRCores& cores, double eps) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < cores.order(); ++k) {
        save_rbt(dir / ("core_" + std::to_string(k + 1) + ".rbt"), cores.core(k));
    }
    nlohmann::ordered_json j;
    j["ranks"] = cores.ranks();
    j["dims"] = cores.dims();
    j["eps"] = eps;
    write_text_atomic(dir / "cores.json", j.dump(2) + "\n");
}

TRCores load_cores(const std::filesystem::path& dir) {
    std::ifstream in(dir / "cores.json");
    if (!in) throw IoError("cannot open " + (dir / "cores.json").string());
    std::vector<std::size_t> ranks;
    Dims dims;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        ranks = j.at("ranks").get<std::vector<std::size_t>>();
        dims = j.at("dims").get<Dims>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed cores.json: ") + e.what());
    }
    std::vector<RBTensor> cores;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        cores.push_back(load_rbt(dir / ("core_" + std::to_string(k + 1) + ".rbt")));
    }
    TRCores out(std::move(cores));
    if (out.ranks() != ranks || out.dims() != dims) {
        throw IoError("cores.json disagrees with the stored cores");
    }
    return out;
}

} // namespace rbtr
