#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "phase_space_model.hpp"
#include "sampler.hpp"

namespace phasekit {

/// Highest total order of accumulated monomials.
inline constexpr int kMaxMomentOrder = 4;
/// Number of monomials conj^p alpha^q with p+q <= 4.
inline constexpr std::size_t kMonomialCount = 15;

/// Position of conj^p alpha^q in a monomial block, grouped by total order.
constexpr std::size_t monomial_index(int p, int q) {
    const int d = p + q;
    return static_cast<std::size_t>(d * (d + 1) / 2 + p);
}

using MonomialBlock = std::array<Complex, kMonomialCount>;

inline MonomialBlock& operator+=(MonomialBlock& a, const MonomialBlock& b) {
    for (std::size_t k = 0; k < kMonomialCount; ++k) a[k] += b[k];
    return a;
}

inline MonomialBlock monomials(Complex alpha_bar, Complex alpha) {
    std::array<Complex, kMaxMomentOrder + 1> bp, ap;
    bp[0] = ap[0] = 1.0;
    for (int k = 1; k <= kMaxMomentOrder; ++k) {
        bp[k] = bp[k - 1] * alpha_bar;
        ap[k] = ap[k - 1] * alpha;
    }
    MonomialBlock m{};
    for (int d = 0; d <= kMaxMomentOrder; ++d)
        for (int p = 0; p <= d; ++p) m[monomial_index(p, d - p)] = bp[p] * ap[d - p];
    return m;
}

/// Streaming pairwise summation: item n is folded into a binary tree of
/// partial sums, so rounding grows like log(n) instead of n.
class PairwiseBlockSum {
public:
    void add(const MonomialBlock& x) {
        MonomialBlock carry = x;
        std::size_t n = items_;
        std::size_t level = 0;
        while (n & 1u) {
            carry += levels_[level];
            n >>= 1;
            ++level;
        }
        if (levels_.size() <= level) levels_.resize(level + 1);
        levels_[level] = carry;
        ++items_;
    }

    MonomialBlock total() const {
        MonomialBlock sum{};
        std::size_t n = items_;
        for (std::size_t level = 0; n != 0; ++level, n >>= 1)
            if (n & 1u) sum += levels_[level];
        return sum;
    }

    std::size_t items() const noexcept { return items_; }

private:
    std::vector<MonomialBlock> levels_;
    std::size_t items_ = 0;
};

/// Sums of monomials for one batch of trajectories.
class BatchMoments {
public:
    void add(Complex alpha_bar, Complex alpha) {
        sum_.add(monomials(alpha_bar, alpha));
        ++paths_;
    }

    /// Adds another batch's totals; the merged tree treats them as one item.
    void merge(const BatchMoments& other) {
        if (other.paths_ == 0 && other.diverged_ == 0) return;
        sum_.add(other.sums());
        paths_ += other.paths_;
        diverged_ += other.diverged_;
    }

    void mark_diverged(std::size_t n = 1) { diverged_ += n; }

    MonomialBlock sums() const { return sum_.total(); }
    std::size_t paths() const noexcept { return paths_; }
    std::size_t diverged() const noexcept { return diverged_; }

private:
    PairwiseBlockSum sum_;
    std::size_t paths_ = 0;
    std::size_t diverged_ = 0;
};

/// Per-batch monomial statistics at one output time.
class MomentAccumulator {
public:
    MomentAccumulator(Representation rep, std::size_t batches) : rep_(rep), batches_(batches) {
        if (batches == 0) throw std::invalid_argument("accumulator needs at least one batch");
    }

    Representation representation() const noexcept { return rep_; }
    std::size_t batch_count() const noexcept { return batches_.size(); }
    const BatchMoments& batch(std::size_t b) const { return batches_.at(b); }
    BatchMoments& batch(std::size_t b) { return batches_.at(b); }

    void accumulate(const PhaseState& state, std::size_t batch) {
        batches_.at(batch).add(state.alpha_bar, state.alpha);
    }

    /// Batch-wise merge; layouts must match.
    void merge(const MomentAccumulator& other) {
        if (other.rep_ != rep_ || other.batch_count() != batch_count())
            throw std::invalid_argument("cannot merge accumulators with different layouts");
        for (std::size_t b = 0; b < batches_.size(); ++b) batches_[b].merge(other.batches_[b]);
    }

    /// Concatenates the other accumulator's batches after this one's.
    void append(const MomentAccumulator& other) {
        if (other.rep_ != rep_) throw std::invalid_argument("cannot append accumulators of different representations");
        batches_.insert(batches_.end(), other.batches_.begin(), other.batches_.end());
    }

    std::size_t total_paths() const {
        return std::accumulate(batches_.begin(), batches_.end(), std::size_t{0},
                               [](std::size_t s, const BatchMoments& b) { return s + b.paths(); });
    }

    std::size_t total_diverged() const {
        return std::accumulate(batches_.begin(), batches_.end(), std::size_t{0},
                               [](std::size_t s, const BatchMoments& b) { return s + b.diverged(); });
    }

    /// Ensemble-wide sums.
    BatchMoments pooled() const {
        BatchMoments all;
        for (const auto& b : batches_) all.merge(b);
        return all;
    }

private:
    Representation rep_;
    std::vector<BatchMoments> batches_;
};

struct QuadratureSpec {
    double theta = 0.0;

    /// theta = 2 tau, the frame used for the benchmark cumulants.
    static QuadratureSpec rotating(double tau) { return {2.0 * tau}; }
};

/// <X^k> for k = 1..4 (index k-1).
struct MomentVector {
    std::array<double, 4> m{};

    double operator[](int k) const { return m[static_cast<std::size_t>(k - 1)]; }
};

struct CumulantReport {
    double k3 = 0.0;
    double k4 = 0.0;
    double k3_sigma = 0.0;
    double k4_sigma = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_diverged = 0;
};

namespace detail {

/// Averages of (e^{-i theta} alpha + e^{i theta} conj)^k, k = 1..4, from monomial means.
inline std::array<Complex, 4> quadrature_power_means(const MonomialBlock& sums, std::size_t count, double theta) {
    std::array<Complex, 4> out{};
    if (count == 0) return out;
    const double inv = 1.0 / static_cast<double>(count);
    for (int k = 1; k <= 4; ++k) {
        Complex acc{};
        for (int j = 0; j <= k; ++j) {
            // j factors of e^{i theta} conj, k-j factors of e^{-i theta} alpha
            const Complex phase = std::polar(1.0, theta * (2 * j - k));
            acc += binomial(k, j) * phase * sums[monomial_index(j, k - j)];
        }
        out[static_cast<std::size_t>(k - 1)] = acc * inv;
    }
    return out;
}

/// Symmetric-ordered quadrature moments from normally ordered ones:
/// X^2 = :X^2: + 1, X^3 = :X^3: + 3:X:, X^4 = :X^4: + 6:X^2: + 3.
template <class T>
std::array<T, 4> assemble_from_normal(const std::array<T, 4>& n) {
    return {n[0], n[1] + T(1.0), n[2] + T(3.0) * n[0], n[3] + T(6.0) * n[1] + T(3.0)};
}

inline std::array<Complex, 4> batch_true_moments(Representation rep, const MonomialBlock& sums, std::size_t count,
                                                 double theta) {
    auto raw = quadrature_power_means(sums, count, theta);
    return rep == Representation::wigner ? raw : assemble_from_normal(raw);
}

inline MomentVector real_part(const std::array<Complex, 4>& c) {
    MomentVector v;
    for (std::size_t k = 0; k < 4; ++k) v.m[k] = c[k].real();
    return v;
}

/// Mean and standard error std/sqrt(n) of a sample, shifted by the first value.
struct MeanError {
    double mean = 0.0;
    double error = 0.0;
};

inline MeanError mean_and_error(const std::vector<double>& xs) {
    MeanError r;
    if (xs.empty()) return r;
    const double n = static_cast<double>(xs.size());
    const double shift = xs.front();
    double s = 0.0;
    for (double x : xs) s += x - shift;
    const double dmean = s / n;
    r.mean = shift + dmean;
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - shift - dmean) * (x - shift - dmean);
    r.error = std::sqrt(ss / (n - 1.0) / n);
    return r;
}

}  // namespace detail

/// Wigner averages are symmetric-ordered: quadrature powers are used directly.
inline MomentVector quadrature_moments_wigner(const MomentAccumulator& acc, const QuadratureSpec& spec) {
    if (acc.representation() != Representation::wigner)
        throw std::invalid_argument("quadrature_moments_wigner needs a Wigner accumulator");
    const BatchMoments all = acc.pooled();
    return detail::real_part(detail::batch_true_moments(Representation::wigner, all.sums(), all.paths(), spec.theta));
}

/// Imaginary residues of the assembled positive-P moments and their batch errors.
struct OrderingResidue {
    std::array<double, 4> residue{};
    std::array<double, 4> sigma{};
};

inline OrderingResidue positive_p_ordering_residue(const MomentAccumulator& acc, const QuadratureSpec& spec) {
    OrderingResidue r;
    const BatchMoments all = acc.pooled();
    const auto total = detail::batch_true_moments(Representation::positive_p, all.sums(), all.paths(), spec.theta);
    for (std::size_t k = 0; k < 4; ++k) r.residue[k] = total[k].imag();

    std::array<std::vector<double>, 4> per_batch;
    for (std::size_t b = 0; b < acc.batch_count(); ++b) {
        const auto& bm = acc.batch(b);
        if (bm.paths() == 0) continue;
        const auto m = detail::batch_true_moments(Representation::positive_p, bm.sums(), bm.paths(), spec.theta);
        for (std::size_t k = 0; k < 4; ++k) per_batch[k].push_back(m[k].imag());
    }
    for (std::size_t k = 0; k < 4; ++k) r.sigma[k] = detail::mean_and_error(per_batch[k]).error;
    return r;
}

/// Positive-P averages are normally ordered; true moments are assembled with
/// the constants {1; 3; 6, 3}. Throws OrderingViolation if an imaginary
/// residue exceeds five batch standard errors.
inline MomentVector quadrature_moments_positive_p(const MomentAccumulator& acc, const QuadratureSpec& spec) {
    if (acc.representation() != Representation::positive_p)
        throw std::invalid_argument("quadrature_moments_positive_p needs a positive-P accumulator");
    const BatchMoments all = acc.pooled();
    const auto total = detail::batch_true_moments(Representation::positive_p, all.sums(), all.paths(), spec.theta);
    const OrderingResidue r = positive_p_ordering_residue(acc, spec);
    for (std::size_t k = 0; k < 4; ++k) {
        const double slack = 1e-9 * (1.0 + std::abs(total[k]));
        if (std::abs(r.residue[k]) > 5.0 * r.sigma[k] + slack)
            throw OrderingViolation("imaginary residue of <X^" + std::to_string(k + 1) + "> is " +
                                    std::to_string(r.residue[k]) + " against batch sigma " +
                                    std::to_string(r.sigma[k]));
    }
    return detail::real_part(total);
}

/// k3 = <X^3> - 3<X><X^2> + 2<X>^3,
/// k4 = <X^4> + 2<X>^4 - 3<X^2>^2 - 4<X> k3.
inline CumulantReport cumulants(const MomentVector& m) {
    CumulantReport r;
    const double x1 = m[1], x2 = m[2], x3 = m[3], x4 = m[4];
    r.k3 = x3 - 3.0 * x1 * x2 + 2.0 * x1 * x1 * x1;
    r.k4 = x4 + 2.0 * x1 * x1 * x1 * x1 - 3.0 * x2 * x2 - 4.0 * x1 * r.k3;
    return r;
}

inline constexpr std::size_t kMinBatches = 10;

/// Cumulants of the pooled ensemble with batch standard errors std/sqrt(B).
///
/// The estimate comes from the pooled moments: the per-batch plug-in
/// estimator of k4 is biased by about -12 Var(X)^2 / (paths per batch), which
/// averaging over batches does not remove. The error bar is the spread of the
/// per-batch cumulants. Empty batches (all paths diverged) are skipped.
inline CumulantReport batch_error(const MomentAccumulator& acc, const QuadratureSpec& spec) {
    if (acc.batch_count() < kMinBatches)
        throw InsufficientBatches("batch error needs at least " + std::to_string(kMinBatches) + " batches, got " +
                                  std::to_string(acc.batch_count()));
    std::vector<double> k3s, k4s;
    for (std::size_t b = 0; b < acc.batch_count(); ++b) {
        const auto& bm = acc.batch(b);
        if (bm.paths() == 0) continue;
        const auto m = detail::real_part(
            detail::batch_true_moments(acc.representation(), bm.sums(), bm.paths(), spec.theta));
        const CumulantReport c = cumulants(m);
        k3s.push_back(c.k3);
        k4s.push_back(c.k4);
    }
    if (k3s.size() < kMinBatches)
        throw InsufficientBatches("only " + std::to_string(k3s.size()) + " non-empty batches");
    const BatchMoments all = acc.pooled();
    CumulantReport r = cumulants(
        detail::real_part(detail::batch_true_moments(acc.representation(), all.sums(), all.paths(), spec.theta)));
    r.k3_sigma = detail::mean_and_error(k3s).error;
    r.k4_sigma = detail::mean_and_error(k4s).error;
    r.n_paths = acc.total_paths();
    r.n_diverged = acc.total_diverged();
    return r;
}

}  // namespace phasekit
