#pragma once

#include <Eigen/Core>

#include <memory>

namespace bahadur::detail {

/// Causal FIR filter y[k] = sum_{j=0}^{M} a_j x[k + M - j], k = 0..n-1,
/// evaluated by one real FFT round trip of a fixed length L >= n + M.
///
/// Immutable after construction and safe to apply from several threads;
/// each call allocates its own work arrays.
class FftFilter {
public:
    FftFilter(const Eigen::VectorXd& taps, Eigen::Index outputs);
    ~FftFilter();
    FftFilter(const FftFilter&) = delete;
    FftFilter& operator=(const FftFilter&) = delete;

    Eigen::Index taps() const noexcept { return taps_; }
    Eigen::Index outputs() const noexcept { return outputs_; }
    Eigen::Index transform_length() const noexcept { return length_; }

    /// `input` has outputs() + taps() - 1 entries.
    Eigen::VectorXd apply(const Eigen::VectorXd& input) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Eigen::Index taps_;
    Eigen::Index outputs_;
    Eigen::Index length_;
};

/// Smallest 2^a 3^b 5^c 7^d that is >= n.
Eigen::Index fast_transform_length(Eigen::Index n);

/// Same contract as FftFilter::apply, by direct summation.
Eigen::VectorXd direct_filter(const Eigen::VectorXd& taps, const Eigen::VectorXd& input, Eigen::Index outputs);

}  // namespace bahadur::detail
