#include "fft_convolution.hpp"

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>

namespace bahadur::detail {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void ensure_thread_safe_planner() {
    static std::once_flag flag;
    std::call_once(flag, [] { fftw_make_planner_thread_safe(); });
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(Eigen::Index count) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * static_cast<std::size_t>(count)));
    if (p == nullptr) throw std::bad_alloc();
    return std::unique_ptr<T[], FftwFree>(p);
}

}  // namespace

Eigen::Index fast_transform_length(Eigen::Index n) {
    Eigen::Index best = Eigen::Index{1};
    while (best < n) best *= 2;
    for (Eigen::Index p7 = 1; p7 < best; p7 *= 7)
        for (Eigen::Index p5 = p7; p5 < best; p5 *= 5)
            for (Eigen::Index p3 = p5; p3 < best; p3 *= 3) {
                Eigen::Index v = p3;
                while (v < n) v *= 2;
                if (v < best) best = v;
            }
    return best;
}

struct FftFilter::Impl {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    std::unique_ptr<fftw_complex[], FftwFree> spectrum;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

FftFilter::FftFilter(const Eigen::VectorXd& taps, Eigen::Index outputs)
    : impl_(std::make_unique<Impl>()), taps_(taps.size()), outputs_(outputs) {
    if (taps_ < 1 || outputs_ < 1) throw std::invalid_argument("FftFilter: empty filter or output");
    ensure_thread_safe_planner();
    length_ = fast_transform_length(outputs_ + taps_ - 1);
    const Eigen::Index bins = length_ / 2 + 1;

    auto real = fftw_buffer<double>(length_);
    impl_->spectrum = fftw_buffer<fftw_complex>(bins);
    {
        std::lock_guard lock(planner_mutex());
        const int n = static_cast<int>(length_);
        impl_->forward = fftw_plan_dft_r2c_1d(n, real.get(), impl_->spectrum.get(), FFTW_ESTIMATE);
        impl_->inverse = fftw_plan_dft_c2r_1d(n, impl_->spectrum.get(), real.get(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    }
    if (!impl_->forward || !impl_->inverse) throw std::runtime_error("FftFilter: FFTW planning failed");

    for (Eigen::Index i = 0; i < length_; ++i) real[i] = i < taps_ ? taps[i] : 0.0;
    fftw_execute_dft_r2c(impl_->forward, real.get(), impl_->spectrum.get());
}

FftFilter::~FftFilter() = default;

Eigen::VectorXd FftFilter::apply(const Eigen::VectorXd& input) const {
    const Eigen::Index needed = outputs_ + taps_ - 1;
    if (input.size() != needed) throw std::invalid_argument("FftFilter::apply: input length mismatch");
    const Eigen::Index bins = length_ / 2 + 1;
    auto real = fftw_buffer<double>(length_);
    auto freq = fftw_buffer<fftw_complex>(bins);
    for (Eigen::Index i = 0; i < needed; ++i) real[i] = input[i];
    for (Eigen::Index i = needed; i < length_; ++i) real[i] = 0.0;

    fftw_execute_dft_r2c(impl_->forward, real.get(), freq.get());
    const fftw_complex* h = impl_->spectrum.get();
    for (Eigen::Index k = 0; k < bins; ++k) {
        const double re = freq[k][0] * h[k][0] - freq[k][1] * h[k][1];
        const double im = freq[k][0] * h[k][1] + freq[k][1] * h[k][0];
        freq[k][0] = re;
        freq[k][1] = im;
    }
    fftw_execute_dft_c2r(impl_->inverse, freq.get(), real.get());

    // Outputs at circular indices M..M+n-1 see no wrap-around since L >= n + M.
    const double scale = 1.0 / static_cast<double>(length_);
    Eigen::VectorXd out(outputs_);
    for (Eigen::Index k = 0; k < outputs_; ++k) out[k] = real[k + taps_ - 1] * scale;
    return out;
}

Eigen::VectorXd direct_filter(const Eigen::VectorXd& taps, const Eigen::VectorXd& input, Eigen::Index outputs) {
    const Eigen::Index m = taps.size() - 1;
    if (input.size() != outputs + m) throw std::invalid_argument("direct_filter: input length mismatch");
    Eigen::VectorXd out(outputs);
    for (Eigen::Index k = 0; k < outputs; ++k) {
        // Reverse-ordered dot product of taps with the window ending at k + m.
        out[k] = taps.dot(input.segment(k, m + 1).reverse());
    }
    return out;
}

}  // namespace bahadur::detail
