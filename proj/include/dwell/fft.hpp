#ifndef DWELL_FFT_HPP
#define DWELL_FFT_HPP

// Thin RAII layer over FFTW. Plans are built with FFTW_ESTIMATE so the chosen
// algorithm, and therefore every rounding, is the same on every run.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <stdexcept>
#include <vector>

namespace dwell {

using complex = std::complex<double>;

template <class T>
struct FftwAllocator
{
    using value_type = T;

    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept
    {
    }

    T* allocate(std::size_t n)
    {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p) {
            throw std::bad_alloc();
        }
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept
    {
        return true;
    }
};

/// SIMD-aligned complex storage usable with new-array fftw_execute_dft.
using ComplexBuffer = std::vector<complex, FftwAllocator<complex>>;

namespace detail {
inline std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

inline fftw_complex* as_fftw(complex* p) { return reinterpret_cast<fftw_complex*>(p); }
} // namespace detail

/// Forward/backward in-place complex transform pair of fixed shape.
/// Unnormalized: backward(forward(x)) == size() * x.
class FftPlan
{
public:
    /// One-dimensional transform of length n.
    explicit FftPlan(std::size_t n) : FftPlan(std::vector<int>{static_cast<int>(n)}) {}

    /// Row-major 2-D transform, last dimension fastest.
    FftPlan(std::size_t n1, std::size_t n2)
        : FftPlan(std::vector<int>{static_cast<int>(n1), static_cast<int>(n2)})
    {
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    FftPlan(FftPlan&& o) noexcept : size_(o.size_), forward_(o.forward_), backward_(o.backward_)
    {
        o.forward_ = nullptr;
        o.backward_ = nullptr;
    }

    ~FftPlan()
    {
        std::lock_guard lock(detail::planner_mutex());
        if (forward_) {
            fftw_destroy_plan(forward_);
        }
        if (backward_) {
            fftw_destroy_plan(backward_);
        }
    }

    std::size_t size() const { return size_; }

    void forward(ComplexBuffer& data) const { execute(forward_, data); }
    void backward(ComplexBuffer& data) const { execute(backward_, data); }

private:
    explicit FftPlan(std::vector<int> dims)
    {
        size_ = 1;
        for (int d : dims) {
            if (d <= 0) {
                throw std::invalid_argument("FftPlan: dimensions must be positive");
            }
            size_ *= static_cast<std::size_t>(d);
        }
        ComplexBuffer scratch(size_);
        auto* p = detail::as_fftw(scratch.data());
        std::lock_guard lock(detail::planner_mutex());
        const int rank = static_cast<int>(dims.size());
        forward_ = fftw_plan_dft(rank, dims.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft(rank, dims.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!forward_ || !backward_) {
            throw std::runtime_error("FftPlan: FFTW planning failed");
        }
    }

    void execute(fftw_plan plan, ComplexBuffer& data) const
    {
        if (data.size() != size_) {
            throw std::invalid_argument("FftPlan: buffer size does not match plan");
        }
        auto* p = detail::as_fftw(data.data());
        fftw_execute_dft(plan, p, p);
    }

    std::size_t size_ = 0;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

} // namespace dwell

#endif // DWELL_FFT_HPP
