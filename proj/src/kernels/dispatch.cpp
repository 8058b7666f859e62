#include <atomic>
#include <cstdlib>
#include <string>

#include "mba/errors.hpp"
#include "mba/kernels.hpp"

namespace mba::kernels {

namespace {

Isa detect() noexcept {
    if (const char* forced = std::getenv("MBA_KERNELS"); forced != nullptr) {
        if (std::string_view(forced) == "scalar") {
            return Isa::scalar;
        }
    }
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() noexcept {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DimensionError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                             std::to_string(b));
    }
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if MBA_KERNELS_X86
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw ConfigError("kernel variant '" + std::string(isa_name(isa)) +
                          "' is not supported on this CPU");
    }
    active().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
    check_sizes(x.size(), y.size());
#if MBA_KERNELS_X86
    if (active_isa() == Isa::avx2) {
        return avx2::dot(x.data(), y.data(), x.size());
    }
#endif
    return scalar::dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    check_sizes(x.size(), y.size());
#if MBA_KERNELS_X86
    if (active_isa() == Isa::avx2) {
        avx2::axpy(a, x.data(), y.data(), x.size());
        return;
    }
#endif
    scalar::axpy(a, x.data(), y.data(), x.size());
}

}  // namespace mba::kernels
