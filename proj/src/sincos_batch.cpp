// Compiled with -ffast-math (see src/CMakeLists.txt) so the loop lowers to
// the glibc vector math library; a plain `#pragma omp simd` is not enough
// for libm calls. Nothing in here reorders sums, so fast-math only relaxes
// the sin/cos error bound by a few ulp.
#include <cmath>
#include <cstddef>

namespace quenchmap::kernels {

void sincos_batch(const double* angles, double* cos_out, double* sin_out, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
        cos_out[k] = std::cos(angles[k]);
        sin_out[k] = std::sin(angles[k]);
    }
}

} // namespace quenchmap::kernels
