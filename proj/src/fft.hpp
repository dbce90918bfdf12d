#ifndef WAVEMEM_SRC_FFT_HPP
#define WAVEMEM_SRC_FFT_HPP

#include <complex>
#include <vector>

namespace wavemem {

// In-place complex DFT, FFTW sign convention: forward = exp(-2*pi*i*jk/n),
// backward = exp(+2*pi*i*jk/n), both unnormalized. Plan creation is
// serialized internally; execution is concurrent-safe.
void fft_inplace(std::vector<std::complex<double>>& data, bool forward);

std::size_t next_pow2(std::size_t n);

} // namespace wavemem

#endif
