#pragma once

#include <complex>
#include <vector>

namespace nlslab::fft {

using cplx = std::complex<double>;

// In-place d-dimensional transforms (d = 1, 2) of an n^d row-major array.
// forward is unnormalized; inverse divides by n^d.
void forward(int d, int n, std::vector<cplx>& data);
void inverse(int d, int n, std::vector<cplx>& data);

// Angular wavenumbers 2*pi*m/box in FFT order; index n/2 holds -pi n/box.
std::vector<double> wavenumbers(int n, double box);

}  // namespace nlslab::fft
