#pragma once

#include <complex>

#include "psv/grid.hpp"

namespace psv {

// Unnormalized in-place DFTs on the grid lattice (FFTW behind a plan cache;
// plans use FFTW_ESTIMATE so they are deterministic across runs). forward
// computes sum_m f_m e^{-2 pi i km/N} per axis, backward its conjugate.
void dft_forward(const SpectralGrid& g, std::complex<double>* inout);
void dft_backward(const SpectralGrid& g, std::complex<double>* inout);

} // namespace psv
