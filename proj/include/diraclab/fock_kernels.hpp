#pragma once

// Inner loops over the 2^M occupation basis of the Fock space.
//
// Every kernel exists twice: `serial` is the straightforward scatter-style
// reference kept for testing, `omp` is the gather-style OpenMP version used by
// the library. Both must agree to round-off; see tests/test_kernels.cpp and
// bench/bench_kernels.cpp.

#include <bit>
#include <cstdint>
#include <span>

#include "diraclab/types.hpp"

namespace diraclab::kernels {

using Occupation = std::uint32_t;

/// (-1)^(number of occupied modes with index < mode).
inline double jordan_wigner_sign(Occupation state, int mode) {
  const Occupation below = state & ((Occupation{1} << mode) - 1u);
  return (std::popcount(below) & 1) ? -1.0 : 1.0;
}

inline double parity(Occupation state) { return (std::popcount(state) & 1) ? -1.0 : 1.0; }

namespace serial {

/// out = (sum_j create[j] a_j^dagger + sum_j annihilate[j] a_j) in.
void apply_field(int modes, std::span<const cplx> create, std::span<const cplx> annihilate, std::span<const cplx> in,
                 std::span<cplx> out);

/// Sparse matrix of sum_j create[j] a_j^dagger + sum_j annihilate[j] a_j.
FockMatrix field_matrix(int modes, std::span<const cplx> create, std::span<const cplx> annihilate);

/// Second quantization sum_{jl} one_body(j,l) a_j^dagger a_l.
FockMatrix second_quantize(int modes, const CMatrix& one_body);

/// sum over all index subsets S of det(X[S,S]); the empty minor counts 1.
cplx principal_minor_sum(const CMatrix& x);

}  // namespace serial

namespace omp {

void apply_field(int modes, std::span<const cplx> create, std::span<const cplx> annihilate, std::span<const cplx> in,
                 std::span<cplx> out);
FockMatrix field_matrix(int modes, std::span<const cplx> create, std::span<const cplx> annihilate);
FockMatrix second_quantize(int modes, const CMatrix& one_body);
cplx principal_minor_sum(const CMatrix& x);

}  // namespace omp

}  // namespace diraclab::kernels
