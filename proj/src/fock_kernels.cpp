#include "diraclab/fock_kernels.hpp"

#include <algorithm>
#include <utility>
#include <vector>


namespace diraclab::kernels {
namespace {

void check_sizes(int modes, std::span<const cplx> create, std::span<const cplx> annihilate) {
  if (modes < 0 || modes > 24) throw Error(ErrorCode::too_large, "fock kernel: mode count out of range");
  if (create.size() != static_cast<std::size_t>(modes) || annihilate.size() != static_cast<std::size_t>(modes)) {
    throw Error(ErrorCode::shape, "fock kernel: coefficient length must equal mode count");
  }
}

cplx minor_determinant(const CMatrix& x, std::uint64_t subset) {
  const int k = std::popcount(subset);
  if (k == 0) return 1.0;
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t m = subset; m != 0; m &= m - 1) idx.push_back(std::countr_zero(m));
  CMatrix sub(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) sub(r, c) = x(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  }
  return sub.partialPivLu().determinant();
}

void check_minor_input(const CMatrix& x) {
  if (x.rows() != x.cols()) throw Error(ErrorCode::shape, "principal_minor_sum: matrix is not square");
  if (x.rows() > 24) throw Error(ErrorCode::too_large, "principal_minor_sum: at most 24 rows");
}

}  // namespace

// ---------------------------------------------------------------------------
// Serial reference: scatter each input amplitude to the states it reaches.

namespace serial {

void apply_field(int modes, std::span<const cplx> create, std::span<const cplx> annihilate, std::span<const cplx> in,
                 std::span<cplx> out) {
  check_sizes(modes, create, annihilate);
  const std::size_t dim = std::size_t{1} << modes;
  if (in.size() != dim || out.size() != dim) throw Error(ErrorCode::shape, "apply_field: vector length must be 2^modes");
  std::fill(out.begin(), out.end(), cplx{0.0});
  for (std::size_t b = 0; b < dim; ++b) {
    const cplx amp = in[b];
    if (amp == 0.0) continue;
    const auto state = static_cast<Occupation>(b);
    for (int j = 0; j < modes; ++j) {
      const Occupation bit = Occupation{1} << j;
      const double sign = jordan_wigner_sign(state, j);
      if (state & bit) {
        out[state ^ bit] += sign * annihilate[static_cast<std::size_t>(j)] * amp;
      } else {
        out[state | bit] += sign * create[static_cast<std::size_t>(j)] * amp;
      }
    }
  }
}

FockMatrix field_matrix(int modes, std::span<const cplx> create, std::span<const cplx> annihilate) {
  check_sizes(modes, create, annihilate);
  const std::size_t dim = std::size_t{1} << modes;
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(dim * static_cast<std::size_t>(modes));
  for (std::size_t b = 0; b < dim; ++b) {
    const auto state = static_cast<Occupation>(b);
    for (int j = 0; j < modes; ++j) {
      const Occupation bit = Occupation{1} << j;
      const double sign = jordan_wigner_sign(state, j);
      const auto col = static_cast<Eigen::Index>(b);
      if (state & bit) {
        triplets.emplace_back(static_cast<Eigen::Index>(state ^ bit), col, sign * annihilate[static_cast<std::size_t>(j)]);
      } else {
        triplets.emplace_back(static_cast<Eigen::Index>(state | bit), col, sign * create[static_cast<std::size_t>(j)]);
      }
    }
  }
  FockMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

FockMatrix second_quantize(int modes, const CMatrix& one_body) {
  if (one_body.rows() != modes || one_body.cols() != modes) throw Error(ErrorCode::shape, "second_quantize: shape mismatch");
  if (modes > 24) throw Error(ErrorCode::too_large, "second_quantize: mode count out of range");
  const std::size_t dim = std::size_t{1} << modes;
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (std::size_t b = 0; b < dim; ++b) {
    const auto state = static_cast<Occupation>(b);
    for (int l = 0; l < modes; ++l) {
      const Occupation lbit = Occupation{1} << l;
      if (!(state & lbit)) continue;
      const double s1 = jordan_wigner_sign(state, l);
      const Occupation mid = state ^ lbit;
      for (int j = 0; j < modes; ++j) {
        const Occupation jbit = Occupation{1} << j;
        if (mid & jbit) continue;
        const cplx v = one_body(j, l);
        if (v == 0.0) continue;
        const double s2 = jordan_wigner_sign(mid, j);
        triplets.emplace_back(static_cast<Eigen::Index>(mid | jbit), static_cast<Eigen::Index>(b), s1 * s2 * v);
      }
    }
  }
  FockMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

cplx principal_minor_sum(const CMatrix& x) {
  check_minor_input(x);
  const std::uint64_t count = std::uint64_t{1} << x.rows();
  cplx acc = 0.0;
  for (std::uint64_t s = 0; s < count; ++s) acc += minor_determinant(x, s);
  return acc;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP versions: each output entry (or column) is owned by one iteration.

namespace omp {

void apply_field(int modes, std::span<const cplx> create, std::span<const cplx> annihilate, std::span<const cplx> in,
                 std::span<cplx> out) {
  check_sizes(modes, create, annihilate);
  const std::size_t dim = std::size_t{1} << modes;
  if (in.size() != dim || out.size() != dim) throw Error(ErrorCode::shape, "apply_field: vector length must be 2^modes");
  const auto n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < n; ++b) {
    const auto target = static_cast<Occupation>(b);
    cplx acc = 0.0;
    for (int j = 0; j < modes; ++j) {
      const Occupation bit = Occupation{1} << j;
      const Occupation source = target ^ bit;
      // Bits below j agree between source and target, so either sign works.
      const double sign = jordan_wigner_sign(source, j);
      if (target & bit) {
        acc += sign * create[static_cast<std::size_t>(j)] * in[source];
      } else {
        acc += sign * annihilate[static_cast<std::size_t>(j)] * in[source];
      }
    }
    out[static_cast<std::size_t>(b)] = acc;
  }
}

FockMatrix field_matrix(int modes, std::span<const cplx> create, std::span<const cplx> annihilate) {
  check_sizes(modes, create, annihilate);
  const std::size_t dim = std::size_t{1} << modes;
  const auto m = static_cast<std::size_t>(modes);
  FockMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  if (modes == 0) return out;
  // Every column holds exactly one entry per mode.
  out.resizeNonZeros(static_cast<Eigen::Index>(dim * m));
  auto* outer = out.outerIndexPtr();
  auto* inner = out.innerIndexPtr();
  cplx* values = out.valuePtr();
  const auto n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < n; ++b) {
    const auto state = static_cast<Occupation>(b);
    std::pair<Occupation, cplx> entries[24];
    for (int j = 0; j < modes; ++j) {
      const Occupation bit = Occupation{1} << j;
      const double sign = jordan_wigner_sign(state, j);
      entries[j] = (state & bit) ? std::pair{state ^ bit, sign * annihilate[static_cast<std::size_t>(j)]}
                                 : std::pair{state | bit, sign * create[static_cast<std::size_t>(j)]};
    }
    std::sort(entries, entries + modes, [](const auto& l, const auto& r) { return l.first < r.first; });
    const std::size_t base = static_cast<std::size_t>(b) * m;
    outer[b] = static_cast<int>(base);
    for (std::size_t e = 0; e < m; ++e) {
      inner[base + e] = static_cast<int>(entries[e].first);
      values[base + e] = entries[e].second;
    }
  }
  outer[dim] = static_cast<int>(dim * m);
  return out;
}

FockMatrix second_quantize(int modes, const CMatrix& one_body) {
  if (one_body.rows() != modes || one_body.cols() != modes) throw Error(ErrorCode::shape, "second_quantize: shape mismatch");
  if (modes > 24) throw Error(ErrorCode::too_large, "second_quantize: mode count out of range");
  const std::size_t dim = std::size_t{1} << modes;
  std::vector<std::vector<std::pair<Occupation, cplx>>> columns(dim);
  const auto n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t b = 0; b < n; ++b) {
    const auto state = static_cast<Occupation>(b);
    auto& col = columns[static_cast<std::size_t>(b)];
    for (int l = 0; l < modes; ++l) {
      const Occupation lbit = Occupation{1} << l;
      if (!(state & lbit)) continue;
      const double s1 = jordan_wigner_sign(state, l);
      const Occupation mid = state ^ lbit;
      for (int j = 0; j < modes; ++j) {
        const Occupation jbit = Occupation{1} << j;
        if (mid & jbit) continue;
        const cplx v = one_body(j, l);
        if (v == 0.0) continue;
        col.emplace_back(mid | jbit, s1 * jordan_wigner_sign(mid, j) * v);
      }
    }
    std::sort(col.begin(), col.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    // Merge duplicates (all diagonal terms land on the same row).
    std::size_t w = 0;
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (w > 0 && col[w - 1].first == col[r].first) {
        col[w - 1].second += col[r].second;
      } else {
        col[w++] = col[r];
      }
    }
    col.resize(w);
  }
  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.size();
  FockMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  std::size_t pos = 0;
  for (std::size_t b = 0; b < dim; ++b) {
    out.outerIndexPtr()[b] = static_cast<int>(pos);
    for (const auto& [row, v] : columns[b]) {
      out.innerIndexPtr()[pos] = static_cast<int>(row);
      out.valuePtr()[pos] = v;
      ++pos;
    }
  }
  out.outerIndexPtr()[dim] = static_cast<int>(pos);
  return out;
}

cplx principal_minor_sum(const CMatrix& x) {
  check_minor_input(x);
  const std::uint64_t count = std::uint64_t{1} << x.rows();
  // Fixed-size blocks summed in order keep the result independent of the
  // thread count.
  constexpr std::uint64_t block = 256;
  const auto blocks = static_cast<std::int64_t>((count + block - 1) / block);
  std::vector<cplx> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * block;
    const std::uint64_t last = std::min(count, first + block);
    cplx acc = 0.0;
    for (std::uint64_t s = first; s < last; ++s) acc += minor_determinant(x, s);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  cplx total = 0.0;
  for (const cplx& v : partial) total += v;
  return total;
}

}  // namespace omp
}  // namespace diraclab::kernels
