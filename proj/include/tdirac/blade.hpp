#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace tdirac {

inline constexpr int kDim = 4;
inline constexpr int kBladeCount = 16;

// A basis blade dx^{m1} ^ ... ^ dx^{mk} with m1 < ... < mk, stored as a
// 4-bit set over coordinate indices.
struct BladeIndex {
  std::uint8_t mask = 0;

  constexpr int grade() const { return std::popcount(static_cast<unsigned>(mask)); }
  constexpr bool contains(int mu) const { return (mask >> mu) & 1u; }
  constexpr bool operator==(const BladeIndex&) const = default;
};

namespace detail {

// Canonical order: grade-major, lexicographic within a grade.
inline constexpr std::array<std::uint8_t, kBladeCount> kCanonicalMasks = {
    0b0000,                                      // 1
    0b0001, 0b0010, 0b0100, 0b1000,              // dx0 .. dx3
    0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100,  // 01 02 03 12 13 23
    0b0111, 0b1011, 0b1101, 0b1110,              // 012 013 023 123
    0b1111};

constexpr std::array<int, kBladeCount> make_mask_to_index() {
  std::array<int, kBladeCount> out{};
  for (int i = 0; i < kBladeCount; ++i) out[kCanonicalMasks[i]] = i;
  return out;
}

inline constexpr std::array<int, kBladeCount> kMaskToIndex = make_mask_to_index();

}  // namespace detail

constexpr BladeIndex blade_at(int canonical) { return {detail::kCanonicalMasks[canonical]}; }
constexpr int canonical_index(BladeIndex b) { return detail::kMaskToIndex[b.mask]; }
constexpr int canonical_index(unsigned mask) { return detail::kMaskToIndex[mask & 0xFu]; }
constexpr int grade_of(int canonical) { return blade_at(canonical).grade(); }

// Canonical index range [begin, end) holding grade k.
constexpr int grade_begin(int k) {
  constexpr std::array<int, 6> starts = {0, 1, 5, 11, 15, 16};
  return starts[k];
}
constexpr int grade_end(int k) { return grade_begin(k + 1); }

// Increasing coordinate indices of a blade.
inline std::vector<int> indices_of(BladeIndex b) {
  std::vector<int> out;
  for (int mu = 0; mu < kDim; ++mu)
    if (b.contains(mu)) out.push_back(mu);
  return out;
}

// Sign of reordering (a-indices, b-indices) into increasing order; 0 if the
// two blades share an index. This is the sign of blade(a) ^ blade(b).
constexpr int wedge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (int i = 0; i < kDim; ++i)
    if ((a >> i) & 1u) swaps += std::popcount(b & ((1u << i) - 1u));
  return (swaps & 1) ? -1 : 1;
}

// epsilon_{A, A^c} with epsilon_{0123} = +1.
constexpr int levi_civita_split(unsigned a) { return wedge_sign(a, 0xFu ^ a); }

// Sign of a permutation given as an index sequence; 0 on repeats.
inline int permutation_sign(const std::vector<int>& seq) {
  int sign = 1;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j) {
      if (seq[i] == seq[j]) return 0;
      if (seq[i] > seq[j]) sign = -sign;
    }
  return sign;
}

}  // namespace tdirac
