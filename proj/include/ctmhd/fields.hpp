#pragma once

// Variable layout shared by the operators: the 8 MHD unknowns, the three
// vector-potential components and the three velocity components, stored as
// structure-of-arrays cell averages avg[v * ncell + c] and per-cell
// reconstruction coefficients coeff[(c * kNumFields + v) * ncoeff + k].

namespace ctmhd {

inline constexpr int kVarA = 8;
inline constexpr int kVarU = 11;
inline constexpr int kNumFields = 14;

}  // namespace ctmhd
