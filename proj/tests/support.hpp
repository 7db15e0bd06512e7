#pragma once

#include <vector>

#include "invclt/array_core.hpp"
#include "oracles.hpp"

namespace support {

inline invclt::SquareMatrix to_square(const oracle::Matrix& m) { return invclt::SquareMatrix::from_rows(m); }

inline oracle::Matrix to_rows(const invclt::SquareMatrix& m) {
    oracle::Matrix out(m.n(), std::vector<double>(m.n()));
    for (int i = 0; i < m.n(); ++i)
        for (int j = 0; j < m.n(); ++j) out[i][j] = m(i, j);
    return out;
}

/// The lattice lower-bound array at n = 4, written out by hand.
inline const oracle::Matrix kLattice4 = {{0, 0, 1, -1}, {0, 0, -1, 1}, {1, -1, 0, 0}, {-1, 1, 0, 0}};

inline invclt::CenteredArray centered(const oracle::Matrix& e) {
    return invclt::standardize(invclt::SymmetricArray(to_square(e)));
}

}  // namespace support
