#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cast {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

// Subcarrier indices are 1-based throughout the public API.
using SupportSet = std::vector<int>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

enum class OrthoMode {
    strict,       // n % m == 0, spacing n/m
    relaxed,      // every column with |correlation| <= eps_orth
    nearest_grid  // offsets round(c*n/m), c = 0..m-1
};

OrthoMode ortho_mode_from_string(const std::string& s);
std::string to_string(OrthoMode mode);

struct SensingDims {
    int n = 0;
    int m = 0;
    OrthoMode mode = OrthoMode::strict;
    double eps_orth = 1e-8;
};

// Validates 1 <= m <= n and, for strict mode, n % m == 0.
SensingDims make_dims(int n, int m, OrthoMode mode = OrthoMode::strict,
                      double eps_orth = 1e-8);

struct SparseFreqVector {
    int n = 0;
    SupportSet support;  // ascending
    CVec values;         // values[i] belongs to support[i]
};

CVec idft_column(const SensingDims& dims, int omega);

double column_correlation(const SensingDims& dims, std::int64_t delta);

int interval_index(const SensingDims& dims, std::int64_t delta);

double correlation_upper_bound(const SensingDims& dims, std::int64_t delta);

// Ordered by offset from the anchor; the anchor comes first.
std::vector<int> orthogonal_index_set(const SensingDims& dims, int anchor);

// Circular index distance on [1..n].
int circular_distance(int a, int b, int n);

}  // namespace cast
