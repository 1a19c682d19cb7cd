#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cast/channel.hpp"
#include "cast/spectrum.hpp"

namespace cast {

using Bits = std::vector<std::uint8_t>;
using BigUInt = boost::multiprecision::cpp_int;

enum class Modulation { qpsk };

Modulation modulation_from_string(const std::string& s);
std::string to_string(Modulation mod);
int bits_per_symbol(Modulation mod);

struct GrantPayload {
    SupportSet user_support;
    Bits info_bits;
    Modulation modulation = Modulation::qpsk;
};

SupportSet select_support(const CVec& gains, int k, const SensingDims& dims);
SupportSet select_support(const ChannelRealization& ch, int k, const SensingDims& dims);

// QPSK Gray map, bits taken in pairs (b0, b1): b0 sets the real sign, b1 the
// imaginary sign, 0 -> positive. 00 -> beta * (1 + j) / sqrt(2).
CVec map_bits_to_symbols(const Bits& bits, Modulation mod, double beta);

SparseFreqVector build_grant_vector(const SupportSet& support, const CVec& symbols, int n);

BigUInt binomial(int n, int k);
BigUInt support_rank(const SupportSet& support, int n, int k);
SupportSet support_unrank(const BigUInt& rank, int n, int k);

}  // namespace cast
