#pragma once

// Brute-force verifiers that share no arithmetic with prob-core: mutual
// information straight from its definition, and exact n-letter leakage and
// key secrecy of a realized codebook by full enumeration.

#include <cstdint>

#include "hjscc/codec.hpp"
#include "hjscc/prob.hpp"

namespace hjscc::oracle {

struct EnumerationBudget {
    std::uint64_t max_states = std::uint64_t{1} << 26;
};

// I(a;b|c) = sum p(a,b,c) log2 [p(a,b,c) p(c) / (p(a,c) p(b,c))]; c may be empty.
double brute_mi(const JointDist& joint, const AxisList& a, const AxisList& b, const AxisList& c = {},
                EnumerationBudget budget = {});

// (1/n) I(S^n; E^n) of the source alone.
double source_eve_leakage(const SourceModel& src, std::size_t n, EnumerationBudget budget = {});

// (1/n) I(S^n; Y1, E^n) for the fixed codebook. Y1 is the Phase-1 payload
// in ideal-pipe mode and the Phase-1 channel output otherwise; the encoder's
// channel-randomization key is uniform.
double exact_leakage(const codec::CodebookSet& cb, EnumerationBudget budget = {});

// log2 N_K2 - H(K2 | E^n, U^n, Y1) in bits, clamped to [0, log2 N_K2].
double secure_index(const codec::CodebookSet& cb, EnumerationBudget budget = {});

struct OracleReport {
    double leakage_exact = 0.0;
    double leakage_bound = 0.0;  // single-letter lower bound of the region
    double gap = 0.0;            // exact minus bound
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double secure_index = 0.0;
};

OracleReport oracle_report(const codec::CodebookSet& cb, EnumerationBudget budget = {});

}  // namespace hjscc::oracle
