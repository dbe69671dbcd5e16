#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actdec/decoder.hpp"
#include "actdec/random.hpp"

namespace actdec {

struct DecoderConfig {
    int iterations = 5;
    double clip = 10.0;
};

struct ErrorStats {
    double snr_db = 0.0;
    std::int64_t blocks = 0;
    std::int64_t block_errors = 0;
    std::int64_t bit_errors = 0;
    double fer = 0.0;
    double ber = 0.0;
    bool converged = false;  // min_block_errors reached (vs budget-bound)
};

struct EvalOptions {
    std::int64_t min_block_errors = 100;
    std::int64_t max_blocks = 100000000;
    std::int64_t chunk_blocks = 4096;  // fixed work unit; keeps results worker-count invariant
    int workers = 1;
};

// All-zero transmission over AWGN at sigma(snr_db, rate), decoded with the
// given weights; accumulates until min_block_errors block errors or
// max_blocks blocks, whichever comes first. Deterministic in (rng seed,
// chunk_blocks) for any worker count.
ErrorStats monte_carlo_errors(const TannerGraph& graph, const WeightSet& weights,
                              const DecoderConfig& dec, double rate, double snr_db,
                              const EvalOptions& opt, RandomStream& rng);

std::vector<ErrorStats> sweep(const TannerGraph& graph, const WeightSet& weights,
                              const DecoderConfig& dec, double rate,
                              const std::vector<double>& snr_grid, const EvalOptions& opt,
                              RandomStream& rng);

// CSV schema: snr_db,blocks,block_errors,bit_errors,fer,ber,converged
std::string error_stats_csv(const std::vector<ErrorStats>& stats);

// Binary entropy in bits; H(0) = H(1) = 0 by limit.
double theta_entropy(double theta);

}  // namespace actdec
