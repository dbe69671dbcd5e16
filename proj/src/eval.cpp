#include "actdec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "actdec/channel.hpp"
#include "actdec/parallel.hpp"
#include "actdec/util.hpp"

namespace actdec {

namespace {

struct ChunkResult {
    std::int64_t blocks = 0;
    std::int64_t block_errors = 0;
    std::int64_t bit_errors = 0;
};

}  // namespace

ErrorStats monte_carlo_errors(const TannerGraph& graph, const WeightSet& weights,
                              const DecoderConfig& dec, double rate, double snr_db,
                              const EvalOptions& opt, RandomStream& rng) {
    if (opt.min_block_errors < 1)
        throw std::invalid_argument("monte_carlo_errors: min_block_errors must be >= 1");
    if (opt.chunk_blocks < 1)
        throw std::invalid_argument("monte_carlo_errors: chunk_blocks must be >= 1");
    const double sigma = snr_to_sigma(snr_db, rate);
    const double llr_scale = 2.0 / (sigma * sigma);
    const int n = graph.n_vars;
    const int L = dec.iterations;

    ErrorStats stats;
    stats.snr_db = snr_db;

    // One derivation value per call keeps the caller's stream position
    // independent of how many blocks were decoded.
    const std::uint64_t base_seed = rng.next_u64();

    if (opt.max_blocks <= 0) return stats;  // zero budget: flagged invalid

    const std::int64_t total_chunks =
        (opt.max_blocks + opt.chunk_blocks - 1) / opt.chunk_blocks;
    const int workers = std::max(1, opt.workers);

    std::int64_t next_chunk = 0;
    bool done = false;
    while (!done && next_chunk < total_chunks) {
        const std::int64_t wave =
            std::min<std::int64_t>(workers, total_chunks - next_chunk);
        std::vector<ChunkResult> results(static_cast<std::size_t>(wave));
        parallel_for_chunks(wave, workers, [&](std::int64_t wi) {
            const std::int64_t ci = next_chunk + wi;
            const std::int64_t begin = ci * opt.chunk_blocks;
            const std::int64_t end = std::min(begin + opt.chunk_blocks, opt.max_blocks);
            RandomStream stream(mix_seed(base_seed, static_cast<std::uint64_t>(ci)));
            DecodeTrace trace;
            Eigen::ArrayXd lambda(n);
            ChunkResult r;
            r.blocks = end - begin;
            for (std::int64_t b = begin; b < end; ++b) {
                for (int i = 0; i < n; ++i)
                    lambda[i] = llr_scale * (1.0 + sigma * stream.gaussian());
                wbp_forward(graph, weights, lambda, L, dec.clip, trace);
                const Eigen::ArrayXd& x = trace.x_hat[static_cast<std::size_t>(L - 1)];
                int bit_errs = 0;
                for (int v = 0; v < n; ++v)
                    if (x[v] > 0.5) ++bit_errs;
                if (bit_errs > 0) {
                    ++r.block_errors;
                    r.bit_errors += bit_errs;
                }
            }
            results[static_cast<std::size_t>(wi)] = r;
        });
        // Merge in chunk order; the stopping chunk is therefore independent
        // of the worker count.
        for (const ChunkResult& r : results) {
            stats.blocks += r.blocks;
            stats.block_errors += r.block_errors;
            stats.bit_errors += r.bit_errors;
            if (stats.block_errors >= opt.min_block_errors) {
                done = true;
                break;
            }
        }
        next_chunk += wave;
    }

    if (stats.blocks > 0) {
        stats.fer = static_cast<double>(stats.block_errors) / static_cast<double>(stats.blocks);
        stats.ber = static_cast<double>(stats.bit_errors) /
                    (static_cast<double>(stats.blocks) * static_cast<double>(n));
    }
    stats.converged = stats.block_errors >= opt.min_block_errors;
    return stats;
}

std::vector<ErrorStats> sweep(const TannerGraph& graph, const WeightSet& weights,
                              const DecoderConfig& dec, double rate,
                              const std::vector<double>& snr_grid, const EvalOptions& opt,
                              RandomStream& rng) {
    if (snr_grid.empty()) throw std::invalid_argument("sweep: empty SNR grid");
    std::vector<ErrorStats> out;
    out.reserve(snr_grid.size());
    for (std::size_t i = 0; i < snr_grid.size(); ++i) {
        RandomStream point = rng.derive(i);
        out.push_back(monte_carlo_errors(graph, weights, dec, rate, snr_grid[i], opt, point));
    }
    return out;
}

std::string error_stats_csv(const std::vector<ErrorStats>& stats) {
    std::ostringstream os;
    os << "snr_db,blocks,block_errors,bit_errors,fer,ber,converged\n";
    for (const ErrorStats& s : stats) {
        os << format_double(s.snr_db) << ',' << s.blocks << ',' << s.block_errors << ','
           << s.bit_errors << ',' << format_double(s.fer) << ',' << format_double(s.ber) << ','
           << (s.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

double theta_entropy(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("theta_entropy: theta outside [0, 1]");
    if (theta == 0.0 || theta == 1.0) return 0.0;
    return -theta * std::log2(theta) - (1.0 - theta) * std::log2(1.0 - theta);
}

}  // namespace actdec
