#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "actdec/codes.hpp"

namespace actdec {

// Bipartite variable/check graph with dense edge indexing. Edges are
// enumerated check-major, neighbor lists sorted by counterpart index, so all
// message arrays and summation orders are reproducible.
struct TannerGraph {
    struct Edge {
        int var;
        int check;
    };
    int n_vars = 0, n_checks = 0, n_edges = 0;
    std::vector<Edge> edges;                    // edge id -> endpoints
    std::vector<std::vector<int>> var_edges;    // per variable, sorted by check
    std::vector<std::vector<int>> check_edges;  // per check, sorted by variable
};

TannerGraph build_tanner(const ParityCheckMatrix& pcm);

// Trainable weights of the unrolled network: per layer, one weight per
// variable for the channel LLR and one per edge, separately for the
// variable-node updates and for the output layers. All-ones reproduces
// plain BP exactly.
struct WeightSet {
    int iterations = 0;                   // L
    Eigen::ArrayXXd vn_channel;           // L x n
    Eigen::ArrayXXd vn_edge;              // L x E
    Eigen::ArrayXXd out_channel;          // L x n
    Eigen::ArrayXXd out_edge;             // L x E

    static WeightSet ones(const TannerGraph& graph, int iterations);
    bool congruent_with(const TannerGraph& graph, int iterations) const;
    bool all_finite() const;
    bool operator==(const WeightSet& o) const;
};

// Per-layer forward record. vn_messages are tanh-domain, cn_messages are
// LLR-domain after clipping; cn_product keeps the raw leave-one-out products
// so the backward pass can recover the clamp/clip branches exactly.
struct DecodeTrace {
    std::vector<Eigen::ArrayXd> vn_messages;  // L arrays of size E
    std::vector<Eigen::ArrayXd> cn_messages;  // L arrays of size E
    std::vector<Eigen::ArrayXd> cn_product;   // L arrays of size E
    std::vector<Eigen::ArrayXd> x_hat;        // L arrays of size n
    void resize(int layers, int n, int edges);
};

inline constexpr double kProductClampDelta = 1e-12;

void wbp_forward(const TannerGraph& graph, const WeightSet& weights,
                 const Eigen::ArrayXd& lambda, int iterations, double clip,
                 DecodeTrace& trace);
DecodeTrace wbp_forward(const TannerGraph& graph, const WeightSet& weights,
                        const Eigen::ArrayXd& lambda, int iterations, double clip);

// bit = 1 iff x_hat > 0.5 (ties decode to 0).
BitVec hard_decision(const Eigen::ArrayXd& x_hat_final);

// All-zero transmission: y = 1 + z, lambda = 2 y / sigma^2; returns 1 iff
// the final hard decision is not the zero codeword.
int error_indicator(const TannerGraph& graph, const WeightSet& weights,
                    const Eigen::ArrayXd& z, double sigma, int iterations, double clip,
                    DecodeTrace& scratch);

// Brute-force ML over an enumerated codebook: argmin ||y - BPSK(c)||^2,
// ties broken by lowest codeword index.
BitVec ml_decode(const std::vector<BitVec>& codewords, const Eigen::ArrayXd& y);

// Binary weight record: magic "WBPWGT01", then u64 L, n, E (little-endian),
// then the four arrays as f64 in declared order, each layer-major.
void write_weights(std::ostream& os, const WeightSet& weights, int n_vars);
WeightSet read_weights(std::istream& is, int* n_vars_out = nullptr);
void save_weights(const std::string& path, const WeightSet& weights, int n_vars);
WeightSet load_weights(const std::string& path, int* n_vars_out = nullptr);

}  // namespace actdec
