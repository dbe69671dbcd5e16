#include "actdec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace actdec {

namespace {

inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

TannerGraph build_tanner(const ParityCheckMatrix& pcm) {
    TannerGraph g;
    g.n_vars = pcm.n();
    g.n_checks = pcm.m();
    g.var_edges.assign(g.n_vars, {});
    g.check_edges.assign(g.n_checks, {});
    // Check-major enumeration; row supports are sorted, so var_edges end up
    // sorted by check and check_edges by variable.
    for (int c = 0; c < g.n_checks; ++c) {
        for (int v : pcm.row_support()[c]) {
            const int e = static_cast<int>(g.edges.size());
            g.edges.push_back({v, c});
            g.var_edges[v].push_back(e);
            g.check_edges[c].push_back(e);
        }
    }
    g.n_edges = static_cast<int>(g.edges.size());
    return g;
}

WeightSet WeightSet::ones(const TannerGraph& graph, int iterations) {
    WeightSet w;
    w.iterations = iterations;
    w.vn_channel = Eigen::ArrayXXd::Ones(iterations, graph.n_vars);
    w.vn_edge = Eigen::ArrayXXd::Ones(iterations, graph.n_edges);
    w.out_channel = Eigen::ArrayXXd::Ones(iterations, graph.n_vars);
    w.out_edge = Eigen::ArrayXXd::Ones(iterations, graph.n_edges);
    return w;
}

bool WeightSet::congruent_with(const TannerGraph& graph, int L) const {
    return iterations == L && vn_channel.rows() == L && vn_channel.cols() == graph.n_vars &&
           vn_edge.rows() == L && vn_edge.cols() == graph.n_edges &&
           out_channel.rows() == L && out_channel.cols() == graph.n_vars &&
           out_edge.rows() == L && out_edge.cols() == graph.n_edges;
}

bool WeightSet::all_finite() const {
    return vn_channel.isFinite().all() && vn_edge.isFinite().all() &&
           out_channel.isFinite().all() && out_edge.isFinite().all();
}

bool WeightSet::operator==(const WeightSet& o) const {
    return iterations == o.iterations && (vn_channel == o.vn_channel).all() &&
           (vn_edge == o.vn_edge).all() && (out_channel == o.out_channel).all() &&
           (out_edge == o.out_edge).all();
}

void DecodeTrace::resize(int layers, int n, int edges) {
    auto fit = [&](std::vector<Eigen::ArrayXd>& arrs, int size) {
        arrs.resize(layers);
        for (auto& a : arrs)
            if (a.size() != size) a.resize(size);
    };
    fit(vn_messages, edges);
    fit(cn_messages, edges);
    fit(cn_product, edges);
    fit(x_hat, n);
}

void wbp_forward(const TannerGraph& graph, const WeightSet& weights,
                 const Eigen::ArrayXd& lambda, int iterations, double clip,
                 DecodeTrace& trace) {
    if (lambda.size() != graph.n_vars)
        throw std::invalid_argument("wbp_forward: lambda length does not match n");
    if (iterations < 1) throw std::invalid_argument("wbp_forward: iterations must be >= 1");
    if (!(clip > 0.0)) throw std::invalid_argument("wbp_forward: clip must be positive");
    if (!weights.congruent_with(graph, iterations))
        throw std::invalid_argument("wbp_forward: weights not dimensioned for (graph, L)");

    trace.resize(iterations, graph.n_vars, graph.n_edges);
    const double product_clamp = 1.0 - kProductClampDelta;

    for (int l = 0; l < iterations; ++l) {
        const Eigen::ArrayXd* prev_cn = l > 0 ? &trace.cn_messages[l - 1] : nullptr;
        Eigen::ArrayXd& t = trace.vn_messages[l];
        Eigen::ArrayXd& p = trace.cn_product[l];
        Eigen::ArrayXd& m = trace.cn_messages[l];
        Eigen::ArrayXd& x = trace.x_hat[l];

        // Variable-node layer: t_e = tanh( (w_v lambda_v + sum_{e' != e} w_e' m_e') / 2 ),
        // with zero check messages feeding the first layer.
        for (int v = 0; v < graph.n_vars; ++v) {
            const double channel = weights.vn_channel(l, v) * lambda[v];
            for (int e : graph.var_edges[v]) {
                double s = channel;
                if (prev_cn) {
                    for (int e2 : graph.var_edges[v])
                        if (e2 != e) s += weights.vn_edge(l, e2) * (*prev_cn)[e2];
                }
                t[e] = std::tanh(0.5 * s);
            }
        }

        // Check-node update: leave-one-out product, clamped away from +-1
        // before atanh, then clipped into [-clip, clip].
        for (int c = 0; c < graph.n_checks; ++c) {
            const auto& ce = graph.check_edges[c];
            for (int e : ce) {
                double prod = 1.0;
                for (int e2 : ce)
                    if (e2 != e) prod *= t[e2];
                p[e] = prod;
                const double q = std::clamp(prod, -product_clamp, product_clamp);
                const double u = 2.0 * std::atanh(q);
                m[e] = std::clamp(u, -clip, clip);
            }
        }

        // Output layer: x_v = sigmoid( -(w_v lambda_v + sum_e w_e m_e) ).
        for (int v = 0; v < graph.n_vars; ++v) {
            double o = weights.out_channel(l, v) * lambda[v];
            for (int e : graph.var_edges[v]) o += weights.out_edge(l, e) * m[e];
            x[v] = sigmoid(-o);
        }
    }
}

DecodeTrace wbp_forward(const TannerGraph& graph, const WeightSet& weights,
                        const Eigen::ArrayXd& lambda, int iterations, double clip) {
    DecodeTrace trace;
    wbp_forward(graph, weights, lambda, iterations, clip, trace);
    return trace;
}

BitVec hard_decision(const Eigen::ArrayXd& x_hat_final) {
    BitVec bits(static_cast<std::size_t>(x_hat_final.size()), 0);
    for (Eigen::Index v = 0; v < x_hat_final.size(); ++v)
        bits[static_cast<std::size_t>(v)] = x_hat_final[v] > 0.5 ? 1 : 0;
    return bits;
}

int error_indicator(const TannerGraph& graph, const WeightSet& weights,
                    const Eigen::ArrayXd& z, double sigma, int iterations, double clip,
                    DecodeTrace& scratch) {
    if (z.size() != graph.n_vars)
        throw std::invalid_argument("error_indicator: z length does not match n");
    const Eigen::ArrayXd lambda = (2.0 / (sigma * sigma)) * (1.0 + z);
    wbp_forward(graph, weights, lambda, iterations, clip, scratch);
    const Eigen::ArrayXd& x = scratch.x_hat[iterations - 1];
    for (Eigen::Index v = 0; v < x.size(); ++v)
        if (x[v] > 0.5) return 1;
    return 0;
}

BitVec ml_decode(const std::vector<BitVec>& codewords, const Eigen::ArrayXd& y) {
    if (codewords.empty()) throw std::invalid_argument("ml_decode: empty codebook");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < codewords.size(); ++i) {
        const BitVec& c = codewords[i];
        double d2 = 0.0;
        for (Eigen::Index v = 0; v < y.size(); ++v) {
            const double s = c[static_cast<std::size_t>(v)] ? -1.0 : 1.0;
            const double diff = y[v] - s;
            d2 += diff * diff;
        }
        if (d2 < best) {
            best = d2;
            best_idx = i;
        }
    }
    return codewords[best_idx];
}

namespace {

constexpr char kWeightsMagic[8] = {'W', 'B', 'P', 'W', 'G', 'T', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    os.write(buf, 8);
}

std::uint64_t get_u64(std::istream& is) {
    char buf[8];
    is.read(buf, 8);
    if (!is) throw std::runtime_error("weights file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

void put_array(std::ostream& os, const Eigen::ArrayXXd& a) {
    // Layer-major: all of layer 0, then layer 1, ...
    for (Eigen::Index l = 0; l < a.rows(); ++l)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double v = a(l, j);
            char buf[8];
            std::memcpy(buf, &v, 8);
            os.write(buf, 8);
        }
}

void get_array(std::istream& is, Eigen::ArrayXXd& a) {
    for (Eigen::Index l = 0; l < a.rows(); ++l)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            char buf[8];
            is.read(buf, 8);
            if (!is) throw std::runtime_error("weights file truncated");
            double v;
            std::memcpy(&v, buf, 8);
            a(l, j) = v;
        }
}

}  // namespace

void write_weights(std::ostream& os, const WeightSet& weights, int n_vars) {
    os.write(kWeightsMagic, 8);
    put_u64(os, static_cast<std::uint64_t>(weights.iterations));
    put_u64(os, static_cast<std::uint64_t>(n_vars));
    put_u64(os, static_cast<std::uint64_t>(weights.vn_edge.cols()));
    put_array(os, weights.vn_channel);
    put_array(os, weights.vn_edge);
    put_array(os, weights.out_channel);
    put_array(os, weights.out_edge);
    if (!os) throw std::runtime_error("weights write failed");
}

WeightSet read_weights(std::istream& is, int* n_vars_out) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kWeightsMagic, 8) != 0)
        throw std::runtime_error("not a weights file (bad magic)");
    const auto L = static_cast<Eigen::Index>(get_u64(is));
    const auto n = static_cast<Eigen::Index>(get_u64(is));
    const auto E = static_cast<Eigen::Index>(get_u64(is));
    if (L < 1 || L > 1000 || n < 1 || n > (1 << 24) || E < 1 || E > (1 << 28))
        throw std::runtime_error("weights file has implausible dimensions");
    WeightSet w;
    w.iterations = static_cast<int>(L);
    w.vn_channel.resize(L, n);
    w.vn_edge.resize(L, E);
    w.out_channel.resize(L, n);
    w.out_edge.resize(L, E);
    get_array(is, w.vn_channel);
    get_array(is, w.vn_edge);
    get_array(is, w.out_channel);
    get_array(is, w.out_edge);
    if (!w.all_finite()) throw std::runtime_error("weights file contains non-finite values");
    if (n_vars_out) *n_vars_out = static_cast<int>(n);
    return w;
}

void save_weights(const std::string& path, const WeightSet& weights, int n_vars) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write weights file: " + path);
    write_weights(os, weights, n_vars);
}

WeightSet load_weights(const std::string& path, int* n_vars_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open weights file: " + path);
    return read_weights(is, n_vars_out);
}

}  // namespace actdec
