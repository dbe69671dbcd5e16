#include "actdec/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace actdec {

GradientSet GradientSet::zeros(const TannerGraph& graph, int iterations) {
    GradientSet g;
    g.vn_channel = Eigen::ArrayXXd::Zero(iterations, graph.n_vars);
    g.vn_edge = Eigen::ArrayXXd::Zero(iterations, graph.n_edges);
    g.out_channel = Eigen::ArrayXXd::Zero(iterations, graph.n_vars);
    g.out_edge = Eigen::ArrayXXd::Zero(iterations, graph.n_edges);
    return g;
}

void GradientSet::set_zero() {
    vn_channel.setZero();
    vn_edge.setZero();
    out_channel.setZero();
    out_edge.setZero();
}

void GradientSet::add(const GradientSet& other) {
    vn_channel += other.vn_channel;
    vn_edge += other.vn_edge;
    out_channel += other.out_channel;
    out_edge += other.out_edge;
}

void GradientSet::scale(double s) {
    vn_channel *= s;
    vn_edge *= s;
    out_channel *= s;
    out_edge *= s;
}

bool GradientSet::all_finite() const {
    return vn_channel.isFinite().all() && vn_edge.isFinite().all() &&
           out_channel.isFinite().all() && out_edge.isFinite().all();
}

double bce_multiloss(const DecodeTrace& trace, const BitVec& c) {
    if (trace.x_hat.empty()) throw std::invalid_argument("bce_multiloss: empty trace");
    const Eigen::Index n = trace.x_hat.front().size();
    if (static_cast<Eigen::Index>(c.size()) != n)
        throw std::invalid_argument("bce_multiloss: label length does not match n");
    double sum = 0.0;
    for (const auto& x : trace.x_hat) {
        for (Eigen::Index v = 0; v < n; ++v) {
            const double xc = std::clamp(x[v], kLogClamp, 1.0 - kLogClamp);
            sum += c[static_cast<std::size_t>(v)] ? std::log(xc) : std::log(1.0 - xc);
        }
    }
    return -sum / static_cast<double>(n);
}

double backward(const TannerGraph& graph, const WeightSet& weights,
                const Eigen::ArrayXd& lambda, const BitVec& c, int iterations,
                double clip, DecodeTrace& trace, GradientSet& grads) {
    if (static_cast<int>(c.size()) != graph.n_vars)
        throw std::invalid_argument("backward: label length does not match n");
    wbp_forward(graph, weights, lambda, iterations, clip, trace);
    const double loss = bce_multiloss(trace, c);

    const int n = graph.n_vars;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double product_clamp = 1.0 - kProductClampDelta;

    Eigen::ArrayXd dm = Eigen::ArrayXd::Zero(graph.n_edges);       // dL/d m^(l)
    Eigen::ArrayXd dm_prev = Eigen::ArrayXd::Zero(graph.n_edges);  // dL/d m^(l-1)
    Eigen::ArrayXd dt = Eigen::ArrayXd::Zero(graph.n_edges);       // dL/d t^(l)
    std::vector<double> sub_t, prefix, suffix;
    std::vector<int> sub_e;

    for (int l = iterations - 1; l >= 0; --l) {
        const Eigen::ArrayXd& t = trace.vn_messages[l];
        const Eigen::ArrayXd& m = trace.cn_messages[l];
        const Eigen::ArrayXd& p = trace.cn_product[l];
        const Eigen::ArrayXd& x = trace.x_hat[l];
        const Eigen::ArrayXd* prev_m = l > 0 ? &trace.cn_messages[l - 1] : nullptr;

        // Output layer l: loss term l differentiates into the channel/edge
        // output weights and, through them, into the layer-l check messages.
        for (int v = 0; v < n; ++v) {
            const double xv = x[v];
            double dLdo = 0.0;
            if (xv > kLogClamp && xv < 1.0 - kLogClamp) {
                const double dLdx = -inv_n * (c[static_cast<std::size_t>(v)]
                                                  ? 1.0 / xv
                                                  : -1.0 / (1.0 - xv));
                dLdo = dLdx * (-xv * (1.0 - xv));
            }
            if (dLdo != 0.0) {
                grads.out_channel(l, v) += dLdo * lambda[v];
                for (int e : graph.var_edges[v]) {
                    grads.out_edge(l, e) += dLdo * m[e];
                    dm[e] += dLdo * weights.out_edge(l, e);
                }
            }
        }

        // Check-node layer: dm -> dt through clip, atanh, clamp and the
        // leave-one-out product.
        dt.setZero();
        for (int cn = 0; cn < graph.n_checks; ++cn) {
            const auto& ce = graph.check_edges[cn];
            const int deg = static_cast<int>(ce.size());
            for (int j = 0; j < deg; ++j) {
                const int e = ce[j];
                if (dm[e] == 0.0) continue;
                if (!(std::abs(m[e]) < clip)) continue;  // clip saturated: zero gradient
                const double q = std::clamp(p[e], -product_clamp, product_clamp);
                if (!(std::abs(p[e]) < product_clamp)) continue;  // clamp saturated
                const double dp = dm[e] * 2.0 / (1.0 - q * q);
                if (deg == 1) continue;  // empty product, no inputs
                // Leave-one-out over the in-edges (all except e).
                sub_e.clear();
                sub_t.clear();
                for (int j2 = 0; j2 < deg; ++j2)
                    if (j2 != j) {
                        sub_e.push_back(ce[j2]);
                        sub_t.push_back(t[ce[j2]]);
                    }
                const int d1 = static_cast<int>(sub_e.size());
                prefix.assign(d1 + 1, 1.0);
                suffix.assign(d1 + 1, 1.0);
                for (int i = 0; i < d1; ++i) prefix[i + 1] = prefix[i] * sub_t[i];
                for (int i = d1 - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * sub_t[i];
                for (int i = 0; i < d1; ++i) dt[sub_e[i]] += dp * prefix[i] * suffix[i + 1];
            }
        }

        // Variable-node layer: dt -> channel/edge weight gradients and the
        // sensitivities of the previous layer's check messages.
        dm_prev.setZero();
        for (int v = 0; v < n; ++v) {
            for (int e : graph.var_edges[v]) {
                if (dt[e] == 0.0) continue;
                const double ds = dt[e] * 0.5 * (1.0 - t[e] * t[e]);
                if (ds == 0.0) continue;
                grads.vn_channel(l, v) += ds * lambda[v];
                if (prev_m) {
                    for (int e2 : graph.var_edges[v])
                        if (e2 != e) {
                            grads.vn_edge(l, e2) += ds * (*prev_m)[e2];
                            dm_prev[e2] += ds * weights.vn_edge(l, e2);
                        }
                }
            }
        }
        std::swap(dm, dm_prev);
    }
    return loss;
}

GradientSet finite_diff_generic(const std::function<double(const WeightSet&)>& loss_fn,
                                const TannerGraph& graph, WeightSet weights, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite_diff: step must be positive");
    GradientSet g = GradientSet::zeros(graph, weights.iterations);
    auto diff_array = [&](Eigen::ArrayXXd& w, Eigen::ArrayXXd& out) {
        for (Eigen::Index l = 0; l < w.rows(); ++l)
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const double saved = w(l, j);
                w(l, j) = saved + step;
                const double plus = loss_fn(weights);
                w(l, j) = saved - step;
                const double minus = loss_fn(weights);
                w(l, j) = saved;
                out(l, j) = (plus - minus) / (2.0 * step);
            }
    };
    diff_array(weights.vn_channel, g.vn_channel);
    diff_array(weights.vn_edge, g.vn_edge);
    diff_array(weights.out_channel, g.out_channel);
    diff_array(weights.out_edge, g.out_edge);
    return g;
}

GradientSet finite_diff_grad(const TannerGraph& graph, const WeightSet& weights,
                             const Eigen::ArrayXd& lambda, const BitVec& c,
                             int iterations, double clip, double step) {
    DecodeTrace scratch;
    auto loss_fn = [&](const WeightSet& w) {
        wbp_forward(graph, w, lambda, iterations, clip, scratch);
        return bce_multiloss(scratch, c);
    };
    return finite_diff_generic(loss_fn, graph, weights, step);
}

OptimizerState OptimizerState::init(const TannerGraph& graph, int iterations, double decay,
                                    double epsilon_stab, double learning_rate) {
    if (!(decay > 0.0 && decay < 1.0))
        throw std::invalid_argument("rmsprop: decay must lie in (0, 1)");
    if (!(epsilon_stab > 0.0)) throw std::invalid_argument("rmsprop: epsilon must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("rmsprop: lr must be positive");
    OptimizerState s;
    s.acc_vn_channel = Eigen::ArrayXXd::Zero(iterations, graph.n_vars);
    s.acc_vn_edge = Eigen::ArrayXXd::Zero(iterations, graph.n_edges);
    s.acc_out_channel = Eigen::ArrayXXd::Zero(iterations, graph.n_vars);
    s.acc_out_edge = Eigen::ArrayXXd::Zero(iterations, graph.n_edges);
    s.decay = decay;
    s.epsilon_stab = epsilon_stab;
    s.learning_rate = learning_rate;
    return s;
}

void rmsprop_step(WeightSet& weights, const GradientSet& grads, OptimizerState& state) {
    auto update = [&](Eigen::ArrayXXd& w, const Eigen::ArrayXXd& g, Eigen::ArrayXXd& acc) {
        if (w.rows() != g.rows() || w.cols() != g.cols() || w.rows() != acc.rows() ||
            w.cols() != acc.cols())
            throw std::invalid_argument("rmsprop_step: shape mismatch");
        acc = state.decay * acc + (1.0 - state.decay) * g.square();
        w -= state.learning_rate * g / (acc + state.epsilon_stab).sqrt();
    };
    update(weights.vn_channel, grads.vn_channel, state.acc_vn_channel);
    update(weights.vn_edge, grads.vn_edge, state.acc_vn_edge);
    update(weights.out_channel, grads.out_channel, state.acc_out_channel);
    update(weights.out_edge, grads.out_edge, state.acc_out_edge);
}

}  // namespace actdec
