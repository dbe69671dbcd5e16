#pragma once

#include <Eigen/Core>
#include <functional>

#include "actdec/decoder.hpp"

namespace actdec {

struct GradientSet {
    Eigen::ArrayXXd vn_channel, vn_edge, out_channel, out_edge;

    static GradientSet zeros(const TannerGraph& graph, int iterations);
    void set_zero();
    void add(const GradientSet& other);
    void scale(double s);
    bool all_finite() const;
};

// Soft outputs are clamped into [kLogClamp, 1 - kLogClamp] before the logs.
inline constexpr double kLogClamp = 1e-12;

// BCE multiloss: -(1/n) sum over layers and variables of
// c_v log x_hat + (1 - c_v) log(1 - x_hat).
double bce_multiloss(const DecodeTrace& trace, const BitVec& c);

// Exact reverse-mode derivative of bce_multiloss(wbp_forward(...)) with
// respect to every weight. Saturated clip/clamp branches contribute zero
// gradient, identity inside. Gradients are ACCUMULATED into `grads`;
// returns the loss.
double backward(const TannerGraph& graph, const WeightSet& weights,
                const Eigen::ArrayXd& lambda, const BitVec& c, int iterations,
                double clip, DecodeTrace& scratch, GradientSet& grads);

// Central finite differences of an arbitrary scalar function of the weights;
// the per-weight mutation order matches backward's storage order.
GradientSet finite_diff_generic(const std::function<double(const WeightSet&)>& loss_fn,
                                const TannerGraph& graph, WeightSet weights, double step);

// Central differences of the BCE multiloss itself (the gradient oracle).
GradientSet finite_diff_grad(const TannerGraph& graph, const WeightSet& weights,
                             const Eigen::ArrayXd& lambda, const BitVec& c,
                             int iterations, double clip, double step);

struct OptimizerState {
    Eigen::ArrayXXd acc_vn_channel, acc_vn_edge, acc_out_channel, acc_out_edge;
    double decay = 0.99;
    double epsilon_stab = 1e-8;
    double learning_rate = 0.01;

    static OptimizerState init(const TannerGraph& graph, int iterations, double decay,
                               double epsilon_stab, double learning_rate);
};

// RMSProp: acc <- decay*acc + (1-decay)*g^2; w <- w - lr * g / sqrt(acc + eps).
void rmsprop_step(WeightSet& weights, const GradientSet& grads, OptimizerState& state);

}  // namespace actdec
