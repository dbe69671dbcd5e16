#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actdec/channel.hpp"
#include "actdec/codes.hpp"
#include "actdec/decoder.hpp"
#include "actdec/eval.hpp"
#include "actdec/shells.hpp"
#include "actdec/training.hpp"

namespace actdec {

struct ShellConfig {
    int M = 400;
    double epsilon_tail = 1e-6;
    double gamma = 0.7;
    int tail_extend = 5;
};

struct LrSchedule {
    double initial = 0.01;
    double final_value = 0.01;
    double drop_at_fraction = 0.5;  // of the total epoch budget
    double at(int epoch_index, int total_epochs) const {
        if (total_epochs <= 0) return initial;
        return epoch_index < drop_at_fraction * total_epochs ? initial : final_value;
    }
};

struct RmspropConfig {
    double decay = 0.99;
    double epsilon_stab = 1e-8;
};

struct TrainRunConfig {
    CodeSpec code;
    std::vector<double> snr_list_db;
    ShellConfig shells;
    DecoderConfig decoder;
    int batch_size = 2000;
    int batches_per_epoch = 31;
    int epochs_per_outer = 25;   // N2
    int max_outer_iters = 10;    // N1
    std::int64_t theta_test_samples = 20000;  // per SNR per outer iteration
    LrSchedule lr;
    RmspropConfig rmsprop;
    int patience = 2;            // outer iterations without val-loss improvement
    bool freeze_theta = false;   // keep theta == 1 (conventional training)
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const;  // throws std::invalid_argument with the offending field
};

// Raw Monte Carlo estimate of the per-shell error ratios.
struct ThetaEstimate {
    Eigen::ArrayXd theta;
    Eigen::Array<std::int64_t, Eigen::Dynamic, 1> errors, trials;
};

// Draws num_samples noise vectors from sampling_pmf and bins error
// indicators by the shell of ||z||; shells never visited get theta 0 and
// counts (0, 0). Deterministic for any worker count.
ThetaEstimate estimate_theta(const TannerGraph& graph, const WeightSet& weights,
                             const DecoderConfig& dec, const ShellPartition& partition,
                             const RadialPmf& sampling_pmf, std::int64_t num_samples,
                             double sigma, RandomStream& rng, int workers = 1);

// Per-SNR shell state: the chi law and theta are sigma-dependent, so each
// training SNR keeps its own partition, base pmf and tilt.
struct SnrShellState {
    double snr_db = 0.0;
    double sigma = 0.0;
    ShellPartition partition;
    RadialPmf base;      // P
    RadialPmf sampling;  // P* (or P on fallback)
    Eigen::ArrayXd theta_filled;
    ThetaEstimate last_estimate;
    bool fallback = false;  // every filled theta was zero; sampling from P
};

struct ActiveState {
    std::vector<SnrShellState> snr_states;
    WeightSet weights;
    OptimizerState optimizer;
    int outer_iter = 0;  // T
};

struct TrainSample {
    Eigen::ArrayXd lambda;
    int snr_index = 0;
};

// Fills `out` with batch_size samples: sample i uses SNR i % #SNRs, noise
// drawn from that SNR's current sampling pmf, label implicitly the all-zero
// codeword.
void build_training_batch(const ActiveState& state, int batch_size, RandomStream& rng,
                          std::vector<TrainSample>& out);

struct OuterIterRecord {
    int outer_iter = 0;            // 0 = unit-weight baseline
    double val_loss = 0.0;
    double val_ber = 0.0;
    std::vector<double> epoch_losses;
    // Per SNR:
    std::vector<Eigen::ArrayXd> theta_raw;
    std::vector<Eigen::ArrayXd> theta_filled;
    std::vector<Eigen::ArrayXd> pstar;
    std::vector<bool> fallback;
    bool is_best = false;
};

struct RunReport {
    std::vector<OuterIterRecord> iters;
    int best_outer_iter = 0;
    double best_val_loss = 0.0;
    std::string stop_reason;
};

struct ActiveTrainResult {
    WeightSet weights;  // best-validation checkpoint
    RunReport report;
};

// Observer called after each outer iteration (and once for the T=0
// baseline); used by the CLI to write checkpoints. May be null.
using CheckpointSink = std::function<void(const ActiveState&, const OuterIterRecord&)>;

// State needed to continue a run from a completed outer iteration.
struct ResumeState {
    int outer_iter = 0;
    WeightSet weights;
    OptimizerState optimizer;
    std::vector<Eigen::ArrayXd> theta_filled;  // per SNR
    std::vector<bool> fallback;
    std::vector<double> val_loss_history;  // entries for T = 0..outer_iter
    int best_outer_iter = 0;
    double best_val_loss = 0.0;
    WeightSet best_weights;
};

ActiveTrainResult active_train(const TrainRunConfig& config,
                               const CheckpointSink& sink = nullptr,
                               const std::optional<ResumeState>& resume = std::nullopt);

}  // namespace actdec
