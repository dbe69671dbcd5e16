#include "actdec/active.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actdec/parallel.hpp"

namespace actdec {

namespace {

// Stream-derivation tags; every draw in a run is a pure function of
// (config seed, tag, outer iteration, snr index), which is what makes
// checkpoint resume bit-identical.
constexpr std::uint64_t kTagTrain = 0x747261696eULL;
constexpr std::uint64_t kTagTheta = 0x7468657461ULL;

constexpr std::int64_t kEvalChunk = 2048;
constexpr int kGradRange = 64;

struct EvalPassResult {
    ThetaEstimate est;
    double mean_loss = 0.0;
    double ber = 0.0;
};

// Decodes num_samples draws from `pmf`, binning error indicators by the
// shell of ||z|| and accumulating the BCE multiloss and bit errors over the
// same samples. Chunked with per-chunk derived streams; merge order is chunk
// order, so results do not depend on the worker count.
EvalPassResult evaluate_on_pmf(const TannerGraph& graph, const WeightSet& weights,
                               const DecoderConfig& dec, const ShellPartition& partition,
                               const RadialPmf& pmf, std::int64_t num_samples, double sigma,
                               std::uint64_t base_seed, int workers) {
    const int M = partition.M;
    const int n = graph.n_vars;
    const double llr_scale = 2.0 / (sigma * sigma);
    const std::int64_t num_chunks = (num_samples + kEvalChunk - 1) / kEvalChunk;

    struct Chunk {
        std::vector<std::int64_t> errors, trials;
        double loss_sum = 0.0;
        std::int64_t bit_errors = 0;
    };
    std::vector<Chunk> chunks(static_cast<std::size_t>(std::max<std::int64_t>(num_chunks, 0)));

    parallel_for_chunks(num_chunks, workers, [&](std::int64_t ci) {
        const std::int64_t begin = ci * kEvalChunk;
        const std::int64_t end = std::min(begin + kEvalChunk, num_samples);
        RandomStream stream(mix_seed(base_seed, static_cast<std::uint64_t>(ci)));
        Chunk local;
        local.errors.assign(M, 0);
        local.trials.assign(M, 0);
        DecodeTrace trace;
        Eigen::ArrayXd z, lambda(n);
        BitVec zero_label(static_cast<std::size_t>(n), 0);
        int shell = 0;
        for (std::int64_t i = begin; i < end; ++i) {
            sample_noise(pmf, stream, z, shell);
            for (int v = 0; v < n; ++v) lambda[v] = llr_scale * (1.0 + z[v]);
            wbp_forward(graph, weights, lambda, dec.iterations, dec.clip, trace);
            const Eigen::ArrayXd& x = trace.x_hat[static_cast<std::size_t>(dec.iterations - 1)];
            int bit_errs = 0;
            for (int v = 0; v < n; ++v)
                if (x[v] > 0.5) ++bit_errs;
            ++local.trials[shell];
            if (bit_errs > 0) {
                ++local.errors[shell];
                local.bit_errors += bit_errs;
            }
            local.loss_sum += bce_multiloss(trace, zero_label);
        }
        chunks[static_cast<std::size_t>(ci)] = std::move(local);
    });

    EvalPassResult out;
    out.est.theta = Eigen::ArrayXd::Zero(M);
    out.est.errors = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(M);
    out.est.trials = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(M);
    double loss_sum = 0.0;
    std::int64_t bit_errors = 0;
    for (const Chunk& c : chunks) {
        for (int l = 0; l < M; ++l) {
            out.est.errors[l] += c.errors[l];
            out.est.trials[l] += c.trials[l];
        }
        loss_sum += c.loss_sum;
        bit_errors += c.bit_errors;
    }
    for (int l = 0; l < M; ++l)
        out.est.theta[l] = out.est.trials[l] > 0
                               ? static_cast<double>(out.est.errors[l]) /
                                     static_cast<double>(out.est.trials[l])
                               : 0.0;
    if (num_samples > 0) {
        out.mean_loss = loss_sum / static_cast<double>(num_samples);
        out.ber = static_cast<double>(bit_errors) /
                  (static_cast<double>(num_samples) * static_cast<double>(n));
    }
    return out;
}

// Mean gradient over the batch; per-sample passes run in fixed 64-sample
// ranges whose partial sums merge in range order.
double batch_gradient(const TannerGraph& graph, const WeightSet& weights,
                      const DecoderConfig& dec, const std::vector<TrainSample>& samples,
                      int workers, GradientSet& out) {
    const std::int64_t B = static_cast<std::int64_t>(samples.size());
    const std::int64_t num_ranges = (B + kGradRange - 1) / kGradRange;
    std::vector<GradientSet> partial(static_cast<std::size_t>(num_ranges));
    std::vector<double> loss_partial(static_cast<std::size_t>(num_ranges), 0.0);
    BitVec zero_label(static_cast<std::size_t>(graph.n_vars), 0);

    parallel_for_chunks(num_ranges, workers, [&](std::int64_t ri) {
        const std::int64_t begin = ri * kGradRange;
        const std::int64_t end = std::min(begin + kGradRange, B);
        GradientSet g = GradientSet::zeros(graph, dec.iterations);
        DecodeTrace trace;
        double loss_sum = 0.0;
        for (std::int64_t i = begin; i < end; ++i)
            loss_sum += backward(graph, weights, samples[static_cast<std::size_t>(i)].lambda,
                                 zero_label, dec.iterations, dec.clip, trace, g);
        partial[static_cast<std::size_t>(ri)] = std::move(g);
        loss_partial[static_cast<std::size_t>(ri)] = loss_sum;
    });

    out.set_zero();
    double loss = 0.0;
    for (std::int64_t ri = 0; ri < num_ranges; ++ri) {
        out.add(partial[static_cast<std::size_t>(ri)]);
        loss += loss_partial[static_cast<std::size_t>(ri)];
    }
    if (B > 0) {
        out.scale(1.0 / static_cast<double>(B));
        loss /= static_cast<double>(B);
    }
    return loss;
}

}  // namespace

void TrainRunConfig::validate() const {
    if (snr_list_db.empty()) throw std::invalid_argument("config: snr_list_db must be nonempty");
    if (!(shells.gamma > 0.0 && shells.gamma <= 1.0))
        throw std::invalid_argument("config: shells.gamma must lie in (0, 1]");
    if (shells.M < 2) throw std::invalid_argument("config: shells.M must be >= 2");
    if (!(shells.epsilon_tail > 0.0 && shells.epsilon_tail < 0.1))
        throw std::invalid_argument("config: shells.epsilon_tail must lie in (0, 0.1)");
    if (shells.tail_extend < 0)
        throw std::invalid_argument("config: shells.tail_extend must be >= 0");
    if (decoder.iterations < 1)
        throw std::invalid_argument("config: decoder.iterations must be >= 1");
    if (!(decoder.clip > 0.0)) throw std::invalid_argument("config: decoder.clip must be positive");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (batches_per_epoch < 1)
        throw std::invalid_argument("config: batches_per_epoch must be >= 1");
    if (epochs_per_outer < 1)
        throw std::invalid_argument("config: epochs_per_outer must be >= 1");
    if (max_outer_iters < 0)
        throw std::invalid_argument("config: max_outer_iters must be >= 0");
    if (theta_test_samples < 1)
        throw std::invalid_argument("config: theta_test_samples must be >= 1");
    if (patience < 1) throw std::invalid_argument("config: patience must be >= 1");
    if (!(lr.initial > 0.0) || !(lr.final_value > 0.0))
        throw std::invalid_argument("config: learning rates must be positive");
    if (!(rmsprop.decay > 0.0 && rmsprop.decay < 1.0))
        throw std::invalid_argument("config: rmsprop.decay must lie in (0, 1)");
    if (!(rmsprop.epsilon_stab > 0.0))
        throw std::invalid_argument("config: rmsprop.epsilon_stab must be positive");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
}

ThetaEstimate estimate_theta(const TannerGraph& graph, const WeightSet& weights,
                             const DecoderConfig& dec, const ShellPartition& partition,
                             const RadialPmf& sampling_pmf, std::int64_t num_samples,
                             double sigma, RandomStream& rng, int workers) {
    if (num_samples < 1) throw std::invalid_argument("estimate_theta: num_samples must be >= 1");
    const std::uint64_t base_seed = rng.next_u64();
    return evaluate_on_pmf(graph, weights, dec, partition, sampling_pmf, num_samples, sigma,
                           base_seed, workers)
        .est;
}

void build_training_batch(const ActiveState& state, int batch_size, RandomStream& rng,
                          std::vector<TrainSample>& out) {
    const int S = static_cast<int>(state.snr_states.size());
    if (S == 0) throw std::invalid_argument("build_training_batch: no SNR state");
    out.resize(static_cast<std::size_t>(batch_size));
    Eigen::ArrayXd z;
    int shell = 0;
    for (int i = 0; i < batch_size; ++i) {
        const int s = i % S;
        const SnrShellState& snr = state.snr_states[static_cast<std::size_t>(s)];
        sample_noise(snr.sampling, rng, z, shell);
        const double llr_scale = 2.0 / (snr.sigma * snr.sigma);
        TrainSample& sample = out[static_cast<std::size_t>(i)];
        sample.snr_index = s;
        sample.lambda = llr_scale * (1.0 + z);
    }
}

ActiveTrainResult active_train(const TrainRunConfig& config, const CheckpointSink& sink,
                               const std::optional<ResumeState>& resume) {
    config.validate();
    const TannerGraph graph = build_tanner(config.code.pcm);
    const int S = static_cast<int>(config.snr_list_db.size());
    const int M = config.shells.M;
    const int N1 = config.max_outer_iters;
    const int N2 = config.epochs_per_outer;
    const int total_epochs = N1 * N2;

    ActiveState state;
    state.snr_states.resize(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
        SnrShellState& ss = state.snr_states[static_cast<std::size_t>(s)];
        ss.snr_db = config.snr_list_db[static_cast<std::size_t>(s)];
        ss.sigma = snr_to_sigma(ss.snr_db, config.code.rate);
        ss.partition =
            build_partition(graph.n_vars, ss.sigma, M, config.shells.epsilon_tail);
        ss.base = shell_masses(ss.partition);
        ss.theta_filled = Eigen::ArrayXd::Ones(M);
        ss.sampling = is_pmf(ss.base, ss.theta_filled);  // theta == 1: untilted
        ss.fallback = false;
    }
    state.weights = WeightSet::ones(graph, config.decoder.iterations);
    state.optimizer = OptimizerState::init(graph, config.decoder.iterations,
                                           config.rmsprop.decay, config.rmsprop.epsilon_stab,
                                           config.lr.initial);

    RunReport report;
    std::vector<double> val_history;
    int best_T = 0;
    double best_val = 0.0;
    WeightSet best_weights = state.weights;
    int start_T = 0;

    auto run_validation = [&](int T) {
        OuterIterRecord rec;
        rec.outer_iter = T;
        double loss_sum = 0.0, ber_sum = 0.0;
        for (int s = 0; s < S; ++s) {
            SnrShellState& ss = state.snr_states[static_cast<std::size_t>(s)];
            const std::uint64_t seed =
                mix_seed(mix_seed(mix_seed(config.seed, kTagTheta), static_cast<std::uint64_t>(T)),
                         static_cast<std::uint64_t>(s));
            EvalPassResult pass =
                evaluate_on_pmf(graph, state.weights, config.decoder, ss.partition, ss.sampling,
                                config.theta_test_samples, ss.sigma, seed, config.workers);
            ss.last_estimate = pass.est;
            rec.theta_raw.push_back(pass.est.theta);
            loss_sum += pass.mean_loss;
            ber_sum += pass.ber;
        }
        rec.val_loss = loss_sum / S;
        rec.val_ber = ber_sum / S;
        return rec;
    };

    auto apply_theta_update = [&](OuterIterRecord& rec) {
        for (int s = 0; s < S; ++s) {
            SnrShellState& ss = state.snr_states[static_cast<std::size_t>(s)];
            if (!config.freeze_theta) {
                const ThetaProfile profile =
                    fill_theta(ss.last_estimate.theta, ss.partition, config.shells.gamma,
                               config.shells.tail_extend);
                ss.theta_filled = profile.theta;
                if ((ss.theta_filled * ss.base.masses).sum() > 0.0) {
                    ss.sampling = is_pmf(ss.base, ss.theta_filled);
                    ss.fallback = false;
                } else {
                    // Every retained shell was zeroed; Algorithm would
                    // deadlock, so sample untilted for one iteration.
                    ss.sampling = ss.base;
                    ss.fallback = true;
                }
            }
            rec.theta_filled.push_back(ss.theta_filled);
            rec.pstar.push_back(ss.sampling.masses);
            rec.fallback.push_back(ss.fallback);
        }
    };

    if (resume) {
        if (!resume->weights.congruent_with(graph, config.decoder.iterations))
            throw std::invalid_argument("resume: weights not dimensioned for this config");
        start_T = resume->outer_iter;
        state.outer_iter = start_T;
        state.weights = resume->weights;
        state.optimizer = resume->optimizer;
        if (static_cast<int>(resume->theta_filled.size()) != S)
            throw std::invalid_argument("resume: theta state does not match SNR list");
        for (int s = 0; s < S; ++s) {
            SnrShellState& ss = state.snr_states[static_cast<std::size_t>(s)];
            ss.theta_filled = resume->theta_filled[static_cast<std::size_t>(s)];
            ss.fallback = resume->fallback[static_cast<std::size_t>(s)];
            if (config.freeze_theta || ss.fallback ||
                !((ss.theta_filled * ss.base.masses).sum() > 0.0))
                ss.sampling = ss.base;
            else
                ss.sampling = is_pmf(ss.base, ss.theta_filled);
        }
        val_history = resume->val_loss_history;
        best_T = resume->best_outer_iter;
        best_val = resume->best_val_loss;
        best_weights = resume->best_weights;
    } else {
        // T = 0 baseline: validation of the unit-weight initialization on
        // samples from the untilted pmf; theta is NOT updated here (the
        // first training iteration samples with theta == 1).
        OuterIterRecord rec = run_validation(0);
        for (int s = 0; s < S; ++s) {
            const SnrShellState& ss = state.snr_states[static_cast<std::size_t>(s)];
            rec.theta_filled.push_back(ss.theta_filled);
            rec.pstar.push_back(ss.sampling.masses);
            rec.fallback.push_back(false);
        }
        rec.is_best = true;
        best_T = 0;
        best_val = rec.val_loss;
        best_weights = state.weights;
        val_history.push_back(rec.val_loss);
        report.iters.push_back(rec);
        if (sink) sink(state, rec);
    }

    std::string stop_reason = N1 == start_T ? "max outer iterations reached" : "";
    std::vector<TrainSample> batch;
    GradientSet grads = GradientSet::zeros(graph, config.decoder.iterations);

    for (int T = start_T + 1; T <= N1; ++T) {
        state.outer_iter = T;
        RandomStream train_stream(
            mix_seed(mix_seed(config.seed, kTagTrain), static_cast<std::uint64_t>(T)));

        OuterIterRecord rec;
        rec.outer_iter = T;
        for (int epoch = 0; epoch < N2; ++epoch) {
            const int global_epoch = (T - 1) * N2 + epoch;
            state.optimizer.learning_rate = config.lr.at(global_epoch, total_epochs);
            double epoch_loss = 0.0;
            for (int b = 0; b < config.batches_per_epoch; ++b) {
                build_training_batch(state, config.batch_size, train_stream, batch);
                epoch_loss +=
                    batch_gradient(graph, state.weights, config.decoder, batch, config.workers,
                                   grads);
                rmsprop_step(state.weights, grads, state.optimizer);
            }
            rec.epoch_losses.push_back(epoch_loss / config.batches_per_epoch);
        }

        OuterIterRecord val = run_validation(T);
        rec.val_loss = val.val_loss;
        rec.val_ber = val.val_ber;
        rec.theta_raw = std::move(val.theta_raw);
        apply_theta_update(rec);

        if (rec.val_loss < best_val) {
            best_val = rec.val_loss;
            best_T = T;
            best_weights = state.weights;
            rec.is_best = true;
        }
        val_history.push_back(rec.val_loss);
        report.iters.push_back(rec);
        if (sink) sink(state, rec);

        if (T - best_T >= config.patience) {
            stop_reason = "validation loss stopped decreasing";
            break;
        }
        if (T == N1) stop_reason = "max outer iterations reached";
    }

    report.best_outer_iter = best_T;
    report.best_val_loss = best_val;
    report.stop_reason = stop_reason.empty() ? "max outer iterations reached" : stop_reason;

    ActiveTrainResult result;
    result.weights = best_weights;
    result.report = std::move(report);
    return result;
}

}  // namespace actdec
