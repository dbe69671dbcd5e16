#pragma once

#include <Eigen/Core>

#include "actdec/codes.hpp"
#include "actdec/random.hpp"

namespace actdec {

// BPSK convention: bit 0 -> +1, bit 1 -> -1. The all-zero codeword is the
// all-ones real vector, and positive LLR favors bit 0.

// sigma = 1 / sqrt(2 * rate * 10^(snr_db/10)); SNR is Eb/N0 in dB.
double snr_to_sigma(double snr_db, double rate);
double sigma_to_snr(double sigma, double rate);

struct ChannelConfig {
    double snr_db;
    double rate;
    double sigma;
    static ChannelConfig make(double snr_db, double rate) {
        return {snr_db, rate, snr_to_sigma(snr_db, rate)};
    }
};

Eigen::ArrayXd awgn_noise(int n, double sigma, RandomStream& rng);

// lambda_v = 2 y_v / sigma^2
Eigen::ArrayXd llr(const Eigen::ArrayXd& y, double sigma);

Eigen::ArrayXd bpsk_modulate(const BitVec& bits);

// min{ snr_test, 10 log10(2^(2 rate) - 1) } in dB.
double train_snr_guideline(double snr_test_db, double rate);

}  // namespace actdec
