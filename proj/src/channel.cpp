#include "actdec/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace actdec {

double snr_to_sigma(double snr_db, double rate) {
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("snr_to_sigma: rate must lie in (0, 1)");
    return 1.0 / std::sqrt(2.0 * rate * std::pow(10.0, snr_db / 10.0));
}

double sigma_to_snr(double sigma, double rate) {
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("sigma_to_snr: rate must lie in (0, 1)");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma_to_snr: sigma must be positive");
    return 10.0 * std::log10(1.0 / (2.0 * rate * sigma * sigma));
}

Eigen::ArrayXd awgn_noise(int n, double sigma, RandomStream& rng) {
    if (n < 1) throw std::invalid_argument("awgn_noise: n must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("awgn_noise: sigma must be positive");
    Eigen::ArrayXd z(n);
    rng.gaussian_fill(z);
    return z * sigma;
}

Eigen::ArrayXd llr(const Eigen::ArrayXd& y, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("llr: sigma must be positive");
    return (2.0 / (sigma * sigma)) * y;
}

Eigen::ArrayXd bpsk_modulate(const BitVec& bits) {
    Eigen::ArrayXd x(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) x[static_cast<Eigen::Index>(i)] = bits[i] ? -1.0 : 1.0;
    return x;
}

double train_snr_guideline(double snr_test_db, double rate) {
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("train_snr_guideline: rate must lie in (0, 1)");
    const double cap = 10.0 * std::log10(std::pow(2.0, 2.0 * rate) - 1.0);
    return std::min(snr_test_db, cap);
}

}  // namespace actdec
