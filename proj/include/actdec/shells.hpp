#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>

#include "actdec/random.hpp"

namespace actdec {

// Scaled-Chi density of the noise radius r = ||z|| for n i.i.d. N(0, sigma^2)
// coordinates: g(r) = r^(n-1) / (2^(n/2-1) sigma^n Gamma(n/2)) * exp(-r^2 / (2 sigma^2)).
double chi_pdf(double r, int n, double sigma);
// CDF of the same law via the regularized lower incomplete gamma.
double chi_cdf(double r, int n, double sigma);
// Inverse CDF by bisection; throws after 200 bracketing/bisection failures.
double chi_cdf_inv(double p, int n, double sigma);

// Uniform radial segmentation of the observation space into M shells over
// [r_min, r_max].
struct ShellPartition {
    int n = 0;
    double sigma = 0.0;
    int M = 0;
    double r_min = 0.0, r_max = 0.0;

    double delta_r() const { return (r_max - r_min) / M; }
    // boundary(0) = r_min, ..., boundary(M) = r_max (exact at the ends).
    double boundary(int i) const {
        if (i <= 0) return r_min;
        if (i >= M) return r_max;
        return r_min + delta_r() * i;
    }
    double center(int shell) const { return 0.5 * (boundary(shell) + boundary(shell + 1)); }
    // Shell containing radius r, clamped to [0, M-1].
    int index_of(double r) const;
};

// Range chosen so Pr(r outside) < epsilon, split as epsilon/2 per tail.
ShellPartition build_partition(int n, double sigma, int M, double epsilon);
ShellPartition partition_from_range(int n, double sigma, int M, double r_min, double r_max);

// Discrete distribution over the shells of a partition.
struct RadialPmf {
    ShellPartition partition;
    Eigen::ArrayXd masses;      // size M, nonnegative, sums to 1
    Eigen::ArrayXd cumulative;  // inclusive prefix sums, cumulative[M-1] == 1

    static RadialPmf from_masses(ShellPartition partition, Eigen::ArrayXd masses);
};

// P_l = integral of chi_pdf over shell l, renormalized over [r_min, r_max].
RadialPmf shell_masses(const ShellPartition& partition);

// Error-ratio profile over shells. theta[l] estimates the probability that
// the decoder errs conditioned on the noise radius falling in shell l.
struct ThetaProfile {
    Eigen::ArrayXd theta;  // size M, entries in [0, 1]
    Eigen::Array<std::int64_t, Eigen::Dynamic, 1> errors, trials;
    double gamma = 1.0;

    static ThetaProfile uniform_ones(int M);
};

// Tilted sampling pmf: P*_l = sqrt(theta_l) P_l / sum_j sqrt(theta_j) P_j.
// Throws std::invalid_argument when every theta_l * P_l is zero; callers
// fall back to the untilted pmf in that case.
RadialPmf is_pmf(const RadialPmf& base, const Eigen::ArrayXd& theta);
RadialPmf is_pmf(const RadialPmf& base, const ThetaProfile& profile);

// Repairs a raw Monte Carlo theta estimate: linear interpolation between
// consecutive nonzero entries, constant extension of the first nonzero value
// down `tail_extend` shells and of the last nonzero value up to M, then
// zeroing of every entry greater than gamma. All-zero input stays all-zero.
ThetaProfile fill_theta(const Eigen::ArrayXd& theta_raw, const ShellPartition& partition,
                        double gamma, int tail_extend);

// Draws a shell from the pmf, a radius uniformly within that shell, and a
// uniformly random direction; returns z = r * direction and the shell index
// of ||z||.
void sample_noise(const RadialPmf& pmf, RandomStream& rng, Eigen::ArrayXd& z_out,
                  int& shell_out);
struct ShellSample {
    Eigen::ArrayXd z;
    int shell_index;
};
ShellSample sample_noise(const RadialPmf& pmf, RandomStream& rng);

// CSV schema: shell_index,r_lo,r_hi,theta,errors,trials (1-based shells).
std::string theta_profile_csv(const ThetaProfile& profile, const ShellPartition& partition);
ThetaProfile parse_theta_csv(std::string_view text, const ShellPartition& partition);

}  // namespace actdec
