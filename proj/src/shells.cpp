#include "actdec/shells.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "actdec/special.hpp"
#include "actdec/util.hpp"

namespace actdec {

double chi_pdf(double r, int n, double sigma) {
    if (r < 0.0) throw std::invalid_argument("chi_pdf: r must be nonnegative");
    if (n < 1 || !(sigma > 0.0)) throw std::invalid_argument("chi_pdf: bad n or sigma");
    if (r == 0.0) return n == 1 ? std::sqrt(2.0 / 3.14159265358979323846) / sigma : 0.0;
    const double a = 0.5 * n;
    const double log_pdf = (n - 1) * std::log(r) - (a - 1.0) * std::log(2.0) -
                           n * std::log(sigma) - std::lgamma(a) -
                           r * r / (2.0 * sigma * sigma);
    return std::exp(log_pdf);
}

double chi_cdf(double r, int n, double sigma) {
    if (r <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * n, r * r / (2.0 * sigma * sigma));
}

double chi_cdf_inv(double p, int n, double sigma) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("chi_cdf_inv: p outside [0, 1]");
    if (p == 0.0) return 0.0;
    double lo = 0.0;
    double hi = sigma * (std::sqrt(static_cast<double>(n)) + 1.0);
    int expand = 0;
    while (chi_cdf(hi, n, sigma) < p) {
        hi *= 2.0;
        if (++expand > 200)
            throw std::runtime_error("chi_cdf_inv: bracketing failed after 200 expansions");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi_cdf(mid, n, sigma) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

int ShellPartition::index_of(double r) const {
    if (r <= r_min) return 0;
    if (r >= r_max) return M - 1;
    const int idx = static_cast<int>((r - r_min) / delta_r());
    return std::clamp(idx, 0, M - 1);
}

ShellPartition partition_from_range(int n, double sigma, int M, double r_min, double r_max) {
    if (n < 1) throw std::invalid_argument("partition: n must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("partition: sigma must be positive");
    if (M < 1) throw std::invalid_argument("partition: M must be >= 1");
    if (!(r_min >= 0.0) || !(r_max > r_min))
        throw std::invalid_argument("partition: need 0 <= r_min < r_max");
    return ShellPartition{n, sigma, M, r_min, r_max};
}

ShellPartition build_partition(int n, double sigma, int M, double epsilon) {
    if (M < 2) throw std::invalid_argument("build_partition: M must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 0.1))
        throw std::invalid_argument("build_partition: epsilon must lie in (0, 0.1)");
    const double r_min = chi_cdf_inv(epsilon / 2.0, n, sigma);
    const double r_max = chi_cdf_inv(1.0 - epsilon / 2.0, n, sigma);
    return partition_from_range(n, sigma, M, r_min, r_max);
}

RadialPmf RadialPmf::from_masses(ShellPartition partition, Eigen::ArrayXd masses) {
    if (masses.size() != partition.M)
        throw std::invalid_argument("RadialPmf: mass count does not match M");
    if ((masses < 0.0).any()) throw std::invalid_argument("RadialPmf: negative mass");
    const double total = masses.sum();
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("RadialPmf: masses sum to " + format_double(total));
    RadialPmf pmf;
    pmf.partition = partition;
    pmf.masses = std::move(masses);
    pmf.cumulative.resize(pmf.masses.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pmf.masses.size(); ++i) {
        acc += pmf.masses[i];
        pmf.cumulative[i] = acc;
    }
    pmf.cumulative[pmf.masses.size() - 1] = 1.0;
    return pmf;
}

RadialPmf shell_masses(const ShellPartition& partition) {
    Eigen::ArrayXd raw(partition.M);
    double prev = chi_cdf(partition.boundary(0), partition.n, partition.sigma);
    for (int l = 0; l < partition.M; ++l) {
        const double cur = chi_cdf(partition.boundary(l + 1), partition.n, partition.sigma);
        raw[l] = std::max(0.0, cur - prev);
        prev = cur;
    }
    const double total = raw.sum();
    if (!(total > 0.0)) throw std::runtime_error("shell_masses: zero mass over the range");
    return RadialPmf::from_masses(partition, raw / total);
}

ThetaProfile ThetaProfile::uniform_ones(int M) {
    ThetaProfile p;
    p.theta = Eigen::ArrayXd::Ones(M);
    p.errors = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(M);
    p.trials = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(M);
    p.gamma = 1.0;
    return p;
}

RadialPmf is_pmf(const RadialPmf& base, const Eigen::ArrayXd& theta) {
    if (theta.size() != base.masses.size())
        throw std::invalid_argument("is_pmf: theta size does not match M");
    if ((theta < 0.0).any() || (theta > 1.0).any())
        throw std::invalid_argument("is_pmf: theta outside [0, 1]");
    Eigen::ArrayXd tilted = theta.sqrt() * base.masses;
    const double total = tilted.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("is_pmf: every theta_l * P_l is zero; fall back to the base pmf");
    return RadialPmf::from_masses(base.partition, tilted / total);
}

RadialPmf is_pmf(const RadialPmf& base, const ThetaProfile& profile) {
    return is_pmf(base, profile.theta);
}

ThetaProfile fill_theta(const Eigen::ArrayXd& theta_raw, const ShellPartition& partition,
                        double gamma, int tail_extend) {
    const int M = partition.M;
    if (theta_raw.size() != M) throw std::invalid_argument("fill_theta: size does not match M");
    if ((theta_raw < 0.0).any() || (theta_raw > 1.0).any())
        throw std::invalid_argument("fill_theta: entries outside [0, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("fill_theta: gamma must lie in (0, 1]");
    if (tail_extend < 0) throw std::invalid_argument("fill_theta: tail_extend must be >= 0");

    ThetaProfile out;
    out.gamma = gamma;
    out.errors = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(M);
    out.trials = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(M);
    out.theta = Eigen::ArrayXd::Zero(M);

    std::vector<int> knots;
    for (int l = 0; l < M; ++l)
        if (theta_raw[l] > 0.0) knots.push_back(l);
    if (knots.empty()) return out;  // all-zero stays all-zero; caller handles fallback

    const int l_min = knots.front();
    const int l_max = knots.back();

    // Knots keep their raw values; gaps between consecutive knots are filled
    // by linear interpolation in the shell radius.
    for (int l : knots) out.theta[l] = theta_raw[l];
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        const int a = knots[j], b = knots[j + 1];
        if (b - a <= 1) continue;
        const double ra = partition.center(a), rb = partition.center(b);
        const double slope = (theta_raw[b] - theta_raw[a]) / (rb - ra);
        for (int l = a + 1; l < b; ++l)
            out.theta[l] = theta_raw[a] + slope * (partition.center(l) - ra);
    }

    // Constant extension below the first and above the last knot.
    const int lo = std::max(0, l_min - tail_extend);
    for (int l = lo; l < l_min; ++l) out.theta[l] = theta_raw[l_min];
    for (int l = l_max + 1; l < M; ++l) out.theta[l] = theta_raw[l_max];

    // Shells noisier than gamma are never sampled.
    for (int l = 0; l < M; ++l)
        if (out.theta[l] > gamma) out.theta[l] = 0.0;

    return out;
}

void sample_noise(const RadialPmf& pmf, RandomStream& rng, Eigen::ArrayXd& z_out, int& shell_out) {
    const ShellPartition& part = pmf.partition;
    // Shell by inverse-CDF lookup on the cumulative masses.
    const double u = rng.uniform01();
    const double* begin = pmf.cumulative.data();
    const double* end = begin + pmf.cumulative.size();
    int shell = static_cast<int>(std::upper_bound(begin, end, u) - begin);
    if (shell >= part.M) shell = part.M - 1;

    const double radius = rng.uniform(part.boundary(shell), part.boundary(shell + 1));

    z_out.resize(part.n);
    rng.gaussian_fill(z_out);
    const double norm = std::sqrt((z_out * z_out).sum());
    if (norm == 0.0) {
        // Probability-zero corner; point the sample along the first axis.
        z_out.setZero();
        z_out[0] = radius;
    } else {
        z_out *= radius / norm;
    }
    shell_out = part.index_of(std::sqrt((z_out * z_out).sum()));
}

ShellSample sample_noise(const RadialPmf& pmf, RandomStream& rng) {
    ShellSample s;
    sample_noise(pmf, rng, s.z, s.shell_index);
    return s;
}

std::string theta_profile_csv(const ThetaProfile& profile, const ShellPartition& partition) {
    if (profile.theta.size() != partition.M)
        throw std::invalid_argument("theta_profile_csv: profile does not match partition");
    std::ostringstream os;
    os << "shell_index,r_lo,r_hi,theta,errors,trials\n";
    for (int l = 0; l < partition.M; ++l) {
        os << l + 1 << ',' << format_double(partition.boundary(l)) << ','
           << format_double(partition.boundary(l + 1)) << ',' << format_double(profile.theta[l])
           << ',' << profile.errors[l] << ',' << profile.trials[l] << '\n';
    }
    return os.str();
}

ThetaProfile parse_theta_csv(std::string_view text, const ShellPartition& partition) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line)) throw ParseError(1, "empty theta CSV");
    if (line != "shell_index,r_lo,r_hi,theta,errors,trials")
        throw ParseError(1, "unexpected theta CSV header: " + line);

    ThetaProfile out;
    out.theta = Eigen::ArrayXd::Zero(partition.M);
    out.errors = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(partition.M);
    out.trials = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>::Zero(partition.M);

    int rows = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 6) throw ParseError(lineno, "expected 6 fields");
        const int idx = std::stoi(fields[0]);
        if (idx < 1 || idx > partition.M)
            throw ParseError(lineno, "shell_index " + fields[0] + " does not match M = " +
                                         std::to_string(partition.M));
        const double theta = std::stod(fields[3]);
        if (!(theta >= 0.0 && theta <= 1.0)) throw ParseError(lineno, "theta outside [0, 1]");
        out.theta[idx - 1] = theta;
        out.errors[idx - 1] = std::stoll(fields[4]);
        out.trials[idx - 1] = std::stoll(fields[5]);
        ++rows;
    }
    if (rows != partition.M)
        throw ParseError(lineno, "theta CSV has " + std::to_string(rows) + " rows, expected M = " +
                                     std::to_string(partition.M));
    return out;
}

}  // namespace actdec
