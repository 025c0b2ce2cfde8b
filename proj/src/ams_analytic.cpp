#include "kams/ams_analytic.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kams/errors.hpp"

namespace kams {

void ExpOnOffSystem::validate() const {
    std::ostringstream problems;
    auto bad = [&problems](const char* msg) { problems << "\n  - " << msg; };
    if (n_sources <= 0) bad("n_sources must be positive");
    if (n_sources > 4000) bad("n_sources above 4000 exceeds the dense solver's range");
    if (!(peak_rate > 0)) bad("peak_rate must be > 0");
    if (!(service_rate > 0)) bad("service_rate must be > 0");
    if (!(mean_on > 0)) bad("mean_on must be > 0");
    if (!(mean_off > 0)) bad("mean_off must be > 0");
    const std::string s = problems.str();
    if (!s.empty()) throw ValidationError("invalid ExpOnOffSystem:" + s);

    const double load = n_sources * peak_rate * mean_on / (mean_on + mean_off);
    if (!(load < service_rate)) {
        throw UnstableSystem("ExpOnOffSystem: offered load must stay below the service rate");
    }
}

AmsSolution::AmsSolution(const ExpOnOffSystem& sys) {
    sys.validate();
    const int n = sys.n_sources + 1;  // states: number of sources on
    const double on_rate = 1.0 / sys.mean_off;   // off -> on
    const double off_rate = 1.0 / sys.mean_on;   // on -> off

    // dF_k/dx * d_k = sum_j Q[j][k] F_j: generalized problem A v = z D v
    // with A the transposed generator of the birth-death chain and
    // D = diag(k*nu - C). D may be singular (a state can sit exactly at the
    // service rate); the QZ decomposition reports those directions as
    // infinite eigenvalues and we drop them.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double up = (sys.n_sources - k) * on_rate;   // k -> k+1
        const double down = k * off_rate;                  // k -> k-1
        a(k, k) = -(up + down);
        if (k > 0) a(k, k - 1) = (sys.n_sources - (k - 1)) * on_rate;
        if (k + 1 < n) a(k, k + 1) = (k + 1) * off_rate;
        d(k, k) = k * sys.peak_rate - sys.service_rate;
    }

    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(a, d, true);
    if (ges.info() != Eigen::Success) {
        throw NumericalDegeneracy("AmsSolution: QZ iteration failed to converge");
    }

    // stationary distribution of the modulating chain: Binomial(N, p_on)
    const double p_on = sys.mean_on / (sys.mean_on + sys.mean_off);
    Eigen::VectorXd pi(n);
    {
        const double lp = std::log(p_on), lq = std::log1p(-p_on);
        double lchoose = 0.0;
        for (int k = 0; k < n; ++k) {
            pi(k) = std::exp(lchoose + k * lp + (sys.n_sources - k) * lq);
            lchoose += std::log(static_cast<double>(sys.n_sources - k)) -
                       std::log(static_cast<double>(k + 1));
        }
        pi /= pi.sum();
    }

    std::vector<int> overload_states;
    for (int k = 0; k < n; ++k) {
        if (d(k, k) > 0) overload_states.push_back(k);
    }
    if (overload_states.empty()) return;  // queue never builds: P(Q>x) = 0

    // keep the strictly stable modes; z = 0 belongs to pi and is handled
    // directly, infinite modes carry no x-dependence
    const double beta_tol = 1e-12 * a.norm();
    std::vector<int> kept;
    double z_scale = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(ges.betas()(i)) <= beta_tol) continue;
        const std::complex<double> z = ges.alphas()(i) / ges.betas()(i);
        z_scale = std::max(z_scale, std::abs(z));
    }
    for (int i = 0; i < n; ++i) {
        if (std::abs(ges.betas()(i)) <= beta_tol) continue;
        const std::complex<double> z = ges.alphas()(i) / ges.betas()(i);
        if (z.real() < -1e-9 * z_scale) kept.push_back(i);
    }
    if (kept.size() != overload_states.size()) {
        throw NumericalDegeneracy(
            "AmsSolution: stable eigenvalue count does not match the overload state count");
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (std::size_t j = i + 1; j < kept.size(); ++j) {
            const auto zi = ges.alphas()(kept[i]) / ges.betas()(kept[i]);
            const auto zj = ges.alphas()(kept[j]) / ges.betas()(kept[j]);
            if (std::abs(zi - zj) < 1e-12 * std::max(1.0, z_scale)) {
                throw NumericalDegeneracy("AmsSolution: eigenvalues are numerically coincident");
            }
        }
    }

    // F(x) = pi + sum_i a_i phi_i e^{z_i x}; the queue cannot sit empty in a
    // state that drains nowhere, so F_k(0) = 0 on every overload state
    const auto m = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXcd bc(m, m);
    Eigen::VectorXcd rhs(m);
    const auto evecs = ges.eigenvectors();
    for (Eigen::Index r = 0; r < m; ++r) {
        const int k = overload_states[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m; ++c) bc(r, c) = evecs(k, kept[static_cast<std::size_t>(c)]);
        rhs(r) = -pi(k);
    }
    const Eigen::VectorXcd coef = bc.colPivHouseholderQr().solve(rhs);

    rates_.resize(kept.size());
    weights_.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        rates_[i] = ges.alphas()(kept[i]) / ges.betas()(kept[i]);
        // P(Q > x) = -sum_i a_i (sum_k phi_i[k]) e^{z_i x}
        weights_[i] = -coef(static_cast<Eigen::Index>(i)) *
                      evecs.col(kept[i]).sum();
    }
}

double AmsSolution::overflow_probability(double x) const {
    if (x < 0) x = 0;
    std::complex<double> p = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) {
        p += weights_[i] * std::exp(rates_[i] * x);
    }
    return std::clamp(p.real(), 0.0, 1.0);
}

double AmsSolution::dominant_decay_rate() const {
    double dom = -std::numeric_limits<double>::infinity();
    for (const auto& z : rates_) dom = std::max(dom, z.real());
    return dom;
}

double ams_overflow_probability(const ExpOnOffSystem& sys, double x) {
    return AmsSolution(sys).overflow_probability(x);
}

}  // namespace kams
