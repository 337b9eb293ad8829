#pragma once

// One-parameter exponential-family reward models with identity sufficient
// statistic, parameterised by their mean.
//
//   family                      mean space   V(mu)      theta(mu)
//   bernoulli                   [0, 1]       mu(1-mu)   ln(mu/(1-mu))
//   poisson(M)                  (0, M)       mu         ln mu
//   gaussian(sigma)             R            sigma^2    mu/sigma^2
//   gamma(shape k, M)           (0, M)       mu^2/k     -k/mu
//   inverse_gaussian(lambda, M) (0, M)       mu^3/lam   -lam/(2 mu^2)

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "expklms/error.hpp"
#include "expklms/quadrature.hpp"
#include "expklms/random.hpp"

namespace expklms {

enum class FamilyKind { bernoulli, poisson, gaussian, gamma, inverse_gaussian };

inline std::string_view to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::bernoulli: return "bernoulli";
        case FamilyKind::poisson: return "poisson";
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::gamma: return "gamma";
        case FamilyKind::inverse_gaussian: return "inverse_gaussian";
    }
    return "unknown";
}

struct MeanSpace {
    double lower;
    double upper;
    bool lower_closed;
    bool upper_closed;

    bool interior(double mu) const { return mu > lower && mu < upper; }
    bool contains(double mu) const {
        return (mu > lower || (lower_closed && mu == lower)) &&
               (mu < upper || (upper_closed && mu == upper));
    }
    bool closure_contains(double mu) const { return mu >= lower && mu <= upper; }
};

enum class LowerBoundMode { lipschitz, max_variance };

class OpedFamily {
public:
    static OpedFamily bernoulli() { return OpedFamily(FamilyKind::bernoulli, 0.0, 1.0); }

    static OpedFamily poisson(double cap) {
        require_positive("poisson", "cap M", cap);
        return OpedFamily(FamilyKind::poisson, 0.0, cap);
    }

    static OpedFamily gaussian(double sigma) {
        require_positive("gaussian", "sigma", sigma);
        return OpedFamily(FamilyKind::gaussian, sigma, std::numeric_limits<double>::infinity());
    }

    static OpedFamily gamma(double shape, double cap) {
        require_positive("gamma", "shape k", shape);
        require_positive("gamma", "cap M", cap);
        return OpedFamily(FamilyKind::gamma, shape, cap);
    }

    static OpedFamily inverse_gaussian(double lambda, double cap) {
        require_positive("inverse_gaussian", "lambda", lambda);
        require_positive("inverse_gaussian", "cap M", cap);
        return OpedFamily(FamilyKind::inverse_gaussian, lambda, cap);
    }

    FamilyKind kind() const noexcept { return kind_; }

    // sigma (gaussian), shape k (gamma) or lambda (inverse gaussian); 0 otherwise.
    double shape_parameter() const noexcept { return param_; }

    // Upper end M of the mean space; +inf for gaussian.
    double cap() const noexcept { return cap_; }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << to_string(kind_);
        switch (kind_) {
            case FamilyKind::bernoulli: break;
            case FamilyKind::poisson: os << "(M=" << cap_ << ")"; break;
            case FamilyKind::gaussian: os << "(sigma=" << param_ << ")"; break;
            case FamilyKind::gamma: os << "(k=" << param_ << ",M=" << cap_ << ")"; break;
            case FamilyKind::inverse_gaussian: os << "(lambda=" << param_ << ",M=" << cap_ << ")"; break;
        }
        return os.str();
    }

    MeanSpace mean_space() const {
        switch (kind_) {
            case FamilyKind::bernoulli: return {0.0, 1.0, true, true};
            case FamilyKind::gaussian:
                return {-std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), false, false};
            default: return {0.0, cap_, false, false};
        }
    }

    // Supremum of V over the mean space. Every supported family has a finite
    // value because the caps are mandatory.
    std::optional<double> variance_max() const {
        switch (kind_) {
            case FamilyKind::bernoulli: return 0.25;
            case FamilyKind::poisson: return cap_;
            case FamilyKind::gaussian: return param_ * param_;
            case FamilyKind::gamma: return cap_ * cap_ / param_;
            case FamilyKind::inverse_gaussian: return cap_ * cap_ * cap_ / param_;
        }
        return std::nullopt;
    }

    // C_L with |V(x) - V(y)| <= C_L |x - y| on the mean space.
    double lipschitz_constant() const {
        switch (kind_) {
            case FamilyKind::bernoulli: return 1.0;
            case FamilyKind::poisson: return 1.0;
            case FamilyKind::gaussian: return 0.0;
            case FamilyKind::gamma: return 2.0 * cap_ / param_;
            case FamilyKind::inverse_gaussian: return 3.0 * cap_ * cap_ / param_;
        }
        return 0.0;
    }

    double variance(double mu) const {
        require_interior("variance", mu);
        return variance_unchecked(mu);
    }

    double natural_param(double mu) const {
        require_interior("natural_param", mu);
        switch (kind_) {
            case FamilyKind::bernoulli: return std::log(mu / (1.0 - mu));
            case FamilyKind::poisson: return std::log(mu);
            case FamilyKind::gaussian: return mu / (param_ * param_);
            case FamilyKind::gamma: return -param_ / mu;
            case FamilyKind::inverse_gaussian: return -param_ / (2.0 * mu * mu);
        }
        return 0.0;
    }

    // kl(mu1, mu2) between the members with means mu1 and mu2. mu1 may sit on
    // the closure of the mean space; mu2 must be interior except for the
    // Bernoulli endpoints, where the analytic limits apply (+inf when the
    // limit diverges).
    double kl(double mu1, double mu2) const {
        if (std::isnan(mu1) || std::isnan(mu2)) {
            throw DomainError(describe() + ": kl with NaN argument");
        }
        const auto space = mean_space();
        if (!space.closure_contains(mu1) || !std::isfinite(mu1)) {
            throw DomainError(describe() + ": kl first mean " + fmt_num(mu1) +
                              " outside the mean space");
        }
        const bool mu2_ok = kind_ == FamilyKind::bernoulli ? space.contains(mu2)
                                                          : space.interior(mu2);
        if (!mu2_ok) {
            throw DomainError(describe() + ": kl second mean " + fmt_num(mu2) +
                              " outside the mean space");
        }
        return kl_extended(mu1, mu2);
    }

    // Closed-form kl on the natural support of the family, ignoring the cap M.
    // Empirical means of Poisson, gamma and inverse-gaussian rewards can exceed
    // M, and the policies need kl there. Boundary conventions:
    //   bernoulli kl(0,q) = -ln(1-q), kl(1,q) = -ln q, kl(p,0) = kl(p,1) = +inf for p != q
    //   poisson   kl(0,q) = q, kl(p,0) = +inf for p > 0
    double kl_extended(double mu1, double mu2) const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (mu1 == mu2) return 0.0;
        switch (kind_) {
            case FamilyKind::bernoulli: {
                if (mu1 < 0.0 || mu1 > 1.0 || mu2 < 0.0 || mu2 > 1.0) break;
                if (mu2 == 0.0 || mu2 == 1.0) return inf;
                if (mu1 == 0.0) return -std::log1p(-mu2);
                if (mu1 == 1.0) return -std::log(mu2);
                return mu1 * std::log(mu1 / mu2) + (1.0 - mu1) * std::log((1.0 - mu1) / (1.0 - mu2));
            }
            case FamilyKind::poisson: {
                if (mu1 < 0.0 || mu2 < 0.0) break;
                if (mu2 == 0.0) return inf;
                if (mu1 == 0.0) return mu2;
                return mu2 - mu1 + mu1 * std::log(mu1 / mu2);
            }
            case FamilyKind::gaussian: {
                const double d = mu1 - mu2;
                return d * d / (2.0 * param_ * param_);
            }
            case FamilyKind::gamma: {
                if (mu1 <= 0.0 || mu2 <= 0.0) break;
                const double r = mu1 / mu2;
                return param_ * ((r - 1.0) - std::log(r));
            }
            case FamilyKind::inverse_gaussian: {
                if (mu1 <= 0.0 || mu2 <= 0.0) break;
                const double d = mu1 - mu2;
                return param_ * d * d / (2.0 * mu1 * mu2 * mu2);
            }
        }
        throw DomainError(describe() + ": kl(" + fmt_num(mu1) + ", " + fmt_num(mu2) +
                          ") outside the natural support");
    }

    // kl(mu1, mu2) = integral from mu1 to mu2 of (x - mu1) / V(x) dx, evaluated
    // numerically. Independent of the closed forms above.
    double kl_quadrature(double mu1, double mu2, double abs_tol = 1e-10,
                         std::size_t max_intervals = 1'000'000) const {
        require_interior("kl_quadrature", mu1);
        require_interior("kl_quadrature", mu2);
        auto integrand = [this, mu1](double x) { return (x - mu1) / variance_unchecked(x); };
        return integrate(integrand, mu1, mu2, abs_tol, max_intervals).value;
    }

    // kl(a,b) + kl(b,c) - kl(a,c) + (mu_b - mu_a)(theta_c - theta_b); zero in
    // exact arithmetic.
    double bregman_residual(double mu_a, double mu_b, double mu_c) const {
        const double lhs = kl(mu_a, mu_b) + kl(mu_b, mu_c);
        return lhs - kl(mu_a, mu_c) + (mu_b - mu_a) * (natural_param(mu_c) - natural_param(mu_b));
    }

    // Pinsker-type lower bound on kl(mu1, mu2).
    double kl_lower_bound(double mu1, double mu2, LowerBoundMode mode) const {
        require_interior("kl_lower_bound", mu1);
        require_interior("kl_lower_bound", mu2);
        const double gap = std::abs(mu1 - mu2);
        if (gap == 0.0) return 0.0;
        const double sq = gap * gap;
        if (mode == LowerBoundMode::max_variance) {
            const auto vmax = variance_max();
            if (!vmax) {
                throw DomainError(describe() + ": max_variance bound needs a finite variance cap");
            }
            return sq / (2.0 * *vmax);
        }
        const double cl = lipschitz_constant();
        const double first = sq / (variance_unchecked(mu1) + cl * gap);
        const double second = sq / (variance_unchecked(mu2) + cl * gap);
        return 0.5 * std::max(first, second);
    }

    // One reward draw with mean mu. Bernoulli accepts the endpoints.
    double sample(double mu, RandomStream& rng) const {
        if (kind_ == FamilyKind::bernoulli) {
            if (!(mu >= 0.0 && mu <= 1.0)) {
                throw DomainError(describe() + ": sample mean " + fmt_num(mu) + " outside [0, 1]");
            }
            return rng.uniform() < mu ? 1.0 : 0.0;
        }
        require_interior("sample", mu);
        return sample_unchecked(mu, rng);
    }

    // Hot-path variant for callers that validated mu already.
    double sample_unchecked(double mu, RandomStream& rng) const {
        switch (kind_) {
            case FamilyKind::bernoulli: return rng.uniform() < mu ? 1.0 : 0.0;
            case FamilyKind::poisson: {
                std::poisson_distribution<std::int64_t> dist(mu);
                return static_cast<double>(dist(rng.engine()));
            }
            case FamilyKind::gaussian: return mu + param_ * rng.normal();
            case FamilyKind::gamma: {
                std::gamma_distribution<double> dist(param_, mu / param_);
                return dist(rng.engine());
            }
            case FamilyKind::inverse_gaussian: {
                // Michael, Schucany and Haas transformation with one rejection step.
                const double nu = rng.normal();
                const double y = nu * nu;
                const double mu_y = mu * y;
                const double x = mu + mu * mu_y / (2.0 * param_) -
                                 mu / (2.0 * param_) * std::sqrt(4.0 * param_ * mu_y + mu_y * mu_y);
                return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
            }
        }
        return mu;
    }

    bool operator==(const OpedFamily&) const = default;

private:
    OpedFamily(FamilyKind kind, double param, double cap) : kind_(kind), param_(param), cap_(cap) {}

    static void require_positive(std::string_view family, std::string_view what, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string(family) + ": " + std::string(what) +
                              " must be a positive finite number, got " + fmt_num(v));
        }
    }

    static std::string fmt_num(double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    }

    void require_interior(std::string_view op, double mu) const {
        if (!mean_space().interior(mu)) {
            throw DomainError(describe() + ": " + std::string(op) + " requires a mean strictly inside the mean space, got " +
                              fmt_num(mu));
        }
    }

    double variance_unchecked(double mu) const {
        switch (kind_) {
            case FamilyKind::bernoulli: return mu * (1.0 - mu);
            case FamilyKind::poisson: return mu;
            case FamilyKind::gaussian: return param_ * param_;
            case FamilyKind::gamma: return mu * mu / param_;
            case FamilyKind::inverse_gaussian: return mu * mu * mu / param_;
        }
        return 0.0;
    }

    FamilyKind kind_;
    double param_;
    double cap_;
};

}  // namespace expklms
