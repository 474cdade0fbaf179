#pragma once

#include <span>
#include <string>

#include "locstat/common.hpp"
#include "locstat/models.hpp"

namespace locstat {

enum class ContrastKind { LeastSquares, LeastAbsoluteValue, GaussianQmle, LarchLs, PoissonQmle };

std::string contrast_name(ContrastKind k);
ContrastKind contrast_from_name(const std::string& name);

/// A contrast function bound to the model family whose conditional moments it
/// scores. The moment order is the L^p scale the estimator theory runs on
/// (metadata, recorded per contrast).
struct ContrastSpec {
    ContrastKind kind = ContrastKind::LeastSquares;
    Family family = Family::TvAr1;
    int p = 0, q = 0;
    int p2 = 0, q2 = 0;
    int threshold_ell = 1;
    int moment_order = 2;
    double variance_floor = 1e-8;  // underline-M^2 and underline-lambda

    int param_dim() const { return family_param_dim(family, p, q, p2, q2); }
    std::vector<std::string> param_names() const { return family_param_names(family, p, q, p2, q2); }

    /// Validates kind/family compatibility and fills the moment order.
    static ContrastSpec make(ContrastKind kind, Family family, int p = 0, int q = 0,
                             int p2 = 0, int q2 = 0, int threshold_ell = 1);
    static ContrastSpec for_model(ContrastKind kind, const ModelSpec& model);
};

struct ConditionalMoments {
    double mean = 0.0;       // f_t
    double scale = 0.0;      // M_t (affine families)
    double intensity = 0.0;  // lambda_t (INGARCH families)
    bool floored = false;
};

/// Evaluates the contrast over a fixed observed series. prepare(theta, t_max)
/// runs whatever latent recursion the family needs (sigma^2, ARMA residuals,
/// lambda) once with zero initialization; value(t) then scores time t using
/// exactly the observed past x_{t-1},...,x_1 zero-extended.
class ContrastEvaluator {
public:
    ContrastEvaluator(ContrastSpec spec, std::span<const double> x);

    void prepare(std::span<const double> theta, int t_max);
    double value(int t);                  // t is 1-based
    ConditionalMoments moments(int t);    // conditional moments given the past
    int floor_count() const { return floor_count_; }
    void reset_floor_count() { floor_count_ = 0; }
    const ContrastSpec& spec() const { return spec_; }

private:
    double x_at(int t) const {
        return (t >= 1 && t <= n_) ? x_[static_cast<std::size_t>(t - 1)] : 0.0;
    }
    double xsq_at(int t) const {
        return (t >= 1 && t <= n_) ? xsq_[static_cast<std::size_t>(t - 1)] : 0.0;
    }
    double floored_m2(double m2);
    double floored_lambda(double lam);
    double power_dot(int t, bool squared) const;  // sum_j w_j x_{t-j} (or x^2)
    double linear_form(int t) const;              // ARCH-in-mean style lags

    ContrastSpec spec_;
    std::span<const double> x_;
    int n_ = 0;
    VecD xsq_;        // cached squares (ARCH / LARCH kinds)
    VecD theta_;
    int prepared_to_ = 0;
    int floor_count_ = 0;

    VecD weights_;    // power-law lag weights for the current theta
    VecD logj_;
    VecD m2_;         // GARCH-type sigma^2_t, 1-based
    VecD eps_;        // ARMA residuals
    VecD fmean_;      // conditional means (ARMA variants)
    VecD lin_;        // LARCH linear form
    VecD lam_;        // INGARCH intensities
};

/// (x1 - theta x2)^2
double contrast_ls(double x1, double x2, double theta);
/// |x1 - theta x2|. Not differentiable at the fit: usable only with
/// derivative-free optimizers.
double contrast_lav(double x1, double x2, double theta);

/// past is newest-first: x_{t-1}, x_{t-2}, ..., x_1.
ConditionalMoments cond_moments(const ContrastSpec& spec, std::span<const double> theta,
                                std::span<const double> past);
double contrast_gqmle(const ContrastSpec& spec, std::span<const double> theta, double x_t,
                      std::span<const double> past);
double contrast_larch(const ContrastSpec& spec, std::span<const double> theta, double x_t,
                      std::span<const double> past);
double contrast_poisson(const ContrastSpec& spec, std::span<const double> theta, double x_t,
                        std::span<const double> past);

}  // namespace locstat
