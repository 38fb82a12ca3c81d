#include "atomlink/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "atomlink/error.hpp"
#include "atomlink/rng.hpp"

namespace atomlink::analysis {
namespace {

constexpr double kPi = std::numbers::pi;

bool all_weighted(std::span<const FitPoint> points) {
    return std::all_of(points.begin(), points.end(), [](const FitPoint& p) { return p.sigma > 0.0; });
}

double weight(const FitPoint& p, bool weighted) { return weighted ? 1.0 / (p.sigma * p.sigma) : 1.0; }

void check_finite(std::span<const FitPoint> points) {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.sigma) || p.sigma < 0.0) {
            throw FitError("fit input contains non-finite values or negative sigma");
        }
    }
}

// Generic Levenberg-Marquardt for a small fixed parameter count. `model`
// fills residual r_i = y_i - f_i and the Jacobian of f.
template <int N>
struct LmResult {
    Eigen::Matrix<double, N, 1> params;
    Eigen::Matrix<double, N, N> normal;
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <int N, class Model>
LmResult<N> levenberg_marquardt(std::span<const FitPoint> points, bool weighted,
                                       Eigen::Matrix<double, N, 1> p, Model model) {
    using Vec = Eigen::Matrix<double, N, 1>;
    using Mat = Eigen::Matrix<double, N, N>;

    auto evaluate = [&](const Vec& q, Mat& jtj, Vec& jtr) {
        jtj.setZero();
        jtr.setZero();
        double chi2 = 0.0;
        Vec grad;
        for (const auto& pt : points) {
            const double w = weight(pt, weighted);
            const double f = model(q, pt.x, grad);
            const double r = pt.y - f;
            chi2 += w * r * r;
            jtj.noalias() += w * grad * grad.transpose();
            jtr.noalias() += w * r * grad;
        }
        return chi2;
    };

    LmResult<N> out;
    Mat jtj;
    Vec jtr;
    double chi2 = evaluate(p, jtj, jtr);
    double lambda = 1e-3;
    int it = 0;
    for (; it < 500; ++it) {
        Mat a = jtj;
        for (int i = 0; i < N; ++i) {
            a(i, i) += lambda * std::max(jtj(i, i), 1e-300);
        }
        const Vec step = a.ldlt().solve(jtr);
        if (!step.allFinite()) {
            lambda *= 10.0;
            if (lambda > 1e12) {
                break;
            }
            continue;
        }
        const Vec trial = p + step;
        Mat jtj_t;
        Vec jtr_t;
        const double chi2_t = evaluate(trial, jtj_t, jtr_t);
        if (std::isfinite(chi2_t) && chi2_t <= chi2) {
            const double rel_step = step.norm() / std::max(p.norm(), 1e-300);
            const double rel_chi = (chi2 - chi2_t) / std::max(chi2, 1e-300);
            p = trial;
            jtj = jtj_t;
            jtr = jtr_t;
            chi2 = chi2_t;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel_step < 1e-12 || (rel_chi < 1e-15 && rel_step < 1e-9) || chi2 == 0.0) {
                out.converged = true;
                ++it;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                // No descent direction left: we are at the minimum to working precision.
                out.converged = true;
                break;
            }
        }
    }
    out.params = p;
    out.normal = jtj;
    out.chi2 = chi2;
    out.iterations = it;
    return out;
}

// Closed-form linear least squares for o + c cos 2x + s sin 2x.
Eigen::Vector3d linear_fringe(std::span<const FitPoint> points, bool weighted) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d g(1.0, std::cos(2.0 * p.x), std::sin(2.0 * p.x));
        const double w = weight(p, weighted);
        m += w * g * g.transpose();
        b += w * p.y * g;
    }
    return m.ldlt().solve(b);
}

double wrap_phase(double phi) {
    phi = std::fmod(phi, kPi);
    if (phi < 0.0) {
        phi += kPi;
    }
    if (phi >= kPi) {
        phi -= kPi;
    }
    return phi;
}

} // namespace

double fringe_model(const FringeFit& fit, double theta) {
    return fit.offset + fit.amplitude * std::cos(2.0 * (theta - fit.phase));
}

FringeFit fit_sinusoid(std::span<const FitPoint> points) {
    if (points.size() < 4) {
        throw FitError("sinusoid fit needs at least 4 points");
    }
    check_finite(points);
    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                              [](const FitPoint& a, const FitPoint& b) { return a.x < b.x; });
    if (hi->x - lo->x < kPi / 2.0 - 1e-12) {
        throw FitError("sinusoid fit needs angles spanning at least half a period");
    }
    const bool weighted = all_weighted(points);

    // Start from the data extremes.
    double mean = 0.0;
    for (const auto& p : points) {
        mean += p.y;
    }
    mean /= static_cast<double>(points.size());
    const auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                                  [](const FitPoint& a, const FitPoint& b) { return a.y < b.y; });
    Eigen::Vector3d start(mean, 0.5 * (ymax->y - ymin->y), ymax->x);

    auto model = [](const Eigen::Vector3d& q, double x, Eigen::Vector3d& grad) {
        const double arg = 2.0 * (x - q[2]);
        const double c = std::cos(arg);
        grad << 1.0, c, 2.0 * q[1] * std::sin(arg);
        return q[0] + q[1] * c;
    };

    auto lm = levenberg_marquardt<3>(points, weighted, start, model);

    // Guard against a local minimum: the linear parametrization has a unique
    // global optimum, refine from there too and keep the better one.
    const Eigen::Vector3d lin = linear_fringe(points, weighted);
    if (lin.allFinite()) {
        const double amp = std::hypot(lin[1], lin[2]);
        const Eigen::Vector3d alt(lin[0], amp, 0.5 * std::atan2(lin[2], lin[1]));
        auto lm2 = levenberg_marquardt<3>(points, weighted, alt, model);
        if (!lm.converged || lm2.chi2 < lm.chi2 * (1.0 - 1e-12)) {
            lm2.iterations += lm.iterations;
            lm = lm2;
        }
    }
    if (!lm.params.allFinite()) {
        throw FitError("sinusoid fit diverged");
    }

    FringeFit fit;
    fit.offset = lm.params[0];
    fit.amplitude = lm.params[1];
    fit.phase = lm.params[2];
    if (fit.amplitude < 0.0) {
        fit.amplitude = -fit.amplitude;
        fit.phase += kPi / 2.0;
    }
    fit.phase = wrap_phase(fit.phase);
    fit.chi2 = lm.chi2;
    fit.iterations = lm.iterations;
    fit.visibility = fit.offset != 0.0 ? fit.amplitude / fit.offset : 0.0;

    // Covariance from the linearized problem. The phase is undefined at zero
    // amplitude, so invert only the (offset, amplitude) block in that case.
    const double dof = static_cast<double>(points.size()) - 3.0;
    const double scale = weighted ? 1.0 : (dof > 0.0 ? lm.chi2 / dof : 0.0);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    Eigen::FullPivLU<Eigen::Matrix3d> lu(lm.normal);
    if (lu.isInvertible() && fit.amplitude > 0.0) {
        cov = lu.inverse() * scale;
    } else {
        const Eigen::Matrix2d block = lm.normal.topLeftCorner<2, 2>();
        Eigen::FullPivLU<Eigen::Matrix2d> lu2(block);
        if (lu2.isInvertible()) {
            cov.topLeftCorner<2, 2>() = lu2.inverse() * scale;
        }
        cov(2, 2) = std::numeric_limits<double>::infinity();
    }
    fit.sigma_offset = std::sqrt(std::max(cov(0, 0), 0.0));
    fit.sigma_amplitude = std::sqrt(std::max(cov(1, 1), 0.0));
    fit.sigma_phase = std::sqrt(std::max(cov(2, 2), 0.0));
    if (fit.offset != 0.0) {
        const double o = fit.offset;
        const double a = fit.amplitude;
        const double var = cov(1, 1) / (o * o) + a * a * cov(0, 0) / (o * o * o * o) - 2.0 * a * cov(0, 1) / (o * o * o);
        fit.sigma_visibility = std::sqrt(std::max(var, 0.0));
    }
    return fit;
}

double bootstrap_visibility_sigma(std::span<const FitPoint> points, int n_resamples, Rng& rng) {
    if (n_resamples < 2) {
        throw ParameterError("bootstrap needs at least 2 resamples");
    }
    const FringeFit base = fit_sinusoid(points);
    std::vector<double> residuals;
    residuals.reserve(points.size());
    for (const auto& p : points) {
        residuals.push_back(p.y - fringe_model(base, p.x));
    }
    std::vector<FitPoint> sample(points.begin(), points.end());
    double sum = 0.0;
    double sum2 = 0.0;
    for (int r = 0; r < n_resamples; ++r) {
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(residuals.size()));
            sample[i].y = fringe_model(base, points[i].x) + residuals[std::min(j, residuals.size() - 1)];
        }
        const double v = fit_sinusoid(sample).visibility;
        sum += v;
        sum2 += v * v;
    }
    const double n = n_resamples;
    return std::sqrt(std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0)));
}

DecayFit fit_exponential(std::span<const FitPoint> points) {
    if (points.size() < 3) {
        throw FitError("exponential fit needs at least 3 points");
    }
    check_finite(points);
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].x > points[i - 1].x)) {
            throw FitError("exponential fit needs strictly increasing times");
        }
    }
    const bool weighted = all_weighted(points);

    // Two-point log slope from the first and last positive samples.
    const FitPoint* first = nullptr;
    const FitPoint* last = nullptr;
    for (const auto& p : points) {
        if (p.y > 0.0) {
            if (first == nullptr) {
                first = &p;
            }
            last = &p;
        }
    }
    double k0 = 0.0;
    double v0 = points.front().y;
    if (first != nullptr && last != first) {
        k0 = std::log(first->y / last->y) / (last->x - first->x);
        v0 = first->y * std::exp(k0 * first->x);
    }

    DecayFit out;
    // Parameters (V0, k) with k = 1/T2, so k = 0 is a regular point.
    auto model = [](const Eigen::Vector2d& q, double t, Eigen::Vector2d& grad) {
        const double e = std::exp(-q[1] * t);
        grad << e, -q[0] * t * e;
        return q[0] * e;
    };
    const auto lm = levenberg_marquardt<2>(points, weighted, Eigen::Vector2d(v0, k0), model);
    if (!lm.params.allFinite()) {
        throw FitError("exponential fit diverged");
    }
    out.v0 = lm.params[0];
    const double k = lm.params[1];
    out.chi2 = lm.chi2;
    out.iterations = lm.iterations;

    const double dof = static_cast<double>(points.size()) - 2.0;
    const double scale = weighted ? 1.0 : (dof > 0.0 ? lm.chi2 / dof : 0.0);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    Eigen::FullPivLU<Eigen::Matrix2d> lu(lm.normal);
    if (lu.isInvertible()) {
        cov = lu.inverse() * scale;
    }
    out.sigma_v0 = std::sqrt(std::max(cov(0, 0), 0.0));
    const double sigma_k = std::sqrt(std::max(cov(1, 1), 0.0));

    if (!(k > 0.0)) {
        out.t2 = std::numeric_limits<double>::infinity();
        out.sigma_t2 = std::numeric_limits<double>::infinity();
        out.warnings.emplace_back("data do not decay; T2 reported as +infinity");
    } else {
        out.t2 = 1.0 / k;
        out.sigma_t2 = sigma_k / (k * k);
    }
    if (!lm.converged) {
        out.warnings.emplace_back("exponential fit stopped at the iteration limit");
    }
    return out;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw ParameterError("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

double fidelity_lower_bound(double mean_visibility) {
    if (!(mean_visibility >= -1.0 && mean_visibility <= 1.0)) {
        throw ParameterError("mean visibility must lie in [-1,1]");
    }
    return std::clamp(1.0 / 6.0 + 5.0 / 6.0 * mean_visibility, 0.0, 1.0);
}

Rational fidelity_lower_bound(Rational v) {
    v = make_rational(v.num, v.den);
    if (v.num < -v.den || v.num > v.den) {
        throw ParameterError("mean visibility must lie in [-1,1]");
    }
    // (1 + 5 v) / 6
    Rational f = make_rational(v.den + 5 * v.num, 6 * v.den);
    if (f.num < 0) {
        f = {0, 1};
    }
    return f;
}

CorrelatorEstimate correlator_from_counts(const SettingCounts& counts) {
    const auto n = counts.total();
    if (n == 0) {
        throw ParameterError("correlator needs at least one count");
    }
    const double nd = static_cast<double>(n);
    const double e = (static_cast<double>(counts.same) - static_cast<double>(counts.different)) / nd;
    return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / nd)};
}

double chsh_from_correlators(std::span<const double, 4> e) { return std::abs(e[0] + e[1] + e[2] - e[3]); }

ChshEstimate chsh_from_counts(std::span<const SettingCounts, 4> counts) {
    ChshEstimate out;
    double var = 0.0;
    std::array<double, 4> e{};
    for (int i = 0; i < 4; ++i) {
        out.correlators[i] = correlator_from_counts(counts[i]);
        e[i] = out.correlators[i].value;
        var += out.correlators[i].sigma * out.correlators[i].sigma;
    }
    out.s = chsh_from_correlators(e);
    out.sigma = std::sqrt(var);
    return out;
}

void ErrorBudget::validate() const {
    const auto t = terms();
    const auto n = names();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] >= 0.0 && t[i] <= 1.0)) {
            throw ParameterError(std::string("error budget term ") + n[i] + " must lie in [0,1]");
        }
    }
}

std::array<double, 7> ErrorBudget::terms() const {
    return {snr_readout, decoherence, raman_transfers, readout, entanglement_generation, readout_timing, drifts};
}

std::array<const char*, 7> ErrorBudget::names() {
    return {"snr_readout", "decoherence", "raman_transfers", "readout", "entanglement_generation", "readout_timing",
            "drifts"};
}

double compose_visibility(const ErrorBudget& budget, Composition rule) {
    budget.validate();
    const auto t = budget.terms();
    if (rule == Composition::Additive) {
        const double sum = std::accumulate(t.begin(), t.end(), 0.0);
        return std::max(-1.0, 1.0 - sum);
    }
    double v = 1.0;
    for (double e : t) {
        v *= 1.0 - e;
    }
    return v;
}

double compose_error_budget(const ErrorBudget& budget, Composition rule) {
    return fidelity_lower_bound(compose_visibility(budget, rule));
}

} // namespace atomlink::analysis
