#include "acd/sampling.hpp"

#include "acd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace acd {

namespace {

constexpr double root_rel_tol = 1e-12;

void check_probabilities(const Vector& p)
{
    if (p.size() < 1) {
        throw InputError("sampling needs at least one coordinate");
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || !(p[i] > 0.0) || p[i] > 1.0) {
            std::ostringstream msg;
            msg << "probability p_" << i << " = " << p[i] << " outside (0, 1]";
            throw InputError(msg.str());
        }
    }
}

void check_tau(double tau, Eigen::Index n)
{
    if (!std::isfinite(tau) || tau < 1.0 || tau > static_cast<double>(n)) {
        std::ostringstream msg;
        msg << "tau = " << tau << " outside [1, " << n << "]";
        throw InputError(msg.str());
    }
}

const Vector& positive_diagonal(const SmoothnessMatrix& m)
{
    const Vector& d = m.diag();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) {
            throw InputError("importance sampling needs M_ii > 0 for every coordinate");
        }
    }
    return d;
}

template <class ProbFn>
double sum_probabilities(const Vector& d, double delta, ProbFn prob)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        s += prob(d[i], delta);
    }
    return s;
}

/*
    Finds delta >= 0 with sum_i prob(M_ii, delta) = tau. The sum equals n at
    delta = 0 and decreases strictly and continuously, so bisection on the
    bracket [0, hi] converges; hi is doubled until the sum drops below tau.
*/
template <class ProbFn>
double solve_delta(const Vector& d, double tau, double hi, ProbFn prob)
{
    const auto n = static_cast<double>(d.size());
    if (tau >= n) {
        return 0.0;
    }
    double lo = 0.0;
    while (sum_probabilities(d, hi, prob) > tau) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw NumericalError("delta bracket diverged");
        }
    }
    double best = hi;
    double best_err = std::abs(sum_probabilities(d, hi, prob) - tau);
    for (int it = 0; it < 400 && best_err > root_rel_tol * tau; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double s = sum_probabilities(d, mid, prob);
        const double err = std::abs(s - tau);
        if (err < best_err) {
            best = mid;
            best_err = err;
        }
        (s > tau ? lo : hi) = mid;
    }
    return best;
}

} // namespace

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::TauNice: return "tau-nice";
    case Variant::IndepUniform: return "indep-uniform";
    case Variant::IndepSqrtImportance: return "indep-sqrt";
    case Variant::IndepAcdSolved: return "indep-acd";
    case Variant::IndepCdSolved: return "indep-cd";
    case Variant::Serial: return "serial";
    case Variant::Full: return "full";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name)
{
    for (Variant v : {Variant::TauNice, Variant::IndepUniform, Variant::IndepSqrtImportance,
                      Variant::IndepAcdSolved, Variant::IndepCdSolved, Variant::Serial, Variant::Full}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    // Labels used for the experiment legends.
    if (name == "s1") return Variant::TauNice;
    if (name == "s2") return Variant::IndepSqrtImportance;
    if (name == "s3") return Variant::IndepAcdSolved;
    throw InputError("unknown sampling variant '" + std::string(name) +
                     "' (expected tau-nice, indep-uniform, indep-sqrt, indep-acd, indep-cd, serial, full)");
}

bool is_independent(Variant v)
{
    return v == Variant::IndepUniform || v == Variant::IndepSqrtImportance ||
           v == Variant::IndepAcdSolved || v == Variant::IndepCdSolved;
}

SamplingLaw::SamplingLaw(Variant variant, Vector p, double tau, std::optional<double> delta, bool clipped)
    : variant_(variant), p_(std::move(p)), tau_(tau), delta_(delta), clipped_(clipped)
{
    check_probabilities(p_);
}

SamplingLaw SamplingLaw::tau_nice(Eigen::Index n, Eigen::Index tau)
{
    if (n < 1) {
        throw InputError("tau-nice sampling needs n >= 1");
    }
    check_tau(static_cast<double>(tau), n);
    const double t = static_cast<double>(tau);
    return SamplingLaw(Variant::TauNice, Vector::Constant(n, t / static_cast<double>(n)), t, std::nullopt, false);
}

SamplingLaw SamplingLaw::full(Eigen::Index n)
{
    if (n < 1) {
        throw InputError("full sampling needs n >= 1");
    }
    return SamplingLaw(Variant::Full, Vector::Ones(n), static_cast<double>(n), std::nullopt, false);
}

SamplingLaw SamplingLaw::serial(Vector p)
{
    check_probabilities(p);
    if (std::abs(p.sum() - 1.0) > 1e-9) {
        throw InputError("serial sampling probabilities must sum to 1");
    }
    return SamplingLaw(Variant::Serial, std::move(p), 1.0, std::nullopt, false);
}

SamplingLaw SamplingLaw::serial_uniform(Eigen::Index n)
{
    if (n < 1) {
        throw InputError("serial sampling needs n >= 1");
    }
    return serial(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

SamplingLaw SamplingLaw::independent(Vector p, Variant variant)
{
    if (!is_independent(variant)) {
        throw InputError("independent() needs an independent variant");
    }
    check_probabilities(p);
    const double tau = p.sum();
    return SamplingLaw(variant, std::move(p), tau, std::nullopt, false);
}

double acd_solved_probability(double m_ii, double delta)
{
    return 2.0 * m_ii / (std::sqrt(m_ii * m_ii + 2.0 * m_ii * delta) + m_ii);
}

double cd_solved_probability(double m_ii, double delta)
{
    return m_ii / (delta + m_ii);
}

SamplingLaw build_law(Variant variant, const SmoothnessMatrix& m, double tau)
{
    const Eigen::Index n = m.n();
    const auto nd = static_cast<double>(n);
    switch (variant) {
    case Variant::Full:
        return SamplingLaw::full(n);
    case Variant::TauNice: {
        if (tau != std::floor(tau)) {
            throw InputError("tau-nice sampling needs an integer tau");
        }
        check_tau(tau, n);
        return SamplingLaw::tau_nice(n, static_cast<Eigen::Index>(tau));
    }
    case Variant::IndepUniform:
        check_tau(tau, n);
        return SamplingLaw(variant, Vector::Constant(n, tau / nd), tau, std::nullopt, false);
    case Variant::Serial: {
        if (tau != 1.0) {
            throw InputError("serial sampling has tau = 1");
        }
        const Vector root = positive_diagonal(m).cwiseSqrt();
        return SamplingLaw(variant, root / root.sum(), 1.0, std::nullopt, false);
    }
    case Variant::IndepSqrtImportance: {
        check_tau(tau, n);
        const Vector root = positive_diagonal(m).cwiseSqrt();
        Vector p = tau * root / root.sum();
        bool clipped = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (p[i] > 1.0) {
                p[i] = 1.0;
                clipped = true;
            }
        }
        return SamplingLaw(variant, std::move(p), tau, std::nullopt, clipped);
    }
    case Variant::IndepAcdSolved: {
        check_tau(tau, n);
        const Vector& d = positive_diagonal(m);
        const double delta = solve_delta(d, tau, d.sum() / tau, acd_solved_probability);
        Vector p = d.unaryExpr([delta](double mii) { return acd_solved_probability(mii, delta); });
        return SamplingLaw(variant, std::move(p), tau, delta, false);
    }
    case Variant::IndepCdSolved: {
        check_tau(tau, n);
        const Vector& d = positive_diagonal(m);
        // delta <= Trace(M) / tau, so the initial bracket already holds the root.
        const double delta = solve_delta(d, tau, d.sum() / tau, cd_solved_probability);
        Vector p = d.unaryExpr([delta](double mii) { return cd_solved_probability(mii, delta); });
        return SamplingLaw(variant, std::move(p), tau, delta, false);
    }
    }
    throw InputError("unknown sampling variant");
}

SymMatrix probability_matrix(const SamplingLaw& law)
{
    const Eigen::Index n = law.n();
    const Vector& p = law.p();
    switch (law.variant()) {
    case Variant::Full:
        return SymMatrix::ones(n);
    case Variant::Serial:
        return SymMatrix::diagonal(p);
    case Variant::TauNice: {
        if (n == 1) {
            return SymMatrix::ones(1);
        }
        const auto nd = static_cast<double>(n);
        const double t = law.tau();
        Matrix pm = Matrix::Constant(n, n, t * (t - 1.0) / (nd * (nd - 1.0)));
        pm.diagonal().setConstant(t / nd);
        return SymMatrix(std::move(pm));
    }
    default: {
        Matrix pm = p * p.transpose();
        pm.diagonal() = p;
        return SymMatrix(std::move(pm));
    }
    }
}

Sampler::Sampler(const SamplingLaw& law) : law_(law)
{
    if (law_.variant() == Variant::TauNice) {
        perm_.resize(static_cast<std::size_t>(law_.n()));
    } else if (law_.variant() == Variant::Serial) {
        cdf_.resize(static_cast<std::size_t>(law_.n()));
        std::partial_sum(law_.p().begin(), law_.p().end(), cdf_.begin());
    }
}

void Sampler::draw(Rng& rng, std::vector<int>& out)
{
    out.clear();
    const auto n = static_cast<int>(law_.n());
    const Vector& p = law_.p();
    switch (law_.variant()) {
    case Variant::Full:
        out.resize(static_cast<std::size_t>(n));
        std::iota(out.begin(), out.end(), 0);
        return;
    case Variant::Serial: {
        const double u = rng.uniform() * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) {
            --it;
        }
        out.push_back(static_cast<int>(it - cdf_.begin()));
        return;
    }
    case Variant::TauNice: {
        // Partial Fisher-Yates: exactly tau uniform variates per draw.
        std::iota(perm_.begin(), perm_.end(), 0);
        const auto tau = static_cast<int>(law_.tau_int());
        for (int k = 0; k < tau; ++k) {
            const int remaining = n - k;
            int j = k + static_cast<int>(rng.uniform() * remaining);
            j = std::min(j, n - 1);
            std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(j)]);
        }
        out.assign(perm_.begin(), perm_.begin() + tau);
        std::sort(out.begin(), out.end());
        return;
    }
    default:
        // One variate per coordinate, in index order.
        for (int i = 0; i < n; ++i) {
            if (rng.uniform() < p[i]) {
                out.push_back(i);
            }
        }
        return;
    }
}

std::vector<int> draw(const SamplingLaw& law, Rng& rng)
{
    Sampler sampler(law);
    std::vector<int> out;
    sampler.draw(rng, out);
    return out;
}

SymMatrix empirical_probability_matrix(const SamplingLaw& law, Rng& rng, long long draws)
{
    if (draws < 1) {
        throw InputError("empirical probability matrix needs at least one draw");
    }
    const Eigen::Index n = law.n();
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
    Sampler sampler(law);
    std::vector<int> s;
    for (long long k = 0; k < draws; ++k) {
        sampler.draw(rng, s);
        for (int i : s) {
            for (int j : s) {
                counts(i, j) += 1.0;
            }
        }
    }
    return SymMatrix(counts / static_cast<double>(draws));
}

} // namespace acd
