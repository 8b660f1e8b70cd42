#include "acd/eso.hpp"

#include "acd/error.hpp"

#include <cmath>

namespace acd {

std::string_view to_string(EsoMode mode)
{
    switch (mode) {
    case EsoMode::AcceleratedGeneral: return "accelerated";
    case EsoMode::PlainGeneral: return "plain";
    case EsoMode::ClosedFormC1: return "closed-c1";
    case EsoMode::ClosedFormC2: return "closed-c2";
    case EsoMode::ClosedFormC3: return "closed-c3";
    case EsoMode::TauNiceDiagonal: return "tau-nice";
    }
    return "unknown";
}

EsoParams eso_tau_nice(const SmoothnessMatrix& m, Eigen::Index tau)
{
    const Eigen::Index n = m.n();
    if (tau < 1 || tau > n) {
        throw InputError("tau must lie in [1, n]");
    }
    EsoParams eso;
    eso.mode = EsoMode::TauNiceDiagonal;
    if (n == 1) {
        eso.v = m.diag();
    } else {
        const double beta = static_cast<double>(tau - 1) / static_cast<double>(n - 1);
        const double L = m.lambda_max();
        eso.v = ((1.0 - beta) * m.diag()).array() + beta * L;
        // Zero-curvature coordinates keep a finite stepsize.
        eso.v = eso.v.cwiseMax(1e-15 * L);
    }
    if (!(eso.v.array() > 0.0).all()) {
        throw InputError("tau-nice ESO needs a nonzero smoothness matrix");
    }
    const double p = static_cast<double>(tau) / static_cast<double>(n);
    eso.c = eso.v.maxCoeff() / p;
    return eso;
}

EsoParams c_accelerated(const SamplingLaw& law, const SmoothnessMatrix& m)
{
    if (law.n() != m.n()) {
        throw InputError("sampling and smoothness matrix dimensions differ");
    }
    const Vector& p = law.p();
    const DiagWeights inv_sqrt(p.cwiseSqrt().cwiseInverse());
    const DiagWeights inv(p.cwiseInverse());
    const SymMatrix p_prime = diag_scale(inv_sqrt, probability_matrix(law), inv_sqrt);
    const SymMatrix m_prime = diag_scale(inv, m.sym(), inv);

    EsoParams eso;
    eso.mode = EsoMode::AcceleratedGeneral;
    eso.c = lambda_max(hadamard(p_prime, m_prime));
    eso.v = eso.c * p.cwiseAbs2();
    return eso;
}

EsoParams c_plain(const SamplingLaw& law, const SmoothnessMatrix& m)
{
    if (law.n() != m.n()) {
        throw InputError("sampling and smoothness matrix dimensions differ");
    }
    const Vector& p = law.p();
    const DiagWeights inv(p.cwiseInverse());
    const SymMatrix p_second = diag_scale(inv, probability_matrix(law), inv);

    EsoParams eso;
    eso.mode = EsoMode::PlainGeneral;
    eso.c = lambda_max(hadamard(p_second, m.sym()));
    eso.v = eso.c * p;
    return eso;
}

double closed_form_c(const SmoothnessMatrix& m, double tau, ClosedForm which)
{
    const Eigen::Index n = m.n();
    const auto nd = static_cast<double>(n);
    if (!(tau >= 1.0 && tau <= nd)) {
        throw InputError("tau must lie in [1, n]");
    }
    if (n == 1) {
        return m.matrix()(0, 0);
    }
    switch (which) {
    case ClosedForm::C1: {
        const double beta = (tau - 1.0) / (nd - 1.0);
        Matrix a = beta * m.matrix();
        a.diagonal() += (1.0 - beta) * m.diag();
        return nd / tau * lambda_max(SymMatrix(std::move(a)));
    }
    case ClosedForm::C2: {
        Matrix a = m.matrix();
        a.diagonal() += (nd - tau) / tau * m.diag();
        return lambda_max(SymMatrix(std::move(a)));
    }
    case ClosedForm::C3: {
        const SamplingLaw law = build_law(Variant::IndepCdSolved, m, tau);
        return m.lambda_max() + *law.delta();
    }
    }
    throw InputError("unknown closed form");
}

EsoParams eso_closed_form(const SamplingLaw& law, const SmoothnessMatrix& m)
{
    EsoParams eso;
    switch (law.variant()) {
    case Variant::TauNice:
        eso.mode = EsoMode::ClosedFormC1;
        eso.c = closed_form_c(m, law.tau(), ClosedForm::C1);
        break;
    case Variant::IndepUniform:
        eso.mode = EsoMode::ClosedFormC2;
        eso.c = closed_form_c(m, law.tau(), ClosedForm::C2);
        break;
    case Variant::IndepCdSolved:
        eso.mode = EsoMode::ClosedFormC3;
        eso.c = m.lambda_max() + *law.delta();
        break;
    default:
        throw ConfigError("no closed-form ESO for sampling '" + std::string(to_string(law.variant())) +
                          "' (closed forms exist for tau-nice, indep-uniform, indep-cd)");
    }
    eso.v = eso.c * law.p();
    return eso;
}

double rate_lower_bound(const SmoothnessMatrix& m, double tau, double sigma)
{
    if (!(sigma > 0.0) || !(tau >= 1.0)) {
        throw InputError("rate lower bound needs sigma > 0 and tau >= 1");
    }
    return m.diag().cwiseMax(0.0).cwiseSqrt().sum() / (tau * std::sqrt(sigma));
}

double accelerated_constant(const SamplingLaw& law, const Vector& v)
{
    return v.cwiseQuotient(law.p().cwiseAbs2()).maxCoeff();
}

EsoParams canonicalize_eso(const SamplingLaw& law, const EsoParams& eso)
{
    if (eso.v.size() != law.n()) {
        throw InputError("ESO vector and sampling dimensions differ");
    }
    EsoParams out;
    out.mode = EsoMode::AcceleratedGeneral;
    out.c = accelerated_constant(law, eso.v);
    out.v = out.c * law.p().cwiseAbs2();
    // c p_i^2 >= v_i holds exactly in real arithmetic; keep it exact in floating point too.
    out.v = out.v.cwiseMax(eso.v);
    return out;
}

double sigma_weighted(double sigma, const SamplingLaw& law, const Vector& v)
{
    if (!(sigma > 0.0)) {
        throw InputError("sigma must be positive");
    }
    if (v.size() != law.n()) {
        throw InputError("ESO vector and sampling dimensions differ");
    }
    return (sigma * law.p().cwiseAbs2()).cwiseQuotient(v).minCoeff();
}

StepParams step_params(double sigma_w)
{
    if (!(sigma_w > 0.0) || sigma_w > 1.0) {
        throw ConfigError("sigma_w = " + std::to_string(sigma_w) + " outside (0, 1]");
    }
    StepParams sp;
    sp.sigma_w = sigma_w;
    // Same value as (sqrt(s^2 + 4s) - s) / 2 without the cancellation.
    sp.theta = 2.0 * sigma_w / (std::sqrt(sigma_w * sigma_w + 4.0 * sigma_w) + sigma_w);
    sp.eta = 1.0 / sp.theta;
    return sp;
}

StepParams step_params(double sigma_w, const SamplingLaw& law, const Vector& v)
{
    StepParams sp = step_params(sigma_w);
    sp.w = v.cwiseQuotient(law.p().cwiseAbs2());
    return sp;
}

double verify_eso(const SamplingLaw& law, const SmoothnessMatrix& m, const Vector& v)
{
    if (law.n() != m.n() || v.size() != m.n()) {
        throw InputError("ESO check dimensions differ");
    }
    Matrix gap = -hadamard(probability_matrix(law), m.sym()).matrix();
    gap.diagonal() += law.p().cwiseProduct(v);
    return lambda_min(SymMatrix(std::move(gap)));
}

bool eso_certified(double gap, const SamplingLaw& law, const Vector& v, double rel_tol)
{
    return gap >= -rel_tol * law.p().cwiseProduct(v).maxCoeff();
}

} // namespace acd
