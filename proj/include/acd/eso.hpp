#pragma once

#include "acd/sampling.hpp"
#include "acd/smoothness.hpp"

#include <string_view>

namespace acd {

enum class EsoMode {
    AcceleratedGeneral, // c = lambda_max(P' o M'), v = c p^2
    PlainGeneral,       // c = lambda_max(P'' o M), v = c p
    ClosedFormC1,
    ClosedFormC2,
    ClosedFormC3,
    TauNiceDiagonal,    // v_i = (1 - beta) M_ii + beta L
};

std::string_view to_string(EsoMode mode);

/*
    ESO parameters v satisfying P o M <= Diag(p o v), together with the
    scalar c that produced them. For the plain modes c = max_i v_i / p_i
    (the CD rate constant); for the accelerated mode c = max_i v_i / p_i^2.
*/
struct EsoParams {
    Vector v;
    double c = 0.0;
    EsoMode mode = EsoMode::AcceleratedGeneral;
};

// Step constants of the accelerated method.
struct StepParams {
    double sigma_w = 0.0;
    double theta = 0.0;
    double eta = 0.0;
    // w_i = v_i / p_i^2
    Vector w;
};

enum class ClosedForm { C1, C2, C3 };

// v_i = (1 - beta) M_ii + beta L with beta = (tau - 1) / (n - 1).
EsoParams eso_tau_nice(const SmoothnessMatrix& m, Eigen::Index tau);

// c = lambda_max(P' o M'), P' = D^-1/2 P D^-1/2, M' = D^-1 M D^-1, v = c p^2.
EsoParams c_accelerated(const SamplingLaw& law, const SmoothnessMatrix& m);

// c = lambda_max(P'' o M), P'' = D^-1 P D^-1, v = c p.
EsoParams c_plain(const SamplingLaw& law, const SmoothnessMatrix& m);

/*
    Closed forms of the plain constant for the three CD samplings:
      C1 (tau-nice):        (n/tau) lambda_max(beta M + (1 - beta) Diag(M))
      C2 (indep. uniform):  lambda_max(M + ((n - tau)/tau) Diag(M))
      C3 (indep. M/(d+M)):  lambda_max(M) + delta
*/
double closed_form_c(const SmoothnessMatrix& m, double tau, ClosedForm which);

// EsoParams with v = c p for a closed-form constant; law must match the form.
EsoParams eso_closed_form(const SamplingLaw& law, const SmoothnessMatrix& m);

// sum_i sqrt(M_ii) / (tau sqrt(sigma)): no choice of p and v beats this.
double rate_lower_bound(const SmoothnessMatrix& m, double tau, double sigma);

// Replaces v by c p^2 with c = max_j v_j / p_j^2.
EsoParams canonicalize_eso(const SamplingLaw& law, const EsoParams& eso);

// sigma_w = min_i p_i^2 sigma / v_i
double sigma_weighted(double sigma, const SamplingLaw& law, const Vector& v);

// theta = (sqrt(sigma_w^2 + 4 sigma_w) - sigma_w) / 2, eta = 1 / theta.
StepParams step_params(double sigma_w);
StepParams step_params(double sigma_w, const SamplingLaw& law, const Vector& v);

// lambda_min(Diag(p o v) - P o M); nonnegative certifies the ESO.
double verify_eso(const SamplingLaw& law, const SmoothnessMatrix& m, const Vector& v);

// True when gap >= -rel_tol * max_i p_i v_i.
bool eso_certified(double gap, const SamplingLaw& law, const Vector& v, double rel_tol = 1e-9);

// max_i v_i / p_i^2: the accelerated complexity constant of any valid v.
double accelerated_constant(const SamplingLaw& law, const Vector& v);

} // namespace acd
