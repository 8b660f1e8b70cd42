#pragma once

#include "acd/linalg.hpp"
#include "acd/rng.hpp"
#include "acd/smoothness.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acd {

enum class Variant {
    TauNice,             // uniform over all subsets of cardinality tau
    IndepUniform,        // independent, p_i = tau / n
    IndepSqrtImportance, // independent, p_i proportional to sqrt(M_ii), clipped at 1
    IndepAcdSolved,      // independent, p_i^2 / M_ii proportional to 1 - p_i
    IndepCdSolved,       // independent, p_i = M_ii / (delta + M_ii)
    Serial,              // exactly one coordinate, drawn with probability p_i
    Full,                // every coordinate, every time
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
bool is_independent(Variant v);

/*
    A fully resolved sampling: variant, probability vector p and the
    expected minibatch size tau it was built for.

    For the solved variants delta is the root of sum_i p_i(delta) = tau. For
    IndepSqrtImportance probabilities above 1 are clipped to 1 and the rest
    left unchanged, so expected_size() can fall below tau(); both are kept.
*/
class SamplingLaw {
public:
    Variant variant() const noexcept { return variant_; }
    Eigen::Index n() const noexcept { return p_.size(); }
    double tau() const noexcept { return tau_; }
    const Vector& p() const noexcept { return p_; }
    std::optional<double> delta() const noexcept { return delta_; }
    // sum_i p_i; equals E|S|.
    double expected_size() const { return p_.sum(); }
    bool clipped() const noexcept { return clipped_; }
    // Integer minibatch size for TauNice.
    Eigen::Index tau_int() const noexcept { return static_cast<Eigen::Index>(tau_); }

    static SamplingLaw tau_nice(Eigen::Index n, Eigen::Index tau);
    static SamplingLaw full(Eigen::Index n);
    static SamplingLaw serial(Vector p);
    static SamplingLaw serial_uniform(Eigen::Index n);
    static SamplingLaw independent(Vector p, Variant variant = Variant::IndepUniform);

private:
    SamplingLaw(Variant variant, Vector p, double tau, std::optional<double> delta, bool clipped);
    friend SamplingLaw build_law(Variant, const SmoothnessMatrix&, double);

    Variant variant_;
    Vector p_;
    double tau_;
    std::optional<double> delta_;
    bool clipped_;
};

/*
    Builds the named law for the smoothness matrix M.

    TauNice requires an integer tau in [1, n]. Serial builds the
    sqrt(M_ii)-proportional serial law and requires tau == 1. Full ignores
    tau (it is always n).
*/
SamplingLaw build_law(Variant variant, const SmoothnessMatrix& m, double tau);

// Probabilities for the two solved laws at a given delta.
double acd_solved_probability(double m_ii, double delta);
double cd_solved_probability(double m_ii, double delta);

// P_ij = Prob(i in S and j in S).
SymMatrix probability_matrix(const SamplingLaw& law);

// Draws coordinate subsets; holds scratch space for the tau-nice shuffle.
class Sampler {
public:
    explicit Sampler(const SamplingLaw& law);

    // Overwrites out with the sampled indices in increasing order.
    void draw(Rng& rng, std::vector<int>& out);

private:
    SamplingLaw law_;
    std::vector<int> perm_;
    std::vector<double> cdf_;
};

std::vector<int> draw(const SamplingLaw& law, Rng& rng);

// Frequency estimate of P from the given number of draws.
SymMatrix empirical_probability_matrix(const SamplingLaw& law, Rng& rng, long long draws);

} // namespace acd
