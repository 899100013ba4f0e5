// Integer-matrix spectral analysis (entropy, hyperbolicity class,
// horseshoe-free detection), lacunary frequency plans with brute-force
// dissociateness checks, and the Riesz-product apparatus: exact Fourier
// oracle, truncated rejection sampler, weighted-limit verification.

#ifndef ERGO_TORAL_HPP
#define ERGO_TORAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo/weights.hpp"

namespace ergo::toral {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

// Row-major d x d integer matrix with arbitrary-precision entries.
struct IntMatrix {
    int d = 0;
    std::vector<Int> a;

    IntMatrix() = default;
    explicit IntMatrix(int dim) : d(dim), a(static_cast<std::size_t>(dim) *
                                            static_cast<std::size_t>(dim)) {}
    static IntMatrix identity(int dim);
    // Companion matrix of the monic polynomial c_0 + c_1 z + ... + z^d.
    static IntMatrix companion(std::span<const Int> monic);

    Int& at(int i, int j) { return a[static_cast<std::size_t>(i * d + j)]; }
    const Int& at(int i, int j) const {
        return a[static_cast<std::size_t>(i * d + j)];
    }
    IntMatrix transpose() const;
    IntMatrix operator*(const IntMatrix& o) const;
    std::vector<Int> apply(std::span<const Int> v) const;
    std::vector<Rat> apply(std::span<const Rat> v) const;
    Int determinant() const;  // fraction-free Bareiss
    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

struct ToralAffineMap {
    IntMatrix B;
    std::vector<Rat> b;  // translation, one rational per coordinate
};

struct SpectralData {
    std::vector<Complex> eigenvalues;  // with multiplicity, |.| decreasing
    double entropy = 0.0;              // sum of log|lambda| over |lambda|>1
    double spectral_radius = 0.0;
    std::vector<Complex> leading_eigenvector;  // unit norm
    double transform_norm_bound = 0.0;  // Frobenius norm of the eigenbasis
};

// det(zI - B) as exact integer coefficients c_0..c_d (monic, c_d = 1),
// via Faddeev-LeVerrier.
std::vector<Int> char_poly(const IntMatrix& B);

// Eigenvalues from the companion matrix of the exact characteristic
// polynomial, Newton-polished against it, cross-checked against a direct
// eigensolve of B.  Entropy per the sum-of-logs formula.
SpectralData spectral_analysis(const IntMatrix& B);

// Exact irreducibility over Q for monic integer polynomials of degree <= 6
// (rational-root test plus bounded enumeration of monic factor pairs).
bool irreducible_over_Q(std::span<const Int> monic);

enum class HyperbolicityClass { Hyperbolic, PartiallyHyperbolic, NoExpansion };

struct Classification {
    HyperbolicityClass cls = HyperbolicityClass::NoExpansion;
    bool horseshoe_free = false;
    bool horseshoe_free_applicable = false;  // requires |det B| = 1
    bool irreducible = false;
    double entropy = 0.0;
};

// horseshoe_free is true iff chi_B is irreducible over Q and some but not
// all eigenvalues lie on the unit circle (modulus within 1e-8 of 1).
Classification classify(const IntMatrix& B);

// h_n = B*^n h0, exact.  via_squaring selects the second arithmetic path
// (binary powering); both must agree bit for bit.
std::vector<std::vector<Int>> frequency_orbit(const IntMatrix& B,
                                              std::span<const Int> h0,
                                              int n_max,
                                              bool via_squaring = false);

// psi_n = <h0, (B^{n-1}+...+B+I) b> mod 1, exact rationals in [0,1);
// psi_0 = 0.
std::vector<Rat> psi_sequence(const IntMatrix& B, std::span<const Rat> b,
                              std::span<const Int> h0, int n_max);

// Canonical basis vector maximizing |<v_{1,1}, e_i>| among those above
// 1e-8, smallest index on ties.
std::vector<Int> choose_h0(const SpectralData& spectral);
std::vector<Int> choose_h0(const IntMatrix& B);

struct FrequencyPlan {
    IntMatrix B;
    std::vector<Int> h0;
    int q = 1;
    double theta = 0.0;   // observed lacunarity ratio
    double delta = 0.0;   // certified separation (0 = not set)
    int horizon = 8;      // D, number of H_0 terms in brute-force checks
    std::vector<std::vector<Int>> h;  // h_0 .. h_{q*horizon}
};

FrequencyPlan make_plan(const IntMatrix& B, std::span<const Int> h0, int q,
                        int horizon);

struct CollisionWitness {
    std::vector<int> eps_a;
    std::vector<int> eps_b;  // two distinct sign patterns with equal sums
};

struct SplitReport {
    bool dissociate_ok = false;
    bool split_ok = false;
    double min_gap_class = 0.0;  // distance of nonzero classes to H_0^*
    double min_gap_diff = 0.0;   // distance of nonzero differences to H_0^*
    int horizon = 0;
    std::optional<CollisionWitness> collision;
};

// Brute force over 3^D sign patterns (D <= 12).  dissociate_ok: all sums
// of the H_0 truncation pairwise distinct.  split_ok: every element of a
// nonzero class, and every nonzero difference of two elements of the
// same nonzero class, keeps Euclidean distance >= delta from the
// truncated H_0^*.  Within-class differences are exactly what the
// cross-residue orthogonality consumes.
SplitReport lacunarity_and_split_check(const FrequencyPlan& plan);

struct PlanChoice {
    FrequencyPlan plan;
    SplitReport report;
};

// Smallest q <= q_max whose finite-horizon checks pass; delta is set to
// half the observed minimal gap.
PlanChoice choose_plan(const IntMatrix& B, std::span<const Int> h0,
                       int horizon, int q_max = 16);

struct RieszSpec {
    FrequencyPlan plan;
    double r = 0.5;
    std::vector<double> phases;  // arg a_n per depth index; empty = constant
    int K = 8;                   // truncation depth
    std::uint64_t seed = 0;

    Complex coeff(int n) const;  // a_n
};

// Constant coefficient rule a_n = r.
RieszSpec make_riesz_spec(FrequencyPlan plan, double r, int K,
                          std::uint64_t seed);
// Weight-tracking rule a_n = r e^{i arg w_{qn} + 2 pi i psi_{qn}}.
RieszSpec make_riesz_spec(FrequencyPlan plan, double r, int K,
                          std::uint64_t seed,
                          const weights::WeightSequence& w,
                          std::span<const Rat> psi_mod1);

// Fourier coefficient of the Riesz product at the integer vector k: the
// product over the (unique, by dissociateness) decomposition
// k = sum eps_n h_{qn}, or 0 when none exists within depth K.  Two
// decompositions raise IntegrityError.
Complex riesz_coefficient(const RieszSpec& spec, std::span<const Int> k);

struct SampleBatch {
    std::vector<double> x;
    double acceptance_rate = 0.0;
    std::uint64_t proposals = 0;
};

// Exact-truncation rejection sampler for d = 1 plans (K <= 16): samples
// the depth-K partial product density against the uniform envelope
// (1+r)^K.  Throws EnvelopeTooLoose when acceptance collapses below 1e-6.
SampleBatch riesz_sample(const RieszSpec& spec, std::size_t count,
                         std::uint64_t seed, int jobs = 1);

struct ResidueStat {
    int residue = 0;
    Complex estimate{};
    double stderr_est = 0.0;
    double target = 0.0;
    bool within_3_stderr = false;
};

struct LimitReport {
    double target = 0.0;  // (r/2)(1/N) sum |w_{qn}|
    Complex estimate{};
    double stderr_est = 0.0;
    std::size_t n_samples = 0;
    int N = 0;
    int K = 0;
    std::string path;  // "exact" or "importance"
    bool truncation_bias_caveat = false;
    std::vector<ResidueStat> residues;     // residue 0 first, then 1..q-1
    std::vector<std::vector<Complex>> per_sample;  // [residue][sample]
};

// Per-sample weighted averages A_N^{(p)} against the Fourier-oracle
// targets.  Exact path (d = 1) requires N <= K; d >= 2 falls back to
// importance reweighting by the partial product and flags the bias.
LimitReport verify_weighted_limit(const ToralAffineMap& map,
                                  const weights::WeightSequence& w,
                                  const RieszSpec& spec, int N,
                                  std::size_t samples, int jobs = 1);

// frac(h * x) computed exactly from the dyadic expansion of the double x.
double frac_int_times_unit(const Int& h, double x);
// frac(<h, x>) for a coordinate vector x, exact.
double frac_dot(std::span<const Int> h, std::span<const double> x);
// Rational reduced mod 1, as double.
double frac_rational(const Rat& r);

}  // namespace ergo::toral

#endif
