// Bounded complex weight sequences: generation from compact specs,
// Cesaro non-triviality estimation, and best-residue selection.

#ifndef ERGO_WEIGHTS_HPP
#define ERGO_WEIGHTS_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergo/errors.hpp"

namespace ergo::weights {

using Complex = std::complex<double>;

struct WeightSpec {
    enum class Kind {
        Constant,      // w_n = value
        Phase,         // w_n = e^{-2 pi i beta n}   (lambda = e^{2 pi i beta})
        LacunaryExp,   // w_n = e^{2 pi i beta^n},   beta > 1
        PolyPhase,     // w_n = e^{2 pi i P(n)},     P given by coefficients
        BernoulliPm1,  // i.i.d. +-1 from the seed
        Moebius,       // w_n = mu(n), mu(0) := 0
        CustomTable,
    };

    Kind kind = Kind::Constant;
    Complex value{1.0, 0.0};
    double beta = 0.0;
    std::vector<double> poly;  // c_0 + c_1 n + c_2 n^2 + ...
    std::uint64_t seed = 0;
    std::vector<Complex> table;

    double bound() const;
    std::string name() const;
};

struct WeightSequence {
    WeightSpec spec;
    std::vector<Complex> cache;

    std::size_t size() const { return cache.size(); }
    Complex at(std::size_t n) const {
        if (n >= cache.size()) throw InvalidArgument("weight index beyond cache");
        return cache[n];
    }
};

// Deterministic prefix w_0 .. w_{n_max-1}.  Phase arguments are reduced
// mod 1 with exact dyadic arithmetic before exponentiation.
WeightSequence generate(const WeightSpec& spec, std::size_t n_max);

// mu(0..n_max-1) by a linear sieve; mu(0) := 0.  Capped at 10^7.
std::vector<std::int8_t> moebius_sieve(std::size_t n_max);

struct IndexReport {
    std::vector<std::int64_t> grid;
    std::vector<double> averages;     // (1/N) sum |w_n| at each grid N
    std::vector<double> running_max;  // running maxima of the above
};

// Cesaro averages of |w_n| on an increasing grid.  The running maximum is
// a finite limsup surrogate; the library never claims a true limsup.
IndexReport nontriviality_index(const WeightSequence& w,
                                std::span<const std::int64_t> grid);

struct ResidueReport {
    int q = 1;
    int j0 = 0;
    std::vector<double> final_averages;  // per residue, at the last grid N
    std::vector<std::vector<double>> averages;  // [residue][grid index]
    std::vector<std::int64_t> grid;             // subsequence lengths
};

// j0 maximizes the final-grid Cesaro average of |w_{qn+j}|; ties break to
// the smallest residue.  Grid values count subsequence terms.
ResidueReport best_residue(const WeightSequence& w, int q,
                           std::span<const std::int64_t> grid);

// 1, 2, 4, ..., capped at n_max with n_max appended when not a power of 2.
std::vector<std::int64_t> geometric_grid(std::int64_t n_max);

// v_n = w_n when n = j (mod q), else 0.  Realizes the standard passage
// from (X, T^q) back to (X, T) on the weight side.
WeightSequence mask_residue(const WeightSequence& w, int q, int j);

struct RealizedReal {
    WeightSequence seq;  // real-valued (imaginary parts all zero)
    bool used_imag = false;
};

// Takes Re(w) when its non-triviality index is positive, else Im(w).
RealizedReal realize_real(const WeightSequence& w);

}  // namespace ergo::weights

#endif
