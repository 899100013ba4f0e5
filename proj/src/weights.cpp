#include "ergo/weights.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ergo::weights {

namespace {

using boost::multiprecision::cpp_int;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMoebiusCap = 10'000'000;
constexpr std::size_t kLacunaryCap = 20'000;

// Writes the double x > 0 as M / 2^s exactly.
void dyadic_split(double x, cpp_int& M, int& s) {
    int e = 0;
    double f = std::frexp(x, &e);  // x = f * 2^e, f in [0.5, 1)
    std::int64_t mant = static_cast<std::int64_t>(std::ldexp(f, 53));
    M = mant;
    s = 53 - e;
    while (s > 0 && (M & 1) == 0) {
        M >>= 1;
        --s;
    }
    if (s < 0) {
        M <<= -s;
        s = 0;
    }
}

// frac(c * n^k) for a double coefficient c, exact: c = M/2^s dyadic.
double frac_term(double c, std::int64_t n, int k) {
    if (c == 0.0) return 0.0;
    const bool neg = c < 0;
    cpp_int M;
    int s = 0;
    dyadic_split(std::abs(c), M, s);
    cpp_int pw = 1;
    for (int i = 0; i < k; ++i) pw *= n;
    cpp_int num = M * pw;
    if (s == 0) return 0.0;  // integer value
    cpp_int mod = num & ((cpp_int(1) << s) - 1);
    double f = mod.convert_to<double>() * std::ldexp(1.0, -s);
    if (neg && f != 0.0) f = 1.0 - f;
    return f;
}

Complex unit_phase(double frac) {
    return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

std::vector<Complex> gen_phase(double beta, std::size_t n) {
    std::vector<Complex> out(n);
    if (beta == 0.0) {
        std::fill(out.begin(), out.end(), Complex{1.0, 0.0});
        return out;
    }
    // beta = M / 2^s dyadic, split once; frac(beta n) is then an exact
    // 128-bit modular product for every n in the cache.
    cpp_int M;
    int s = 0;
    dyadic_split(std::abs(beta), M, s);
    const bool neg = beta < 0;
    const bool fast = s > 0 && s < 74 && M < (cpp_int(1) << 62);
    const std::uint64_t m64 = fast ? M.convert_to<std::uint64_t>() : 0;
    for (std::size_t i = 0; i < n; ++i) {
        double f;
        if (s == 0) {
            f = 0.0;
        } else if (fast) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(m64) *
                static_cast<unsigned __int128>(i);
            const unsigned __int128 mask =
                (static_cast<unsigned __int128>(1) << s) - 1;
            f = std::ldexp(static_cast<double>(prod & mask), -s);
        } else {
            f = frac_term(std::abs(beta), static_cast<std::int64_t>(i), 1);
        }
        if (neg && f != 0.0) f = 1.0 - f;
        // w_n = e^{-2 pi i beta n}
        out[i] = unit_phase(f == 0.0 ? 0.0 : 1.0 - f);
    }
    return out;
}

std::vector<Complex> gen_lacunary(double beta, std::size_t n) {
    if (beta <= 1.0) throw InvalidArgument("lacunary_exp needs beta > 1");
    if (n > kLacunaryCap)
        throw Unsupported("lacunary_exp cache capped at " +
                          std::to_string(kLacunaryCap) +
                          " (cost grows quadratically)");
    // beta = M / 2^s exactly; beta^n mod 1 = (M^n mod 2^{sn}) / 2^{sn}.
    cpp_int M;
    int s = 0;
    dyadic_split(beta, M, s);
    std::vector<Complex> out(n);
    cpp_int pw = 1;  // M^i
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pw *= M;
        const std::int64_t bits = static_cast<std::int64_t>(s) *
                                  static_cast<std::int64_t>(i);
        double f = 0.0;
        if (bits > 0) {
            cpp_int mod = pw & ((cpp_int(1) << bits) - 1);
            // Keep only ~64 significant bits for the double conversion.
            const std::int64_t drop = bits > 64 ? bits - 64 : 0;
            f = std::ldexp((mod >> drop).convert_to<double>(),
                           static_cast<int>(drop - bits));
        }
        out[i] = unit_phase(f);
    }
    return out;
}

std::vector<Complex> gen_poly_phase(const std::vector<double>& poly, std::size_t n) {
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (std::size_t k = 0; k < poly.size(); ++k)
            f += frac_term(poly[k], static_cast<std::int64_t>(i),
                           static_cast<int>(k));
        out[i] = unit_phase(f - std::floor(f));
    }
    return out;
}

std::vector<Complex> gen_bernoulli(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = Complex((rng() >> 63) ? 1.0 : -1.0, 0.0);
    return out;
}

}  // namespace

std::vector<std::int8_t> moebius_sieve(std::size_t n_max) {
    if (n_max > kMoebiusCap)
        throw Unsupported("moebius sieve capped at 10^7");
    std::vector<std::int8_t> mu(n_max, 0);
    if (n_max > 1) mu[1] = 1;
    std::vector<std::uint32_t> primes;
    std::vector<std::uint32_t> spf(n_max, 0);  // smallest prime factor
    for (std::size_t i = 2; i < n_max; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
            mu[i] = -1;
        }
        for (std::uint32_t p : primes) {
            const std::size_t ip = i * p;
            if (p > spf[i] || ip >= n_max) break;
            spf[ip] = p;
            mu[ip] = (i % p == 0) ? std::int8_t{0}
                                  : static_cast<std::int8_t>(-mu[i]);
        }
    }
    return mu;
}

double WeightSpec::bound() const {
    switch (kind) {
        case Kind::Constant:
            return std::abs(value);
        case Kind::Phase:
        case Kind::LacunaryExp:
        case Kind::PolyPhase:
        case Kind::BernoulliPm1:
        case Kind::Moebius:
            return 1.0;
        case Kind::CustomTable: {
            double b = 0.0;
            for (const Complex& v : table) b = std::max(b, std::abs(v));
            return b;
        }
    }
    return 1.0;
}

std::string WeightSpec::name() const {
    switch (kind) {
        case Kind::Constant: return "constant";
        case Kind::Phase: return "phase";
        case Kind::LacunaryExp: return "lacunary_exp";
        case Kind::PolyPhase: return "poly_phase";
        case Kind::BernoulliPm1: return "bernoulli_pm1";
        case Kind::Moebius: return "moebius";
        case Kind::CustomTable: return "custom_table";
    }
    return "?";
}

WeightSequence generate(const WeightSpec& spec, std::size_t n_max) {
    if (n_max < 1) throw InvalidArgument("generate needs n_max >= 1");
    WeightSequence w;
    w.spec = spec;
    switch (spec.kind) {
        case WeightSpec::Kind::Constant:
            w.cache.assign(n_max, spec.value);
            break;
        case WeightSpec::Kind::Phase:
            w.cache = gen_phase(spec.beta, n_max);
            break;
        case WeightSpec::Kind::LacunaryExp:
            w.cache = gen_lacunary(spec.beta, n_max);
            break;
        case WeightSpec::Kind::PolyPhase:
            w.cache = gen_poly_phase(spec.poly, n_max);
            break;
        case WeightSpec::Kind::BernoulliPm1:
            w.cache = gen_bernoulli(spec.seed, n_max);
            break;
        case WeightSpec::Kind::Moebius: {
            std::vector<std::int8_t> mu = moebius_sieve(n_max);
            w.cache.resize(n_max);
            for (std::size_t i = 0; i < n_max; ++i)
                w.cache[i] = Complex(static_cast<double>(mu[i]), 0.0);
            break;
        }
        case WeightSpec::Kind::CustomTable:
            if (spec.table.size() < n_max)
                throw InvalidArgument("custom table shorter than n_max");
            w.cache.assign(spec.table.begin(),
                           spec.table.begin() + static_cast<std::ptrdiff_t>(n_max));
            break;
    }
    return w;
}

IndexReport nontriviality_index(const WeightSequence& w,
                                std::span<const std::int64_t> grid) {
    IndexReport rep;
    rep.grid.assign(grid.begin(), grid.end());
    double sum = 0.0, comp = 0.0;
    std::int64_t n = 0;
    double best = 0.0;
    for (std::int64_t N : grid) {
        if (N <= n || static_cast<std::size_t>(N) > w.size())
            throw InvalidArgument("grid must be increasing and within the cache");
        for (; n < N; ++n) {
            // Kahan update keeps long prefixes drift-free.
            const double term = std::abs(w.cache[static_cast<std::size_t>(n)]) - comp;
            const double t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        const double avg = sum / static_cast<double>(N);
        best = std::max(best, avg);
        rep.averages.push_back(avg);
        rep.running_max.push_back(best);
    }
    return rep;
}

ResidueReport best_residue(const WeightSequence& w, int q,
                           std::span<const std::int64_t> grid) {
    if (q < 1) throw InvalidArgument("best_residue needs q >= 1");
    ResidueReport rep;
    rep.q = q;
    rep.grid.assign(grid.begin(), grid.end());
    rep.averages.resize(static_cast<std::size_t>(q));
    rep.final_averages.resize(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
        double sum = 0.0, comp = 0.0;
        std::int64_t n = 0;
        for (std::int64_t N : grid) {
            if (N <= n) throw InvalidArgument("grid must be increasing");
            for (; n < N; ++n) {
                const std::size_t idx =
                    static_cast<std::size_t>(n) * static_cast<std::size_t>(q) +
                    static_cast<std::size_t>(j);
                if (idx >= w.size())
                    throw InvalidArgument("grid exceeds cache for residue " +
                                          std::to_string(j));
                const double term = std::abs(w.cache[idx]) - comp;
                const double t = sum + term;
                comp = (t - sum) - term;
                sum = t;
            }
            rep.averages[static_cast<std::size_t>(j)].push_back(
                sum / static_cast<double>(N));
        }
        rep.final_averages[static_cast<std::size_t>(j)] =
            rep.averages[static_cast<std::size_t>(j)].back();
    }
    rep.j0 = 0;
    for (int j = 1; j < q; ++j)
        if (rep.final_averages[static_cast<std::size_t>(j)] >
            rep.final_averages[static_cast<std::size_t>(rep.j0)])
            rep.j0 = j;
    return rep;
}

std::vector<std::int64_t> geometric_grid(std::int64_t n_max) {
    if (n_max < 1) throw InvalidArgument("geometric_grid needs n_max >= 1");
    std::vector<std::int64_t> grid;
    for (std::int64_t v = 1; v <= n_max; v *= 2) grid.push_back(v);
    if (grid.back() != n_max) grid.push_back(n_max);
    return grid;
}

WeightSequence mask_residue(const WeightSequence& w, int q, int j) {
    if (q < 1 || j < 0 || j >= q)
        throw InvalidArgument("mask_residue needs 0 <= j < q");
    WeightSequence out;
    out.spec.kind = WeightSpec::Kind::CustomTable;
    out.cache.resize(w.size());
    for (std::size_t n = 0; n < w.size(); ++n)
        out.cache[n] = (static_cast<int>(n % static_cast<std::size_t>(q)) == j)
                           ? w.cache[n]
                           : Complex{};
    out.spec.table = out.cache;
    return out;
}

RealizedReal realize_real(const WeightSequence& w) {
    WeightSequence re = w, im = w;
    for (std::size_t n = 0; n < w.size(); ++n) {
        re.cache[n] = Complex(w.cache[n].real(), 0.0);
        im.cache[n] = Complex(w.cache[n].imag(), 0.0);
    }
    const std::int64_t N = static_cast<std::int64_t>(w.size());
    const std::int64_t probe[] = {N};
    const double re_index = nontriviality_index(re, probe).running_max.back();
    if (re_index > 0.0) return {std::move(re), false};
    return {std::move(im), true};
}

}  // namespace ergo::weights
