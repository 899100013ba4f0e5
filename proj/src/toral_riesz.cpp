#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "ergo/toral.hpp"

namespace ergo::toral {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxHorizon = 12;
constexpr int kMaxSamplerDepth = 16;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}
}  // namespace

double frac_int_times_unit(const Int& h, double x) {
    if (x < 0.0 || x >= 1.0) throw InvalidArgument("x must lie in [0,1)");
    if (h == 0 || x == 0.0) return 0.0;
    const bool neg = h < 0;
    const Int habs = neg ? Int(-h) : h;

    int e = 0;
    const double f = std::frexp(x, &e);  // x = f 2^e, e <= 0
    const std::int64_t mant = static_cast<std::int64_t>(std::ldexp(f, 53));
    const int s = 53 - e;  // x = mant / 2^s exactly

    double frac;
    if (s < 74 && habs < (Int(1) << 62)) {
        // h * mant < 2^115 and the mask shift stays inside 128 bits.
        const unsigned __int128 prod =
            static_cast<unsigned __int128>(habs.convert_to<std::uint64_t>()) *
            static_cast<unsigned __int128>(mant);
        const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << s) - 1;
        frac = std::ldexp(static_cast<double>(prod & mask), -s);
    } else {
        const Int prod = habs * mant;
        const Int mod = prod & ((Int(1) << s) - 1);
        frac = std::ldexp(mod.convert_to<double>(), -s);
    }
    if (neg && frac != 0.0) frac = 1.0 - frac;
    return frac;
}

double frac_dot(std::span<const Int> h, std::span<const double> x) {
    if (h.size() != x.size()) throw InvalidArgument("frac_dot dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        acc += frac_int_times_unit(h[i], x[i]);
    return acc - std::floor(acc);
}

double frac_rational(const Rat& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    Int q = num / den;
    if (num < 0 && q * den != num) q -= 1;
    const Rat f = r - Rat(q);
    return f.convert_to<double>();
}

// ---------------------------------------------------------------------------
// Plans and dissociateness

FrequencyPlan make_plan(const IntMatrix& B, std::span<const Int> h0, int q,
                        int horizon) {
    if (q < 1) throw InvalidArgument("plan needs q >= 1");
    if (horizon < 1) throw InvalidArgument("plan needs horizon >= 1");
    FrequencyPlan plan;
    plan.B = B;
    plan.h0.assign(h0.begin(), h0.end());
    plan.q = q;
    plan.horizon = horizon;
    plan.h = frequency_orbit(B, h0, q * horizon);

    double theta = 1e300;
    auto norm = [](const std::vector<Int>& v) {
        double s = 0.0;
        for (const Int& c : v) {
            const double t = c.convert_to<double>();
            s += t * t;
        }
        return std::sqrt(s);
    };
    for (std::size_t n = 0; n + 1 < plan.h.size(); ++n) {
        const double a = norm(plan.h[n]);
        const double b = norm(plan.h[n + 1]);
        if (a > 0.0) theta = std::min(theta, b / a);
    }
    plan.theta = theta == 1e300 ? 0.0 : theta;
    return plan;
}

namespace {

std::string key_of(const std::vector<Int>& v) {
    std::string key;
    for (const Int& c : v) {
        key += c.str();
        key += ',';
    }
    return key;
}

double dist2(const std::vector<Int>& a, const std::vector<Int>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = (a[i] - b[i]).convert_to<double>();
        s += t * t;
    }
    return s;
}

// All sums sum eps_j h[base + step*j], eps in {-1,0,1}^D, with the sign
// pattern attached.
void enumerate_sums(const std::vector<std::vector<Int>>& h, int base, int step,
                    int D,
                    std::vector<std::pair<std::vector<Int>, std::vector<int>>>& out) {
    const std::size_t dim = h[0].size();
    std::vector<Int> acc(dim);
    std::vector<int> eps(static_cast<std::size_t>(D));
    std::function<void(int)> rec = [&](int j) {
        if (j == D) {
            out.emplace_back(acc, eps);
            return;
        }
        const std::vector<Int>& hj =
            h[static_cast<std::size_t>(base + step * j)];
        for (int e = -1; e <= 1; ++e) {
            eps[static_cast<std::size_t>(j)] = e;
            if (e != 0)
                for (std::size_t i = 0; i < dim; ++i)
                    acc[i] += e > 0 ? hj[i] : -hj[i];
            rec(j + 1);
            if (e != 0)
                for (std::size_t i = 0; i < dim; ++i)
                    acc[i] -= e > 0 ? hj[i] : -hj[i];
        }
    };
    rec(0);
}

}  // namespace

SplitReport lacunarity_and_split_check(const FrequencyPlan& plan) {
    if (plan.horizon > kMaxHorizon)
        throw Unsupported("brute-force horizon capped at 12 (3^D sign patterns)");
    SplitReport rep;
    rep.horizon = plan.horizon;

    std::vector<std::pair<std::vector<Int>, std::vector<int>>> sums;
    enumerate_sums(plan.h, 0, plan.q, plan.horizon, sums);

    std::map<std::string, const std::vector<int>*> seen;
    rep.dissociate_ok = true;
    for (const auto& [vec, eps] : sums) {
        auto [it, inserted] = seen.emplace(key_of(vec), &eps);
        if (!inserted) {
            rep.dissociate_ok = false;
            rep.collision = CollisionWitness{*it->second, eps};
            break;
        }
    }

    // Split checks: every element of a nonzero class, and every nonzero
    // difference taken within one class, must stay delta away from the
    // truncated H_0^*.  Differences within class p are what the
    // cross-residue orthogonality consumes.
    double min_class = 1e300;
    double min_diff = 1e300;
    const std::vector<Int> zero(plan.h[0].size());
    auto min_dist_to_star = [&](const std::vector<Int>& target) {
        double best = 1e300;
        for (const auto& [vec, eps] : sums)
            best = std::min(best, dist2(target, vec));
        return std::sqrt(best);
    };
    bool any_other = false;
    for (int k = 1; k < plan.q; ++k) {
        std::vector<std::vector<Int>> cls;
        for (int n = 0; n < plan.horizon; ++n) {
            const std::size_t idx = static_cast<std::size_t>(plan.q * n + k);
            if (idx < plan.h.size()) cls.push_back(plan.h[idx]);
        }
        any_other = any_other || !cls.empty();
        for (const std::vector<Int>& v : cls)
            min_class = std::min(min_class, min_dist_to_star(v));
        for (std::size_t i = 0; i < cls.size(); ++i)
            for (std::size_t j = 0; j < cls.size(); ++j) {
                if (i == j) continue;
                std::vector<Int> diff(cls[i].size());
                for (std::size_t t = 0; t < diff.size(); ++t)
                    diff[t] = cls[i][t] - cls[j][t];
                if (diff == zero) continue;
                min_diff = std::min(min_diff, min_dist_to_star(diff));
            }
    }

    rep.min_gap_class = min_class == 1e300 ? 0.0 : min_class;
    rep.min_gap_diff = min_diff == 1e300 ? 0.0 : min_diff;
    const double gap = std::min(min_class, min_diff);
    const double delta = plan.delta > 0.0 ? plan.delta : 0.0;
    rep.split_ok = rep.dissociate_ok &&
                   (!any_other || (gap > 0.0 && gap >= delta));
    return rep;
}

PlanChoice choose_plan(const IntMatrix& B, std::span<const Int> h0, int horizon,
                       int q_max) {
    for (int q = 1; q <= q_max; ++q) {
        FrequencyPlan plan = make_plan(B, h0, q, horizon);
        SplitReport rep = lacunarity_and_split_check(plan);
        if (rep.dissociate_ok && rep.split_ok) {
            const double gap = std::min(rep.min_gap_class, rep.min_gap_diff);
            plan.delta = gap == 1e300 || gap <= 0.0 ? 0.0 : gap / 2.0;
            return {std::move(plan), rep};
        }
    }
    throw Unsupported("no q <= " + std::to_string(q_max) +
                      " passes the finite-horizon split checks");
}

// ---------------------------------------------------------------------------
// Riesz coefficients

Complex RieszSpec::coeff(int n) const {
    if (phases.empty()) return {r, 0.0};
    const double phi = phases[static_cast<std::size_t>(n)];
    return {r * std::cos(phi), r * std::sin(phi)};
}

RieszSpec make_riesz_spec(FrequencyPlan plan, double r, int K,
                          std::uint64_t seed) {
    if (r < 0.0 || r > 1.0) throw InvalidArgument("need 0 <= r <= 1");
    if (K < 1) throw InvalidArgument("need K >= 1");
    if (plan.h.size() <= static_cast<std::size_t>(plan.q) *
                             static_cast<std::size_t>(K - 1)) {
        plan.h = frequency_orbit(plan.B, plan.h0, plan.q * K);
        plan.horizon = std::max(plan.horizon, K);
    }
    RieszSpec spec;
    spec.plan = std::move(plan);
    spec.r = r;
    spec.K = K;
    spec.seed = seed;
    return spec;
}

RieszSpec make_riesz_spec(FrequencyPlan plan, double r, int K,
                          std::uint64_t seed,
                          const weights::WeightSequence& w,
                          std::span<const Rat> psi_mod1) {
    RieszSpec spec = make_riesz_spec(std::move(plan), r, K, seed);
    spec.phases.resize(static_cast<std::size_t>(K));
    for (int n = 0; n < K; ++n) {
        const std::size_t qi = static_cast<std::size_t>(spec.plan.q) *
                               static_cast<std::size_t>(n);
        const Complex wn = w.at(qi);
        const double argw = (wn == Complex{}) ? 0.0 : std::arg(wn);
        double psi = 0.0;
        if (!psi_mod1.empty()) {
            if (qi >= psi_mod1.size())
                throw InvalidArgument("psi sequence shorter than q*K");
            psi = frac_rational(psi_mod1[qi]);
        }
        spec.phases[static_cast<std::size_t>(n)] = argw + kTwoPi * psi;
    }
    return spec;
}

namespace {

struct Decomposition {
    std::vector<int> eps;  // per depth index, in {-1,0,1}
};

void decompose_rec(const RieszSpec& spec, const std::vector<double>& tail_norm,
                   std::vector<Int>& rem, int n, std::vector<int>& eps,
                   std::vector<Decomposition>& found) {
    if (found.size() >= 2) return;
    const std::size_t dim = rem.size();
    if (n < 0) {
        for (const Int& c : rem)
            if (c != 0) return;
        found.push_back({eps});
        return;
    }
    double rem_norm = 0.0;
    for (const Int& c : rem) {
        const double v = c.convert_to<double>();
        rem_norm += v * v;
    }
    // Nothing below index n can bridge more than the remaining tail mass.
    if (std::sqrt(rem_norm) >
        tail_norm[static_cast<std::size_t>(n)] * (1.0 + 1e-9) + 1e-9)
        return;
    const std::vector<Int>& hn =
        spec.plan.h[static_cast<std::size_t>(spec.plan.q * n)];
    for (int e = 1; e >= -1; --e) {
        eps[static_cast<std::size_t>(n)] = e;
        if (e != 0)
            for (std::size_t i = 0; i < dim; ++i)
                rem[i] -= e > 0 ? hn[i] : -hn[i];
        decompose_rec(spec, tail_norm, rem, n - 1, eps, found);
        if (e != 0)
            for (std::size_t i = 0; i < dim; ++i)
                rem[i] += e > 0 ? hn[i] : -hn[i];
    }
    eps[static_cast<std::size_t>(n)] = 0;
}

}  // namespace

Complex riesz_coefficient(const RieszSpec& spec, std::span<const Int> k) {
    const int d = spec.plan.B.d;
    if (static_cast<int>(k.size()) != d)
        throw InvalidArgument("frequency dimension mismatch");

    std::vector<double> tail_norm(static_cast<std::size_t>(spec.K));
    double acc = 0.0;
    for (int n = 0; n < spec.K; ++n) {
        const std::vector<Int>& hn =
            spec.plan.h[static_cast<std::size_t>(spec.plan.q * n)];
        double s = 0.0;
        for (const Int& c : hn) {
            const double v = c.convert_to<double>();
            s += v * v;
        }
        acc += std::sqrt(s);
        tail_norm[static_cast<std::size_t>(n)] = acc;
    }

    std::vector<Int> rem(k.begin(), k.end());
    std::vector<int> eps(static_cast<std::size_t>(spec.K));
    std::vector<Decomposition> found;
    decompose_rec(spec, tail_norm, rem, spec.K - 1, eps, found);

    if (found.empty()) return {0.0, 0.0};
    if (found.size() > 1)
        throw IntegrityError("ambiguous frequency decomposition (dissociateness violated)");

    Complex prod{1.0, 0.0};
    for (int n = 0; n < spec.K; ++n) {
        const int e = found[0].eps[static_cast<std::size_t>(n)];
        if (e == 1)
            prod *= spec.coeff(n) / 2.0;
        else if (e == -1)
            prod *= std::conj(spec.coeff(n)) / 2.0;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Sampler

namespace {

double partial_product_density(const RieszSpec& spec,
                               std::span<const double> x) {
    double density = 1.0;
    for (int n = 0; n < spec.K; ++n) {
        const std::vector<Int>& hn =
            spec.plan.h[static_cast<std::size_t>(spec.plan.q * n)];
        const double frac = frac_dot(hn, x);
        const double phi = spec.phases.empty()
                               ? 0.0
                               : spec.phases[static_cast<std::size_t>(n)];
        density *= 1.0 + spec.r * std::cos(kTwoPi * frac + phi);
    }
    return density;
}

// Scalar frequencies small enough for native modular products; x = U/2^53
// with U the raw mantissa, so frac(h x) = (|h| U mod 2^53) / 2^53 exactly,
// matching frac_int_times_unit bit for bit.
struct FastDensity {
    std::vector<std::uint64_t> freqs;
    std::vector<bool> neg;
    std::vector<double> phases;
    double r = 0.0;
    bool usable = false;

    explicit FastDensity(const RieszSpec& spec) : r(spec.r) {
        if (spec.plan.B.d != 1) return;
        for (int n = 0; n < spec.K; ++n) {
            const Int& h = spec.plan.h[static_cast<std::size_t>(
                spec.plan.q * n)][0];
            const Int habs = h < 0 ? Int(-h) : h;
            if (habs >= (Int(1) << 62)) return;
            freqs.push_back(habs.convert_to<std::uint64_t>());
            neg.push_back(h < 0);
            phases.push_back(spec.phases.empty()
                                 ? 0.0
                                 : spec.phases[static_cast<std::size_t>(n)]);
        }
        usable = true;
    }

    double operator()(std::uint64_t mant) const {
        double density = 1.0;
        for (std::size_t n = 0; n < freqs.size(); ++n) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(freqs[n]) *
                static_cast<unsigned __int128>(mant);
            double frac = std::ldexp(
                static_cast<double>(prod & ((1ull << 53) - 1)), -53);
            if (neg[n] && frac != 0.0) frac = 1.0 - frac;
            density *= 1.0 + r * std::cos(kTwoPi * frac + phases[n]);
        }
        return density;
    }
};

std::mt19937_64 worker_rng(std::uint64_t seed, int worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(worker)};
    return std::mt19937_64(seq);
}

}  // namespace

SampleBatch riesz_sample(const RieszSpec& spec, std::size_t count,
                         std::uint64_t seed, int jobs) {
    if (spec.plan.B.d != 1)
        throw Unsupported("exact rejection sampler requires d = 1");
    if (spec.K > kMaxSamplerDepth)
        throw Unsupported("sampler depth capped at K <= 16");
    if (jobs < 1) jobs = 1;

    const double envelope = std::pow(1.0 + spec.r, spec.K);
    const FastDensity fast(spec);
    SampleBatch batch;
    batch.x.reserve(count);

    std::vector<std::vector<double>> per_worker(static_cast<std::size_t>(jobs));
    std::vector<std::uint64_t> proposals(static_cast<std::size_t>(jobs), 0);
    auto run = [&](int worker) {
        const std::size_t quota = count / static_cast<std::size_t>(jobs) +
                                  (static_cast<std::size_t>(worker) <
                                           count % static_cast<std::size_t>(jobs)
                                       ? 1
                                       : 0);
        std::mt19937_64 rng = worker_rng(seed, worker);
        std::vector<double>& out = per_worker[static_cast<std::size_t>(worker)];
        out.reserve(quota);
        std::uint64_t tries = 0;
        const std::uint64_t hard_cap =
            std::max<std::uint64_t>(1'000'000, 2'000'000 * quota);
        while (out.size() < quota) {
            if (++tries > hard_cap)
                throw EnvelopeTooLoose("acceptance rate below 1e-6; reduce K or r");
            const std::uint64_t mant = rng() >> 11;
            const double x = static_cast<double>(mant) * 0x1p-53;
            const double u = uniform01(rng);
            const double density =
                fast.usable ? fast(mant)
                            : partial_product_density(spec, std::span(&x, 1));
            if (u * envelope <= density) out.push_back(x);
        }
        proposals[static_cast<std::size_t>(worker)] = tries;
    };

    if (jobs == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        for (int wkr = 0; wkr < jobs; ++wkr)
            threads.emplace_back([&, wkr] {
                try {
                    run(wkr);
                } catch (...) {
                    errors[static_cast<std::size_t>(wkr)] = std::current_exception();
                }
            });
        for (std::thread& t : threads) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::uint64_t total = 0;
    for (int wkr = 0; wkr < jobs; ++wkr) {
        batch.x.insert(batch.x.end(),
                       per_worker[static_cast<std::size_t>(wkr)].begin(),
                       per_worker[static_cast<std::size_t>(wkr)].end());
        total += proposals[static_cast<std::size_t>(wkr)];
    }
    batch.proposals = total;
    batch.acceptance_rate =
        total == 0 ? 0.0
                   : static_cast<double>(batch.x.size()) / static_cast<double>(total);
    return batch;
}

// ---------------------------------------------------------------------------
// Weighted-limit verification

LimitReport verify_weighted_limit(const ToralAffineMap& map,
                                  const weights::WeightSequence& w,
                                  const RieszSpec& spec, int N,
                                  std::size_t samples, int jobs) {
    const int d = map.B.d;
    const int q = spec.plan.q;
    if (N < 1) throw InvalidArgument("N must be >= 1");
    if (samples < 2) throw InvalidArgument("need at least 2 samples");
    if (map.B != spec.plan.B)
        throw InvalidArgument("map matrix differs from the plan matrix");

    LimitReport rep;
    rep.N = N;
    rep.K = spec.K;
    rep.n_samples = samples;

    const bool exact = (d == 1);
    if (exact) {
        if (N > spec.K)
            throw InvalidArgument(
                "exact path refused: N > K (frequencies beyond the truncation "
                "have no Fourier guarantee)");
        rep.path = "exact";
    } else {
        rep.path = "importance";
        rep.truncation_bias_caveat = true;
    }

    // Needed iterate data: h_j and psi_j for j < qN.
    const int j_max = q * N;
    const std::vector<std::vector<Int>> orbit =
        frequency_orbit(map.B, spec.plan.h0, j_max);
    bool b_zero = true;
    for (const Rat& c : map.b)
        if (c != 0) b_zero = false;
    std::vector<double> psi(static_cast<std::size_t>(j_max) + 1, 0.0);
    if (!b_zero) {
        const std::vector<Rat> p =
            psi_sequence(map.B, map.b, spec.plan.h0, j_max);
        for (std::size_t i = 0; i < p.size(); ++i) psi[i] = frac_rational(p[i]);
    }

    // Samples and (for the importance path) weights.
    std::vector<std::vector<double>> xs;
    std::vector<double> sample_weight;
    if (exact) {
        SampleBatch batch = riesz_sample(spec, samples, spec.seed, jobs);
        for (double x : batch.x) xs.push_back({x});
        sample_weight.assign(samples, 1.0);
    } else {
        std::mt19937_64 rng = worker_rng(spec.seed, 0);
        for (std::size_t i = 0; i < samples; ++i) {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (double& c : x) c = uniform01(rng);
            sample_weight.push_back(partial_product_density(spec, x));
            xs.push_back(std::move(x));
        }
    }
    double weight_sum = 0.0;
    for (double v : sample_weight) weight_sum += v;

    auto residue_average = [&](const std::vector<double>& x, int p) {
        Complex sum{};
        for (int n = 0; n < N; ++n) {
            const std::size_t j = static_cast<std::size_t>(q * n + p);
            const double frac = frac_dot(orbit[j], x);
            const double angle = kTwoPi * (frac + psi[j]);
            sum += w.at(j) * Complex{std::cos(angle), std::sin(angle)};
        }
        return sum / static_cast<double>(N);
    };

    auto stats_for = [&](int p, double target) {
        std::vector<Complex>& vals = rep.per_sample.emplace_back();
        vals.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            vals.push_back(residue_average(xs[i], p));
        Complex mean{};
        for (std::size_t i = 0; i < xs.size(); ++i)
            mean += sample_weight[i] * vals[i];
        mean /= weight_sum;
        double var = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            var += sample_weight[i] * std::norm(vals[i] - mean);
        var /= weight_sum;
        const double se = std::sqrt(var / static_cast<double>(xs.size()));
        ResidueStat st;
        st.residue = p;
        st.estimate = mean;
        st.stderr_est = se;
        st.target = target;
        st.within_3_stderr = std::abs(mean - Complex{target, 0.0}) <=
                             3.0 * se + 1e-12;
        return st;
    };

    double abs_sum = 0.0;
    for (int n = 0; n < N; ++n)
        abs_sum += std::abs(w.at(static_cast<std::size_t>(q * n)));
    rep.target = spec.r / 2.0 * abs_sum / static_cast<double>(N);

    ResidueStat main = stats_for(0, rep.target);
    rep.estimate = main.estimate;
    rep.stderr_est = main.stderr_est;
    rep.residues.push_back(main);
    for (int p = 1; p < q; ++p) rep.residues.push_back(stats_for(p, 0.0));
    return rep;
}

}  // namespace ergo::toral
