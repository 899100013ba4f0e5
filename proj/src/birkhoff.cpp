#include "ergo/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ergo::birkhoff {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SystemHandle SystemHandle::full_shift(int m) {
    if (m < 2) throw InvalidArgument("full shift needs at least 2 symbols");
    SystemHandle s;
    s.kind = Kind::FullShift;
    s.symbols = m;
    return s;
}

SystemHandle SystemHandle::coded_subshift(horseshoe::CodedHorseshoe h) {
    h.validate();
    SystemHandle s;
    s.kind = Kind::CodedSubshift;
    s.coded = std::make_shared<horseshoe::CodedHorseshoe>(std::move(h));
    return s;
}

SystemHandle SystemHandle::toral_affine(toral::ToralAffineMap m) {
    if (m.B.determinant() == 0) throw InvalidArgument("singular toral map");
    SystemHandle s;
    s.kind = Kind::ToralAffine;
    s.map = std::make_shared<toral::ToralAffineMap>(std::move(m));
    return s;
}

SystemHandle SystemHandle::circle_rotation(double alpha) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw InvalidArgument("rotation angle must lie in [0,1)");
    SystemHandle s;
    s.kind = Kind::CircleRotation;
    s.alpha = alpha;
    return s;
}

std::string SystemHandle::name() const {
    switch (kind) {
        case Kind::FullShift: return "full_shift(" + std::to_string(symbols) + ")";
        case Kind::CodedSubshift:
            return "coded_subshift(tau=" + std::to_string(coded->order) + ")";
        case Kind::ToralAffine:
            return "toral_affine(d=" + std::to_string(map->B.d) + ")";
        case Kind::CircleRotation:
            return "circle_rotation(alpha=" + std::to_string(alpha) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Observables

Observable Observable::cylinder_indicator_diff(Word w0, Word w1) {
    if (w0.empty() || w1.empty())
        throw InvalidArgument("indicator words must be non-empty");
    Observable f;
    f.kind_ = Kind::CylinderDiff;
    f.w0_ = std::move(w0);
    f.w1_ = std::move(w1);
    f.window_len_ = std::max(f.w0_.length(), f.w1_.length());
    f.sup_norm_ = 1.0;
    return f;
}

Observable Observable::locally_constant(int word_len,
                                        std::map<std::string, Complex> table) {
    if (word_len < 1) throw InvalidArgument("word length must be >= 1");
    Observable f;
    f.kind_ = Kind::LocallyConstant;
    f.window_len_ = word_len;
    f.table_ = std::move(table);
    f.sup_norm_ = 0.0;
    for (const auto& [k, v] : f.table_) {
        if (static_cast<int>(k.size()) != word_len)
            throw InvalidArgument("table key of wrong length: " + k);
        f.sup_norm_ = std::max(f.sup_norm_, std::abs(v));
    }
    return f;
}

Observable Observable::character(std::vector<toral::Int> h) {
    Observable f;
    f.kind_ = Kind::Character;
    f.freq_ = std::move(h);
    f.window_len_ = 0;
    f.sup_norm_ = 1.0;
    return f;
}

Observable Observable::lifted(std::shared_ptr<const Observable> inner,
                              horseshoe::CodedHorseshoe h, int window_depth) {
    h.validate();
    if (!inner) throw InvalidArgument("lifted observable needs an inner one");
    if (window_depth < 1) throw InvalidArgument("window depth must be >= 1");
    if (inner->window_len() > window_depth)
        throw InvalidArgument(
            "inner observable needs a deeper window than the extension radius");
    Observable f;
    f.kind_ = Kind::Lifted;
    f.window_depth_ = window_depth;
    f.window_len_ = h.order * window_depth;
    f.sup_norm_ = inner->sup_norm();
    f.inner_ = std::move(inner);
    f.coded_ = std::make_shared<horseshoe::CodedHorseshoe>(std::move(h));
    return f;
}

Complex Observable::eval_window(std::string_view window) const {
    switch (kind_) {
        case Kind::CylinderDiff: {
            double v = 0.0;
            if (window.substr(0, static_cast<std::size_t>(w0_.length())) ==
                w0_.view())
                v += 1.0;
            if (window.substr(0, static_cast<std::size_t>(w1_.length())) ==
                w1_.view())
                v -= 1.0;
            return {v, 0.0};
        }
        case Kind::LocallyConstant: {
            auto it = table_.find(std::string(
                window.substr(0, static_cast<std::size_t>(window_len_))));
            return it == table_.end() ? Complex{} : it->second;
        }
        case Kind::Lifted: {
            const int tau = coded_->order;
            std::string decoded;
            decoded.reserve(static_cast<std::size_t>(window_depth_));
            for (int b = 0; b < window_depth_; ++b) {
                std::string_view block =
                    window.substr(static_cast<std::size_t>(b * tau),
                                  static_cast<std::size_t>(tau));
                if (block == coded_->generators[0].view())
                    decoded.push_back('0');
                else if (block == coded_->generators[1].view())
                    decoded.push_back('1');
                else
                    return {};  // off K: extension value 0
            }
            return inner_->eval_window(decoded);
        }
        case Kind::Character:
            throw InvalidArgument("character observables act on torus points");
    }
    return {};
}

std::string Observable::name() const {
    switch (kind_) {
        case Kind::CylinderDiff:
            return "1_[" + w0_.str() + "]-1_[" + w1_.str() + "]";
        case Kind::LocallyConstant:
            return "locally_constant(len=" + std::to_string(window_len_) + ")";
        case Kind::Character: {
            std::string s = "character(";
            for (const toral::Int& c : freq_) s += c.str() + ",";
            s += ")";
            return s;
        }
        case Kind::Lifted:
            return "lifted(" + inner_->name() + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Series

namespace {

void check_grid(std::span<const std::int64_t> grid) {
    if (grid.empty()) throw InvalidArgument("empty grid");
    std::int64_t prev = 0;
    for (std::int64_t N : grid) {
        if (N <= prev) throw InvalidArgument("grid must be strictly increasing");
        prev = N;
    }
}

AverageSeries run_symbolic(const PointSpec& x, const Observable& f,
                           const weights::WeightSequence& w,
                           std::span<const std::int64_t> grid) {
    const std::int64_t n_max = grid.back();
    if (static_cast<std::size_t>(n_max) > w.size())
        throw InvalidArgument("grid exceeds the weight cache");
    const int L = std::max(1, f.window_len());
    // Materialize one prefix; windows become views into it.
    const Word prefix = x.window(0, static_cast<int>(n_max - 1 + L));
    std::string_view sv = prefix.view();

    AverageSeries series;
    series.grid.assign(grid.begin(), grid.end());
    KahanComplex acc;
    std::size_t gi = 0;
    for (std::int64_t n = 0; n < n_max; ++n) {
        const Complex term =
            w.cache[static_cast<std::size_t>(n)] *
            f.eval_window(sv.substr(static_cast<std::size_t>(n),
                                    static_cast<std::size_t>(L)));
        acc.add(term);
        while (gi < grid.size() && grid[gi] == n + 1) {
            series.values.push_back(acc.value() / static_cast<double>(n + 1));
            ++gi;
        }
    }
    return series;
}

AverageSeries run_rotation(double alpha, const TorusPoint& x0,
                           const Observable& f,
                           const weights::WeightSequence& w,
                           std::span<const std::int64_t> grid) {
    if (!f.is_character() || f.frequency().size() != 1)
        throw InvalidArgument("rotation systems need a 1-d character observable");
    if (x0.x.size() != 1) throw InvalidArgument("rotation point must be 1-d");
    const toral::Int& h = f.frequency()[0];
    const std::int64_t n_max = grid.back();
    if (static_cast<std::size_t>(n_max) > w.size())
        throw InvalidArgument("grid exceeds the weight cache");

    AverageSeries series;
    series.grid.assign(grid.begin(), grid.end());
    KahanComplex acc;
    std::size_t gi = 0;
    for (std::int64_t n = 0; n < n_max; ++n) {
        // frac(n alpha) is exact in the dyadic expansion of alpha, so the
        // terms are geometric to working precision.
        const double na = toral::frac_int_times_unit(toral::Int(n), alpha);
        double t = na + x0.x[0];
        t -= std::floor(t);
        const double angle = kTwoPi * toral::frac_int_times_unit(h, t);
        acc.add(w.cache[static_cast<std::size_t>(n)] *
                Complex{std::cos(angle), std::sin(angle)});
        while (gi < grid.size() && grid[gi] == n + 1) {
            series.values.push_back(acc.value() / static_cast<double>(n + 1));
            ++gi;
        }
    }
    return series;
}

AverageSeries run_toral(const toral::ToralAffineMap& map, const TorusPoint& x0,
                        const Observable& f, const weights::WeightSequence& w,
                        std::span<const std::int64_t> grid) {
    if (!f.is_character())
        throw InvalidArgument("toral systems need a character observable");
    if (static_cast<int>(x0.x.size()) != map.B.d)
        throw InvalidArgument("point dimension mismatch");
    const std::int64_t n_max = grid.back();
    if (static_cast<std::size_t>(n_max) > w.size())
        throw InvalidArgument("grid exceeds the weight cache");

    // f(T^n x) = e^{2 pi i (psi_n + <B*^n h, x>)}, evaluated exactly.
    const std::vector<std::vector<toral::Int>> orbit = toral::frequency_orbit(
        map.B, f.frequency(), static_cast<int>(n_max) - 1);
    bool b_zero = true;
    for (const toral::Rat& c : map.b)
        if (c != 0) b_zero = false;
    std::vector<double> psi(static_cast<std::size_t>(n_max), 0.0);
    if (!b_zero) {
        const std::vector<toral::Rat> p = toral::psi_sequence(
            map.B, map.b, f.frequency(), static_cast<int>(n_max) - 1);
        for (std::size_t i = 0; i < p.size(); ++i)
            psi[i] = toral::frac_rational(p[i]);
    }

    AverageSeries series;
    series.grid.assign(grid.begin(), grid.end());
    KahanComplex acc;
    std::size_t gi = 0;
    for (std::int64_t n = 0; n < n_max; ++n) {
        const double frac =
            toral::frac_dot(orbit[static_cast<std::size_t>(n)], x0.x);
        const double angle = kTwoPi * (frac + psi[static_cast<std::size_t>(n)]);
        acc.add(w.cache[static_cast<std::size_t>(n)] *
                Complex{std::cos(angle), std::sin(angle)});
        while (gi < grid.size() && grid[gi] == n + 1) {
            series.values.push_back(acc.value() / static_cast<double>(n + 1));
            ++gi;
        }
    }
    return series;
}

}  // namespace

AverageSeries weighted_average_series(const SystemHandle& sys,
                                      const Observable& f, const SystemPoint& x,
                                      const weights::WeightSequence& w,
                                      std::span<const std::int64_t> grid) {
    check_grid(grid);
    AverageSeries out;
    switch (sys.kind) {
        case SystemHandle::Kind::FullShift: {
            const PointSpec* p = std::get_if<PointSpec>(&x);
            if (!p) throw InvalidArgument("full shift needs a symbolic point");
            out = run_symbolic(*p, f, w, grid);
            break;
        }
        case SystemHandle::Kind::CodedSubshift: {
            // The coded system is (K, sigma^tau); points and observables
            // live in code coordinates, where it is the binary full shift.
            const PointSpec* p = std::get_if<PointSpec>(&x);
            if (!p) throw InvalidArgument("coded subshift needs a symbolic point");
            out = run_symbolic(*p, f, w, grid);
            break;
        }
        case SystemHandle::Kind::ToralAffine: {
            const TorusPoint* p = std::get_if<TorusPoint>(&x);
            if (!p) throw InvalidArgument("toral system needs a torus point");
            out = run_toral(*sys.map, *p, f, w, grid);
            break;
        }
        case SystemHandle::Kind::CircleRotation: {
            const TorusPoint* p = std::get_if<TorusPoint>(&x);
            if (!p) throw InvalidArgument("rotation needs a torus point");
            out = run_rotation(sys.alpha, *p, f, w, grid);
            break;
        }
    }
    out.system = sys.name();
    out.observable = f.name();
    out.weight = w.spec.name();
    if (const PointSpec* p = std::get_if<PointSpec>(&x))
        out.point = p->descriptor();
    else
        out.point = "torus_point";

    const double bound = f.sup_norm() * w.spec.bound() + 1e-9;
    for (const Complex& v : out.values)
        if (std::abs(v) > bound)
            throw CertificateFailure("average exceeded sup|f| max|w|");
    return out;
}

// ---------------------------------------------------------------------------
// Correlated pairs

std::pair<Observable, PointSpec> fullshift_pair(const weights::WeightSequence& w) {
    const weights::RealizedReal real = weights::realize_real(w);
    auto signs = std::make_shared<std::vector<std::uint8_t>>();
    signs->reserve(real.seq.size());
    for (const Complex& v : real.seq.cache)
        signs->push_back(v.real() >= 0.0 ? 0 : 1);
    PointSpec x = PointSpec::rule(
        [signs](std::int64_t n) -> symbolic::Symbol {
            if (n < 0 || static_cast<std::size_t>(n) >= signs->size())
                throw InvalidArgument("sign point index beyond the weight cache");
            return (*signs)[static_cast<std::size_t>(n)];
        },
        "sign_of_weight");
    return {Observable::cylinder_indicator_diff(), std::move(x)};
}

LiftResult lift_pair(const horseshoe::CodedHorseshoe& h,
                     const horseshoe::DisjointStepsCertificate& cert,
                     std::shared_ptr<const Observable> g,
                     const PointSpec& code_x0, const weights::WeightSequence& w,
                     int window_depth) {
    h.validate();
    if (cert.tau != h.order || !cert.full())
        throw InvalidArgument(
            "lift requires a full certificate: the disjoint steps are what "
            "make the extension by 0 well-defined");
    const int tau = h.order;

    const std::vector<std::int64_t> grid =
        weights::geometric_grid(static_cast<std::int64_t>(w.size() / tau));
    const int j0 = weights::best_residue(w, tau, grid).j0;

    LiftResult out;
    out.tau = tau;
    out.j0 = j0;
    out.ambient_f = Observable::lifted(std::move(g), h, window_depth);
    out.embedded_x0 = PointSpec::block_stream(code_x0, h.coding());
    out.ambient_x = PointSpec::shifted(out.embedded_x0, tau - j0);
    return out;
}

// ---------------------------------------------------------------------------
// Uniquely ergodic control

RotationControlReport ue_control(double alpha, double beta,
                                 std::span<const std::int64_t> grid) {
    check_grid(grid);
    RotationControlReport rep;
    rep.grid.assign(grid.begin(), grid.end());

    // Resonance scan: beta close to k*alpha mod 1 for small |k|.
    for (int k = -50; k <= 50; ++k) {
        double diff = beta - k * alpha;
        diff -= std::floor(diff);
        if (std::min(diff, 1.0 - diff) < 1e-9) rep.resonance_warning = true;
    }

    const double delta = alpha - beta;
    rep.denom = std::abs(1.0 - std::polar(1.0, kTwoPi * delta));
    // denom == 0 is the eigenvalue case: the bound is vacuous and the
    // series does not converge to 0; the warning flag carries the news.

    weights::WeightSpec spec;
    spec.kind = weights::WeightSpec::Kind::Phase;
    spec.beta = beta;
    const weights::WeightSequence w =
        weights::generate(spec, static_cast<std::size_t>(grid.back()));

    const SystemHandle sys = SystemHandle::circle_rotation(alpha);
    const Observable f = Observable::character({toral::Int(1)});
    const AverageSeries series =
        weighted_average_series(sys, f, TorusPoint{{0.0}}, w, grid);

    rep.max_ratio = 0.0;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double a = std::abs(series.values[i]);
        rep.abs_values.push_back(a);
        const double ratio =
            a * static_cast<double>(series.grid[i]) * rep.denom / 2.0;
        rep.ratios.push_back(ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    rep.bound_holds = rep.max_ratio <= 1.0;
    return rep;
}

}  // namespace ergo::birkhoff
