#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergo/birkhoff.hpp"

using namespace ergo;
using birkhoff::Complex;
using birkhoff::Observable;
using birkhoff::SystemHandle;
using birkhoff::TorusPoint;
using symbolic::PointSpec;
using symbolic::Word;

namespace {
constexpr double kGolden = 0.61803398874989484820;
}

TEST_SUITE_BEGIN("birkhoff");

TEST_CASE("fixed point of the full shift gives A_N = 1") {
    weights::WeightSpec one;
    const auto w = weights::generate(one, 256);
    const auto sys = SystemHandle::full_shift(2);
    const auto f = Observable::cylinder_indicator_diff();
    const auto x = PointSpec::eventually_periodic(Word(""), Word("0"));
    const auto grid = weights::geometric_grid(256);
    const auto series = birkhoff::weighted_average_series(sys, f, x, w, grid);
    for (const Complex& v : series.values) CHECK(v == Complex{1.0, 0.0});
}

TEST_CASE("rotation with a phase weight matches the geometric closed form") {
    const double alpha = kGolden;
    const double beta = 1.0 / 3.0;
    weights::WeightSpec spec;
    spec.kind = weights::WeightSpec::Kind::Phase;
    spec.beta = beta;
    const auto w = weights::generate(spec, 1 << 14);
    const auto sys = SystemHandle::circle_rotation(alpha);
    const auto f = Observable::character({toral::Int(1)});
    const auto grid = weights::geometric_grid(1 << 14);
    const auto series = birkhoff::weighted_average_series(
        sys, f, TorusPoint{{0.25}}, w, grid);

    const double delta = alpha - beta;
    const double denom = std::abs(1.0 - std::polar(1.0, 2 * std::numbers::pi * delta));
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double N = static_cast<double>(series.grid[i]);
        const double closed =
            std::abs(std::sin(std::numbers::pi * N * delta) /
                     std::sin(std::numbers::pi * delta)) /
            N;
        CHECK(std::abs(series.values[i]) == doctest::Approx(closed).epsilon(1e-9));
        CHECK(std::abs(series.values[i]) <= 2.0 / (N * denom) + 1e-12);
    }
}

TEST_CASE("fullshift_pair: alternating and moebius weights") {
    weights::WeightSpec alt;
    alt.kind = weights::WeightSpec::Kind::PolyPhase;
    alt.poly = {0.0, 0.5};  // (-1)^n
    const auto walt = weights::realize_real(weights::generate(alt, 512)).seq;
    const auto [falt, xalt] = birkhoff::fullshift_pair(walt);
    CHECK(xalt.window(0, 6).str() == "010101");
    const auto grid = weights::geometric_grid(512);
    const auto series = birkhoff::weighted_average_series(
        SystemHandle::full_shift(2), falt, xalt, walt, grid);
    for (const Complex& v : series.values) CHECK(v.real() == doctest::Approx(1.0));

    weights::WeightSpec mo;
    mo.kind = weights::WeightSpec::Kind::Moebius;
    const auto wm = weights::generate(mo, 100'000);
    const auto [fm, xm] = birkhoff::fullshift_pair(wm);
    const std::int64_t big[] = {100'000};
    const auto sm = birkhoff::weighted_average_series(
        SystemHandle::full_shift(2), fm, xm, wm, big);
    // Independent oracle: integer sieve count of squarefree numbers.
    const auto mu = weights::moebius_sieve(100'000);
    std::int64_t count = 0;
    for (std::int8_t v : mu) count += v != 0;
    const double expected = static_cast<double>(count) / 100'000.0;
    CHECK(std::abs(sm.values.back().real() - expected) < 1e-12);
    CHECK(std::abs(sm.values.back().imag()) == 0.0);
    CHECK(std::abs(expected - 6.0 / (std::numbers::pi * std::numbers::pi)) < 0.01);
}

TEST_CASE("zero weight gives the zero series") {
    weights::WeightSpec zero;
    zero.value = {0.0, 0.0};
    const auto w = weights::generate(zero, 64);
    const auto [f, x] = birkhoff::fullshift_pair(w);
    const auto grid = weights::geometric_grid(64);
    const auto s = birkhoff::weighted_average_series(SystemHandle::full_shift(2),
                                                     f, x, w, grid);
    for (const Complex& v : s.values) CHECK(v == Complex{});
}

TEST_CASE("lift with tau = 1 is the identity lift") {
    horseshoe::CodedHorseshoe h;
    h.generators = {Word("0"), Word("1")};
    h.order = 1;
    horseshoe::DisjointStepsCertificate cert;
    cert.tau = 1;
    weights::WeightSpec spec;
    spec.kind = weights::WeightSpec::Kind::BernoulliPm1;
    spec.seed = 2;
    const auto w = weights::generate(spec, 128);
    auto g = std::make_shared<Observable>(Observable::cylinder_indicator_diff());
    const auto lift = birkhoff::lift_pair(
        h, cert, g, PointSpec::eventually_periodic(Word(""), Word("01")), w, 1);
    CHECK(lift.j0 == 0);
    CHECK(lift.tau == 1);
    // The lifted observable acts exactly like g on the (whole) shift.
    CHECK(lift.ambient_f.eval_window("0") == Complex{1.0, 0.0});
    CHECK(lift.ambient_f.eval_window("1") == Complex{-1.0, 0.0});
}

TEST_CASE("lift through a tau=4 certificate: series identity") {
    const auto [h, cert] = horseshoe::build_horseshoe_in_cylinder(Word("01"));
    const int tau = h.order;
    weights::WeightSpec one;
    const auto base = weights::generate(one, 4 * 4096);
    const auto w = weights::mask_residue(base, tau, 0);  // 1 on residue 0

    auto g = std::make_shared<Observable>(Observable::cylinder_indicator_diff());
    const auto code_x0 = PointSpec::eventually_periodic(Word(""), Word("011"));
    const auto lift = birkhoff::lift_pair(h, cert, g, code_x0, w, 2);
    CHECK(lift.j0 == 0);

    const std::int64_t N = 1024;
    const std::int64_t ambient_grid[] = {tau * N};
    const auto ambient = birkhoff::weighted_average_series(
        SystemHandle::full_shift(2), lift.ambient_f, lift.ambient_x, w,
        ambient_grid);

    // Coded series with the proof's index shift: sum w_{tau m} g(sigma^{m+1} x0).
    const auto coded_w = weights::generate(one, static_cast<std::size_t>(N));
    const std::int64_t coded_grid[] = {N};
    const auto coded_shifted = birkhoff::weighted_average_series(
        SystemHandle::coded_subshift(h), *g, PointSpec::shifted(code_x0, 1),
        coded_w, coded_grid);
    CHECK(std::abs(ambient.values.back() -
                   coded_shifted.values.back() / static_cast<double>(tau)) <
          1e-12);

    // Unshifted convention differs by boundary terms only.
    const auto coded_plain = birkhoff::weighted_average_series(
        SystemHandle::coded_subshift(h), *g, code_x0, coded_w, coded_grid);
    CHECK(std::abs(ambient.values.back() -
                   coded_plain.values.back() / static_cast<double>(tau)) <=
          2.0 / static_cast<double>(N) + 1e-12);
}

TEST_CASE("lift refuses an incomplete certificate") {
    const auto [h, cert] = horseshoe::build_horseshoe_in_cylinder(Word("01"));
    horseshoe::DisjointStepsCertificate partial = cert;
    partial.offsets_checked.pop_back();
    weights::WeightSpec one;
    const auto w = weights::generate(one, 64);
    auto g = std::make_shared<Observable>(Observable::cylinder_indicator_diff());
    CHECK_THROWS_AS(
        birkhoff::lift_pair(h, partial, g,
                            PointSpec::eventually_periodic(Word(""), Word("0")),
                            w, 2),
        InvalidArgument);
}

TEST_CASE("ue_control: golden rotation against beta = 1/3") {
    const auto grid = weights::geometric_grid(1 << 16);
    const auto rep = birkhoff::ue_control(kGolden, 1.0 / 3.0, grid);
    CHECK(rep.bound_holds);
    CHECK(rep.max_ratio <= 1.0);
    CHECK_FALSE(rep.resonance_warning);
}

TEST_CASE("ue_control: constant observable case f == 1 via h = 0") {
    // With h = 0 the series is the plain geometric sum of the weight.
    weights::WeightSpec spec;
    spec.kind = weights::WeightSpec::Kind::Phase;
    spec.beta = 0.3;
    const auto w = weights::generate(spec, 4096);
    const auto f = Observable::character({toral::Int(0)});
    const auto grid = weights::geometric_grid(4096);
    const auto series = birkhoff::weighted_average_series(
        SystemHandle::circle_rotation(kGolden), f, TorusPoint{{0.0}}, w, grid);
    const double denom = std::abs(1.0 - std::polar(1.0, -2 * std::numbers::pi * 0.3));
    for (std::size_t i = 0; i < series.values.size(); ++i)
        CHECK(std::abs(series.values[i]) <=
              2.0 / (static_cast<double>(series.grid[i]) * denom) + 1e-12);
}

TEST_CASE("ue_control: beta = alpha is the eigenvalue case") {
    weights::WeightSpec spec;
    spec.kind = weights::WeightSpec::Kind::Phase;
    spec.beta = kGolden;
    const auto w = weights::generate(spec, 1024);
    const auto f = Observable::character({toral::Int(1)});
    const auto grid = weights::geometric_grid(1024);
    const auto series = birkhoff::weighted_average_series(
        SystemHandle::circle_rotation(kGolden), f, TorusPoint{{0.125}}, w, grid);
    for (const Complex& v : series.values)
        CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));

    const auto rep = birkhoff::ue_control(kGolden, kGolden, grid);
    CHECK(rep.resonance_warning);
}

TEST_CASE("averages never exceed sup|f| max|w|") {
    weights::WeightSpec spec;
    spec.kind = weights::WeightSpec::Kind::BernoulliPm1;
    spec.seed = 17;
    const auto w = weights::generate(spec, 2048);
    const auto grid = weights::geometric_grid(2048);
    const auto x = PointSpec::rule(
        [](std::int64_t n) { return static_cast<int>((n * n + n / 3) % 2); },
        "quadratic parity");
    const auto series = birkhoff::weighted_average_series(
        SystemHandle::full_shift(2), Observable::cylinder_indicator_diff(), x, w,
        grid);
    for (const Complex& v : series.values) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

TEST_SUITE_END();
