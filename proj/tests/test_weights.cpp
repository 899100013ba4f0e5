#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergo/weights.hpp"

using namespace ergo;
using weights::WeightSpec;

TEST_SUITE_BEGIN("weights");

TEST_CASE("moebius values are definitional") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::Moebius;
    const auto w = weights::generate(spec, 10);
    CHECK(w.at(0).real() == 0.0);  // mu(0) := 0
    CHECK(w.at(1).real() == 1.0);
    CHECK(w.at(2).real() == -1.0);
    CHECK(w.at(3).real() == -1.0);
    CHECK(w.at(4).real() == 0.0);
    CHECK(w.at(5).real() == -1.0);
    CHECK(w.at(6).real() == 1.0);
    CHECK(w.at(8).real() == 0.0);
    CHECK(w.at(9).real() == 0.0);
}

TEST_CASE("phase with beta = 0 is the constant weight 1") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::Phase;
    spec.beta = 0.0;
    const auto w = weights::generate(spec, 16);
    for (std::size_t n = 0; n < 16; ++n) CHECK(w.at(n) == weights::Complex{1.0, 0.0});
}

TEST_CASE("phase matches direct exponentials") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::Phase;
    spec.beta = 1.0 / 3.0;
    const auto w = weights::generate(spec, 200);
    for (std::size_t n = 0; n < 200; ++n) {
        const double angle = -2.0 * std::numbers::pi * spec.beta *
                             static_cast<double>(n);
        CHECK(std::abs(w.at(n) - std::polar(1.0, angle)) < 1e-9);
    }
}

TEST_CASE("bernoulli regenerates its cache exactly") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::BernoulliPm1;
    spec.seed = 7;
    const auto a = weights::generate(spec, 4096);
    const auto b = weights::generate(spec, 4096);
    for (std::size_t n = 0; n < 4096; ++n) {
        CHECK(a.at(n) == b.at(n));
        CHECK(std::abs(a.at(n).real()) == 1.0);
        CHECK(a.at(n).imag() == 0.0);
    }
}

TEST_CASE("all specs respect the declared bound") {
    std::vector<WeightSpec> specs(5);
    specs[0].kind = WeightSpec::Kind::Constant;
    specs[0].value = {0.25, -0.5};
    specs[1].kind = WeightSpec::Kind::Phase;
    specs[1].beta = 0.7071;
    specs[2].kind = WeightSpec::Kind::PolyPhase;
    specs[2].poly = {0.1, std::numbers::sqrt2, 0.0, 0.3};
    specs[3].kind = WeightSpec::Kind::BernoulliPm1;
    specs[3].seed = 11;
    specs[4].kind = WeightSpec::Kind::Moebius;
    for (const WeightSpec& spec : specs) {
        const auto w = weights::generate(spec, 2000);
        for (std::size_t n = 0; n < w.size(); ++n)
            CHECK(std::abs(w.at(n)) <= spec.bound() + 1e-12);
    }
}

TEST_CASE("lacunary_exp is deterministic and unimodular") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::LacunaryExp;
    spec.beta = 1.5;
    const auto a = weights::generate(spec, 300);
    const auto b = weights::generate(spec, 300);
    for (std::size_t n = 0; n < 300; ++n) {
        CHECK(a.at(n) == b.at(n));
        CHECK(std::abs(std::abs(a.at(n)) - 1.0) < 1e-12);
    }
    // beta^2 = 2.25: frac = 0.25
    CHECK(std::abs(a.at(2) - std::polar(1.0, 2.0 * std::numbers::pi * 0.25)) <
          1e-12);
}

TEST_CASE("nontriviality index: alternating, moebius, zero") {
    WeightSpec alt;
    alt.kind = WeightSpec::Kind::PolyPhase;
    alt.poly = {0.0, 0.5};  // e^{pi i n} = (-1)^n
    const auto w = weights::generate(alt, 1024);
    const auto grid = weights::geometric_grid(1024);
    const auto rep = weights::nontriviality_index(w, grid);
    for (double a : rep.averages) CHECK(a == doctest::Approx(1.0).epsilon(1e-12));

    WeightSpec mo;
    mo.kind = WeightSpec::Kind::Moebius;
    const auto wm = weights::generate(mo, 1 << 20);
    const std::int64_t big[] = {1 << 20};
    const auto repm = weights::nontriviality_index(wm, big);
    CHECK(repm.averages.back() == doctest::Approx(6.0 / (std::numbers::pi *
                                                          std::numbers::pi))
                                      .epsilon(2e-3));

    WeightSpec zero;
    zero.kind = WeightSpec::Kind::Constant;
    zero.value = {0.0, 0.0};
    const auto wz = weights::generate(zero, 64);
    const auto repz = weights::nontriviality_index(wz, weights::geometric_grid(64));
    for (double a : repz.averages) CHECK(a == 0.0);
}

TEST_CASE("bernoulli index is exactly 1 at every N") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::BernoulliPm1;
    spec.seed = 3;
    const auto w = weights::generate(spec, 4096);
    const auto rep =
        weights::nontriviality_index(w, weights::geometric_grid(4096));
    for (double a : rep.averages) CHECK(a == 1.0);
}

TEST_CASE("best_residue: parity indicator, q=1, moebius mod 4") {
    // w_n = 1 iff n even
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::CustomTable;
    for (int n = 0; n < 256; ++n)
        spec.table.emplace_back(n % 2 == 0 ? 1.0 : 0.0, 0.0);
    const auto w = weights::generate(spec, 256);
    const std::int64_t grid[] = {32, 64};
    const auto rep = weights::best_residue(w, 2, grid);
    CHECK(rep.j0 == 0);
    CHECK(rep.final_averages[0] == 1.0);
    CHECK(rep.final_averages[1] == 0.0);

    const auto rep1 = weights::best_residue(w, 1, grid);
    CHECK(rep1.j0 == 0);

    WeightSpec mo;
    mo.kind = WeightSpec::Kind::Moebius;
    const auto wm = weights::generate(mo, 1 << 16);
    const std::int64_t mg[] = {1 << 13};
    const auto repm = weights::best_residue(wm, 4, mg);
    CHECK(repm.final_averages[0] == 0.0);  // mu vanishes on multiples of 4
    // |mu| has density 8/pi^2 on each of the other residue classes; the
    // argmax at finite N is one of them.
    const double odd_density = 8.0 / (std::numbers::pi * std::numbers::pi);
    for (int j : {1, 2, 3})
        CHECK(repm.final_averages[static_cast<std::size_t>(j)] ==
              doctest::Approx(odd_density).epsilon(0.01));
    CHECK(repm.j0 >= 1);
}

TEST_CASE("moebius residue averages mod 3 recombine to the global average") {
    WeightSpec mo;
    mo.kind = WeightSpec::Kind::Moebius;
    const auto w = weights::generate(mo, 100'000);
    const std::int64_t sub[] = {33'333};
    const auto rep = weights::best_residue(w, 3, sub);
    const std::int64_t full[] = {99'999};
    const auto global = weights::nontriviality_index(w, full);
    const double recombined = (rep.final_averages[0] + rep.final_averages[1] +
                               rep.final_averages[2]) /
                              3.0;
    CHECK(std::abs(recombined - global.averages.back()) < 1e-12);
}

TEST_CASE("mask_residue keeps one residue class") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::BernoulliPm1;
    spec.seed = 5;
    const auto w = weights::generate(spec, 64);
    const auto masked = weights::mask_residue(w, 4, 3);
    for (std::size_t n = 0; n < 64; ++n) {
        if (n % 4 == 3)
            CHECK(masked.at(n) == w.at(n));
        else
            CHECK(masked.at(n) == weights::Complex{});
    }
}

TEST_CASE("realize_real picks the imaginary part when the real part dies") {
    WeightSpec spec;
    spec.kind = WeightSpec::Kind::CustomTable;
    for (int n = 0; n < 32; ++n) spec.table.emplace_back(0.0, 0.5);
    const auto w = weights::generate(spec, 32);
    const auto real = weights::realize_real(w);
    CHECK(real.used_imag);
    CHECK(real.seq.at(0).real() == 0.5);
}

TEST_SUITE_END();
