#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ergo/toral.hpp"

namespace ergo::toral {

namespace {
constexpr double kUnitCircleTol = 1e-8;
constexpr int kMaxIrreducibilityDegree = 6;
}  // namespace

IntMatrix IntMatrix::identity(int dim) {
    IntMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::companion(std::span<const Int> monic) {
    const int d = static_cast<int>(monic.size()) - 1;
    if (d < 1 || monic[static_cast<std::size_t>(d)] != 1)
        throw InvalidArgument("companion needs a monic polynomial of degree >= 1");
    IntMatrix m(d);
    for (int i = 0; i + 1 < d; ++i) m.at(i, i + 1) = 1;
    for (int j = 0; j < d; ++j)
        m.at(d - 1, j) = -monic[static_cast<std::size_t>(j)];
    return m;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m.at(j, i) = at(i, j);
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (d != o.d) throw InvalidArgument("matrix dimension mismatch");
    IntMatrix m(d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const Int& v = at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < d; ++j) m.at(i, j) += v * o.at(k, j);
        }
    return m;
}

std::vector<Int> IntMatrix::apply(std::span<const Int> v) const {
    if (static_cast<int>(v.size()) != d)
        throw InvalidArgument("vector dimension mismatch");
    std::vector<Int> out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out[static_cast<std::size_t>(i)] +=
                at(i, j) * v[static_cast<std::size_t>(j)];
    return out;
}

std::vector<Rat> IntMatrix::apply(std::span<const Rat> v) const {
    if (static_cast<int>(v.size()) != d)
        throw InvalidArgument("vector dimension mismatch");
    std::vector<Rat> out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out[static_cast<std::size_t>(i)] +=
                Rat(at(i, j)) * v[static_cast<std::size_t>(j)];
    return out;
}

Int IntMatrix::determinant() const {
    // Bareiss fraction-free elimination; all divisions are exact.
    IntMatrix m = *this;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < d; ++k) {
        if (m.at(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < d; ++i)
                if (m.at(i, k) != 0) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) return 0;
            for (int j = 0; j < d; ++j) std::swap(m.at(k, j), m.at(pivot, j));
            sign = -sign;
        }
        for (int i = k + 1; i < d; ++i)
            for (int j = k + 1; j < d; ++j)
                m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) /
                             prev;
        prev = m.at(k, k);
    }
    return sign * m.at(d - 1, d - 1);
}

std::vector<Int> char_poly(const IntMatrix& B) {
    const int d = B.d;
    if (d < 1) throw InvalidArgument("empty matrix");
    // Faddeev-LeVerrier: M_1 = I, a_k = -tr(B M_k)/k, M_{k+1} = B M_k + a_k I.
    std::vector<Int> a(static_cast<std::size_t>(d) + 1);
    a[static_cast<std::size_t>(d)] = 1;
    IntMatrix M = IntMatrix::identity(d);
    for (int k = 1; k <= d; ++k) {
        IntMatrix BM = B * M;
        Int tr = 0;
        for (int i = 0; i < d; ++i) tr += BM.at(i, i);
        if (tr % k != 0)
            throw CertificateFailure("Faddeev-LeVerrier produced a non-integer trace");
        const Int ak = -tr / k;
        a[static_cast<std::size_t>(d - k)] = ak;
        if (k < d) {
            M = std::move(BM);
            for (int i = 0; i < d; ++i) M.at(i, i) += ak;
        }
    }
    return a;
}

namespace {

std::complex<double> horner(std::span<const Int> coeffs, std::complex<double> z) {
    std::complex<double> v{0.0, 0.0};
    for (std::size_t i = coeffs.size(); i-- > 0;)
        v = v * z + coeffs[i].convert_to<double>();
    return v;
}

std::complex<double> horner_deriv(std::span<const Int> coeffs,
                                  std::complex<double> z) {
    std::complex<double> v{0.0, 0.0};
    for (std::size_t i = coeffs.size(); i-- > 1;)
        v = v * z + static_cast<double>(i) * coeffs[i].convert_to<double>();
    return v;
}

}  // namespace

SpectralData spectral_analysis(const IntMatrix& B) {
    const int d = B.d;
    const Int det = B.determinant();
    if (det == 0) throw InvalidArgument("matrix is singular");

    const std::vector<Int> chi = char_poly(B);

    // Roots of chi via its companion matrix, then a few Newton steps
    // against the exact coefficients.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) comp(i, i + 1) = 1.0;
    for (int j = 0; j < d; ++j)
        comp(d - 1, j) = -chi[static_cast<std::size_t>(j)].convert_to<double>();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);

    double coeff_mass = 0.0;
    for (const Int& c : chi) coeff_mass += std::abs(c.convert_to<double>());

    SpectralData out;
    for (int i = 0; i < d; ++i) {
        std::complex<double> z = es.eigenvalues()(i);
        for (int it = 0; it < 24; ++it) {
            const std::complex<double> p = horner(chi, z);
            // Stop at the evaluation noise floor; near multiple roots both
            // P and P' drown in rounding and Newton would step wildly.
            const double floor_p = 1e-15 * coeff_mass *
                                   std::pow(std::max(1.0, std::abs(z)),
                                            static_cast<double>(d));
            if (std::abs(p) <= floor_p) break;
            const std::complex<double> dp = horner_deriv(chi, z);
            if (std::abs(dp) < 1e-300) break;
            const std::complex<double> next = z - p / dp;
            if (std::abs(horner(chi, next)) >= std::abs(p)) break;
            z = next;
        }
        out.eigenvalues.push_back(z);
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const Complex& a, const Complex& b) {
                  if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
                  if (a.real() != b.real()) return a.real() > b.real();
                  return a.imag() > b.imag();
              });

    // Cross-check against a direct eigensolve of B itself.
    Eigen::MatrixXd Bd(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Bd(i, j) = B.at(i, j).convert_to<double>();
    Eigen::EigenSolver<Eigen::MatrixXd> esb(Bd, /*computeEigenvectors=*/true);
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    double scale = 1.0;
    for (const Complex& z : out.eigenvalues) scale = std::max(scale, std::abs(z));
    for (int i = 0; i < d; ++i) {
        double best = 1e300;
        int arg = -1;
        for (int j = 0; j < d; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double dist = std::abs(out.eigenvalues[static_cast<std::size_t>(i)] -
                                         esb.eigenvalues()(j));
            if (dist < best) {
                best = dist;
                arg = j;
            }
        }
        used[static_cast<std::size_t>(arg)] = true;
        if (best > 1e-6 * scale)
            throw CertificateFailure(
                "eigenvalue cross-check failed: companion and direct solves disagree");
    }

    out.spectral_radius = std::abs(out.eigenvalues.front());
    double entropy = 0.0;
    for (const Complex& z : out.eigenvalues)
        if (std::abs(z) > 1.0) entropy += std::log(std::abs(z));
    out.entropy = entropy;

    // |prod eigenvalues| must reproduce |det B|.
    double prod = 1.0;
    for (const Complex& z : out.eigenvalues) prod *= std::abs(z);
    const double adet = std::abs(det.convert_to<double>());
    if (std::abs(prod - adet) > 1e-6 * adet)
        throw CertificateFailure("eigenvalue product does not match |det B|");

    // Leading eigenvector from the direct solve, matched to the largest
    // modulus, unit Hermitian norm.
    int lead = 0;
    for (int j = 1; j < d; ++j)
        if (std::abs(esb.eigenvalues()(j)) > std::abs(esb.eigenvalues()(lead)))
            lead = j;
    Eigen::VectorXcd v = esb.eigenvectors().col(lead);
    v.normalize();
    for (int i = 0; i < d; ++i) out.leading_eigenvector.push_back(v(i));
    out.transform_norm_bound = esb.eigenvectors().norm();
    return out;
}

// ---------------------------------------------------------------------------
// Irreducibility over Q (degree <= 6)

namespace {

std::vector<Int> divisors_with_sign(const Int& n) {
    std::vector<Int> divs;
    const Int a = n < 0 ? Int(-n) : n;
    for (Int i = 1; i * i <= a; ++i)
        if (a % i == 0) {
            divs.push_back(i);
            divs.push_back(-i);
            if (i * i != a) {
                divs.push_back(a / i);
                divs.push_back(-a / i);
            }
        }
    return divs;
}

// Quotient of exact division of monic polynomials, or nullopt.
std::optional<std::vector<Int>> exact_divide(std::span<const Int> num,
                                             std::span<const Int> den) {
    std::vector<Int> rem(num.begin(), num.end());
    const int dn = static_cast<int>(num.size()) - 1;
    const int dd = static_cast<int>(den.size()) - 1;
    std::vector<Int> quot(static_cast<std::size_t>(dn - dd) + 1);
    for (int k = dn - dd; k >= 0; --k) {
        const Int c = rem[static_cast<std::size_t>(k + dd)];
        quot[static_cast<std::size_t>(k)] = c;
        for (int j = 0; j <= dd; ++j)
            rem[static_cast<std::size_t>(k + j)] -=
                c * den[static_cast<std::size_t>(j)];
    }
    for (const Int& c : rem)
        if (c != 0) return std::nullopt;
    return quot;
}

// Mignotte-style coefficient bound for monic factors.
Int factor_coeff_bound(std::span<const Int> poly) {
    double norm2 = 0.0;
    for (const Int& c : poly) {
        const double v = c.convert_to<double>();
        norm2 += v * v;
    }
    const double bound = 32.0 * (std::sqrt(norm2) + 1.0);
    return Int(static_cast<long long>(bound) + 1);
}

bool has_monic_factor_of_degree(std::span<const Int> poly, int k) {
    const Int c0 = poly[0];
    const Int bound = factor_coeff_bound(poly);
    std::vector<Int> tail = divisors_with_sign(c0);
    if (k == 1) {
        for (const Int& r : tail) {
            // z - r divides poly iff poly(r) = 0; tail holds candidate roots.
            Int v = 0;
            for (std::size_t i = poly.size(); i-- > 0;) v = v * r + poly[i];
            if (v == 0) return true;
        }
        return false;
    }
    std::vector<Int> factor(static_cast<std::size_t>(k) + 1);
    factor[static_cast<std::size_t>(k)] = 1;
    // Enumerate middle coefficients within the bound, constant term among
    // the divisors of c0.
    std::vector<Int> mids(static_cast<std::size_t>(k - 1));
    std::function<bool(int)> rec = [&](int idx) -> bool {
        if (idx == k - 1) {
            for (const Int& c : tail) {
                factor[0] = c;
                for (int i = 1; i < k; ++i)
                    factor[static_cast<std::size_t>(i)] =
                        mids[static_cast<std::size_t>(i - 1)];
                if (exact_divide(poly, factor)) return true;
            }
            return false;
        }
        for (Int v = -bound; v <= bound; ++v) {
            mids[static_cast<std::size_t>(idx)] = v;
            if (rec(idx + 1)) return true;
        }
        return false;
    };
    return rec(0);
}

}  // namespace

bool irreducible_over_Q(std::span<const Int> monic) {
    const int d = static_cast<int>(monic.size()) - 1;
    if (d < 1 || monic[static_cast<std::size_t>(d)] != 1)
        throw InvalidArgument("irreducibility test needs a monic polynomial");
    if (d > kMaxIrreducibilityDegree)
        throw Unsupported("irreducibility implemented for degree <= 6");
    if (monic[0] == 0) return d == 1;  // z divides
    for (int k = 1; k <= d / 2; ++k)
        if (has_monic_factor_of_degree(monic, k)) return false;
    return true;
}

Classification classify(const IntMatrix& B) {
    Classification out;
    const SpectralData sd = spectral_analysis(B);
    out.entropy = sd.entropy;

    bool any_on_circle = false;
    bool any_outside = false;
    for (const Complex& z : sd.eigenvalues) {
        const double m = std::abs(z);
        if (std::abs(m - 1.0) <= kUnitCircleTol)
            any_on_circle = true;
        else if (m > 1.0)
            any_outside = true;
    }

    if (!any_outside)
        out.cls = HyperbolicityClass::NoExpansion;
    else if (any_on_circle)
        out.cls = HyperbolicityClass::PartiallyHyperbolic;
    else
        out.cls = HyperbolicityClass::Hyperbolic;

    Int det = B.determinant();
    out.horseshoe_free_applicable = (det == 1 || det == -1);
    out.irreducible = irreducible_over_Q(char_poly(B));
    out.horseshoe_free = out.horseshoe_free_applicable && out.irreducible &&
                         any_on_circle && any_outside;
    return out;
}

// ---------------------------------------------------------------------------
// Frequency orbits

std::vector<std::vector<Int>> frequency_orbit(const IntMatrix& B,
                                              std::span<const Int> h0,
                                              int n_max, bool via_squaring) {
    if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
    const IntMatrix Bt = B.transpose();
    std::vector<std::vector<Int>> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    if (!via_squaring) {
        std::vector<Int> h(h0.begin(), h0.end());
        out.push_back(h);
        for (int n = 1; n <= n_max; ++n) {
            h = Bt.apply(h);
            out.push_back(h);
        }
        return out;
    }
    // Second path: h_n = (B*)^n h0 with the power formed by repeated
    // squaring, recomputed from scratch for every n.
    for (int n = 0; n <= n_max; ++n) {
        IntMatrix pw = IntMatrix::identity(B.d);
        IntMatrix base = Bt;
        int e = n;
        while (e > 0) {
            if (e & 1) pw = pw * base;
            base = base * base;
            e >>= 1;
        }
        out.push_back(pw.apply(h0));
    }
    return out;
}

std::vector<Rat> psi_sequence(const IntMatrix& B, std::span<const Rat> b,
                              std::span<const Int> h0, int n_max) {
    if (static_cast<int>(b.size()) != B.d || static_cast<int>(h0.size()) != B.d)
        throw InvalidArgument("dimension mismatch in psi_sequence");
    std::vector<Rat> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    out.emplace_back(0);
    std::vector<Rat> s(b.begin(), b.end());  // S_n b = (B^{n-1}+...+I) b
    for (int n = 1; n <= n_max; ++n) {
        Rat psi = 0;
        for (int i = 0; i < B.d; ++i)
            psi += Rat(h0[static_cast<std::size_t>(i)]) *
                   s[static_cast<std::size_t>(i)];
        // reduce mod 1 into [0, 1)
        Int num = boost::multiprecision::numerator(psi);
        Int den = boost::multiprecision::denominator(psi);
        Int q = num / den;
        if (num < 0 && q * den != num) q -= 1;
        out.push_back(psi - Rat(q));
        if (n < n_max) {
            s = B.apply(s);
            for (int i = 0; i < B.d; ++i)
                s[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

std::vector<Int> choose_h0(const SpectralData& spectral) {
    const std::vector<Complex>& v = spectral.leading_eigenvector;
    if (v.empty()) throw InvalidArgument("spectral data lacks an eigenvector");
    int best = -1;
    double best_abs = 1e-8;
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        const double m = std::abs(v[static_cast<std::size_t>(i)]);
        if (m > best_abs + 1e-15) {
            best = i;
            best_abs = m;
        }
    }
    if (best < 0)
        throw CertificateFailure("leading eigenvector has no usable coordinate");
    std::vector<Int> h0(v.size());
    h0[static_cast<std::size_t>(best)] = 1;
    return h0;
}

std::vector<Int> choose_h0(const IntMatrix& B) {
    return choose_h0(spectral_analysis(B));
}

}  // namespace ergo::toral
