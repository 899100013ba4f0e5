// Weighted Birkhoff averages over the library's systems, explicit
// correlated-pair constructions for the full shift, lifting through
// first-return certificates, and the uniquely-ergodic rotation control.

#ifndef ERGO_BIRKHOFF_HPP
#define ERGO_BIRKHOFF_HPP

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ergo/horseshoe.hpp"
#include "ergo/toral.hpp"
#include "ergo/weights.hpp"
#include "ergo/word.hpp"

namespace ergo::birkhoff {

using Complex = std::complex<double>;
using symbolic::PointSpec;
using symbolic::Word;

// Compensated accumulator; N up to 1e7 without drift.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = v - comp;
        const double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
};

struct KahanComplex {
    KahanSum re, im;
    void add(Complex v) {
        re.add(v.real());
        im.add(v.imag());
    }
    Complex value() const { return {re.sum, im.sum}; }
};

struct SystemHandle {
    enum class Kind { FullShift, CodedSubshift, ToralAffine, CircleRotation };
    Kind kind = Kind::FullShift;
    int symbols = 2;                              // full shift
    std::shared_ptr<horseshoe::CodedHorseshoe> coded;  // coded subshift
    std::shared_ptr<toral::ToralAffineMap> map;   // toral affine
    double alpha = 0.0;                           // rotation angle

    static SystemHandle full_shift(int m = 2);
    static SystemHandle coded_subshift(horseshoe::CodedHorseshoe h);
    static SystemHandle toral_affine(toral::ToralAffineMap m);
    static SystemHandle circle_rotation(double alpha);
    std::string name() const;
};

struct TorusPoint {
    std::vector<double> x;  // coordinates in [0,1)
};

using SystemPoint = std::variant<PointSpec, TorusPoint>;

// Bounded observables.  Symbolic kinds evaluate on a finite window of the
// point; torus kinds evaluate on coordinates.
class Observable {
public:
    // 1_[w0] - 1_[w1]; the default words are "0" and "1".
    static Observable cylinder_indicator_diff(Word w0 = Word("0"),
                                              Word w1 = Word("1"));
    // Total table over words of a fixed length; words off the table (or a
    // missing entry) take the extension value 0.
    static Observable locally_constant(int word_len,
                                       std::map<std::string, Complex> table);
    // e^{2 pi i <h, x>} on the torus.
    static Observable character(std::vector<toral::Int> h);
    // Extension of a coded-system observable by 0 off K: decodes
    // window_depth generator blocks and evaluates g on the decoded
    // choices, 0 when the window is not K-compatible.
    static Observable lifted(std::shared_ptr<const Observable> inner,
                             horseshoe::CodedHorseshoe h, int window_depth);

    int window_len() const { return window_len_; }
    bool is_character() const { return kind_ == Kind::Character; }
    const std::vector<toral::Int>& frequency() const { return freq_; }
    double sup_norm() const { return sup_norm_; }
    Complex eval_window(std::string_view window) const;
    std::string name() const;

private:
    enum class Kind { CylinderDiff, LocallyConstant, Character, Lifted };
    Kind kind_ = Kind::CylinderDiff;
    int window_len_ = 1;
    double sup_norm_ = 1.0;
    Word w0_, w1_;
    std::map<std::string, Complex> table_;
    std::vector<toral::Int> freq_;
    std::shared_ptr<const Observable> inner_;
    std::shared_ptr<horseshoe::CodedHorseshoe> coded_;
    int window_depth_ = 2;
};

struct AverageSeries {
    std::vector<std::int64_t> grid;
    std::vector<Complex> values;  // A_N at each grid point
    std::string system, observable, point, weight;

    Complex back() const { return values.back(); }
};

// Exact partial sums A_N = (1/N) sum w_n f(T^n x) at the grid points,
// complex arithmetic with compensated summation.
AverageSeries weighted_average_series(const SystemHandle& sys,
                                      const Observable& f,
                                      const SystemPoint& x,
                                      const weights::WeightSequence& w,
                                      std::span<const std::int64_t> grid);

// f = 1_[0] - 1_[1] and x_n = 0 or 1 as w_n >= 0 or < 0 (complex weights
// are realized real first).  The resulting series satisfies
// A_N = (1/N) sum |w_n| exactly at every N.
std::pair<Observable, PointSpec> fullshift_pair(const weights::WeightSequence& w);

struct LiftResult {
    Observable ambient_f;
    PointSpec ambient_x;   // T^{tau-j0} of the embedded coded point
    PointSpec embedded_x0; // the coded point in ambient coordinates
    int j0 = 0;
    int tau = 0;
};

// Lifts a coded pair through a full first-return certificate: the ambient
// observable extends g by 0 on the steps (well-defined exactly because
// every offset is certified), and the point is shifted by tau - j0 with
// j0 = best_residue(w, tau).  The ambient series over tau*N terms equals
// (1/tau) times the coded series (1/N) sum_m w_{tau m + j0} g(sigma^{m+1} x0).
LiftResult lift_pair(const horseshoe::CodedHorseshoe& h,
                     const horseshoe::DisjointStepsCertificate& cert,
                     std::shared_ptr<const Observable> g,
                     const PointSpec& code_x0,
                     const weights::WeightSequence& w,
                     int window_depth = 2);

struct RotationControlReport {
    std::vector<std::int64_t> grid;
    std::vector<double> abs_values;  // |A_N|
    std::vector<double> ratios;      // |A_N| N |1-e^{2 pi i (alpha-beta)}| / 2
    double max_ratio = 0.0;
    bool bound_holds = false;
    bool resonance_warning = false;
    double denom = 0.0;
};

// Rotation by alpha against the weight w_n = e^{-2 pi i beta n} with
// f(x) = e^{2 pi i x}: checks the exact geometric bound
// |A_N| <= 2 / (N |1 - e^{2 pi i (alpha - beta)}|) on the grid.  A beta
// within 1e-9 of k*alpha mod 1 for |k| <= 50 only raises a warning.
RotationControlReport ue_control(double alpha, double beta,
                                 std::span<const std::int64_t> grid);

}  // namespace ergo::birkhoff

#endif
