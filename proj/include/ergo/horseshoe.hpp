// Horseshoes with disjoint steps inside the binary full shift: cylinder
// refinement, horseshoe-in-a-cylinder construction, displacement witness
// search, and the full disjointification pipeline, all emitting
// re-verifiable first-return-time certificates.

#ifndef ERGO_HORSESHOE_HPP
#define ERGO_HORSESHOE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergo/word.hpp"

namespace ergo::horseshoe {

using symbolic::BlockCode;
using symbolic::Sided;
using symbolic::Word;

// Output of refine_cylinder: a sub-cylinder C' of C that is disjoint from
// all of its proper shifts.  When n0 < M the refined word is C followed by
// n0 ones (in the relabeled alphabet); when n0 == M it is C itself.
struct RefinedCylinder {
    Word original;
    Word refined;
    int n0 = 0;  // minimal self-overlap period of the original word
    Sided sided = Sided::One;
};

// A verified first-return-time certificate.  Every listed offset has been
// checked with the pair-window condition (triple-window when two-sided);
// every listed injectivity offset with the distinct-suffix condition.  The
// certificate is re-verifiable from the generators alone.
struct DisjointStepsCertificate {
    int tau = 0;
    std::vector<int> offsets_checked;
    std::vector<int> injectivity_checked;
    std::vector<std::string> trace;

    bool full() const {
        return static_cast<int>(offsets_checked.size()) == tau - 1;
    }
    bool covers_offset(int j) const;
    bool covers_injectivity(int n) const;
};

// A full-shift subsystem K = {gen_0, gen_1}^infty given by two distinct
// equal-length generator words.  marker_len records the shared 0-run
// prefix n1 when the horseshoe came out of build_horseshoe_in_cylinder.
struct CodedHorseshoe {
    std::vector<Word> generators;
    int order = 0;  // tau, the common generator length
    int marker_len = 0;
    std::optional<BlockCode> ambient_code;
    Sided sided = Sided::One;

    BlockCode coding() const;  // 0 -> gen_0, 1 -> gen_1
    void validate() const;
};

struct CertifiedHorseshoe {
    CodedHorseshoe horseshoe;
    DisjointStepsCertificate certificate;
};

// One displacement step: given a pq-order horseshoe whose steps at offsets
// kq (1<=k<=p-1) and kq+j (j in J) are certified disjoint, carve out a
// sub-horseshoe disjoint also at offsets kq+s.  disp2 mode requires s | q
// and certifies suffix injectivity at (pM-1)q on the output; disp1 mode
// requires n*s = j (mod q) for some j in J, n >= 1.
struct DisplacementTask {
    int p = 1;
    int q = 1;
    std::vector<int> J;
    int s = 1;
    bool disp2 = false;
};

struct ResidueCoverEntry {
    int n = 0;
    int x = 0;      // witness multiplier
    int prime = 0;  // prime factor of N with n*x = N/prime (mod N)
};

// For each n in {1,...,N-1} an entry (x, p_i) with n*x = N/p_i (mod N).
struct ResidueCoverSolution {
    int N = 0;
    std::vector<ResidueCoverEntry> table;
};

struct BuildOptions {
    bool allow_pre_refine = true;
    bool verify = true;
};

// Minimal n0 >= 1 with C contained in sigma^{n0}(C) (n0 = M always
// qualifies); the refined cylinder satisfies self_overlap_free at every
// offset 1..N-1.  Reproduces the rank-4 refinement table exactly.
RefinedCylinder refine_cylinder(const Word& C, Sided sided = Sided::One);

// Builds generators 0^{n1} a, 0^{n1} b of length n*+2 inside [C] and a
// full certificate for offsets 1..N-1 (plus injectivity 1..N-1 when
// one-sided).  Constant rank-1 cylinders are pre-refined by appending the
// opposite symbol unless opts.allow_pre_refine is false, in which case
// ConstantWordError is thrown.
CertifiedHorseshoe build_horseshoe_in_cylinder(const Word& C,
                                               Sided sided = Sided::One,
                                               const BuildOptions& opts = {});

// Brute force over x in {1,...,N-1}, primes in increasing order.
ResidueCoverSolution solve_residue_cover(int N);

// True iff u occurs at some position = r (mod tau) in a concatenation of
// generators, equivalently [u] meets sigma^m(K) for m = r (mod tau).
bool occurs_in_concatenation(std::span<const Word> generators, int r,
                             const Word& u);

// Enumerates K-cylinders by increasing depth, lexicographic in the
// generator choices, and returns the first word u with [u] disjoint from
// sigma^{kq+s}(K) for all 0 <= k <= p-1.  Throws DepthExceeded past
// max_depth generator blocks.
Word find_displacement_witness(const CodedHorseshoe& h,
                               const DisjointStepsCertificate& cert,
                               const DisplacementTask& task,
                               int max_depth = 16);

// Runs build_horseshoe_in_cylinder on the witness in code coordinates and
// pushes the result through the generators.  The output has order M*p*q
// and a certificate covering offsets kq (1<=k<=pM-1) and kq+j for
// j in J + {s}, 0 <= k <= pM-1; disp2 mode records injectivity at (pM-1)q.
CertifiedHorseshoe refine_avoiding(const CodedHorseshoe& h,
                                   const DisjointStepsCertificate& cert,
                                   const DisplacementTask& task,
                                   const Word& witness,
                                   const BuildOptions& opts = {});

struct DisjointifyOptions {
    int max_depth = 16;
    bool verify = true;
};

// Full pipeline: step 1 applies disp2 over s = N/p_i for every prime
// p_i | N; step 2 applies disp1 over the remaining residues, justified by
// solve_residue_cover.  The final certificate covers all offsets
// 1..tau-1 with tau = M*N.
CertifiedHorseshoe disjointify(const CodedHorseshoe& h,
                               const DisjointifyOptions& opts = {});

// Re-checks every claim of a serialized certificate from the generators
// alone.  Returns false (never throws) on any mismatch.
bool verify_certificate(const CodedHorseshoe& h,
                        const DisjointStepsCertificate& cert);

// Checks the named offsets / injectivity offsets against the generators,
// appending nothing on failure; throws CertificateFailure when
// `must_hold` and some check fails.
DisjointStepsCertificate certify(const CodedHorseshoe& h,
                                 const std::vector<int>& offsets,
                                 const std::vector<int>& injectivity,
                                 bool must_hold = true);

std::vector<int> prime_factors_desc(int N);

}  // namespace ergo::horseshoe

#endif
