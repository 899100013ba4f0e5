// Exact combinatorics of finite words, cylinders, block codes and
// shift-window checks over small alphabets.  Everything here is an
// immutable value; all operations are pure.

#ifndef ERGO_WORD_HPP
#define ERGO_WORD_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergo/errors.hpp"

namespace ergo::symbolic {

using Symbol = int;

enum class Sided { One, Two };

// A finite word over the alphabet {0,...,m-1}, stored as the characters
// '0'+k.  The default alphabet is binary.
class Word {
public:
    Word() = default;
    explicit Word(std::string symbols, int alphabet = 2);
    static Word from_symbols(std::span<const Symbol> symbols, int alphabet = 2);

    int length() const { return static_cast<int>(sym_.size()); }
    bool empty() const { return sym_.empty(); }
    int alphabet() const { return alphabet_; }
    Symbol at(int i) const { return sym_[static_cast<std::size_t>(i)] - '0'; }
    const std::string& str() const { return sym_; }
    std::string_view view() const { return sym_; }

    Word sub(int pos, int len) const;
    Word suffix(int pos) const { return sub(pos, length() - pos); }
    Word concat(const Word& other) const;
    Word repeated(int times) const;

    // 0 <-> 1 relabeling involution (binary words only).
    Word flipped() const;
    bool is_constant() const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::string sym_;
    int alphabet_ = 2;
};

// Equal-length block substitution 0 -> phi0, 1 -> phi1 with phi0 != phi1.
struct BlockCode {
    Word phi0;
    Word phi1;

    BlockCode(Word p0, Word p1);
    int block_len() const { return phi0.length(); }
    const Word& image(Symbol s) const { return s == 0 ? phi0 : phi1; }
};

Word block_encode(const BlockCode& code, const Word& w);
// Throws CodeError when the input length is not a multiple of the block
// length or some block is not in {phi0, phi1}.
Word block_decode(const BlockCode& code, const Word& ambient);

// A finitely described point of the one- or two-sided full shift.  Any
// coordinate is retrievable in finite time; rule-driven specs must be pure.
class PointSpec {
public:
    PointSpec() = default;  // empty; any coordinate access throws

    static PointSpec eventually_periodic(Word preamble, Word period,
                                         Sided sided = Sided::One);
    static PointSpec block_stream(PointSpec choices, BlockCode code);
    static PointSpec rule(std::function<Symbol(std::int64_t)> fn,
                          std::string descriptor, Sided sided = Sided::One);
    // x'_n = x_{n+offset}; one-sided specs require offset >= 0.
    static PointSpec shifted(PointSpec base, std::int64_t offset);

    Sided sided() const { return sided_; }
    const std::string& descriptor() const { return descriptor_; }
    Symbol at(std::int64_t n) const;
    Word window(std::int64_t start, int len) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    Sided sided_ = Sided::One;
    std::string descriptor_;
};

// Reads (x_start, ..., x_{start+len-1}).  Negative start is an error on
// one-sided specs.
Word window(const PointSpec& point, std::int64_t start, int len);

// True iff [u] and sigma^n([u]) are disjoint in the full shift, i.e. NOT
// (u_{n+i} == u_i for all 0 <= i < |u|-n).  Requires 1 <= n <= |u|-1.
bool self_overlap_free(const Word& u, int n);

// Sufficient first-return check at offset j for K = generators^infty: for
// every ordered pair (Wa, Wb) the length-tau window of WaWb starting at j
// is not a generator.  True implies K and sigma^j(K) are disjoint.
// Requires equal-length generators and 1 <= j <= tau-1.
bool pair_window_disjointness(std::span<const Word> generators, int j);

// Two-sided variant: tests all offset-j and offset-(j+tau) windows of all
// three-generator concatenations, matching the anchored-origin semantics.
bool triple_window_disjointness(std::span<const Word> generators, int j);

// True iff all generators have pairwise distinct suffixes from position n;
// sufficient for sigma^n to be injective on generators^infty.
bool suffix_injectivity(std::span<const Word> generators, int n);

}  // namespace ergo::symbolic

#endif
