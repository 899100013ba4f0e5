#include "ergo/word.hpp"

#include <algorithm>

namespace ergo::symbolic {

Word::Word(std::string symbols, int alphabet)
    : sym_(std::move(symbols)), alphabet_(alphabet) {
    if (alphabet_ < 2 || alphabet_ > 10)
        throw InvalidArgument("alphabet size must be in [2,10]");
    for (char c : sym_)
        if (c < '0' || c >= '0' + alphabet_)
            throw InvalidArgument("symbol out of alphabet: " + sym_);
}

Word Word::from_symbols(std::span<const Symbol> symbols, int alphabet) {
    std::string s;
    s.reserve(symbols.size());
    for (Symbol v : symbols) s.push_back(static_cast<char>('0' + v));
    return Word(std::move(s), alphabet);
}

Word Word::sub(int pos, int len) const {
    if (pos < 0 || len < 0 || pos + len > length())
        throw InvalidArgument("sub-word range out of bounds");
    return Word(sym_.substr(static_cast<std::size_t>(pos),
                            static_cast<std::size_t>(len)),
                alphabet_);
}

Word Word::concat(const Word& other) const {
    return Word(sym_ + other.sym_, std::max(alphabet_, other.alphabet_));
}

Word Word::repeated(int times) const {
    std::string s;
    s.reserve(sym_.size() * static_cast<std::size_t>(times));
    for (int i = 0; i < times; ++i) s += sym_;
    return Word(std::move(s), alphabet_);
}

Word Word::flipped() const {
    if (alphabet_ != 2) throw InvalidArgument("flipped() needs a binary word");
    std::string s = sym_;
    for (char& c : s) c = (c == '0') ? '1' : '0';
    return Word(std::move(s), 2);
}

bool Word::is_constant() const {
    return sym_.find_first_not_of(sym_.empty() ? '0' : sym_[0]) ==
           std::string::npos;
}

BlockCode::BlockCode(Word p0, Word p1) : phi0(std::move(p0)), phi1(std::move(p1)) {
    if (phi0.length() != phi1.length() || phi0.length() < 1)
        throw InvalidArgument("block code images must have equal positive length");
    if (phi0 == phi1) throw InvalidArgument("block code images must differ");
}

Word block_encode(const BlockCode& code, const Word& w) {
    std::string out;
    out.reserve(static_cast<std::size_t>(w.length() * code.block_len()));
    for (int i = 0; i < w.length(); ++i) {
        if (w.at(i) > 1) throw InvalidArgument("block_encode input must be binary");
        out += code.image(w.at(i)).str();
    }
    return Word(std::move(out), code.phi0.alphabet());
}

Word block_decode(const BlockCode& code, const Word& ambient) {
    const int L = code.block_len();
    if (ambient.length() % L != 0)
        throw CodeError("decode input length is not a multiple of the block length");
    std::string out;
    out.reserve(static_cast<std::size_t>(ambient.length() / L));
    for (int i = 0; i < ambient.length(); i += L) {
        std::string_view block = ambient.view().substr(
            static_cast<std::size_t>(i), static_cast<std::size_t>(L));
        if (block == code.phi0.view())
            out.push_back('0');
        else if (block == code.phi1.view())
            out.push_back('1');
        else
            throw CodeError("block not in code image: " + std::string(block));
    }
    return Word(std::move(out), 2);
}

// ---------------------------------------------------------------------------
// PointSpec

struct PointSpec::Impl {
    enum class Kind { EventuallyPeriodic, BlockStream, Rule, Shifted } kind;

    // eventually periodic
    Word preamble;
    Word period;

    // block stream
    std::optional<PointSpec> choices;
    std::optional<BlockCode> code;

    // rule
    std::function<Symbol(std::int64_t)> fn;

    // shifted
    std::optional<PointSpec> base;
    std::int64_t offset = 0;
};

PointSpec PointSpec::eventually_periodic(Word preamble, Word period, Sided sided) {
    if (period.empty()) throw InvalidArgument("period word must be non-empty");
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::EventuallyPeriodic;
    impl->preamble = std::move(preamble);
    impl->period = std::move(period);
    PointSpec p;
    p.impl_ = std::move(impl);
    p.sided_ = sided;
    p.descriptor_ = "eventually_periodic(" + p.impl_->preamble.str() + "," +
                    p.impl_->period.str() + ")";
    return p;
}

PointSpec PointSpec::block_stream(PointSpec choices, BlockCode code) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::BlockStream;
    impl->choices = std::move(choices);
    impl->code = std::move(code);
    PointSpec p;
    p.sided_ = impl->choices->sided();
    p.descriptor_ = "block_stream(" + impl->choices->descriptor() + ";" +
                    impl->code->phi0.str() + "," + impl->code->phi1.str() + ")";
    p.impl_ = std::move(impl);
    return p;
}

PointSpec PointSpec::rule(std::function<Symbol(std::int64_t)> fn,
                          std::string descriptor, Sided sided) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::Rule;
    impl->fn = std::move(fn);
    PointSpec p;
    p.impl_ = std::move(impl);
    p.sided_ = sided;
    p.descriptor_ = "rule(" + descriptor + ")";
    return p;
}

PointSpec PointSpec::shifted(PointSpec base, std::int64_t offset) {
    if (base.sided() == Sided::One && offset < 0)
        throw InvalidArgument("negative shift of a one-sided point");
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::Kind::Shifted;
    impl->offset = offset;
    PointSpec p;
    p.sided_ = base.sided();
    p.descriptor_ = "shift(" + std::to_string(offset) + ";" + base.descriptor() + ")";
    impl->base = std::move(base);
    p.impl_ = std::move(impl);
    return p;
}

Symbol PointSpec::at(std::int64_t n) const {
    if (!impl_) throw InvalidArgument("empty PointSpec");
    if (sided_ == Sided::One && n < 0)
        throw InvalidArgument("negative coordinate on a one-sided point");
    const Impl& im = *impl_;
    switch (im.kind) {
        case Impl::Kind::EventuallyPeriodic: {
            const std::int64_t pre = im.preamble.length();
            if (n >= 0 && n < pre) return im.preamble.at(static_cast<int>(n));
            // Two-sided specs continue the period on both sides of the
            // anchored preamble.
            const std::int64_t per = im.period.length();
            std::int64_t k = (n - pre) % per;
            if (k < 0) k += per;
            return im.period.at(static_cast<int>(k));
        }
        case Impl::Kind::BlockStream: {
            const std::int64_t L = im.code->block_len();
            std::int64_t block = n >= 0 ? n / L : (n - (L - 1)) / L;
            std::int64_t pos = n - block * L;
            Symbol choice = im.choices->at(block);
            if (choice > 1) throw InvalidArgument("block-stream choices must be binary");
            return im.code->image(choice).at(static_cast<int>(pos));
        }
        case Impl::Kind::Rule: {
            Symbol s = im.fn(n);
            if (s < 0) throw InvalidArgument("rule produced a negative symbol");
            return s;
        }
        case Impl::Kind::Shifted:
            return im.base->at(n + im.offset);
    }
    throw InvalidArgument("corrupt PointSpec");
}

Word PointSpec::window(std::int64_t start, int len) const {
    if (len < 1) throw InvalidArgument("window length must be >= 1");
    std::string s;
    s.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        s.push_back(static_cast<char>('0' + at(start + i)));
    return Word(std::move(s));
}

Word window(const PointSpec& point, std::int64_t start, int len) {
    return point.window(start, len);
}

// ---------------------------------------------------------------------------
// Shift-window checks

bool self_overlap_free(const Word& u, int n) {
    const int len = u.length();
    if (n < 1 || n > len - 1) throw InvalidArgument("overlap offset out of range");
    for (int i = 0; i + n < len; ++i)
        if (u.at(n + i) != u.at(i)) return true;
    return false;
}

namespace {

void check_generators(std::span<const Word> generators, int j, const char* what) {
    if (generators.empty()) throw InvalidArgument("empty generator set");
    const int tau = generators.front().length();
    for (const Word& g : generators)
        if (g.length() != tau)
            throw InvalidArgument("generators must share a common length");
    if (j < 1 || j > tau - 1)
        throw InvalidArgument(std::string(what) + ": offset out of range");
}

bool window_is_generator(std::string_view concat, int j, int tau,
                         std::span<const Word> generators) {
    std::string_view w = concat.substr(static_cast<std::size_t>(j),
                                       static_cast<std::size_t>(tau));
    for (const Word& g : generators)
        if (w == g.view()) return true;
    return false;
}

}  // namespace

bool pair_window_disjointness(std::span<const Word> generators, int j) {
    check_generators(generators, j, "pair_window_disjointness");
    const int tau = generators.front().length();
    for (const Word& a : generators)
        for (const Word& b : generators) {
            std::string concat = a.str() + b.str();
            if (window_is_generator(concat, j, tau, generators)) return false;
        }
    return true;
}

bool triple_window_disjointness(std::span<const Word> generators, int j) {
    check_generators(generators, j, "triple_window_disjointness");
    const int tau = generators.front().length();
    for (const Word& a : generators)
        for (const Word& b : generators)
            for (const Word& c : generators) {
                std::string concat = a.str() + b.str() + c.str();
                if (window_is_generator(concat, j, tau, generators)) return false;
                if (window_is_generator(concat, j + tau, tau, generators))
                    return false;
            }
    return true;
}

bool suffix_injectivity(std::span<const Word> generators, int n) {
    check_generators(generators, n, "suffix_injectivity");
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t k = i + 1; k < generators.size(); ++k)
            if (generators[i].view().substr(static_cast<std::size_t>(n)) ==
                generators[k].view().substr(static_cast<std::size_t>(n)))
                return false;
    return true;
}

}  // namespace ergo::symbolic
