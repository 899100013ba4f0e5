#include "ergo/horseshoe.hpp"

#include <algorithm>
#include <numeric>

namespace ergo::horseshoe {

bool DisjointStepsCertificate::covers_offset(int j) const {
    return std::find(offsets_checked.begin(), offsets_checked.end(), j) !=
           offsets_checked.end();
}

bool DisjointStepsCertificate::covers_injectivity(int n) const {
    if (n == 0) return true;  // sigma^0 is the identity
    return std::find(injectivity_checked.begin(), injectivity_checked.end(),
                     n) != injectivity_checked.end();
}

BlockCode CodedHorseshoe::coding() const {
    validate();
    return BlockCode(generators[0], generators[1]);
}

void CodedHorseshoe::validate() const {
    if (generators.size() != 2)
        throw InvalidArgument("coded horseshoe needs exactly two generators");
    if (generators[0] == generators[1])
        throw InvalidArgument("generators must be distinct");
    if (generators[0].length() != order || generators[1].length() != order)
        throw InvalidArgument("generator length does not match declared order");
}

// ---------------------------------------------------------------------------
// Cylinder refinement

RefinedCylinder refine_cylinder(const Word& C, Sided sided) {
    const int M = C.length();
    if (M < 1) throw InvalidArgument("cylinder word must be non-empty");
    if (C.alphabet() != 2)
        throw InvalidArgument("refine_cylinder works on binary cylinders");

    // Normalize to a_0 = 0; the construction is invariant under the 0<->1
    // involution, so relabel on input and invert on output.
    const bool flip = C.at(0) == 1;
    Word D = flip ? C.flipped() : C;

    int n0 = M;
    for (int n = 1; n < M; ++n) {
        if (!symbolic::self_overlap_free(D, n)) {
            n0 = n;
            break;
        }
    }

    Word refined =
        (n0 == M) ? D : D.concat(Word(std::string(static_cast<std::size_t>(n0), '1')));
    if (flip) refined = refined.flipped();

    RefinedCylinder out{C, refined, n0, sided};
    for (int n = 1; n < out.refined.length(); ++n)
        if (!symbolic::self_overlap_free(out.refined, n))
            throw CertificateFailure("refined cylinder overlaps itself at offset " +
                                     std::to_string(n));
    return out;
}

// ---------------------------------------------------------------------------
// Horseshoe in a cylinder

namespace {

std::vector<int> range_1_to(int last) {
    std::vector<int> v(static_cast<std::size_t>(std::max(0, last)));
    std::iota(v.begin(), v.end(), 1);
    return v;
}

bool offset_disjoint(const CodedHorseshoe& h, int j) {
    return h.sided == Sided::One
               ? symbolic::pair_window_disjointness(h.generators, j)
               : symbolic::triple_window_disjointness(h.generators, j);
}

}  // namespace

DisjointStepsCertificate certify(const CodedHorseshoe& h,
                                 const std::vector<int>& offsets,
                                 const std::vector<int>& injectivity,
                                 bool must_hold) {
    h.validate();
    DisjointStepsCertificate cert;
    cert.tau = h.order;
    for (int j : offsets) {
        if (!offset_disjoint(h, j)) {
            if (must_hold)
                throw CertificateFailure("window check failed at offset " +
                                         std::to_string(j));
            continue;
        }
        cert.offsets_checked.push_back(j);
    }
    for (int n : injectivity) {
        if (!symbolic::suffix_injectivity(h.generators, n)) {
            if (must_hold)
                throw CertificateFailure("suffix injectivity failed at offset " +
                                         std::to_string(n));
            continue;
        }
        cert.injectivity_checked.push_back(n);
    }
    std::sort(cert.offsets_checked.begin(), cert.offsets_checked.end());
    std::sort(cert.injectivity_checked.begin(), cert.injectivity_checked.end());
    return cert;
}

bool verify_certificate(const CodedHorseshoe& h,
                        const DisjointStepsCertificate& cert) {
    try {
        h.validate();
        if (cert.tau != h.order) return false;
        for (int j : cert.offsets_checked)
            if (j < 1 || j > cert.tau - 1 || !offset_disjoint(h, j)) return false;
        for (int n : cert.injectivity_checked)
            if (n < 1 || n > cert.tau - 1 ||
                !symbolic::suffix_injectivity(h.generators, n))
                return false;
        return true;
    } catch (const Error&) {
        return false;
    }
}

CertifiedHorseshoe build_horseshoe_in_cylinder(const Word& C, Sided sided,
                                               const BuildOptions& opts) {
    if (C.length() < 1) throw InvalidArgument("cylinder word must be non-empty");
    const bool flip = C.at(0) == 1;
    Word D = flip ? C.flipped() : C;
    std::vector<std::string> trace;

    RefinedCylinder ref = refine_cylinder(D, sided);
    if (ref.refined.str().find('1') == std::string::npos) {
        // The periodic word of C' carries no 1, so the marker n1 does not
        // exist.  Pre-refine by appending the opposite symbol; the result
        // still lies inside [C].
        if (!opts.allow_pre_refine)
            throw ConstantWordError("constant cylinder " + C.str() +
                                    " needs pre-refinement");
        D = D.concat(Word("1"));
        trace.push_back("pre_refine " + C.str() + " -> " +
                        (flip ? D.flipped() : D).str());
        ref = refine_cylinder(D, sided);
    }

    const Word& y = ref.refined;
    const int n_star = y.length();
    int n1 = 0;
    while (y.at(n1) != 1) ++n1;

    // Generators 0^{n1} a and 0^{n1} b with a = y_{n1}..y_{n*-1} 1 0 and
    // b = y_{n1}..y_{n*-1} 1 1; both of length n*+2, both starting with
    // the word of C', hence contained in [C].
    Word g0 = y.concat(Word("10"));
    Word g1 = y.concat(Word("11"));
    if (flip) {
        g0 = g0.flipped();
        g1 = g1.flipped();
    }

    CodedHorseshoe h;
    h.generators = {g0, g1};
    h.order = n_star + 2;
    h.marker_len = n1;
    h.sided = sided;
    h.validate();

    if (g0.view().substr(0, static_cast<std::size_t>(C.length())) != C.view() ||
        g1.view().substr(0, static_cast<std::size_t>(C.length())) != C.view())
        throw CertificateFailure("generators escaped the input cylinder");

    trace.push_back("refine " + C.str() + " -> " +
                    (flip ? ref.refined.flipped() : ref.refined).str() +
                    " n0=" + std::to_string(ref.n0));
    trace.push_back("build n*=" + std::to_string(n_star) +
                    " n1=" + std::to_string(n1) + " generators=" + g0.str() +
                    "," + g1.str());

    DisjointStepsCertificate cert =
        opts.verify
            ? certify(h, range_1_to(h.order - 1),
                      sided == Sided::One ? range_1_to(h.order - 1)
                                          : std::vector<int>{},
                      /*must_hold=*/true)
            : DisjointStepsCertificate{h.order, {}, {}, {}};
    cert.tau = h.order;
    cert.trace = std::move(trace);
    return {std::move(h), std::move(cert)};
}

// ---------------------------------------------------------------------------
// Residue cover

std::vector<int> prime_factors_desc(int N) {
    std::vector<int> primes;
    int n = N;
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            primes.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) primes.push_back(n);
    std::sort(primes.rbegin(), primes.rend());
    return primes;
}

ResidueCoverSolution solve_residue_cover(int N) {
    if (N < 2) throw InvalidArgument("solve_residue_cover needs N >= 2");
    std::vector<int> primes = prime_factors_desc(N);
    std::sort(primes.begin(), primes.end());
    ResidueCoverSolution sol;
    sol.N = N;
    for (int n = 1; n < N; ++n) {
        bool found = false;
        for (int x = 1; x < N && !found; ++x)
            for (int p : primes)
                if ((static_cast<long long>(n) * x) % N == N / p) {
                    sol.table.push_back({n, x, p});
                    found = true;
                    break;
                }
        if (!found)
            throw CertificateFailure("no residue cover entry for n=" +
                                     std::to_string(n) + " N=" + std::to_string(N));
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Occurrence check and witness search

namespace {

// Can blocks of generators, laid out so that u starts r symbols into the
// first block, spell out u?  Depth-first over the block choices.
bool occurs_rec(std::span<const Word> gens, int tau, const Word& u, int r,
                int upos) {
    if (upos >= u.length()) return true;
    const int take = std::min(tau - r, u.length() - upos);
    for (const Word& g : gens) {
        if (g.view().substr(static_cast<std::size_t>(r),
                            static_cast<std::size_t>(take)) ==
            u.view().substr(static_cast<std::size_t>(upos),
                            static_cast<std::size_t>(take))) {
            if (occurs_rec(gens, tau, u, 0, upos + take)) return true;
        }
    }
    return false;
}

}  // namespace

bool occurs_in_concatenation(std::span<const Word> generators, int r,
                             const Word& u) {
    if (generators.empty()) throw InvalidArgument("empty generator set");
    const int tau = generators.front().length();
    if (r < 0 || r >= tau) throw InvalidArgument("occurrence offset out of range");
    if (u.empty()) return true;
    return occurs_rec(generators, tau, u, r, 0);
}

namespace {

void validate_task(const CodedHorseshoe& h, const DisplacementTask& task) {
    h.validate();
    if (task.p < 1 || task.q < 1)
        throw InvalidArgument("displacement task needs p, q >= 1");
    if (task.p * task.q != h.order)
        throw InvalidArgument("displacement task p*q must equal the order");
    if (task.s < 1 || task.s >= task.q)
        throw InvalidArgument("displacement offset s must satisfy 1 <= s < q");
    if (task.disp2 && task.q % task.s != 0)
        throw InvalidArgument("disp2 mode needs s | q");
    if (!task.disp2) {
        // disp1 applicability: n*s = j (mod q) for some j in J, n >= 1.
        bool ok = false;
        for (int n = 1; n <= task.q && !ok; ++n)
            ok = std::find(task.J.begin(), task.J.end(),
                           (static_cast<long long>(n) * task.s) % task.q) !=
                 task.J.end();
        if (!ok)
            throw InvalidArgument(
                "disp1 mode: no multiple of s lands in J (mod q)");
    }
    for (int j : task.J)
        if (j < 1 || j > task.q)
            throw InvalidArgument("J must be a subset of {1,...,q}");
}

void require_task_certificate(const DisjointStepsCertificate& cert,
                              const DisplacementTask& task, Sided sided) {
    for (int k = 1; k <= task.p - 1; ++k)
        if (!cert.covers_offset(k * task.q))
            throw InvalidArgument("certificate lacks offset " +
                                  std::to_string(k * task.q));
    for (int j : task.J)
        for (int k = 0; k <= task.p - 1; ++k)
            if (!cert.covers_offset(k * task.q + j))
                throw InvalidArgument("certificate lacks offset " +
                                      std::to_string(k * task.q + j));
    // Two-sided shifts are bijections, so the disp2 hypothesis holds for
    // free there; one-sided horseshoes must have certified it.
    if (task.disp2 && sided == Sided::One &&
        !cert.covers_injectivity((task.p - 1) * task.q))
        throw InvalidArgument("disp2 mode needs certified injectivity at offset " +
                              std::to_string((task.p - 1) * task.q));
}

bool witness_avoids(const CodedHorseshoe& h, const DisplacementTask& task,
                    const Word& u) {
    for (int k = 0; k <= task.p - 1; ++k) {
        const int m = (k * task.q + task.s) % h.order;
        if (occurs_in_concatenation(h.generators, m, u)) return false;
    }
    return true;
}

}  // namespace

Word find_displacement_witness(const CodedHorseshoe& h,
                               const DisjointStepsCertificate& cert,
                               const DisplacementTask& task, int max_depth) {
    validate_task(h, task);
    require_task_certificate(cert, task, h.sided);

    for (int depth = 1; depth <= max_depth; ++depth) {
        const std::uint64_t count = 1ull << depth;
        for (std::uint64_t c = 0; c < count; ++c) {
            std::string u;
            u.reserve(static_cast<std::size_t>(depth * h.order));
            for (int i = 0; i < depth; ++i) {
                const int choice = static_cast<int>((c >> (depth - 1 - i)) & 1);
                u += h.generators[static_cast<std::size_t>(choice)].str();
            }
            Word candidate(std::move(u));
            if (witness_avoids(h, task, candidate)) return candidate;
        }
    }
    throw DepthExceeded("no displacement witness for s=" + std::to_string(task.s) +
                        " q=" + std::to_string(task.q) + " within depth " +
                        std::to_string(max_depth));
}

// ---------------------------------------------------------------------------
// Refinement step

CertifiedHorseshoe refine_avoiding(const CodedHorseshoe& h,
                                   const DisjointStepsCertificate& cert,
                                   const DisplacementTask& task,
                                   const Word& witness,
                                   const BuildOptions& opts) {
    validate_task(h, task);
    require_task_certificate(cert, task, h.sided);
    if (!witness_avoids(h, task, witness))
        throw InvalidArgument("witness does not avoid the displaced steps");

    // Decode the witness into code coordinates.
    const Word choices = symbolic::block_decode(h.coding(), witness);

    // Horseshoe inside the code cylinder [choices]; its generators carry
    // the choice word as prefix, hence the expanded ones stay inside
    // [witness].
    CertifiedHorseshoe inner =
        build_horseshoe_in_cylinder(choices, h.sided, opts);
    const int M = inner.horseshoe.order;

    CodedHorseshoe out;
    const BlockCode expand = h.coding();
    out.generators = {symbolic::block_encode(expand, inner.horseshoe.generators[0]),
                      symbolic::block_encode(expand, inner.horseshoe.generators[1])};
    out.order = M * h.order;
    out.marker_len = static_cast<int>(std::min(
        out.generators[0].str().find_first_not_of('0'),
        out.generators[1].str().find_first_not_of('0')));
    out.ambient_code = h.ambient_code;
    out.sided = h.sided;
    out.validate();

    const int pM = task.p * M;
    std::vector<int> offsets;
    for (int k = 1; k <= pM - 1; ++k) offsets.push_back(k * task.q);
    std::vector<int> residues = task.J;
    residues.push_back(task.s);
    for (int j : residues)
        for (int k = 0; k <= pM - 1; ++k) offsets.push_back(k * task.q + j);
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

    std::vector<int> injectivity;
    if (task.disp2 && h.sided == Sided::One && pM >= 2)
        injectivity.push_back((pM - 1) * task.q);

    DisjointStepsCertificate out_cert =
        opts.verify ? certify(out, offsets, injectivity, /*must_hold=*/true)
                    : DisjointStepsCertificate{out.order, offsets, injectivity, {}};
    out_cert.tau = out.order;
    out_cert.trace = cert.trace;
    out_cert.trace.push_back(
        std::string("refine_avoiding mode=") + (task.disp2 ? "disp2" : "disp1") +
        " s=" + std::to_string(task.s) + " q=" + std::to_string(task.q) +
        " p=" + std::to_string(task.p) + " witness=" + witness.str() +
        " M=" + std::to_string(M) + " order=" + std::to_string(out.order));
    for (const std::string& t : inner.certificate.trace)
        out_cert.trace.push_back("  inner: " + t);
    return {std::move(out), std::move(out_cert)};
}

// ---------------------------------------------------------------------------
// Disjointification

CertifiedHorseshoe disjointify(const CodedHorseshoe& h,
                               const DisjointifyOptions& opts) {
    h.validate();
    const int N = h.order;

    if (N == 1) {
        DisjointStepsCertificate cert;
        cert.tau = 1;
        cert.trace.push_back("order 1: nothing to prove");
        return {h, cert};
    }

    CodedHorseshoe cur = h;
    DisjointStepsCertificate cert;
    cert.tau = N;
    int p = 1;
    std::vector<int> J;
    BuildOptions build_opts;
    build_opts.verify = opts.verify;

    auto run_pass = [&](int s, bool disp2, const std::string& label) {
        DisplacementTask task{p, N, J, s, disp2};
        if (disp2 && p >= 2 && h.sided == Sided::One &&
            !cert.covers_injectivity((p - 1) * N)) {
            // Fall back to disp1 when the injectivity hypothesis is not
            // certified but some multiple of s already lands in J.
            task.disp2 = false;
        }
        Word witness;
        try {
            witness = find_displacement_witness(cur, cert, task, opts.max_depth);
        } catch (DepthExceeded& e) {
            throw DepthExceeded(std::string(e.what()) + " [" + label + "]");
        }
        CertifiedHorseshoe next =
            refine_avoiding(cur, cert, task, witness, build_opts);
        cur = std::move(next.horseshoe);
        cert = std::move(next.certificate);
        p = cur.order / N;
        J.push_back(s);
    };

    // Step 1: one disp2 pass per prime factor, s = N/p_i, largest prime
    // first.
    for (int prime : prime_factors_desc(N))
        run_pass(N / prime, /*disp2=*/true,
                 "step1 prime=" + std::to_string(prime));

    // Step 2: the remaining residues; each k has a multiple landing on
    // some N/p_i (mod N), so disp1 applies.
    ResidueCoverSolution cover = solve_residue_cover(N);
    for (int s = 1; s < N; ++s) {
        if (std::find(J.begin(), J.end(), s) != J.end()) continue;
        const ResidueCoverEntry& entry = cover.table[static_cast<std::size_t>(s - 1)];
        run_pass(s, /*disp2=*/false,
                 "step2 s=" + std::to_string(s) + " via x=" +
                     std::to_string(entry.x) + " prime=" +
                     std::to_string(entry.prime));
    }

    // The accumulated offsets cover every residue and every multiple of N
    // below tau; re-state the certificate as the explicit full range.
    std::vector<int> all = range_1_to(cur.order - 1);
    for (int j : all)
        if (!cert.covers_offset(j))
            throw CertificateFailure("disjointify left offset " + std::to_string(j) +
                                     " uncovered");
    cert.offsets_checked = std::move(all);
    cert.trace.push_back("disjointify done: N=" + std::to_string(N) +
                         " tau=" + std::to_string(cur.order) +
                         " M=" + std::to_string(cur.order / N));
    return {std::move(cur), std::move(cert)};
}

}  // namespace ergo::horseshoe
