// JSON and CSV serialization for the public types; schemas documented in
// docs/schemas.md.

#ifndef ERGO_JSON_IO_HPP
#define ERGO_JSON_IO_HPP

#include <json.hpp>

#include <iosfwd>
#include <string>

#include "ergo/birkhoff.hpp"
#include "ergo/horseshoe.hpp"
#include "ergo/toral.hpp"
#include "ergo/weights.hpp"

namespace ergo::io {

using Json = nlohmann::ordered_json;

Json to_json(const symbolic::BlockCode& code);
symbolic::BlockCode block_code_from_json(const Json& j);

// {"generators": [...], "tau": ..., "sided": "one"|"two", "marker_len": ...,
//  "offsets_checked": [...], "injectivity_checked": [...], "trace": [...]}
Json to_json(const horseshoe::CertifiedHorseshoe& ch);
horseshoe::CertifiedHorseshoe certified_horseshoe_from_json(const Json& j);

Json to_json(const horseshoe::ResidueCoverSolution& sol);

Json to_json(const weights::WeightSpec& spec);
weights::WeightSpec weight_spec_from_json(const Json& j);

// {"d": ..., "rows": [[...], ...]} with string entries for big integers.
Json to_json(const toral::IntMatrix& m);
toral::IntMatrix int_matrix_from_json(const Json& j);

Json to_json(const toral::SpectralData& sd);
Json to_json(const toral::Classification& c);
Json to_json(const toral::SplitReport& rep);
Json to_json(const toral::LimitReport& rep);

// CSV columns: N, Re A_N, Im A_N, |A_N|; a leading '#' header comment line
// carries the schema version and metadata.
void write_series_csv(std::ostream& os, const birkhoff::AverageSeries& series);

// n, Re w_n, Im w_n
void write_weights_csv(std::ostream& os, const weights::WeightSequence& w);

// sample, residue, Re A_N, Im A_N, |A_N|
void write_per_sample_csv(std::ostream& os, const toral::LimitReport& rep);

// FNV-1a over the byte content; stable fingerprint for manifests.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace ergo::io

#endif
