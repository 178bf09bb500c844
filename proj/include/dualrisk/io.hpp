#pragma once

#include <string>
#include <vector>

#include "dualrisk/market.hpp"
#include "dualrisk/numerics.hpp"
#include "dualrisk/outcomes.hpp"
#include "dualrisk/utility.hpp"

namespace dualrisk::io {

/// Number formatting contract shared by every emitter: 12 significant
/// digits, infinities as the strings "inf"/"-inf", so ExtReal values
/// round-trip losslessly through either output format.
std::string fmt_num(double v);
std::string fmt_ext(num::ExtReal v);

/// Deterministic JSON emitter: insertion order preserved, numbers rendered
/// through fmt_num, strings escaped per JSON. Identical inputs produce
/// byte-identical documents.
class JsonWriter {
  public:
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, num::ExtReal v);
    JsonWriter& field(const std::string& key, const std::string& v);
    JsonWriter& field_bool(const std::string& key, bool v);
    JsonWriter& field_int(const std::string& key, long long v);
    JsonWriter& field_raw(const std::string& key, const std::string& json_fragment);
    std::string str() const; // the complete {...} document
  private:
    std::string body_;
};

std::string json_escape(const std::string& s);

/// One CSV row of preformatted cells; commas and newlines are not expected
/// in cells (all emitters use fmt_num/fixed tokens) and are rejected.
std::string csv_row(const std::vector<std::string>& cells);

// File-schema parsers. The text variants take the document plus an origin
// label used in diagnostics; parse failures raise parse_error naming the
// offending field.
//
//   distribution: {"type":"discrete","atoms":[[v,p],...]}
//                 {"type":"exp_tail","r":..,"p":..,"c":..,"head":[[v,p],...]}
//                 {"type":"normal_map","map":"affine"|"affine_exp","params":{..}}
//   utility:      {"kind":"linear"} | {"kind":"cara","beta":..}
//   market:       {"kernel":"lognormal","sigma2":..}
//                 {"kernel":"discrete","atoms":[[v,p],...]}
out::Outcome parse_distribution_text(const std::string& text, int quad_nodes,
                                     const std::string& origin);
util::Utility parse_utility_text(const std::string& text, const std::string& origin);
mkt::Market parse_market_text(const std::string& text, int quad_nodes,
                              const std::string& origin);

out::Outcome parse_distribution_file(const std::string& path, int quad_nodes);
util::Utility parse_utility_file(const std::string& path);
mkt::Market parse_market_file(const std::string& path, int quad_nodes);

std::string read_file(const std::string& path);

/// Distribution serialization for round-trip checks (finite discrete only).
std::string render_discrete_distribution(const out::Outcome& x);

} // namespace dualrisk::io
