#pragma once

// JSON renderings of reports. Certified quantities are exact "p/q" strings;
// decimals appear only under keys ending in "_approx".

#include <json.hpp>

#include <string>

#include "dsieve/dimension.hpp"
#include "dsieve/oracle.hpp"
#include "dsieve/schedule.hpp"
#include "dsieve/sieve.hpp"

namespace dsieve {

using Json = nlohmann::json;

/// Lowercase hex SHA-256 of the bytes of `text`.
std::string sha256_hex(const std::string& text);

/// Hash of eta, preset parameters and the (h, delta) table for n = 1..N.
std::string schedule_fingerprint(const Schedule& s, std::int64_t N);

Json to_json(const TermEnclosure& t);
Json to_json(const GrowthReport& r);
Json to_json(const ScheduleInfo& info);
Json to_json(const CheckpointChain& c);
Json to_json(const ConditionReport& r);
Json to_json(const SieveTrace& t);
Json to_json(const MarginReport& r, bool with_records = true);
Json to_json(const Certificate& c);
Json to_json(const SeriesReport& r);
Json to_json(const DimensionReport& r);
/// Pairs ["lo","hi"]; openness is listed separately for any closed endpoint.
Json to_json(const IntervalUnion& u, std::size_t max_pieces = static_cast<std::size_t>(-1));
Json to_json(const Comparison& c);

}  // namespace dsieve
