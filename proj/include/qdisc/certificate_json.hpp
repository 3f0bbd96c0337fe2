#pragma once

// JSON form of certificates. Rationals are "num/den" strings, elements of
// Q(sqrt d) are {"a", "b", "d"} objects, matrices are dense row-major lists of
// {"re", "im"} pairs.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qdisc/certify.hpp"

namespace qdisc {

nlohmann::json scalar_to_json(const QuadExt& x);
QuadExt scalar_from_json(const nlohmann::json& j);

nlohmann::json bound_to_json(const RadicalSum& x);
RadicalSum bound_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

void save_certificate(const Certificate& c, const std::filesystem::path& path);
Certificate load_certificate(const std::filesystem::path& path);

}  // namespace qdisc
