#pragma once

namespace qdisc {

extern const char* const kVersion;

}  // namespace qdisc
