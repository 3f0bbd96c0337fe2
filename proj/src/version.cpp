#include "qdisc/version.hpp"

namespace qdisc {

const char* const kVersion = QDISC_VERSION;

}  // namespace qdisc
