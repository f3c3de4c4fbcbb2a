#pragma once

#include <iosfwd>

namespace phasemm {

/// Fast built-in invariant checks (spectral identities, determinism,
/// update equivalence, descent and majorizer spot checks). Prints one line
/// per suite and returns the number of failures.
int selftest(std::ostream& out);

}  // namespace phasemm
